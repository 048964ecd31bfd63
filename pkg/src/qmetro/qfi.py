"""Quantum Fisher information, symmetric logarithmic derivative, fidelity."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, InconsistentDerivativeError

RETAIN_TOL = 1e-12
HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class QfiResult:
    value: float
    sld: Optional[np.ndarray]
    spectrum_condition: float


def _check_hermitian(m, name):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"{name} must be a square matrix")
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL * scale:
        raise DomainError(f"{name} is not Hermitian")
    return (m + m.conj().T) / 2


def qfi_pure(psi, dpsi):
    """4 (<dpsi|dpsi> - |<dpsi|psi>|^2) for a normalized pure state."""
    psi = np.asarray(psi, dtype=complex).ravel()
    dpsi = np.asarray(dpsi, dtype=complex).ravel()
    if abs(np.vdot(psi, psi).real - 1) > 1e-10:
        raise DomainError("state is not normalized")
    overlap = np.vdot(dpsi, psi)
    if abs(overlap.real) > 1e-8:
        raise InconsistentDerivativeError(
            "derivative does not preserve the norm of the state")
    return float(4 * (np.vdot(dpsi, dpsi).real - abs(overlap) ** 2))


def _spectrum(rho):
    w, v = np.linalg.eigh(rho)
    return np.clip(w, 0.0, None), v


def qfi_mixed(rho, drho, tol=RETAIN_TOL):
    """QFI and SLD from the eigendecomposition of rho.

    Pairs of eigenvalues with lam_i + lam_j <= tol are left out.
    """
    rho = _check_hermitian(rho, "rho")
    drho = _check_hermitian(drho, "drho")
    if abs(np.trace(drho)) > 1e-8:
        raise DomainError("drho must be traceless")
    lam, vec = _spectrum(rho)
    d = vec.conj().T @ drho @ vec
    denom = lam[:, None] + lam[None, :]
    keep = denom > tol
    lsld = np.zeros_like(d)
    lsld[keep] = 2 * d[keep] / denom[keep]
    value = float(np.sum(lam[:, None] * np.abs(lsld) ** 2))
    sld = vec @ lsld @ vec.conj().T
    cond = float(denom[keep].min()) if np.any(keep) else 0.0
    return QfiResult(max(value, 0.0), (sld + sld.conj().T) / 2, cond)


def sld_residual(rho, drho, sld, tol=RETAIN_TOL):
    """Norm of drho - (rho L + L rho)/2 on the retained support."""
    lam, vec = _spectrum(_check_hermitian(rho, "rho"))
    r = drho - (rho @ sld + sld @ rho) / 2
    r = vec.conj().T @ r @ vec
    keep = (lam[:, None] + lam[None, :]) > tol
    return float(np.linalg.norm(r[keep]))


def qfi_unitary(rho, h, tol=RETAIN_TOL):
    """QFI of exp(-i phi h) rho exp(i phi h)."""
    rho = _check_hermitian(rho, "rho")
    h = _check_hermitian(h, "h")
    lam, vec = _spectrum(rho)
    hh = vec.conj().T @ h @ vec
    denom = lam[:, None] + lam[None, :]
    diff = lam[:, None] - lam[None, :]
    keep = denom > tol
    return float(np.sum(2 * np.abs(hh[keep]) ** 2 * diff[keep] ** 2 / denom[keep]))


def psd_sqrt(m):
    w, v = np.linalg.eigh(_check_hermitian(m, "matrix"))
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def fidelity(rho1, rho2):
    """(Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2."""
    s = psd_sqrt(rho1)
    inner = s @ _check_hermitian(rho2, "rho2") @ s
    w = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    return float(min(1.0, np.sum(np.sqrt(np.clip(w, 0.0, None))) ** 2))


def finite_difference(f, x, step=1e-6):
    """Central difference of an array valued function; cross-checks only."""
    return (np.asarray(f(x + step)) - np.asarray(f(x - step))) / (2 * step)


def purification_objective(var_jz, gamma, lam):
    return 2 * lam ** 2 + 4 * (1 - np.sqrt(2 * gamma) * lam) ** 2 * var_jz


def optimal_purification_lambda(var_jz, gamma):
    return 2 * np.sqrt(2 * gamma) * var_jz / (1 + 4 * gamma * var_jz)


def phase_diffusion_purification_bound(var_jz, gamma, lam="optimal"):
    """Upper bound on the QFI of a phase-diffused state.

    ``lam`` is the free parameter of the purification family; "optimal"
    returns the minimum over it, 4 V / (1 + 4 Gamma V).
    """
    if var_jz < 0 or gamma < 0:
        raise DomainError("variance and Gamma must be nonnegative")
    if isinstance(lam, str):
        if lam != "optimal":
            raise DomainError("lam must be a number or 'optimal'")
        return 4 * var_jz / (1 + 4 * gamma * var_jz)
    return float(purification_objective(var_jz, gamma, lam))
