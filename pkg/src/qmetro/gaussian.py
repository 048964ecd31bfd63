"""Two-mode Gaussian states: covariance algebra, optics, QFI and Fock bridges.

Quadratures are x = a + a^dag and p = i(a^dag - a), ordered x1, p1, x2, p2.
The covariance is sigma_ij = <{dz_i, dz_j}>/2, so the vacuum has sigma = 1.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, TruncationError
from .fock_core import (TwoModeGrid, build_j_operators, phase_average)
from .qfi import qfi_pure

PURITY_TOL = 1e-8
FOCK_TOL = 1e-10


@dataclass(frozen=True)
class GaussianState:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        cov = np.asarray(self.cov, dtype=float)
        if mean.size % 2 or cov.shape != (mean.size, mean.size):
            raise DomainError("mean and covariance sizes do not match 2M")
        if np.max(np.abs(cov - cov.T)) > 1e-10 * max(1.0, np.max(np.abs(cov))):
            raise DomainError("covariance must be symmetric")
        cov = (cov + cov.T) / 2
        if np.linalg.eigvalsh(cov + 1j * omega(mean.size // 2))[0] < -1e-10 * max(1.0, np.max(np.abs(cov))):
            raise DomainError("covariance violates the uncertainty principle")
        mean.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def modes(self):
        return self.mean.size // 2

    @classmethod
    def vacuum(cls, modes=2):
        return cls(np.zeros(2 * modes), np.eye(2 * modes))


@dataclass(frozen=True)
class SqueezeParams:
    r: float
    theta: float = 0.0
    alpha: complex = 0.0

    def __post_init__(self):
        if self.r < 0:
            raise DomainError("squeezing factor must be nonnegative")


def omega(modes):
    return np.kron(np.eye(modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def passive_symplectic(u):
    """Real quadrature map of the mode transformation a -> u a."""
    u = np.asarray(u, dtype=complex)
    m = u.shape[0]
    s = np.zeros((2 * m, 2 * m))
    for j in range(m):
        for k in range(m):
            re, im = u[j, k].real, u[j, k].imag
            s[2 * j:2 * j + 2, 2 * k:2 * k + 2] = [[re, -im], [im, re]]
    return s


def beam_splitter_matrix(t):
    """Mode matrix [[sqrt T, -i sqrt(1-T)], [-i sqrt(1-T), sqrt T]]."""
    if not 0.0 <= t <= 1.0:
        raise DomainError("transmission must lie in [0, 1]")
    c, s = np.sqrt(t), np.sqrt(1 - t)
    return np.array([[c, -1j * s], [-1j * s, c]])


def _embed(s_local, mode, modes):
    s = np.eye(2 * modes)
    s[2 * mode:2 * mode + 2, 2 * mode:2 * mode + 2] = s_local
    return s


def _check_mode(mode, modes):
    if not 0 <= mode < modes:
        raise DomainError(f"mode {mode} out of range")


def squeeze_symplectic(r, theta):
    """a -> cosh r a - e^{i theta} sinh r a^dag."""
    c, s = np.cosh(r), np.sinh(r)
    return np.array([[c - s * np.cos(theta), -s * np.sin(theta)],
                     [-s * np.sin(theta), c + s * np.cos(theta)]])


def apply_symplectic(state, s):
    return GaussianState(s @ state.mean, s @ state.cov @ s.T)


def apply_optic(state, element, *args, mode=0):
    """Apply "beam_splitter"(T), "phase_shift"(phi), "squeeze"(r, theta)
    or "displace"(alpha).  Single-mode elements act on ``mode``; a phase
    shift maps a -> e^{-i phi} a.
    """
    m = state.modes
    if element == "beam_splitter":
        if m < 2:
            raise DomainError("beam splitter needs two modes")
        u = np.eye(m, dtype=complex)
        u[:2, :2] = beam_splitter_matrix(args[0])
        return apply_symplectic(state, passive_symplectic(u))
    _check_mode(mode, m)
    if element == "phase_shift":
        phi = args[0]
        return apply_symplectic(state, _embed(passive_symplectic([[np.exp(-1j * phi)]]), mode, m))
    if element == "squeeze":
        r = args[0]
        theta = args[1] if len(args) > 1 else 0.0
        if r < 0:
            raise DomainError("squeezing factor must be nonnegative")
        return apply_symplectic(state, _embed(squeeze_symplectic(r, theta), mode, m))
    if element == "displace":
        alpha = complex(args[0])
        mean = np.array(state.mean)
        mean[2 * mode] += 2 * alpha.real
        mean[2 * mode + 1] += 2 * alpha.imag
        return GaussianState(mean, state.cov)
    raise DomainError(f"unknown optical element {element!r}")


def mean_photon_number(state, mode=None):
    """Sum over modes of |mean|^2/4 + (tr sigma_mode - 2)/4."""
    modes = range(state.modes) if mode is None else [mode]
    total = 0.0
    for j in modes:
        mu = state.mean[2 * j:2 * j + 2]
        blk = state.cov[2 * j:2 * j + 2, 2 * j:2 * j + 2]
        total += mu @ mu / 4 + (np.trace(blk) - 2) / 4
    return float(total)


def is_pure(state, tol=PURITY_TOL):
    """All symplectic eigenvalues equal to one."""
    nu = np.abs(np.linalg.eigvals(1j * omega(state.modes) @ state.cov))
    return bool(np.max(np.abs(nu - 1)) < tol)


def gaussian_pure_qfi(state, dmean, dcov):
    """dmu^T sigma^-1 dmu + 1/4 tr((dsigma sigma^-1)^2) for a pure state."""
    if not is_pure(state):
        raise DomainError("state is not pure")
    try:
        inv = np.linalg.inv(state.cov)
    except np.linalg.LinAlgError as exc:
        raise DomainError("singular covariance") from exc
    dmean = np.asarray(dmean, dtype=float)
    dcov = np.asarray(dcov, dtype=float)
    m = dcov @ inv
    return float(dmean @ inv @ dmean + np.trace(m @ m) / 4)


def jz_generator(modes=2):
    """Quadrature generator of exp(-i phi Jz) on modes 0 and 1.

    The state moves as mean' = G mean and sigma' = G sigma + sigma G^T.
    """
    g = np.zeros((2 * modes, 2 * modes))
    rot = np.array([[0.0, 1.0], [-1.0, 0.0]])
    g[0:2, 0:2] = rot / 2
    g[2:4, 2:4] = -rot / 2
    return g


def interferometer_qfi(state_in, t=0.5):
    """QFI of the Jz phase after a beam splitter of transmission t."""
    s = apply_optic(state_in, "beam_splitter", t)
    g = jz_generator(s.modes)
    return gaussian_pure_qfi(s, g @ s.mean, g @ s.cov + s.cov @ g.T)


def coherent_squeezed_input(alpha, r, theta=0.0):
    """|alpha> in mode a, squeezed vacuum in mode b."""
    st = GaussianState.vacuum(2)
    st = apply_optic(st, "squeeze", r, theta, mode=1)
    return apply_optic(st, "displace", alpha, mode=0)


def twin_squeezed_input(r):
    """|r> |r> with opposite squeezing angles, which is optimal for this generator."""
    st = GaussianState.vacuum(2)
    st = apply_optic(st, "squeeze", r, 0.0, mode=0)
    return apply_optic(st, "squeeze", r, np.pi, mode=1)


def coherent_squeezed_qfi(alpha, r):
    return interferometer_qfi(coherent_squeezed_input(alpha, r))


def coherent_squeezed_qfi_formula(alpha, r):
    return float(abs(alpha) ** 2 * np.exp(2 * r) + np.sinh(r) ** 2)


def twin_squeezed_precision(mean_n):
    """1/sqrt(N(N+2)) for total mean photon number N."""
    return float(1 / np.sqrt(mean_n * (mean_n + 2)))


def _finish(amps, kind):
    lost = max(0.0, 1.0 - float(np.sum(np.abs(amps) ** 2)))
    if lost > FOCK_TOL:
        raise TruncationError(f"{kind} cutoff discards norm {lost:.3g}", lost)
    return amps


def coherent_amplitudes(alpha, cutoff):
    """e^{-|alpha|^2/2} alpha^n / sqrt(n!) for n < cutoff."""
    n = np.arange(cutoff)
    alpha = complex(alpha)
    if alpha == 0:
        amps = (n == 0).astype(complex)
    else:
        logmag = -abs(alpha) ** 2 / 2 + n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1)
        amps = np.exp(logmag) * np.exp(1j * n * np.angle(alpha))
    return _finish(amps, "coherent")


def squeezed_amplitudes(r, theta, cutoff):
    """Even-only amplitudes (-e^{i theta} tanh r)^m sqrt((2m)!)/(2^m m!) / sqrt(cosh r).

    The factor sqrt((2m)!)/(2^m m!) is |H_2m(0)| / sqrt((2m)! 2^(2m)).
    """
    amps = np.zeros(cutoff, dtype=complex)
    m = np.arange((cutoff + 1) // 2)
    if r == 0:
        amps[0] = 1.0
        return amps
    logmag = (m * np.log(np.tanh(r)) + 0.5 * gammaln(2 * m + 1)
              - m * np.log(2) - gammaln(m + 1) - 0.5 * np.log(np.cosh(r)))
    amps[2 * m] = np.exp(logmag) * (-np.exp(1j * theta)) ** m
    return _finish(amps, "squeezed vacuum")


def twin_beam_grid(xi, cutoff):
    """tanh^n(xi)/cosh(xi) on |n, n>."""
    n = np.arange(cutoff)
    diag = np.tanh(xi) ** n / np.cosh(xi)
    _finish(diag, "twin beam")
    return TwoModeGrid(np.diag(diag).astype(complex),
                       max(0.0, 1.0 - float(np.sum(diag ** 2))))


def fock_expansion(kind, cutoff, **params):
    """Amplitudes of "coherent"(alpha), "squeezed_vacuum"(r, theta) or "twin_beam"(xi)."""
    if cutoff < 1:
        raise DomainError("cutoff must be positive")
    if kind == "coherent":
        return coherent_amplitudes(params["alpha"], cutoff)
    if kind == "squeezed_vacuum":
        return squeezed_amplitudes(params["r"], params.get("theta", 0.0), cutoff)
    if kind == "twin_beam":
        return twin_beam_grid(params["xi"], cutoff)
    raise DomainError(f"unknown state kind {kind!r}")


def phase_averaged_qfi(grid, allow_truncation=False):
    """Exact QFI of the Jy phase after removing the photon number phase.

    Sectors are mixed incoherently and the generator conserves N, so the
    total is the weighted sum of 4 Var(Jy) over sectors.
    """
    avg = phase_average(grid, allow_truncation=allow_truncation, min_weight=1e-18)
    total = 0.0
    for sec in avg.sectors:
        if sec.n_total == 0:
            continue
        c = sec.payload.coeffs
        jy = build_j_operators(sec.n_total).jy
        total += sec.weight * qfi_pure(c, -1j * (jy @ c) + 1j * np.vdot(c, jy @ c).real * c)
    return float(total)
