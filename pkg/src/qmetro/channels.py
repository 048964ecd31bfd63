"""Decoherence maps: photon loss, local dephasing, phase diffusion.

Loss is available both on the N photon sector (mode picture) and as a
single-photon Kraus channel (particle picture).  Lossy outputs are stored
as blocks labelled by the surviving photon number N'.
"""

from dataclasses import dataclass

import numpy as np
from scipy import optimize
from scipy.special import gammaln, xlogy

from . import qfi as _qfi
from .errors import DomainError
from .fock_core import FockStateN, make_named_state

COMPLETENESS_TOL = 1e-12
DROP_WEIGHT = 1e-14

SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


@dataclass(frozen=True)
class KrausChannel:
    ops: tuple

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.ops)
        if not ops:
            raise DomainError("a channel needs at least one Kraus operator")
        shapes = {k.shape for k in ops}
        if len(shapes) != 1:
            raise DomainError("Kraus operators must share their shape")
        s = sum(k.conj().T @ k for k in ops)
        if np.max(np.abs(s - np.eye(s.shape[0]))) > COMPLETENESS_TOL:
            raise DomainError("Kraus operators are not trace preserving")
        object.__setattr__(self, "ops", ops)

    @property
    def in_dim(self):
        return self.ops[0].shape[1]

    @property
    def out_dim(self):
        return self.ops[0].shape[0]

    def apply(self, rho):
        return sum(k @ rho @ k.conj().T for k in self.ops)


@dataclass(frozen=True)
class LossParams:
    eta_a: float
    eta_b: float

    def __post_init__(self):
        for e in (self.eta_a, self.eta_b):
            if not 0.0 <= e <= 1.0:
                raise DomainError("transmissions must lie in [0, 1]")

    @classmethod
    def equal(cls, eta):
        return cls(eta, eta)


@dataclass(frozen=True)
class PhaseDiffusionParams:
    gamma: float
    phi: float = 0.0

    def __post_init__(self):
        if self.gamma < 0:
            raise DomainError("phase variance must be nonnegative")


@dataclass(frozen=True)
class Block:
    n_prime: int
    weight: float
    rho: np.ndarray


@dataclass(frozen=True)
class BlockDiagonalState:
    blocks: tuple
    dropped: float = 0.0

    @property
    def weights(self):
        return np.array([b.weight for b in self.blocks])


def log_binom_pmf(k, n, p):
    """log of C(n,k) p^(n-k) (1-p)^k, i.e. k losses out of n at transmission p."""
    k = np.asarray(k, dtype=float)
    n = np.asarray(n, dtype=float)
    out = (gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
           + xlogy(n - k, p) + xlogy(k, 1 - p))
    return np.where((k < 0) | (k > n), -np.inf, out)


def loss_amplitudes(state, params, la, lb, phi=0.0):
    """Unnormalized conditional amplitudes after losing la and lb photons.

    Entry k is the amplitude of |k, N'-k> with N' = N - la - lb.
    """
    big = state.n_total
    n = np.arange(la, big - lb + 1)
    logb = (log_binom_pmf(la, n, params.eta_a)
            + log_binom_pmf(lb, big - n, params.eta_b))
    return state.coeffs[n] * np.exp(-1j * n * phi) * np.exp(0.5 * logb)


def loss_output_state(state, phi, params):
    """Blocks of the lossy output, one per surviving photon number."""
    big = state.n_total
    blocks = []
    dropped = 0.0
    for n_prime in range(big, -1, -1):
        rho = np.zeros((n_prime + 1, n_prime + 1), dtype=complex)
        for la in range(big - n_prime + 1):
            v = loss_amplitudes(state, params, la, big - n_prime - la, phi)
            rho += np.outer(v, v.conj())
        w = float(np.trace(rho).real)
        if w < DROP_WEIGHT:
            dropped += w
            continue
        blocks.append(Block(n_prime, w, rho / w))
    return BlockDiagonalState(tuple(blocks), dropped)


def block_generator(n_prime):
    """Phase generator inside a block; photons in mode a pick up the phase."""
    return np.diag(np.arange(n_prime + 1, dtype=float))


def block_qfi(bstate):
    """QFI of a block state whose weights do not depend on the phase."""
    return float(sum(b.weight * _qfi.qfi_unitary(b.rho, block_generator(b.n_prime))
                     for b in bstate.blocks))


def lossy_qfi(state, params):
    return block_qfi(loss_output_state(state, 0.0, params))


def loss_kraus_particle(params):
    """Single photon loss; outputs |a>, |b> and the vacuum flag."""
    ea, eb = params.eta_a, params.eta_b
    k1 = np.array([[np.sqrt(ea), 0], [0, np.sqrt(eb)], [0, 0]])
    k2 = np.array([[0, 0], [0, 0], [np.sqrt(1 - ea), 0]])
    k3 = np.array([[0, 0], [0, 0], [0, np.sqrt(1 - eb)]])
    return KrausChannel((k1, k2, k3))


def dephasing_kraus(eta):
    if not 0.0 <= eta <= 1.0:
        raise DomainError("visibility must lie in [0, 1]")
    return KrausChannel((np.sqrt((1 + eta) / 2) * np.eye(2),
                         np.sqrt((1 - eta) / 2) * SIGMA_Z))


def unitary_channel(u):
    return KrausChannel((np.asarray(u, dtype=complex),))


def phase_diffusion_apply(state, params):
    """Closed-form density matrix after a Gaussian random phase."""
    c = state.coeffs
    n = np.arange(state.n_total + 1)
    diff = n[:, None] - n[None, :]
    damp = np.exp(-params.gamma * diff ** 2 / 2) * np.exp(-1j * diff * params.phi)
    return np.outer(c, c.conj()) * damp


def phase_diffusion_qfi(state, gamma):
    rho = phase_diffusion_apply(state, PhaseDiffusionParams(gamma))
    return _qfi.qfi_unitary(rho, np.diag(np.arange(state.n_total + 1.0)))


def choi_vectors(ops):
    # (K x 1)|I> has entries K[out, in] in out-major order
    return [np.asarray(k, dtype=complex).reshape(-1) for k in ops]


def choi_matrix(channel):
    """Omega = sum_i (K_i x 1)|I><I|(K_i x 1)^dag with unnormalized |I>."""
    ops = channel.ops if isinstance(channel, KrausChannel) else channel
    vs = choi_vectors(ops)
    return sum(np.outer(v, v.conj()) for v in vs)


def choi_derivative(ops, dops):
    vs = choi_vectors(ops)
    dvs = choi_vectors(dops)
    return sum(np.outer(dv, v.conj()) + np.outer(v, dv.conj()) for v, dv in zip(vs, dvs))


def phase_encoded(channel, phi=0.0):
    """Kraus operators K_i U_phi and their phi derivatives, U = exp(-i phi sz/2)."""
    u = np.diag(np.exp(-0.5j * phi * np.array([1.0, -1.0])))
    du = -0.5j * SIGMA_Z @ u
    ops = [k @ u for k in channel.ops]
    dops = [k @ du for k in channel.ops]
    return ops, dops


def optimal_lossy_state(n_total, params, seeds=None, gtol=1e-9, max_iter=3000):
    """Maximize the lossy QFI over real N photon inputs.

    For a fixed Hermitian L the quantity 2 Tr(drho L) - Tr(rho L^2) is a
    quadratic form c^T M c in the input amplitudes.  It never exceeds the
    QFI and touches it when L is the SLD, so M(SLD) gives the exact
    gradient of the QFI, which drives a quasi-Newton search from each seed.
    """
    if seeds is None:
        seeds = [make_named_state(k, n_total) for k in ("sine", "balanced", "noon")]
    branches = _loss_branches(n_total, params)

    def neg(x):
        nrm2 = float(x @ x)
        value, m = _qfi_and_form(x / np.sqrt(nrm2), branches)
        grad = 2 * (m @ x - value * x) / nrm2
        return -value, -grad

    best = None
    for seed in seeds:
        x0 = np.abs(seed.coeffs)
        res = optimize.minimize(neg, x0, jac=True, method="L-BFGS-B",
                                options={"gtol": gtol, "maxiter": max_iter})
        x = np.abs(res.x)
        state = FockStateN.from_amplitudes(x)
        value = lossy_qfi(state, params)
        if best is None or value > best[1]:
            best = (state, value)
    return best


def _loss_branches(n_total, params):
    """For each N', the offsets la and the sqrt(b_n) rows of its branches."""
    out = []
    for n_prime in range(n_total, -1, -1):
        size = n_prime + 1
        la = np.arange(n_total - n_prime + 1)
        idx = la[:, None] + np.arange(size)[None, :]
        lb = n_total - n_prime - la
        logb = (log_binom_pmf(la[:, None], idx, params.eta_a)
                + log_binom_pmf(lb[:, None], n_total - idx, params.eta_b))
        out.append((n_prime, idx, np.exp(0.5 * logb)))
    return out


def _qfi_and_form(c, branches):
    """Lossy QFI of real amplitudes c and the real symmetric form M(SLD)."""
    dim = c.size
    m = np.zeros((dim, dim))
    total = 0.0
    for n_prime, idx, sb in branches:
        v = sb * c[idx]
        rho = v.T @ v
        w = np.trace(rho)
        if w < DROP_WEIGHT:
            continue
        k = np.arange(n_prime + 1, dtype=float)
        kk = k[:, None] - k[None, :]
        res = _qfi.qfi_mixed(rho / w, -1j * kk * rho / w)
        total += w * res.value
        lsld = res.sld
        g = (2j * kk * lsld - lsld @ lsld).real
        for row, off in zip(sb, idx[:, 0]):
            m[off:off + n_prime + 1, off:off + n_prime + 1] += np.outer(row, row) * g
    return total, m
