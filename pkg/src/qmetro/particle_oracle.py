"""Brute-force reference in the distinguishable-particle picture.

Each photon is a qudit with |a> = 0 and |b> = 1 (and a vacuum flag 2 after
loss).  States are dense density matrices on d^N dimensions, so this module
is only meant for small N.
"""

import itertools
from dataclasses import dataclass

import numpy as np
from scipy import optimize
from scipy.special import comb

from . import qfi as _qfi
from .channels import KrausChannel, SIGMA_Z, unitary_channel
from .errors import DomainError, ResourceLimitError
from .fock_core import FockStateN

CAPS = {2: 10, 3: 6}
STATE_TOL = 1e-10


def _cap(d):
    return CAPS.get(d, 4)


@dataclass(frozen=True)
class ParticleState:
    n_particles: int
    local_dim: int
    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        dim = self.local_dim ** self.n_particles
        if rho.shape != (dim, dim):
            raise DomainError("density matrix size does not match d^N")
        if np.max(np.abs(rho - rho.conj().T)) > STATE_TOL:
            raise DomainError("density matrix is not Hermitian")
        if abs(np.trace(rho).real - 1) > STATE_TOL:
            raise DomainError("density matrix does not have unit trace")
        if np.linalg.eigvalsh(rho)[0] < -STATE_TOL:
            raise DomainError("density matrix is not positive")
        object.__setattr__(self, "rho", rho)

    def tensor(self):
        """rho as a tensor with N output axes followed by N input axes."""
        return self.rho.reshape((self.local_dim,) * (2 * self.n_particles))


def _check_cap(n, d):
    if n > _cap(d):
        raise ResourceLimitError(f"N={n} exceeds the oracle cap {_cap(d)} for d={d}")


def symmetrize_vector(state, local_dim=2):
    """Pure vector sum_n c_n / sqrt(C(N,n)) sum over arrangements of n a's."""
    n_total = state.n_total
    _check_cap(n_total, local_dim)
    psi = np.zeros(local_dim ** n_total, dtype=complex)
    weights = local_dim ** np.arange(n_total - 1, -1, -1)
    for bits in itertools.product((0, 1), repeat=n_total):
        n_a = n_total - sum(bits)
        psi[int(np.dot(bits, weights))] = state.coeffs[n_a] / np.sqrt(comb(n_total, n_a))
    return psi


def symmetrize(state, local_dim=2):
    psi = symmetrize_vector(state, local_dim)
    return ParticleState(state.n_total, local_dim, np.outer(psi, psi.conj()))


def _apply_each(ops, rho_t, n):
    """Apply sum_i K_i . K_i^dag to every particle in turn."""
    ops = [np.asarray(k, dtype=complex) for k in ops]
    for k in range(n):
        out = 0
        for op in ops:
            t = np.tensordot(op, rho_t, axes=([1], [k]))
            t = np.moveaxis(t, 0, k)
            t = np.tensordot(op.conj(), t, axes=([1], [n + k]))
            t = np.moveaxis(t, 0, n + k)
            out = out + t
        rho_t = out
    return rho_t


def apply_iid_matrix(channel, rho, n, local_dim):
    """Channel^(x N) on any (not necessarily positive) matrix of size d^N."""
    if channel.in_dim != local_dim:
        raise DomainError("channel input dimension differs from the local dimension")
    _check_cap(n, max(local_dim, channel.out_dim))
    t = np.asarray(rho, dtype=complex).reshape((local_dim,) * (2 * n))
    out = _apply_each(channel.ops, t, n)
    dim = channel.out_dim ** n
    return out.reshape(dim, dim)


def apply_iid(channel, state):
    rho = apply_iid_matrix(channel, state.rho, state.n_particles, state.local_dim)
    return ParticleState(state.n_particles, channel.out_dim, rho)


def collective_generator(n, local_dim=2):
    """sum_k sigma_z^(k)/2 on the first two levels of every particle."""
    sz = np.zeros((local_dim, local_dim), dtype=complex)
    sz[:2, :2] = SIGMA_Z / 2
    eye = np.eye(local_dim)
    total = np.zeros((local_dim ** n,) * 2, dtype=complex)
    for k in range(n):
        term = np.array([[1.0]])
        for j in range(n):
            term = np.kron(term, sz if j == k else eye)
        total += term
    return total


def encoded_family(state, channel=None, phi=0.0):
    """rho_phi and its derivative for exp(-i phi sum sz/2) followed by channel^(x N)."""
    n, d = state.n_particles, state.local_dim
    g = collective_generator(n, d)
    w, v = np.linalg.eigh(g)
    u = (v * np.exp(-1j * phi * w)) @ v.conj().T
    rho = u @ state.rho @ u.conj().T
    drho = -1j * (g @ rho - rho @ g)
    if channel is not None:
        rho = apply_iid_matrix(channel, rho, n, d)
        drho = apply_iid_matrix(channel, drho, n, d)
    return rho, drho


def oracle_qfi(rho, drho):
    """Exact QFI on the full particle space."""
    return _qfi.qfi_mixed(rho, drho).value


def channel_qfi(fock_state, channel=None, phi=0.0):
    """QFI of a symmetrized Fock state sent through channel^(x N)."""
    rho, drho = encoded_family(symmetrize(fock_state), channel, phi)
    return oracle_qfi(rho, drho)


def particle_beam_splitter():
    """Balanced beam splitter on a single photon: |a> -> (|a>+|b>)/sqrt2, |b> -> (|a>-|b>)/sqrt2."""
    return np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)


def apply_local_unitary(u, state):
    return apply_iid(unitary_channel(u), state)


def _simplex(dim, step):
    """Points of {w >= 0, sum w = 1} on a grid of the given step."""
    m = int(round(1 / step))
    for cut in itertools.combinations(range(m + dim - 1), dim - 1):
        parts = np.diff((-1,) + cut + (m + dim - 1,)) - 1
        yield parts / m


def optimal_channel_state(n_total, channel, step=0.05, refine=True):
    """Search real nonnegative inputs for the largest channel QFI.

    The squared amplitudes are scanned on a simplex grid, then the best point
    is polished with Nelder-Mead on the amplitudes.
    """
    if not isinstance(channel, KrausChannel):
        raise DomainError("expected a KrausChannel")
    # every step from amplitudes to (rho, drho) is linear in c c^T, so
    # precompute the whole map once
    n, d = n_total, channel.in_dim
    sym = np.column_stack([symmetrize_vector(FockStateN(n, np.eye(n + 1)[k]), d)
                           for k in range(n + 1)])
    g = collective_generator(n, d)
    dim_in = d ** n
    cols = []
    for idx in range(dim_in * dim_in):
        e = np.zeros(dim_in * dim_in, dtype=complex)
        e[idx] = 1
        cols.append(apply_iid_matrix(channel, e.reshape(dim_in, dim_in), n, d).ravel())
    sup = np.array(cols).T
    dim_out = channel.out_dim ** n

    def value(c):
        c = np.abs(np.asarray(c, dtype=float))
        if not np.any(c):
            return 0.0
        psi = sym @ (c / np.linalg.norm(c))
        rho = np.outer(psi, psi.conj())
        drho = -1j * (g @ rho - rho @ g)
        out = (sup @ rho.ravel()).reshape(dim_out, dim_out)
        dout = (sup @ drho.ravel()).reshape(dim_out, dim_out)
        return oracle_qfi(out, dout)

    best = (None, -1.0)
    for w in _simplex(n_total + 1, step):
        c = np.sqrt(w)
        v = value(c)
        if v > best[1]:
            best = (c, v)
    c, v = best
    if refine:
        res = optimize.minimize(lambda x: -value(x), c, method="Nelder-Mead",
                                options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 4000})
        if -res.fun > v:
            c, v = np.abs(res.x), -res.fun
    return FockStateN.from_amplitudes(c), float(v)
