"""Two-mode states with a definite total photon number.

The basis of the N photon sector is |n, N-n>, where n counts photons in
mode a and runs upward from 0.  All matrices in the package use this
ordering.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, EmptySectorError, TruncationError

NORM_TOL = 1e-12
DISCARD_TOL = 1e-6


@dataclass(frozen=True)
class FockStateN:
    """Amplitudes c_n of sum_n c_n |n, N-n>."""

    n_total: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.n_total < 0:
            raise DomainError("photon number must be nonnegative")
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if c.size != self.n_total + 1:
            raise DomainError(
                f"expected {self.n_total + 1} amplitudes, got {c.size}")
        norm = np.vdot(c, c).real
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"state is not normalized (norm {norm!r})")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_amplitudes(cls, amplitudes):
        """Normalize an arbitrary nonzero amplitude vector."""
        c = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(c)
        if norm == 0:
            raise DomainError("zero amplitude vector")
        return cls(c.size - 1, c / norm)

    @property
    def dim(self):
        return self.n_total + 1

    def density(self):
        return np.outer(self.coeffs, self.coeffs.conj())


@dataclass(frozen=True)
class AngularMomentumRep:
    n_total: int
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray
    j2: np.ndarray

    @property
    def dim(self):
        return self.n_total + 1


@dataclass(frozen=True)
class Sector:
    n_total: int
    weight: float
    payload: object  # FockStateN or a density matrix of size N+1


@dataclass(frozen=True)
class IndefinitePhotonState:
    """Incoherent mixture of fixed photon number sectors."""

    sectors: tuple
    discarded: float = 0.0

    def __post_init__(self):
        w = np.array([s.weight for s in self.sectors], dtype=float)
        if np.any(w < 0):
            raise DomainError("negative sector weight")
        if abs(w.sum() - 1.0) > NORM_TOL:
            raise DomainError("sector weights do not sum to one")

    @property
    def weights(self):
        return np.array([s.weight for s in self.sectors])

    def mean_photon_number(self):
        return float(sum(s.n_total * s.weight for s in self.sectors))


@dataclass(frozen=True)
class TwoModeGrid:
    """Truncated amplitudes g[n_a, n_b] of a two-mode pure state.

    ``discarded`` is the norm that the truncation dropped.
    """

    amps: np.ndarray
    discarded: float = field(default=0.0)

    @classmethod
    def product(cls, mode_a, mode_b):
        a = np.asarray(mode_a, dtype=complex)
        b = np.asarray(mode_b, dtype=complex)
        grid = np.outer(a, b)
        lost = max(0.0, 1.0 - float(np.sum(np.abs(grid) ** 2)))
        return cls(grid, lost)

    def check(self, allow_truncation=False):
        if self.discarded > DISCARD_TOL and not allow_truncation:
            raise TruncationError(
                f"grid discards norm {self.discarded:.3g}", self.discarded)


def build_j_operators(n_total):
    """Jordan-Schwinger operators on the N photon sector."""
    if n_total < 0:
        raise DomainError("photon number must be nonnegative")
    n = np.arange(n_total + 1)
    # <n+1| a^dag b |n> = sqrt((n+1)(N-n))
    up = np.sqrt((n[:-1] + 1.0) * (n_total - n[:-1]))
    jp = np.diag(up, -1).astype(complex)
    jm = jp.conj().T
    jx = (jp + jm) / 2
    jy = (jp - jm) / 2j
    jz = np.diag(n - n_total / 2).astype(complex)
    j2 = jx @ jx + jy @ jy + jz @ jz
    return AngularMomentumRep(n_total, jx, jy, jz, j2)


def expi(h, t):
    """exp(-i t h) for Hermitian h, via its eigendecomposition."""
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * t * w)) @ v.conj().T


def mz_unitary(n_total, phi):
    """Mach-Zehnder transformation of the N photon sector.

    Equals exp(-i phi Jy): beam splitter, phase delay on the z axis, and the
    inverse beam splitter.
    """
    j = build_j_operators(n_total)
    return expi(j.jx, -np.pi / 2) @ expi(j.jz, phi) @ expi(j.jx, np.pi / 2)


def align_global_phase(reference, other):
    """Multiply ``other`` by the phase that best matches ``reference``."""
    overlap = np.vdot(other, reference)
    if abs(overlap) == 0:
        return np.asarray(other)
    return np.asarray(other) * (overlap / abs(overlap))


def make_named_state(kind, n_total):
    """noon, sine, balanced or twin_fock state of N photons."""
    n = np.arange(n_total + 1)
    if kind == "noon":
        c = np.zeros(n_total + 1, dtype=complex)
        c[0] += 1 / np.sqrt(2)
        c[-1] += 1 / np.sqrt(2)
        if n_total == 0:
            c[0] = 1.0
    elif kind == "sine":
        c = np.sqrt(2 / (n_total + 2)) * np.sin((n + 1) * np.pi / (n_total + 2))
    elif kind == "balanced":
        logc = (gammaln(n_total + 1) - gammaln(n + 1) - gammaln(n_total - n + 1)
                - n_total * np.log(2))
        c = np.exp(0.5 * logc)
    elif kind == "twin_fock":
        if n_total % 2:
            raise DomainError("twin Fock state needs an even photon number")
        c = np.zeros(n_total + 1)
        c[n_total // 2] = 1.0
    else:
        raise DomainError(f"unknown state kind {kind!r}")
    c = np.asarray(c, dtype=complex)
    return FockStateN(n_total, c / np.linalg.norm(c))


def sector_amplitudes(grid, n_total):
    """Raw amplitudes g[n, N-n] for n = 0..N; entries outside the grid are 0."""
    amps = grid.amps
    out = np.zeros(n_total + 1, dtype=complex)
    for n in range(n_total + 1):
        if n < amps.shape[0] and n_total - n < amps.shape[1]:
            out[n] = amps[n, n_total - n]
    return out


def project_sector(grid, n_total, allow_truncation=False):
    """Normalized N photon component of a grid and its probability."""
    grid.check(allow_truncation)
    raw = sector_amplitudes(grid, n_total)
    weight = float(np.vdot(raw, raw).real)
    if weight == 0.0:
        raise EmptySectorError(f"sector N={n_total} is empty")
    return FockStateN(n_total, raw / np.sqrt(weight)), weight


def phase_average(state, allow_truncation=False, min_weight=0.0):
    """Remove coherences between different total photon numbers.

    Accepts a TwoModeGrid, a FockStateN or an already averaged state.
    """
    if isinstance(state, IndefinitePhotonState):
        return state
    if isinstance(state, FockStateN):
        return IndefinitePhotonState((Sector(state.n_total, 1.0, state),))
    grid = state
    grid.check(allow_truncation)
    top = grid.amps.shape[0] + grid.amps.shape[1] - 2
    raw = []
    for n_total in range(top + 1):
        amps = sector_amplitudes(grid, n_total)
        w = float(np.vdot(amps, amps).real)
        if w > min_weight:
            raw.append((n_total, w, amps))
    total = sum(w for _, w, _ in raw)
    if total == 0:
        raise EmptySectorError("grid has no weight")
    sectors = tuple(
        Sector(n, w / total, FockStateN(n, a / np.sqrt(w))) for n, w, a in raw)
    # renormalize exactly so the weights sum to one within rounding
    weights = np.array([s.weight for s in sectors])
    weights = weights / weights.sum()
    sectors = tuple(Sector(s.n_total, float(w), s.payload)
                    for s, w in zip(sectors, weights))
    dropped = float(np.sum(np.abs(grid.amps) ** 2)) - total
    return IndefinitePhotonState(sectors, grid.discarded + max(dropped, 0.0))
