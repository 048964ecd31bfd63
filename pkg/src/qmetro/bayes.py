"""Covariant-measurement Bayesian costs with a flat phase prior.

With the circular cost 4 sin^2((est - phi)/2) the minimal average cost of an
N photon input c is 2 - c^T A c, where A is real symmetric and vanishes
everywhere except on its first off-diagonals.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln, xlogy

from .channels import (LossParams, PhaseDiffusionParams, loss_output_state,
                       phase_diffusion_apply)
from .errors import DomainError
from .fock_core import FockStateN

IDEAL = "ideal"


@dataclass(frozen=True)
class CovariantCostMatrix:
    """Entries A[n, n-1] = A[n-1, n] for n = 1..N."""

    offdiag: np.ndarray
    tag: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        e = np.asarray(self.offdiag, dtype=float)
        if np.any(e < -1e-15) or np.any(e > 1 + 1e-12):
            raise DomainError("cost matrix entries must lie in [0, 1]")
        e.flags.writeable = False
        object.__setattr__(self, "offdiag", e)

    @property
    def n_total(self):
        return self.offdiag.size

    def dense(self):
        return np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


def _loss_overlap_sums(n_max, eta, shift):
    """S(m) = sum_l sqrt(P(l | m) P(l | m + shift)) with P binomial losses.

    ``shift`` is +1 or -1; P(l | m) = C(m, l) eta^(m-l) (1-eta)^l.
    """
    lg = gammaln(np.arange(n_max + 3) + 1.0)
    out = np.zeros(n_max + 1)
    for m in range(n_max + 1):
        m2 = m + shift
        if m2 < 0 or m2 > n_max + 1:
            continue
        top = min(m, m2)
        l = np.arange(top + 1)
        log1 = lg[m] - lg[l] - lg[m - l] + xlogy(m - l, eta) + xlogy(l, 1 - eta)
        log2 = lg[m2] - lg[l] - lg[m2 - l] + xlogy(m2 - l, eta) + xlogy(l, 1 - eta)
        out[m] = np.sum(np.exp(0.5 * (log1 + log2)))
    return out


def build_cost_matrix(model, n_total):
    """A for ``model``: "ideal", LossParams or PhaseDiffusionParams."""
    if n_total < 1:
        raise DomainError("need at least one photon")
    if isinstance(model, str) and model == IDEAL:
        return CovariantCostMatrix(np.ones(n_total), IDEAL)
    if isinstance(model, PhaseDiffusionParams):
        return CovariantCostMatrix(np.full(n_total, np.exp(-model.gamma / 2)),
                                   "phase_diffusion", {"gamma": model.gamma})
    if isinstance(model, LossParams):
        # the double sum over (la, lb) factorizes into a mode a part and a mode b part
        sa = _loss_overlap_sums(n_total, model.eta_a, -1)
        sb = _loss_overlap_sums(n_total, model.eta_b, +1)
        n = np.arange(1, n_total + 1)
        entries = np.clip(sa[n] * sb[n_total - n], 0.0, 1.0)
        return CovariantCostMatrix(entries, "loss",
                                   {"eta_a": model.eta_a, "eta_b": model.eta_b})
    raise DomainError(f"unsupported model {model!r}")


def optimal_state_and_cost(a):
    """Top eigenvector of A and the minimal cost 2 - lambda_max."""
    n = a.n_total
    w, v = eigh_tridiagonal(np.zeros(n + 1), a.offdiag, select="i",
                            select_range=(n, n))
    vec = v[:, 0]
    vec = vec * np.sign(vec[np.argmax(np.abs(vec))])
    vec = np.where(np.abs(vec) < 1e-300, 0.0, vec)
    return FockStateN.from_amplitudes(vec), float(2 - w[0])


def cost_for_state(a, state):
    """2 - |c|^T A |c|; measurement phases are matched to the input."""
    if state.n_total != a.n_total:
        raise DomainError("state and cost matrix sizes differ")
    c = np.abs(state.coeffs)
    return float(2 - 2 * np.sum(a.offdiag * c[1:] * c[:-1]))


def lossy_lower_bound(a):
    """2 [1 - A_max cos(pi/(N+2))]."""
    if a.tag != "loss":
        raise DomainError("lower bound applies to loss matrices")
    n = a.n_total
    return float(2 * (1 - a.offdiag.max() * np.cos(np.pi / (n + 2))))


def ideal_min_cost(n_total):
    return 2 * (1 - np.cos(np.pi / (n_total + 2)))


def direct_cost_integral(state, model, points=None):
    """Average cost by explicit integration over the true phase.

    The cost-weighted output 4 int dphi/2pi sin^2(phi/2) rho_phi is built by
    a periodic trapezoid rule, then paired with the seed measurement whose
    blocks are |e><e| with e_k = exp(i arg c_k) (ideal and phase diffusion)
    or e_k = 1 (loss).
    """
    n_total = state.n_total
    if points is None:
        points = 4 * (n_total + 2)
    phis = 2 * np.pi * np.arange(points) / points
    weights = 4 * np.sin(phis / 2) ** 2 / points
    if isinstance(model, LossParams):
        acc = {}
        for phi, w in zip(phis, weights):
            for b in loss_output_state(state, phi, model).blocks:
                acc[b.n_prime] = acc.get(b.n_prime, 0) + w * b.weight * b.rho
        total = 0.0
        for n_prime, rho in acc.items():
            e = np.ones(n_prime + 1)
            total += np.vdot(e, rho @ e).real
        return float(total)
    c = state.coeffs
    e = np.exp(1j * np.angle(c))
    n = np.arange(n_total + 1)
    acc = np.zeros((n_total + 1, n_total + 1), dtype=complex)
    for phi, w in zip(phis, weights):
        if isinstance(model, PhaseDiffusionParams):
            rho = phase_diffusion_apply(state, PhaseDiffusionParams(model.gamma, phi))
        elif model == IDEAL:
            psi = c * np.exp(-1j * n * phi)
            rho = np.outer(psi, psi.conj())
        else:
            raise DomainError(f"unsupported model {model!r}")
        acc += w * rho
    return float(np.vdot(e, acc @ e).real)
