"""Asymptotic precision bounds and the channel-geometry bound engines.

Classical simulation finds how far the Choi matrix of the channel can be
pushed along its phase derivative before losing positivity.  Quantum
simulation minimizes over Kraus representations of the same channel,
whose derivatives are shifted by i h K for a Hermitian h.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, optimize

from .channels import KrausChannel, LossParams, choi_derivative, choi_vectors, phase_encoded
from .errors import DomainError, NumericError

EPS_BRACKET = 1e3
EPS_TOL = 1e-10
CONSTRAINT_TOL = 1e-6


@dataclass(frozen=True)
class BoundResult:
    method: str
    n_total: int
    params: dict
    delta_phi: float
    qfi_equivalent: float

    def __post_init__(self):
        q, d = self.qfi_equivalent, self.delta_phi
        if q == np.inf and d != 0:
            raise DomainError("infinite QFI needs a zero precision bound")
        if 0 < q < np.inf and abs(d - 1 / np.sqrt(q)) > 1e-12 * max(1.0, d):
            raise DomainError("precision and QFI disagree")


def _from_delta(method, n_total, params, delta):
    q = np.inf if delta == 0 else 1 / delta ** 2
    return BoundResult(method, n_total, params, float(delta), float(q))


def _check_eta(eta):
    if not 0.0 <= eta <= 1.0:
        raise DomainError("eta must lie in [0, 1]")


def asymptotic_loss_bound(n_total, eta_a, eta_b=None):
    """1/2 (sqrt((1-ea)/ea) + sqrt((1-eb)/eb)) / sqrt(N); inf when eta = 0."""
    eta_b = eta_a if eta_b is None else eta_b
    if n_total < 1:
        raise DomainError("N must be at least 1")
    for e in (eta_a, eta_b):
        _check_eta(e)
    if eta_a == 0 or eta_b == 0:
        return np.inf
    r = np.sqrt((1 - eta_a) / eta_a) + np.sqrt((1 - eta_b) / eta_b)
    return float(r / 2 / np.sqrt(n_total))


def asymptotic_dephasing_bound(n_total, eta):
    if n_total < 1:
        raise DomainError("N must be at least 1")
    _check_eta(eta)
    if eta == 0:
        return np.inf
    return float(np.sqrt((1 - eta ** 2) / eta ** 2 / n_total))


def phase_diffusion_bounds(n_total, gamma):
    """Exact limit sqrt(Gamma + pi^2/N^2) and purification bound sqrt(Gamma + 1/N^2)."""
    if n_total < 1 or gamma < 0:
        raise DomainError("need N >= 1 and Gamma >= 0")
    return {"exact": float(np.sqrt(gamma + np.pi ** 2 / n_total ** 2)),
            "purification": float(np.sqrt(gamma + 1 / n_total ** 2))}


def bound_result(method, n_total, **params):
    """Evaluate one named bound as a BoundResult."""
    if method == "asymptotic_loss":
        d = asymptotic_loss_bound(n_total, params["eta_a"], params.get("eta_b"))
    elif method == "asymptotic_dephasing":
        d = asymptotic_dephasing_bound(n_total, params["eta"])
    elif method == "phase_diffusion_exact":
        d = phase_diffusion_bounds(n_total, params["gamma"])["exact"]
    elif method == "phase_diffusion_purification":
        d = phase_diffusion_bounds(n_total, params["gamma"])["purification"]
    else:
        raise DomainError(f"unknown bound {method!r}")
    return _from_delta(method, n_total, dict(params), d)


@dataclass(frozen=True)
class CsResult:
    eps_plus: float
    eps_minus: float

    @property
    def trivial(self):
        return self.eps_plus == 0 or self.eps_minus == 0

    @property
    def fisher_per_photon(self):
        """1/(eps+ eps-); infinite when the bound is trivial."""
        if self.trivial:
            return np.inf
        return 1 / (self.eps_plus * self.eps_minus)


def _min_eig(m):
    return float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])


def _leaves_cone(omega, domega, tol=1e-10):
    """True when omega + t domega fails to be PSD for every small t > 0.

    This happens when domega is negative on the kernel of omega, or when it
    vanishes there but couples the kernel to the support (pure channels).
    """
    scale = max(1.0, float(np.max(np.abs(omega))))
    w, v = np.linalg.eigh((omega + omega.conj().T) / 2)
    ker = v[:, w < tol * scale]
    if ker.shape[1] == 0:
        return False
    sup = v[:, w >= tol * scale]
    dkk = ker.conj().T @ domega @ ker
    if _min_eig(dkk) < -tol * scale:
        return True
    wk, vk = np.linalg.eigh((dkk + dkk.conj().T) / 2)
    flat = ker @ vk[:, np.abs(wk) < tol * scale]
    return bool(np.linalg.norm(flat.conj().T @ domega @ sup) > tol * scale)


def _largest_t(omega, domega, tol):
    """Largest t in [0, EPS_BRACKET] with omega + t domega PSD."""
    scale = max(1.0, float(np.max(np.abs(omega))))
    floor = -1e-12 * scale
    if _min_eig(omega) < floor:
        raise DomainError("channel is not completely positive")
    if _leaves_cone(omega, domega):
        return 0.0
    if _min_eig(omega + EPS_BRACKET * domega) >= floor:
        return np.inf
    lo, hi = 0.0, EPS_BRACKET
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if _min_eig(omega + mid * domega) >= floor:
            lo = mid
        else:
            hi = mid
    return lo if lo > tol else 0.0


def cs_epsilons(ops, dops, tol=EPS_TOL):
    """Tangent distances along +-dLambda from the Choi matrix of the channel."""
    dchoi = choi_derivative(ops, dops)
    if np.max(np.abs(dchoi)) < 1e-14:
        raise DomainError("channel derivative vanishes")
    omega = sum(np.outer(v, v.conj()) for v in choi_vectors(ops))
    return CsResult(_largest_t(omega, dchoi, tol), _largest_t(omega, -dchoi, tol))


def cs_epsilons_channel(channel, phi=0.0, tol=EPS_TOL):
    """CS distances for a channel preceded by the phase exp(-i phi sz/2)."""
    ops, dops = phase_encoded(channel, phi)
    return cs_epsilons(ops, dops, tol)


@dataclass(frozen=True)
class QsProblem:
    ops: tuple
    dops: tuple

    def __post_init__(self):
        KrausChannel(self.ops)
        if len(self.ops) != len(self.dops):
            raise DomainError("one derivative per Kraus operator")
        object.__setattr__(self, "ops", tuple(np.asarray(k, dtype=complex) for k in self.ops))
        object.__setattr__(self, "dops", tuple(np.asarray(k, dtype=complex) for k in self.dops))

    @property
    def size(self):
        return len(self.ops)


@dataclass(frozen=True)
class QsResult:
    f_qs: float
    h: np.ndarray
    residual: float
    feasible: bool
    extra: dict = field(default_factory=dict)


def _hermitian_basis(k):
    """Real basis of k x k Hermitian matrices."""
    out = []
    for i in range(k):
        m = np.zeros((k, k), dtype=complex)
        m[i, i] = 1
        out.append(m)
    for i in range(k):
        for j in range(i + 1, k):
            m = np.zeros((k, k), dtype=complex)
            m[i, j] = m[j, i] = 1
            out.append(m)
            m = np.zeros((k, k), dtype=complex)
            m[i, j], m[j, i] = -1j, 1j
            out.append(m)
    return out


def tilde_dops(problem, h):
    """dK~_i = dK_i + i sum_j h_ij K_j."""
    ops = np.array(problem.ops)
    return np.asarray(problem.dops) + 1j * np.einsum("ij,jab->iab", h, ops)


def qs_terms(problem, h):
    """alpha = sum dK~^dag dK~ and beta = sum dK~^dag K."""
    dk = tilde_dops(problem, h)
    ops = np.array(problem.ops)
    alpha = np.einsum("iba,ibc->ac", dk.conj(), dk)
    beta = np.einsum("iba,ibc->ac", dk.conj(), ops)
    return alpha, beta


def _lambda_max(m):
    return float(np.linalg.eigvalsh((m + m.conj().T) / 2)[-1])


def qs_optimize(problem, starts=20, tol=1e-10, seed=0):
    """4 min_h ||alpha|| subject to beta = 0, over Hermitian h.

    beta is affine in h, so the constraint is solved exactly and the search
    runs over its null space.  When the linear system has no solution a
    quadratic penalty with a ramped weight takes over.
    """
    basis = _hermitian_basis(problem.size)
    beta0 = qs_terms(problem, np.zeros((problem.size,) * 2))[1]
    cols = []
    for b in basis:
        d = qs_terms(problem, b)[1] - beta0
        cols.append(np.concatenate([d.real.ravel(), d.imag.ravel()]))
    mat = np.array(cols).T
    rhs = -np.concatenate([beta0.real.ravel(), beta0.imag.ravel()])
    x0, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
    consistent = np.linalg.norm(mat @ x0 - rhs) < 1e-10
    rng = np.random.default_rng(seed)

    def h_of(x):
        return sum(c * b for c, b in zip(x, basis))

    if consistent:
        null = linalg.null_space(mat, rcond=1e-10)

        def full(y):
            return x0 + null @ y

        def obj(y):
            return _lambda_max(qs_terms(problem, h_of(full(y)))[0])

        dim = null.shape[1]
        best = None
        for s in range(starts):
            y0 = np.zeros(dim) if s == 0 else rng.normal(scale=1.0, size=dim)
            if dim == 0:
                res_x, res_f = y0, obj(y0)
            else:
                res = optimize.minimize(obj, y0, method="Nelder-Mead",
                                        options={"xatol": tol, "fatol": tol,
                                                 "maxiter": 20000 * dim, "maxfev": 40000 * dim})
                res_x, res_f = res.x, res.fun
            if best is None or res_f < best[1]:
                best = (res_x, res_f)
        x = full(best[0])
    else:
        x = _penalty_search(problem, basis, h_of, rng, starts, tol)
    h = h_of(x)
    alpha, beta = qs_terms(problem, h)
    resid = float(np.max(np.abs(beta)))
    return QsResult(4 * _lambda_max(alpha), h, resid, resid <= CONSTRAINT_TOL,
                    {"eliminated": bool(consistent)})


def _penalty_search(problem, basis, h_of, rng, starts, tol):
    best = None
    for s in range(starts):
        x = np.zeros(len(basis)) if s == 0 else rng.normal(size=len(basis))
        for weight in 10.0 ** np.arange(3, 10):
            def obj(v, w=weight):
                alpha, beta = qs_terms(problem, h_of(v))
                return _lambda_max(alpha) + w * float(np.sum(np.abs(beta) ** 2))
            res = optimize.minimize(obj, x, method="Nelder-Mead",
                                    options={"xatol": tol, "fatol": tol, "maxiter": 20000})
            x = res.x
        if best is None or res.fun < best[1]:
            best = (x, res.fun)
    if best is None:
        raise NumericError("penalty search failed")
    return best[0]


def loss_qs_problem(params, phi=0.0):
    """Single photon loss channel after the phase exp(-i phi sz/2)."""
    from .channels import loss_kraus_particle
    ops, dops = phase_encoded(loss_kraus_particle(params), phi)
    return QsProblem(tuple(ops), tuple(dops))


def loss_f_qs(eta_a, eta_b):
    """4 / (sqrt((1-ea)/ea) + sqrt((1-eb)/eb))^2."""
    r = np.sqrt((1 - eta_a) / eta_a) + np.sqrt((1 - eta_b) / eta_b)
    return float(np.inf if r == 0 else 4 / r ** 2)


def analytic_loss_h(eta_a, eta_b):
    """Closed-form optimal h for the loss channel in the loss_qs_problem ordering.

    h = 1/8 diag(-chi, ea/(1-ea) (4/ea + chi), -eb/(1-eb) (4/eb - chi))
    with chi = F (eb - ea)/(ea eb).
    """
    f = loss_f_qs(eta_a, eta_b)
    chi = f * (eta_b - eta_a) / (eta_a * eta_b)
    return np.diag([-chi,
                    eta_a / (1 - eta_a) * (4 / eta_a + chi),
                    -eta_b / (1 - eta_b) * (4 / eta_b - chi)]).astype(complex) / 8


def printed_loss_h(eta_a, eta_b):
    """The closed form with chi's sign kept and 4/ea in the last entry.

    It satisfies the constraints only when ea = eb; kept for the regression
    test that documents the discrepancy.
    """
    f = loss_f_qs(eta_a, eta_b)
    chi = f * (eta_b - eta_a) / (eta_a * eta_b)
    return -np.diag([chi,
                     eta_a / (1 - eta_a) * (4 / eta_a - chi),
                     -eta_b / (1 - eta_b) * (4 / eta_a + chi)]).astype(complex) / 8


def qs_constraint_residuals(problem, h):
    """(max |beta|, ||alpha - F/4 I||) for a candidate h."""
    alpha, beta = qs_terms(problem, h)
    lam = _lambda_max(alpha)
    return float(np.max(np.abs(beta))), float(np.max(np.abs(alpha - lam * np.eye(len(alpha)))))


def entanglement_witness(f_q, n_total):
    """True when F_Q exceeds the separable limit N."""
    if f_q < 0 or n_total < 1:
        raise DomainError("need F_Q >= 0 and N >= 1")
    return bool(f_q > n_total + 1e-9)


def loss_channel(eta_a, eta_b=None):
    from .channels import loss_kraus_particle
    return loss_kraus_particle(LossParams(eta_a, eta_a if eta_b is None else eta_b))
