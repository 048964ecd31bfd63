"""Classical estimation over finite-outcome probability models.

Fisher information, Cramer-Rao bounds, maximum likelihood, locally unbiased
and Bayesian estimators.  The binomial examples come in two flavours: the
success probability p itself, and a phase with p = sin^2(phi/2).
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate, optimize
from scipy.special import gammaln, xlogy

from .errors import DomainError, InfeasibleDataError, SingularModelError

ZERO_TOL = 1e-15
ML_GRID = 2001


@dataclass(frozen=True)
class ProbModel:
    n_outcomes: int
    prob: Callable[[float], np.ndarray]
    dprob: Callable[[float], np.ndarray]
    domain: tuple = (0.0, 1.0)
    periodic: bool = False


@dataclass(frozen=True)
class PriorSpec:
    """Prior on [a, b); flat when ``density`` is None."""

    a: float
    b: float
    density: Optional[Callable[[float], float]] = None

    def pdf(self, x):
        if self.density is None:
            return 1.0 / (self.b - self.a)
        return self.density(x)


def circular_cost(estimate, phi):
    return 4.0 * np.sin((np.asarray(estimate) - phi) / 2.0) ** 2


def _log_binom(n, k):
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def binomial_p(n_trials):
    """n successes out of N with success probability p."""
    k = np.arange(n_trials + 1)
    logc = _log_binom(n_trials, k)

    def prob(p):
        return np.exp(logc + xlogy(k, p) + xlogy(n_trials - k, 1 - p))

    def dprob(p):
        # d/dp of C p^k (1-p)^(N-k), written without dividing by p or 1-p
        with np.errstate(over="ignore", invalid="ignore"):
            up = np.exp(logc + xlogy(k - 1, p) + xlogy(n_trials - k, 1 - p)) * k
            down = np.exp(logc + xlogy(k, p) + xlogy(n_trials - k - 1, 1 - p)) * (n_trials - k)
        up = np.where(k > 0, up, 0.0)
        down = np.where(k < n_trials, down, 0.0)
        return up - down

    return ProbModel(n_trials + 1, prob, dprob, (0.0, 1.0))


def binomial_phi(n_trials, domain=(-np.pi, np.pi)):
    """Binomial model with p = sin^2(phi/2)."""
    base = binomial_p(n_trials)

    def prob(phi):
        return base.prob(np.sin(phi / 2) ** 2)

    def dprob(phi):
        return base.dprob(np.sin(phi / 2) ** 2) * np.sin(phi) / 2

    return ProbModel(n_trials + 1, prob, dprob, tuple(domain), periodic=True)


def product_model(m1, m2):
    """Two independent experiments sharing the parameter."""

    def prob(x):
        return np.outer(m1.prob(x), m2.prob(x)).ravel()

    def dprob(x):
        return (np.outer(m1.dprob(x), m2.prob(x))
                + np.outer(m1.prob(x), m2.dprob(x))).ravel()

    return ProbModel(m1.n_outcomes * m2.n_outcomes, prob, dprob, m1.domain,
                     m1.periodic and m2.periodic)


def _score_terms(model, phi0):
    p = np.asarray(model.prob(phi0), dtype=float)
    dp = np.asarray(model.dprob(phi0), dtype=float)
    dead = (p < ZERO_TOL) & (np.abs(dp) < ZERO_TOL)
    if np.any((p <= 0) & ~dead):
        raise SingularModelError(f"zero probability with nonzero slope at {phi0}")
    return p, dp, dead


def fisher_information(model, phi0):
    p, dp, dead = _score_terms(model, phi0)
    keep = ~dead
    return float(np.sum(dp[keep] ** 2 / p[keep]))


def crb(model, phi0, repetitions=1):
    f = fisher_information(model, phi0)
    if f <= 0:
        return np.inf
    return 1.0 / (repetitions * f)


def _loglik(model, counts):
    counts = np.asarray(counts, dtype=float)

    def ll(x):
        return float(np.sum(xlogy(counts, np.asarray(model.prob(x), dtype=float))))

    def score(x):
        p = np.asarray(model.prob(x), dtype=float)
        dp = np.asarray(model.dprob(x), dtype=float)
        on = counts > 0
        return float(np.sum(counts[on] * dp[on] / p[on]))

    return ll, score


def ml_estimate(model, counts, grid_points=ML_GRID, xtol=1e-13):
    """All global maximizers of the log-likelihood on the model domain."""
    counts = np.asarray(counts, dtype=float)
    if counts.size != model.n_outcomes or np.any(counts < 0) or counts.sum() <= 0:
        raise DomainError("counts must be nonnegative with a positive total")
    ll, score = _loglik(model, counts)
    lo, hi = model.domain
    xs = np.linspace(lo, hi, grid_points)
    with np.errstate(divide="ignore"):
        vals = np.array([ll(x) for x in xs])
    if not np.any(np.isfinite(vals)):
        raise InfeasibleDataError("likelihood vanishes on the whole domain")
    best = np.nanmax(vals)
    tol = 1e-6 * (abs(best) + 1.0)
    found = []
    for i in np.flatnonzero(vals >= best - tol):
        left = xs[max(i - 1, 0)]
        right = xs[min(i + 1, grid_points - 1)]
        x = _refine(ll, score, left, xs[i], right, xtol)
        found.append(x)
    found = sorted(found)
    # keep the global ones, merging duplicates from neighbouring grid points
    top = max(ll(x) for x in found)
    out = []
    for x in found:
        if ll(x) < top - 1e-9 * (abs(top) + 1.0):
            continue
        if out and abs(x - out[-1]) < 1e-7:
            continue
        out.append(x)
    return out


def _refine(ll, score, left, mid, right, xtol):
    """Locate a maximum near ``mid`` by bracketing the score."""
    with np.errstate(divide="ignore", invalid="ignore"):
        for a, b in ((left, mid), (mid, right), (left, right)):
            try:
                sa, sb = score(a), score(b)
            except (ZeroDivisionError, FloatingPointError):
                continue
            if np.isfinite(sa) and np.isfinite(sb) and sa > 0 > sb:
                return optimize.brentq(score, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps)
        # boundary maximum or flat score: fall back on the likelihood itself
        res = optimize.minimize_scalar(lambda x: -ll(x), bounds=(left, right),
                                       method="bounded", options={"xatol": xtol})
        cands = [left, right, res.x]
        return max(cands, key=ll)


def locally_unbiased_estimator(model, phi0):
    """phi0 + score(x)/F for every outcome x."""
    p, dp, dead = _score_terms(model, phi0)
    f = fisher_information(model, phi0)
    if f <= 0:
        raise SingularModelError("Fisher information vanishes")
    est = np.full(p.shape, phi0, dtype=float)
    est[~dead] += dp[~dead] / p[~dead] / f
    return est


def _posterior_integrals(model, prior, counts, funcs):
    counts = np.asarray(counts, dtype=float)
    with np.errstate(divide="ignore"):
        ll, _ = _loglik(model, counts)
        xs = np.linspace(prior.a, prior.b, 401)
        vals = np.array([ll(x) for x in xs])
    if not np.any(np.isfinite(vals)):
        raise InfeasibleDataError("zero posterior mass")
    shift = np.nanmax(vals)
    peak = xs[int(np.nanargmax(vals))]

    def weight(x):
        with np.errstate(divide="ignore"):
            return np.exp(ll(x) - shift) * prior.pdf(x)

    out = []
    for g in funcs:
        val, _ = integrate.quad(lambda x: weight(x) * g(x), prior.a, prior.b,
                                points=[peak], epsabs=1e-14, epsrel=1e-13, limit=400)
        out.append(val)
    return out, shift


def bayes_mmse(model, prior, counts):
    """Posterior mean and posterior variance."""
    (z, m1, m2), _ = _posterior_integrals(
        model, prior, counts, [lambda x: 1.0, lambda x: x, lambda x: x * x])
    if z <= 0:
        raise InfeasibleDataError("zero posterior mass")
    mean = m1 / z
    return mean, m2 / z - mean ** 2


def bayes_average_mse(model, prior):
    """Prior-averaged MSE of the posterior-mean estimator."""
    total = 0.0
    for x in range(model.n_outcomes):
        def px(phi, x=x):
            return model.prob(phi)[x] * prior.pdf(phi)
        z = integrate.quad(px, prior.a, prior.b, epsabs=1e-14, epsrel=1e-13, limit=400)[0]
        if z <= 0:
            continue
        m1 = integrate.quad(lambda t: t * px(t), prior.a, prior.b, epsabs=1e-14, epsrel=1e-13, limit=400)[0]
        m2 = integrate.quad(lambda t: t * t * px(t), prior.a, prior.b, epsabs=1e-14, epsrel=1e-13, limit=400)[0]
        total += m2 - m1 * m1 / z
    return total


@dataclass(frozen=True)
class CircularResult:
    estimates: np.ndarray
    average_cost: float
    degenerate: np.ndarray
    resultants: np.ndarray


def bayes_circular(model, prior, resultant_tol=1e-12):
    """Minimal average circular-cost estimator for every outcome.

    The estimate is the posterior circular mean.  Outcomes whose posterior
    has zero resultant are flagged as degenerate and mapped to 0.
    """
    if not model.periodic:
        raise DomainError("circular cost needs a periodic model")
    k = model.n_outcomes
    z = np.empty(k)
    s = np.empty(k)
    c = np.empty(k)
    for x in range(k):
        def px(phi, x=x):
            return model.prob(phi)[x] * prior.pdf(phi)
        opts = dict(epsabs=1e-14, epsrel=1e-13, limit=400)
        z[x] = integrate.quad(px, prior.a, prior.b, **opts)[0]
        s[x] = integrate.quad(lambda t: np.sin(t) * px(t), prior.a, prior.b, **opts)[0]
        c[x] = integrate.quad(lambda t: np.cos(t) * px(t), prior.a, prior.b, **opts)[0]
    res = np.hypot(s, c)
    degenerate = res <= resultant_tol * np.maximum(z, 1e-300)
    est = np.where(degenerate, 0.0, np.arctan2(s, c))
    # <C> = sum_x int p(phi) p(x|phi) (2 - 2 cos(est - phi))
    cost = float(np.sum(2 * z - 2 * (c * np.cos(est) + s * np.sin(est))))
    return CircularResult(est, cost, degenerate, res)


def circular_f(n_trials, n):
    """(N-2n) (n-1/2)! (N-n-1/2)! / (n! (N-n)!) via log-gamma."""
    n = np.asarray(n, dtype=float)
    mag = np.exp(gammaln(n + 0.5) + gammaln(n_trials - n + 0.5)
                 - gammaln(n + 1) - gammaln(n_trials - n + 1))
    return (n_trials - 2 * n) * mag


def half_circle_estimator(n_trials):
    """Closed-form estimator on [0, pi): the angle of the point (f, 2)."""
    f = circular_f(n_trials, np.arange(n_trials + 1))
    return np.arctan2(2.0, f)


def half_circle_cost(n_trials):
    """Closed-form minimal average cost on [0, pi)."""
    f = circular_f(n_trials, np.arange(n_trials + 1))
    return 2 * (1 - np.sum(np.sqrt(4 + f ** 2)) / (np.pi * (n_trials + 1)))
