import numpy as np
import pytest
from hypothesis import given, strategies as st

from qmetro.channels import LossParams, loss_output_state
from qmetro.errorprop import (NONE, DecoherencePenalty, InputMoments, coherent_squeezed_asymptote,
                              coherent_squeezed_precision, fabry_perot_map, fabry_perot_phase,
                              input_moments, michelson_phase, optimal_coherent_squeezed,
                              output_moments, precision)
from qmetro.errors import DomainError
from qmetro.fock_core import FockStateN, build_j_operators, mz_unitary
from conftest import random_state


def _moments_of(state):
    c = state.coeffs
    j = build_j_operators(state.n_total)
    ex = lambda op: np.vdot(c, op @ c).real
    mx, mz = ex(j.jx), ex(j.jz)
    cov = ex((j.jx @ j.jz + j.jz @ j.jx) / 2) - mx * mz
    return InputMoments(mx, mz, ex(j.jx @ j.jx) - mx ** 2, ex(j.jz @ j.jz) - mz ** 2, cov,
                        float(state.n_total))


def _lossy_jz(state, phi, eta):
    out = FockStateN(state.n_total, mz_unitary(state.n_total, phi) @ state.coeffs)
    bd = loss_output_state(out, 0.0, LossParams.equal(eta))
    m1 = m2 = 0.0
    for b in bd.blocks:
        jz = np.arange(b.n_prime + 1) - b.n_prime / 2
        p = np.diag(b.rho).real
        m1 += b.weight * p @ jz
        m2 += b.weight * p @ jz ** 2
    return m1, m2 - m1 ** 2


def test_penalty_values():
    assert NONE.f == 0
    assert DecoherencePenalty("loss", 0.5).f == 1.0
    assert abs(DecoherencePenalty("dephasing", 0.5).f - 3.0) < 1e-15
    with pytest.raises(DomainError):
        DecoherencePenalty("loss", 0.0)
    with pytest.raises(DomainError):
        DecoherencePenalty("bogus", 0.5)


def test_ideal_limits_coincide():
    m = input_moments("coherent_squeezed", alpha=3.0, r=0.4)
    for phi in (0.3, 1.2, np.pi / 2):
        a = precision(m, phi, NONE)
        assert a == precision(m, phi, DecoherencePenalty("loss", 1.0))
        assert a == precision(m, phi, DecoherencePenalty("dephasing", 1.0))


def test_coherent_vacuum_shot_noise():
    m = input_moments("coherent_vacuum", alpha=4.0)
    for phi in (0.4, 1.0, np.pi / 2, 2.5):
        assert abs(precision(m, phi) - 1 / (4 * abs(np.sin(phi)))) < 1e-12


def test_fock_shot_noise():
    m = input_moments("fock", n=25)
    assert m.var_jz == 0
    for phi in (0.3, 1.1, 2.0):
        assert abs(precision(m, phi) - 0.2) < 1e-12


@pytest.mark.parametrize("n", [2, 10, 100])
def test_half_noon_like(n):
    j = n / 2
    m = input_moments("half_noon_like", n=n)
    assert abs(precision(m, 0.0) - 1 / np.sqrt(j * (j + 1))) < 1e-12


def test_half_noon_moments_from_fock_space():
    n = 8
    c = np.zeros(n + 1)
    c[n // 2] = c[n // 2 + 1] = 1 / np.sqrt(2)
    ref = _moments_of(FockStateN(n, c))
    m = input_moments("half_noon_like", n=n)
    for f in ("mean_jx", "mean_jz", "var_jx", "var_jz", "cov_xz"):
        assert abs(getattr(ref, f) - getattr(m, f)) < 1e-12


def test_coherent_squeezed_moments():
    a, r = 1.7, 0.6
    m = input_moments("coherent_squeezed", alpha=a, r=r)
    assert abs(m.var_jx - (a * a * np.cosh(2 * r) - a * a * np.sinh(2 * r) + np.sinh(r) ** 2) / 4) < 1e-14
    assert abs(m.mean_n - a * a - np.sinh(r) ** 2) < 1e-14


@given(st.floats(0.5, 20), st.floats(0, 2), st.floats(0.1, 3.0), st.floats(0.05, 1.0))
def test_closed_form_matches_moments(alpha, r, phi, eta):
    if abs(alpha ** 2 - np.sinh(r) ** 2) < 1e-3:
        return
    m = input_moments("coherent_squeezed", alpha=alpha, r=r)
    for pen in (NONE, DecoherencePenalty("loss", eta), DecoherencePenalty("dephasing", eta)):
        a = precision(m, phi, pen)
        b = coherent_squeezed_precision(alpha, r, phi, pen)
        assert a == pytest.approx(b, rel=1e-9)


@given(st.floats(0.01, 0.99), st.floats(0.1, 3))
def test_dephasing_never_better_than_loss(eta, r):
    a = 5.0
    lo = coherent_squeezed_precision(a, r, np.pi / 2, DecoherencePenalty("loss", eta))
    de = coherent_squeezed_precision(a, r, np.pi / 2, DecoherencePenalty("dephasing", eta))
    assert de >= lo


def test_diverging_flag():
    assert coherent_squeezed_precision(np.sinh(0.5), 0.5) == np.inf
    assert precision(input_moments("fock", n=4), 0.0) == np.inf


def test_coherent_only_is_shot_noise():
    assert abs(coherent_squeezed_precision(10.0, 0.0) - 0.1) < 1e-15


def test_optimal_split_beats_shot_noise():
    for n in (1e2, 1e4, 1e6):
        r, d = optimal_coherent_squeezed(n)
        assert d < 1 / np.sqrt(n)
        assert 0.5 < d * n ** 0.75 < 1.5


@pytest.mark.parametrize("model", ["loss", "dephasing"])
@pytest.mark.parametrize("eta", [0.5, 0.8])
def test_monotone_toward_asymptote(model, eta):
    pen = DecoherencePenalty(model, eta)
    n = 1e8
    rs = np.linspace(0.5, 4, 20)
    vals = [coherent_squeezed_precision(np.sqrt(n - np.sinh(r) ** 2), r, np.pi / 2, pen) for r in rs]
    assert all(np.diff(vals) < 0)
    limit = np.sqrt(pen.f) / np.sqrt(n)
    assert abs(vals[-1] / limit - 1) < 0.01
    assert abs(coherent_squeezed_asymptote(n, 4, pen) / limit - 1) < 0.01


@pytest.mark.parametrize("n", [2, 4, 6])
@pytest.mark.parametrize("eta", [0.6, 0.9])
def test_loss_moments_match_fock_simulation(rng, n, eta):
    state = random_state(rng, n, real=False)
    m = _moments_of(state)
    pen = DecoherencePenalty("loss", eta)
    for phi in (0.4, 1.3):
        mean, var, slope = output_moments(m, phi, pen)
        sm, sv = _lossy_jz(state, phi, eta)
        assert abs(mean - sm) < 1e-6 and abs(var - sv) < 1e-6
        h = 1e-5
        fd = (_lossy_jz(state, phi + h, eta)[0] - _lossy_jz(state, phi - h, eta)[0]) / (2 * h)
        assert abs(slope - fd) < 1e-6


def test_fabry_perot():
    assert abs(fabry_perot_phase(0.3, 0.0) - np.pi) < 1e-15
    t, th = 0.1, 0.05
    phi, conv = fabry_perot_map(t, th)
    h = 1e-7
    dphi = (fabry_perot_phase(t, th + h) - fabry_perot_phase(t, th - h)) / (2 * h)
    assert abs(conv - 1 / abs(dphi)) < 1e-6 * conv
    assert fabry_perot_map(0.5, np.pi / 2)[1] == np.inf
    with pytest.raises(DomainError):
        fabry_perot_phase(0.0, 0.1)


def test_michelson_doubles():
    assert michelson_phase(0.1, 0.4) == pytest.approx(0.6)


def test_moments_validation():
    with pytest.raises(DomainError):
        InputMoments(0, 0, -1, 0, 0, 1)
    with pytest.raises(DomainError):
        InputMoments(0, 0, 1, 1, 2, 1)
    with pytest.raises(DomainError):
        input_moments("half_noon_like", n=3)
