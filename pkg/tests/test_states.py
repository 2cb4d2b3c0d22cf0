import cmath
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leakybose import fock, states
from leakybose.errors import RegimeError, TruncationError, ValidationError

from oracles import coherent_full, embed, expect, full_cos_sin, poisson_pmf


def test_nsib():
    s = states.nsib(100)
    assert fock.number_moments(s) == (100, 0)
    pe = fock.phase_operator_expectations(s)
    assert pe.cos == 0 and pe.sin == 0
    assert fock.expect_b0(s) == 0
    with pytest.raises(ValidationError):
        states.nsib(0)


def test_csib_statistics():
    s = states.csib(20.0)
    mean, var = fock.number_moments(s)
    assert mean == pytest.approx(400, rel=1e-13)
    assert var / mean == pytest.approx(1, abs=1e-10)
    assert s.norm() == pytest.approx(1, abs=1e-12)


def test_csib_matches_full_space_coherent_state():
    alpha = 3.0 * cmath.exp(0.4j)
    s = states.csib(alpha)
    assert s.N_ref - s.M_max == 0  # small |alpha|: window reaches the vacuum
    full = coherent_full(alpha, s.N_ref)
    np.testing.assert_allclose(embed(s, s.N_ref), full, atol=1e-14)


def test_csib_sine_expansion():
    # exact summation with the defining operator on the full Fock space
    s = states.csib(cmath.rect(10.0, math.pi / 2))
    n_max = s.N_ref + 2
    _, sin = full_cos_sin(n_max)
    exact = expect(sin, embed(s, n_max)).real
    assert fock.phase_operator_expectations(s).sin == pytest.approx(exact, abs=1e-12)
    assert exact == pytest.approx(1 - 1 / 800, abs=1e-3)


def test_csib_window_too_small():
    with pytest.raises(TruncationError):
        states.csib(20.0, N_ref=420, M_max=40)


def test_npib_distribution_is_shifted_poisson():
    N, x = 1000, 6.25
    s = states.npib(states.NpibLabel(cmath.rect(2.5, 1.1), N))
    pmf = np.array([poisson_pmf(m, x) for m in range(s.M_max + 1)])
    np.testing.assert_allclose(s.probabilities(), pmf, rtol=1e-12, atol=1e-300)
    mean, var = fock.number_moments(s)
    assert mean == pytest.approx(N - x, abs=1e-10)
    assert var == pytest.approx(x, abs=1e-10)


def test_npib_zero_xi_is_nsib():
    s = states.npib(states.NpibLabel(0j, 50))
    np.testing.assert_array_equal(s.amps, states.nsib(50, s.M_max).amps)


def test_npib_label_limits():
    with pytest.raises(ValidationError):
        states.NpibLabel(5.0, 100)
    with pytest.warns(UserWarning):
        states.NpibLabel(2.0, 100)
    lab = states.NpibLabel.from_polar(25.0, -0.3, 10_000)
    assert lab.phi == pytest.approx(-0.3) and lab.abs_sq == pytest.approx(25)


def test_npib_phase_expansion():
    s = states.npib(states.NpibLabel(5.0, 10_000))
    pe = fock.phase_operator_expectations(s)
    assert abs(pe.sin) < 1e-15
    assert pe.cos == pytest.approx(1 - 1 / 200, abs=1e-3)


def test_npup_values():
    assert states.npup(states.csib(20.0)) == pytest.approx(0.25, rel=0.05)
    assert states.npup(states.npib(states.NpibLabel(5.0, 10_000))) == pytest.approx(0.25, rel=0.05)
    with pytest.raises(RegimeError):
        states.npup(states.nsib(100))


def test_npup_independent_of_mean_phase():
    a = states.npup(states.npib(states.NpibLabel(5.0, 10_000)))
    b = states.npup(states.npib(states.NpibLabel(cmath.rect(5.0, 2.0), 10_000)))
    assert a == pytest.approx(b, rel=1e-10)


def test_squeezing_ordering():
    N, x = 10_000, 25.0
    n = states.npib(states.NpibLabel(math.sqrt(x), N))
    c = states.csib(math.sqrt(N - x))
    assert fock.number_moments(n)[0] == pytest.approx(fock.number_moments(c)[0], rel=1e-12)
    assert fock.number_moments(n)[1] < fock.number_moments(c)[1]
    assert states.phase_variance(n) > states.phase_variance(c)
    assert states.fano(n) == pytest.approx(x / (N - x), abs=1e-10)
    assert states.fano(n) < states.fano(c)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 40.0), st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi))
def test_rotation_covariance(x, phi, theta):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        base = states.npib(states.NpibLabel.from_polar(x, phi, 5000))
        turned = states.npib(states.NpibLabel.from_polar(x, phi + theta, 5000))
    np.testing.assert_allclose(fock.number_moments(base), fock.number_moments(turned), rtol=1e-12)
    p0 = fock.phase_operator_expectations(base)
    p1 = fock.phase_operator_expectations(turned)
    assert p1.cos == pytest.approx(p0.cos * math.cos(theta) - p0.sin * math.sin(theta), abs=1e-10)
    assert p1.sin == pytest.approx(p0.sin * math.cos(theta) + p0.cos * math.sin(theta), abs=1e-10)
    np.testing.assert_allclose(states.rotate(base, theta).amps, turned.amps, atol=1e-10)


def test_k_normalization():
    # K(N, x) = 1 / P(Poisson(x) <= N) by direct summation
    for N, x in [(10, 5.0), (20, 5.0), (40, 5.0)]:
        direct = sum(poisson_pmf(m, x) for m in range(N + 1))
        assert states.inverse_K(N, x) == pytest.approx(direct, rel=1e-14)
    ks = [1 / states.inverse_K(N, 5.0) for N in range(5, 60)]
    assert all(k >= 1 for k in ks)
    assert all(a >= b for a, b in zip(ks, ks[1:]))


def test_default_m_max():
    for lam in (0.5, 2.0, 25.0, 200.0):
        M = states.default_m_max(lam) - states.GUARD_SLOTS
        assert states.poisson_tail(M, lam) < 1e-14
        assert states.poisson_tail(M - 1, lam) >= 1e-14
    assert states.default_m_max(0.0) == states.GUARD_SLOTS
