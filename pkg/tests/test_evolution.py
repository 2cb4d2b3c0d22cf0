import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leakybose import bogoliubov as bg
from leakybose import evolution as ev
from leakybose import fock, states
from leakybose.errors import TruncationError, ValidationError

from oracles import poisson_pmf


def test_binomial_small_example():
    np.testing.assert_allclose(ev.binomial_weights(2, 0.1), [0.81, 0.18, 0.01], rtol=1e-14)
    np.testing.assert_array_equal(ev.binomial_weights(3, 0.0), [1, 0, 0, 0])
    with pytest.raises(ValidationError):
        ev.binomial_weights(3, 1.5)


def test_poisson_weights():
    w = ev.poisson_weights(1.0)
    ref = [poisson_pmf(m, 1.0) for m in range(w.size)]
    np.testing.assert_allclose(w, ref, rtol=1e-13)
    assert w[0] == pytest.approx(math.exp(-1), rel=1e-15)
    with pytest.raises(TruncationError):
        ev.poisson_weights(20.0, 10)


def test_binomial_to_poisson_limit():
    lam, M = 2.0, 10_000
    assert ev.total_variation(ev.binomial_weights(M, lam / M), ev.poisson_weights(lam)) < 1e-3


def test_normalization_defect():
    exact, bound = ev.normalization_defect(50, 5.0)
    direct = 1 - sum(poisson_pmf(m, 5.0) for m in range(51))
    assert exact == pytest.approx(direct, rel=1e-6, abs=1e-30)
    assert exact < 3 * bound
    defects = [ev.normalization_defect(M, 5.0)[0] for M in range(10, 60, 5)]
    assert all(a > b for a, b in zip(defects, defects[1:]))


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 5.0), st.floats(0.05, 5.0))
def test_chapman_kolmogorov(t1, t2):
    m_max = states.default_m_max(t1 + t2) + 10
    two_step = ev.propagate_weights(ev.poisson_weights(t1, m_max), t2)
    np.testing.assert_allclose(two_step, ev.poisson_weights(t1 + t2, m_max), atol=1e-12)


@pytest.mark.parametrize("jt", [0.0, 0.5, 3.0, 25.0])
def test_leakage_moments(jt):
    N = 10_000
    escaped_mean, var = ev.escaped_moments(N, jt)
    assert escaped_mean == pytest.approx(jt, abs=1e-9)
    assert var == pytest.approx(jt, abs=1e-9)


def _prm_loop_oracle(N, jt, M_phi, M_max):
    rho = np.zeros((M_max + 1, M_max + 1), dtype=complex)
    m = np.arange(M_max + 1)
    logfact = np.array([math.lgamma(k + 1) for k in m])
    for j in range(M_phi):
        phi = 2 * math.pi * j / M_phi
        c = np.exp(-jt / 2 + m * math.log(jt) / 2 - logfact / 2) * np.exp(-1j * m * phi) if jt > 0 else (m == 0) * 1.0
        c = c / np.linalg.norm(c)
        rho += np.outer(c, c.conj()) / M_phi
    return rho


@pytest.mark.parametrize("jt", [0.5, 2.0, 10.0])
def test_prm_matches_loop_oracle(jt):
    N, M_phi = 200, 256
    M_max = min(states.default_m_max(jt), N - 1)
    prm = fock.to_dense(ev.rho_prm_npib(N, jt, M_phi, M_max))
    np.testing.assert_allclose(prm, _prm_loop_oracle(N, jt, M_phi, M_max), atol=1e-14)
    assert ev.representation_distance(N, jt, M_phi, M_max) < 1e-10


def test_prm_needs_enough_phases():
    with pytest.raises(ValidationError):
        ev.rho_prm_npib(200, 10.0, 5)


def test_zero_time_collapses_to_number_state():
    mix = ev.rho_prm_npib(100, 0.0, 16)
    rho = fock.to_dense(mix)
    assert rho[0, 0] == pytest.approx(1)
    assert fock.purity(rho) == pytest.approx(1, abs=1e-14)


def test_window_limits():
    with pytest.raises(ValidationError):
        ev.rho_nsib_mixture(100, 20.0)
    with pytest.raises(ValidationError):
        ev.rho_nsib_mixture(100, -1.0)


def test_order_parameter():
    p = bg.GasParams(a=0.01, n=1.0, V=1e4)
    dc = bg.derived_constants(p)
    assert ev.order_parameter_psi(0j, p.N, dc.n0, p.n, p.V) == 0
    rng = np.random.default_rng(11)
    ref = None
    for phi in rng.uniform(-math.pi, math.pi, 3):
        psi = ev.order_parameter_psi(cmath.rect(5.0, phi), p.N, dc.n0, p.n, p.V, phase_cond=0.2)
        assert cmath.phase(psi) == pytest.approx(math.remainder(phi + 0.2, 2 * math.pi), abs=1e-12)
        ref = abs(psi) if ref is None else ref
        assert abs(psi) == pytest.approx(ref, rel=1e-12)
    # |<b0>| <= sqrt(<N>) bounds the order parameter by sqrt(n0)
    assert ref < math.sqrt(dc.n0)


def test_trajectory_rows():
    sched = ev.LeakSchedule(J=1.0, t_grid=[0, 1, 3, 10], N=10_000)
    traj = ev.trajectory(sched, check_equivalence=True)
    assert ev.COLUMNS == ("jt", "mean_n", "var_n", "abs_psi_norm", "sin2_phi", "inv_4jt")
    first = traj.rows[0]
    assert first.abs_psi_norm == 0 and first.sin2_phi == 0.5 and first.inv_4jt is None
    np.testing.assert_allclose(traj.column("mean_n"), 10_000 - traj.column("jt"), atol=1e-9)
    np.testing.assert_allclose(traj.column("var_n"), traj.column("jt"), atol=1e-9)
    assert math.isnan(traj.column("inv_4jt")[0])


def test_schedule_validation():
    with pytest.raises(ValidationError):
        ev.LeakSchedule(J=1.0, t_grid=[0, 200], N=1000)
    with pytest.raises(ValidationError):
        ev.LeakSchedule(J=1.0, t_grid=[], N=1000)
    with pytest.raises(ValidationError):
        ev.LeakSchedule(J=1.0, t_grid=[10], N=1000, M_phi=3)
    p = bg.GasParams(a=0.01, n=1.0, V=500)
    with pytest.raises(ValidationError):
        ev.trajectory(ev.LeakSchedule(J=1.0, t_grid=[1], N=400), p)


def test_mean_field_energy():
    p = bg.GasParams(a=0.01, n=1.0, V=1e4)
    N = p.N
    assert ev.mean_field_energy(states.nsib(N), p) == pytest.approx(p.g * N * N / (2 * p.V), rel=1e-14)
    mix = ev.rho_nsib_mixture(N, 4.0)
    # <N^2> = (N - Jt)^2 + Jt
    expected = p.g / (2 * p.V) * ((N - 4.0) ** 2 + 4.0)
    assert ev.mean_field_energy(mix, p) == pytest.approx(expected, rel=1e-12)
