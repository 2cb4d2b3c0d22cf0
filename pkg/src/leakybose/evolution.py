"""Leakage dynamics of the box state.

After ``m`` escape events the box holds ``|N - m, y>``; the escape count is
binomial for a finite step count and Poisson in the continuum limit. The
resulting density operator has two exact decompositions: a Poisson mixture
of number states and a phase-randomized mixture (PRM) of NPIBs with
``|xi|^2 = Jt``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy import special

from .bogoliubov import GasParams
from .errors import NumericalError, TruncationError, ValidationError
from .fock import (
    DensityMixture,
    OffsetFockVector,
    expect_b0,
    mixture_number_moments,
    phase_operator_expectations,
    to_dense,
    trace_distance,
)
from .states import (
    NpibLabel,
    default_m_max,
    k_defect_bound,
    npib,
    npib_amplitudes,
    poisson_logpmf,
    poisson_tail,
)

TRUNCATION_TOL = 1e-12


def binomial_weights(M: int, p: float) -> np.ndarray:
    """w(m) = C(M, m) (1-p)^(M-m) p^m for m = 0..M, summing to one."""
    if M < 1:
        raise ValidationError(f"step count M must be >= 1, got {M}")
    if not 0 <= p <= 1:
        raise ValidationError(f"step probability must lie in [0, 1], got {p}")
    m = np.arange(M + 1)
    logw = (
        special.gammaln(M + 1)
        - special.gammaln(m + 1)
        - special.gammaln(M - m + 1)
        + special.xlogy(m, p)
        + special.xlog1py(M - m, -p)
    )
    w = np.exp(logw)
    return w / math.fsum(w)


def poisson_weights(lam: float, m_max: int | None = None) -> np.ndarray:
    """w(m) = e^{-lam} lam^m / m! for m = 0..m_max.

    The K(M, lam) renormalization is dropped, as it differs from one by
    less than the tail; raises TruncationError if the tail beyond ``m_max``
    exceeds 1e-12.
    """
    if lam < 0:
        raise ValidationError(f"Poisson mean must be >= 0, got {lam}")
    if m_max is None:
        m_max = default_m_max(lam)
    tail = poisson_tail(m_max, lam)
    if tail > TRUNCATION_TOL:
        raise TruncationError(f"Poisson({lam:g}) tail beyond m = {m_max} is {tail:.3e}")
    return np.exp(poisson_logpmf(np.arange(m_max + 1), lam))


def propagate_weights(weights, lam: float) -> np.ndarray:
    """Evolve escape-count weights by a further Poisson(lam) step, same window."""
    weights = np.asarray(weights, dtype=float)
    step = np.exp(poisson_logpmf(np.arange(weights.size), lam))
    return np.convolve(weights, step)[: weights.size]


def normalization_defect(M: int, x: float) -> tuple[float, float]:
    """Return ``(|1/K(M, x) - 1|, asymptotic estimate)``."""
    if M < 1 or x < 0:
        raise ValidationError("need M >= 1 and x >= 0")
    exact = 0.0 if x == 0 else float(special.gammainc(M + 1, x))
    return exact, k_defect_bound(M, x)


def total_variation(p, q) -> float:
    p, q = np.asarray(p, float), np.asarray(q, float)
    n = max(p.size, q.size)
    p = np.pad(p, (0, n - p.size))
    q = np.pad(q, (0, n - q.size))
    return 0.5 * float(np.abs(p - q).sum())


def leak_window(N: int, Jt: float, M_max: int | None) -> int:
    if Jt < 0:
        raise ValidationError(f"Jt must be >= 0, got {Jt}")
    if Jt > N / 10:
        raise ValidationError(f"Jt = {Jt:g} violates Jt << N (limit N/10 = {N / 10:g})")
    if M_max is None:
        M_max = default_m_max(Jt)
    return min(M_max, N - 1)


def rho_nsib_mixture(N: int, Jt: float, M_max: int | None = None) -> DensityMixture:
    """Poisson mixture Σ_m w(m) |N - m, y><N - m, y|."""
    M_max = leak_window(N, Jt, M_max)
    w = poisson_weights(Jt, M_max)
    return DensityMixture.diagonal(w / math.fsum(w), N)


def rho_prm_npib(N: int, Jt: float, M_phi: int, M_max: int | None = None) -> DensityMixture:
    """Equal-weight mixture of NPIBs with xi = e^{i phi_j} sqrt(Jt), phi_j = 2πj / M_phi.

    With ``M_phi > M_max`` every off-diagonal phase factor averages to zero
    exactly, so this equals :func:`rho_nsib_mixture` on the window.
    """
    M_max = leak_window(N, Jt, M_max)
    if M_phi < M_max + 1:
        raise ValidationError(f"M_phi = {M_phi} must be >= M_max + 1 = {M_max + 1}")
    tail = poisson_tail(M_max, Jt)
    if tail > TRUNCATION_TOL:
        raise TruncationError(f"NPIB truncation at M_max={M_max} drops weight {tail:.3e}")
    phis = phase_grid(M_phi)
    return DensityMixture(np.full(M_phi, 1.0 / M_phi), npib_amplitudes(Jt, phis, M_max), N)


def phase_grid(M_phi: int) -> np.ndarray:
    return 2 * np.pi * np.arange(M_phi) / M_phi


def representation_distance(N: int, Jt: float, M_phi: int, M_max: int | None = None) -> float:
    a = to_dense(rho_nsib_mixture(N, Jt, M_max))
    b = to_dense(rho_prm_npib(N, Jt, M_phi, M_max))
    return trace_distance(a, b)


def escaped_moments(N: int, Jt: float, M_max: int | None = None) -> tuple[float, float]:
    """Mean and variance of the number of bosons in the environment."""
    mix = rho_nsib_mixture(N, Jt, M_max)
    mean_n, var_n = mixture_number_moments(mix)
    return N - mean_n, var_n


def order_parameter_psi(xi: complex, N: int, n0: float, n: float, V: float, phase_cond: float = 0.0) -> complex:
    """Ψ = e^{i phase_cond} sqrt(n0 / nV) <xi, N, y| b0 |xi, N, y>.

    The non-condensate part of the field has no matrix elements between the
    number states involved and drops out.
    """
    if xi == 0:
        return 0j
    state = npib(NpibLabel(xi, N))
    return complex(np.exp(1j * phase_cond) * math.sqrt(n0 / (n * V)) * expect_b0(state))


def order_parameter_ratio(state: OffsetFockVector, N: int) -> float:
    """|Ψ| / sqrt(n0) for a state in a box that initially held N bosons."""
    return abs(expect_b0(state)) / math.sqrt(N)


@dataclass(frozen=True)
class LeakSchedule:
    J: float
    t_grid: Sequence[float]
    N: int
    M_phi: int | None = None

    def __post_init__(self):
        if self.J < 0:
            raise ValidationError(f"J must be >= 0, got {self.J}")
        ts = tuple(float(t) for t in self.t_grid)
        if not ts or min(ts) < 0:
            raise ValidationError("t_grid must be a non-empty list of non-negative times")
        object.__setattr__(self, "t_grid", ts)
        if self.N < 1:
            raise ValidationError("N must be >= 1")
        if self.J * max(ts) > self.N / 10:
            raise ValidationError(f"J*max(t) = {self.J * max(ts):g} violates Jt << N (limit N/10)")
        need = self.max_window() + 1
        if self.M_phi is None:
            object.__setattr__(self, "M_phi", need)
        elif self.M_phi < need:
            raise ValidationError(f"M_phi = {self.M_phi} must be >= M_max + 1 = {need}")

    def max_window(self) -> int:
        return min(default_m_max(self.J * max(self.t_grid)), self.N - 1)


class TrajectoryRow(NamedTuple):
    jt: float
    mean_n: float
    var_n: float
    abs_psi_norm: float
    sin2_phi: float
    inv_4jt: float | None


COLUMNS = TrajectoryRow._fields


@dataclass
class Trajectory:
    rows: list[TrajectoryRow]

    def column(self, name: str) -> np.ndarray:
        return np.array([np.nan if v is None else v for v in (getattr(r, name) for r in self.rows)])


def trajectory(schedule: LeakSchedule, p: GasParams | None = None, check_equivalence: bool = False) -> Trajectory:
    """Observables against Jt for the leaking box.

    Number statistics come from the Poisson mixture. |Ψ|/sqrt(n0) and
    <sin^2 phi> are for the phi = 0 NPIB element; by rotational symmetry
    every element gives the same values.
    """
    if p is not None and p.N != schedule.N:
        raise ValidationError(f"schedule N = {schedule.N} disagrees with gas N = round(nV) = {p.N}")
    N = schedule.N
    rows = []
    for t in schedule.t_grid:
        jt = schedule.J * t
        M_max = min(default_m_max(jt), N - 1)
        mix = rho_nsib_mixture(N, jt, M_max)
        mean_n, var_n = mixture_number_moments(mix)
        if check_equivalence:
            prm = rho_prm_npib(N, jt, schedule.M_phi, M_max)
            dist = trace_distance(to_dense(mix), to_dense(prm))
            if dist > 1e-10:
                raise NumericalError(f"representations differ by {dist:.3e} at Jt = {jt:g}")
        element = npib(NpibLabel(complex(math.sqrt(jt)), N), M_max)
        rows.append(
            TrajectoryRow(
                jt=jt,
                mean_n=mean_n,
                var_n=var_n,
                abs_psi_norm=order_parameter_ratio(element, N),
                sin2_phi=phase_operator_expectations(element).sin2,
                inv_4jt=1 / (4 * jt) if jt > 0 else None,
            )
        )
    return Trajectory(rows)


def mean_field_energy(obj: OffsetFockVector | DensityMixture, p: GasParams) -> float:
    """Σ_N' P(N') g N'^2 / 2V over the number distribution of ``obj``."""
    if isinstance(obj, OffsetFockVector):
        probs, N_ref = obj.probabilities(), obj.N_ref
    else:
        probs, N_ref = obj.number_distribution(), obj.N_ref
    n = N_ref - np.arange(probs.size)
    return float(p.g / (2 * p.V) * np.sum(probs * n.astype(float) ** 2) / probs.sum())
