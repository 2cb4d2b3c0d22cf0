"""Number, coherent and number-phase squeezed states of interacting bosons.

All three live in the single-mode b0 Fock space:

* ``nsib``  -- the fixed-N ground state, a b0 number state
* ``csib``  -- Poissonian superposition of number states (Fano factor 1)
* ``npib``  -- shifted-Poisson superposition below N with a definite phase
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from .errors import RegimeError, TruncationError, ValidationError
from .fock import OffsetFockVector, number_moments, phase_operator_expectations

TAIL_TOL = 1e-14
GUARD_SLOTS = 8


def poisson_logpmf(m, lam: float) -> np.ndarray:
    m = np.asarray(m)
    if lam == 0:
        return np.where(m == 0, 0.0, -np.inf)
    return special.xlogy(m, lam) - lam - special.gammaln(m + 1)


def poisson_tail(M: int, lam: float) -> float:
    """P(X > M) for X ~ Poisson(lam)."""
    if lam == 0:
        return 0.0
    return float(special.gammainc(M + 1, lam))


def default_m_max(lam: float, guard: int = GUARD_SLOTS) -> int:
    """Smallest M with Poisson(lam) mass above M below 1e-14, plus guard slots."""
    if lam == 0:
        return guard
    M = int(stats.poisson.isf(TAIL_TOL, lam))
    while poisson_tail(M, lam) >= TAIL_TOL:
        M += 1
    while M > 0 and poisson_tail(M - 1, lam) < TAIL_TOL:
        M -= 1
    return M + guard


def inverse_K(M: int, x: float) -> float:
    """1/K(M, x) = e^{-x} Σ_{m<=M} x^m / m!."""
    if x == 0:
        return 1.0
    return float(special.gammaincc(M + 1, x))


def k_defect_bound(M: int, x: float) -> float:
    """Stirling estimate of |1/K(M, x) - 1| for large M."""
    if x == 0:
        return 0.0
    log_b = -x - 0.5 * math.log(2 * math.pi * (M + 1)) + (M + 1) * (1 + math.log(x) - math.log(M + 1))
    return math.exp(log_b)


def nsib(N: int, M_max: int | None = None) -> OffsetFockVector:
    """|N, y>: amplitude one at offset zero."""
    if N < 1:
        raise ValidationError(f"N must be >= 1, got {N}")
    if M_max is None:
        M_max = min(GUARD_SLOTS, N - 1)
    amps = np.zeros(M_max + 1, dtype=complex)
    amps[0] = 1.0
    return OffsetFockVector(N, amps)


def csib_window(lam: float, guard: int = GUARD_SLOTS) -> tuple[int, int]:
    """``(N_ref, M_max)`` of a window holding all but 1e-14 of Poisson(lam)."""
    half = TAIL_TOL / 2
    hi = int(stats.poisson.isf(half, lam)) + 1 + guard
    lo = int(stats.poisson.ppf(half, lam)) - 1 - guard
    lo = max(lo, 1) if stats.poisson.cdf(0, lam) < half else 0
    return hi, hi - lo


def csib(alpha: complex, N_ref: int | None = None, M_max: int | None = None) -> OffsetFockVector:
    """Coherent state of interacting bosons on the window ``[N_ref - M_max, N_ref]``.

    Raises TruncationError when the window misses more than 1e-14 of the
    Poisson number distribution.
    """
    lam = abs(alpha) ** 2
    if N_ref is None or M_max is None:
        w_ref, w_depth = csib_window(lam)
        N_ref = w_ref if N_ref is None else N_ref
        M_max = w_depth if M_max is None else M_max
    M_max = min(M_max, N_ref)
    n = N_ref - np.arange(M_max + 1)
    logp = poisson_logpmf(n, lam)
    outside = float(stats.poisson.sf(N_ref, lam) + stats.poisson.cdf(n[-1] - 1, lam))
    if outside > TAIL_TOL:
        raise TruncationError(f"CSIB window [{n[-1]}, {N_ref}] misses Poisson mass {outside:.3e}")
    amps = np.exp(logp / 2) * np.exp(1j * cmath.phase(alpha) * n)
    return OffsetFockVector(N_ref, amps).normalized()


@dataclass(frozen=True)
class NpibLabel:
    xi: complex
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValidationError(f"N must be >= 1, got {self.N}")
        x = abs(self.xi) ** 2
        if x > self.N / 10:
            raise ValidationError(f"|xi|^2 = {x:g} exceeds N/10 = {self.N / 10:g}")
        if x > self.N / 100:
            warnings.warn(f"|xi|^2 = {x:g} is not << N = {self.N}", stacklevel=3)

    @classmethod
    def from_polar(cls, abs_xi_sq: float, phi: float, N: int) -> "NpibLabel":
        return cls(cmath.rect(math.sqrt(abs_xi_sq), phi), N)

    @property
    def phi(self) -> float:
        return cmath.phase(self.xi)

    @property
    def abs_sq(self) -> float:
        return abs(self.xi) ** 2


def npib_amplitudes(abs_xi_sq: float, phis, M_max: int) -> np.ndarray:
    """Rows ``c_m = e^{-x/2} |xi|^m e^{-i m phi} / sqrt(m!)`` for each phase.

    Normalized over the window; the caller is responsible for the tail check.
    """
    m = np.arange(M_max + 1)
    mod = np.exp(poisson_logpmf(m, abs_xi_sq) / 2)
    mod = mod / np.linalg.norm(mod)
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    return mod[None, :] * np.exp(-1j * np.outer(phis, m))


def npib(label: NpibLabel, M_max: int | None = None) -> OffsetFockVector:
    """Number-phase squeezed state |xi, N, y> with amplitude ∝ conj(xi)^m / sqrt(m!) at offset m."""
    x = label.abs_sq
    if M_max is None:
        M_max = default_m_max(x)
    M_max = min(M_max, label.N - 1)
    tail = poisson_tail(M_max, x)
    if tail > 1e-12:
        raise TruncationError(f"NPIB truncation at M_max={M_max} drops weight {tail:.3e}")
    # K(N, x) differs from one by less than the tail already renormalized away
    return OffsetFockVector(label.N, npib_amplitudes(x, label.phi, M_max)[0])


def rotate(state: OffsetFockVector, theta: float) -> OffsetFockVector:
    """Shift the phase label by ``theta`` (xi -> e^{i theta} xi)."""
    return OffsetFockVector(state.N_ref, state.amps * np.exp(-1j * theta * state.offsets))


def phase_variance(state: OffsetFockVector) -> float:
    """Small-angle phase variance (<sin^2> - <sin>^2) / <cos>^2 about the mean phase.

    Raises RegimeError when <cos> in the rotated frame is not above 0.5,
    i.e. the state has no well-defined phase.
    """
    pe = phase_operator_expectations(state)
    mean_phase = math.atan2(pe.sin, pe.cos)
    pe = phase_operator_expectations(rotate(state, -mean_phase))
    if pe.cos <= 0.5:
        raise RegimeError(f"<cos phi> = {pe.cos:.3g} <= 0.5: phase not well defined")
    return (pe.sin2 - pe.sin**2) / pe.cos**2


def npup(state: OffsetFockVector) -> float:
    """Number-phase uncertainty product <δN^2> <δφ^2>."""
    return number_moments(state)[1] * phase_variance(state)


def fano(state: OffsetFockVector) -> float:
    mean, var = number_moments(state)
    return var / mean
