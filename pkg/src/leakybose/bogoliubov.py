"""Semiclassical Bogoliubov quantities for a uniform dilute Bose gas.

Reduced units are the default (``hbar = m = 1``); pass physical values of
``hbar`` and ``m`` to work in SI. Momentum integrals are written in the
dimensionless variable ``k = q / q_h`` with the healing momentum
``q_h = sqrt(2 m g n) / hbar``, in which ``eps0_q = g n k**2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import CutoffError, ValidationError

DILUTE_WARN = 1e-2
ENV_RATIO_WARN = 1e3
DEFAULT_CUTOFF = 100.0  # in units of the healing momentum
MIN_CUTOFF = 50.0

# Large-k expansions of k^2 sinh^2|y| and k^2 sinh^4|y| (gn = 1) as
# {power of 1/k: coefficient}. Integrated analytically beyond the cutoff.
_SINH2_TAIL = {2: 1 / 4, 4: -1 / 2, 6: 15 / 16, 8: -7 / 4, 10: 105 / 32, 12: -99 / 16, 14: 3003 / 256}
_SINH4_TAIL = {6: 1 / 16, 8: -1 / 4, 10: 23 / 32, 12: -29 / 16, 14: 1093 / 256}


@dataclass(frozen=True)
class GasParams:
    """Physical parameters of the gas in the box.

    ``a = 0`` is accepted as the free-gas limit. ``n0`` overrides the
    computed condensate density when given.
    """

    a: float
    n: float
    V: float
    m: float = 1.0
    hbar: float = 1.0
    n0: float | None = None
    N: int = field(init=False)

    def __post_init__(self):
        for name in ("n", "V", "m", "hbar"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(f"{name} must be positive and finite, got {value!r}")
        if not (math.isfinite(self.a) and self.a >= 0):
            raise ValidationError(f"scattering length a must be >= 0, got {self.a!r}")
        N = round(self.n * self.V)
        if N < 1:
            raise ValidationError(f"n*V = {self.n * self.V:g} rounds to N = {N} < 1")
        object.__setattr__(self, "N", N)
        gas = self.diluteness
        if gas >= 1:
            raise ValidationError(f"n a^3 = {gas:g} >= 1: gas is not dilute")
        if gas >= DILUTE_WARN:
            warnings.warn(f"n a^3 = {gas:g} is not << 1; Bogoliubov results are unreliable", stacklevel=2)
        if self.n0 is not None and not (0 < self.n0 <= self.n):
            raise ValidationError(f"n0 must satisfy 0 < n0 <= n, got {self.n0!r}")

    @property
    def diluteness(self) -> float:
        return self.n * self.a**3

    @property
    def g(self) -> float:
        return 4 * math.pi * self.hbar**2 * self.a / self.m

    @property
    def mu(self) -> float:
        return self.g * self.n

    @property
    def healing_q(self) -> float:
        return math.sqrt(2 * self.m * self.mu) / self.hbar


@dataclass(frozen=True)
class FluxParams:
    lambda_coupling: complex
    v_boundary: float
    env_volume: float

    def __post_init__(self):
        if self.v_boundary < 0:
            raise ValidationError("v_boundary must be >= 0")
        if self.env_volume <= 0:
            raise ValidationError("env_volume must be positive")


class DerivedConstants(NamedTuple):
    g: float
    mu: float
    healing_q: float
    n0: float
    Z: float


class NumberStats(NamedTuple):
    mean: float
    var: float
    fano: float


def _check_q(q):
    q = np.asarray(q, dtype=float)
    if np.any(q < 0):
        raise ValidationError("wavenumber must be non-negative")
    return q


def free_dispersion(q, p: GasParams):
    """hbar^2 q^2 / 2m."""
    q = _check_q(q)
    return p.hbar**2 * q**2 / (2 * p.m)


def quasiparticle_dispersion(q, p: GasParams):
    """Bogoliubov quasiparticle energy sqrt(eps0 (eps0 + 2 g n))."""
    e0 = free_dispersion(q, p)
    return np.sqrt(e0 * (e0 + 2 * p.mu))


def bogoliubov_y(q, p: GasParams):
    """Return ``(cosh|y_q|, sinh|y_q|)`` of the Bogoliubov ground state.

    Raises ValidationError at ``q = 0`` where the quasiparticle energy
    vanishes and cosh diverges.
    """
    q = _check_q(q)
    if np.any(q == 0):
        raise ValidationError("bogoliubov_y is singular at q = 0")
    e0 = free_dispersion(q, p)
    eps = np.sqrt(e0 * (e0 + 2 * p.mu))
    s = eps + e0 + p.mu
    return np.sqrt(s / (2 * eps)), p.mu / np.sqrt(2 * eps * s)


def _sinh2_reduced(k):
    # sinh^2|y| with gn = 1, written without the cosh^2 - 1 cancellation
    k2 = k * k
    eps = k * np.sqrt(k2 + 2)
    return 1 / (2 * eps * (eps + k2 + 1))


@lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def _panels(cutoff: float, per_decade: int) -> np.ndarray:
    inner = np.linspace(0.0, 1.0, per_decade + 1)
    decades = math.log10(cutoff)
    outer = np.logspace(0.0, decades, max(1, math.ceil(decades * per_decade)) + 1)
    return np.concatenate([inner, outer[1:]])


def _composite(f, edges: np.ndarray, n_quad: int) -> float:
    x, w = _gauss_legendre(n_quad)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = (hi - lo) / 2
    nodes = lo + half * (x + 1)
    return float(np.sum(half * w * f(nodes)))


def _reduced_integrals(cutoff: float, n_quad: int, rtol: float = 1e-14):
    """∫_0^∞ k^2 sinh^2 dk and ∫_0^∞ k^2 sinh^4 dk in reduced units.

    Gauss-Legendre panels split at k = 1 (the healing scale) and spaced
    geometrically above it; panel count doubles until converged. The tail
    beyond ``cutoff`` is added from the asymptotic series.
    """
    f2 = lambda k: k * k * _sinh2_reduced(k)
    f4 = lambda k: k * k * _sinh2_reduced(k) ** 2

    per_decade = 2
    prev = None
    for _ in range(10):
        edges = _panels(cutoff, per_decade)
        cur = (_composite(f2, edges, n_quad), _composite(f4, edges, n_quad))
        if prev is not None and all(abs(c - p) <= rtol * abs(c) for c, p in zip(cur, prev)):
            break
        prev = cur
        per_decade *= 2
    else:
        raise CutoffError("momentum quadrature failed to converge")

    t2 = sum(c * cutoff ** (1 - p) / (p - 1) for p, c in _SINH2_TAIL.items())
    t4 = sum(c * cutoff ** (1 - p) / (p - 1) for p, c in _SINH4_TAIL.items())
    # first omitted terms bound the tail error
    err2 = abs(_SINH2_TAIL[14]) * cutoff**-15
    total = cur[0] + t2
    if err2 > 1e-6 * total:
        raise CutoffError(f"cutoff {cutoff:g} healing scales leaves tail error {err2 / total:.2e}")
    return total, cur[1] + t4


def _cutoff_in_healing_units(p: GasParams, q_max: float | None) -> float:
    if q_max is None:
        return DEFAULT_CUTOFF
    cutoff = q_max / p.healing_q
    if cutoff < MIN_CUTOFF:
        raise CutoffError(
            f"q_max = {q_max:g} is {cutoff:.3g} healing scales; at least {MIN_CUTOFF:g} required"
        )
    return cutoff


def mode_sums(p: GasParams, q_max: float | None = None, n_quad: int = 32) -> tuple[float, float]:
    """Return ``(Σ sinh^2|y_q|, Σ sinh^4|y_q|)`` over q ≠ 0 for the box volume.

    Sums are replaced by ``V/(2π^2) ∫ q^2 dq``; ``q_max`` defaults to 100
    healing momenta.
    """
    if p.a == 0:
        return 0.0, 0.0
    cutoff = _cutoff_in_healing_units(p, q_max)
    i2, i4 = _reduced_integrals(cutoff, n_quad)
    scale = p.V * p.healing_q**3 / (2 * math.pi**2)
    return scale * i2, scale * i4


def depletion_density(p: GasParams, q_max: float | None = None, n_quad: int = 32) -> float:
    """Density of non-condensed particles (1/V) Σ sinh^2|y_q|."""
    return mode_sums(p, q_max, n_quad)[0] / p.V


def derived_constants(p: GasParams, q_max: float | None = None, n_quad: int = 32) -> DerivedConstants:
    if p.n0 is not None:
        n0 = p.n0
    else:
        n0 = p.n - depletion_density(p, q_max, n_quad)
        if n0 <= 0:
            raise ValidationError("depletion exceeds the total density")
    hq = p.healing_q
    return DerivedConstants(g=p.g, mu=p.mu, healing_q=hq, n0=n0, Z=n0 / p.n)


def semiclassical_number_stats(
    p: GasParams, N0: float | None = None, q_max: float | None = None, n_quad: int = 32
) -> NumberStats:
    """Number mean, variance and Fano factor of the Bogoliubov ground state.

    ``N0`` is |α0|^2; it defaults to ``n0 V``.
    """
    s2, s4 = mode_sums(p, q_max, n_quad)
    if N0 is None:
        N0 = derived_constants(p, q_max, n_quad).n0 * p.V
    mean = N0 + s2
    var = mean + s4
    return NumberStats(mean, var, var / mean)


def lhy_factor(p: GasParams) -> float:
    return 1 + (128 / 15) * math.sqrt(p.diluteness / math.pi)


def ground_state_energy(p: GasParams) -> float:
    """(1/2) g n N with the Lee-Huang-Yang correction."""
    return 0.5 * p.g * p.n * p.N * lhy_factor(p)


def leakage_flux(p: GasParams, f: FluxParams, n0: float | None = None) -> float:
    """Order-of-magnitude escape rate n0 |λ|^2 v^2 sqrt(m^3 g n) / hbar^4.

    O(1) prefactors are taken as exactly one.
    """
    if f.env_volume < ENV_RATIO_WARN * p.V:
        warnings.warn("environment volume is not >> box volume", stacklevel=2)
    if n0 is None:
        n0 = derived_constants(p).n0
    return n0 * abs(f.lambda_coupling) ** 2 * f.v_boundary**2 * math.sqrt(p.m**3 * p.mu) / p.hbar**4


def check_flux_bound(J: float, J_cr: float | None) -> bool:
    """Warn when ``J`` exceeds a user-supplied critical flux. Returns True if within bound."""
    if J_cr is None or J <= J_cr:
        return True
    warnings.warn(f"leakage flux J = {J:g} exceeds the supplied critical flux {J_cr:g}", stacklevel=2)
    return False
