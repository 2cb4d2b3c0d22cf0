"""Density operators after number and phase measurements, and the two-box
interference experiment built on them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy import special, stats

from .errors import RegimeError, TruncationError, ValidationError
from .evolution import TRUNCATION_TOL, leak_window, phase_grid
from .fock import DensityMixture, mixture_phase_expectations
from .states import npib_amplitudes, poisson_tail

NUMBER_SHAPES = ("kronecker", "rectangular", "gaussian")
PHASE_SHAPES = ("rectangular", "von-mises", "uniform")
MIN_PHASE_POINTS = 256


def wrap_phase(phi):
    """Map angles onto (-π, π]."""
    out = -np.remainder(-np.asarray(phi, dtype=float) + np.pi, 2 * np.pi) + np.pi
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class NumberWindow:
    """Apparatus response W(n - center) of a number measurement."""

    center: int
    err: float = 0.0
    shape: str = "kronecker"

    def __post_init__(self):
        if self.shape not in NUMBER_SHAPES:
            raise ValidationError(f"number window shape must be one of {NUMBER_SHAPES}, got {self.shape!r}")
        if self.err < 0:
            raise ValidationError("number window err must be >= 0")

    def __call__(self, n) -> np.ndarray:
        d = np.asarray(n) - self.center
        if self.shape == "kronecker" or self.err == 0:
            return (d == 0).astype(float)
        if self.shape == "rectangular":
            half = math.floor(self.err)
            return np.where(np.abs(d) <= half, 1.0 / (2 * half + 1), 0.0)
        # discrete Gaussian normalized over all integers
        span = np.arange(-math.ceil(12 * self.err), math.ceil(12 * self.err) + 1)
        z = np.exp(-0.5 * (span / self.err) ** 2).sum()
        return np.exp(-0.5 * (d / self.err) ** 2) / z


@dataclass(frozen=True)
class PhaseKernel:
    """Apparatus response D(phi - center), normalized so (1/2π)∫D dphi = 1.

    The von Mises shape uses concentration 1/err^2; a rectangular kernel
    with err >= π and the ``uniform`` shape are both D ≡ 1.
    """

    center: float
    err: float
    shape: str = "von-mises"

    def __post_init__(self):
        if self.shape not in PHASE_SHAPES:
            raise ValidationError(f"phase kernel shape must be one of {PHASE_SHAPES}, got {self.shape!r}")
        if not self.err > 0:
            raise ValidationError("phase kernel err must be > 0")
        object.__setattr__(self, "center", wrap_phase(self.center))

    @property
    def is_uniform(self) -> bool:
        return self.shape == "uniform" or (self.shape == "rectangular" and self.err >= math.pi)

    def __call__(self, phi) -> np.ndarray:
        d = wrap_phase(np.asarray(phi, dtype=float) - self.center)
        if self.is_uniform:
            return np.ones_like(d)
        if self.shape == "rectangular":
            return np.where(np.abs(d) <= self.err, math.pi / self.err, 0.0)
        kappa = 1.0 / self.err**2
        return np.exp(kappa * (np.cos(d) - 1)) / special.i0e(kappa)


def number_measurement_poststate(rho: DensityMixture, win: NumberWindow) -> DensityMixture:
    """Reweight a number-diagonal mixture by the window W and renormalize.

    The prior weight of each number state is kept, so a window that is flat
    over the whole support leaves the state unchanged and a Kronecker window
    selects the single number state |center, y>.
    """
    if not rho.is_diagonal():
        raise ValidationError("number measurement needs the number-state (Poisson) representation")
    prior = rho.number_distribution()
    n = rho.N_ref - np.arange(prior.size)
    post = prior * win(n)
    total = post.sum()
    if total <= 0:
        raise RegimeError(f"outcome N = {win.center} has zero probability for this state")
    return DensityMixture.diagonal(post / total, rho.N_ref)


@lru_cache(maxsize=32)
def _prm_amplitudes(N: int, Jt: float, M_phi: int, M_max: int) -> np.ndarray:
    amps = npib_amplitudes(Jt, phase_grid(M_phi), M_max)
    amps.flags.writeable = False
    return amps


def default_phase_points(M_max: int, err: float) -> int:
    return max(M_max + 1, MIN_PHASE_POINTS, math.ceil(32 * math.pi / err))


def _phase_setup(N: int, Jt: float, kernel: PhaseKernel, M_phi: int | None, M_max: int | None):
    if not kernel.is_uniform:
        limit = math.inf if Jt == 0 else 1 / (2 * math.sqrt(Jt))
        if kernel.err <= limit:
            raise RegimeError(
                f"phase error {kernel.err:g} is not above the NPIB phase spread 1/(2 sqrt(Jt)) = {limit:g}; "
                "a measurement this sharp collapses the state into another state, which is not modeled"
            )
    M_max = leak_window(N, Jt, M_max)
    if poisson_tail(M_max, Jt) > TRUNCATION_TOL:
        raise TruncationError(f"NPIB truncation at M_max={M_max} is too small for Jt={Jt:g}")
    if M_phi is None:
        M_phi = default_phase_points(M_max, kernel.err)
    if M_phi < M_max + 1:
        raise ValidationError(f"M_phi = {M_phi} must be >= M_max + 1 = {M_max + 1}")
    return M_phi, M_max


def kernel_weights(kernel: PhaseKernel, M_phi: int) -> np.ndarray:
    d = kernel(phase_grid(M_phi))
    total = d.sum()
    if total <= 0:
        raise ValidationError("phase kernel has no support on the phase grid; increase M_phi")
    return d / total


def phase_measurement_poststate(
    N: int, Jt: float, kernel: PhaseKernel, M_phi: int | None = None, M_max: int | None = None
) -> DensityMixture:
    """PRM of NPIBs reweighted by D(phi_j - center) on the phase grid."""
    M_phi, M_max = _phase_setup(N, Jt, kernel, M_phi, M_max)
    return DensityMixture(kernel_weights(kernel, M_phi), _prm_amplitudes(N, float(Jt), M_phi, M_max), N)


def relative_phase_expectations(mix: DensityMixture, center: float) -> tuple[float, float]:
    """``(<cos(phi - center)>, <sin(phi - center)>)``."""
    pe = mixture_phase_expectations(mix)
    c, s = math.cos(center), math.sin(center)
    return pe.cos * c + pe.sin * s, pe.sin * c - pe.cos * s


class Box(NamedTuple):
    N: int
    Jt: float


class InterferenceRun(NamedTuple):
    relative_phase: float
    phase_a: float
    phase_b: float
    post_a: DensityMixture
    post_b: DensityMixture


class InterferenceSummary(NamedTuple):
    relative_phases: np.ndarray
    mean_post_a: DensityMixture
    mean_post_b: DensityMixture


def _sample_phases(rng: np.random.Generator, size=None):
    # each box's PRM prior on its own phase is uniform
    pa = rng.uniform(-math.pi, math.pi, size)
    pb = rng.uniform(-math.pi, math.pi, size)
    return pa, pb, wrap_phase(pa - pb)


def two_box_interference_run(
    seed,
    box_a: Box,
    box_b: Box,
    err: float,
    shape: str = "von-mises",
    M_phi: int | None = None,
) -> InterferenceRun:
    """One experimental run: the fringe pattern fixes the relative phase.

    ``seed`` is an int or a ``numpy.random.Generator``. Each box's phase is
    drawn from its uniform PRM prior; the run reports their difference and
    each box's post-measurement state about its own realized phase.
    """
    rng = np.random.default_rng(seed)
    pa, pb, rel = _sample_phases(rng)
    post_a = phase_measurement_poststate(box_a.N, box_a.Jt, PhaseKernel(pa, err, shape), M_phi)
    post_b = phase_measurement_poststate(box_b.N, box_b.Jt, PhaseKernel(pb, err, shape), M_phi)
    return InterferenceRun(rel, wrap_phase(pa), wrap_phase(pb), post_a, post_b)


def interference_experiment(
    seed: int,
    n_runs: int,
    box_a: Box,
    box_b: Box,
    err: float,
    shape: str = "von-mises",
    M_phi: int | None = None,
) -> InterferenceSummary:
    """Repeat the two-box run ``n_runs`` times.

    Returns the sampled relative phases and the run-averaged post-states.
    All post-states of a box share the same NPIB elements, so the average
    is the mixture with run-averaged kernel weights.
    """
    if n_runs < 1:
        raise ValidationError("n_runs must be >= 1")
    rng = np.random.default_rng(seed)
    pa, pb, rel = _sample_phases(rng, n_runs)
    means = []
    for box, centers in ((box_a, pa), (box_b, pb)):
        probe = PhaseKernel(0.0, err, shape)
        Mp, Mm = _phase_setup(box.N, box.Jt, probe, M_phi, None)
        acc = np.zeros(Mp)
        for c in centers:
            acc += kernel_weights(PhaseKernel(c, err, shape), Mp)
        means.append(DensityMixture(acc / n_runs, _prm_amplitudes(box.N, float(box.Jt), Mp, Mm), box.N))
    return InterferenceSummary(np.asarray(rel), means[0], means[1])


def uniformity_pvalue(phases, bins: int = 32) -> float:
    """Chi-square p-value of ``phases`` against the uniform law on (-π, π]."""
    counts, _ = np.histogram(phases, bins=bins, range=(-math.pi, math.pi))
    return float(stats.chisquare(counts).pvalue)
