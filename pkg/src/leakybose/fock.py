"""Single-mode truncated Fock space of the dressed condensate operator b0.

States are stored by offset ``m = N_ref - n`` so that only the few hundred
amplitudes near a large reference number ``N_ref`` are kept. Index ``m``
of an amplitude array is the coefficient of ``|N_ref - m>``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import RegimeError, ValidationError

log = logging.getLogger(__name__)

NORM_TOL = 1e-12


class PhaseExpectations(NamedTuple):
    cos: float
    sin: float
    cos2: float
    sin2: float


@dataclass(frozen=True, eq=False)
class OffsetFockVector:
    N_ref: int
    amps: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amps, dtype=complex)
        if amps.ndim != 1 or amps.size == 0:
            raise ValidationError("amplitudes must be a non-empty 1-d array")
        if self.N_ref < 0:
            raise ValidationError("N_ref must be >= 0")
        if amps.size - 1 > self.N_ref:
            raise ValidationError(f"M_max = {amps.size - 1} exceeds N_ref = {self.N_ref}")
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)

    @property
    def M_max(self) -> int:
        return self.amps.size - 1

    @property
    def offsets(self) -> np.ndarray:
        return np.arange(self.amps.size)

    @property
    def numbers(self) -> np.ndarray:
        return self.N_ref - self.offsets

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "OffsetFockVector":
        nrm = self.norm()
        if nrm == 0:
            raise ValidationError("cannot normalize the zero vector")
        return OffsetFockVector(self.N_ref, self.amps / nrm)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def vdot(self, other: "OffsetFockVector") -> complex:
        _check_same_basis(self, other)
        return complex(np.vdot(self.amps, other.amps))


def basis_state(N_ref: int, m: int, M_max: int) -> OffsetFockVector:
    """|N_ref - m> in a window of depth ``M_max``."""
    if not 0 <= m <= M_max:
        raise ValidationError(f"offset {m} outside [0, {M_max}]")
    amps = np.zeros(M_max + 1, dtype=complex)
    amps[m] = 1.0
    return OffsetFockVector(N_ref, amps)


def _check_same_basis(a: OffsetFockVector, b: OffsetFockVector):
    if a.N_ref != b.N_ref or a.M_max != b.M_max:
        raise ValidationError(
            f"basis mismatch: (N_ref={a.N_ref}, M_max={a.M_max}) vs (N_ref={b.N_ref}, M_max={b.M_max})"
        )


def apply_b0(state: OffsetFockVector, with_dropped: bool = False):
    """Apply b0 without renormalizing.

    Amplitude ``c_m`` moves to offset ``m + 1`` with factor ``sqrt(N_ref - m)``.
    Weight pushed past ``M_max`` is dropped; pass ``with_dropped=True`` to
    also get that weight back.
    """
    c = state.amps
    n = state.numbers.astype(float)
    out = np.zeros_like(c)
    out[1:] = c[:-1] * np.sqrt(n[:-1])
    dropped = float(abs(c[-1]) ** 2 * n[-1])
    if dropped > 0:
        log.debug("apply_b0 dropped weight %.3e beyond M_max=%d", dropped, state.M_max)
    result = OffsetFockVector(state.N_ref, out)
    return (result, dropped) if with_dropped else result


def apply_b0_dagger(state: OffsetFockVector, with_dropped: bool = False):
    """Apply b0†; amplitude at offset 0 would leave the window and is dropped."""
    c = state.amps
    n = state.numbers.astype(float)
    out = np.zeros_like(c)
    out[:-1] = c[1:] * np.sqrt(n[1:] + 1)
    dropped = float(abs(c[0]) ** 2 * (n[0] + 1))
    result = OffsetFockVector(state.N_ref, out)
    return (result, dropped) if with_dropped else result


def expect_b0(state: OffsetFockVector) -> complex:
    """<psi|b0|psi> = Σ_m conj(c_{m+1}) c_m sqrt(N_ref - m)."""
    c = state.amps
    n = state.numbers[:-1].astype(float)
    return complex(np.sum(np.conj(c[1:]) * c[:-1] * np.sqrt(n)))


def _moments(probs: np.ndarray, N_ref: int) -> tuple[float, float]:
    # moments of the offset, so large N_ref does not cancel in the variance
    total = probs.sum(axis=-1)
    m = np.arange(probs.shape[-1])
    mean_m = (probs @ m) / total
    var_m = (probs @ (m * m)) / total - mean_m**2
    return N_ref - mean_m, np.maximum(var_m, 0.0)


def number_moments(state: OffsetFockVector) -> tuple[float, float]:
    """Return ``(<N>, <δN^2>)`` of a state."""
    mean, var = _moments(state.probabilities(), state.N_ref)
    return float(mean), float(var)


def _phase_expectations(amps: np.ndarray, N_ref: int) -> np.ndarray:
    """Rows of (cos, sin, cos2, sin2) for a stack of amplitude vectors.

    The cosine/sine operators couple |n> and |n-1> with weight 1/2 once the
    sqrt(n+1) factors cancel against the ladder factors, so E = Σ|n-1><n|
    is a plain offset shift. Padding by one slot each side keeps E and E†
    exact for every stored amplitude.
    """
    M_max = amps.shape[-1] - 1
    if N_ref - M_max < 1:
        raise RegimeError(
            f"phase operators need support away from the vacuum (N_ref - M_max = {N_ref - M_max} < 1)"
        )
    pad = np.zeros(amps.shape[:-1] + (amps.shape[-1] + 2,), dtype=complex)
    pad[..., 1:-1] = amps
    E = np.zeros_like(pad)
    E[..., 1:] = pad[..., :-1]  # n -> n - 1 is offset m -> m + 1
    Ed = np.zeros_like(pad)
    Ed[..., :-1] = pad[..., 1:]
    e_mean = np.sum(np.conj(pad) * E, axis=-1)
    cos_psi = (E + Ed) / 2
    sin_psi = (E - Ed) / 2j
    return np.stack(
        [
            e_mean.real,
            e_mean.imag,
            np.sum(np.abs(cos_psi) ** 2, axis=-1),
            np.sum(np.abs(sin_psi) ** 2, axis=-1),
        ],
        axis=-1,
    )


def phase_operator_expectations(state: OffsetFockVector) -> PhaseExpectations:
    return PhaseExpectations(*map(float, _phase_expectations(state.amps, state.N_ref)))


class DensityMixture:
    """Classical mixture Σ w_i |psi_i><psi_i| over a shared offset window.

    Element amplitudes are held as rows of a 2-d array.
    """

    def __init__(self, weights, amps, N_ref: int):
        weights = np.array(weights, dtype=float)
        amps = np.array(amps, dtype=complex)
        if amps.ndim == 1:
            amps = amps[None, :]
        if weights.ndim != 1 or weights.shape[0] != amps.shape[0]:
            raise ValidationError("weights and states must have matching lengths")
        if np.any(weights < 0):
            raise ValidationError("mixture weights must be non-negative")
        total = weights.sum()
        if abs(total - 1) > NORM_TOL:
            raise ValidationError(f"mixture weights sum to {total!r}, not 1")
        if amps.shape[1] - 1 > N_ref:
            raise ValidationError("M_max exceeds N_ref")
        self.weights = weights / total
        self.amps = amps
        self.N_ref = int(N_ref)
        self.weights.flags.writeable = False
        self.amps.flags.writeable = False

    @classmethod
    def from_elements(cls, elements) -> "DensityMixture":
        elements = list(elements)
        if not elements:
            raise ValidationError("empty mixture")
        first = elements[0][1]
        for _, s in elements[1:]:
            _check_same_basis(first, s)
        return cls([w for w, _ in elements], np.stack([s.amps for _, s in elements]), first.N_ref)

    @classmethod
    def diagonal(cls, probs, N_ref: int) -> "DensityMixture":
        """Mixture of number states |N_ref - m> with weights ``probs[m]``."""
        probs = np.asarray(probs, dtype=float)
        keep = np.flatnonzero(probs > 0)
        amps = np.zeros((keep.size, probs.size), dtype=complex)
        amps[np.arange(keep.size), keep] = 1.0
        return cls(probs[keep], amps, N_ref)

    @property
    def M_max(self) -> int:
        return self.amps.shape[1] - 1

    def __len__(self):
        return self.weights.size

    @property
    def elements(self) -> list[tuple[float, OffsetFockVector]]:
        return [(float(w), OffsetFockVector(self.N_ref, a)) for w, a in zip(self.weights, self.amps)]

    def number_distribution(self) -> np.ndarray:
        """P(offset m) = Σ_i w_i |c_{i,m}|^2."""
        return self.weights @ (np.abs(self.amps) ** 2)

    def is_diagonal(self) -> bool:
        return bool(np.all(np.count_nonzero(self.amps, axis=1) <= 1))


def mixture_number_moments(mix: DensityMixture) -> tuple[float, float]:
    mean, var = _moments(mix.number_distribution(), mix.N_ref)
    return float(mean), float(var)


def mixture_phase_expectations(mix: DensityMixture) -> PhaseExpectations:
    rows = _phase_expectations(mix.amps, mix.N_ref)
    return PhaseExpectations(*map(float, mix.weights @ rows))


def element_phase_expectations(mix: DensityMixture) -> np.ndarray:
    """Per-element (cos, sin, cos2, sin2) as an array of shape (len(mix), 4)."""
    return _phase_expectations(mix.amps, mix.N_ref)


def to_dense(mix: DensityMixture) -> np.ndarray:
    """Density matrix in the offset basis; row/column m is |N_ref - m>."""
    a = mix.amps
    rho = (a.T * mix.weights) @ a.conj()
    return (rho + rho.conj().T) / 2


def pure_density(state: OffsetFockVector) -> np.ndarray:
    return np.outer(state.amps, state.amps.conj())


def check_density_matrix(rho: np.ndarray, atol: float = 1e-12, psd_tol: float = 1e-10):
    """Raise ValidationError unless ``rho`` is Hermitian, unit trace and PSD."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValidationError("density matrix must be square")
    if not np.allclose(rho, rho.conj().T, rtol=0, atol=atol):
        raise ValidationError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1) > atol:
        raise ValidationError(f"density matrix trace is {tr!r}")
    lo = np.linalg.eigvalsh(rho).min()
    if lo < -psd_tol:
        raise ValidationError(f"density matrix has negative eigenvalue {lo:.3e}")


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ rho)))


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """(1/2) Σ |eigenvalues(a - b)|."""
    if a.shape != b.shape:
        raise ValidationError(f"shape mismatch {a.shape} vs {b.shape}")
    diff = a - b
    diff = (diff + diff.conj().T) / 2
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff))))
