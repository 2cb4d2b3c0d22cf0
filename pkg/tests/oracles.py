"""Brute-force reference computations, kept independent of the package code paths."""

import math

import numpy as np


def full_b(n_max):
    """Annihilation operator on the full Fock space |0>..|n_max>."""
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1).astype(complex)


def full_cos_sin(n_max):
    """Cosine and sine operators from their defining formulas, with explicit 1/sqrt(b†b + 1)."""
    b = full_b(n_max)
    bd = b.conj().T
    inv = np.diag(1 / np.sqrt(np.diag(bd @ b).real + 1))
    cos = inv @ b / 2 + bd @ inv / 2
    sin = inv @ b / 2j - bd @ inv / 2j
    return cos, sin


def embed(state, n_max):
    """Offset-indexed amplitudes placed into a full Fock vector indexed by n."""
    v = np.zeros(n_max + 1, dtype=complex)
    for m, c in enumerate(state.amps):
        v[state.N_ref - m] = c
    return v


def expect(op, v):
    return complex(np.vdot(v, op @ v))


def poisson_pmf(m, lam):
    return math.exp(-lam) * lam**m / math.factorial(m)


def coherent_full(alpha, n_max):
    v = np.array([alpha**n / math.sqrt(math.factorial(n)) for n in range(n_max + 1)], dtype=complex)
    return v * math.exp(-abs(alpha) ** 2 / 2)
