"""Constructive matrix transforms: symmetrization, Gaussian multipliers,
magnitude truncation and the dyadic decomposition into sparse levels.

Band conventions: level 0 keeps ``|a| in [0, 1]``; level ``k >= 1`` keeps
``|a| in (2**(k-1), 2**k]`` and stores it divided by ``2**k``.  The bands are
disjoint, so reconstruction adds exactly one nonzero per entry and is exact
in floating point.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .matrix import ColumnProfile, DimensionError
from .seeding import make_rng


def symmetrize(a, a_prime, signs_seed: int | None = None, signs=None) -> np.ndarray:
    """Entrywise ``eps_ij * (a_ij - a'_ij)`` with independent random signs.

    Pass ``signs`` to fix the sign pattern instead of drawing it.
    """
    a = np.asarray(a, dtype=np.float64)
    a_prime = np.asarray(a_prime, dtype=np.float64)
    if a.shape != a_prime.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {a_prime.shape}")
    if signs is None:
        if signs_seed is None:
            raise ValueError("need signs_seed or signs")
        signs = 2.0 * make_rng(signs_seed).integers(0, 2, size=a.shape) - 1.0
    return np.asarray(signs, dtype=np.float64) * (a - a_prime)


def gaussianize(a, gauss_seed: int) -> np.ndarray:
    """Entrywise ``g_ij * a_ij`` with independent standard normals."""
    a = np.asarray(a, dtype=np.float64)
    return make_rng(gauss_seed).standard_normal(a.shape) * a


def truncate(a, lo: float, hi: float, include_lo: bool = False) -> np.ndarray:
    """Keep entries with ``|a_ij|`` in ``(lo, hi]`` (``[lo, hi]`` if
    ``include_lo``), zero the rest.  ``hi`` may be ``inf``."""
    if not lo < hi:
        raise ValueError(f"need lo < hi, got ({lo}, {hi}]")
    a = np.asarray(a, dtype=np.float64)
    mag = np.abs(a)
    keep = (mag >= lo if include_lo else mag > lo) & (mag <= hi)
    return np.where(keep, a, 0.0)


def magnitude_cap(m_scale: float, n: int, N: int, exponent: float) -> float:
    """``(M n / log(2N)) ** (1 / exponent)``, the entry bound under which the
    dyadic decomposition is finite."""
    return (m_scale * n / math.log(2 * N)) ** (1.0 / exponent)


def top_level(cap: float) -> int:
    """Largest integer ``k0`` with ``2**(k0 - 1) <= cap``."""
    if cap < 0.5:
        raise ValueError(f"cap {cap} is below 1/2; no admissible level")
    k0 = int(math.floor(math.log2(cap))) + 1
    while 2.0 ** (k0 - 1) > cap:
        k0 -= 1
    while 2.0**k0 <= cap:
        k0 += 1
    return k0


@dataclass(frozen=True)
class DyadicDecomposition:
    level0: np.ndarray
    levels: list  # [(k, A_k)] for k = 1..k0
    k0: int
    eps: float
    exponent: float
    level_sparsity: np.ndarray  # nonzero fraction of A_k, k = 1..k0

    def reconstruct(self) -> np.ndarray:
        out = self.level0.copy()
        for k, ak in self.levels:
            out = out + (2.0**k) * ak
        return out

    def predicted_sparsity(self) -> np.ndarray:
        """``p_k = 2 ** (-(2 + eps)(k - 1))`` (with the configured exponent)."""
        ks = np.arange(1, self.k0 + 1)
        return 2.0 ** (-self.exponent * (ks - 1))

    def summary_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "nonzero_fraction", "predicted_p_k"])
        for k, frac, pk in zip(range(1, self.k0 + 1), self.level_sparsity, self.predicted_sparsity()):
            w.writerow([k, f"{frac:.17g}", f"{pk:.17g}"])
        return buf.getvalue()


def dyadic_decompose(a, m_scale: float, eps: float, exponent: float | None = None) -> DyadicDecomposition:
    """Split ``a`` (``N x n``) into ``A0 + sum_k 2**k A_k``.

    ``exponent`` defaults to ``2 + eps``; the almost-square reduction uses
    ``2 + eps/4``.  Every entry must satisfy
    ``|a_ij| <= (m_scale * n / log(2N)) ** (1/exponent)``.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if m_scale < 1:
        raise ValueError("m_scale must be >= 1")
    a = np.asarray(a, dtype=np.float64)
    N, n = a.shape
    exponent = 2.0 + eps if exponent is None else float(exponent)
    cap = magnitude_cap(m_scale, n, N, exponent)
    mag = np.abs(a)
    worst = np.unravel_index(int(np.argmax(mag)), a.shape)
    if mag[worst] > cap:
        raise ValueError(
            f"entry a[{worst[0]}, {worst[1]}] = {a[worst]!r} exceeds the magnitude cap "
            f"(M n / log 2N)^(1/{exponent:g}) = {cap!r}"
        )
    k0 = top_level(max(cap, 1.0))
    level0 = truncate(a, 0.0, 1.0, include_lo=True)
    levels, frac = [], []
    for k in range(1, k0 + 1):
        ak = truncate(a, 2.0 ** (k - 1), 2.0**k) * 2.0 ** (-k)
        levels.append((k, ak))
        frac.append(np.count_nonzero(ak) / ak.size)
    return DyadicDecomposition(level0, levels, k0, eps, exponent, np.array(frac))


@dataclass(frozen=True)
class RowColBounds:
    max_abs_entry: float
    max_row_norm: float
    max_col_weighted_norm: float
    implied_k: float


def row_col_bounds(a, b_profile: ColumnProfile, p: float) -> RowColBounds:
    """Row norms of ``a`` and column norms weighted by ``||B_i||``.

    ``implied_k`` is the smallest ``K`` satisfying both
    ``max_i ||row_i|| <= K sqrt(n p + log 2N)`` and
    ``max_j (sum_i a_ij^2 ||B_i||^2)^(1/2) <= K sqrt(n p + log 2n)``.
    The entry condition ``max |a_ij| <= 1`` carries no ``K`` and is reported
    separately as ``max_abs_entry``.
    """
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    a = np.asarray(a, dtype=np.float64)
    N, n = a.shape
    bn = np.asarray(b_profile.norms, dtype=np.float64)
    if bn.shape != (N,):
        raise DimensionError(f"B has {bn.size} columns but A has {N} rows")
    sq = a * a
    max_abs = float(np.max(np.abs(a)))
    max_row = float(np.sqrt(np.max(np.sum(sq, axis=1))))
    max_col = float(np.sqrt(np.max(bn**2 @ sq)))
    k = max(max_row / math.sqrt(n * p + math.log(2 * N)), max_col / math.sqrt(n * p + math.log(2 * n)))
    return RowColBounds(max_abs, max_row, max_col, k)


def implied_m_scale(a, eps: float) -> float:
    """The ``M`` solving ``max |a_ij| = (M n / log 2N) ** (1/(2 + eps/4))``."""
    a = np.asarray(a, dtype=np.float64)
    N, n = a.shape
    return float(np.max(np.abs(a))) ** (2.0 + eps / 4.0) * math.log(2 * N) / n
