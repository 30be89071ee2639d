"""Dense real matrices and the column/norm bookkeeping shared by every module.

Matrices are plain ``float64`` numpy arrays.  :func:`as_matrix` is the single
constructor: it copies, coerces to 2-D and refuses non-finite entries so that
a NaN produced deep inside a Monte Carlo run fails at the boundary instead of
silently poisoning a ratio.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


class DimensionError(ValueError):
    """Raised when operand shapes are incompatible."""


class InvariantViolation(ValueError):
    """Raised when a computed object breaks one of its stated inequalities."""


def as_matrix(data) -> np.ndarray:
    """Return a finite, C-contiguous ``float64`` 2-D copy of ``data``.

    Scalars become 1x1 and 1-D input becomes a single column.
    """
    arr = np.array(data, dtype=np.float64, order="C", copy=True)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    elif arr.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"matrix dimensions must be positive, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        bad = tuple(int(i) for i in np.argwhere(~np.isfinite(arr))[0])
        raise ValueError(f"non-finite entry {arr[bad]} at position {bad}")
    return arr


def multiply(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply shapes {a.shape} and {b.shape}")
    return a @ b


def hilbert_schmidt_norm(m) -> float:
    """Square root of the sum of squared entries (Frobenius norm)."""
    m = np.asarray(m, dtype=np.float64)
    return float(np.sqrt(np.sum(m * m)))


def gram(m) -> np.ndarray:
    """Return ``m.T @ m``, symmetrized so that it is exactly symmetric."""
    m = np.asarray(m, dtype=np.float64)
    g = m.T @ m
    return 0.5 * (g + g.T)


def column_norms(m) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    return np.sqrt(np.sum(m * m, axis=0))


@dataclass(frozen=True)
class ColumnProfile:
    """Euclidean column norms of a matrix together with its HS norm and an
    operator-norm upper bound supplied by the caller."""

    norms: np.ndarray
    hs_norm: float
    operator_norm_upper: float

    @property
    def max_norm(self) -> float:
        return float(self.norms.max()) if self.norms.size else 0.0


def column_profile(m, operator_norm: float, rtol: float = 1e-12) -> ColumnProfile:
    """Column norms, HS norm and the caller's bound on the operator norm.

    Checks that ``hs**2 == sum(norms**2)`` and that no column is longer than
    the operator norm; raises :class:`InvariantViolation` otherwise.  The
    second check is what flags an ``operator_norm`` that is not actually an
    upper bound.
    """
    m = np.asarray(m, dtype=np.float64)
    if operator_norm < 0:
        raise ValueError("operator_norm must be non-negative")
    norms = column_norms(m)
    hs = hilbert_schmidt_norm(m)
    total = float(np.sum(norms**2))
    if abs(hs**2 - total) > rtol * max(total, np.finfo(float).tiny):
        raise InvariantViolation(
            f"||m||_HS^2 = {hs**2!r} differs from sum of squared column norms {total!r}"
        )
    top = float(norms.max())
    if top > operator_norm * (1.0 + 1e-10) + 1e-300:
        col = int(norms.argmax())
        raise InvariantViolation(
            f"max_i ||m_i||_2 <= ||m|| violated: column {col} has norm {top!r} "
            f"> operator norm bound {operator_norm!r}"
        )
    return ColumnProfile(norms=norms, hs_norm=hs, operator_norm_upper=float(operator_norm))


# -- plain-text serialization ----------------------------------------------
#
# First line "rows cols", then one whitespace-separated row per line.  17
# significant digits round-trip every float64 exactly.

def format_matrix(m) -> str:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {m.shape}")
    lines = [f"{m.shape[0]} {m.shape[1]}"]
    lines.extend(" ".join(f"{v:.17g}" for v in row) for row in m)
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> np.ndarray:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix text")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f"bad header line {lines[0]!r}; expected 'rows cols'")
    rows, cols = int(header[0]), int(header[1])
    body = lines[1:]
    if len(body) != rows:
        raise ValueError(f"header declares {rows} rows, found {len(body)}")
    values = []
    for i, ln in enumerate(body):
        parts = ln.split()
        if len(parts) != cols:
            raise ValueError(f"row {i} has {len(parts)} entries, expected {cols}")
        values.append([float(v) for v in parts])
    return as_matrix(values)


def save_matrix(path, m) -> None:
    Path(path).write_text(format_matrix(m))


def load_matrix(path) -> np.ndarray:
    return parse_matrix(Path(path).read_text())
