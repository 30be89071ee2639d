"""Deterministic factors B (``n x N``, ``||B|| <= 1``) and the large/small
column split used to reduce the general bound to two easier regimes."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .matrix import column_norms
from .seeding import make_rng

KINDS = (
    "identity",
    "zero",
    "orthogonal_projection",
    "row_selection",
    "diagonal_column_norms",
    "scaled_random_orthonormal_rows",
)


class InfeasibleProfile(ValueError):
    """Requested column norms cannot be realized with ``||B|| <= 1``."""


@dataclass(frozen=True)
class BFactorSpec:
    """Recipe for an ``n x N`` factor.

    params by kind:

    * ``identity`` / ``zero``: none (identity is ``eye(n, N)``).
    * ``orthogonal_projection``: ``rank`` (default ``n``); orthonormal rows
      from a seeded Gaussian matrix, padded with zero rows.
    * ``row_selection``: optional ``rows`` (list of N-indices); otherwise
      ``n`` distinct rows of ``I_N`` chosen from the seed.
    * ``diagonal_column_norms``: ``norms`` (length N) or a constant ``value``;
      each column has a single nonzero entry.
    * ``scaled_random_orthonormal_rows``: ``scale`` in (0, 1].
    """

    kind: str
    n: int
    N: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown B kind {self.kind!r}; expected one of {KINDS}")
        if self.n < 1 or self.N < 1:
            raise ValueError(f"dimensions must be positive, got {self.n}x{self.N}")
        object.__setattr__(self, "params", dict(self.params))

    def resized(self, n: int, N: int) -> "BFactorSpec":
        return BFactorSpec(self.kind, n, N, self.params)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "n": self.n, "N": self.N, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, obj: dict) -> "BFactorSpec":
        return cls(obj["kind"], int(obj["n"]), int(obj["N"]), dict(obj.get("params", {})))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "BFactorSpec":
        return cls.from_dict(json.loads(text))


def _orthonormal_rows(r: int, N: int, rng) -> np.ndarray:
    q, _ = np.linalg.qr(rng.standard_normal((N, r)))
    return q.T


def _diagonal_layout(norms: np.ndarray, n: int) -> np.ndarray:
    if np.any(norms < 0):
        raise InfeasibleProfile("column norms must be non-negative")
    if np.any(norms > 1.0):
        i = int(np.argmax(norms))
        raise InfeasibleProfile(
            f"column {i} has prescribed norm {norms[i]!r} > 1, impossible since "
            "max_i ||B_i||_2 <= ||B|| <= 1"
        )
    # longest-processing-time packing of squared norms into n rows;
    # ||B||^2 is the largest row load
    load = np.zeros(n)
    rows = np.empty(norms.size, dtype=int)
    for i in np.argsort(-norms, kind="stable"):
        k = int(np.argmin(load))
        rows[i] = k
        load[k] += norms[i] ** 2
    if load.max() > 1.0 + 1e-12:
        raise InfeasibleProfile(
            f"column norms need a row of squared mass {load.max():.6g} > 1; "
            f"sum of squared norms is {np.sum(norms**2):.6g} against ||B||_HS^2 <= n = {n}"
        )
    b = np.zeros((n, norms.size))
    b[rows, np.arange(norms.size)] = norms
    return b


def build_b(spec: BFactorSpec, seed: int = 0) -> np.ndarray:
    n, N, prm = spec.n, spec.N, spec.params
    rng = make_rng(seed)
    if spec.kind == "identity":
        return np.eye(n, N)
    if spec.kind == "zero":
        return np.zeros((n, N))
    if spec.kind == "orthogonal_projection":
        r = int(prm.get("rank", n))
        if not 0 <= r <= min(n, N):
            raise ValueError(f"rank {r} must lie in [0, min(n, N)] = [0, {min(n, N)}]")
        b = np.zeros((n, N))
        if r:
            b[:r] = _orthonormal_rows(r, N, rng)
        return b
    if spec.kind == "row_selection":
        if n > N:
            raise ValueError("row selection needs n <= N")
        rows = prm.get("rows")
        rows = np.sort(rng.choice(N, size=n, replace=False)) if rows is None else np.asarray(rows)
        if rows.shape != (n,) or len(set(rows.tolist())) != n:
            raise ValueError("rows must list n distinct indices")
        return np.eye(N)[rows]
    if spec.kind == "diagonal_column_norms":
        if "norms" in prm:
            norms = np.asarray(prm["norms"], dtype=np.float64)
            if norms.shape != (N,):
                raise ValueError(f"expected {N} column norms, got {norms.shape}")
        else:
            norms = np.full(N, float(prm["value"]))
        return _diagonal_layout(norms, n)
    if spec.kind == "scaled_random_orthonormal_rows":
        if n > N:
            raise ValueError("orthonormal rows need n <= N")
        scale = float(prm.get("scale", 1.0))
        if not 0 < scale <= 1:
            raise ValueError("scale must lie in (0, 1]")
        return scale * _orthonormal_rows(n, N, rng)
    raise ValueError(spec.kind)


def split_threshold(n: int, eps: float, c0_eps: float = 1.0) -> float:
    """``c0_eps * log(2n) ** -(1/2 + 1/eps)``."""
    K = 0.5 + 1.0 / eps
    return c0_eps * math.log(2 * n) ** (-K)


def split_cardinality_bound(n: int, eps: float, c0_eps: float = 1.0) -> float:
    """``c0_eps**-2 * n * log(2n) ** (2K)``: Markov applied to ``||B||_HS^2 <= n``."""
    K = 0.5 + 1.0 / eps
    return c0_eps**-2 * n * math.log(2 * n) ** (2 * K)


def column_split(b, eps: float, c0_eps: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Indices of columns longer than :func:`split_threshold` and the rest.

    ``n`` is the number of rows of ``b``.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    b = np.asarray(b, dtype=np.float64)
    thr = split_threshold(b.shape[0], eps, c0_eps)
    large = column_norms(b) > thr
    return np.flatnonzero(large), np.flatnonzero(~large)
