"""eps-nets of the sphere and the structured vector classes used to discretize
suprema of ``||B A x||``: sparse vectors, spread vectors and the level nets of
vectors whose nonzero coordinates all share one magnitude.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .seeding import make_rng

SPHERE_NET_MAX_DIM = 14
LEVEL_NET_MAX_POINTS = 10**6


def net_cardinality_bound(n: int, eps: float) -> float:
    """Volumetric bound ``(1 + 2/eps)**n``."""
    return (1.0 + 2.0 / eps) ** n


@dataclass(frozen=True)
class SphereNet:
    dimension: int
    eps: float
    points: np.ndarray

    def __len__(self):
        return len(self.points)


def _random_unit(rng, count: int, n: int) -> np.ndarray:
    x = rng.standard_normal((count, n))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def build_sphere_net(
    n: int,
    eps: float,
    seed: int = 0,
    cloud_size: int | None = None,
    shrink: float = 0.9,
) -> SphereNet:
    """Greedy farthest-point eps-net of the unit sphere in ``R^n``.

    Points are picked from a random cloud (plus the signed basis vectors)
    until every cloud point lies within ``shrink * eps`` of the net.  The
    margin ``1 - shrink`` absorbs the gaps between cloud points; coverage of
    the whole sphere is then audited by :func:`coverage_radius`.  The result
    is ``shrink * eps``-separated, and its size is checked against
    ``(1 + 2/eps)**n``.
    """
    if n < 1 or n > SPHERE_NET_MAX_DIM:
        raise ValueError(f"sphere nets are built only for 1 <= n <= {SPHERE_NET_MAX_DIM}, got {n}")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if cloud_size is None:
        cloud_size = 2000 if n == 1 else min(20000 * n, 200000)
    rng = make_rng(seed)
    basis = np.vstack([np.eye(n), -np.eye(n)])
    cloud = np.vstack([basis, _random_unit(rng, cloud_size, n)])

    radius = shrink * eps
    # track the best inner product instead of the distance: on the sphere
    # |x - y|^2 = 2 - 2<x, y>
    cos_min = 1.0 - 0.5 * radius**2
    chosen = [0]
    best = cloud @ cloud[0]
    while True:
        j = int(np.argmin(best))
        if best[j] >= cos_min:
            break
        chosen.append(j)
        np.maximum(best, cloud @ cloud[j], out=best)

    points = cloud[chosen]
    bound = net_cardinality_bound(n, eps)
    if len(points) > bound:
        raise RuntimeError(f"net has {len(points)} points, exceeding (1+2/eps)^n = {bound:g}")
    return SphereNet(n, eps, points)


def coverage_radius(points, trials: int = 1000, seed: int = 1) -> float:
    """Largest distance from ``trials`` random unit vectors to the nearest
    net point; an eps-net should give a value <= eps."""
    points = np.asarray(points, dtype=np.float64)
    x = _random_unit(make_rng(seed), trials, points.shape[1])
    # |x - y|^2 = 2 - 2<x, y> on the sphere
    best = np.max(x @ points.T, axis=1)
    return float(np.sqrt(np.max(np.clip(2.0 - 2.0 * best, 0.0, None))))


# -- structured vector classes ---------------------------------------------

def sparse_budget(n: int, p: float, c: float = 0.25) -> int:
    """Support size ``floor(c n p / log(e/p))`` of the sparse class."""
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    return int(math.floor(c * n * p / math.log(math.e / p)))


def spread_threshold(p: float, c: float = 0.25) -> float:
    """``M = sqrt(log(e/p) / (c p))``, the split level between sparse and
    spread coordinates; ``>= 2`` whenever ``c <= 1/4``."""
    return math.sqrt(math.log(math.e / p) / (c * p))


@dataclass(frozen=True)
class VectorClass:
    """Membership oracle for the sparse ball, the spread ball and level nets.

    ``kind`` is ``"sparse"`` (params ``p``, optional ``c``), ``"spread"``
    (param ``M``) or ``"level"`` (param ``k``; ``h = 2**k / sqrt(n)``).
    """

    kind: str
    n: int
    params: dict = field(default_factory=dict)

    def contains(self, x, atol: float = 1e-12) -> bool:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n,) or np.linalg.norm(x) > 1.0 + atol:
            return False
        if self.kind == "sparse":
            s = sparse_budget(self.n, self.params["p"], self.params.get("c", 0.25))
            return int(np.count_nonzero(x)) <= s
        if self.kind == "spread":
            return float(np.max(np.abs(x))) <= self.params["M"] / math.sqrt(self.n) + atol
        if self.kind == "level":
            h = level_height(self.n, self.params["k"])
            nz = x[x != 0]
            return bool(np.all(np.abs(np.abs(nz) - h) <= atol)) and nz.size <= math.floor(h**-2 * (1.0 + 1e-12))
        raise ValueError(f"unknown vector class {self.kind!r}")


def level_height(n: int, k: float) -> float:
    return 2.0**k / math.sqrt(n)


def level_net_size(n: int, m: int) -> int:
    """``sum_{l=1}^{min(m,n)} C(n, l) 2**l``."""
    return sum(math.comb(n, l) * 2**l for l in range(1, min(m, n) + 1))


@dataclass(frozen=True)
class LevelNet:
    n: int
    h: float
    m: int
    points: np.ndarray
    cardinality_constant: float  # C with |N_k| = exp(C m log M)


def enumerate_vectors(n: int, h: float, m: int) -> np.ndarray:
    """Every vector with between 1 and ``min(m, n)`` nonzero coordinates, each
    equal to ``+-h``."""
    size = level_net_size(n, m)
    if size > LEVEL_NET_MAX_POINTS:
        raise ValueError(f"level net would have {size} points (guard {LEVEL_NET_MAX_POINTS})")
    blocks = []
    for l in range(1, min(m, n) + 1):
        supports = np.array(list(itertools.combinations(range(n), l)))
        signs = np.array(list(itertools.product((1.0, -1.0), repeat=l)))
        block = np.zeros((len(supports), len(signs), n))
        rows = np.arange(len(supports))[:, None, None]
        cols = np.arange(len(signs))[None, :, None]
        block[rows, cols, supports[:, None, :]] = h * signs[None, :, :]
        blocks.append(block.reshape(-1, n))
    return np.vstack(blocks) if blocks else np.zeros((0, n))


def enumerate_level_net(n: int, k: float, M: float) -> LevelNet:
    """All vectors of the level net at height ``h = 2**k / sqrt(n)``.

    The support bound is ``m = floor(h**-2)``.  ``cardinality_constant`` is
    the smallest ``C`` with ``|net| <= exp(C m log M)`` (needs ``M > 1``).
    """
    h = level_height(n, k)
    # h^-2 = n / 4^k; guard the floor against h being rounded up by one ulp
    m = int(math.floor(h**-2 * (1.0 + 1e-12)))
    if m < 1:
        raise ValueError(f"h = {h:g} > 1 leaves no admissible support size")
    pts = enumerate_vectors(n, h, m)
    const = math.log(len(pts)) / (m * math.log(M)) if M > 1 else math.inf
    return LevelNet(n, h, m, pts, const)


def classify_vector(x, M: float) -> tuple[np.ndarray, np.ndarray]:
    """Split ``x`` into coordinates above and at-or-below ``M / sqrt(n)``.

    Returns ``(y, z)`` with ``y + z == x`` exactly, ``||y||_0 <= n / M**2``
    and ``||z||_inf <= M / sqrt(n)``.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("x must be a vector")
    if np.linalg.norm(x) > 1.0 + 1e-12:
        raise ValueError("x must lie in the unit ball")
    n = x.size
    big = np.abs(x) > M / math.sqrt(n)
    y = np.where(big, x, 0.0)
    z = np.where(big, 0.0, x)
    return y, z
