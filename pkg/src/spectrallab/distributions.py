"""Symmetric entry laws for the random factor A, with closed-form moments.

Each :class:`EntryDistribution` is a raw law (``kind`` + ``params``) and a
normalization mode applied as a scalar factor:

``"none"``
    raw samples.
``"unit_variance"``
    scaled so that ``E X^2 = 1``.
``"unit_moment:<r>"``
    scaled so that ``E |X|^r = 1`` (``r = 4 + eps`` for the main bound).

Supported kinds and their parameters::

    gaussian                          -
    rademacher                        -
    sparse_sign        p in (0, 1]    values in {-1, 0, 1}, P(X != 0) = p
    symmetric_pareto   alpha > 2, scale > 0
                                      density ~ |x|^(-alpha-1) on |x| >= scale
    student_t          nu > 2
    bounded_uniform    half_width > 0
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .seeding import make_rng

KINDS = (
    "gaussian",
    "rademacher",
    "sparse_sign",
    "symmetric_pareto",
    "student_t",
    "bounded_uniform",
)


@dataclass(frozen=True)
class EntryDistribution:
    kind: str
    params: dict = field(default_factory=dict)
    normalization: str = "none"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}; expected one of {KINDS}")
        object.__setattr__(self, "params", dict(self.params))
        _check_params(self.kind, self.params)
        _parse_normalization(self.normalization)

    def with_normalization(self, normalization: str) -> "EntryDistribution":
        return EntryDistribution(self.kind, dict(self.params), normalization)

    @property
    def scale(self) -> float:
        """Factor multiplying raw samples under the configured normalization."""
        mode, order = _parse_normalization(self.normalization)
        if mode == "none":
            return 1.0
        if mode == "unit_variance":
            order = 2.0
        mom = raw_abs_moment(self.kind, self.params, order)
        if not math.isfinite(mom):
            raise ValueError(
                f"cannot normalize {self.kind} to unit {order}-th moment: moment is infinite"
            )
        return mom ** (-1.0 / order)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params), "normalization": self.normalization}

    @classmethod
    def from_dict(cls, obj: dict) -> "EntryDistribution":
        unknown = set(obj) - {"kind", "params", "normalization"}
        if unknown:
            raise ValueError(f"unexpected keys in distribution object: {sorted(unknown)}")
        return cls(obj["kind"], dict(obj.get("params", {})), obj.get("normalization", "none"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "EntryDistribution":
        return cls.from_dict(json.loads(text))


def _parse_normalization(norm: str):
    if norm in ("none", "unit_variance"):
        return norm, None
    if norm.startswith("unit_moment:"):
        order = float(norm.split(":", 1)[1])
        if not order > 0:
            raise ValueError(f"moment order must be positive in {norm!r}")
        return "unit_moment", order
    raise ValueError(f"unknown normalization {norm!r}")


def _check_params(kind: str, params: dict) -> None:
    def need(name, ok, msg):
        if name not in params:
            raise ValueError(f"{kind} requires parameter {name!r}")
        if not ok(params[name]):
            raise ValueError(f"{kind}: {name}={params[name]!r} {msg}")

    if kind == "sparse_sign":
        need("p", lambda p: 0 < p <= 1, "must lie in (0, 1]")
    elif kind == "symmetric_pareto":
        need("alpha", lambda a: a > 2, "must exceed 2")
        params.setdefault("scale", 1.0)
        need("scale", lambda s: s > 0, "must be positive")
    elif kind == "student_t":
        need("nu", lambda v: v > 2, "must exceed 2")
    elif kind == "bounded_uniform":
        need("half_width", lambda h: h > 0, "must be positive")


def raw_abs_moment(kind: str, params: dict, order: float) -> float:
    """``E |X|^order`` of the raw (unnormalized) law; ``inf`` when divergent."""
    q = float(order)
    if kind == "gaussian":
        return 2.0 ** (q / 2) * math.gamma((q + 1) / 2) / math.sqrt(math.pi)
    if kind == "rademacher":
        return 1.0
    if kind == "sparse_sign":
        return float(params["p"])
    if kind == "symmetric_pareto":
        a, x0 = float(params["alpha"]), float(params["scale"])
        return a * x0**q / (a - q) if q < a else math.inf
    if kind == "student_t":
        nu = float(params["nu"])
        if q >= nu:
            return math.inf
        return math.exp(
            (q / 2) * math.log(nu)
            + math.lgamma((q + 1) / 2)
            + math.lgamma((nu - q) / 2)
            - 0.5 * math.log(math.pi)
            - math.lgamma(nu / 2)
        )
    if kind == "bounded_uniform":
        return float(params["half_width"]) ** q / (q + 1)
    raise ValueError(kind)


def abs_moment(d: EntryDistribution, order: float) -> float:
    """``E |X|^order`` under the normalization of ``d``."""
    raw = raw_abs_moment(d.kind, d.params, order)
    return raw if not math.isfinite(raw) else d.scale**order * raw


def raw_bound(kind: str, params: dict) -> float:
    if kind in ("rademacher", "sparse_sign"):
        return 1.0
    if kind == "bounded_uniform":
        return float(params["half_width"])
    return math.inf


@dataclass(frozen=True)
class MomentProfile:
    variance: float
    fourth_moment: float
    four_plus_eps_moment: float
    eps: float
    bound: float


def theoretical_profile(d: EntryDistribution, eps: float = 0.5) -> MomentProfile:
    """Exact moments of ``d`` (after normalization); divergent ones are ``inf``."""
    if not 0 < eps:
        raise ValueError("eps must be positive")
    b = raw_bound(d.kind, d.params)
    return MomentProfile(
        variance=abs_moment(d, 2.0),
        fourth_moment=abs_moment(d, 4.0),
        four_plus_eps_moment=abs_moment(d, 4.0 + eps),
        eps=eps,
        bound=b * d.scale if math.isfinite(b) else math.inf,
    )


def _raw_samples(kind: str, params: dict, size, rng: np.random.Generator) -> np.ndarray:
    if kind == "gaussian":
        return rng.standard_normal(size)
    if kind == "rademacher":
        return 2.0 * rng.integers(0, 2, size=size) - 1.0
    if kind == "sparse_sign":
        p = float(params["p"])
        u = rng.random(size)
        out = np.zeros(size)
        out[u < p / 2] = -1.0
        out[(u >= p / 2) & (u < p)] = 1.0
        return out
    if kind == "symmetric_pareto":
        a, x0 = float(params["alpha"]), float(params["scale"])
        u = 1.0 - rng.random(size)  # in (0, 1]
        sign = 2.0 * rng.integers(0, 2, size=size) - 1.0
        return sign * x0 * u ** (-1.0 / a)
    if kind == "student_t":
        return rng.standard_t(float(params["nu"]), size=size)
    if kind == "bounded_uniform":
        h = float(params["half_width"])
        return rng.uniform(-h, h, size=size)
    raise ValueError(kind)


def sample(d: EntryDistribution, size, rng: np.random.Generator) -> np.ndarray:
    x = _raw_samples(d.kind, d.params, size, rng)
    s = d.scale
    return x if s == 1.0 else x * s


def sample_matrix(d: EntryDistribution, rows: int, cols: int, seed: int) -> np.ndarray:
    """``rows x cols`` matrix of i.i.d. entries from ``d``; bit-identical per seed."""
    if rows < 1 or cols < 1:
        raise ValueError(f"dimensions must be positive, got {rows}x{cols}")
    return sample(d, (rows, cols), make_rng(seed))


def empirical_moment(d: EntryDistribution, order: float, trials: int, seed: int) -> float:
    """Monte Carlo mean of ``|X|^order`` over ``trials`` draws."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    x = sample(d, trials, make_rng(seed))
    return float(np.mean(np.abs(x) ** order))
