"""Closed-form tail and moment bounds, and empirical tails to audit them.

Every bound is a :class:`TailBound`: a callable ``t -> P-bound`` clamped to
``[0, 1]``.  Absolute constants that the underlying inequalities only assert
to exist (``c0``, ``c``, ``C``) are explicit arguments.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .spectral import spectral_norm


@dataclass(frozen=True)
class TailBound:
    bound_fn: Callable[[np.ndarray], np.ndarray]
    constants: dict = field(default_factory=dict)
    source: str = ""

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.clip(self.bound_fn(t_arr), 0.0, 1.0)
        out = np.where(t_arr <= 0, 1.0, out)
        return float(out) if out.ndim == 0 else out


def bennett_h(u):
    u = np.asarray(u, dtype=np.float64)
    return (1.0 + u) * np.log1p(u) - u


def bennett_tail(sigma_sq: float) -> TailBound:
    """``P(S > t) <= exp(-sigma^2 h(t / sigma^2))`` for sums of independent
    centered summands bounded by 1 with total variance ``sigma_sq``."""
    if not sigma_sq > 0:
        raise ValueError("sigma_sq must be positive")
    s2 = float(sigma_sq)
    return TailBound(lambda t: np.exp(-s2 * bennett_h(t / s2)), {"sigma_sq": s2}, "bennett")


def gaussian_lipschitz_tail(lip: float, c0: float = 0.5) -> TailBound:
    """``P(f(g) - E f(g) > t) <= exp(-c0 t^2 / lip^2)``."""
    if not lip > 0:
        raise ValueError("lip must be positive")
    if not 0 < c0 < 1:
        raise ValueError("c0 must lie in (0, 1)")
    return TailBound(
        lambda t: np.exp(-c0 * t**2 / lip**2), {"lip": lip, "c0": c0}, "gaussian-concentration"
    )


def exponential_sum_tail(d, c0: float = 0.5) -> TailBound:
    """Bound on ``P(sqrt(sum d_i^2 g_i^2) > ||d||_2 + t)``.

    The statistic is ``||d||_inf``-Lipschitz in ``g`` and its mean is at most
    ``||d||_2``; ``constants["center"]`` holds ``||d||_2``.
    """
    d = np.asarray(d, dtype=np.float64).ravel()
    dinf = float(np.max(np.abs(d))) if d.size else 0.0
    if dinf == 0.0:
        raise ValueError("d must be nonzero")
    return TailBound(
        lambda t: np.exp(-c0 * t**2 / dinf**2),
        {"center": float(np.linalg.norm(d)), "lip": dinf, "c0": c0},
        "exponential-sum",
    )


def talagrand_tail(k_bound: float) -> TailBound:
    """``P(|f(X) - E f(X)| > s) <= 4 exp(-(s / K)^2 / 4)`` for convex
    1-Lipschitz ``f`` of independent coordinates bounded by ``K``.  The
    argument is the deviation ``s = K t``; the bound does not involve the
    dimension."""
    if not k_bound > 0:
        raise ValueError("k_bound must be positive")
    K = float(k_bound)
    return TailBound(lambda s: 4.0 * np.exp(-((s / K) ** 2) / 4.0), {"K": K}, "talagrand")


def moments_to_tail(m_param: float, c: float = 0.125) -> TailBound:
    """``P(X >= t) <= 2 m exp(-c t^2)`` for non-negative ``X`` with
    ``(E X^p)^(1/p) <= sqrt(p) + sqrt(log m)`` for all ``p >= 1``."""
    if m_param < 1:
        raise ValueError("m_param must be >= 1")
    return TailBound(
        lambda t: 2.0 * m_param * np.exp(-c * t**2), {"m": m_param, "c": c}, "moments-to-tail"
    )


def tensor_sum_norm(u) -> float:
    """``|| sum_i u_i (x) u_i ||`` for the rows ``u_i`` of ``u``; equals ``||u||^2``."""
    u = np.atleast_2d(np.asarray(u, dtype=np.float64))
    return spectral_norm(u).value ** 2


def rudelson_bound(u, p: float, big_c: float = 1.0) -> float:
    """``C (sqrt(p) + sqrt(log m)) max_i ||u_i||_2 || sum u_i (x) u_i ||^(1/2)``
    for vectors ``u_i`` in ``R^m`` given as the rows of ``u``."""
    u = np.atleast_2d(np.asarray(u, dtype=np.float64))
    if u.size == 0 or u.shape[0] == 0:
        raise ValueError("empty vector family")
    if p < 1:
        raise ValueError("p must be >= 1")
    m = u.shape[1]
    maxnorm = float(np.max(np.linalg.norm(u, axis=1)))
    return big_c * (math.sqrt(p) + math.sqrt(math.log(m))) * maxnorm * math.sqrt(tensor_sum_norm(u))


def truncation_bound(samples, m_cut: float, p: float) -> tuple[float, float]:
    """Empirical ``E X 1{X >= M}`` and ``E X^p / M^(p-1)``; the first never
    exceeds the second."""
    x = np.asarray(samples, dtype=np.float64)
    if np.any(x < 0):
        raise ValueError("samples must be non-negative")
    if p < 1 or m_cut <= 0:
        raise ValueError("need p >= 1 and m_cut > 0")
    lhs = float(np.mean(np.where(x >= m_cut, x, 0.0)))
    rhs = float(np.mean(x**p) / m_cut ** (p - 1))
    return lhs, rhs


def conditional_mean_check(samples, cutoff: float) -> tuple[float, float, float]:
    """``(E(X | X <= K), E X, standard error of E X)`` from samples.

    The conditional mean of a variable given that it is at most ``K`` never
    exceeds its mean.
    """
    x = np.asarray(samples, dtype=np.float64)
    below = x[x <= cutoff]
    cond = float(np.mean(below)) if below.size else -math.inf
    return cond, float(np.mean(x)), float(np.std(x, ddof=1) / math.sqrt(x.size))


# sum over the dyadic shells: sqrt(L) (1 + sum_{k>=1} 2^(1 - k/2)) = (3 + 2 sqrt 2) sqrt(L)
CONDITIONAL_EXP_CONSTANT = 3.0 + 2.0 * math.sqrt(2.0)


def conditional_exp_bound(K: float, L: float) -> float:
    """``E X <= C K sqrt(L)`` when ``E(X^2 | Y <= t) <= K^2 t`` and
    ``P(Y > L t) <= 1/t^2`` for all ``t >= 1``; ``C = 3 + 2 sqrt 2``."""
    return CONDITIONAL_EXP_CONSTANT * K * math.sqrt(L)


@dataclass(frozen=True)
class EmpiricalTail:
    samples: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "samples", np.sort(np.asarray(self.samples, dtype=np.float64)))

    @property
    def count(self) -> int:
        return int(self.samples.size)

    def exceedance(self, t):
        """``#{samples > t} / count``."""
        n_le = np.searchsorted(self.samples, t, side="right")
        return (self.count - n_le) / self.count


def domination_slack(bound_value, trials: int):
    """Monte Carlo allowance ``3 sqrt(bound / trials)``."""
    return 3.0 * np.sqrt(np.asarray(bound_value) / trials)


def audit_domination(bound: TailBound, tail: EmpiricalTail, ts) -> list[dict]:
    """One row per ``t``: bound, empirical exceedance and whether the bound
    dominates up to :func:`domination_slack`."""
    rows = []
    for t in ts:
        b = float(bound(t))
        e = float(tail.exceedance(t))
        rows.append(
            {
                "t": float(t),
                "bound": b,
                "empirical": e,
                "trials": tail.count,
                "ok": e <= b + float(domination_slack(b, tail.count)),
            }
        )
    return rows


def tabulate_csv(rows: list[dict]) -> str:
    """CSV with columns ``t,bound,empirical,trials``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "bound", "empirical", "trials"])
    for r in rows:
        w.writerow([f"{r['t']:.17g}", f"{r['bound']:.17g}", f"{r['empirical']:.17g}", r["trials"]])
    return buf.getvalue()


# -- canonical Monte Carlo audits ----------------------------------------
#
# One concrete statistic per closed-form bound, each genuinely satisfying
# the bound's hypotheses:
#
# bennett          sum of 100 centered Bernoulli(0.01) variables (|X_i| <= 1)
# gaussian         ||g||_2 - E ||g||_2 for g ~ N(0, I_20)   (1-Lipschitz)
# exponential_sum  sqrt(sum d_i^2 g_i^2) - ||d||_2, d = linspace(0.2, 1, 30)
# talagrand        | ||P x|| - E ||P x|| | for Rademacher x in R^40 and a
#                  10 x 40 matrix P with orthonormal rows (convex, 1-Lipschitz)

AUDIT_TS = (1.0, 2.0, 3.0)
CANONICAL_AUDITS = ("bennett", "gaussian", "exponential_sum", "talagrand")


def _chunks(trials: int, size: int = 20_000):
    done = 0
    while done < trials:
        k = min(size, trials - done)
        yield k
        done += k


def _gaussian_norm_mean(d: int) -> float:
    return math.sqrt(2.0) * math.exp(math.lgamma((d + 1) / 2) - math.lgamma(d / 2))


def canonical_samples(name: str, trials: int, seed: int) -> tuple[np.ndarray, TailBound]:
    """Deviation samples of the named statistic and the bound they should obey."""
    from .seeding import make_rng

    rng = make_rng(seed)
    if name == "bennett":
        n, q = 100, 0.01
        s = np.concatenate([(rng.random((k, n)) < q).sum(axis=1) - n * q for k in _chunks(trials)])
        return s.astype(np.float64), bennett_tail(n * q * (1 - q))
    if name == "gaussian":
        d = 20
        mean = _gaussian_norm_mean(d)
        s = np.concatenate([np.linalg.norm(rng.standard_normal((k, d)), axis=1) for k in _chunks(trials)])
        return s - mean, gaussian_lipschitz_tail(1.0)
    if name == "exponential_sum":
        dvec = np.linspace(0.2, 1.0, 30)
        tb = exponential_sum_tail(dvec)
        s = np.concatenate([np.sqrt((rng.standard_normal((k, dvec.size)) ** 2) @ dvec**2)
                            for k in _chunks(trials)])
        return s - tb.constants["center"], tb
    if name == "talagrand":
        q, _ = np.linalg.qr(rng.standard_normal((40, 10)))
        p = q.T
        s = np.concatenate([np.linalg.norm((2.0 * rng.integers(0, 2, size=(k, 40)) - 1.0) @ p.T, axis=1)
                            for k in _chunks(trials)])
        return np.abs(s - s.mean()), talagrand_tail(1.0)
    raise ValueError(f"unknown audit {name!r}; expected one of {CANONICAL_AUDITS}")


def canonical_audit(name: str, trials: int = 100_000, seed: int = 0, ts=AUDIT_TS) -> list[dict]:
    """Run one canonical domination audit; see :func:`audit_domination`."""
    samples, bound = canonical_samples(name, trials, seed)
    return audit_domination(bound, EmpiricalTail(samples), ts)
