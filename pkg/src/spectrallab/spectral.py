"""Extreme singular values: power iteration and an exact cyclic Jacobi solver.

The two routes are independent.  :func:`spectral_norm` only ever touches the
matrix through products ``m @ v`` and ``m.T @ v``; :func:`singular_values_full`
diagonalizes the Gram matrix by plane rotations.  The test-suite uses each as
the oracle for the other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .seeding import derive_seed, make_rng

FULL_SOLVER_MAX_DIM = 2000


@dataclass(frozen=True)
class SpectralResult:
    value: float
    iterations: int
    converged: bool
    residual: float


def _power_run(m: np.ndarray, tol: float, max_iter: int, seed: int) -> SpectralResult:
    rows, cols = m.shape
    # iterate on whichever Gram operator is smaller; the nonzero spectra agree
    if cols <= rows:
        apply = lambda v: m.T @ (m @ v)  # noqa: E731
        dim = cols
    else:
        apply = lambda v: m @ (m.T @ v)  # noqa: E731
        dim = rows

    v = make_rng(seed).standard_normal(dim)
    v /= np.linalg.norm(v)
    lam_prev = None
    delta_prev = None
    residual = np.inf
    for it in range(1, max_iter + 1):
        w = apply(v)
        lam = float(v @ w)
        wn = float(np.linalg.norm(w))
        if wn == 0.0:
            return SpectralResult(0.0, it, True, 0.0)
        v = w / wn
        if lam_prev is not None:
            delta = abs(lam - lam_prev) / lam
            # Geometric-tail estimate of the distance still to travel.  The
            # raw per-step change understates the error when the top gap is
            # small, so convergence also requires the extrapolated tail.
            if delta_prev is None or delta_prev == 0.0:
                rho = 0.0 if delta == 0.0 else 0.999
            else:
                rho = min(delta / delta_prev, 0.999)
            residual = max(delta, delta * rho / (1.0 - rho))
            if residual < tol:
                return SpectralResult(float(np.sqrt(max(lam, 0.0))), it, True, residual)
            delta_prev = delta
        lam_prev = lam
    return SpectralResult(float(np.sqrt(max(lam_prev, 0.0))), max_iter, False, residual)


def spectral_norm(m, tol: float = 1e-10, max_iter: int = 10000, seed: int = 0) -> SpectralResult:
    """Largest singular value of ``m`` by power iteration on its Gram operator.

    The start vector is drawn from ``seed``.  ``residual`` is the estimated
    relative error of the squared norm; ``converged`` means it fell below
    ``tol``.  On failure the iteration restarts once from a second derived
    seed and the larger (still lower-bound) estimate is returned.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.any(m):
        return SpectralResult(0.0, 1, True, 0.0)
    first = _power_run(m, tol, max_iter, seed)
    if first.converged:
        return first
    second = _power_run(m, tol, max_iter, derive_seed(seed, 1))
    best = max(first, second, key=lambda r: r.value)
    return SpectralResult(
        best.value,
        first.iterations + second.iterations,
        second.converged,
        second.residual if second.converged else best.residual,
    )


def _round_robin(d: int):
    """Pairings for a parallel cyclic sweep: every pair (p, q) exactly once
    over ``d' - 1`` rounds, ``d' = d`` rounded up to even; each round's pairs
    are disjoint.  Pairs touching the padding index are dropped."""
    n = d + (d % 2)
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        half = n // 2
        p = np.array(players[:half])
        q = np.array(players[half:][::-1])
        keep = (p < d) & (q < d)
        p, q = p[keep], q[keep]
        lo, hi = np.minimum(p, q), np.maximum(p, q)
        rounds.append((lo, hi))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def jacobi_eigenvalues(g, rtol: float = 1e-12, max_sweeps: int = 100) -> tuple[np.ndarray, int]:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Disjoint pairs are rotated together (round-robin ordering), which is the
    same sweep as the classical row-cyclic order up to the order of commuting
    rotations.  Stops once the off-diagonal Frobenius mass is below
    ``rtol * ||g||_F``.  Returns ``(eigenvalues, sweeps)``.
    """
    a = np.array(g, dtype=np.float64, copy=True)
    d = a.shape[0]
    if a.shape != (d, d):
        raise ValueError("matrix must be square")
    a = 0.5 * (a + a.T)
    scale = float(np.linalg.norm(a))
    if d == 1 or scale == 0.0:
        return np.diag(a).copy(), 0
    rounds = _round_robin(d)
    target = rtol * scale
    sweeps = 0
    while True:
        offd = a - np.diag(np.diag(a))
        off = float(np.sqrt(np.sum(offd * offd)))
        if off < target:
            break
        if sweeps >= max_sweeps:
            raise RuntimeError(f"Jacobi did not converge in {max_sweeps} sweeps (off={off:g})")
        sweeps += 1
        for p, q in rounds:
            apq = a[p, q]
            active = apq != 0.0
            if not np.any(active):
                continue
            p, q, apq = p[active], q[active], apq[active]
            theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            big = np.abs(theta) > 1e150
            th = np.where(big, 1.0, theta)
            t = np.sign(th) / (np.abs(th) + np.sqrt(th * th + 1.0))
            t = np.where(big, 0.5 / np.where(big, theta, 1.0), t)
            t[theta == 0.0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            rp, rq = a[p, :], a[q, :]
            a[p, :] = c[:, None] * rp - s[:, None] * rq
            a[q, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = a[:, p], a[:, q]
            a[:, p] = cp * c - cq * s
            a[:, q] = cp * s + cq * c
            a[p, q] = 0.0
            a[q, p] = 0.0
    return np.diag(a).copy(), sweeps


def singular_values_full(m) -> np.ndarray:
    """All ``min(rows, cols)`` singular values of ``m``, descending."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    k = min(m.shape)
    if k > FULL_SOLVER_MAX_DIM:
        raise ValueError(
            f"min dimension {k} exceeds the full-solver guard of {FULL_SOLVER_MAX_DIM}"
        )
    g = m.T @ m if m.shape[1] <= m.shape[0] else m @ m.T
    eig, _ = jacobi_eigenvalues(g)
    return np.sqrt(np.clip(np.sort(eig)[::-1], 0.0, None))


def smallest_singular_value(m) -> float:
    m = np.asarray(m, dtype=np.float64)
    if m.shape[0] < m.shape[1]:
        raise ValueError(f"need rows >= cols for s_min, got shape {m.shape}")
    return float(singular_values_full(m)[-1])


def net_norm_bounds(m, eps: float, net, atol: float = 1e-10) -> tuple[float, float]:
    """Bracket ``||m||`` using an eps-net of the unit sphere.

    ``lower`` is the largest ``||m x||`` over the net; ``upper`` is
    ``lower / (1 - eps)``, valid whenever ``net`` really is an eps-net.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    m = np.asarray(m, dtype=np.float64)
    net = np.atleast_2d(np.asarray(net, dtype=np.float64))
    if net.shape[1] != m.shape[1]:
        raise ValueError(f"net vectors have dimension {net.shape[1]}, matrix has {m.shape[1]} columns")
    norms = np.linalg.norm(net, axis=1)
    bad = np.flatnonzero(np.abs(norms - 1.0) > atol)
    if bad.size:
        raise ValueError(f"net vector {int(bad[0])} has norm {float(norms[bad[0]])!r}; net points must be unit vectors")
    lower = float(np.max(np.linalg.norm(net @ m.T, axis=1)))
    return lower, lower / (1.0 - eps)
