"""The vector-state Jensen relation between two Hermitian matrices.

For a function ``h`` the relation reads::

    <h(A) xi, xi>  <=  h(<B xi, xi>)     for every unit vector xi

Two independent deciders are provided. :func:`check_relation_tangent`
uses the tangent-line characterization for concave ``h``: the relation
holds iff ``h(A) <= h'(lam) B - lam h'(lam) + h(lam)`` for every ``lam``.
:func:`check_relation_sphere` minimizes
``phi(xi) = h(<B xi, xi>) - <h(A) xi, xi>`` directly over the unit sphere
with multi-start projected gradient descent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .hermitian import apply_function, as_hermitian, opnorm
from .scalar import DomainError, ScalarFunction, negate

__all__ = [
    "RelationVerdict",
    "TangentScan",
    "relation_tolerance",
    "tangent_gap",
    "tangent_scan",
    "check_relation_tangent",
    "check_relation_sphere",
    "dual_relation_check",
    "normalize_direction",
    "jensen_value",
]

CONCAVE_LE = "concave-le"
CONVEX_GE = "convex-ge"
_DIRECTIONS = {
    "concave-le": CONCAVE_LE,
    "concave-≤": CONCAVE_LE,
    "convex-ge": CONVEX_GE,
    "convex-≥": CONVEX_GE,
}


@dataclass
class RelationVerdict:
    """Outcome of one relation check.

    ``margin`` is the most negative value of
    ``h(<B xi, xi>) - <h(A) xi, xi>`` found. When ``holds`` is false,
    ``witness`` is a unit vector with ``lhs - rhs > tolerance``.
    """

    holds: bool
    margin: float
    method: str
    function: str
    tolerance: float
    witness: np.ndarray | None = None
    lhs: float | None = None
    rhs: float | None = None
    lambda_star: float | None = None
    restarts: int | None = None
    seed: int | None = None
    ordering: str | None = None

    def to_dict(self) -> dict:
        out = {
            "holds": self.holds,
            "margin": self.margin,
            "method": self.method,
            "function": self.function,
            "tolerance": self.tolerance,
        }
        if self.ordering is not None:
            out["ordering"] = self.ordering
        if self.lambda_star is not None:
            out["lambda_star"] = self.lambda_star
        if self.restarts is not None:
            out["restarts"] = self.restarts
        if self.seed is not None:
            out["seed"] = self.seed
        if self.witness is not None:
            out["witness"] = {
                "vector": [[float(z.real), float(z.imag)] for z in self.witness],
                "lhs": self.lhs,
                "rhs": self.rhs,
            }
        return out


@dataclass
class TangentScan:
    lambda_grid: np.ndarray
    gaps: np.ndarray
    lambda_star: float
    gap_star: float


def relation_tolerance(hA, B, h: ScalarFunction) -> float:
    """Loewner tolerance ``1e-9 (1 + scale)`` for the relation at hand."""
    w = np.linalg.eigvalsh(B)
    hb = np.abs(_eval_clipped(h, w[[0, -1]]))
    return 1e-9 * (1.0 + max(opnorm(hA), float(hb.max())))


def jensen_value(h: ScalarFunction, hA, B, xi):
    """``(lhs, rhs) = (<h(A) xi, xi>, h(<B xi, xi>))`` for a unit vector."""
    xi = np.asarray(xi, dtype=complex)
    lhs = float(np.real(np.vdot(xi, hA @ xi)))
    beta = float(np.real(np.vdot(xi, B @ xi)))
    return lhs, float(_eval_clipped(h, np.array([beta]))[0])


def _eval_clipped(h: ScalarFunction, x):
    x = np.asarray(x, dtype=float)
    if np.any(~h.domain.contains(x, tol=1e-12 * (1 + np.abs(x).max()))):
        raise DomainError(f"value outside domain {h.domain} of {h.name}")
    lo = h.domain.lo if h.domain.closed_lo else np.nextafter(h.domain.lo, np.inf)
    return h.fn(np.clip(x, lo, np.nextafter(h.domain.hi, -np.inf)))


def _interior_clip(h: ScalarFunction, x, scale):
    """Clip points into the open interior where derivatives exist."""
    eps = 1e-9 * (1.0 + scale)
    lo, hi = h.domain.lo, h.domain.hi
    return np.clip(x, lo + eps if np.isfinite(lo) else -np.inf, hi - eps if np.isfinite(hi) else np.inf)


def _prepare(h: ScalarFunction, A, B):
    A = as_hermitian(A)
    B = as_hermitian(B)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch {A.shape} vs {B.shape}")
    hA = apply_function(h, A)
    wB = np.linalg.eigvalsh(B)
    if not np.all(h.domain.contains(wB, tol=1e-12)):
        raise DomainError(f"spectrum of B leaves domain {h.domain} of {h.name}")
    return A, B, hA, wB


def _tangent_matrices(h, hA, B, lams):
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    s = h.deriv1(lams)
    c = h.fn(lams) - lams * s
    n = B.shape[0]
    eye = np.eye(n)
    return s[:, None, None] * B + c[:, None, None] * eye - hA


def tangent_gap(h: ScalarFunction, A, B, lam: float, hA=None) -> float:
    """``lambda_min( h'(lam) B - lam h'(lam) + h(lam) - h(A) )``.

    Examples
    --------
    >>> from jensen_order.scalar import builtin
    >>> round(tangent_gap(builtin("sqrt"), [[4.0]], [[1.0]], 1.0), 12)
    -1.0
    """
    A = as_hermitian(A)
    B = as_hermitian(B)
    if hA is None:
        hA = apply_function(h, A)
    if not h.domain.interior_contains(lam):
        raise DomainError(f"lambda {lam!r} outside interior of {h.domain}")
    return float(np.linalg.eigvalsh(_tangent_matrices(h, hA, B, lam))[0, 0])


def tangent_scan(h: ScalarFunction, hA, B, grid_points=512, wB=None) -> TangentScan:
    """Grid search plus bounded refinement of ``lam -> tangent gap``.

    The search runs over ``[lambda_min(B), lambda_max(B)]``: for a fixed
    unit vector the tangent bound is tightest at ``lam = <B xi, xi>``, which
    always lies in that interval.
    """
    if wB is None:
        wB = np.linalg.eigvalsh(B)
    scale = float(np.abs(wB).max())
    lo, hi = _interior_clip(h, np.array([wB[0], wB[-1]]), scale)
    if hi - lo <= 1e-14 * (1.0 + scale):
        grid = np.array([lo])
    else:
        grid = np.linspace(lo, hi, grid_points)
    gaps = np.linalg.eigvalsh(_tangent_matrices(h, hA, B, grid))[:, 0]
    i_best = int(np.argmin(gaps))
    best_lam, best_gap = float(grid[i_best]), float(gaps[i_best])
    if grid.size > 2:
        xtol = 1e-10 * (1.0 + abs(wB[-1]))

        def gap_at(lam):
            return float(np.linalg.eigvalsh(_tangent_matrices(h, hA, B, lam))[0, 0])

        left = np.r_[np.inf, gaps[:-1]]
        right = np.r_[gaps[1:], np.inf]
        local = np.flatnonzero((gaps <= left) & (gaps <= right) & (gaps <= best_gap + 1e-6))
        local = local[np.argsort(gaps[local])][:32]
        for i in local:
            a, b = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
            res = minimize_scalar(gap_at, bounds=(a, b), method="bounded",
                                  options={"xatol": xtol})
            if res.fun < best_gap:
                best_lam, best_gap = float(res.x), float(res.fun)
    return TangentScan(grid, gaps, best_lam, best_gap)


def _sphere_descent(h, hA, B, X0, max_iter=2000, gtol=1e-10, memory=10):
    """Batched projected gradient descent on the unit sphere.

    Each column of ``X0`` is one start. Trial steps are Barzilai-Borwein
    lengths, accepted under a nonmonotone Armijo test against the worst of
    the last ``memory`` values and halved otherwise. Returns the final
    points and their ``phi`` values.
    """
    X = X0 / np.linalg.norm(X0, axis=0)
    scale = float(np.abs(np.linalg.eigvalsh(B)).max())

    def values(X):
        BX = B @ X
        beta = np.real(np.sum(X.conj() * BX, axis=0))
        a = np.real(np.sum(X.conj() * (hA @ X), axis=0))
        return _eval_clipped(h, beta) - a, beta

    def tangential_grad(X, beta):
        slope = h.deriv1(_interior_clip(h, beta, scale))
        G = 2.0 * (slope * (B @ X) - hA @ X)
        return G - X * np.real(np.sum(X.conj() * G, axis=0))

    m = X.shape[1]
    phi, beta = values(X)
    history = np.tile(phi, (memory, 1))
    base = 1.0 / (1.0 + opnorm(hA) + opnorm(B))
    step = np.full(m, base)
    active = np.ones(m, dtype=bool)
    X_prev = G_prev = None
    G = tangential_grad(X, beta)
    for it in range(max_iter):
        gnorm2 = np.sum(np.abs(G) ** 2, axis=0)
        active &= gnorm2 > gtol**2
        if not active.any():
            break
        if X_prev is not None:
            dX, dG = X - X_prev, G - G_prev
            sy = np.real(np.sum(dX.conj() * dG, axis=0))
            if it % 2:
                num, den = np.sum(np.abs(dX) ** 2, axis=0), sy
            else:
                num, den = sy, np.sum(np.abs(dG) ** 2, axis=0)
            with np.errstate(divide="ignore", invalid="ignore"):
                bb = num / den
            good = np.isfinite(bb) & (bb > 0) & (sy > 0)
            step = np.clip(np.where(good, bb, 2.0 * step), 1e-10 * base, 1e10 * base)
        X_prev, G_prev = X.copy(), G.copy()
        ref = history.max(axis=0)
        idx = np.flatnonzero(active)
        s = step[idx].copy()
        pending = np.ones(idx.size, dtype=bool)
        for _ in range(50):
            cols = idx[pending]
            cand = X[:, cols] - s[pending] * G[:, cols]
            cand /= np.linalg.norm(cand, axis=0)
            cphi, cbeta = values(cand)
            ok = cphi <= ref[cols] - 1e-4 * s[pending] * gnorm2[cols]
            acc = cols[ok]
            X[:, acc] = cand[:, ok]
            phi[acc], beta[acc] = cphi[ok], cbeta[ok]
            still = np.flatnonzero(pending)
            step[acc] = s[still[ok]]
            pending[still[ok]] = False
            if not pending.any():
                break
            s[pending] *= 0.5
        # no sufficient decrease after 50 halvings: stationary to rounding
        active[idx[pending]] = False
        history = np.roll(history, 1, axis=0)
        history[0] = phi
        G = tangential_grad(X, beta)
    return X, phi


def _verdict_from_vector(h, hA, B, xi, margin, tol, method, **meta):
    xi = xi / np.linalg.norm(xi)
    lhs, rhs = jensen_value(h, hA, B, xi)
    holds = margin >= -tol
    return RelationVerdict(
        holds=bool(holds),
        margin=float(margin),
        method=method,
        function=h.name,
        tolerance=tol,
        witness=None if holds else xi,
        lhs=None if holds else lhs,
        rhs=None if holds else rhs,
        **meta,
    )


def check_relation_tangent(h: ScalarFunction, A, B, grid_points=512) -> RelationVerdict:
    """Decide the relation via the tangent-line family (``h`` concave).

    On failure the witness is the bottom eigenvector of the most violated
    tangent inequality, polished by a single sphere descent.
    """
    if not h.is_concave:
        raise ValueError(f"tangent method needs a concave function, got {h.name} ({h.curvature})")
    A, B, hA, wB = _prepare(h, A, B)
    tol = relation_tolerance(hA, B, h)
    scan = tangent_scan(h, hA, B, grid_points, wB=wB)
    meta = {"lambda_star": scan.lambda_star}
    if scan.gap_star >= -tol:
        return RelationVerdict(True, scan.gap_star, "tangent", h.name, tol, **meta)
    T = _tangent_matrices(h, hA, B, scan.lambda_star)[0]
    _, V = np.linalg.eigh(T)
    v = V[:, :1]
    X, phi = _sphere_descent(h, hA, B, v.copy())
    phi0 = _verdict_phi(h, hA, B, v[:, 0])
    xi = X[:, 0] if phi[0] <= phi0 else v[:, 0]
    margin = min(scan.gap_star, float(min(phi[0], phi0)))
    return _verdict_from_vector(h, hA, B, xi, margin, tol, "tangent", **meta)


def _verdict_phi(h, hA, B, xi):
    lhs, rhs = jensen_value(h, hA, B, xi / np.linalg.norm(xi))
    return rhs - lhs


def check_relation_sphere(h: ScalarFunction, A, B, restarts=64, seed=0,
                          max_iter=2000) -> RelationVerdict:
    """Decide the relation by minimizing ``phi`` over the unit sphere.

    Runs ``restarts`` random starts (restart ``r`` draws from the stream
    seeded by ``(seed, r)``) plus the eigenvectors of ``A`` and ``B``.
    Only differentiability of ``h`` is used. A "holds" verdict is
    heuristic: no violation was found.
    """
    A, B, hA, _ = _prepare(h, A, B)
    n = A.shape[0]
    tol = relation_tolerance(hA, B, h)
    starts = []
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        starts.append(rng.standard_normal(n) + 1j * rng.standard_normal(n))
    starts = np.array(starts).T if starts else np.zeros((n, 0), dtype=complex)
    X0 = np.hstack([starts, np.linalg.eigh(A)[1], np.linalg.eigh(B)[1]])
    X, phi = _sphere_descent(h, hA, B, X0.astype(complex), max_iter=max_iter)
    k = int(np.argmin(phi))
    return _verdict_from_vector(h, hA, B, X[:, k], float(phi[k]), tol, "sphere",
                                restarts=restarts, seed=seed)


def normalize_direction(f: ScalarFunction, direction: str) -> ScalarFunction:
    """Return the concave function whose ``<=`` relation encodes ``direction``.

    ``convex-ge`` (``<f(X)xi,xi> >= f(<Y xi,xi>)``) becomes the
    ``concave-le`` relation of ``-f``.
    """
    try:
        direction = _DIRECTIONS[direction]
    except KeyError:
        raise ValueError(f"unknown direction {direction!r}; use concave-le or convex-ge") from None
    if direction == CONCAVE_LE:
        if not f.is_concave:
            raise ValueError(f"direction concave-le needs a concave function, {f.name} is {f.curvature}")
        return f
    if not f.is_convex:
        raise ValueError(f"direction convex-ge needs a convex function, {f.name} is {f.curvature}")
    return negate(f)


def dual_relation_check(f: ScalarFunction, X, Y, direction: str, method="tangent",
                        restarts=64, seed=0):
    """Check both orderings ``(X, Y)`` and ``(Y, X)`` of the relation.

    Returns a pair of verdicts; the convex case is decided on ``-f``.
    """
    h = normalize_direction(f, direction)
    if method == "tangent":
        first = check_relation_tangent(h, X, Y)
        second = check_relation_tangent(h, Y, X)
    elif method == "sphere":
        first = check_relation_sphere(h, X, Y, restarts=restarts, seed=seed)
        second = check_relation_sphere(h, Y, X, restarts=restarts, seed=seed)
    else:
        raise ValueError(f"unknown method {method!r}")
    first.ordering, second.ordering = "X,Y", "Y,X"
    return first, second
