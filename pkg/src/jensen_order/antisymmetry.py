"""Finite-dimensional antisymmetry: certify ``X == Y`` by peeling eigenspaces.

If ``f`` is strictly monotone and convex and both ``<f(X)xi,xi> >= f(<Y xi,xi>)``
and ``<f(Y)xi,xi> >= f(<X xi,xi>)`` hold for all unit ``xi``, then ``X == Y``.
The argument takes the top eigenspace ``Q`` of ``f(Y)``, shows that
``f(X)`` and ``f(Y)`` agree there, and repeats on the complement of ``Q``.
:func:`decide_equal` runs that argument numerically after first checking
the two premises; :func:`find_violation` is the contrapositive search.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hermitian import (
    Projection,
    apply_callable,
    apply_function,
    as_hermitian,
    compress,
    opnorm,
    spectral,
    tol_cluster,
)
from .relation import (
    RelationVerdict,
    check_relation_sphere,
    check_relation_tangent,
    dual_relation_check,
    normalize_direction,
)
from .scalar import ScalarFunction, negate

__all__ = [
    "EQUAL",
    "PREMISE_VIOLATED",
    "TOLERANCE_EXCEEDED",
    "PeelingStep",
    "PeelingTrace",
    "positivity_shift",
    "peel_once",
    "decide_equal",
    "find_violation",
]

EQUAL = "EQUAL"
PREMISE_VIOLATED = "PREMISE_VIOLATED"
TOLERANCE_EXCEEDED = "TOLERANCE_EXCEEDED"


@dataclass
class PeelingStep:
    level: int
    Q: Projection
    norms: tuple[float, float]
    norm_gap: float
    commutation_residual: float
    factorization_residual: float
    equality_residual: float
    status: str = "ok"

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "rank": self.Q.rank,
            "subspace_dim": self.Q.dim,
            "Q": [[[float(z.real), float(z.imag)] for z in row] for row in self.Q.matrix],
            "norms": list(self.norms),
            "norm_gap": self.norm_gap,
            "commutation_residual": self.commutation_residual,
            "factorization_residual": self.factorization_residual,
            "equality_residual": self.equality_residual,
            "status": self.status,
        }


@dataclass
class PeelingTrace:
    conclusion: str
    function: str
    direction: str
    shift: float
    steps: list[PeelingStep] = field(default_factory=list)
    verdict: RelationVerdict | None = None
    max_residual: float = 0.0
    distance: float | None = None
    tolerance: float | None = None

    def to_dict(self) -> dict:
        out = {
            "conclusion": self.conclusion,
            "function": self.function,
            "direction": self.direction,
            "shift": self.shift,
            "steps": [s.to_dict() for s in self.steps],
            "max_residual": self.max_residual,
        }
        if self.distance is not None:
            out["distance"] = self.distance
            out["tau_eq"] = self.tolerance
        if self.verdict is not None:
            out["verdict"] = self.verdict.to_dict()
        return out


def _tau_eq(X, Y) -> float:
    return 1e-7 * (1.0 + opnorm(X) + opnorm(Y))


def _tau_norm(FX) -> float:
    return 1e-8 * (1.0 + opnorm(FX))


def positivity_shift(f: ScalarFunction, X, Y) -> float:
    """Smallest ``c >= 0`` with ``f + c >= 0`` on the joint spectral range.

    ``f`` is monotone, so its minimum over an interval sits at an end.
    """
    w = np.concatenate([np.linalg.eigvalsh(X), np.linalg.eigvalsh(Y)])
    lo, hi = float(w.min()), float(w.max())
    ends = f.fn(np.array([max(lo, f.domain.lo), hi]))
    return max(0.0, -float(ends.min()))


def _convex_orientation(f: ScalarFunction, direction: str) -> ScalarFunction:
    # peeling runs on the convex ">=" form; the concave "<=" form is its negation
    return negate(normalize_direction(f, direction))


def peel_once(f: ScalarFunction, X, Y, shift=None, level=0, tau_eq=None) -> PeelingStep:
    """One peeling step for the convex ``>=`` relation of ``f``.

    ``Q`` is the full top eigenspace of ``f(Y) + shift``. Checks, in order:
    ``||f(X)|| == ||f(Y)||``, ``Q (||f(X)|| - f(X)) Q == 0`` through the
    square-root factor, commutation of ``Q`` with ``f(X)``, and finally
    ``XQ == YQ``. ``status`` is ``"ok"``, ``"norm-mismatch"`` or
    ``"residual"``.
    """
    X = as_hermitian(X)
    Y = as_hermitian(Y)
    if shift is None:
        shift = positivity_shift(f, X, Y)
    if tau_eq is None:
        tau_eq = _tau_eq(X, Y)
    n = X.shape[0]
    FX = apply_function(f, X) + shift * np.eye(n)
    FY = apply_function(f, Y) + shift * np.eye(n)

    dec = spectral(FY)
    w, V = dec.eigenvalues, dec.eigenvectors
    top = w >= w[-1] - tol_cluster(FY)
    Q = Projection(V[:, top])
    nX = float(np.linalg.eigvalsh(FX)[-1])
    nY = float(w[-1])
    norm_gap = abs(nX - nY)

    Qm = Q.matrix
    comm = opnorm(Qm @ FX - FX @ Qm)
    root = apply_callable(lambda t: np.sqrt(np.maximum(t, 0.0)), nX * np.eye(n) - FX)
    fact = opnorm(root @ Qm)
    eq = opnorm(X @ Qm - Y @ Qm)

    tau_norm = _tau_norm(FX)
    if norm_gap > tau_norm:
        status = "norm-mismatch"
    elif fact > np.sqrt(tau_norm) or comm > tau_eq or eq > tau_eq:
        status = "residual"
    else:
        status = "ok"
    return PeelingStep(level, Q, (nX, nY), norm_gap, comm, fact, eq, status)


def decide_equal(f: ScalarFunction, X, Y, direction: str, tau_eq=None) -> PeelingTrace:
    """Total decision procedure: premises first, then peeling.

    Returns a trace whose ``conclusion`` is ``EQUAL`` only if the final
    distance ``||X - Y||`` is within ``tau_eq``
    (default ``1e-7 (1 + ||X|| + ||Y||)``).
    """
    X = as_hermitian(X)
    Y = as_hermitian(Y)
    if X.shape != Y.shape:
        raise ValueError(f"dimension mismatch {X.shape} vs {Y.shape}")
    g = _convex_orientation(f, direction)
    shift = positivity_shift(g, X, Y)
    if tau_eq is None:
        tau_eq = _tau_eq(X, Y)
    trace = PeelingTrace(PREMISE_VIOLATED, f.name, direction, shift)

    for verdict in dual_relation_check(f, X, Y, direction):
        if not verdict.holds:
            trace.verdict = verdict
            return trace

    Xs, Ys = X, Y
    n = X.shape[0]
    for level in range(n):
        step = peel_once(g, Xs, Ys, shift=shift, level=level, tau_eq=tau_eq)
        trace.steps.append(step)
        trace.max_residual = max(trace.max_residual, step.commutation_residual,
                                 step.equality_residual, step.norm_gap)
        if step.status == "norm-mismatch":
            trace.conclusion = PREMISE_VIOLATED
            return trace
        if step.status != "ok":
            trace.conclusion = TOLERANCE_EXCEEDED
            return trace
        if step.Q.rank == Xs.shape[0]:
            break
        rest = step.Q.complement()
        Xs, Ys = compress(Xs, rest), compress(Ys, rest)

    trace.distance = opnorm(X - Y)
    trace.tolerance = tau_eq
    trace.conclusion = EQUAL if trace.distance <= tau_eq else TOLERANCE_EXCEEDED
    return trace


def find_violation(f: ScalarFunction, X, Y, direction: str, seed=0, budget=64):
    """Search both orderings for a unit vector breaking the relation.

    The tangent test runs first; the sphere search with ``budget`` restarts
    is the fallback. Returns the first failing verdict, or ``None`` when
    nothing was found (which proves nothing).
    """
    h = normalize_direction(f, direction)
    X = as_hermitian(X)
    Y = as_hermitian(Y)
    orderings = (("X,Y", X, Y), ("Y,X", Y, X))
    for label, A, B in orderings:
        v = check_relation_tangent(h, A, B)
        if not v.holds:
            v.ordering = label
            return v
    for label, A, B in orderings:
        v = check_relation_sphere(h, A, B, restarts=budget, seed=seed)
        if not v.holds:
            v.ordering = label
            return v
    return None

