"""Audit of the composed-sandwich argument on finite matrices.

Hypothesis, for concave increasing ``f`` and ``g`` and positive ``X, Y``::

    <(g o f)(X) xi, xi>  <=  g(<f(Y) xi, xi>)  <=  (g o f)(<X xi, xi>)

Under it, ``f(Y)`` is squeezed for every ``lam`` between

    lower(lam, X) = [(g o f)(X) + f(lam) g'(f(lam)) - g(f(lam))] / g'(f(lam))
    upper(lam, X) = f'(lam) X - lam f'(lam) + f(lam)

and ``upper - lower <= c (t - lam)^2`` on ``[a, b]^2``. Splitting
``[a, b)`` into ``n`` spectral slices of ``X`` turns this into an estimate of
``||f(X) chi - f(Y) chi||`` decaying like ``n^{-1/2}``. The pipeline
evaluates every inequality of that chain and reports lhs, rhs and a pass
flag. Exact instances of the hypothesis force ``X == Y``, so perturbed
inputs are handled by measuring how badly the two operator bounds fail
(the premise residuals) and widening each pass test accordingly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hermitian import (
    OrderError,
    Projection,
    apply_function,
    as_hermitian,
    compress,
    compressed_inverse,
    opnorm,
    psd_gap,
    spectral,
    spectral_projection,
    symmetrize,
    tol_cluster,
    tol_proj,
    tol_psd,
)
from .relation import RelationVerdict, check_relation_tangent
from .scalar import ScalarFunction, builtin, compose

__all__ = [
    "SandwichConstants",
    "BoundCheck",
    "PartitionScheme",
    "DiscretizationReport",
    "check_sandwich",
    "lower_scalar",
    "upper_scalar",
    "operator_bounds",
    "compute_constants",
    "quadratic_gap",
    "inverse_gap",
    "premise_residuals",
    "audit_bounds",
    "partition",
    "discretize",
    "sweep",
    "final_rhs",
    "kernel_match",
    "near_zero_ratio",
    "root_lower_bound",
    "CSV_COLUMNS",
]

CSV_COLUMNS = ("n", "rho_lower", "rho_upper", "b3_lhs", "b3_rhs", "b4_lhs", "b4_rhs",
               "final_lhs", "final_rhs", "pass")


class ConstantsError(ValueError):
    """Constants do not satisfy ``p, q >= 1`` at the queried point."""


@dataclass(frozen=True)
class SandwichConstants:
    """``c`` and ``alpha`` for a pair ``(f, g)`` on the box ``[a, b]^2``.

    ``c_raw`` and ``alpha_raw`` are the grid extrema before the safety
    margins are added.
    """

    a: float
    b: float
    c: float
    alpha: float
    f: ScalarFunction
    g: ScalarFunction
    c_raw: float
    alpha_raw: float
    grid: int

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "alpha": self.alpha,
                "c_raw": self.c_raw, "alpha_raw": self.alpha_raw, "grid": self.grid,
                "f": self.f.name, "g": self.g.name}


@dataclass
class BoundCheck:
    lhs: float
    rhs: float
    slack: float = 0.0
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = bool(self.lhs <= self.rhs + self.slack)

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "slack": self.slack, "pass": self.passed}


@dataclass
class PartitionScheme:
    n: int
    lambdas: np.ndarray
    projections: list[Projection]
    edges: np.ndarray
    nudged: list[int]
    near_boundary: bool

    def total(self) -> np.ndarray:
        dim = self.projections[0].dim
        return sum((P.matrix for P in self.projections), np.zeros((dim, dim), complex))


@dataclass
class DiscretizationReport:
    n: int
    constants: SandwichConstants
    premise_residuals: tuple[float, float]
    slack_multiplier: float
    bound1: BoundCheck
    bound2: BoundCheck
    bound3: BoundCheck
    bound4: BoundCheck
    offdiag: BoundCheck
    final: BoundCheck
    kernel_match: bool
    empty_intervals: int
    nudged: list[int]
    near_boundary: bool

    @property
    def passed(self) -> bool:
        return all(b.passed for b in (self.bound1, self.bound2, self.bound3,
                                      self.bound4, self.offdiag, self.final))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "constants": self.constants.to_dict(),
            "premise_residuals": {"rho_lower": self.premise_residuals[0],
                                  "rho_upper": self.premise_residuals[1]},
            "slack_multiplier": self.slack_multiplier,
            "bound1": self.bound1.to_dict(),
            "bound2": self.bound2.to_dict(),
            "bound3": self.bound3.to_dict(),
            "bound4": self.bound4.to_dict(),
            "offdiag": self.offdiag.to_dict(),
            "final": self.final.to_dict(),
            "kernel_match": self.kernel_match,
            "empty_intervals": self.empty_intervals,
            "nudged_edges": list(self.nudged),
            "near_boundary": self.near_boundary,
            "pass": self.passed,
        }

    def csv_row(self) -> tuple:
        return (self.n, self.premise_residuals[0], self.premise_residuals[1],
                self.bound3.lhs, self.bound3.rhs, self.bound4.lhs, self.bound4.rhs,
                self.final.lhs, self.final.rhs, self.passed)


def _require_concave_increasing(*fs):
    for h in fs:
        if not (h.is_concave and h.increasing):
            raise ValueError(f"{h.name} must be concave and strictly increasing")


def _require_positive(*Ms):
    for M in Ms:
        if psd_gap(M) < -tol_psd(M):
            raise OrderError("operators must be positive semidefinite")


def check_sandwich(f: ScalarFunction, g: ScalarFunction, X, Y) -> tuple[RelationVerdict, RelationVerdict]:
    """Check both halves of the sandwich hypothesis.

    Left: ``<g(f(X)) xi, xi> <= g(<f(Y) xi, xi>)``, decided as the relation
    of ``g`` between ``f(X)`` and ``f(Y)``. Right:
    ``<f(Y) xi, xi> <= f(<X xi, xi>)``, the relation of ``f`` between ``Y``
    and ``X``.
    """
    _require_concave_increasing(f, g)
    X = as_hermitian(X)
    Y = as_hermitian(Y)
    _require_positive(X, Y)
    left = check_relation_tangent(g, apply_function(f, X), apply_function(f, Y))
    right = check_relation_tangent(f, Y, X)
    left.ordering, right.ordering = "left", "right"
    return left, right


def upper_scalar(f: ScalarFunction, lam, t):
    """Tangent of ``f`` at ``lam`` evaluated at ``t``."""
    lam = np.asarray(lam, dtype=float)
    s = f.d1(lam)
    return s * np.asarray(t, dtype=float) - lam * s + f(lam)


def lower_scalar(f: ScalarFunction, g: ScalarFunction, lam, t):
    lam = np.asarray(lam, dtype=float)
    fl = f(lam)
    gp = g.d1(fl)
    return (g(f(np.asarray(t, dtype=float))) + fl * gp - g(fl)) / gp


def operator_bounds(f: ScalarFunction, g: ScalarFunction, X, lam: float):
    """Operator bounds ``(lower(lam, X), upper(lam, X))`` squeezing ``f(Y)``.

    >>> from jensen_order.scalar import builtin
    >>> s = builtin("sqrt")
    >>> lo, up = operator_bounds(s, s, [[4.0]], 1.0)
    >>> round(float(up[0, 0].real), 12), round(float(lo[0, 0].real), 12)
    (2.5, 1.828427124746)
    """
    X = as_hermitian(X)
    n = X.shape[0]
    eye = np.eye(n)
    fl = float(f(lam))
    gp = float(g.d1(fl))
    gf = apply_function(compose(g, f), X)
    lower = symmetrize((gf + (fl * gp - float(g(fl))) * eye) / gp)
    s = float(f.d1(lam))
    upper = symmetrize(s * X + (fl - lam * s) * eye)
    return lower, upper


def compute_constants(f: ScalarFunction, g: ScalarFunction, a: float, b: float,
                      grid=200) -> SandwichConstants:
    """Grid estimates of ``c`` and ``alpha`` on ``[a, b]^2``.

    ``c`` bounds ``-[(g o f)''(t)] / (2 g'(f(lam)))`` from above with a 5%
    margin, so that ``upper - lower <= c (t - lam)^2``; ``alpha`` lifts the
    lower bound to at least 1 on the box.
    """
    _require_concave_increasing(f, g)
    if not 0 < a < b:
        raise ValueError(f"need 0 < a < b, got a={a}, b={b}")
    pts = np.linspace(a, b, grid)
    lam, t = np.meshgrid(pts, pts, indexing="ij")
    ft = f(t)
    gpl = g.d1(f(lam))
    curv = (g.d2(ft) * f.d1(t) ** 2 + g.d1(ft) * f.d2(t)) / gpl
    c_raw = max(0.0, float(np.max(-curv / 2.0)))
    c = c_raw * 1.05 + 1e-12
    q0 = lower_scalar(f, g, lam, t)
    alpha_raw = max(0.0, 1.0 - float(np.min(q0)))
    alpha = alpha_raw + 1e-9
    return SandwichConstants(a, b, c, alpha, f, g, c_raw, alpha_raw, grid)


def _check_box(k: SandwichConstants, lam, t):
    tol = 1e-12 * (1 + k.b)
    for v in (lam, t):
        v = np.asarray(v)
        if np.any(v < k.a - tol) or np.any(v > k.b + tol):
            raise ValueError(f"point outside the box [{k.a}, {k.b}]^2")


def quadratic_gap(k: SandwichConstants, lam, t):
    """``c (t - lam)^2 - (upper - lower)``; nonnegative for valid constants."""
    _check_box(k, lam, t)
    lam, t = np.asarray(lam, float), np.asarray(t, float)
    return k.c * (t - lam) ** 2 - (upper_scalar(k.f, lam, t) - lower_scalar(k.f, k.g, lam, t))


def inverse_gap(k: SandwichConstants, lam, t):
    """``c (t - lam)^2 - (1/q - 1/p)`` with ``p = upper + alpha``, ``q = lower + alpha``."""
    _check_box(k, lam, t)
    lam, t = np.asarray(lam, float), np.asarray(t, float)
    p = upper_scalar(k.f, lam, t) + k.alpha
    q = lower_scalar(k.f, k.g, lam, t) + k.alpha
    if np.any(p < 1 - 1e-9) or np.any(q < 1 - 1e-9):
        raise ConstantsError("alpha too small: p or q drops below 1")
    return k.c * (t - lam) ** 2 - (1.0 / q - 1.0 / p)


def premise_residuals(f, g, X, Y, a, b, grid=64) -> tuple[float, float]:
    """Most negative Loewner gaps of ``lower <= f(Y)`` and ``f(Y) <= upper``.

    Gaps above ``-tol_psd`` count as zero.
    """
    fY = apply_function(f, Y)
    rho_l = rho_u = 0.0
    for lam in np.linspace(a, b, grid):
        lower, upper = operator_bounds(f, g, X, float(lam))
        gl = psd_gap(fY - lower)
        gu = psd_gap(upper - fY)
        if gl < -tol_psd(fY - lower):
            rho_l = min(rho_l, gl)
        if gu < -tol_psd(upper - fY):
            rho_u = min(rho_u, gu)
    return rho_l, rho_u


def _slack_multiplier(fY, alpha) -> float:
    return fY.shape[0] * (1.0 + opnorm(fY) + alpha) ** 2


def audit_bounds(f, g, X, Y, k: SandwichConstants, P: Projection, lam: float,
                 rho=None) -> dict[str, BoundCheck]:
    """Evaluate the per-slice bounds for one spectral projection ``P`` of ``X``.

    Returns ``BoundCheck`` records keyed ``"bound1"`` (direct gap),
    ``"inverse"`` (gap of the inverses) and ``"bound2"`` (compression minus
    inverse-compression of ``f(Y) + alpha``).
    """
    X = as_hermitian(X)
    Y = as_hermitian(Y)
    if P.rank == 0:
        raise ValueError("empty projection")
    if rho is None:
        rho = premise_residuals(f, g, X, Y, k.a, k.b)
    n = X.shape[0]
    eye = np.eye(n)
    fY = apply_function(f, Y)
    FX = apply_function(f, X) + k.alpha * eye
    FY = fY + k.alpha * eye
    Pm = P.matrix
    d = opnorm(X @ Pm - lam * Pm)
    K = _slack_multiplier(fY, k.alpha)
    slack = K * max(0.0, -min(rho)) + tol_psd(FY)

    lhs1 = opnorm(FX @ Pm - Pm @ FY @ Pm)
    FXinv = symmetrize(np.linalg.inv(FX))
    FYinv = symmetrize(np.linalg.inv(FY))
    lhs_inv = opnorm(FXinv @ Pm - Pm @ FYinv @ Pm)
    lhs2 = opnorm(compress(FY, P) - compressed_inverse(FY, P))
    fb = float(f(k.b))
    return {
        "bound1": BoundCheck(lhs1, k.c * d**2, slack),
        "inverse": BoundCheck(lhs_inv, k.c * d**2, slack),
        "bound2": BoundCheck(lhs2, (1.0 + (fb + k.alpha) ** 2) * k.c * d**2, slack),
    }


def partition(X, a: float, b: float, n: int) -> PartitionScheme:
    """Spectral slices ``[a + (i-1)h, a + ih)`` of ``X`` with ``h = (b - a)/n``.

    An interior edge within the clustering tolerance of an eigenvalue is
    moved down by ten tolerances; the slice's nominal left end is kept as
    its ``lambda_i``.
    """
    X = as_hermitian(X)
    if n < 1:
        raise ValueError("n must be >= 1")
    dec = spectral(X)
    w, V = dec.eigenvalues, dec.eigenvectors
    tc = tol_cluster(X)
    edges = a + (b - a) * np.arange(n + 1) / n
    edges[-1] = b
    nudged = []
    for i in range(1, n):
        if np.any(np.abs(w - edges[i]) <= tc):
            edges[i] -= 10 * tc
            nudged.append(i)
    near = bool(np.any(np.abs(w - a) <= tc) or np.any(np.abs(w - b) <= tc))
    projections = []
    for i in range(n):
        mask = (w >= edges[i]) & (w < edges[i + 1])
        projections.append(Projection(V[:, mask]))
    lambdas = a + (b - a) * np.arange(n) / n
    return PartitionScheme(n, lambdas, projections, edges, nudged, near)


def discretize(f: ScalarFunction, g: ScalarFunction, X, Y, a: float, b: float, n: int,
               constants=None, rho=None) -> DiscretizationReport:
    """Run the slice-by-slice estimate for one ``n``.

    Requires ``0 < a < b`` with ``||X|| < b`` and ``||Y|| < b``.
    """
    X = as_hermitian(X)
    Y = as_hermitian(Y)
    if X.shape != Y.shape:
        raise ValueError(f"dimension mismatch {X.shape} vs {Y.shape}")
    if not a > 0:
        raise ValueError("a must be positive: the constant c blows up as a -> 0")
    if not b > a:
        raise ValueError(f"need b > a, got a={a}, b={b}")
    _require_positive(X, Y)
    if opnorm(X) >= b or opnorm(Y) >= b:
        raise ValueError(f"need ||X|| < b and ||Y|| < b (b={b}, ||X||={opnorm(X):.6g}, "
                         f"||Y||={opnorm(Y):.6g})")
    k = constants if constants is not None else compute_constants(f, g, a, b)
    if rho is None:
        rho = premise_residuals(f, g, X, Y, a, b)
    dim = X.shape[0]
    eye = np.eye(dim)
    fX = apply_function(f, X)
    fY = apply_function(f, Y)
    FX, FY = fX + k.alpha * eye, fY + k.alpha * eye
    K = _slack_multiplier(fY, k.alpha)
    slack = K * max(0.0, -min(rho)) + tol_psd(FY)

    scheme = partition(X, a, b, n)
    h2 = ((b - a) / n) ** 2
    fb = float(f(b))
    m = fb + k.alpha
    diag_sum = np.zeros((dim, dim), complex)
    off_sum = np.zeros((dim, dim), complex)
    lhs1 = lhs2 = lhs_off = 0.0
    empty = 0
    for P, lam in zip(scheme.projections, scheme.lambdas):
        if P.rank == 0:
            empty += 1
            continue
        rec = audit_bounds(f, g, X, Y, k, P, float(lam), rho=rho)
        lhs1 = max(lhs1, rec["bound1"].lhs)
        lhs2 = max(lhs2, rec["bound2"].lhs)
        Pm = P.matrix
        diag_sum += FX @ Pm - Pm @ FY @ Pm
        off = (eye - Pm) @ FY @ Pm
        off_sum += off
        lhs_off = max(lhs_off, opnorm(off) ** 2)

    chi = scheme.total()
    return DiscretizationReport(
        n=n,
        constants=k,
        premise_residuals=(float(rho[0]), float(rho[1])),
        slack_multiplier=K,
        bound1=BoundCheck(lhs1, k.c * h2, slack),
        bound2=BoundCheck(lhs2, (1 + m**2) * k.c * h2, slack),
        bound3=BoundCheck(opnorm(diag_sum), k.c * (b - a) ** 2 / n**2, slack),
        bound4=BoundCheck(opnorm(off_sum), math.sqrt(m * (1 + m**2) * k.c * (b - a) ** 2 / n), slack),
        offdiag=BoundCheck(lhs_off, m * (1 + m**2) * k.c * h2, slack),
        final=BoundCheck(opnorm(fX @ chi - fY @ chi), final_rhs(k, n), slack),
        kernel_match=kernel_match(f, g, X, Y),
        empty_intervals=empty,
        nudged=scheme.nudged,
        near_boundary=scheme.near_boundary,
    )


def final_rhs(k: SandwichConstants, n: int) -> float:
    """``c (b-a)^2 / n^2 + sqrt((f(b)+alpha)(1+(f(b)+alpha)^2) c (b-a)^2 / n)``."""
    m = float(k.f(k.b)) + k.alpha
    span2 = (k.b - k.a) ** 2
    return k.c * span2 / n**2 + math.sqrt(m * (1 + m**2) * k.c * span2 / n)


def sweep(f, g, X, Y, a, b, ns) -> list[DiscretizationReport]:
    """:func:`discretize` over several ``n`` sharing constants and residuals."""
    k = compute_constants(f, g, a, b)
    X = as_hermitian(X)
    Y = as_hermitian(Y)
    rho = premise_residuals(f, g, X, Y, a, b)
    return [discretize(f, g, X, Y, a, b, int(n), constants=k, rho=rho) for n in ns]


def _kernel_projection(M) -> Projection:
    tc = tol_cluster(M)
    return spectral_projection(M, -tc, tc)


def kernel_match(f, g, X, Y) -> bool:
    """Whether ``X`` and ``Y`` have the same kernel projection."""
    X = as_hermitian(X)
    Y = as_hermitian(Y)
    PX, PY = _kernel_projection(X), _kernel_projection(Y)
    if PX.rank != PY.rank:
        return False
    return opnorm(PX.matrix - PY.matrix) <= tol_proj(X.shape[0])


def near_zero_ratio(t: float, lam: float) -> float:
    """``(t/(2 sqrt(lam)) + 3 sqrt(lam)/2 - 2 lam^(1/4) t^(1/4)) / (t - lam)^2``.

    The tangent gap for ``f = g = sqrt`` over ``(t - lam)^2``; it blows up
    as ``lam -> 0``, which is why the box must stay away from zero.
    """
    if t <= 0 or lam <= 0:
        raise ValueError("t and lam must be positive")
    if t == lam:
        raise ValueError("ratio undefined at t == lam")
    num = t / (2 * math.sqrt(lam)) + 1.5 * math.sqrt(lam) - 2 * lam**0.25 * t**0.25
    return num / (t - lam) ** 2


def root_lower_bound(X, lam: float):
    """``M = 2 (lam X)^(1/2) - lam`` and its smallest eigenvalue.

    For ``f = sqrt`` the tangent bound only yields ``M <= Y``; ``M`` is
    typically indefinite, so no square root can be taken.
    """
    X = as_hermitian(X)
    M = symmetrize(2 * apply_function(builtin("sqrt"), lam * X) - lam * np.eye(X.shape[0]))
    return M, psd_gap(M)
