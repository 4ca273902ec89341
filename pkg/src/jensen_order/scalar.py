"""Scalar function descriptors with analytic derivatives.

A :class:`ScalarFunction` bundles a real function with its first and second
derivatives, its domain and its shape metadata (monotonicity, curvature).
Descriptors are immutable and are built from a small catalog
(:func:`builtin`) or from the textual mini-language (:func:`parse`)::

    sqrt  pow:0.3  log1p  affine:2,1  square  neg(sqrt)  compose(sqrt,sqrt)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "Domain",
    "ScalarFunction",
    "TangentLine",
    "DomainError",
    "FunctionSpecError",
    "UnsupportedCompositionError",
    "builtin",
    "compose",
    "negate",
    "tangent",
    "parse",
]

INCREASING = "strictly-increasing"
DECREASING = "strictly-decreasing"
CONCAVE = "concave"
CONVEX = "convex"
LINEAR = "linear"  # both concave and convex


class DomainError(ValueError):
    """Raised when a point lies outside a function's domain."""


class FunctionSpecError(ValueError):
    """Unknown function name, bad parameter, or malformed mini-language text."""


class UnsupportedCompositionError(ValueError):
    """The shape of a composition cannot be inferred from its parts."""


@dataclass(frozen=True)
class Domain:
    """Real interval ``(lo, hi)`` with an optionally closed left end.

    Derivatives are only taken on the open interior.
    """

    lo: float = -math.inf
    hi: float = math.inf
    closed_lo: bool = False

    def contains(self, x, tol=0.0):
        x = np.asarray(x, dtype=float)
        if self.closed_lo:
            ok = x >= self.lo - tol
        else:
            ok = x > self.lo - tol
        return ok & (x < self.hi + tol)

    def interior_contains(self, x):
        x = np.asarray(x, dtype=float)
        return (x > self.lo) & (x < self.hi)

    def __str__(self):
        left = "[" if self.closed_lo else "("
        return f"{left}{self.lo}, {self.hi})"


@dataclass(frozen=True)
class ScalarFunction:
    """A C^2 function on a real interval with shape metadata.

    ``monotone`` is one of ``"strictly-increasing"`` / ``"strictly-decreasing"``
    and ``curvature`` one of ``"concave"``, ``"convex"`` or ``"linear"``.
    The callables are vectorised over numpy arrays and do no domain checking;
    use :meth:`__call__`, :meth:`d1` and :meth:`d2` for checked evaluation.
    """

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    deriv1: Callable[[np.ndarray], np.ndarray]
    deriv2: Callable[[np.ndarray], np.ndarray]
    domain: Domain
    monotone: str
    curvature: str

    @property
    def increasing(self) -> bool:
        return self.monotone == INCREASING

    @property
    def is_concave(self) -> bool:
        return self.curvature in (CONCAVE, LINEAR)

    @property
    def is_convex(self) -> bool:
        return self.curvature in (CONVEX, LINEAR)

    def _check(self, x, interior):
        ok = self.domain.interior_contains(x) if interior else self.domain.contains(x)
        if not np.all(ok):
            bad = np.asarray(x, dtype=float)[~np.asarray(ok)].ravel()[0]
            where = "interior of " if interior else ""
            raise DomainError(
                f"{self.name}: point {bad!r} outside {where}domain {self.domain}"
            )

    def __call__(self, x):
        self._check(x, interior=False)
        return self.fn(np.asarray(x, dtype=float))

    def d1(self, x):
        self._check(x, interior=True)
        return self.deriv1(np.asarray(x, dtype=float))

    def d2(self, x):
        self._check(x, interior=True)
        return self.deriv2(np.asarray(x, dtype=float))

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class TangentLine:
    """The line ``t -> slope * t + intercept`` touching a function at ``base``."""

    slope: float
    intercept: float
    base: float

    def __call__(self, t):
        return self.slope * np.asarray(t, dtype=float) + self.intercept


_NONNEG = Domain(0.0, math.inf, closed_lo=True)


def _pow(p: float) -> ScalarFunction:
    if not math.isfinite(p) or p <= 0 or p == 1:
        raise FunctionSpecError(f"pow exponent must be positive and != 1, got {p}")
    curvature = CONCAVE if p < 1 else CONVEX
    return ScalarFunction(
        name=f"pow:{p:g}",
        fn=lambda t: np.power(t, p),
        deriv1=lambda t: p * np.power(t, p - 1),
        deriv2=lambda t: p * (p - 1) * np.power(t, p - 2),
        domain=_NONNEG,
        monotone=INCREASING,
        curvature=curvature,
    )


def _affine(a: float, b: float) -> ScalarFunction:
    if a == 0 or not (math.isfinite(a) and math.isfinite(b)):
        raise FunctionSpecError(f"affine slope must be finite and nonzero, got {a}")
    return ScalarFunction(
        name=f"affine:{a:g},{b:g}",
        fn=lambda t: a * t + b,
        deriv1=lambda t: np.full_like(t, a, dtype=float),
        deriv2=lambda t: np.zeros_like(t, dtype=float),
        domain=Domain(),
        monotone=INCREASING if a > 0 else DECREASING,
        curvature=LINEAR,
    )


def builtin(name: str, params=()) -> ScalarFunction:
    """Return a catalog function.

    Parameters
    ----------
    name : str
        One of ``sqrt``, ``pow`` (one exponent), ``log1p``, ``affine``
        (slope, offset) or ``square``.
    params : sequence of float
        Parameters for ``pow`` and ``affine``.

    Examples
    --------
    >>> float(builtin("sqrt").d1(4.0))
    0.25
    """
    params = [float(p) for p in params]
    expected = {"sqrt": 0, "pow": 1, "log1p": 0, "affine": 2, "square": 0}
    if name not in expected:
        raise FunctionSpecError(f"unknown function {name!r}")
    if len(params) != expected[name]:
        raise FunctionSpecError(
            f"{name} takes {expected[name]} parameter(s), got {len(params)}"
        )
    if name == "sqrt":
        return ScalarFunction(
            name="sqrt",
            fn=np.sqrt,
            deriv1=lambda t: 0.5 / np.sqrt(t),
            deriv2=lambda t: -0.25 * np.power(t, -1.5),
            domain=_NONNEG,
            monotone=INCREASING,
            curvature=CONCAVE,
        )
    if name == "square":
        return ScalarFunction(
            name="square",
            fn=np.square,
            deriv1=lambda t: 2.0 * t,
            deriv2=lambda t: np.full_like(t, 2.0, dtype=float),
            domain=_NONNEG,
            monotone=INCREASING,
            curvature=CONVEX,
        )
    if name == "log1p":
        return ScalarFunction(
            name="log1p",
            fn=np.log1p,
            deriv1=lambda t: 1.0 / (1.0 + t),
            deriv2=lambda t: -1.0 / (1.0 + t) ** 2,
            domain=Domain(-1.0, math.inf),
            monotone=INCREASING,
            curvature=CONCAVE,
        )
    if name == "pow":
        return _pow(params[0])
    return _affine(*params)


def negate(f: ScalarFunction) -> ScalarFunction:
    """Return ``-f``; monotonicity and curvature flip."""
    if f.name.startswith("neg(") and f.name.endswith(")"):
        name = f.name[4:-1]
    else:
        name = f"neg({f.name})"
    flip_c = {CONCAVE: CONVEX, CONVEX: CONCAVE, LINEAR: LINEAR}
    return ScalarFunction(
        name=name,
        fn=lambda t: -f.fn(t),
        deriv1=lambda t: -f.deriv1(t),
        deriv2=lambda t: -f.deriv2(t),
        domain=f.domain,
        monotone=DECREASING if f.increasing else INCREASING,
        curvature=flip_c[f.curvature],
    )


def _composed_curvature(outer: ScalarFunction, inner: ScalarFunction) -> str:
    if inner.curvature == LINEAR:
        return outer.curvature
    if outer.curvature == LINEAR:
        if outer.increasing:
            return inner.curvature
        return CONVEX if inner.curvature == CONCAVE else CONCAVE
    # concave increasing of concave, convex increasing of convex,
    # concave decreasing of convex, convex decreasing of concave
    if outer.increasing and outer.curvature == inner.curvature:
        return outer.curvature
    if not outer.increasing and outer.curvature != inner.curvature:
        return outer.curvature
    raise UnsupportedCompositionError(
        f"cannot infer curvature of {outer.name} o {inner.name} "
        f"({outer.curvature} {outer.monotone} of {inner.curvature})"
    )


def _affine_preimage(f: ScalarFunction, target: Domain) -> Domain:
    """Domain of ``t`` with ``f(t)`` in ``target`` for affine ``f``."""
    b = float(f.fn(np.array(0.0)))
    a = float(f.fn(np.array(1.0))) - b
    if a > 0:
        return Domain((target.lo - b) / a, (target.hi - b) / a, target.closed_lo)
    # a decreasing map sends the closed left end to an open-right end; drop it
    return Domain((target.hi - b) / a, (target.lo - b) / a, False)


def compose(g: ScalarFunction, f: ScalarFunction, grid_points=1000) -> ScalarFunction:
    """Return ``g o f`` with chain-rule derivatives.

    The range of ``f`` is checked against the domain of ``g`` on a sampled
    grid of ``f``'s domain; the caller remains responsible for the
    analytic inclusion.
    """
    curvature = _composed_curvature(g, f)
    monotone = INCREASING if g.increasing == f.increasing else DECREASING
    domain = f.domain
    if f.curvature == LINEAR and not np.isfinite(f.domain.lo) and not np.isfinite(f.domain.hi):
        domain = _affine_preimage(f, g.domain)

    lo = domain.lo if math.isfinite(domain.lo) else -1e3
    hi = domain.hi if math.isfinite(domain.hi) else lo + 1e3
    # geometric points hug the ends, where open domains usually misbehave
    near = np.logspace(-9, 0, grid_points // 4)
    ts = np.concatenate([np.linspace(lo, hi, grid_points), lo + near, hi - near])
    ts = ts[domain.contains(ts)]
    vals = f.fn(ts)
    if not np.all(g.domain.contains(vals)):
        bad = vals[~g.domain.contains(vals)][0]
        raise DomainError(
            f"range of {f.name} leaves domain {g.domain} of {g.name} (value {bad!r})"
        )

    if f.name == "affine:1,0":
        name = g.name
    elif g.name == "affine:1,0":
        name = f.name
    else:
        name = f"compose({g.name},{f.name})"

    def d2(t):
        ft = f.fn(t)
        return g.deriv2(ft) * f.deriv1(t) ** 2 + g.deriv1(ft) * f.deriv2(t)

    return ScalarFunction(
        name=name,
        fn=lambda t: g.fn(f.fn(t)),
        deriv1=lambda t: g.deriv1(f.fn(t)) * f.deriv1(t),
        deriv2=d2,
        domain=domain,
        monotone=monotone,
        curvature=curvature,
    )


def tangent(h: ScalarFunction, lam: float) -> TangentLine:
    """Tangent line of ``h`` at ``lam``: ``h'(lam) t - lam h'(lam) + h(lam)``."""
    slope = float(h.d1(lam))
    return TangentLine(slope=slope, intercept=float(h(lam)) - lam * slope, base=float(lam))


def _split_args(text: str) -> list[str]:
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise FunctionSpecError(f"unbalanced parentheses in {text!r}")
        elif ch == "," and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    if depth != 0:
        raise FunctionSpecError(f"unbalanced parentheses in {text!r}")
    parts.append(text[start:])
    return parts


def parse(spec: str) -> ScalarFunction:
    """Parse the function mini-language.

    >>> parse("compose(sqrt,sqrt)").name
    'compose(sqrt,sqrt)'
    >>> parse("neg(pow:0.5)").curvature
    'convex'
    """
    if not spec or any(ch.isspace() for ch in spec):
        raise FunctionSpecError(f"function spec must be non-empty and whitespace-free: {spec!r}")
    if spec.endswith(")") and "(" in spec:
        head, _, rest = spec.partition("(")
        args = _split_args(rest[:-1])
        if head == "neg":
            if len(args) != 1:
                raise FunctionSpecError("neg takes exactly one argument")
            return negate(parse(args[0]))
        if head == "compose":
            if len(args) != 2:
                raise FunctionSpecError("compose takes exactly two arguments")
            return compose(parse(args[0]), parse(args[1]))
        raise FunctionSpecError(f"unknown combinator {head!r}")
    name, _, rest = spec.partition(":")
    params = []
    if rest:
        try:
            params = [float(p) for p in rest.split(",")]
        except ValueError:
            raise FunctionSpecError(f"bad parameters in {spec!r}") from None
    return builtin(name, params)
