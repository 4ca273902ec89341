"""Seeded randomized campaigns: method agreement and contrapositive search."""

from __future__ import annotations

import numpy as np

from .antisymmetry import find_violation
from .ensembles import random_hermitian, random_pair_apart
from .hermitian import apply_function
from .relation import (
    check_relation_sphere,
    check_relation_tangent,
    jensen_value,
    normalize_direction,
)
from .scalar import parse

__all__ = ["AGREEMENT_FUNCTIONS", "agreement_case", "contrapositive_case", "run_campaign"]

AGREEMENT_FUNCTIONS = ("sqrt", "pow:0.3", "log1p")
CONTRAPOSITIVE_FUNCTIONS = (("sqrt", "concave-le"), ("square", "convex-ge"))


def _case_rng(seed: int, suite: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, suite, index])


def agreement_case(seed: int, index: int, dims=(1, 6), spectrum=(0.5, 10.0), restarts=64):
    """Draw one ``(h, A, B)`` case and decide it with both methods.

    Even-indexed cases pair ``A`` with ``B = A + (positive part)``, where
    the relation holds; odd ones draw ``B`` independently.
    """
    rng = _case_rng(seed, 0, index)
    n = int(rng.integers(dims[0], dims[1] + 1))
    spec = AGREEMENT_FUNCTIONS[index % len(AGREEMENT_FUNCTIONS)]
    h = parse(spec)
    A = random_hermitian(n, rng, spectrum)
    if index % 2 == 0:
        B = A + random_hermitian(n, rng, (0.0, 1.0))
    else:
        B = random_hermitian(n, rng, spectrum)
    B = 0.5 * (B + B.conj().T)
    t = check_relation_tangent(h, A, B)
    s = check_relation_sphere(h, A, B, restarts=restarts, seed=seed + index)
    agree = t.holds == s.holds
    witnesses_ok = True
    if agree and not t.holds:
        hA = apply_function(h, A)
        for v in (t, s):
            lhs, rhs = jensen_value(h, hA, B, v.witness)
            witnesses_ok &= (lhs - rhs > v.tolerance) and abs(np.linalg.norm(v.witness) - 1) <= 1e-12
    return {
        "index": index,
        "function": spec,
        "dim": n,
        "tangent": t,
        "sphere": s,
        "agree": bool(agree and witnesses_ok),
        "A": A,
        "B": B,
    }


def contrapositive_case(seed: int, index: int, dims=(2, 5), spectrum=(0.5, 10.0),
                        budget=64, min_distance=0.1):
    """Draw ``X != Y`` and search for a violated relation."""
    rng = _case_rng(seed, 1, index)
    n = int(rng.integers(dims[0], dims[1] + 1))
    spec, direction = CONTRAPOSITIVE_FUNCTIONS[index % len(CONTRAPOSITIVE_FUNCTIONS)]
    X, Y = random_pair_apart(n, rng, spectrum, min_distance, near=(index // 2) % 2 == 1)
    f = parse(spec)
    v = find_violation(f, X, Y, direction, seed=seed + index, budget=budget)
    found = v is not None
    if found:
        h = normalize_direction(f, direction)
        A, B = (X, Y) if v.ordering == "X,Y" else (Y, X)
        lhs, rhs = jensen_value(h, apply_function(h, A), B, v.witness)
        found = lhs - rhs > v.tolerance
    return {
        "index": index,
        "function": spec,
        "direction": direction,
        "dim": n,
        "verdict": v,
        "found": bool(found),
        "X": X,
        "Y": Y,
    }


def run_campaign(count: int, seed=0, dims=(2, 6), spectrum=(0.5, 10.0), restarts=64):
    """Run ``count`` cases of each suite; returns ``(summary, discrepancies)``.

    ``summary`` is a JSON-ready dict; each discrepancy carries the matrices
    needed to reproduce it.
    """
    rows_a, rows_c, bad = [], [], []
    for i in range(count):
        r = agreement_case(seed, i, dims, spectrum, restarts)
        rows_a.append({
            "index": i, "function": r["function"], "dim": r["dim"],
            "tangent_holds": r["tangent"].holds, "sphere_holds": r["sphere"].holds,
            "tangent_margin": r["tangent"].margin, "sphere_margin": r["sphere"].margin,
            "agree": r["agree"],
        })
        if not r["agree"]:
            bad.append({"suite": "agreement", "index": i, "function": r["function"],
                        "direction": "concave-le", "matrices": {"A": r["A"], "B": r["B"]}})
    for i in range(count):
        r = contrapositive_case(seed, i, dims, spectrum, restarts)
        v = r["verdict"]
        rows_c.append({
            "index": i, "function": r["function"], "direction": r["direction"], "dim": r["dim"],
            "found": r["found"],
            "ordering": v.ordering if v is not None else None,
            "margin": v.margin if v is not None else None,
        })
        if not r["found"]:
            bad.append({"suite": "contrapositive", "index": i, "function": r["function"],
                        "direction": r["direction"], "matrices": {"X": r["X"], "Y": r["Y"]}})
    summary = {
        "count": count,
        "seed": seed,
        "dims": list(dims),
        "spectrum": list(spectrum),
        "restarts": restarts,
        "agreement": {"cases": rows_a, "disagreements": sum(not r["agree"] for r in rows_a)},
        "contrapositive": {"cases": rows_c, "missed": sum(not r["found"] for r in rows_c)},
        "discrepancies": len(bad),
    }
    return summary, bad
