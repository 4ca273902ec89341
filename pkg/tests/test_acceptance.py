"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the lines are printed in
the terminal summary (and immediately with ``-s``). Running the file as a
script prints them without pytest's reporting.
"""

import subprocess
import sys
import time

import numpy as np
import pytest

from jensen_order.antisymmetry import EQUAL, decide_equal, find_violation
from jensen_order.ensembles import random_hermitian, random_pair_apart
from jensen_order.fuzz import agreement_case
from jensen_order.hermitian import Projection, apply_function, opnorm, schur_complement_identity_residual
from jensen_order.relation import jensen_value, normalize_direction
from jensen_order.sandwich import (
    check_sandwich,
    compute_constants,
    inverse_gap,
    kernel_match,
    near_zero_ratio,
    quadratic_gap,
    sweep,
)
from jensen_order.scalar import builtin

SEED = 20240601
SQRT = builtin("sqrt")
SQUARE = builtin("square")


def record(log, number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}"
    log.append(line)
    print(line)
    assert ok, line


def test_method_agreement(acceptance_log):
    t0 = time.perf_counter()
    results = [agreement_case(SEED, i, dims=(1, 6)) for i in range(200)]
    elapsed = time.perf_counter() - t0
    agree = sum(r["agree"] for r in results)
    violated = sum(not r["tangent"].holds for r in results)
    ok = agree == 200 and elapsed < 60.0
    record(acceptance_log, 1, "tangent/sphere agreement", ok,
           f"{agree}/200 agree ({violated} violated cases with verified witnesses), "
           f"{elapsed:.1f} s (limit 60 s)")


def test_equality_certificate_and_violations(acceptance_log):
    rng = np.random.default_rng([SEED, 2])
    equal = 0
    for _ in range(100):
        n = int(rng.integers(2, 7))
        X = random_hermitian(n, rng, (0.5, 10.0))
        equal += all(decide_equal(f, X, X, d).conclusion == EQUAL
                     for f, d in ((SQUARE, "convex-ge"), (SQRT, "concave-le")))
    found = 0
    for i in range(100):
        n = int(rng.integers(2, 6))
        X, Y = random_pair_apart(n, rng, (0.5, 10.0), 0.1, near=i % 2 == 1)
        hits = 0
        for f, d in ((SQRT, "concave-le"), (SQUARE, "convex-ge")):
            v = find_violation(f, X, Y, d, seed=i)
            if v is None:
                continue
            h = normalize_direction(f, d)
            A, B = (X, Y) if v.ordering == "X,Y" else (Y, X)
            lhs, rhs = jensen_value(h, apply_function(h, A), B, v.witness)
            hits += lhs - rhs > v.tolerance
        found += hits == 2
    ok = equal == 100 and found == 100
    record(acceptance_log, 2, "equality certificate and contrapositive", ok,
           f"EQUAL on {equal}/100 X=X inputs (square and sqrt); "
           f"verified witness on {found}/100 pairs with ||X-Y|| >= 0.1 (both functions)")


def test_scalar_sweeps(acceptance_log):
    k = compute_constants(SQRT, SQRT, 1.0, 16.0)
    pts = np.linspace(1.0, 16.0, 100)
    lam, t = np.meshgrid(pts, pts, indexing="ij")
    g_quad = float(quadratic_gap(k, lam, t).min())
    g_inv = float(inverse_gap(k, lam, t).min())
    analytic = 3 * 16**0.25 / (16 * 1.0**1.75)
    rel = abs(k.c_raw / analytic - 1)
    ok = g_quad >= -1e-12 and g_inv >= -1e-12 and rel <= 0.10
    record(acceptance_log, 3, "second-order constant sweeps", ok,
           f"min gaps {g_quad:.3g} / {g_inv:.3g} (>= -1e-12); c_raw={k.c_raw:.6g} vs 0.375 "
           f"(rel err {rel:.2g}, limit 0.10)")


def test_schur_identity(acceptance_log):
    rng = np.random.default_rng([SEED, 4])
    worst = 0.0
    fails = 0
    for _ in range(100):
        n = int(rng.integers(2, 9))
        M = random_hermitian(n, rng, (0.5, 10.0))
        r = int(rng.integers(1, n))
        P = Projection.from_vectors(rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r)))
        res = schur_complement_identity_residual(M, P)
        ratio = res / (1e-10 * (1 + opnorm(M)))
        worst = max(worst, ratio)
        fails += ratio > 1
    record(acceptance_log, 4, "Schur complement identity", fails == 0,
           f"{100 - fails}/100 within 1e-10(1+||M||); worst residual at {worst:.2g} of tolerance")


def test_discretization_at_equality(acceptance_log):
    rng = np.random.default_rng([SEED, 5])
    ns = [2 ** j for j in range(1, 9)]
    passed, ratios = 0, []
    for _ in range(20):
        n = int(rng.integers(2, 7))
        X = random_hermitian(n, rng, (1.0, 16.0))
        b = opnorm(X) + 1
        reports = sweep(SQRT, SQRT, X, X, 0.5, b, ns)
        passed += all(r.passed for r in reports) and all(r.premise_residuals == (0.0, 0.0)
                                                          for r in reports)
        rhs = {r.n: r.final.rhs for r in reports}
        ratios.append(rhs[4] / rhs[256])
    worst = max(abs(r / 8 - 1) for r in ratios)
    ok = passed == 20 and worst <= 0.25
    record(acceptance_log, 5, "discretization audit at X=Y", ok,
           f"{passed}/20 matrices pass every bound for n=2..256; rhs(4)/rhs(256) in "
           f"[{min(ratios):.3f}, {max(ratios):.3f}] vs 8 (worst rel dev {worst:.3f}, limit 0.25)")


def test_ratio_unbounded(acceptance_log):
    vals = [near_zero_ratio(1.0, lam) for lam in (1e-2, 1e-4, 1e-6, 1e-8)]
    r7 = near_zero_ratio(1.0, 1e-7)
    increasing = all(x < y for x, y in zip(vals, vals[1:]))
    ok = increasing and r7 > 1e3
    record(acceptance_log, 6, "ratio blows up near 0", ok,
           "ratios " + ", ".join(f"{v:.6g}" for v in vals) + f"; ratio(1, 1e-7) = {r7:.6g} (> 1e3)")


def test_kernel_matching(acceptance_log):
    rng = np.random.default_rng([SEED, 7])
    good = 0
    for _ in range(10):
        n = int(rng.integers(2, 6))
        Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        V = np.linalg.qr(Z)[0]
        w = np.concatenate([[0.0], rng.uniform(1.0, 16.0, n - 1)])
        X = (V * w) @ V.conj().T
        X = 0.5 * (X + X.conj().T)
        w2 = w.copy()
        w2[0] = 0.01
        Y = (V * w2) @ V.conj().T
        Y = 0.5 * (Y + Y.conj().T)
        same = kernel_match(SQRT, SQRT, X, X)
        _, right = check_sandwich(SQRT, SQRT, X, Y)
        at_kernel = (not right.holds
                     and abs(np.vdot(V[:, 0], right.witness)) ** 2 >= 1 - 1e-6)
        good += same and at_kernel
    record(acceptance_log, 7, "kernel matching", good == 10,
           f"{good}/10: kernel_match(X, X) true and right-side witness on the kernel vector "
           "once its eigenvalue is raised to 0.01")


def test_fuzz_determinism(acceptance_log, tmp_path):
    cmd = [sys.executable, "-m", "jensen_order.cli", "fuzz", "--count", "200", "--seed", "0",
           "--case-dir", str(tmp_path / "cases")]
    runs = [subprocess.run(cmd, capture_output=True, check=False) for _ in range(2)]
    same = runs[0].stdout == runs[1].stdout and len(runs[0].stdout) > 0
    codes = [r.returncode for r in runs]
    ok = same and codes == [0, 0]
    record(acceptance_log, 8, "fuzz determinism", ok,
           f"two runs of fuzz --count 200 --seed 0: byte-identical={same}, "
           f"{len(runs[0].stdout)} bytes, exit codes {codes}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))
