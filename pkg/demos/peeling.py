"""
Peeling off the top eigenspace
==============================

If the Jensen-type relation holds in both directions between ``X`` and
``Y`` for a strictly monotone convex ``f``, then ``X == Y``. The certificate
repeatedly takes the top eigenspace of ``f(Y)``, checks that ``f(X)`` has
the same norm and is flat there, and restricts both matrices to the
complement. Unequal inputs fail the premise with a concrete witness.
"""

import numpy as np

from jensen_order.antisymmetry import decide_equal, find_violation
from jensen_order.ensembles import random_hermitian
from jensen_order.scalar import builtin

rng = np.random.default_rng(3)
square = builtin("square")

X = random_hermitian(5, rng, (0.5, 10))
trace = decide_equal(square, X, X, "convex-ge")
print("X against itself:", trace.conclusion)
print("level rank  ||f(X)||    ||f(Y)||    eq-residual")
for s in trace.steps:
    print(f"{s.level:5d} {s.Q.rank:4d}  {s.norms[0]:10.5f}  {s.norms[1]:10.5f}  {s.equality_residual:.2e}")

# a repeated eigenvalue is peeled in one go
trace = decide_equal(square, np.eye(3), np.eye(3), "convex-ge")
print("\nidentity:", trace.conclusion, "in", len(trace.steps), "step")

# nudge one eigenvalue: the relation breaks on that eigenvector
Y = np.diag([1.0, 2.0, 3.01])
trace = decide_equal(square, np.diag([1.0, 2.0, 3.0]), Y, "convex-ge")
w = trace.verdict.witness
print("\ndiag(1,2,3) vs diag(1,2,3.01):", trace.conclusion)
print("  witness |xi_k|:", np.round(np.abs(w), 6))

# the same search on a random pair
X, Y = random_hermitian(4, rng), random_hermitian(4, rng)
v = find_violation(builtin("sqrt"), X, Y, "concave-le")
print(f"\nrandom pair: violated in ordering {v.ordering}, by {v.lhs - v.rhs:.4g}")
