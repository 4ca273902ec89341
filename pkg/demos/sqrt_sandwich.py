"""
Sandwich bounds for f = g = sqrt
================================

With ``f = g = sqrt`` the composed sandwich squeezes ``sqrt(Y)`` between
``2 lam^(1/4) X^(1/4) - sqrt(lam)`` and the tangent ``X/(2 sqrt(lam)) +
sqrt(lam)/2``. The gap is second order in ``X - lam``, with a constant
``c`` fitted on a box ``[a, b]``. Slicing the spectrum of ``X`` into ``n``
pieces gives an estimate of ``||sqrt(X) - sqrt(Y)||`` that decays like
``n^(-1/2)``. Here every step of that chain is evaluated.
"""

import numpy as np

from jensen_order.ensembles import random_hermitian
from jensen_order.sandwich import compute_constants, operator_bounds, sweep
from jensen_order.scalar import builtin

sqrt = builtin("sqrt")

# constants on [1, 16]; the exact extremum of the curvature term is 3*16^(1/4)/16
k = compute_constants(sqrt, sqrt, 1.0, 16.0)
print(f"c_raw = {k.c_raw:.6f} (exact 0.375), c = {k.c:.6f}, alpha = {k.alpha:.6f}")

# the two operator bounds for a scalar X = 4 and base point 1
lo, up = operator_bounds(sqrt, sqrt, [[4.0]], 1.0)
print(f"lower {lo[0, 0].real:.6f} <= sqrt(4) = 2 <= upper {up[0, 0].real:.6f}")

# the sweep over n at X = Y: all bounds hold, the final estimate shrinks
rng = np.random.default_rng(11)
X = random_hermitian(4, rng, (1, 16))
b = np.linalg.norm(X, 2) + 1
print("\n   n    bound3 lhs/rhs           final rhs   pass")
for r in sweep(sqrt, sqrt, X, X, 0.5, b, [2, 8, 32, 128, 512]):
    print(f"{r.n:4d}    {r.bound3.lhs:.2e} / {r.bound3.rhs:.2e}    {r.final.rhs:9.4f}   {r.passed}")

# a slightly larger Y violates the premises; the residuals widen the tests
Y = X + 1e-3 * np.eye(4)
r = sweep(sqrt, sqrt, X, Y, 0.5, b + 0.01, [64])[0]
print(f"\nY = X + 1e-3: residuals {r.premise_residuals}, final lhs {r.final.lhs:.3e}, pass {r.passed}")
