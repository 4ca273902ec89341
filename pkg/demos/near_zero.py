"""
Why the box must avoid zero
===========================

For ``f = g = sqrt`` the gap between the two tangent bounds, divided by
``(t - lam)^2``, blows up like ``lam^(-1/2)``. So no second-order constant
exists on a box reaching 0. The one-sided bound ``2 sqrt(lam X) - lam <= Y``
cannot be inverted by taking square roots either, since the left side is
usually indefinite. A positive kernel eigenvalue is still detected through
the right half of the sandwich.
"""

import numpy as np

from jensen_order.sandwich import check_sandwich, kernel_match, root_lower_bound, near_zero_ratio
from jensen_order.scalar import builtin

for lam in (1e-2, 1e-4, 1e-6, 1e-8):
    print(f"lam={lam:.0e}  ratio={near_zero_ratio(1.0, lam):12.3f}  1/(2 sqrt(lam))={0.5 / np.sqrt(lam):10.1f}")

X = np.diag([1.0, 9.0])
for lam in (1.0, 4.0, 9.0, 36.0):
    _, gap = root_lower_bound(X, lam)
    print(f"lam={lam:4.0f}  smallest eigenvalue of 2 sqrt(lam X) - lam: {gap:+.3f}")

# kernel: X has a null vector, Y lifts it to 0.01
sqrt = builtin("sqrt")
X = np.diag([0.0, 2.0, 5.0])
Y = np.diag([0.01, 2.0, 5.0])
_, right = check_sandwich(sqrt, sqrt, X, Y)
print("\nkernels match:", kernel_match(sqrt, sqrt, X, Y))
print("right half holds:", right.holds, " witness |xi|:", np.round(np.abs(right.witness), 6))
