"""
Tangent lines versus the unit sphere
====================================

For concave ``h`` the relation ``<h(A)xi,xi> <= h(<B xi,xi>)`` over all unit
vectors is equivalent to a family of Loewner inequalities, one per tangent
line of ``h``. This script decides a few pairs both ways and shows the
tangent gap as a function of the base point.
"""

import numpy as np

from jensen_order.ensembles import random_hermitian
from jensen_order.hermitian import apply_function
from jensen_order.relation import check_relation_sphere, check_relation_tangent, tangent_scan
from jensen_order.scalar import parse, tangent

rng = np.random.default_rng(7)
h = parse("sqrt")

# one tangent line: it touches sqrt at 4 and lies above it elsewhere
T = tangent(h, 4.0)
t = np.linspace(0.5, 12, 6)
print("tangent at 4: slope", T.slope, "intercept", T.intercept)
print("T(t) - sqrt(t):", np.round(T.slope * t + T.intercept - np.sqrt(t), 4))

# B = A + (something positive): the relation holds
A = random_hermitian(4, rng, (0.5, 10))
B = A + random_hermitian(4, rng, (0.0, 1.0))
print("\nA <= B case")
print("  tangent:", check_relation_tangent(h, A, B).holds)
print("  sphere: ", check_relation_sphere(h, A, B).holds)

# swap them and it fails; both methods hand back a witness
v = check_relation_tangent(h, B, A)
s = check_relation_sphere(h, B, A)
print("\nswapped")
print(f"  tangent: holds={v.holds} margin={v.margin:.4g} lambda*={v.lambda_star:.4g}")
print(f"  sphere:  holds={s.holds} margin={s.margin:.4g}")
print(f"  witness values <h(A)xi,xi>={v.lhs:.6f} > h(<B xi,xi>)={v.rhs:.6f}")

# swapped pair: smallest eigenvalue of the tangent inequality across the spectrum of A
scan = tangent_scan(h, apply_function(h, B), A, grid_points=9)
for lam, gap in zip(scan.lambda_grid, scan.gaps):
    print(f"  lambda={lam:7.3f}  gap={gap:+.4f}")
