"""Sphere enumeration in the 8-dimensional lattice psi(Lambda).

The Gram matrix is built at 128 bits; enumeration walks the Cholesky factor.
Counts grow like R^8, so the volume heuristic guards every call.
"""

import math

from cdalattice import build_lattice, count_points, enumerate_ball, load_spec

lat = build_lattice(load_spec("golden"))
print("dimension", lat.dim, "covolume", round(lat.covolume, 6))

for p in enumerate_ball(lat, math.sqrt(2)):
    print(p.coords, "norm^2 =", p.norm_sq, "Nrd =", p.nrd, "(boundary)" if p.boundary else "")

radii = [1, math.sqrt(2), 2, 3, 4, 6]
for R, n in count_points(lat, radii):
    print(f"|L({R:.4f})| = {n:>8}   volume heuristic {lat.predicted_count(R):12.1f}")

print("largest radius under the default cap:", round(lat.max_radius_for_cap(), 3))
