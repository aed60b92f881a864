"""Principal left ideals and the partial zeta sum.

Each nonzero x gives the ideal L x of index |Nrd(x)|^4. Ideals are told
apart by the Hermite normal form of their integer basis, computed modulo the
index, so grouping is linear in the number of points.
"""

import random

from cdalattice import build_lattice, enumerate_ball, ideal_index, load_spec, partial_zeta, reduced_norm
from cdalattice.analysis import group_ideals_pairwise

spec = load_spec("golden")
rng = random.Random(1)
for _ in range(5):
    x = spec.from_coords([rng.randint(-3, 3) for _ in range(8)])
    print(f"[L : Lx] = {ideal_index(x):>10}   |Nrd(x)|^4 = {reduced_norm(x).norm() ** 2:>10}")

lat = build_lattice(spec)
pts = list(enumerate_ball(lat, 2.5))
classes = group_ideals_pairwise([p.element for p in pts])
print(len(pts), "points in B(2.5) generate", len(classes), "distinct principal ideals")
for R in (1.5, 2, 2.5, 3, 4):
    print(f"partial zeta(2) over B({R}) = {partial_zeta(enumerate_ball(lat, R)):.8f}")
