"""A degree-4 algebra: E = Q(i, 2cos(2 pi/15)), gamma = i.

The lattice is 32-dimensional, so enumeration switches on LLL reduction of
the Gram matrix. Unit data is not shipped for this instance.
"""

from cdalattice import build_lattice, count_points, load_spec, reduced_norm
from cdalattice.lattice import collect_ball

spec = load_spec("perfect4")
lat = build_lattice(spec)
print("dimension", lat.dim, "| reduced basis:", lat.reduction is not None)
print(count_points(lat, [2, 2.5, 3, 3.5]))

ball = collect_ball(lat, 2.5)
norms = sorted({reduced_norm(spec.from_coords(c)).norm() for c in ball.coords})
print("|Nrd|^2 values in B(2.5):", norms)
