"""Determinant sums, Epstein sums and growth exponents over a radius grid.

One enumeration at the largest radius feeds every statistic. The NVD and
Minkowski checks run on every point along the way.
"""

from cdalattice import build_lattice, census_grid, fit_growth, load_spec

lat = build_lattice(load_spec("golden"))
run = census_grid(lat, [2, 3, 4, 6], sum_exponent=2)

print("R      points     det_sum    epstein   units  oe  cosets  zeta")
for r in run.rows:
    print(f"{r.R:<5} {r.point_count:>8} {r.det_sum:>11.2f} {r.epstein_sum:>10.2f} {r.unit_count:>6} {r.oe_unit_count:>3} {r.coset_count:>6}  {r.partial_zeta:.6f}")
print("NVD violations:", run.nvd_violations, " Minkowski violations:", run.minkowski_violations, " min |Nrd|^2:", run.min_nrd_sq)

for col, target in [("point_count", 8), ("epstein_sum", 4), ("det_sum", None)]:
    f = fit_growth([(r.R, getattr(r, col)) for r in run.rows])
    note = f" (target {target})" if target else ""
    print(f"{col:12s} exponent {f.exponent:.3f}{note}, rms residual {f.residual:.3f}")
