"""Units of the natural order versus units of O_E.

O_E^* = <i> x <theta> grows only logarithmically inside a ball, while the
unit group of the order keeps producing new O_E^*-cosets. Both sides are
exact: the closed-form scan over theta^b is checked against enumeration.
"""

from cdalattice import build_lattice, census_grid, load_spec, oe_unit_count
from cdalattice.analysis import oe_unit_exponents

spec = load_spec("golden")
lat = build_lattice(spec)
run = census_grid(lat, [2, 3, 4, 6])

for r, brute in zip(run.rows, run.oe_unit_brute):
    print(f"R={r.R:<4} units={r.unit_count:<6} O_E units={r.oe_unit_count:<3} (enumerated {brute})  cosets={r.coset_count}")

print("theta exponents inside R=6:", oe_unit_exponents(spec, 6.0))
for R in (10, 100, 10 ** 4, 10 ** 8):
    print(f"closed form at R={R:>9}: {oe_unit_count(spec, R)}")

print("first coset representatives:")
for rep in run.coset_representatives[:6]:
    print("  ", rep)
