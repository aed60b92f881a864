"""Exact arithmetic in the Golden-code algebra.

D = (Q(i, sqrt 5)/Q(i), sigma, i): every element of the natural order is
x_0 + u x_1 with x_j in Z[i][theta]. Reduced norms, inverses and the ideal
and unit predicates below are exact; nothing here touches floating point.
"""

from cdalattice import invert, is_unit, load_spec, reduced_norm, same_left_ideal, same_unit_coset
from cdalattice.analysis import ideal_index

spec = load_spec("golden")
one, u = spec.one(), spec.u()
theta = spec.embed_field(spec.field.generator)

print("Nrd(1)     =", reduced_norm(one))
print("Nrd(u)     =", reduced_norm(u))
print("Nrd(1 + u) =", reduced_norm(one + u))
print("Nrd(theta) =", reduced_norm(theta))

# u^2 = gamma and x u = u sigma(x)
print("u*u == i:", u * u == spec.scalar(spec.gamma))
print("theta*u == u*sigma(theta):", theta * u == u * spec.embed_field(spec.field.generator.sigma()))

x = one + u
inv = invert(x)
print("(1+u)^-1 has denominator", inv.denominator, "and x * x^-1 == 1:", x * inv == one)
print("1+u is a unit:", is_unit(x), "| u is a unit:", is_unit(u))

# [L : L x] = |Nrd(x)|^(2n)
print("[L : L(1+u)] =", ideal_index(x), "=", reduced_norm(x).norm() ** 2)
print("L u == L:", same_left_ideal(u, one))
print("u and 1 share an O_E^* coset:", same_unit_coset(u, one))
print("1 and theta share an O_E^* coset:", same_unit_coset(one, theta))
