"""Exact arithmetic in E/Q(i) and in the cyclic algebra D = (E/Q(i), sigma, gamma).

E is described by a monic minimal polynomial over Z[i] of a generator theta
whose powers 1, theta, ..., theta^(n-1) form a Z[i]-basis of the ring of
integers. Elements of the natural order are tuples of n field elements
``x_0 + u x_1 + ... + u^(n-1) x_(n-1)`` with ``x u = u sigma(x)`` and
``u^n = gamma``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import permutations
from typing import Sequence

from .errors import InternalConsistencyError, NotAUnitError, ZeroElementError
from .gaussian import ONE, ZERO, GaussianInt


def permutation_sign(perm: Sequence[int]) -> int:
    sign, seen = 1, [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length, j = 0, start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


class ExtensionField:
    """Arithmetic of O_E in the power basis of a generator theta."""

    def __init__(self, min_poly, sigma_matrix):
        coeffs = tuple(GaussianInt.coerce(c) for c in min_poly)
        if len(coeffs) < 2 or coeffs[-1] != ONE:
            raise ValueError("minimal polynomial must be monic of degree >= 1")
        self.degree = n = len(coeffs) - 1
        self.min_poly = coeffs
        # theta^k in the power basis, k = 0 .. 2n-2
        powers = []
        for k in range(2 * n - 1):
            if k < n:
                powers.append(tuple(ONE if j == k else ZERO for j in range(n)))
            else:
                prev = powers[-1]
                top = prev[n - 1]
                shifted = (ZERO,) + prev[:-1]
                powers.append(tuple(shifted[j] - top * coeffs[j] for j in range(n)))
        self._powers = tuple(powers)
        self.mult_table = tuple(
            tuple(powers[j + k] for k in range(n)) for j in range(n)
        )
        self.sigma_matrix = tuple(
            tuple(GaussianInt.coerce(v) for v in row) for row in sigma_matrix
        )
        if len(self.sigma_matrix) != n or any(len(r) != n for r in self.sigma_matrix):
            raise ValueError(f"sigma_matrix must be {n}x{n}")
        mats = [_identity(n)]
        for _ in range(n):
            mats.append(_matmul(self.sigma_matrix, mats[-1]))
        self._sigma_powers = tuple(mats)

    def element(self, coords) -> "FieldElement":
        return FieldElement(self, tuple(GaussianInt.coerce(c) for c in coords))

    @cached_property
    def zero(self) -> "FieldElement":
        return self.element([0] * self.degree)

    @cached_property
    def one(self) -> "FieldElement":
        return self.scalar(ONE)

    @cached_property
    def generator(self) -> "FieldElement":
        if self.degree == 1:
            raise ValueError("degree-1 extension has no separate generator")
        return self.element([1 if j == 1 else 0 for j in range(self.degree)])

    def scalar(self, g) -> "FieldElement":
        g = GaussianInt.coerce(g)
        return FieldElement(self, (g,) + (ZERO,) * (self.degree - 1))

    def sigma_power_matrix(self, k: int):
        return self._sigma_powers[k % self.degree]

    def sigma_order(self) -> int:
        """Multiplicative order of the sigma matrix, or 0 if it exceeds 2n."""
        ident = _identity(self.degree)
        m = ident
        for k in range(1, 2 * self.degree + 1):
            m = _matmul(self.sigma_matrix, m)
            if m == ident:
                return k
        return 0

    def sigma_is_homomorphism(self) -> bool:
        """True iff the columns of sigma_matrix are the powers of sigma(theta)."""
        if self.degree == 1:
            return self.sigma_matrix == ((ONE,),)
        image = FieldElement(self, tuple(row[1] for row in self.sigma_matrix))
        acc = self.one
        for j in range(self.degree):
            col = tuple(row[j] for row in self.sigma_matrix)
            if acc.coords != col:
                return False
            acc = acc * image
        # sigma(theta) must also be a root of the minimal polynomial
        value = self.zero
        power = self.one
        for c in self.min_poly:
            value = value + power.scale(c)
            power = power * image
        return value.is_zero()

    def __eq__(self, other):
        if not isinstance(other, ExtensionField):
            return NotImplemented
        return self.min_poly == other.min_poly and self.sigma_matrix == other.sigma_matrix

    def __hash__(self):
        return hash((self.min_poly, self.sigma_matrix))


def _identity(n):
    return tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))


def _matmul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    return tuple(
        tuple(sum((a[i][k] * b[k][j] for k in range(m)), ZERO) for j in range(p))
        for i in range(n)
    )


class FieldElement:
    """An element of O_E as n Z[i]-coordinates in the power basis."""

    __slots__ = ("field", "coords")

    def __init__(self, field: ExtensionField, coords: tuple):
        if len(coords) != field.degree:
            raise ValueError(f"expected {field.degree} coordinates, got {len(coords)}")
        self.field = field
        self.coords = coords

    def __repr__(self):
        return f"FieldElement({[str(c) for c in self.coords]})"

    def __eq__(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __add__(self, other):
        return FieldElement(self.field, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        return FieldElement(self.field, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.coords))

    def scale(self, g) -> "FieldElement":
        g = GaussianInt.coerce(g)
        return FieldElement(self.field, tuple(g * a for a in self.coords))

    def __mul__(self, other):
        if not isinstance(other, FieldElement):
            return self.scale(other)
        n = self.field.degree
        table = self.field.mult_table
        out = [ZERO] * n
        for j, a in enumerate(self.coords):
            if not a:
                continue
            for k, b in enumerate(other.coords):
                if not b:
                    continue
                ab = a * b
                for l, c in enumerate(table[j][k]):
                    if c:
                        out[l] = out[l] + ab * c
        return FieldElement(self.field, tuple(out))

    __rmul__ = scale

    def sigma(self, k: int = 1) -> "FieldElement":
        mat = self.field.sigma_power_matrix(k)
        return FieldElement(
            self.field,
            tuple(sum((row[j] * c for j, c in enumerate(self.coords)), ZERO) for row in mat),
        )

    def in_base(self) -> bool:
        return not any(self.coords[1:])

    def to_gaussian(self) -> GaussianInt:
        if not self.in_base():
            raise InternalConsistencyError(
                f"element {self!r} was expected to lie in Q(i) but has nonzero "
                "coordinates outside the base field"
            )
        return self.coords[0]

    def conjugate_product(self) -> "FieldElement":
        """Product of the nontrivial conjugates sigma^1(x) ... sigma^(n-1)(x)."""
        acc = self.field.one
        for k in range(1, self.field.degree):
            acc = acc * self.sigma(k)
        return acc

    def norm(self) -> GaussianInt:
        """Relative norm N_{E/Q(i)}(x)."""
        return (self * self.conjugate_product()).to_gaussian()

    def is_unit(self) -> bool:
        return not self.is_zero() and self.norm().is_unit()

    def pow(self, k: int) -> "FieldElement":
        if k < 0:
            inv = self.inverse_unit()
            return inv.pow(-k)
        result, base = self.field.one, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse_unit(self) -> "FieldElement":
        """Inverse of a unit of O_E."""
        nrm = self.norm()
        if not nrm.is_unit():
            raise NotAUnitError(f"{self!r} is not a unit of O_E")
        return self.conjugate_product().scale(nrm.conjugate())


@dataclass(frozen=True)
class UnitData:
    fundamental: tuple
    roots_of_unity: int


@dataclass(frozen=True, eq=False)
class AlgebraSpec:
    """Full description of a cyclic algebra over Q(i) and its natural order."""

    name: str
    field: ExtensionField
    gamma: GaussianInt
    embeddings: tuple  # n pairs of decimal strings (re, im): images of sigma^j(theta)
    unit_data: UnitData | None = None
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def degree(self) -> int:
        return self.field.degree

    @property
    def lattice_dim(self) -> int:
        return 2 * self.degree ** 2

    def __eq__(self, other):
        if not isinstance(other, AlgebraSpec):
            return NotImplemented
        return (
            self.name == other.name
            and self.field == other.field
            and self.gamma == other.gamma
            and self.embeddings == other.embeddings
            and self.unit_data == other.unit_data
        )

    def __hash__(self):
        return hash((self.name, self.field, self.gamma, self.embeddings))

    def element(self, parts) -> "AlgebraElement":
        conv = []
        for p in parts:
            if isinstance(p, FieldElement):
                conv.append(p)
            elif isinstance(p, (list, tuple)):
                conv.append(self.field.element(p))
            else:
                conv.append(self.field.scalar(p))
        if len(conv) != self.degree:
            raise ValueError(f"expected {self.degree} parts, got {len(conv)}")
        return AlgebraElement(self, tuple(conv))

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, (self.field.zero,) * self.degree)

    def one(self) -> "AlgebraElement":
        return self.embed_field(self.field.one)

    def scalar(self, g) -> "AlgebraElement":
        return self.embed_field(self.field.scalar(g))

    def u(self, power: int = 1) -> "AlgebraElement":
        """u^power for 0 <= power < n."""
        if not 0 <= power < self.degree:
            raise ValueError("power must lie in [0, n)")
        parts = [self.field.zero] * self.degree
        parts[power] = self.field.one
        return AlgebraElement(self, tuple(parts))

    def embed_field(self, x: FieldElement) -> "AlgebraElement":
        return AlgebraElement(self, (x,) + (self.field.zero,) * (self.degree - 1))

    def from_coords(self, coords) -> "AlgebraElement":
        """Element whose integer coordinates in the lattice generator basis are ``coords``.

        Coordinate ``2*(i*n + j) + t`` multiplies ``u^i * i^t * theta^j``.
        """
        n = self.degree
        if len(coords) != 2 * n * n:
            raise ValueError(f"expected {2 * n * n} coordinates")
        vals = [int(c) for c in coords]
        parts = []
        for i in range(n):
            parts.append(
                FieldElement(
                    self.field,
                    tuple(
                        GaussianInt(vals[2 * (i * n + j)], vals[2 * (i * n + j) + 1])
                        for j in range(n)
                    ),
                )
            )
        return AlgebraElement(self, tuple(parts))


class AlgebraElement:
    """Element of the natural order as parts (x_0, ..., x_(n-1))."""

    __slots__ = ("spec", "parts")

    def __init__(self, spec: AlgebraSpec, parts: tuple):
        self.spec = spec
        self.parts = parts

    def __repr__(self):
        return "AlgebraElement(" + ", ".join(repr([str(c) for c in p.coords]) for p in self.parts) + ")"

    def __eq__(self, other):
        if isinstance(other, QAlgebraElement):
            return other == self
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.parts)

    def __add__(self, other):
        return AlgebraElement(self.spec, tuple(a + b for a, b in zip(self.parts, other.parts)))

    def __sub__(self, other):
        return AlgebraElement(self.spec, tuple(a - b for a, b in zip(self.parts, other.parts)))

    def __neg__(self):
        return AlgebraElement(self.spec, tuple(-a for a in self.parts))

    def scale(self, g) -> "AlgebraElement":
        return AlgebraElement(self.spec, tuple(p.scale(g) for p in self.parts))

    def __mul__(self, other):
        if isinstance(other, QAlgebraElement):
            return QAlgebraElement(self * other.numerator, other.denominator)
        if not isinstance(other, AlgebraElement):
            return self.scale(other)
        n = self.spec.degree
        gamma = self.spec.gamma
        out = [self.spec.field.zero] * n
        for a, xa in enumerate(self.parts):
            if xa.is_zero():
                continue
            for b, yb in enumerate(other.parts):
                if yb.is_zero():
                    continue
                # u^a x u^b y = u^(a+b) sigma^b(x) y
                term = xa.sigma(b) * yb
                k = a + b
                if k >= n:
                    k -= n
                    term = term.scale(gamma)
                out[k] = out[k] + term
        return AlgebraElement(self.spec, tuple(out))

    def __rmul__(self, other):
        return self.scale(other)

    def to_coords(self) -> tuple:
        out = []
        for p in self.parts:
            for c in p.coords:
                out.extend((c.re, c.im))
        return tuple(out)

    def in_field(self) -> bool:
        return all(p.is_zero() for p in self.parts[1:])

    def psi(self):
        """The matrix psi(x) with entries in O_E, as a list of rows."""
        n = self.spec.degree
        gamma = self.spec.gamma
        rows = []
        for r in range(n):
            row = []
            for c in range(n):
                entry = self.parts[(r - c) % n].sigma(c)
                if r < c:
                    entry = entry.scale(gamma)
                row.append(entry)
            rows.append(row)
        return rows


def field_determinant(matrix) -> FieldElement:
    """Leibniz expansion over E; intended for n <= 4."""
    n = len(matrix)
    fld = matrix[0][0].field
    total = fld.zero
    for perm in permutations(range(n)):
        term = fld.one
        for r, c in enumerate(perm):
            term = term * matrix[r][c]
            if term.is_zero():
                break
        else:
            if permutation_sign(perm) < 0:
                total = total - term
            else:
                total = total + term
    return total


def _minor(matrix, skip_row, skip_col):
    return [
        [v for c, v in enumerate(row) if c != skip_col]
        for r, row in enumerate(matrix)
        if r != skip_row
    ]


def reduced_norm(x: AlgebraElement, spec: AlgebraSpec | None = None) -> GaussianInt:
    """det psi(x) as an exact Gaussian integer."""
    det = field_determinant(x.psi())
    if not det.in_base():
        raise InternalConsistencyError(
            f"reduced norm of {x!r} is not in Q(i) ({det!r}); "
            "check sigma_matrix and gamma in the algebra config"
        )
    return det.coords[0]


def is_unit(x: AlgebraElement, spec: AlgebraSpec | None = None) -> bool:
    return reduced_norm(x).is_unit()


@dataclass(frozen=True, eq=False)
class QAlgebraElement:
    """``numerator * denominator^-1`` with a central Gaussian-integer denominator."""

    numerator: AlgebraElement
    denominator: GaussianInt

    def __post_init__(self):
        if not self.denominator:
            raise ZeroElementError("denominator must be nonzero")

    def __eq__(self, other):
        if isinstance(other, AlgebraElement):
            other = QAlgebraElement(other, ONE)
        if not isinstance(other, QAlgebraElement):
            return NotImplemented
        return self.numerator.scale(other.denominator) == other.numerator.scale(self.denominator)

    def __hash__(self):
        raise TypeError("QAlgebraElement is unhashable; compare with ==")

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return QAlgebraElement(self.numerator * other, self.denominator)
        return QAlgebraElement(self.numerator * other.numerator, self.denominator * other.denominator)

    def __rmul__(self, other):
        return QAlgebraElement(other * self.numerator, self.denominator)

    def is_integral(self) -> bool:
        d = self.denominator
        return all(d.divides(c) for p in self.numerator.parts for c in p.coords)

    def to_integral(self) -> AlgebraElement:
        d = self.denominator
        spec = self.numerator.spec
        return AlgebraElement(
            spec,
            tuple(
                FieldElement(spec.field, tuple(c.exact_div(d) for c in p.coords))
                for p in self.numerator.parts
            ),
        )


def invert(x: AlgebraElement, spec: AlgebraSpec | None = None) -> QAlgebraElement:
    """x^-1 as adjugate over reduced norm.

    The first column of adj(psi(x)) holds the parts of Nrd(x) * x^-1.
    """
    if x.is_zero():
        raise ZeroElementError("cannot invert the zero element")
    mat = x.psi()
    n = len(mat)
    nrd = field_determinant(mat)
    if not nrd.in_base():
        raise InternalConsistencyError(f"reduced norm of {x!r} is not in Q(i)")
    if nrd.is_zero():
        raise InternalConsistencyError(f"nonzero element {x!r} has zero reduced norm")
    parts = []
    for r in range(n):
        if n == 1:
            cof = x.spec.field.one
        else:
            cof = field_determinant(_minor(mat, 0, r))
        parts.append(-cof if r % 2 else cof)
    return QAlgebraElement(AlgebraElement(x.spec, tuple(parts)), nrd.coords[0])


def same_left_ideal(x: AlgebraElement, y: AlgebraElement, spec: AlgebraSpec | None = None) -> bool:
    """True iff the principal left ideals generated by x and y coincide."""
    if x.is_zero() or y.is_zero():
        raise ZeroElementError("principal ideals of zero are not compared")
    return (x * invert(y)).is_integral() and (y * invert(x)).is_integral()


def same_unit_coset(x: AlgebraElement, y: AlgebraElement, spec: AlgebraSpec | None = None) -> bool:
    """True iff the units x and y lie in the same coset of O_E^*."""
    for name, v in (("x", x), ("y", y)):
        if v.is_zero() or not is_unit(v):
            raise NotAUnitError(f"argument {name} is not a unit of the natural order")
    q = invert(x) * y
    if not q.is_integral():
        return False
    z = q.to_integral()
    return z.in_field() and z.parts[0].is_unit()


def unit_coset_key(x: AlgebraElement) -> tuple:
    """Hashable invariant with key(x) == key(y) iff x O_E^* == y O_E^* for units x, y.

    Consists of the zero pattern of the parts, the ratios x_i / x_lead as exact
    rational coordinates, and the canonical basis of the O_E-ideal x_lead O_E.
    """
    from .hnf import field_ideal_key

    parts = x.parts
    pattern = tuple(not p.is_zero() for p in parts)
    lead = pattern.index(True)
    xl = parts[lead]
    inv_num = xl.conjugate_product()
    d = (xl * inv_num).to_gaussian()
    dc = d.conjugate()
    denom = d.norm()
    ratios = []
    for i, p in enumerate(parts):
        if i == lead or not pattern[i]:
            continue
        num = (p * inv_num).scale(dc)
        ratios.append(
            tuple((Fraction(c.re, denom), Fraction(c.im, denom)) for c in num.coords)
        )
    return pattern, tuple(ratios), field_ideal_key(xl)
