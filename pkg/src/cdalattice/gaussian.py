"""Arbitrary-precision Gaussian integers."""

from __future__ import annotations

from math import gcd


class GaussianInt:
    """An element ``re + im*i`` of Z[i] with Python-int components."""

    __slots__ = ("re", "im")

    def __init__(self, re: int = 0, im: int = 0):
        object.__setattr__(self, "re", int(re))
        object.__setattr__(self, "im", int(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianInt is immutable")

    @classmethod
    def coerce(cls, value) -> "GaussianInt":
        if isinstance(value, GaussianInt):
            return value
        if isinstance(value, int):
            return cls(value, 0)
        if isinstance(value, complex) and value.real.is_integer() and value.imag.is_integer():
            return cls(int(value.real), int(value.imag))
        if isinstance(value, (tuple, list)) and len(value) == 2:
            return cls(int(value[0]), int(value[1]))
        raise TypeError(f"cannot interpret {value!r} as a Gaussian integer")

    def __repr__(self):
        return f"GaussianInt({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"

    def __eq__(self, other):
        if isinstance(other, int):
            return self.im == 0 and self.re == other
        if not isinstance(other, GaussianInt):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re or self.im)

    def __neg__(self):
        return GaussianInt(-self.re, -self.im)

    def __add__(self, other):
        other = _maybe(other)
        if other is None:
            return NotImplemented
        return GaussianInt(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _maybe(other)
        if other is None:
            return NotImplemented
        return GaussianInt(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _maybe(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _maybe(other)
        if other is None:
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        return GaussianInt(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not Gaussian integers in general")
        result, base = GaussianInt(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> "GaussianInt":
        return GaussianInt(self.re, -self.im)

    def norm(self) -> int:
        """The field norm a^2 + b^2."""
        return self.re * self.re + self.im * self.im

    def is_unit(self) -> bool:
        return self.norm() == 1

    def divides(self, other) -> bool:
        other = GaussianInt.coerce(other)
        if not self:
            return not other
        num = other * self.conjugate()
        n = self.norm()
        return num.re % n == 0 and num.im % n == 0

    def exact_div(self, divisor) -> "GaussianInt":
        """Quotient ``self / divisor``; raises ValueError if it is not in Z[i]."""
        divisor = GaussianInt.coerce(divisor)
        if not divisor:
            raise ZeroDivisionError("division by zero Gaussian integer")
        num = self * divisor.conjugate()
        n = divisor.norm()
        if num.re % n or num.im % n:
            raise ValueError(f"{divisor} does not divide {self}")
        return GaussianInt(num.re // n, num.im // n)

    def content(self) -> int:
        return gcd(self.re, self.im)

    def __complex__(self):
        return complex(self.re, self.im)


def _maybe(value):
    if isinstance(value, GaussianInt):
        return value
    if isinstance(value, int):
        return GaussianInt(value, 0)
    return None


ZERO = GaussianInt(0, 0)
ONE = GaussianInt(1, 0)
I = GaussianInt(0, 1)
UNITS = (ONE, I, -ONE, -I)
