"""Scalar quaternion arithmetic over plain floats.

Everything downstream (the indefinite Hermitian form, line projections,
the reduction of point tuples) is built on this noncommutative scalar
type.  Complex scalars are represented as quaternions with zero j and k
parts rather than as a separate type, so the complex verification suite
shares one arithmetic path with the quaternionic one.
"""

from __future__ import annotations

import math

__all__ = [
    "Quaternion",
    "q_mul",
    "q_conj",
    "q_inv",
    "ZERO",
    "ONE",
    "I",
    "J",
    "K",
]


class Quaternion:
    """A quaternion w + x*i + y*j + z*k with float coefficients.

    Multiplication follows the Hamilton convention i*j = k, j*k = i,
    k*i = j, and i^2 = j^2 = k^2 = -1.  Instances are immutable in
    spirit; no method mutates self.
    """

    __slots__ = ("w", "x", "y", "z")

    def __init__(self, w=0.0, x=0.0, y=0.0, z=0.0):
        self.w = float(w)
        self.x = float(x)
        self.y = float(y)
        self.z = float(z)

    # -- constructors ------------------------------------------------

    @classmethod
    def from_array(cls, a) -> "Quaternion":
        """Build from a length-4 sequence [w, x, y, z]."""
        if len(a) != 4:
            raise ValueError("quaternion array must have length 4")
        return cls(a[0], a[1], a[2], a[3])

    @classmethod
    def from_complex(cls, c) -> "Quaternion":
        """Embed a complex number into the i-plane (y = z = 0)."""
        c = complex(c)
        return cls(c.real, c.imag, 0.0, 0.0)

    def to_array(self):
        """Serialize as [w, x, y, z]; the 4-array convention used by all file formats."""
        return [self.w, self.x, self.y, self.z]

    # -- arithmetic --------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Quaternion(self.w + other.w, self.x + other.x,
                          self.y + other.y, self.z + other.z)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Quaternion(self.w - other.w, self.x - other.x,
                          self.y - other.y, self.z - other.z)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            a, b = self, other
            return Quaternion(
                a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
                a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
                a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
                a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
            )
        if isinstance(other, (int, float)):
            s = float(other)
            return Quaternion(self.w * s, self.x * s, self.y * s, self.z * s)
        return NotImplemented

    def __rmul__(self, other):
        # real scalars commute; anything else must go through __mul__
        if isinstance(other, (int, float)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        """Division by a real scalar only; for quaternions use a.inverse() explicitly,
        since a*b**-1 and b**-1*a differ."""
        if isinstance(other, (int, float)):
            return self * (1.0 / float(other))
        return NotImplemented

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm2(self) -> float:
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    def inverse(self) -> "Quaternion":
        n2 = self.norm2()
        if n2 == 0.0:
            raise ZeroDivisionError("inverse of the zero quaternion")
        return Quaternion(self.w / n2, -self.x / n2, -self.y / n2, -self.z / n2)

    def unit(self) -> "Quaternion":
        n = self.norm()
        if n == 0.0:
            raise ZeroDivisionError("unit of a zero quaternion")
        return self / n

    # -- structure ---------------------------------------------------

    @property
    def real(self) -> float:
        return self.w

    def imag_part(self) -> "Quaternion":
        """The pure-imaginary part x*i + y*j + z*k."""
        return Quaternion(0.0, self.x, self.y, self.z)

    def imag_norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def is_real(self, tol: float = 1e-9) -> bool:
        """True when max(|x|,|y|,|z|) <= tol * max(1, |q|)."""
        m = max(abs(self.x), abs(self.y), abs(self.z))
        return m <= tol * max(1.0, self.norm())

    def is_complex(self, tol: float = 1e-9) -> bool:
        """True when the j and k parts vanish relative to max(1, |q|)."""
        m = max(abs(self.y), abs(self.z))
        return m <= tol * max(1.0, self.norm())

    def is_zero(self, tol: float = 1e-9) -> bool:
        return self.norm() <= tol

    def approx_eq(self, other: "Quaternion", tol: float = 1e-9) -> bool:
        scale = max(1.0, self.norm(), other.norm())
        return (self - other).norm() <= tol * scale

    # -- misc --------------------------------------------------------

    def __repr__(self):
        return f"Quaternion({self.w!r}, {self.x!r}, {self.y!r}, {self.z!r})"

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self.w == other.w and self.x == other.x
                and self.y == other.y and self.z == other.z)

    def __hash__(self):
        return hash((self.w, self.x, self.y, self.z))


def _coerce(value):
    if isinstance(value, Quaternion):
        return value
    if isinstance(value, (int, float)):
        return Quaternion(value)
    return NotImplemented


def q_mul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product a*b (noncommutative; |a*b| = |a||b|)."""
    return a * b


def q_conj(a: Quaternion) -> Quaternion:
    """Conjugate; anti-homomorphism: conj(a*b) = conj(b)*conj(a)."""
    return a.conj()


def q_inv(a: Quaternion) -> Quaternion:
    """Two-sided inverse; raises ZeroDivisionError on the zero quaternion."""
    return a.inverse()


ZERO = Quaternion(0.0)
ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)
