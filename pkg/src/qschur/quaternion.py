"""Quaternion arithmetic and the slice geometry of the skew field H.

A quaternion is stored as four floats ``(w, x, y, z)`` standing for
``w + x i + y j + z k``. Array helpers at the bottom operate on numpy arrays
whose trailing axis has length 4; every other module builds on them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

import numpy as np

from .errors import DivisionByZero

Real = Union[int, float]

REL_TOL = 1e-10


def qmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product of broadcastable arrays with trailing axis 4."""
    a0, a1, a2, a3 = np.moveaxis(np.asarray(a, dtype=float), -1, 0)
    b0, b1, b2, b3 = np.moveaxis(np.asarray(b, dtype=float), -1, 0)
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ],
        axis=-1,
    )


def qconj(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out[..., 1:] *= -1.0
    return out


def qabs(a: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.asarray(a, dtype=float) ** 2, axis=-1))


@dataclass(frozen=True)
class Quaternion:
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    # construction / conversion
    @classmethod
    def from_array(cls, arr) -> "Quaternion":
        w, x, y, z = (float(v) for v in np.asarray(arr, dtype=float).reshape(4))
        return cls(w, x, y, z)

    @classmethod
    def coerce(cls, value) -> "Quaternion":
        if isinstance(value, Quaternion):
            return value
        if isinstance(value, (int, float, np.floating, np.integer)):
            return cls(float(value))
        return cls.from_array(value)

    @property
    def array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def tolist(self) -> list:
        return [self.w, self.x, self.y, self.z]

    def __iter__(self):
        return iter((self.w, self.x, self.y, self.z))

    # parts
    @property
    def real(self) -> float:
        return self.w

    @property
    def imag(self) -> "Quaternion":
        return Quaternion(0.0, self.x, self.y, self.z)

    def is_real(self, tol: float = 0.0) -> bool:
        return math.sqrt(self.x**2 + self.y**2 + self.z**2) <= tol

    # arithmetic
    def __add__(self, other):
        o = Quaternion.coerce(other)
        return Quaternion(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)

    __radd__ = __add__

    def __sub__(self, other):
        o = Quaternion.coerce(other)
        return Quaternion(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)

    def __rsub__(self, other):
        return Quaternion.coerce(other) - self

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            s = float(other)
            return Quaternion(self.w * s, self.x * s, self.y * s, self.z * s)
        if not isinstance(other, Quaternion):
            return NotImplemented
        return hamilton(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        """Right division: ``a / b == a * b.inverse()``."""
        if isinstance(other, (int, float, np.floating, np.integer)):
            if other == 0:
                raise DivisionByZero("division of a quaternion by zero")
            return self * (1.0 / float(other))
        return self * Quaternion.coerce(other).inverse()

    def __rtruediv__(self, other):
        return Quaternion.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = Quaternion(1.0)
        for _ in range(n):
            out = out * self
        return out

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm2(self) -> float:
        return self.w**2 + self.x**2 + self.y**2 + self.z**2

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    __abs__ = norm

    def inverse(self) -> "Quaternion":
        n2 = self.norm2()
        if n2 == 0.0:
            raise DivisionByZero("quaternion 0 has no inverse")
        return self.conj() * (1.0 / n2)

    def isclose(self, other, rel: float = REL_TOL, abs_tol: float = 1e-12) -> bool:
        o = Quaternion.coerce(other)
        d = (self - o).norm()
        return d <= max(rel * max(self.norm(), o.norm()), abs_tol)

    def __repr__(self) -> str:
        return f"Quaternion({self.w!r}, {self.x!r}, {self.y!r}, {self.z!r})"

    def __str__(self) -> str:
        return f"{self.w:g}{self.x:+g}i{self.y:+g}j{self.z:+g}k"


ONE = Quaternion(1.0)
ZERO = Quaternion()
QI = Quaternion(0.0, 1.0)
QJ = Quaternion(0.0, 0.0, 1.0)
QK = Quaternion(0.0, 0.0, 0.0, 1.0)


def hamilton(a: Quaternion, b: Quaternion) -> Quaternion:
    return Quaternion(
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    )


def conj(a: Quaternion) -> Quaternion:
    return a.conj()


def norm(a: Quaternion) -> float:
    return a.norm()


def inverse(a: Quaternion) -> Quaternion:
    return a.inverse()


class UnitImaginary:
    """A point of the sphere of purely imaginary unit quaternions.

    Every such ``I`` squares to -1 and spans, together with 1, the complex
    slice ``C_I = R + I R``.
    """

    __slots__ = ("axis",)

    def __init__(self, axis, tol: float = 1e-10):
        q = Quaternion.coerce(axis)
        if abs(q.w) > tol or abs(q.norm() - 1.0) > tol:
            raise ValueError(f"{q} is not a unit imaginary quaternion")
        object.__setattr__(self, "axis", q)

    def __setattr__(self, name, value):
        raise AttributeError("UnitImaginary is immutable")

    @classmethod
    def from_vector(cls, x: float, y: float, z: float) -> "UnitImaginary":
        n = math.sqrt(x * x + y * y + z * z)
        if n == 0.0:
            raise ValueError("zero vector has no direction")
        return cls(Quaternion(0.0, x / n, y / n, z / n))

    @classmethod
    def coerce(cls, value) -> "UnitImaginary":
        return value if isinstance(value, UnitImaginary) else cls(value)

    def __eq__(self, other):
        return isinstance(other, UnitImaginary) and self.axis == other.axis

    def __hash__(self):
        return hash(self.axis)

    def __repr__(self):
        return f"UnitImaginary({self.axis!r})"

    def slice_point(self, z: complex) -> Quaternion:
        """Image of the complex number ``z = a + b*1j`` in the slice ``C_I``."""
        return Quaternion(z.real) + self.axis * z.imag


UNIT_I = UnitImaginary(QI)
UNIT_J = UnitImaginary(QJ)
UNIT_K = UnitImaginary(QK)


class Decomposition(NamedTuple):
    re: float
    im_norm: float
    axis: Optional[UnitImaginary]


def decompose(p) -> Decomposition:
    """Split ``p = re + axis * im_norm``; ``axis`` is None for real ``p``."""
    p = Quaternion.coerce(p)
    im_norm = math.sqrt(p.x**2 + p.y**2 + p.z**2)
    if im_norm == 0.0:
        return Decomposition(p.w, 0.0, None)
    # normalise by hand: the constructor's tolerance check is redundant here
    axis = UnitImaginary.__new__(UnitImaginary)
    object.__setattr__(axis, "axis", Quaternion(0.0, p.x / im_norm, p.y / im_norm, p.z / im_norm))
    return Decomposition(p.w, im_norm, axis)


def sphere_point(p, J) -> Quaternion:
    """The element ``Re(p) + J |Im(p)|`` of the 2-sphere ``[p]``."""
    p = Quaternion.coerce(p)
    J = UnitImaginary.coerce(J)
    re, im_norm, _ = decompose(p)
    return Quaternion(re) + J.axis * im_norm


def random_quaternion(rng: np.random.Generator, scale: float = 1.0) -> Quaternion:
    return Quaternion.from_array(rng.normal(size=4) * scale)


def random_unit_imaginary(rng: np.random.Generator) -> UnitImaginary:
    v = rng.normal(size=3)
    return UnitImaginary.from_vector(*v)


def random_in_ball(rng: np.random.Generator, radius: float = 1.0) -> Quaternion:
    """Uniform sample from the open ball of the given radius."""
    v = rng.normal(size=4)
    v /= np.linalg.norm(v)
    r = radius * rng.uniform() ** 0.25
    return Quaternion.from_array(v * r)
