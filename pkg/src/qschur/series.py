"""Truncated slice-regular power series ``sum_n p^n a_n``.

Powers of the variable sit on the left and coefficients on the right. The
star product of two such series is the Cauchy convolution of their
coefficient sequences, computed modulo ``p^(N+1)``.
"""

from __future__ import annotations

import math
import warnings
from typing import Callable

import numpy as np

from .errors import NonUnit, ShapeMismatch, TruncationExhausted
from .qlinalg import QMatrix, inverse as qinverse
from .quaternion import Quaternion, UnitImaginary, decompose, qabs, qconj, qmul

DEFAULT_TRUNC = 32
NONUNIT_TOL = 1e-12


class RadiusWarning(UserWarning):
    """Evaluation point lies outside the estimated disc of convergence."""


def _convolve(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Coefficients 0..n of the Cauchy product of quaternion sequences a, b."""
    prods = qmul(a[: n + 1, None, :], b[None, : n + 1, :])
    idx = np.add.outer(np.arange(prods.shape[0]), np.arange(prods.shape[1]))
    out = np.zeros((idx.max() + 1, 4))
    np.add.at(out, idx, prods)
    return out[: n + 1]


def _real_series_inverse(c: np.ndarray) -> np.ndarray:
    """Formal reciprocal of a real power series (recursive division)."""
    out = np.zeros_like(c)
    out[0] = 1.0 / c[0]
    for n in range(1, len(c)):
        out[n] = -np.dot(c[1 : n + 1], out[n - 1 :: -1][:n]) / c[0]
    return out


class QSeries:
    """Quaternion power series known through degree ``trunc``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        if isinstance(coeffs, np.ndarray) and coeffs.ndim == 2:
            arr = np.array(coeffs, dtype=float)
        else:
            arr = np.array([Quaternion.coerce(c).array for c in coeffs], dtype=float).reshape(-1, 4)
        if arr.ndim != 2 or arr.shape[1] != 4 or arr.shape[0] == 0:
            raise ShapeMismatch("a series needs at least one quaternion coefficient")
        arr.setflags(write=False)
        self.coeffs = arr

    @classmethod
    def zeros(cls, trunc: int = DEFAULT_TRUNC) -> "QSeries":
        return cls(np.zeros((trunc + 1, 4)))

    @classmethod
    def constant(cls, c, trunc: int = DEFAULT_TRUNC) -> "QSeries":
        arr = np.zeros((trunc + 1, 4))
        arr[0] = Quaternion.coerce(c).array
        return cls(arr)

    @classmethod
    def unit(cls, trunc: int = DEFAULT_TRUNC) -> "QSeries":
        return cls.constant(1.0, trunc)

    @classmethod
    def monomial(cls, n: int, c=1.0, trunc: int = DEFAULT_TRUNC) -> "QSeries":
        arr = np.zeros((trunc + 1, 4))
        if n <= trunc:
            arr[n] = Quaternion.coerce(c).array
        return cls(arr)

    @classmethod
    def geometric(cls, a, trunc: int = DEFAULT_TRUNC) -> "QSeries":
        """``sum_n p^n a^n``, the star reciprocal of ``1 - p a``."""
        a = Quaternion.coerce(a)
        out, c = [], Quaternion(1.0)
        for _ in range(trunc + 1):
            out.append(c)
            c = c * a
        return cls(out)

    @classmethod
    def random(cls, rng: np.random.Generator, trunc: int, scale: float = 1.0) -> "QSeries":
        return cls(rng.normal(size=(trunc + 1, 4)) * scale)

    @property
    def trunc(self) -> int:
        return self.coeffs.shape[0] - 1

    def __len__(self) -> int:
        return self.coeffs.shape[0]

    def __getitem__(self, n: int) -> Quaternion:
        return Quaternion.from_array(self.coeffs[n])

    def coefficients(self) -> list:
        return [Quaternion.from_array(c) for c in self.coeffs]

    def truncate(self, trunc: int) -> "QSeries":
        if trunc <= self.trunc:
            return QSeries(self.coeffs[: trunc + 1])
        arr = np.zeros((trunc + 1, 4))
        arr[: len(self)] = self.coeffs
        return QSeries(arr)

    def is_real(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.coeffs[:, 1:]) <= tol))

    # algebra
    def __add__(self, other: "QSeries") -> "QSeries":
        n = min(self.trunc, other.trunc)
        return QSeries(self.coeffs[: n + 1] + other.coeffs[: n + 1])

    def __sub__(self, other: "QSeries") -> "QSeries":
        n = min(self.trunc, other.trunc)
        return QSeries(self.coeffs[: n + 1] - other.coeffs[: n + 1])

    def __neg__(self) -> "QSeries":
        return QSeries(-self.coeffs)

    def __mul__(self, other) -> "QSeries":
        """Right multiplication of every coefficient by a constant."""
        if isinstance(other, QSeries):
            raise TypeError("use star_mul (or @) for the series product")
        return QSeries(qmul(self.coeffs, Quaternion.coerce(other).array))

    def __rmul__(self, other) -> "QSeries":
        return QSeries(qmul(Quaternion.coerce(other).array, self.coeffs))

    def __matmul__(self, other: "QSeries") -> "QSeries":
        return star_mul(self, other)

    def max_abs_diff(self, other: "QSeries") -> float:
        n = min(self.trunc, other.trunc)
        return float(np.max(qabs(self.coeffs[: n + 1] - other.coeffs[: n + 1])))

    def __eq__(self, other):
        return isinstance(other, QSeries) and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None

    def __repr__(self) -> str:
        return f"QSeries(trunc={self.trunc})"

    def __call__(self, p) -> Quaternion:
        return evaluate(self, p)


def star_mul(f: QSeries, g: QSeries) -> QSeries:
    """Slice-regular product: ``c_n = sum_{r<=n} a_r b_{n-r}``."""
    n = min(f.trunc, g.trunc)
    return QSeries(_convolve(f.coeffs, g.coeffs, n))


def conj_series(f: QSeries) -> QSeries:
    return QSeries(qconj(f.coeffs))


def symmetrize(f: QSeries) -> QSeries:
    """``f^s = f^c * f``; its coefficients are real, so the imaginary parts
    (pure round-off) are zeroed."""
    fs = _convolve(qconj(f.coeffs), f.coeffs, f.trunc)
    scale = max(float(np.max(np.abs(fs))), 1.0)
    resid = float(np.max(np.abs(fs[:, 1:]))) if len(fs) else 0.0
    if resid > 1e-8 * scale:  # pragma: no cover - would mean a broken product
        raise ArithmeticError(f"symmetrization is not real (residual {resid:.3e})")
    fs[:, 1:] = 0.0
    return QSeries(fs)


def star_reciprocal(f: QSeries) -> QSeries:
    """``f^(-*) = (f^s)^(-1) f^c``.

    ``f^s`` has real coefficients, so its inverse is an ordinary formal power
    series inverse and commutes with everything.
    """
    if f[0].norm() < NONUNIT_TOL:
        raise NonUnit("constant term vanishes; no star reciprocal")
    fs_inv = _real_series_inverse(symmetrize(f).coeffs[:, 0])
    real_part = np.zeros((len(fs_inv), 4))
    real_part[:, 0] = fs_inv
    return QSeries(_convolve(real_part, qconj(f.coeffs), f.trunc))


def radius_estimate(f: QSeries) -> float:
    """Root-test radius of convergence over the top quartile of indices."""
    n = f.trunc
    if n == 0:
        return math.inf
    lo = max(1, n - max(1, (n + 1) // 4) + 1)
    mags = qabs(f.coeffs[lo:])
    roots = [m ** (1.0 / k) for k, m in zip(range(lo, n + 1), mags) if m > 0]
    if not roots:
        return math.inf
    return 1.0 / max(roots)


def evaluate(f: QSeries, p, warn: bool = True) -> Quaternion:
    """Horner evaluation of ``sum_n p^n a_n`` (variable on the left)."""
    p = Quaternion.coerce(p)
    if warn and p.norm() >= radius_estimate(f):
        warnings.warn(f"|p| = {p.norm():.3g} is outside the estimated radius", RadiusWarning, stacklevel=2)
    pa = p.array
    acc = f.coeffs[-1]
    for c in f.coeffs[-2::-1]:
        acc = c + qmul(pa, acc)
    return Quaternion.from_array(acc)


def shift(f: QSeries) -> QSeries:
    """Formal ``p^{-1}(f - f(0))``: drop the constant coefficient."""
    if f.trunc == 0:
        raise TruncationExhausted("series known only through degree 0 cannot be shifted")
    return QSeries(f.coeffs[1:])


def extend_from_slice(f_on_slice: Callable[[complex], Quaternion], I, p) -> Quaternion:
    """Extension operator: slice-regular value at ``p`` from values on ``C_I``.

    ``f_on_slice`` receives the complex number ``x + y*1j`` standing for the
    point ``x + I y`` of the slice and must return a quaternion.
    """
    I = UnitImaginary.coerce(I)
    p = Quaternion.coerce(p)
    x, y, Ip = decompose(p)
    if Ip is None:
        return Quaternion.coerce(f_on_slice(complex(x, 0.0)))
    fz = Quaternion.coerce(f_on_slice(complex(x, y)))
    fzbar = Quaternion.coerce(f_on_slice(complex(x, -y)))
    return (fz + fzbar) * 0.5 + (Ip.axis * I.axis) * (fzbar - fz) * 0.5


class MatrixQSeries:
    """Power series with coefficients in H^{rows x cols}."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        if isinstance(coeffs, np.ndarray):
            arr = np.array(coeffs, dtype=float)
        else:
            arr = np.array([c.data for c in coeffs], dtype=float)
        if arr.ndim != 4 or arr.shape[-1] != 4 or arr.shape[0] == 0:
            raise ShapeMismatch("matrix series needs coefficients of a common shape")
        arr.setflags(write=False)
        self.coeffs = arr

    @classmethod
    def from_scalar(cls, f: QSeries) -> "MatrixQSeries":
        return cls(f.coeffs[:, None, None, :])

    @classmethod
    def identity(cls, n: int, trunc: int = DEFAULT_TRUNC) -> "MatrixQSeries":
        arr = np.zeros((trunc + 1, n, n, 4))
        arr[0] = QMatrix.eye(n).data
        return cls(arr)

    def to_scalar(self) -> QSeries:
        if self.shape != (1, 1):
            raise ShapeMismatch(f"series of {self.shape} matrices is not scalar")
        return QSeries(self.coeffs[:, 0, 0, :])

    @property
    def trunc(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def shape(self) -> tuple:
        return self.coeffs.shape[1:3]

    def __len__(self) -> int:
        return self.coeffs.shape[0]

    def __getitem__(self, n: int) -> QMatrix:
        return QMatrix(self.coeffs[n])

    def coefficients(self) -> list:
        return [QMatrix(c) for c in self.coeffs]

    def truncate(self, trunc: int) -> "MatrixQSeries":
        if trunc <= self.trunc:
            return MatrixQSeries(self.coeffs[: trunc + 1])
        arr = np.zeros((trunc + 1,) + self.coeffs.shape[1:])
        arr[: len(self)] = self.coeffs
        return MatrixQSeries(arr)

    def __add__(self, other: "MatrixQSeries") -> "MatrixQSeries":
        n = min(self.trunc, other.trunc)
        return MatrixQSeries(self.coeffs[: n + 1] + other.coeffs[: n + 1])

    def __sub__(self, other: "MatrixQSeries") -> "MatrixQSeries":
        n = min(self.trunc, other.trunc)
        return MatrixQSeries(self.coeffs[: n + 1] - other.coeffs[: n + 1])

    def __matmul__(self, other: "MatrixQSeries") -> "MatrixQSeries":
        return matrix_star_mul(self, other)

    def max_abs_diff(self, other: "MatrixQSeries", upto: int | None = None) -> float:
        n = min(self.trunc, other.trunc)
        if upto is not None:
            n = min(n, upto)
        return float(np.max(qabs(self.coeffs[: n + 1] - other.coeffs[: n + 1]), initial=0.0))

    def __repr__(self) -> str:
        return f"MatrixQSeries(shape={self.shape}, trunc={self.trunc})"


def matrix_star_mul(F: MatrixQSeries, G: MatrixQSeries) -> MatrixQSeries:
    if F.shape[1] != G.shape[0]:
        raise ShapeMismatch(f"cannot star-multiply {F.shape} by {G.shape} series")
    n = min(F.trunc, G.trunc)
    Fc, Gc = F.coefficients(), G.coefficients()
    out = []
    for k in range(n + 1):
        acc = QMatrix.zeros(F.shape[0], G.shape[1])
        for r in range(k + 1):
            acc = acc + Fc[r] @ Gc[k - r]
        out.append(acc)
    return MatrixQSeries(out)


def matrix_star_inverse(F: MatrixQSeries) -> MatrixQSeries:
    """Two-sided star inverse of a square matrix series with invertible F(0).

    Uses the recursion ``G_n = -F_0^{-1} sum_{k=1}^n F_k G_{n-k}``.
    """
    if F.shape[0] != F.shape[1]:
        raise ShapeMismatch("star inverse needs square coefficients")
    Fc = F.coefficients()
    try:
        F0inv = qinverse(Fc[0])
    except Exception as exc:
        raise NonUnit("constant coefficient is not invertible") from exc
    G = [F0inv]
    for n in range(1, F.trunc + 1):
        acc = QMatrix.zeros(*F.shape)
        for k in range(1, n + 1):
            acc = acc + Fc[k] @ G[n - k]
        G.append(-(F0inv @ acc))
    return MatrixQSeries(G)


def matrix_evaluate(F: MatrixQSeries, p) -> QMatrix:
    """Horner evaluation with the scalar variable acting on the left."""
    p = Quaternion.coerce(p)
    acc = F[F.trunc]
    for n in range(F.trunc - 1, -1, -1):
        acc = F[n] + p * acc
    return acc

