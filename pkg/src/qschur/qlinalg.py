"""Dense matrices over H and linear algebra through the complex adjoint.

Entries are held in a float array of shape ``(rows, cols, 4)``. Products use
the Hamilton rule entry by entry, so ``A @ B`` respects the order of factors.
Inversion, norms, ranks and positivity are computed on the complex adjoint

    chi(M)  with  p = z1 + z2 j  ->  [[z1, z2], [-conj(z2), conj(z1)]]

which is an injective *-homomorphism from H^{r x c} into C^{2r x 2c}.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import NotHermitian, OddComplexRank, ShapeMismatch, Singular
from .quaternion import Quaternion, qconj, qmul

SINGULAR_GATE = 1e-12
RANK_TOL = 1e-10


class QMatrix:
    """Dense quaternion matrix (immutable by convention)."""

    __slots__ = ("data",)
    __array_priority__ = 1000  # keep numpy scalars from hijacking * and @

    def __init__(self, data):
        arr = np.array(data, dtype=float)
        if arr.ndim != 3 or arr.shape[2] != 4:
            raise ShapeMismatch(f"expected an array of shape (rows, cols, 4), got {arr.shape}")
        arr.setflags(write=False)
        self.data = arr

    # constructors
    @classmethod
    def zeros(cls, rows: int, cols: int) -> "QMatrix":
        return cls(np.zeros((rows, cols, 4)))

    @classmethod
    def eye(cls, n: int) -> "QMatrix":
        arr = np.zeros((n, n, 4))
        arr[np.arange(n), np.arange(n), 0] = 1.0
        return cls(arr)

    @classmethod
    def scalar(cls, q, n: int = 1) -> "QMatrix":
        arr = np.zeros((n, n, 4))
        arr[np.arange(n), np.arange(n)] = Quaternion.coerce(q).array
        return cls(arr)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "QMatrix":
        """Build from nested lists of quaternions / reals / 4-sequences."""
        rows = list(rows)
        if not rows:
            return cls.zeros(0, 0)
        arr = np.array([[Quaternion.coerce(v).array for v in row] for row in rows], dtype=float)
        if arr.ndim != 3:
            raise ShapeMismatch("ragged rows")
        return cls(arr)

    @classmethod
    def diag(cls, entries: Iterable) -> "QMatrix":
        entries = [Quaternion.coerce(e) for e in entries]
        arr = np.zeros((len(entries), len(entries), 4))
        for i, e in enumerate(entries):
            arr[i, i] = e.array
        return cls(arr)

    @classmethod
    def random(cls, rng: np.random.Generator, rows: int, cols: int, scale: float = 1.0) -> "QMatrix":
        return cls(rng.normal(size=(rows, cols, 4)) * scale)

    @classmethod
    def block(cls, blocks: Sequence[Sequence["QMatrix"]]) -> "QMatrix":
        return cls(np.concatenate([np.concatenate([b.data for b in row], axis=1) for row in blocks], axis=0))

    # shape and access
    @property
    def shape(self) -> tuple:
        return self.data.shape[:2]

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def __getitem__(self, key):
        if isinstance(key, tuple) and len(key) == 2 and all(isinstance(k, (int, np.integer)) for k in key):
            return Quaternion.from_array(self.data[key])
        if not isinstance(key, tuple):
            key = (key, slice(None))
        out = self.data[key[0], key[1]]
        if out.ndim == 2:  # a single row or column came back flattened
            out = out[None, :, :] if isinstance(key[0], (int, np.integer)) else out[:, None, :]
        return QMatrix(out)

    def components(self):
        return tuple(self.data[..., i] for i in range(4))

    # algebra
    def __add__(self, other: "QMatrix") -> "QMatrix":
        _same_shape(self, other)
        return QMatrix(self.data + other.data)

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        _same_shape(self, other)
        return QMatrix(self.data - other.data)

    def __neg__(self) -> "QMatrix":
        return QMatrix(-self.data)

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if not isinstance(other, QMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ShapeMismatch(f"cannot multiply {self.shape} by {other.shape}")
        a0, a1, a2, a3 = self.components()
        b0, b1, b2, b3 = other.components()
        return QMatrix(
            np.stack(
                [
                    a0 @ b0 - a1 @ b1 - a2 @ b2 - a3 @ b3,
                    a0 @ b1 + a1 @ b0 + a2 @ b3 - a3 @ b2,
                    a0 @ b2 - a1 @ b3 + a2 @ b0 + a3 @ b1,
                    a0 @ b3 + a1 @ b2 - a2 @ b1 + a3 @ b0,
                ],
                axis=-1,
            )
        )

    def __mul__(self, other) -> "QMatrix":
        """Right scalar multiplication ``M q`` (every entry times q on the right)."""
        if isinstance(other, QMatrix):
            raise TypeError("use @ for matrix products")
        return QMatrix(qmul(self.data, Quaternion.coerce(other).array))

    def __rmul__(self, other) -> "QMatrix":
        """Left scalar multiplication ``q M``."""
        return QMatrix(qmul(Quaternion.coerce(other).array, self.data))

    @property
    def H(self) -> "QMatrix":
        """Conjugate transpose."""
        return QMatrix(qconj(self.data.transpose(1, 0, 2)))

    @property
    def T(self) -> "QMatrix":
        return QMatrix(self.data.transpose(1, 0, 2))

    def conj(self) -> "QMatrix":
        return QMatrix(qconj(self.data))

    def __pow__(self, n: int) -> "QMatrix":
        if self.rows != self.cols:
            raise ShapeMismatch("power of a non-square matrix")
        out = QMatrix.eye(self.rows)
        for _ in range(n):
            out = out @ self
        return out

    def fro(self) -> float:
        return float(np.sqrt(np.sum(self.data**2)))

    def max_abs(self) -> float:
        return float(np.max(np.sqrt(np.sum(self.data**2, axis=-1)))) if self.data.size else 0.0

    def allclose(self, other: "QMatrix", atol: float = 1e-10) -> bool:
        return self.shape == other.shape and (self - other).max_abs() <= atol

    def __eq__(self, other):
        return isinstance(other, QMatrix) and self.shape == other.shape and np.array_equal(self.data, other.data)

    __hash__ = None

    def tolist(self) -> list:
        return self.data.tolist()

    def __repr__(self) -> str:
        return f"QMatrix(shape={self.shape})"


def _same_shape(a: QMatrix, b: QMatrix) -> None:
    if a.shape != b.shape:
        raise ShapeMismatch(f"shape {a.shape} does not match {b.shape}")


def hstack(mats: Sequence[QMatrix]) -> QMatrix:
    return QMatrix(np.concatenate([m.data for m in mats], axis=1))


def vstack(mats: Sequence[QMatrix]) -> QMatrix:
    return QMatrix(np.concatenate([m.data for m in mats], axis=0))


def block_diag(a: QMatrix, b: QMatrix) -> QMatrix:
    return QMatrix.block([[a, QMatrix.zeros(a.rows, b.cols)], [QMatrix.zeros(b.rows, a.cols), b]])


def complex_adjoint(M: QMatrix) -> np.ndarray:
    """Interleaved complex adjoint: entry (i, j) becomes a 2x2 block."""
    w, x, y, z = M.components()
    z1 = w + 1j * x
    z2 = y + 1j * z
    out = np.empty((2 * M.rows, 2 * M.cols), dtype=complex)
    out[0::2, 0::2] = z1
    out[0::2, 1::2] = z2
    out[1::2, 0::2] = -np.conj(z2)
    out[1::2, 1::2] = np.conj(z1)
    return out


def from_complex_adjoint(X: np.ndarray) -> QMatrix:
    """Inverse of :func:`complex_adjoint`, averaging the redundant blocks."""
    X = np.asarray(X, dtype=complex)
    z1 = 0.5 * (X[0::2, 0::2] + np.conj(X[1::2, 1::2]))
    z2 = 0.5 * (X[0::2, 1::2] - np.conj(X[1::2, 0::2]))
    return QMatrix(np.stack([z1.real, z1.imag, z2.real, z2.imag], axis=-1))


def singular_values(M: QMatrix) -> np.ndarray:
    """Singular values of M over H (each appears once, not twice)."""
    if M.data.size == 0:
        return np.zeros(0)
    s = np.linalg.svd(complex_adjoint(M), compute_uv=False)
    return s[0::2]


def operator_norm(M: QMatrix) -> float:
    if M.data.size == 0:
        return 0.0
    return float(np.linalg.norm(complex_adjoint(M), 2))


def inverse(M: QMatrix, gate: float = SINGULAR_GATE) -> QMatrix:
    """Inverse of a square quaternion matrix.

    Raises :class:`Singular` when the smallest singular value of chi(M) is
    at most ``gate`` times the largest one.
    """
    if M.rows != M.cols:
        raise ShapeMismatch(f"inverse of non-square matrix {M.shape}")
    if M.rows == 0:
        return QMatrix.zeros(0, 0)
    X = complex_adjoint(M)
    s = np.linalg.svd(X, compute_uv=False)
    if s[-1] <= gate * s[0]:
        raise Singular(f"matrix is singular (sigma_min/sigma_max = {s[-1] / s[0] if s[0] else 0.0:.3e})")
    return from_complex_adjoint(np.linalg.inv(X))


def pinv(M: QMatrix, rcond: float = RANK_TOL) -> QMatrix:
    if M.data.size == 0:
        return QMatrix.zeros(M.cols, M.rows)
    return from_complex_adjoint(np.linalg.pinv(complex_adjoint(M), rcond=rcond))


def solve(M: QMatrix, rhs: QMatrix) -> QMatrix:
    """Solve ``M X = rhs`` for square invertible M."""
    return inverse(M) @ rhs


def is_hermitian(G: QMatrix, tol: float = 1e-10) -> bool:
    if G.rows != G.cols:
        return False
    scale = max(G.max_abs(), 1.0)
    return (G - G.H).max_abs() <= tol * scale


def herm_psd(G: QMatrix, tol: float = 1e-10) -> bool:
    """True iff the Hermitian quaternion matrix G is positive semidefinite.

    The eigenvalues of chi(G) are those of G, each doubled; they are tested
    against ``-tol * ||chi(G)||``.
    """
    if not is_hermitian(G, tol=max(tol, 1e-10)):
        raise NotHermitian("Gram matrix is not Hermitian")
    if G.rows == 0:
        return True
    return min_eigenvalue(G) >= -tol * max(operator_norm(G), np.finfo(float).tiny)


def min_eigenvalue(G: QMatrix) -> float:
    X = complex_adjoint(G)
    X = 0.5 * (X + X.conj().T)
    return float(np.linalg.eigvalsh(X)[0])


def rank_h(M: QMatrix, tol: float = RANK_TOL) -> int:
    """Right H-rank of M: half the complex rank of chi(M)."""
    if M.data.size == 0:
        return 0
    s = np.linalg.svd(complex_adjoint(M), compute_uv=False)
    if s[0] == 0.0:
        return 0
    r = int(np.sum(s > tol * s[0]))
    if r % 2:
        raise OddComplexRank(f"complex rank {r} is odd; threshold {tol:g} splits a singular-value pair")
    return r // 2


def range_basis(M: QMatrix, tol: float = RANK_TOL) -> QMatrix:
    """Orthonormal quaternion basis (as columns) of the column space of M.

    The leading left singular subspace of chi(M) is invariant under the
    antilinear map ``(u, v) -> (-conj v, conj u)`` on interleaved pairs; a
    Gram-Schmidt pass that always adds a vector together with its partner
    extracts a basis that comes from genuine quaternion columns.
    """
    n = rank_h(M, tol)
    if n == 0:
        return QMatrix.zeros(M.rows, 0)
    U = np.linalg.svd(complex_adjoint(M))[0][:, : 2 * n]
    basis = np.zeros((U.shape[0], 0), dtype=complex)
    cols = []
    for _ in range(n):
        resid = U - basis @ (basis.conj().T @ U)
        k = int(np.argmax(np.linalg.norm(resid, axis=0)))
        c = resid[:, k] / np.linalg.norm(resid[:, k])
        # quaternion column with first complex column c: v1 = c_even, v2 = -conj(c_odd)
        v1 = c[0::2]
        v2 = -np.conj(c[1::2])
        partner = np.empty_like(c)
        partner[0::2] = v2
        partner[1::2] = np.conj(v1)
        basis = np.column_stack([basis, c, partner])
        cols.append(np.stack([v1.real, v1.imag, v2.real, v2.imag], axis=-1))
    return QMatrix(np.stack(cols, axis=1))


def hermitian_eig(G: QMatrix):
    """Eigenvalues of a Hermitian quaternion matrix (real, ascending, one per pair)."""
    X = complex_adjoint(G)
    w = np.linalg.eigvalsh(0.5 * (X + X.conj().T))
    return w[0::2]
