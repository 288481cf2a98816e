"""State-space realizations ``f(p) = D + p C * (I - pA)^(-*) B`` over H.

The coefficients of such an f are the Markov parameters ``f_0 = D`` and
``f_n = C A^(n-1) B``. All the realization algebra (products, column
concatenation, inversion, companion form) is formal power series algebra over
a noncommutative ring, so the classical block formulas carry over verbatim as
long as products are kept in order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .errors import NonInvertibleD, NotOuterConnected, RankDeficientData, ShapeMismatch, Singular
from .qlinalg import (
    QMatrix,
    block_diag,
    hstack,
    inverse as qinverse,
    operator_norm,
    pinv,
    range_basis,
    rank_h,
    vstack,
)
from .quaternion import Quaternion
from .series import MatrixQSeries, QSeries, matrix_evaluate, star_mul, star_reciprocal


@dataclass(frozen=True)
class Realization:
    A: QMatrix
    B: QMatrix
    C: QMatrix
    D: QMatrix

    def __post_init__(self):
        n = self.A.rows
        if self.A.cols != n:
            raise ShapeMismatch(f"A must be square, got {self.A.shape}")
        if self.B.rows != n or self.C.cols != n:
            raise ShapeMismatch(f"B {self.B.shape} / C {self.C.shape} do not match state dimension {n}")
        if self.D.shape != (self.C.rows, self.B.cols):
            raise ShapeMismatch(f"D has shape {self.D.shape}, expected {(self.C.rows, self.B.cols)}")

    @classmethod
    def static(cls, D: QMatrix) -> "Realization":
        """Zero-state realization of the constant D."""
        return cls(QMatrix.zeros(0, 0), QMatrix.zeros(0, D.cols), QMatrix.zeros(D.rows, 0), D)

    @classmethod
    def scalar(cls, a, b, c, d) -> "Realization":
        return cls(*(QMatrix.scalar(v) for v in (a, b, c, d)))

    @classmethod
    def random(
        cls,
        rng: np.random.Generator,
        n: int,
        inputs: int = 1,
        outputs: int = 1,
        a_norm: float = 0.7,
    ) -> "Realization":
        A = QMatrix.random(rng, n, n)
        if n:
            A = A * (a_norm / operator_norm(A))
        return cls(
            A,
            QMatrix.random(rng, n, inputs),
            QMatrix.random(rng, outputs, n),
            QMatrix.random(rng, outputs, inputs),
        )

    @property
    def state_dim(self) -> int:
        return self.A.rows

    @property
    def n_inputs(self) -> int:
        return self.B.cols

    @property
    def n_outputs(self) -> int:
        return self.C.rows

    def block(self) -> QMatrix:
        return QMatrix.block([[self.A, self.B], [self.C, self.D]])

    def coisometry_defect(self) -> float:
        M = self.block()
        return operator_norm(M @ M.H - QMatrix.eye(M.rows))

    def is_coisometric(self, tol: float = 1e-10) -> bool:
        return self.coisometry_defect() <= tol

    def conjugate_by(self, U: QMatrix) -> "Realization":
        """``(U A U^-1, U B, C U^-1, D)``; for unitary U the inverse is U*."""
        Uinv = qinverse(U)
        return Realization(U @ self.A @ Uinv, U @ self.B, self.C @ Uinv, self.D)


def markov(R: Realization, n: int) -> QMatrix:
    """n-th Markov parameter, computed as ``C (A (A ... (A B)))``.

    The right-to-left chain is the one a simulation with an impulse input
    performs, so both give bit-identical results.
    """
    if n == 0:
        return R.D
    x = R.B
    for _ in range(n - 1):
        x = R.A @ x
    return R.C @ x


def markov_sequence(R: Realization, N: int) -> List[QMatrix]:
    out = [R.D]
    x = R.B
    for n in range(1, N + 1):
        out.append(R.C @ x)
        x = R.A @ x
    return out


def transfer_series(R: Realization, N: int) -> MatrixQSeries:
    return MatrixQSeries(markov_sequence(R, N))


def transfer_closed(R: Realization, p) -> QMatrix:
    """``D + (pC - |p|^2 CA)(|p|^2 A^2 - 2Re(p) A + I)^(-1) B``."""
    p = Quaternion.coerce(p)
    eye = QMatrix.eye(R.state_dim)
    den = R.A @ R.A * p.norm2() - R.A * (2.0 * p.real) + eye
    left = p * R.C - (R.C @ R.A) * p.norm2()
    return R.D + left @ qinverse(den) @ R.B


def transfer_value(R: Realization, p, N: int = 64) -> QMatrix:
    """Value of the truncated transfer series at p."""
    return matrix_evaluate(transfer_series(R, N), p)


def product(R1: Realization, R2: Realization) -> Realization:
    """Realization of ``f1 * f2`` (star product)."""
    if R1.n_inputs != R2.n_outputs:
        raise ShapeMismatch(f"cannot multiply {R1.n_outputs}x{R1.n_inputs} by {R2.n_outputs}x{R2.n_inputs}")
    A = QMatrix.block([[R1.A, R1.B @ R2.C], [QMatrix.zeros(R2.state_dim, R1.state_dim), R2.A]])
    B = vstack([R1.B @ R2.D, R2.B])
    C = hstack([R1.C, R1.D @ R2.C])
    return Realization(A, B, C, R1.D @ R2.D)


def concat(R1: Realization, R2: Realization) -> Realization:
    """Realization of the row ``(f1  f2)``."""
    if R1.n_outputs != R2.n_outputs:
        raise ShapeMismatch("concatenated functions need the same number of rows")
    return Realization(
        block_diag(R1.A, R2.A),
        block_diag(R1.B, R2.B),
        hstack([R1.C, R2.C]),
        hstack([R1.D, R2.D]),
    )


def inverse(R: Realization) -> Realization:
    """Realization of the star inverse:
    ``D^-1 - p D^-1 C * (I - p(A - B D^-1 C))^(-*) B D^-1``."""
    try:
        Dinv = qinverse(R.D)
    except (Singular, ShapeMismatch) as exc:
        raise NonInvertibleD("feedthrough D is not invertible") from exc
    return Realization(R.A - R.B @ Dinv @ R.C, R.B @ Dinv, -(Dinv @ R.C), Dinv)


def companion(Mcoeffs: Sequence[QMatrix]) -> Realization:
    """Block-shift realization of the polynomial ``sum_j p^j M_j``.

    With J = deg and M_j of size k x m the state dimension is J*m.
    """
    Mcoeffs = [m if isinstance(m, QMatrix) else QMatrix.scalar(m) for m in Mcoeffs]
    if not Mcoeffs:
        raise ValueError("companion form needs at least one coefficient")
    J = len(Mcoeffs) - 1
    k, m = Mcoeffs[0].shape
    if J == 0:
        return Realization.static(Mcoeffs[0])
    A = np.zeros((J * m, J * m, 4))
    for i in range(J - 1):
        A[i * m : (i + 1) * m, (i + 1) * m : (i + 2) * m] = QMatrix.eye(m).data
    B = np.zeros((J * m, m, 4))
    B[(J - 1) * m :] = QMatrix.eye(m).data
    C = hstack(list(reversed(Mcoeffs[1:])))
    return Realization(QMatrix(A), QMatrix(B), C, Mcoeffs[0])


def hankel(coeffs: Sequence[QMatrix], T: int, offset: int = 1) -> QMatrix:
    """Block Hankel matrix with block (i, j) = coeffs[i + j + offset]."""
    return QMatrix.block([[coeffs[i + j + offset] for j in range(T)] for i in range(T)])


def _as_matrix_coeffs(f_coeffs) -> List[QMatrix]:
    if isinstance(f_coeffs, MatrixQSeries):
        return f_coeffs.coefficients()
    if isinstance(f_coeffs, QSeries):
        return [QMatrix.scalar(c) for c in f_coeffs.coefficients()]
    return [c if isinstance(c, QMatrix) else QMatrix.scalar(c) for c in f_coeffs]


def minimal_realization(f_coeffs, tol: float = 1e-10, T: Optional[int] = None) -> Realization:
    """Quaternionic Ho-Kalman realization from coefficients f_0 .. f_L.

    The block Hankel matrix H = [f_{i+j-1}] (T x T blocks, T = L // 2 by
    default) is factored as H = O K with O an orthonormal quaternion basis of
    its column space; A solves O A K = H_shift, B and C are the leading block
    column of K and block row of O. The state dimension is rank_h(H).
    """
    coeffs = _as_matrix_coeffs(f_coeffs)
    L = len(coeffs) - 1
    if T is None:
        T = L // 2
    if T < 1:
        raise RankDeficientData(f"need at least 3 coefficients, got {L + 1}")
    if 2 * T > L:
        raise RankDeficientData(f"Hankel size T = {T} needs {2 * T + 1} coefficients, got {L + 1}")
    k, m = coeffs[0].shape
    H = hankel(coeffs, T, offset=1)
    Hs = hankel(coeffs, T, offset=2)
    n = rank_h(H, tol)
    scale = max(operator_norm(H), 1.0)
    if n == 0:
        if operator_norm(Hs) > 1e-6 * scale:
            raise RankDeficientData("Hankel matrix vanishes but its shift does not")
        return Realization(QMatrix.zeros(0, 0), QMatrix.zeros(0, m), QMatrix.zeros(k, 0), coeffs[0])
    O = range_basis(H, tol)
    K = O.H @ H
    Kp = pinv(K, rcond=tol)
    A = O.H @ Hs @ Kp
    fact = operator_norm(O @ K - H)
    shift = operator_norm(O @ A @ K - Hs)
    if max(fact, shift) > 1e-6 * scale:
        raise RankDeficientData(
            f"Hankel factorization inconsistent (factor residual {fact:.2e}, shift residual {shift:.2e})"
        )
    return Realization(A, K[:, :m], O[:k, :], coeffs[0])


def observability(R: Realization, T: int) -> QMatrix:
    rows, X = [], R.C
    for _ in range(T):
        rows.append(X)
        X = X @ R.A
    return vstack(rows)


def unitary_equivalence(
    R1: Realization, R2: Realization, T: Optional[int] = None, tol: float = 1e-8
) -> Optional[QMatrix]:
    """Unitary U with ``U A1 = A2 U``, ``C1 = C2 U``, ``U B1 = B2``.

    Both realizations must be closely outer connected up to order T (stacked
    observability matrices injective). Returns None when the Markov
    parameters disagree or when the intertwiner is not unitary.
    """
    n = R1.state_dim
    if R2.state_dim != n:
        return None
    if T is None:
        T = max(n, 1) + 1
    if any(markov(R1, j).shape != markov(R2, j).shape for j in (0, 1)):
        return None
    for j in range(2 * T + 1):
        if not markov(R1, j).allclose(markov(R2, j), atol=tol):
            return None
    if n == 0:
        return QMatrix.zeros(0, 0)
    O1, O2 = observability(R1, T), observability(R2, T)
    if rank_h(O1) < n or rank_h(O2) < n:
        raise NotOuterConnected("observability matrix is rank deficient")
    U = pinv(O2) @ O1
    eye = QMatrix.eye(n)
    checks = [
        U @ R1.A - R2.A @ U,
        R1.C - R2.C @ U,
        U @ R1.B - R2.B,
        U @ U.H - eye,
        U.H @ U - eye,
    ]
    if max(operator_norm(c) for c in checks) > tol:
        return None
    return U


def rational_quotient(P: QSeries, Q: QSeries) -> QSeries:
    """``P * Q^(-*)``; needs Q(0) != 0."""
    return star_mul(P, star_reciprocal(Q))


def real_axis_value(R: Realization, x: float) -> QMatrix:
    """``D + x C (I - xA)^(-1) B`` for real x (ordinary resolvent)."""
    eye = QMatrix.eye(R.state_dim)
    return R.D + (R.C * x) @ qinverse(eye - R.A * x) @ R.B
