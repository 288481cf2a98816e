"""Discrete-time systems ``x_{n+1} = A x_n + B u_n``, ``y_n = C x_n + D u_n``.

Inputs, states and outputs are quaternion matrices; a column input is the
usual vector signal, and an ``m x m`` input block runs m experiments at once
(the identity block gives the impulse response).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np

from .errors import ShapeMismatch, ShiftWithoutZero
from .qlinalg import QMatrix, inverse as qinverse
from .quaternion import Quaternion
from .realization import Realization, transfer_series
from .series import MatrixQSeries, QSeries, matrix_evaluate, matrix_star_inverse, matrix_star_mul

UNEQUAL_THRESHOLD = 1e-6

Signal = Sequence[Union[QMatrix, Quaternion, float]]


def _as_block(u, rows: int) -> QMatrix:
    if isinstance(u, QMatrix):
        return u
    q = Quaternion.coerce(u)
    if rows != 1:
        raise ShapeMismatch(f"scalar input given to a system with {rows} inputs")
    return QMatrix.scalar(q)


@dataclass(frozen=True)
class SystemTrace:
    inputs: tuple
    states: tuple
    outputs: tuple

    @property
    def horizon(self) -> int:
        return len(self.outputs)


def simulate(R: Realization, u: Signal, T: Optional[int] = None, x0: Optional[QMatrix] = None) -> SystemTrace:
    """Run the state recursion for T steps (inputs beyond ``len(u)`` are 0).

    ``states[n]`` is ``x_n`` for ``n = 0..T``; ``outputs[n]`` is ``y_n`` for
    ``n = 0..T-1``.
    """
    blocks = [_as_block(v, R.n_inputs) for v in u]
    if T is None:
        T = len(blocks)
    if blocks:
        width = blocks[0].cols
    elif x0 is not None:
        width = x0.cols
    else:
        width = 1
    for n, b in enumerate(blocks):
        if b.shape != (R.n_inputs, width):
            raise ShapeMismatch(f"input {n} has shape {b.shape}, expected {(R.n_inputs, width)}")
    zero_u = QMatrix.zeros(R.n_inputs, width)
    x = QMatrix.zeros(R.state_dim, width) if x0 is None else x0
    if x.shape != (R.state_dim, width):
        raise ShapeMismatch(f"x0 has shape {x.shape}, expected {(R.state_dim, width)}")
    us = [blocks[n] if n < len(blocks) else zero_u for n in range(T)]
    xs, ys = [x], []
    for un in us:
        ys.append(R.C @ x + R.D @ un)
        x = R.A @ x + R.B @ un
        xs.append(x)
    return SystemTrace(tuple(us), tuple(xs), tuple(ys))


def impulse_response(R: Realization, T: int) -> List[QMatrix]:
    return list(simulate(R, [QMatrix.eye(R.n_inputs)], T).outputs)


def z_transform(seq: Signal, N: int, shift: bool = False) -> Union[QSeries, MatrixQSeries]:
    """Formal series ``sum_n p^n u_n`` known through degree N.

    With ``shift=True`` the transform of the advanced sequence
    ``(u_1, u_2, ...)`` is returned, i.e. ``p^{-1} Z(u)``; this needs u_0 = 0.
    """
    seq = list(seq)
    matrix = bool(seq) and isinstance(seq[0], QMatrix)
    if shift:
        if seq:
            head = seq[0].max_abs() if matrix else Quaternion.coerce(seq[0]).norm()
            if head != 0.0:
                raise ShiftWithoutZero("shift rule needs u_0 = 0")
        seq = seq[1:]
    if matrix:
        shape = seq[0].shape if seq else (1, 1)
        arr = np.zeros((N + 1,) + shape + (4,))
        for n, v in enumerate(seq[: N + 1]):
            arr[n] = v.data
        return MatrixQSeries(arr)
    arr = np.zeros((N + 1, 4))
    for n, v in enumerate(seq[: N + 1]):
        arr[n] = Quaternion.coerce(v).array
    return QSeries(arr)


def _as_matrix_series(f) -> MatrixQSeries:
    return MatrixQSeries.from_scalar(f) if isinstance(f, QSeries) else f


@dataclass(frozen=True)
class TransferConsistency:
    star_quotients: tuple
    star_gap: float
    transfer_gap: float
    pointwise: tuple
    pointwise_gap: float
    degree: int
    p_sample: Quaternion

    @property
    def pointwise_flag(self) -> str:
        return "UNEQUAL" if self.pointwise_gap > UNEQUAL_THRESHOLD else "EQUAL"


def transfer_consistency(
    R: Realization, u1: Signal, u2: Signal, N: int = 32, p_sample=Quaternion(0.0, 0.5)
) -> TransferConsistency:
    """Compare the star quotient ``Y * U^(-*)`` with the pointwise quotient
    ``Y(p) U(p)^(-1)`` for two input signals.

    The star quotients are compared with each other and with the transfer
    series through degree N // 2; convolution with the growing coefficients
    of ``U^(-*)`` erodes accuracy near the truncation edge.
    """
    p_sample = Quaternion.coerce(p_sample)
    H = transfer_series(R, N)
    quotients, values = [], []
    for u in (u1, u2):
        trace = simulate(R, u, N + 1)
        U = _as_matrix_series(z_transform(trace.inputs, N))
        Y = _as_matrix_series(z_transform(trace.outputs, N))
        quotients.append(matrix_star_mul(Y, matrix_star_inverse(U)))
        values.append(matrix_evaluate(Y, p_sample) @ qinverse(matrix_evaluate(U, p_sample)))
    degree = N // 2
    star_gap = quotients[0].max_abs_diff(quotients[1], upto=degree)
    transfer_gap = max(q.max_abs_diff(H, upto=degree) for q in quotients)
    return TransferConsistency(
        tuple(quotients),
        star_gap,
        transfer_gap,
        tuple(values),
        (values[0] - values[1]).max_abs(),
        degree,
        p_sample,
    )
