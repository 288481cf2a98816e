"""Schur transform and algorithm, Blaschke factors, and coisometric
realizations of Schur multipliers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as pairs
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np

from .errors import NotCoisometric, NotInBall, UnimodularStop
from .kernels import SchurMultiplier, check_points, default_points, kernel_from_values
from .qlinalg import QMatrix, operator_norm
from .quaternion import Quaternion
from .realization import Realization, rational_quotient, transfer_closed
from .series import DEFAULT_TRUNC, QSeries, shift, star_mul, star_reciprocal

UNIMODULAR_TOL = 1e-12
COISOMETRY_TOL = 1e-10

StopReason = Literal["unimodular", "kmax", "exhausted"]


def schur_transform(s: QSeries) -> QSeries:
    """``(1 - s conj(s_0))^(-*) * sigma`` where ``s - s_0 = p sigma``.

    The result is known through one degree less than s.
    """
    s0 = s[0]
    if s0.norm() >= 1.0 - UNIMODULAR_TOL:
        raise UnimodularStop(f"|s(0)| = {s0.norm():.15g} is unimodular")
    den = QSeries.unit(s.trunc) - s * s0.conj()
    sigma = shift(s)
    return star_mul(star_reciprocal(den), sigma)


@dataclass(frozen=True)
class SchurCoefficients:
    rho: Tuple[Quaternion, ...]
    stop: StopReason

    def __len__(self) -> int:
        return len(self.rho)


def schur_algorithm(s: QSeries, kmax: int = 16) -> SchurCoefficients:
    """Schur coefficients ``rho_n = s^(n)(0)``.

    Stops after kmax coefficients, at a unimodular coefficient, or when the
    truncation is used up (each transform costs one degree).
    """
    rho: List[Quaternion] = []
    while True:
        r = s[0]
        rho.append(r)
        if r.norm() >= 1.0 - UNIMODULAR_TOL:
            return SchurCoefficients(tuple(rho), "unimodular")
        if len(rho) >= kmax:
            return SchurCoefficients(tuple(rho), "kmax")
        if s.trunc == 0:
            return SchurCoefficients(tuple(rho), "exhausted")
        s = schur_transform(s)


def blaschke_realization(a) -> Realization:
    a = Quaternion.coerce(a)
    if a.norm() >= 1.0:
        raise NotInBall(f"|a| = {a.norm():.6g} is not below 1")
    c = math.sqrt(1.0 - a.norm2())
    return Realization.scalar(a.conj(), c, c, -a)


def blaschke(a, trunc: int = DEFAULT_TRUNC) -> Tuple[SchurMultiplier, Realization]:
    """Elementary factor ``(p - a) * (1 - p conj(a))^(-*)`` and its unitary
    realization ``[[conj(a), c], [c, -a]]``, ``c = sqrt(1 - |a|^2)``."""
    R = blaschke_realization(a)
    a = Quaternion.coerce(a)
    num = QSeries([-a, 1.0]).truncate(trunc)
    den = QSeries([1.0, -a.conj()]).truncate(trunc)
    return SchurMultiplier(rational_quotient(num, den)), R


def blaschke_product(factors: Sequence, trunc: int = DEFAULT_TRUNC) -> QSeries:
    out = QSeries.unit(trunc)
    for a in factors:
        out = star_mul(out, blaschke(a, trunc)[0].series)
    return out


@dataclass(frozen=True)
class ShiftRealization:
    realization: Realization
    trunc: int


def shift_realization(s: QSeries) -> ShiftRealization:
    """Backward-shift realization on coefficient vectors of length N.

    A drops the leading coefficient, ``B v = (s_1 v, ..., s_N v)``, C reads
    coefficient 0 and ``D = s_0``; hence ``C A^(n-1) B = s_n``.
    """
    N = s.trunc
    A = np.zeros((N, N, 4))
    A[np.arange(N - 1), np.arange(1, N), 0] = 1.0
    B = s.coeffs[1:].reshape(N, 1, 4)
    C = np.zeros((1, N, 4))
    if N:
        C[0, 0, 0] = 1.0
    R = Realization(QMatrix(A), QMatrix(B), QMatrix(C), QMatrix.scalar(s[0]))
    return ShiftRealization(R, N)


def observability_row(R: Realization, p, N: int) -> QMatrix:
    """``U_N(p) = sum_{n<=N} p^n C A^n``."""
    p = Quaternion.coerce(p)
    total = QMatrix.zeros(R.n_outputs, R.state_dim)
    term = R.C
    pn = Quaternion(1.0)
    for _ in range(N + 1):
        total = total + pn * term
        term = term @ R.A
        pn = pn * p
    return total


@dataclass(frozen=True)
class CoisometryReport:
    points: tuple
    trunc: int
    identity_residual: float
    identity_bound: float
    kernel_residual: float
    kernel_bound: float

    @property
    def ok(self) -> bool:
        return self.identity_residual <= self.identity_bound and self.kernel_residual <= self.kernel_bound


def coisometry_kernel_check(R: Realization, points: Optional[Sequence] = None, N: int = 40) -> CoisometryReport:
    """Check the kernel identities of a coisometric realization at all point pairs.

    (a) ``1 - s(p) s(q)* = U(p) U(q)* - p U(p) U(q)* conj(q)``,
    (b) ``k_s(p, q) = U(p) U(q)*``,
    with U truncated at degree N and s evaluated in closed form. Bounds are
    the geometric tails of the two truncated sums plus a round-off floor.
    """
    if R.n_inputs != 1 or R.n_outputs != 1:
        raise ValueError("kernel check is implemented for scalar multipliers")
    if not R.is_coisometric(COISOMETRY_TOL):
        raise NotCoisometric(f"block matrix defect {R.coisometry_defect():.3e} exceeds {COISOMETRY_TOL:g}")
    pts = check_points(default_points() if points is None else points)
    normA = operator_norm(R.A)
    normC = operator_norm(R.C)
    floor = 256 * np.finfo(float).eps
    rows = {i: observability_row(R, q, N) for i, q in enumerate(pts)}
    svals = {i: transfer_closed(R, q)[0, 0] for i, q in enumerate(pts)}
    res_a = bound_a = res_b = bound_b = 0.0
    worst_a = worst_b = -math.inf
    for i, j in pairs(range(len(pts)), repeat=2):
        p, q = pts[i], pts[j]
        tp, tq = p.norm() * normA, q.norm() * normA
        K = (rows[i] @ rows[j].H)[0, 0] if R.state_dim else Quaternion()
        X = Quaternion(1.0) - svals[i] * svals[j].conj()
        tail = normC**2 * (tp ** (N + 1) + tq ** (N + 1)) / ((1.0 - tp) * (1.0 - tq))
        ra = (X - (K - p * K * q.conj())).norm()
        ba = (1.0 + p.norm() * q.norm()) * tail + floor
        rb = (kernel_from_values(svals[i], svals[j], p, q) - K).norm()
        bb = tail + floor * max(1.0, 1.0 / (1.0 - p.norm() * q.norm()) ** 2)
        if ra - ba > worst_a:
            worst_a, res_a, bound_a = ra - ba, ra, ba
        if rb - bb > worst_b:
            worst_b, res_b, bound_b = rb - bb, rb, bb
    return CoisometryReport(tuple(pts), N, res_a, bound_a, res_b, bound_b)
