"""Hardy and de Branges-Rovnyak kernels, Toeplitz compressions and the
sampled certificate for Schur multipliers.

Certification is evidence, not proof: a Schur multiplier has a positive
kernel at every finite point set and every Toeplitz compression of norm at
most 1, so failing either test rules s out, while passing both only says
nothing contradicts it at the sampled points and truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .errors import PointOutsideBall, SpherePole
from .qlinalg import QMatrix, herm_psd, min_eigenvalue, operator_norm
from .quaternion import Quaternion
from .series import QSeries, evaluate

POLE_TOL = 1e-12
PSD_RTOL = 1e-8
DEFAULT_NORM_TOL = 1e-10
GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


def _sphere_denominator(p: Quaternion, q: Quaternion) -> Quaternion:
    """``1 - 2 Re(q) p + |q|^2 p^2``, the symmetrization of ``1 - p conj(q)``."""
    return Quaternion(1.0) - p * (2.0 * q.real) + (p * p) * q.norm2()


def hardy_kernel(p, q) -> Quaternion:
    """``sum_n p^n conj(q)^n`` in closed form."""
    p, q = Quaternion.coerce(p), Quaternion.coerce(q)
    den = _sphere_denominator(p, q)
    if den.norm() < POLE_TOL:
        raise SpherePole(f"{p} lies on the sphere of 1/{q}")
    return den.inverse() * (Quaternion(1.0) - p * q)


def hardy_kernel_series(p, q, N: int) -> Quaternion:
    p, q = Quaternion.coerce(p), Quaternion.coerce(q)
    qb = q.conj()
    total, pn, qn = Quaternion(), Quaternion(1.0), Quaternion(1.0)
    for _ in range(N + 1):
        total = total + pn * qn
        pn, qn = pn * p, qn * qb
    return total


def kernel_from_values(sp: Quaternion, sq: Quaternion, p: Quaternion, q: Quaternion) -> Quaternion:
    """Closed-form ``k_s(p, q)`` from the values ``s(p)`` and ``s(q)``.

    k = k_s(p, q) is the solution of ``k - p k conj(q) = X`` with
    ``X = 1 - s(p) conj(s(q))``. Applying ``k -> k - p k q`` to both sides
    turns the left side into ``(1 - 2 Re(q) p + |q|^2 p^2) k``.
    """
    X = Quaternion(1.0) - sp * sq.conj()
    den = _sphere_denominator(p, q)
    if den.norm() < POLE_TOL:
        raise SpherePole(f"{p} lies on the sphere of 1/{q}")
    return den.inverse() * (X - p * X * q)


def ks_kernel_closed(s: QSeries, p, q) -> Quaternion:
    p, q = Quaternion.coerce(p), Quaternion.coerce(q)
    return kernel_from_values(evaluate(s, p, warn=False), evaluate(s, q, warn=False), p, q)


def ks_kernel(s: QSeries, p, q, N: Optional[int] = None) -> Quaternion:
    """``sum_{n<=N} p^n (1 - s(p) conj(s(q))) conj(q)^n``.

    Without N the closed form is returned.
    """
    if N is None:
        return ks_kernel_closed(s, p, q)
    p, q = Quaternion.coerce(p), Quaternion.coerce(q)
    X = Quaternion(1.0) - evaluate(s, p, warn=False) * evaluate(s, q, warn=False).conj()
    qb = q.conj()
    total, pn, qn = Quaternion(), Quaternion(1.0), Quaternion(1.0)
    for _ in range(N + 1):
        total = total + pn * X * qn
        pn, qn = pn * p, qn * qb
    return total


def difference_residual(s: QSeries, p, q, N: int):
    """Residual of ``k - p k conj(q) = 1 - s(p) conj(s(q))`` for the
    truncated k_s, with its bound ``|X| (|p||q|)^(N+1)`` plus round-off."""
    p, q = Quaternion.coerce(p), Quaternion.coerce(q)
    k = ks_kernel(s, p, q, N)
    X = Quaternion(1.0) - evaluate(s, p, warn=False) * evaluate(s, q, warn=False).conj()
    resid = (k - p * k * q.conj() - X).norm()
    bound = X.norm() * (p.norm() * q.norm()) ** (N + 1) + 64 * np.finfo(float).eps * max(X.norm(), 1.0)
    return resid, bound


def gram(kernel, points: Sequence) -> QMatrix:
    pts = [Quaternion.coerce(q) for q in points]
    return QMatrix.from_rows([[kernel(pi, pj) for pj in pts] for pi in pts])


def hardy_gram(points: Sequence) -> QMatrix:
    return gram(hardy_kernel, points)


def ks_gram(s: QSeries, points: Sequence) -> QMatrix:
    pts = [Quaternion.coerce(q) for q in points]
    vals = [evaluate(s, q, warn=False) for q in pts]
    return QMatrix.from_rows(
        [[kernel_from_values(vi, vj, pi, pj) for pj, vj in zip(pts, vals)] for pi, vi in zip(pts, vals)]
    )


def toeplitz(s: QSeries, N: int) -> QMatrix:
    """Lower-triangular ``(N+1) x (N+1)`` matrix with entry (n, m) = s_{n-m}.

    Acting on a coefficient column x it returns the coefficients of s * x.
    """
    coeffs = s.truncate(N).coeffs
    arr = np.zeros((N + 1, N + 1, 4))
    for n in range(N + 1):
        arr[n, : n + 1] = coeffs[n::-1]
    return QMatrix(arr)


def default_points(M: int = 8, radius: float = 0.8) -> List[Quaternion]:
    """Deterministic sample points with ``|q| <= radius``.

    Axes follow a Fibonacci lattice on the sphere of imaginary units, moduli
    grow linearly up to the radius, and the slice angle advances by the
    golden angle so that real parts take both signs.
    """
    pts = []
    for k in range(M):
        z = 1.0 - 2.0 * (k + 0.5) / M
        rho = math.sqrt(max(0.0, 1.0 - z * z))
        phi = k * GOLDEN_ANGLE
        axis = Quaternion(0.0, rho * math.cos(phi), rho * math.sin(phi), z)
        r = radius * (k + 1) / M
        theta = (k + 1) * GOLDEN_ANGLE % math.pi
        pts.append(Quaternion(r * math.cos(theta)) + axis * (r * math.sin(theta)))
    return pts


def check_points(points: Sequence) -> List[Quaternion]:
    pts = [Quaternion.coerce(q) for q in points]
    for q in pts:
        if q.norm() >= 1.0:
            raise PointOutsideBall(f"sample point {q} is not in the open unit ball")
    return pts


@dataclass(frozen=True)
class GramCertificate:
    points: tuple
    gram: QMatrix
    min_eigenvalue: float
    psd_tol: float
    toeplitz_norm: float
    trunc: int
    norm_tol: float

    @property
    def psd(self) -> bool:
        return self.min_eigenvalue >= -self.psd_tol

    @property
    def contractive(self) -> bool:
        return self.toeplitz_norm <= 1.0 + self.norm_tol

    @property
    def certified(self) -> bool:
        return self.psd and self.contractive


def certify_multiplier(
    s: QSeries, points: Optional[Sequence] = None, N: int = 24, tol: float = DEFAULT_NORM_TOL
) -> GramCertificate:
    """Sampled evidence that s is a Schur multiplier.

    Checks (a) the Gram matrix of k_s at the points is PSD up to
    ``1e-8 ||G||`` and (b) the Toeplitz compression of degree
    ``min(N, s.trunc)`` has norm at most ``1 + tol``.
    """
    pts = check_points(default_points() if points is None else points)
    if len(pts) < 2:
        raise ValueError("certification needs at least two sample points")
    G = ks_gram(s, pts)
    herm_psd(G, tol=PSD_RTOL)  # raises NotHermitian on a broken kernel
    n = min(N, s.trunc)
    return GramCertificate(
        tuple(pts),
        G,
        min_eigenvalue(G),
        PSD_RTOL * max(operator_norm(G), np.finfo(float).tiny),
        operator_norm(toeplitz(s, n)),
        n,
        tol,
    )


@dataclass
class SchurMultiplier:
    series: QSeries
    certificate: Optional[GramCertificate] = field(default=None)

    def certify(self, points: Optional[Sequence] = None, N: int = 24, tol: float = DEFAULT_NORM_TOL) -> bool:
        self.certificate = certify_multiplier(self.series, points, N, tol)
        return self.certificate.certified

    def __call__(self, p) -> Quaternion:
        return evaluate(self.series, p, warn=False)
