"""S-spectrum, S-resolvent operators and the quaternionic Neumann series.

For a square quaternion matrix A and a quaternion r the relevant pencil is

    Q_r(A) = A^2 - 2 Re(r) A + |r|^2 I,

which has real scalar coefficients, so it does not matter on which side r
acts. r is in the S-spectrum when Q_r(A) is singular. Because Q_r depends on
r only through Re(r) and |r|, the S-spectrum is a union of 2-spheres.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Literal

import numpy as np
from scipy.optimize import minimize

from .errors import DivergenceRegion, ShapeMismatch, Singular, SpectrumHit
from .qlinalg import QMatrix, complex_adjoint, inverse, operator_norm
from .quaternion import Quaternion

SPECTRUM_TOL = 1e-10
NEUMANN_SLACK = 2.0
ROUNDING_FLOOR = 64 * np.finfo(float).eps

Side = Literal["left", "right"]


def _check_square(A: QMatrix) -> None:
    if A.rows != A.cols:
        raise ShapeMismatch(f"expected a square matrix, got {A.shape}")


def pencil(A: QMatrix, r) -> QMatrix:
    r = Quaternion.coerce(r)
    _check_square(A)
    return A @ A - A * (2.0 * r.real) + QMatrix.eye(A.rows) * r.norm2()


@dataclass(frozen=True)
class SpectralProbe:
    A: QMatrix
    r: Quaternion
    pencil: QMatrix
    min_singular: float
    max_singular: float

    @property
    def ratio(self) -> float:
        if self.max_singular == 0.0:
            return 0.0
        return self.min_singular / self.max_singular


def probe(A: QMatrix, r) -> SpectralProbe:
    r = Quaternion.coerce(r)
    P = pencil(A, r)
    if A.rows == 0:
        return SpectralProbe(A, r, P, np.inf, np.inf)
    s = np.linalg.svd(complex_adjoint(P), compute_uv=False)
    return SpectralProbe(A, r, P, float(s[-1]), float(s[0]))


def in_s_spectrum(A: QMatrix, r, tol: float = SPECTRUM_TOL) -> bool:
    pr = probe(A, r)
    if A.rows == 0:
        return False
    return pr.min_singular <= tol * pr.max_singular


def s_resolvent(side: Side, r, A: QMatrix) -> QMatrix:
    """Left or right S-resolvent operator of A at r.

    left:   -Q_r(A)^{-1} (A - conj(r) I)
    right:  -(A - I conj(r)) Q_r(A)^{-1}
    """
    r = Quaternion.coerce(r)
    P = pencil(A, r)
    try:
        Pinv = inverse(P)
    except Singular as exc:
        raise SpectrumHit(f"{r} is in the S-spectrum") from exc
    shifted = A - QMatrix.scalar(r.conj(), A.rows)
    if side == "left":
        return -(Pinv @ shifted)
    if side == "right":
        return -(shifted @ Pinv)
    raise ValueError(f"side must be 'left' or 'right', not {side!r}")


def resolvent_residual(side: Side, r, A: QMatrix) -> float:
    """Operator norm of the S-resolvent equation residual.

    left:  S r - A S - I      right:  r S - S A - I
    """
    r = Quaternion.coerce(r)
    S = s_resolvent(side, r, A)
    eye = QMatrix.eye(A.rows)
    if side == "left":
        R = S * r - A @ S - eye
    else:
        R = r * S - S @ A - eye
    return operator_norm(R)


def star_geometric_closed(p, A: QMatrix) -> QMatrix:
    """Closed form of ``sum_n p^n A^n``:
    ``(I - conj(p) A)(|p|^2 A^2 - 2 Re(p) A + I)^{-1}``."""
    p = Quaternion.coerce(p)
    eye = QMatrix.eye(A.rows)
    den = A @ A * p.norm2() - A * (2.0 * p.real) + eye
    return (eye - p.conj() * A) @ inverse(den)


def star_geometric_via_resolvent(p, A: QMatrix) -> QMatrix:
    """The same sum written as ``p^{-1} S_R^{-1}(p^{-1}, A)``."""
    p = Quaternion.coerce(p)
    pinv = p.inverse()
    return pinv * s_resolvent("right", pinv, A)


@dataclass(frozen=True)
class NeumannComparison:
    sum: QMatrix
    closed: QMatrix
    gap: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.gap <= self.bound


def neumann_vs_closed(p, A: QMatrix, N: int) -> NeumannComparison:
    """Compare ``sum_{n<=N} p^n A^n`` with its closed form.

    The bound is twice the geometric tail ``t^(N+1)/(1-t)``, ``t = |p| ||A||``,
    plus a rounding floor of 64 ulp.
    """
    p = Quaternion.coerce(p)
    _check_square(A)
    t = p.norm() * operator_norm(A)
    if t >= 1.0:
        raise DivergenceRegion(f"|p| ||A|| = {t:.3g} >= 1")
    total = QMatrix.eye(A.rows)
    term = QMatrix.eye(A.rows)
    pn = Quaternion(1.0)
    for _ in range(N):
        term = term @ A
        pn = pn * p
        total = total + pn * term
    closed = star_geometric_closed(p, A)
    gap = operator_norm(total - closed)
    bound = NEUMANN_SLACK * t ** (N + 1) / (1.0 - t) + ROUNDING_FLOOR
    return NeumannComparison(total, closed, gap, bound)


@dataclass(frozen=True)
class Sphere:
    center: float
    radius: float
    residual: float

    def contains(self, r, tol: float = 1e-6) -> bool:
        r = Quaternion.coerce(r)
        return abs(r.real - self.center) <= tol and abs(r.imag.norm() - self.radius) <= tol


def _probe_measure(A: QMatrix, normA: float, x: float, y: float) -> float:
    # sigma_min of the pencil against its a-priori size; unlike sigma_min/sigma_max
    # this does not degenerate when every singular value vanishes at once
    scale = normA**2 + 2.0 * abs(x) * normA + x * x + y * y
    return probe(A, Quaternion(x, y)).min_singular / max(scale, np.finfo(float).tiny)


def spectrum_probe(A: QMatrix, grid: int = 40, tol: float = 1e-7) -> List[Sphere]:
    """Locate the spheres of the S-spectrum by scanning the upper half plane
    of one slice, then refining each local minimum with Nelder-Mead.

    Spheres are reported as (center, radius) = (Re r, |Im r|).
    """
    _check_square(A)
    if A.rows == 0:
        return []
    normA = operator_norm(A)
    rho = 1.05 * normA + 1e-3
    xs = np.linspace(-rho, rho, 2 * grid + 1)
    ys = np.linspace(0.0, rho, grid + 1)
    vals = np.array([[_probe_measure(A, normA, x, y) for y in ys] for x in xs])

    spheres: List[Sphere] = []
    for i in range(len(xs)):
        for j in range(len(ys)):
            window = vals[max(i - 1, 0) : i + 2, max(j - 1, 0) : j + 2]
            if vals[i, j] > window.min() or vals[i, j] > 0.25:
                continue
            res = minimize(
                lambda v: _probe_measure(A, normA, v[0], abs(v[1])),
                x0=[xs[i], ys[j]],
                method="Nelder-Mead",
                options={"xatol": 1e-12, "fatol": 1e-16, "maxiter": 2000},
            )
            cx, cy = float(res.x[0]), abs(float(res.x[1]))
            if res.fun > tol:
                continue
            if any(abs(s.center - cx) < 1e-5 and abs(s.radius - cy) < 1e-5 for s in spheres):
                continue
            spheres.append(Sphere(cx, cy, float(res.fun)))
    spheres.sort(key=lambda s: (s.center, s.radius))
    return spheres


def spectrum_spheres_from_eigenvalues(A: QMatrix) -> List[Sphere]:
    """Spheres through the standard eigenvalues of chi(A).

    Independent route to the S-spectrum of a matrix: each complex eigenvalue
    ``a + b i`` of the complex adjoint names the sphere ``[a + b i]``.
    """
    _check_square(A)
    if A.rows == 0:
        return []
    ev = np.linalg.eigvals(complex_adjoint(A))
    spheres: List[Sphere] = []
    for lam in ev:
        c, r = float(lam.real), float(abs(lam.imag))
        if any(abs(s.center - c) < 1e-6 and abs(s.radius - r) < 1e-6 for s in spheres):
            continue
        spheres.append(Sphere(c, r, 0.0))
    spheres.sort(key=lambda s: (s.center, s.radius))
    return spheres
