import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qschur.errors import DivisionByZero
from qschur.quaternion import (
    QI,
    QJ,
    QK,
    UNIT_I,
    UNIT_J,
    Quaternion,
    UnitImaginary,
    decompose,
    qmul,
    random_in_ball,
    sphere_point,
)

finite = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)
quats = st.builds(Quaternion, finite, finite, finite, finite)


def as_2x2(q):
    # oracle: H as a subalgebra of complex 2x2 matrices
    z1, z2 = complex(q.w, q.x), complex(q.y, q.z)
    return np.array([[z1, z2], [-z2.conjugate(), z1.conjugate()]])


def close(a, b, tol=1e-12):
    return (a - b).norm() <= tol


@pytest.mark.parametrize(
    "a, b, expected",
    [
        (QI, QJ, QK),
        (QJ, QI, -QK),
        (QJ, QK, QI),
        (QK, QI, QJ),
        (QI, QI, Quaternion(-1.0)),
        (Quaternion(1, 1, 0, 0), Quaternion(1, 0, 1, 0), Quaternion(1, 1, 1, 1)),
    ],
)
def test_hamilton_table(a, b, expected):
    assert a * b == expected


def test_ijk_is_minus_one():
    assert QI * QJ * QK == Quaternion(-1.0)


@settings(max_examples=60, deadline=None)
@given(quats, quats)
def test_product_matches_matrix_model(a, b):
    lhs = as_2x2(a * b)
    rhs = as_2x2(a) @ as_2x2(b)
    assert np.allclose(lhs, rhs, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(quats, quats, quats)
def test_associative(a, b, c):
    scale = max(1.0, a.norm() * b.norm() * c.norm())
    assert ((a * b) * c - a * (b * c)).norm() <= 1e-13 * scale


@settings(max_examples=60, deadline=None)
@given(quats, quats)
def test_norm_multiplicative_and_conj_antimultiplicative(a, b):
    assert math.isclose((a * b).norm(), a.norm() * b.norm(), rel_tol=1e-12, abs_tol=1e-12)
    scale = max(1.0, a.norm() * b.norm())
    assert ((a * b).conj() - b.conj() * a.conj()).norm() <= 1e-13 * scale


def test_inverse_and_right_division():
    q = Quaternion(1, 2, -1, 0.5)
    assert close(q * q.inverse(), Quaternion(1.0))
    assert close(q.inverse() * q, Quaternion(1.0))
    p = Quaternion(0.3, 0, 1, 2)
    assert close((p / q) * q, p)


def test_inverse_of_zero_raises():
    with pytest.raises(DivisionByZero):
        Quaternion().inverse()
    with pytest.raises(ZeroDivisionError):
        QI / 0


def test_real_scalars_commute():
    q = Quaternion(1, 2, 3, 4)
    assert 2.5 * q == q * 2.5 == Quaternion(2.5, 5, 7.5, 10)


def test_decompose_and_sphere_point():
    re, r, axis = decompose(Quaternion(1, 0, 3, 4))
    assert re == 1.0 and r == 5.0
    assert axis.axis == Quaternion(0, 0, 0.6, 0.8)
    assert decompose(Quaternion(2.0)).axis is None
    assert sphere_point(Quaternion(1, 0, 3, 4), UNIT_I) == Quaternion(1, 5, 0, 0)


def test_unit_imaginary_squares_to_minus_one(rng):
    for _ in range(10):
        v = rng.normal(size=3)
        I = UnitImaginary.from_vector(*v)
        assert close(I.axis * I.axis, Quaternion(-1.0))


def test_unit_imaginary_validation():
    with pytest.raises(ValueError):
        UnitImaginary(Quaternion(0, 2, 0, 0))
    with pytest.raises(ValueError):
        UnitImaginary(Quaternion(0.1, 1, 0, 0))


def test_slice_point():
    assert UNIT_J.slice_point(2 - 3j) == Quaternion(2, 0, -3, 0)


def test_random_in_ball(rng):
    pts = [random_in_ball(rng, 0.8) for _ in range(200)]
    assert max(p.norm() for p in pts) < 0.8


def test_qmul_broadcasts():
    a = np.array([[0, 1, 0, 0], [0, 0, 1, 0]], dtype=float)
    out = qmul(a, np.array([0, 0, 1, 0.0]))
    assert np.array_equal(out, [[0, 0, 0, 1], [-1, 0, 0, 0]])
