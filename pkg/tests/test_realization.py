import math

import pytest

from qschur.errors import NonInvertibleD, NotOuterConnected, RankDeficientData, ShapeMismatch
from qschur.qlinalg import QMatrix, range_basis
from qschur.quaternion import QI, QJ, QK, Quaternion
from qschur.realization import (
    Realization,
    companion,
    concat,
    inverse,
    markov,
    markov_sequence,
    minimal_realization,
    product,
    rational_quotient,
    real_axis_value,
    transfer_closed,
    transfer_series,
    transfer_value,
    unitary_equivalence,
)
from qschur.series import MatrixQSeries, QSeries, matrix_star_mul


def blaschke_quadruple(a):
    c = math.sqrt(1 - a.norm2())
    return Realization.scalar(a.conj(), c, c, -a)


def test_shape_validation():
    with pytest.raises(ShapeMismatch):
        Realization(QMatrix.eye(2), QMatrix.zeros(3, 1), QMatrix.zeros(1, 2), QMatrix.zeros(1, 1))
    with pytest.raises(ShapeMismatch):
        Realization(QMatrix.eye(2), QMatrix.zeros(2, 1), QMatrix.zeros(1, 2), QMatrix.zeros(2, 1))


def test_markov_with_zero_A(rng):
    R = Realization(QMatrix.zeros(2, 2), QMatrix.random(rng, 2, 1), QMatrix.random(rng, 1, 2), QMatrix.eye(1))
    assert markov(R, 1) == R.C @ R.B
    assert all(markov(R, n).max_abs() == 0 for n in range(2, 5))


def test_markov_blaschke_quadruple():
    a = Quaternion(0, 0.5, 0, 0.5)
    R = blaschke_quadruple(a)
    assert markov(R, 0)[0, 0] == -a
    for n in range(1, 8):
        expected = a.conj() ** (n - 1) * (1 - a.norm2())
        assert (markov(R, n)[0, 0] - expected).norm() < 1e-15


def test_companion_examples():
    R = companion([1, QI, QJ])
    assert [markov(R, n)[0, 0] for n in range(5)] == [Quaternion(1.0), QI, QJ, Quaternion(), Quaternion()]
    assert companion([QMatrix.eye(2)]).state_dim == 0
    mats = [QMatrix.eye(2)] * 4
    assert companion(mats).state_dim == 3 * 2


def test_transfer_series_matches_markov(rng):
    R = Realization.random(rng, 3)
    H = transfer_series(R, 10)
    assert all(H[n] == markov(R, n) for n in range(11))


def test_transfer_closed_form(rng):
    R = Realization.random(rng, 3, a_norm=0.6)
    p = Quaternion(0, 0, 0.3)
    N = 60
    tail = 10 * (0.3 * 0.6) ** N
    assert (transfer_closed(R, p) - transfer_value(R, p, N)).max_abs() < tail + 1e-13


def test_real_axis_classical():
    R = Realization.scalar(0.5, 1.0, 2.0, 0.25)
    for x in (-0.7, 0.1, 1.3):
        assert real_axis_value(R, x)[0, 0].isclose(0.25 + 2 * x / (1 - 0.5 * x))
        assert transfer_closed(R, x)[0, 0].isclose(0.25 + 2 * x / (1 - 0.5 * x))


def test_product_is_star_product(rng):
    R1, R2 = Realization.random(rng, 2, 2, 1), Realization.random(rng, 3, 1, 2)
    H = matrix_star_mul(transfer_series(R1, 15), transfer_series(R2, 15))
    assert transfer_series(product(R1, R2), 15).max_abs_diff(H) < 1e-12


def test_product_with_identity_system(rng):
    R = Realization.random(rng, 2)
    I = Realization.static(QMatrix.eye(1))
    assert transfer_series(product(R, I), 8).max_abs_diff(transfer_series(R, 8)) == 0


def test_product_of_blaschke_second_coefficient():
    a, b = Quaternion(0, 0.3, 0.2), Quaternion(0.1, 0, 0, 0.4)
    Ra, Rb = blaschke_quadruple(a), blaschke_quadruple(b)
    conv = sum((markov(Ra, r)[0, 0] * markov(Rb, 2 - r)[0, 0] for r in range(3)), Quaternion())
    assert (markov(product(Ra, Rb), 2)[0, 0] - conv).norm() < 1e-15


def test_concat(rng):
    R1, R2 = Realization.random(rng, 2, 1, 2), Realization.random(rng, 1, 2, 2)
    R = concat(R1, R2)
    for n in range(5):
        M = markov(R, n)
        assert M[:, :1].allclose(markov(R1, n), atol=1e-15)
        assert M[:, 1:].allclose(markov(R2, n), atol=1e-15)


def test_inverse(rng):
    R = Realization.random(rng, 3, 2, 2)
    G = matrix_star_mul(transfer_series(inverse(R), 12), transfer_series(R, 12))
    assert G.max_abs_diff(MatrixQSeries.identity(2, 12)) < 1e-10
    D = Realization.static(QMatrix.scalar(QJ * 2))
    assert inverse(D).D[0, 0] == QJ * -0.5
    with pytest.raises(NonInvertibleD):
        inverse(Realization.static(QMatrix.zeros(1, 1)))


def test_minimal_realization_examples():
    a = (QI + QK) * 0.5
    f = [-a] + [a.conj() ** (n - 1) * (1 - a.norm2()) for n in range(1, 13)]
    R = minimal_realization(f)
    assert R.state_dim == 1
    assert max((markov(R, n)[0, 0] - f[n]).norm() for n in range(13)) < 1e-12
    Z = minimal_realization([QJ] + [0] * 8)
    assert Z.state_dim == 0 and Z.D[0, 0] == QJ
    poly = [1, QI, QJ] + [0] * 6
    P = minimal_realization(poly)
    assert P.state_dim == 2
    assert max((markov(P, n)[0, 0] - Quaternion.coerce(poly[n])).norm() for n in range(9)) < 1e-12


def test_minimal_realization_round_trip(rng):
    for n in (1, 2, 3):
        R = Realization.random(rng, n, 2, 1)
        f = markov_sequence(R, 20)
        M = minimal_realization(f)
        assert M.state_dim == n
        assert max((a - b).max_abs() for a, b in zip(f, markov_sequence(M, 20))) < 1e-8
        # idempotence of minimality
        assert minimal_realization(markov_sequence(M, 20)).state_dim == n


def test_minimal_realization_errors():
    with pytest.raises(RankDeficientData):
        minimal_realization([1, 2])
    # the shifted Hankel block leaves the column space of the Hankel block
    with pytest.raises(RankDeficientData):
        minimal_realization([1, 0, 0, 1, 0])
    with pytest.raises(RankDeficientData):
        minimal_realization([1, 0, 1])


def test_rational_quotient():
    assert rational_quotient(QSeries([0, 1]), QSeries([1, 0])) == QSeries([0, 1])
    a = Quaternion(0.2, 0.3, -0.1, 0.4)
    s = rational_quotient(QSeries([-a, 1]).truncate(10), QSeries([1, -a.conj()]).truncate(10))
    expected = [-a] + [a.conj() ** (n - 1) * (1 - a.norm2()) for n in range(1, 11)]
    assert max((s[n] - expected[n]).norm() for n in range(11)) < 1e-15


def test_rational_quotient_real_axis():
    P, Q = QSeries([1, 2, 0]).truncate(30), QSeries([1, -0.5]).truncate(30)
    s = rational_quotient(P, Q)
    x = 0.4
    assert s(x).isclose((1 + 2 * x) / (1 - 0.5 * x))


def test_unitary_equivalence(rng):
    R = Realization.random(rng, 3)
    W = range_basis(QMatrix.random(rng, 3, 3))
    U = unitary_equivalence(R, R.conjugate_by(W))
    assert U is not None and U.allclose(W, atol=1e-10)
    assert unitary_equivalence(R, R).allclose(QMatrix.eye(3), atol=1e-10)
    other = Realization.random(rng, 3)
    assert unitary_equivalence(R, other) is None


def test_unitary_equivalence_needs_observability():
    # the second state never reaches the output
    R = Realization(
        QMatrix.diag([0.5, 0.3]), QMatrix.from_rows([[1], [1]]), QMatrix.from_rows([[1, 0]]), QMatrix.eye(1)
    )
    with pytest.raises(NotOuterConnected):
        unitary_equivalence(R, R)
