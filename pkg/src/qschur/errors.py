"""Exception hierarchy shared by every qschur module."""

import numpy as np


class QSchurError(Exception):
    """Base class for all library errors."""


class DivisionByZero(QSchurError, ZeroDivisionError):
    pass


class Singular(QSchurError, np.linalg.LinAlgError):
    pass


class NotHermitian(QSchurError, ValueError):
    pass


class OddComplexRank(QSchurError, ArithmeticError):
    """The complex rank of a complex-adjoint matrix came out odd.

    This only happens when the rank threshold falls between the two members
    of a singular-value pair, i.e. the data is numerically ambiguous.
    """


class ShapeMismatch(QSchurError, ValueError):
    pass


class NonUnit(QSchurError, ZeroDivisionError):
    """Series with vanishing constant term has no reciprocal."""


class SpectrumHit(Singular):
    """The point lies (numerically) in the S-spectrum."""


class DivergenceRegion(QSchurError, ValueError):
    pass


class NonInvertibleD(Singular):
    pass


class RankDeficientData(QSchurError, ValueError):
    pass


class NotOuterConnected(QSchurError, ValueError):
    pass


class ShiftWithoutZero(QSchurError, ValueError):
    pass


class SpherePole(DivisionByZero):
    pass


class PointOutsideBall(QSchurError, ValueError):
    pass


class NotInBall(QSchurError, ValueError):
    pass


class UnimodularStop(QSchurError, ArithmeticError):
    """Schur transform requested for a series with |s(0)| = 1."""


class TruncationExhausted(QSchurError, ArithmeticError):
    pass


class NotCoisometric(QSchurError, ValueError):
    pass
