"""Exception hierarchy shared by every subpackage.

The CLI maps these onto exit codes: ``ParseError``/``ModelError`` give 2,
everything under ``AlgebraError``, ``AnalysisError`` and ``MomentError``
gives 3.
"""


class QFramesError(Exception):
    pass


# -- symbolic engine ---------------------------------------------------------

class AlgebraError(QFramesError):
    pass


class UnknownGenerator(AlgebraError):
    pass


class NonClosedCommutator(AlgebraError):
    """A reordering needed a commutator that the signature cannot expand."""

    def __init__(self, left, right, reason=""):
        self.left = left
        self.right = right
        msg = f"commutator [{left}, {right}] has no declared expansion"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)


class SignatureError(AlgebraError):
    pass


class NotInvertible(AlgebraError):
    pass


# -- constraint analysis -----------------------------------------------------

class AnalysisError(QFramesError):
    pass


class NotLinearInMomentum(AnalysisError):
    pass


class LapseNotInvertible(AnalysisError):
    pass


class FrozenClock(AnalysisError):
    pass


class NonHermitianConstraint(AnalysisError):
    pass


# -- moment states -----------------------------------------------------------

class MomentError(QFramesError):
    pass


class HamiltonianNotInCommutant(MomentError):
    pass


class DegreeOverflow(MomentError):
    pass


class ClosureTruncated(UserWarning):
    """Moments above the truncation degree were dropped from the flow."""


# -- models / front end ------------------------------------------------------

class ModelError(QFramesError):
    pass


class UnknownModel(ModelError):
    pass


class BadParameter(ModelError):
    pass


class ParseError(QFramesError):
    def __init__(self, message, line, column):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}")
