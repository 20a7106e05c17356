from typing import Optional


class WavekitError(Exception):
    """Base class for every error raised by wavekit"""


class ExpressionError(WavekitError, ValueError):
    """Problem with a user-supplied expression; `offset` is the byte offset in the source"""

    def __init__(self, message: str, offset: Optional[int] = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)


class ExpressionSyntaxError(ExpressionError):
    pass


class UnknownIdentifierError(ExpressionError):
    pass


class ArityError(ExpressionError):
    pass


class EvaluationError(WavekitError, ArithmeticError):
    """Domain error or division by zero while evaluating an expression"""


class PlateauError(WavekitError):
    """D vanishes on consecutive scan cells, so its zero set is not finite"""


class TangentZeroWarning(UserWarning):
    """|D| dips close to zero without a sign change and without a confirmed root"""


class HypothesisError(WavekitError):
    pass


class NumericalError(WavekitError):
    pass


class GridNonConvergence(NumericalError):
    pass


class BracketFailure(NumericalError):
    pass


class StepUnderflow(NumericalError):
    pass


class PhiSingular(NumericalError):
    pass
