"""Exception types shared across the package.

Each class carries the CLI exit code it maps to.
"""


class QFractalError(Exception):
    exit_code = 3


class InvalidInput(QFractalError, ValueError):
    exit_code = 2


class NotSymmetric(InvalidInput):
    pass


class ReducibleBlock(InvalidInput):
    pass


class NotBidirectional(InvalidInput):
    pass


class NotStratifiable(InvalidInput):
    pass


class NotConnected(InvalidInput):
    pass


class NotAScheme(InvalidInput):
    pass


class NotCommutative(InvalidInput):
    pass


class NumericalFailure(QFractalError, ArithmeticError):
    exit_code = 3


class ClosureOverflow(NumericalFailure):
    pass


class SizeLimit(QFractalError):
    exit_code = 4
