"""Exception hierarchy shared across the package.

InputError and its subclasses signal problems with user-supplied data and
map to CLI exit code 2; InvariantViolation signals an internal consistency
failure and maps to exit code 3.
"""


class OdesymError(Exception):
    pass


class InputError(OdesymError):
    """User-facing problem: bad file, bad expression, bad binding."""


class ExprSyntaxError(InputError):
    def __init__(self, message: str, pos: int):
        super().__init__("%s (at position %d)" % (message, pos))
        self.pos = pos


class UndeclaredSymbolError(InputError):
    def __init__(self, name: str, pos: int = -1):
        where = " (at position %d)" % pos if pos >= 0 else ""
        super().__init__("undeclared symbol '%s'%s" % (name, where))
        self.name = name


class ParamDifferentiationError(InputError):
    """Raised on differentiation by a parameter symbol: almost surely a typo."""


class NonAutonomousError(InputError):
    """Order reduction given an equation with explicit t dependence."""


class GenericityViolationError(InputError):
    """A parameter binding hits a divisor assumed nonzero during elimination."""


class OrderOverflowError(OdesymError):
    """A total derivative would exceed the jet context's maximal order."""


class ExponentOverflowError(OdesymError):
    """An exponent passed the configured bound; expansion is running away."""


class InvariantViolation(OdesymError):
    """Internal consistency check failed; indicates a bug, not bad input."""
