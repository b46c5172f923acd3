"""Lie point-symmetry analysis for scalar ODEs rational in the jet variables."""

from .errors import (
    ExponentOverflowError,
    ExprSyntaxError,
    GenericityViolationError,
    InputError,
    InvariantViolation,
    NonAutonomousError,
    OdesymError,
    OrderOverflowError,
    ParamDifferentiationError,
    UndeclaredSymbolError,
)
from .expr import (
    Atom,
    Expr,
    collect,
    const,
    func,
    jet,
    rational_substitute,
    substitute,
    t_var,
    term_diff,
)
from .field import ParamField, ParamPoly, poly_gcd
from .parse import parse_expr

__all__ = [
    "Atom",
    "Expr",
    "ParamField",
    "ParamPoly",
    "collect",
    "const",
    "func",
    "jet",
    "parse_expr",
    "poly_gcd",
    "rational_substitute",
    "substitute",
    "t_var",
    "term_diff",
    "OdesymError",
    "InputError",
    "ExprSyntaxError",
    "UndeclaredSymbolError",
    "ParamDifferentiationError",
    "NonAutonomousError",
    "GenericityViolationError",
    "OrderOverflowError",
    "ExponentOverflowError",
    "InvariantViolation",
]
