"""Expression grammar shared by the CLI, the ODE spec files and the tests.

    expr    :=  ['+'|'-'] term (('+'|'-') term)*
    term    :=  factor (('*'|'/') factor)*
    factor  :=  primary ['^' INT]
    primary :=  INT | '(' expr ')' | symbol
    symbol  :=  NAME TICKS? [ '(' NAME (',' NAME)* ')' ]

Whitespace is ignored.  INT is a nonnegative integer literal.  NAME is an
identifier; 't' is the independent variable, 'x' (with optional derivative
ticks) a jet variable, declared parameter names become coefficients, and a
NAME followed by an argument list denotes an unknown function of those
arguments, e.g. xi(t,x) or f1(t).  Ticks on a one-argument function name
(f1''(t)) and underscore subscripts on the base name (xi_tx(t,x)) select
derivatives; underscores are reserved for that use.  '/' only divides by a
parameter-level expression (one with no variables in it).

The printer in expr.py emits exactly this grammar, so print-then-parse is
the identity on canonical forms.
"""

from __future__ import annotations

from .errors import ExprSyntaxError, UndeclaredSymbolError
from .expr import Expr, func, jet, t_var
from .field import ParamField

_INT, _NAME, _OP, _END = 0, 1, 2, 3


def _lex(text: str) -> list:
    toks = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append((_INT, text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            name = text[i:j]
            ticks = 0
            while j < n and text[j] == "'":
                ticks += 1
                j += 1
            toks.append((_NAME, (name, ticks), i))
            i = j
            continue
        if ch in "+-*/^(),":
            toks.append((_OP, ch, i))
            i += 1
            continue
        raise ExprSyntaxError("unexpected character %r" % ch, i)
    toks.append((_END, "", n))
    return toks


class _Parser:
    def __init__(self, text: str, params):
        self.text = text
        self.toks = _lex(text)
        self.pos = 0
        self.params = frozenset(params)
        for p in self.params:
            if p in ("t", "x") or not p.isidentifier():
                raise ExprSyntaxError("invalid parameter name '%s'" % p, 0)

    def peek(self):
        return self.toks[self.pos]

    def next(self):
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        kind, val, at = self.next()
        if kind != _OP or val != op:
            raise ExprSyntaxError("expected '%s'" % op, at)

    def parse(self) -> Expr:
        e = self.expr()
        kind, _, at = self.peek()
        if kind != _END:
            raise ExprSyntaxError("unexpected trailing input", at)
        return e

    def expr(self) -> Expr:
        kind, val, _ = self.peek()
        sign = 1
        if kind == _OP and val in "+-":
            self.next()
            sign = -1 if val == "-" else 1
        e = self.term()
        if sign < 0:
            e = -e
        while True:
            kind, val, _ = self.peek()
            if kind == _OP and val in "+-":
                self.next()
                rhs = self.term()
                e = e + rhs if val == "+" else e - rhs
            else:
                return e

    def term(self) -> Expr:
        e = self.factor()
        while True:
            kind, val, at = self.peek()
            if kind == _OP and val in "*/":
                self.next()
                rhs = self.factor()
                if val == "*":
                    e = e * rhs
                else:
                    if rhs.atoms():
                        raise ExprSyntaxError(
                            "division only by parameter-level expressions "
                            "(use rhs_num/rhs_den for an ODE right-hand side)", at)
                    c = rhs.terms.get((), None)
                    if c is None or c.is_zero():
                        raise ExprSyntaxError("division by zero", at)
                    e = e.scale(ParamField.coerce(1) / c)
            else:
                return e

    def factor(self) -> Expr:
        e = self.primary()
        kind, val, _ = self.peek()
        if kind == _OP and val == "^":
            self.next()
            kind, val, at = self.next()
            if kind != _INT:
                raise ExprSyntaxError("exponent must be a nonnegative integer literal", at)
            e = e ** int(val)
        return e

    def primary(self) -> Expr:
        kind, val, at = self.next()
        if kind == _INT:
            return Expr.of_coeff(int(val))
        if kind == _OP and val == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        if kind == _NAME:
            return self.symbol(val, at)
        raise ExprSyntaxError("expected a number, name or parenthesis", at)

    def symbol(self, val, at) -> Expr:
        name, ticks = val
        kind, nxt, _ = self.peek()
        if kind == _OP and nxt == "(":
            return self.function(name, ticks, at)
        if ticks:
            if name == "x":
                return Expr.of_atom(jet(ticks))
            raise ExprSyntaxError("derivative ticks only apply to x or to a function", at)
        if name == "t":
            return Expr.of_atom(t_var())
        if name == "x":
            return Expr.of_atom(jet(0))
        if name in self.params:
            return Expr.parameter(name)
        raise UndeclaredSymbolError(name, at)

    def function(self, name, ticks, at) -> Expr:
        self.expect_op("(")
        args = []
        while True:
            kind, val, vat = self.next()
            if kind != _NAME or val[1]:
                raise ExprSyntaxError("function arguments must be plain variable names", vat)
            arg = val[0]
            if arg not in ("t", "x"):
                raise ExprSyntaxError("function argument must be t or x, got '%s'" % arg, vat)
            if arg in args:
                raise ExprSyntaxError("repeated function argument '%s'" % arg, vat)
            args.append(arg)
            kind, val, vat = self.next()
            if kind == _OP and val == ")":
                break
            if not (kind == _OP and val == ","):
                raise ExprSyntaxError("expected ',' or ')' in argument list", vat)
        args = tuple(args)
        base, deriv = name, [0] * len(args)
        if "_" in name:
            stem, _, suffix = name.rpartition("_")
            if stem and suffix and all(ch in args for ch in suffix):
                base = stem
                for ch in suffix:
                    deriv[args.index(ch)] += 1
            elif suffix and not all(ch in args for ch in suffix):
                raise ExprSyntaxError(
                    "'_%s' is not a derivative subscript for arguments (%s); "
                    "underscores in function names are reserved" % (suffix, ",".join(args)), at)
        if ticks:
            if len(args) != 1:
                raise ExprSyntaxError("tick derivatives need a one-argument function", at)
            deriv[0] += ticks
        if base in self.params:
            raise ExprSyntaxError("'%s' is declared as a parameter, not a function" % base, at)
        if base in ("t", "x"):
            raise ExprSyntaxError("'%s' cannot be used as a function name" % base, at)
        return Expr.of_atom(func(base, args, tuple(deriv)))


def parse_expr(text: str, params=()) -> Expr:
    """Parse a grammar-conforming string into a canonical Expr."""
    return _Parser(text, params).parse()
