"""Differentiation on the jet space.

Jet variables t, x, x', x'', ... are mutually independent coordinates; the
total derivative D_t is the operator that restores the chain rule along
solutions:

    D_t e = de/dt + sum_k x^(k+1) * de/dx^(k)

Partial derivatives act on unknown-function atoms by bumping the matching
slot of the derivative multi-index, so d/dx xi_t(t,x) = xi_tx(t,x).  All
operations are pure functions over immutable Exprs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import OrderOverflowError, ParamDifferentiationError, UndeclaredSymbolError
from .expr import Atom, Expr, FUNC_KIND, JET_KIND, T_KIND, bump_deriv, jet, t_var


@dataclass(frozen=True)
class JetContext:
    """Differentiation context: the highest jet order in play."""
    max_order: int
    dependent: str = "x"
    independent: str = "t"

    def __post_init__(self):
        if self.max_order < 1:
            raise ValueError("max_order must be >= 1")


def _resolve(v) -> Atom:
    if isinstance(v, Atom):
        return v
    if v == "t":
        return t_var()
    if v == "x" or (v and v[0] == "x" and set(v[1:]) == {"'"}):
        return jet(len(v) - 1)
    raise UndeclaredSymbolError(str(v))


def _atom_derivative(a: Atom, v: Atom):
    """d(a)/d(v) as None (zero), 1, or a bumped function atom."""
    if a == v:
        return 1
    if a.kind != FUNC_KIND:
        return None
    if v.kind == T_KIND and "t" in a.args:
        return bump_deriv(a, "t")
    if v.kind == JET_KIND and v.order == 0 and "x" in a.args:
        return bump_deriv(a, "x")
    return None


def partial(e: Expr, v) -> Expr:
    """Partial derivative of e by t or a jet variable.

    Unknown-function atoms differentiate through their named arguments;
    parameter symbols are constants.  Passing a parameter name raises
    ParamDifferentiationError since that is almost always a mistake.
    """
    if isinstance(v, str):
        param_syms = set()
        for c in e.terms.values():
            param_syms.update(c.symbols())
        if v in param_syms:
            raise ParamDifferentiationError(
                "cannot differentiate by parameter '%s'; parameters are constants" % v)
        v = _resolve(v)
    elif not isinstance(v, Atom) or v.kind not in (T_KIND, JET_KIND):
        raise ValueError("can only differentiate by t or a jet variable, got %r" % (v,))
    out = Expr.zero()
    for m, c in e.terms.items():
        for i, (a, p) in enumerate(m):
            da = _atom_derivative(a, v)
            if da is None:
                continue
            rest = list(m[:i]) + list(m[i + 1:])
            if p > 1:
                rest.append((a, p - 1))
            piece = Expr({tuple(sorted(rest, key=lambda ae: ae[0].key)): c * p})
            if da != 1:
                piece = piece * Expr.of_atom(da)
            out = out + piece
    return out


def total_derivative(e: Expr, ctx: JetContext) -> Expr:
    """Apply D_t once; the result may use jet order ctx.max_order."""
    top = e.jet_order()
    if top >= ctx.max_order:
        raise OrderOverflowError(
            "expression of jet order %d cannot be differentiated within max_order %d"
            % (top, ctx.max_order))
    out = partial(e, t_var())
    for k in range(ctx.max_order):
        d = partial(e, jet(k))
        if not d.is_zero():
            out = out + Expr.of_atom(jet(k + 1)) * d
    return out
