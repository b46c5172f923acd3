"""Canonical polynomial expressions over the jet variables.

An Expr is a map from monomials to ParamField coefficients.  Monomials are
power products of atoms; an atom is one of

  * the independent variable t,
  * a jet variable x, x', x'', ... (derivative order k >= 0),
  * an unknown-function derivative such as xi_tx(t,x) or f1''(t),
  * an undetermined constant c1, c2, ...

Atoms carry a fixed total order (t, then jet variables by order, then
function symbols by name and derivative multi-index, then constants), and
monomials are compared graded-lexicographically over it.  Structural
equality of Exprs coincides with polynomial equality: arithmetic always
returns the canonical form.  Exprs are immutable; all operations are pure.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .errors import ExponentOverflowError
from .field import ParamField, field_latex, field_text

T_KIND = 0
JET_KIND = 1
FUNC_KIND = 2
CONST_KIND = 3

# Exponents above this bound abort arithmetic early; runaway expansions in
# the prolongation pipeline should fail loudly, not thrash.
MAX_EXPONENT = 64


def _name_key(name: str) -> tuple:
    """Split a trailing integer so that c2 sorts before c10."""
    i = len(name)
    while i > 0 and name[i - 1].isdigit():
        i -= 1
    return (name[:i], int(name[i:]) if i < len(name) else -1)


class Atom:
    __slots__ = ("kind", "name", "order", "args", "deriv", "_key")

    def __init__(self, kind, name, order=0, args=(), deriv=()):
        self.kind = kind
        self.name = name
        self.order = order
        self.args = args
        self.deriv = deriv
        self._key = (kind, order, _name_key(name), args, deriv)

    @property
    def key(self):
        return self._key

    def __eq__(self, other):
        return isinstance(other, Atom) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __lt__(self, other):
        return self._key < other._key

    def __repr__(self):
        return "Atom(%s)" % (self,)

    def __str__(self):
        if self.kind == T_KIND:
            return "t"
        if self.kind == JET_KIND:
            return self.name + "'" * self.order
        if self.kind == FUNC_KIND:
            base = self.name
            if any(self.deriv):
                if len(self.args) == 1:
                    base += "'" * self.deriv[0]
                else:
                    base += "_" + "".join(a * d for a, d in zip(self.args, self.deriv))
            return "%s(%s)" % (base, ",".join(self.args))
        return self.name

    def latex(self) -> str:
        if self.kind == T_KIND:
            return "t"
        if self.kind == JET_KIND:
            if self.order == 0:
                return "x"
            if self.order == 1:
                return "\\dot{x}"
            if self.order == 2:
                return "\\ddot{x}"
            return "x^{(%d)}" % self.order
        if self.kind == FUNC_KIND:
            base = _GREEK.get(self.name)
            if base is None:
                nk = _name_key(self.name)
                base = "%s_{%d}" % (nk[0], nk[1]) if nk[1] >= 0 else self.name
            if any(self.deriv):
                if len(self.args) == 1:
                    base += "'" * self.deriv[0]
                else:
                    base += "_{%s}" % "".join(a * d for a, d in zip(self.args, self.deriv))
            return base
        nk = _name_key(self.name)
        return "%s_{%d}" % (nk[0], nk[1]) if nk[1] >= 0 else self.name


_GREEK = {"xi": "\\xi", "eta": "\\eta"}


@lru_cache(maxsize=None)
def t_var() -> Atom:
    return Atom(T_KIND, "t")


@lru_cache(maxsize=None)
def jet(order: int) -> Atom:
    if order < 0:
        raise ValueError("jet order must be >= 0")
    return Atom(JET_KIND, "x", order=order)


@lru_cache(maxsize=None)
def func(name: str, args: tuple, deriv: tuple = None) -> Atom:
    if deriv is None:
        deriv = (0,) * len(args)
    if len(deriv) != len(args) or any(d < 0 for d in deriv):
        raise ValueError("derivative multi-index %r does not fit arguments %r" % (deriv, args))
    return Atom(FUNC_KIND, name, args=tuple(args), deriv=tuple(deriv))


@lru_cache(maxsize=None)
def const(name: str) -> Atom:
    return Atom(CONST_KIND, name)


def bump_deriv(a: Atom, arg: str) -> Atom:
    """Return the atom for one further derivative with respect to arg."""
    i = a.args.index(arg)
    d = list(a.deriv)
    d[i] += 1
    return func(a.name, a.args, tuple(d))


# A monomial: tuple of (Atom, power) pairs sorted by atom key, powers > 0.
ONE_MONO = ()


def _mono_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    acc = dict(m1)
    for a, e in m2:
        p = acc.get(a, 0) + e
        if p > MAX_EXPONENT:
            raise ExponentOverflowError(
                "exponent of %s exceeds the bound %d" % (a, MAX_EXPONENT))
        acc[a] = p
    return tuple(sorted(acc.items(), key=lambda ae: ae[0].key))


def _mono_key(m, universe):
    d = {a: e for a, e in m}
    return (sum(d.values()), tuple(d.get(a, 0) for a in universe))


class Expr:
    """Canonical multivariate polynomial in atoms over ParamField."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict):
        self.terms = terms

    # -- construction ------------------------------------------------------

    @classmethod
    def zero(cls) -> "Expr":
        return cls({})

    @classmethod
    def of_coeff(cls, c) -> "Expr":
        c = ParamField.coerce(c)
        return cls({ONE_MONO: c} if not c.is_zero() else {})

    @classmethod
    def of_atom(cls, a: Atom, power: int = 1) -> "Expr":
        if power == 0:
            return cls.of_coeff(1)
        return cls({((a, power),): ParamField.coerce(1)})

    @classmethod
    def parameter(cls, name: str) -> "Expr":
        return cls.of_coeff(ParamField.var(name))

    @staticmethod
    def coerce(v) -> "Expr":
        if isinstance(v, Expr):
            return v
        if isinstance(v, Atom):
            return Expr.of_atom(v)
        return Expr.of_coeff(v)

    # -- queries ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def atoms(self, kind=None) -> list:
        seen = set()
        for m in self.terms:
            for a, _ in m:
                if kind is None or a.kind == kind:
                    seen.add(a)
        return sorted(seen, key=lambda a: a.key)

    def degree(self, a: Atom) -> int:
        best = 0
        for m in self.terms:
            for b, e in m:
                if b == a and e > best:
                    best = e
        return best

    def func_degree(self) -> int:
        """Largest total power of unknown-function atoms in any monomial."""
        best = 0
        for m in self.terms:
            d = sum(e for a, e in m if a.kind == FUNC_KIND)
            if d > best:
                best = d
        return best

    def jet_order(self) -> int:
        """Highest jet-variable order present (-1 when none)."""
        best = -1
        for m in self.terms:
            for a, _ in m:
                if a.kind == JET_KIND and a.order > best:
                    best = a.order
        return best

    def coefficient(self, m) -> ParamField:
        return self.terms.get(m, ParamField.coerce(0))

    def n_terms(self) -> int:
        return len(self.terms)

    def sorted_terms(self) -> list:
        universe = self.atoms()
        return sorted(self.terms.items(),
                      key=lambda mc: _mono_key(mc[0], universe), reverse=True)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other) -> "Expr":
        other = Expr.coerce(other)
        acc = dict(self.terms)
        for m, c in other.terms.items():
            v = acc.get(m)
            v = c if v is None else v + c
            if v.is_zero():
                acc.pop(m, None)
            else:
                acc[m] = v
        return Expr(acc)

    __radd__ = __add__

    def __sub__(self, other) -> "Expr":
        return self + (-Expr.coerce(other))

    def __rsub__(self, other) -> "Expr":
        return Expr.coerce(other) - self

    def __neg__(self) -> "Expr":
        return Expr({m: -c for m, c in self.terms.items()})

    def __mul__(self, other) -> "Expr":
        other = Expr.coerce(other)
        if not self.terms or not other.terms:
            return Expr({})
        acc: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                c = c1 * c2
                v = acc.get(m)
                v = c if v is None else v + c
                if v.is_zero():
                    acc.pop(m, None)
                else:
                    acc[m] = v
        return Expr(acc)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Expr":
        if k < 0:
            raise ValueError("negative exponent on an expression")
        out = Expr.of_coeff(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def scale(self, c) -> "Expr":
        c = ParamField.coerce(c)
        if c.is_zero():
            return Expr({})
        return Expr({m: v * c for m, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Expr):
            return NotImplemented
        if set(self.terms) != set(other.terms):
            return False
        return all(other.terms[m] == c for m, c in self.terms.items())

    def __hash__(self):
        return hash(frozenset((m, c.num, c.den) for m, c in self.terms.items()))

    # -- substitution -------------------------------------------------------

    def substitute(self, target: Atom, replacement) -> "Expr":
        """Replace every occurrence of target by a polynomial expression."""
        replacement = Expr.coerce(replacement)
        out = Expr.zero()
        for m, c in self.terms.items():
            p = 0
            rest = []
            for a, e in m:
                if a == target:
                    p = e
                else:
                    rest.append((a, e))
            piece = Expr({tuple(rest): c})
            if p:
                piece = piece * replacement ** p
            out = out + piece
        return out

    def rational_substitute(self, target: Atom, num: "Expr", den: "Expr") -> tuple:
        """Substitute target -> num/den and clear the denominator.

        Returns (den**d * self[target -> num/den], d) where d is the degree
        of self in target.
        """
        if den.is_zero():
            raise ZeroDivisionError("zero denominator in rational substitution")
        d = self.degree(target)
        if d == 0:
            return self, 0
        out = Expr.zero()
        for m, c in self.terms.items():
            p = 0
            rest = []
            for a, e in m:
                if a == target:
                    p = e
                else:
                    rest.append((a, e))
            piece = Expr({tuple(rest): c}) * num ** p * den ** (d - p)
            out = out + piece
        return out, d

    def collect(self, by: Atom) -> list:
        """Ordered [(power, coefficient)] with sum(coeff * by**power) == self."""
        buckets: dict = {}
        for m, c in self.terms.items():
            p = 0
            rest = []
            for a, e in m:
                if a == by:
                    p = e
                else:
                    rest.append((a, e))
            acc = buckets.setdefault(p, {})
            key = tuple(rest)
            v = acc.get(key)
            v = c if v is None else v + c
            if v.is_zero():
                acc.pop(key, None)
            else:
                acc[key] = v
        return [(p, Expr(buckets[p])) for p in sorted(buckets) if buckets[p]]

    def bind_params(self, assign: dict) -> "Expr":
        """Substitute Fraction values for parameter symbols in coefficients."""
        acc: dict = {}
        for m, c in self.terms.items():
            v = c.bind(assign)
            if not v.is_zero():
                acc[m] = v
        return Expr(acc)

    # -- evaluation -----------------------------------------------------------

    def evaluate(self, atom_values: dict, params: dict) -> Fraction:
        """Exact evaluation; every atom present must be assigned a Fraction."""
        total = Fraction(0)
        for m, c in self.terms.items():
            v = c.evaluate(params)
            for a, e in m:
                if a not in atom_values:
                    raise ValueError("no value for %s" % a)
                v *= Fraction(atom_values[a]) ** e
            total += v
        return total

    def evaluate_float(self, atom_values: dict, params: dict) -> float:
        total = 0.0
        for m, c in self.terms.items():
            v = c.evaluate_float(params)
            for a, e in m:
                if a not in atom_values:
                    raise ValueError("no value for %s" % a)
                v *= atom_values[a] ** e
            total += v
        return total

    # -- printing ---------------------------------------------------------------

    def __str__(self):
        return expr_text(self)

    def __repr__(self):
        return "Expr(%s)" % (self,)

    def latex(self) -> str:
        return expr_latex(self)


def expr_text(e: Expr) -> str:
    if not e.terms:
        return "0"
    parts = []
    for m, c in e.sorted_terms():
        neg = c.sign_of_lead() < 0
        mag = -c if neg else c
        mono = "*".join(str(a) if p == 1 else "%s^%d" % (a, p) for a, p in m)
        if not m:
            body = field_text(mag)
        elif mag.is_one():
            body = mono
        else:
            body = "%s*%s" % (field_text(mag), mono)
        if not parts:
            parts.append("-" + body if neg else body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def expr_latex(e: Expr) -> str:
    if not e.terms:
        return "0"
    parts = []
    for m, c in e.sorted_terms():
        neg = c.sign_of_lead() < 0
        mag = -c if neg else c
        mono = " ".join(a.latex() if p == 1 else "%s^{%d}" % (a.latex(), p) for a, p in m)
        if not m:
            body = field_latex(mag)
        elif mag.is_one():
            body = mono
        else:
            body = "%s %s" % (field_latex(mag), mono)
        if not parts:
            parts.append("-" + body if neg else body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


# Module-level forms of the kernel operations, mirroring the public API.

def substitute(e: Expr, target: Atom, replacement) -> Expr:
    return e.substitute(target, replacement)


def rational_substitute(e: Expr, target: Atom, num: Expr, den: Expr) -> tuple:
    return e.rational_substitute(target, num, den)


def collect(e: Expr, by: Atom) -> list:
    return e.collect(by)


def term_diff(e1: Expr, e2: Expr) -> tuple:
    """Term-level difference of two canonical expressions.

    Returns (missing, extra): terms of e1 absent from or different in e2,
    and terms of e2 not accounted for by e1, both as printed strings.
    Empty lists mean the term multisets agree exactly.
    """
    missing, extra = [], []
    for m, c in e1.sorted_terms():
        c2 = e2.terms.get(m)
        if c2 is None or c2 != c:
            missing.append(expr_text(Expr({m: c})))
    for m, c in e2.sorted_terms():
        c1 = e1.terms.get(m)
        if c1 is None or c1 != c:
            extra.append(expr_text(Expr({m: c})))
    return missing, extra
