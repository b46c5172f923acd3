"""Exact coefficient arithmetic for the symbolic kernel.

Coefficients of every expression live in the fraction field of integer
polynomials in the declared parameter symbols (typically ``a`` and ``b``).
Two layers:

  * ParamPoly  -- multivariate polynomial with arbitrary-precision integer
                  coefficients, canonical dict representation.
  * ParamField -- reduced quotient num/den of two ParamPoly values.

Monomials are ordered graded-lexicographically with symbols compared
alphabetically; this order fixes sign normalization, leading terms and all
printed output.  Both classes are immutable values and safe to share across
threads.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as _int_gcd

# A monomial is a sorted tuple of (symbol, exponent) pairs, exponents > 0.
Mono = tuple

_EMPTY: Mono = ()


def _mono_mul(m1: Mono, m2: Mono) -> Mono:
    if not m1:
        return m2
    if not m2:
        return m1
    acc = dict(m1)
    for sym, e in m2:
        acc[sym] = acc.get(sym, 0) + e
    return tuple(sorted((s, e) for s, e in acc.items() if e))


def _mono_key(m: Mono, syms: tuple) -> tuple:
    """Graded-lex key of a monomial relative to a fixed symbol tuple."""
    d = dict(m)
    return (sum(d.values()), tuple(d.get(s, 0) for s in syms))


class ParamPoly:
    """Integer-coefficient polynomial in parameter symbols."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict):
        # terms: Mono -> int, zero coefficients stripped by the caller
        self.terms = terms

    # -- construction -------------------------------------------------

    @classmethod
    def const(cls, n: int) -> "ParamPoly":
        return cls({_EMPTY: n} if n else {})

    @classmethod
    def var(cls, name: str) -> "ParamPoly":
        return cls({((name, 1),): 1})

    @classmethod
    def zero(cls) -> "ParamPoly":
        return cls({})

    @classmethod
    def one(cls) -> "ParamPoly":
        return cls({_EMPTY: 1})

    # -- queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and _EMPTY in self.terms)

    def const_value(self) -> int:
        if not self.terms:
            return 0
        if not self.is_const():
            raise ValueError("polynomial %s is not constant" % self)
        return self.terms[_EMPTY]

    def symbols(self) -> tuple:
        seen = set()
        for m in self.terms:
            for sym, _ in m:
                seen.add(sym)
        return tuple(sorted(seen))

    def degree(self, sym: str) -> int:
        best = 0
        for m in self.terms:
            for s, e in m:
                if s == sym and e > best:
                    best = e
        return best

    def content(self) -> int:
        """Nonnegative gcd of all integer coefficients (0 for the zero poly)."""
        g = 0
        for c in self.terms.values():
            g = _int_gcd(g, abs(c))
            if g == 1:
                return 1
        return g

    def leading_term(self) -> tuple:
        """(monomial, coefficient) maximal under graded-lex."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        syms = self.symbols()
        lead = max(self.terms, key=lambda m: _mono_key(m, syms))
        return lead, self.terms[lead]

    def leading_sign(self) -> int:
        return 1 if self.leading_term()[1] > 0 else -1

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "ParamPoly") -> "ParamPoly":
        acc = dict(self.terms)
        for m, c in other.terms.items():
            v = acc.get(m, 0) + c
            if v:
                acc[m] = v
            else:
                acc.pop(m, None)
        return ParamPoly(acc)

    def __sub__(self, other: "ParamPoly") -> "ParamPoly":
        acc = dict(self.terms)
        for m, c in other.terms.items():
            v = acc.get(m, 0) - c
            if v:
                acc[m] = v
            else:
                acc.pop(m, None)
        return ParamPoly(acc)

    def __neg__(self) -> "ParamPoly":
        return ParamPoly({m: -c for m, c in self.terms.items()})

    def __mul__(self, other: "ParamPoly") -> "ParamPoly":
        if not self.terms or not other.terms:
            return ParamPoly({})
        acc: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                v = acc.get(m, 0) + c1 * c2
                if v:
                    acc[m] = v
                else:
                    acc.pop(m, None)
        return acc and ParamPoly(acc) or ParamPoly({})

    def scale(self, n: int) -> "ParamPoly":
        if n == 0:
            return ParamPoly({})
        return ParamPoly({m: c * n for m, c in self.terms.items()})

    def divexact_int(self, n: int) -> "ParamPoly":
        out = {}
        for m, c in self.terms.items():
            q, r = divmod(c, n)
            if r:
                raise ArithmeticError("coefficient %d not divisible by %d" % (c, n))
            out[m] = q
        return ParamPoly(out)

    def divexact(self, d: "ParamPoly") -> "ParamPoly":
        """Exact polynomial division; raises ArithmeticError if not exact."""
        if d.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if d.is_const():
            return self.divexact_int(d.const_value())
        rem = dict(self.terms)
        out: dict = {}
        syms = tuple(sorted(set(self.symbols()) | set(d.symbols())))
        dm, dc = d.leading_term()
        dmap = dict(dm)
        while rem:
            lm = max(rem, key=lambda m: _mono_key(m, syms))
            lc = rem[lm]
            lmap = dict(lm)
            qexp = []
            for sym, e in dmap.items():
                r = lmap.get(sym, 0) - e
                if r < 0:
                    raise ArithmeticError("inexact polynomial division")
                lmap[sym] = r
            q, r = divmod(lc, dc)
            if r:
                raise ArithmeticError("inexact polynomial division")
            qm = tuple(sorted((s, e) for s, e in lmap.items() if e))
            out[qm] = out.get(qm, 0) + q
            piece = ParamPoly({qm: q}) * d
            for m, c in piece.terms.items():
                v = rem.get(m, 0) - c
                if v:
                    rem[m] = v
                else:
                    rem.pop(m, None)
        return ParamPoly({m: c for m, c in out.items() if c})

    def subst(self, assign: dict) -> tuple:
        """Substitute Fraction values for symbols.

        Returns (poly, scale) with integer coefficients such that the exact
        substituted value equals poly / scale, scale a positive int.
        """
        acc: dict = {}
        for m, c in self.terms.items():
            val = Fraction(c)
            kept = []
            for sym, e in m:
                if sym in assign:
                    val *= Fraction(assign[sym]) ** e
                else:
                    kept.append((sym, e))
            key = tuple(kept)
            v = acc.get(key, Fraction(0)) + val
            if v:
                acc[key] = v
            else:
                acc.pop(key, None)
        scale = 1
        for v in acc.values():
            scale = scale * v.denominator // _int_gcd(scale, v.denominator)
        return ParamPoly({m: int(v * scale) for m, v in acc.items()}), scale

    def evaluate(self, assign: dict) -> Fraction:
        poly, scale = self.subst(assign)
        if not poly.is_const():
            missing = ", ".join(poly.symbols())
            raise ValueError("unbound parameter(s): %s" % missing)
        return Fraction(poly.const_value(), scale)

    # -- comparison / misc ----------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, ParamPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return "ParamPoly(%s)" % (self,)

    def __str__(self):
        return poly_text(self)

    def sorted_terms(self) -> list:
        syms = self.symbols()
        return sorted(self.terms.items(), key=lambda mc: _mono_key(mc[0], syms), reverse=True)


# -- gcd machinery -----------------------------------------------------


def _as_univar(p: ParamPoly, var: str) -> dict:
    """View p as univariate in var: exponent -> ParamPoly coefficient."""
    out: dict = {}
    for m, c in p.terms.items():
        e = 0
        rest = []
        for sym, k in m:
            if sym == var:
                e = k
            else:
                rest.append((sym, k))
        coeff = out.setdefault(e, {})
        key = tuple(rest)
        coeff[key] = coeff.get(key, 0) + c
    return {e: ParamPoly({m: c for m, c in t.items() if c}) for e, t in out.items()}


def _from_univar(u: dict, var: str) -> ParamPoly:
    acc: dict = {}
    for e, coeff in u.items():
        for m, c in coeff.terms.items():
            mm = _mono_mul(m, ((var, e),) if e else _EMPTY)
            acc[mm] = acc.get(mm, 0) + c
    return ParamPoly({m: c for m, c in acc.items() if c})


def _uni_mul_coeff(u: dict, c: ParamPoly) -> dict:
    out = {}
    for e, p in u.items():
        q = p * c
        if not q.is_zero():
            out[e] = q
    return out


def _uni_sub(u: dict, v: dict) -> dict:
    out = dict(u)
    for e, p in v.items():
        q = out.get(e, ParamPoly.zero()) - p
        if q.is_zero():
            out.pop(e, None)
        else:
            out[e] = q
    return out


def _gcd_many(polys) -> ParamPoly:
    g = ParamPoly.zero()
    for p in polys:
        g = poly_gcd(g, p)
        if g.is_const() and abs(g.const_value()) == 1:
            return ParamPoly.one()
    return g


def poly_gcd(f: ParamPoly, g: ParamPoly) -> ParamPoly:
    """Gcd in Z[symbols] via primitive pseudo-remainder sequences.

    Result is sign-normalized (positive leading coefficient); gcd(0, 0) = 0.
    """
    if f.is_zero():
        return g if g.is_zero() or g.leading_sign() > 0 else -g
    if g.is_zero():
        return f if f.leading_sign() > 0 else -f
    if f.is_const() or g.is_const():
        return ParamPoly.const(_int_gcd(f.content(), g.content()))
    syms = tuple(sorted(set(f.symbols()) | set(g.symbols())))
    var = syms[-1]
    fu, gu = _as_univar(f, var), _as_univar(g, var)
    cf, cg = _gcd_many(fu.values()), _gcd_many(gu.values())
    cont = poly_gcd(cf, cg)

    def primitive(u: dict) -> dict:
        if not u:
            return u
        c = _gcd_many(u.values())
        if c.is_const() and abs(c.const_value()) == 1:
            return u
        return {e: p.divexact(c) for e, p in u.items()}

    a, b = primitive(fu), primitive(gu)
    if max(a) < max(b):
        a, b = b, a
    while b:
        r = _pseudo_rem(a, b)
        a, b = b, primitive(r)
    out = cont * _from_univar(a, var)
    return out if out.leading_sign() > 0 else -out


def _pseudo_rem(a: dict, b: dict) -> dict:
    db = max(b)
    lb = b[db]
    r = dict(a)
    while r and max(r) >= db:
        dr = max(r)
        lr = r[dr]
        shifted = {e + dr - db: p for e, p in b.items()}
        r = _uni_sub(_uni_mul_coeff(r, lb), _uni_mul_coeff(shifted, lr))
    return r


# -- the fraction field ------------------------------------------------


class ParamField:
    """Reduced ratio of two ParamPoly values.

    Invariants: den != 0, gcd(num, den) = 1 (including integer content), and
    den has positive leading coefficient under graded-lex.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: ParamPoly, den: ParamPoly, _reduced: bool = False):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator in parameter field")
        if not _reduced:
            num, den = _reduce(num, den)
        self.num = num
        self.den = den

    # -- construction ---------------------------------------------------

    @classmethod
    def from_int(cls, n: int) -> "ParamField":
        return cls(ParamPoly.const(n), ParamPoly.one(), _reduced=True)

    @classmethod
    def from_fraction(cls, q) -> "ParamField":
        q = Fraction(q)
        return cls(ParamPoly.const(q.numerator), ParamPoly.const(q.denominator), _reduced=True)

    @classmethod
    def var(cls, name: str) -> "ParamField":
        return cls(ParamPoly.var(name), ParamPoly.one(), _reduced=True)

    @classmethod
    def coerce(cls, v) -> "ParamField":
        if isinstance(v, ParamField):
            return v
        if isinstance(v, int):
            return cls.from_int(v)
        if isinstance(v, (Fraction, str)):
            return cls.from_fraction(Fraction(v))
        raise TypeError("cannot coerce %r to ParamField" % (v,))

    # -- queries ----------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num == self.den

    def is_rational(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def as_fraction(self) -> Fraction:
        return Fraction(self.num.const_value(), self.den.const_value())

    def symbols(self) -> tuple:
        return tuple(sorted(set(self.num.symbols()) | set(self.den.symbols())))

    def sign_of_lead(self) -> int:
        return 1 if self.num.is_zero() else self.num.leading_sign()

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other) -> "ParamField":
        other = ParamField.coerce(other)
        if self.den == other.den:
            return ParamField(self.num + other.num, self.den)
        return ParamField(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other) -> "ParamField":
        other = ParamField.coerce(other)
        if self.den == other.den:
            return ParamField(self.num - other.num, self.den)
        return ParamField(self.num * other.den - other.num * self.den, self.den * other.den)

    def __rsub__(self, other) -> "ParamField":
        return ParamField.coerce(other) - self

    def __neg__(self) -> "ParamField":
        return ParamField(-self.num, self.den, _reduced=True)

    def __mul__(self, other) -> "ParamField":
        other = ParamField.coerce(other)
        return ParamField(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ParamField":
        other = ParamField.coerce(other)
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero in parameter field")
        return ParamField(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "ParamField":
        return ParamField.coerce(other) / self

    def __pow__(self, k: int) -> "ParamField":
        if k < 0:
            return ParamField.one_over(self) ** (-k)
        out = ParamField.from_int(1)
        for _ in range(k):
            out = out * self
        return out

    @classmethod
    def one_over(cls, v: "ParamField") -> "ParamField":
        return cls.from_int(1) / v

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ParamField.coerce(other)
        if not isinstance(other, ParamField):
            return NotImplemented
        # cross-multiplication keeps equality decidable regardless of form
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        return hash((self.num, self.den))

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, assign: dict) -> Fraction:
        d = self.den.evaluate(assign)
        if d == 0:
            raise ZeroDivisionError("parameter divisor %s vanishes" % poly_text(self.den))
        return self.num.evaluate(assign) / d

    def evaluate_float(self, assign: dict) -> float:
        d, n = 0.0, 0.0
        for m, c in self.den.terms.items():
            v = float(c)
            for sym, e in m:
                v *= assign[sym] ** e
            d += v
        if d == 0.0:
            raise ZeroDivisionError("parameter divisor %s vanishes" % poly_text(self.den))
        for m, c in self.num.terms.items():
            v = float(c)
            for sym, e in m:
                v *= assign[sym] ** e
            n += v
        return n / d

    def bind(self, assign: dict) -> "ParamField":
        """Substitute Fraction values for a subset of the symbols."""
        n, sn = self.num.subst(assign)
        d, sd = self.den.subst(assign)
        if d.is_zero():
            raise ZeroDivisionError("parameter divisor %s vanishes" % poly_text(self.den))
        return ParamField(n.scale(sd), d.scale(sn))

    def __repr__(self):
        return "ParamField(%s)" % (self,)

    def __str__(self):
        return field_text(self)


def _reduce(num: ParamPoly, den: ParamPoly) -> tuple:
    if num.is_zero():
        return num, ParamPoly.one()
    if num.is_const() and den.is_const():
        q = Fraction(num.const_value(), den.const_value())
        return ParamPoly.const(q.numerator), ParamPoly.const(q.denominator)
    g = poly_gcd(num, den)
    if not (g.is_const() and g.const_value() == 1):
        num, den = num.divexact(g), den.divexact(g)
    if den.leading_sign() < 0:
        num, den = -num, -den
    return num, den


# -- printing ------------------------------------------------------------


def mono_text(m: Mono) -> str:
    return "*".join(s if e == 1 else "%s^%d" % (s, e) for s, e in m)


def poly_text(p: ParamPoly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for m, c in p.sorted_terms():
        mag = abs(c)
        if not m:
            body = str(mag)
        elif mag == 1:
            body = mono_text(m)
        else:
            body = "%d*%s" % (mag, mono_text(m))
        if not parts:
            parts.append(body if c > 0 else "-" + body)
        else:
            parts.append((" + " if c > 0 else " - ") + body)
    return "".join(parts)


def _needs_parens_as_factor(p: ParamPoly) -> bool:
    if len(p.terms) != 1:
        return True
    (m, c), = p.terms.items()
    if c < 0:
        return True
    # single positive term: composite like 2*a still multiplies safely
    return False


def _needs_parens_as_divisor(p: ParamPoly) -> bool:
    if len(p.terms) != 1:
        return True
    (m, c), = p.terms.items()
    if c < 0:
        return True
    # a lone power such as b or b^2 or 12 divides without parentheses
    return not (len(m) == 0 or (len(m) == 1 and c == 1))


def field_text(f: ParamField) -> str:
    num = poly_text(f.num)
    if f.den == ParamPoly.one():
        return num
    if _needs_parens_as_factor(f.num):
        num = "(%s)" % num
    den = poly_text(f.den)
    if _needs_parens_as_divisor(f.den):
        den = "(%s)" % den
    return "%s/%s" % (num, den)


def poly_latex(p: ParamPoly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for m, c in p.sorted_terms():
        mag = abs(c)
        body = " ".join(s if e == 1 else "%s^{%d}" % (s, e) for s, e in m)
        if not m:
            body = str(mag)
        elif mag != 1:
            body = "%d %s" % (mag, body)
        if not parts:
            parts.append(body if c > 0 else "-" + body)
        else:
            parts.append((" + " if c > 0 else " - ") + body)
    return "".join(parts)


def field_latex(f: ParamField) -> str:
    if f.den == ParamPoly.one():
        return poly_latex(f.num)
    return "\\frac{%s}{%s}" % (poly_latex(f.num), poly_latex(f.den))


ZERO = ParamField.from_int(0)
ONE = ParamField.from_int(1)
