"""Two-stage undetermined-coefficient solver for the determining system.

Stage one (x_reduce) substitutes

    xi  = sum_i f_i(t) x^i        (i <= deg_xi_x)
    eta = sum_j g_j(t) x^j        (j <= deg_eta_x)

into the determining equations and equates coefficients of the x powers,
leaving a linear system of ODEs in the coefficient functions of t.  Stage
two (t_reduce) takes each coefficient function polynomial in t with fresh
undetermined constants c1, c2, ... and equates coefficients of the t
powers, leaving a finite homogeneous linear system over the parameter
field.  Exact Gaussian elimination (eliminate) then produces the null
space; every pivot division by a parameter polynomial is recorded as a
genericity condition.  Pivoting is fixed (columns by constant index, rows
by original equation order) so identical inputs give identical output.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import GenericityViolationError, InputError, InvariantViolation
from .expr import CONST_KIND, Expr, FUNC_KIND, _name_key, const, func, jet, t_var
from .field import ParamField, ParamPoly, _gcd_many, poly_gcd, poly_text
from .jet import partial
from .lie import (DeterminingSystem, Generator, OdeSpec, prolong,
                  split_determining, symmetry_condition)


@dataclass(frozen=True)
class XAnsatz:
    """Polynomial-in-x ansatz with one unknown function of t per power."""
    deg_xi_x: int
    deg_eta_x: int

    def __post_init__(self):
        if self.deg_xi_x < 0 or self.deg_eta_x < 0:
            raise InputError("ansatz degrees must be >= 0")

    def xi_functions(self) -> tuple:
        return tuple("f%d" % i for i in range(self.deg_xi_x + 1))

    def eta_functions(self) -> tuple:
        return tuple("g%d" % j for j in range(self.deg_eta_x + 1))

    def xi_expr(self) -> Expr:
        return _poly_in_x(self.xi_functions())

    def eta_expr(self) -> Expr:
        return _poly_in_x(self.eta_functions())

    def fn_meta(self) -> dict:
        meta = {}
        for i, name in enumerate(self.xi_functions()):
            meta[name] = ("xi", i)
        for j, name in enumerate(self.eta_functions()):
            meta[name] = ("eta", j)
        return meta


def _poly_in_x(names) -> Expr:
    out = Expr.zero()
    for i, name in enumerate(names):
        out = out + Expr.of_atom(func(name, ("t",))) * Expr.of_atom(jet(0)) ** i
    return out


@dataclass(frozen=True)
class TRow:
    source_eq: int
    x_power: int
    expr: Expr


@dataclass(frozen=True)
class TOdeSystem:
    """Linear equations in unknown functions of t and their derivatives."""
    rows: tuple
    fn_meta: dict
    params: tuple = ()

    def __post_init__(self):
        for row in self.rows:
            if row.expr.jet_order() >= 0:
                raise InvariantViolation("t-system row still contains a jet variable")
            if row.expr.func_degree() > 1:
                raise InvariantViolation("t-system row nonlinear in unknown functions")

    def exprs(self) -> list:
        return [row.expr for row in self.rows]

    def bind(self, assignments: dict) -> "TOdeSystem":
        rows = []
        for row in self.rows:
            e = row.expr.bind_params(assignments)
            if not e.is_zero():
                rows.append(TRow(row.source_eq, row.x_power, e))
        remaining = tuple(p for p in self.params if p not in assignments)
        return TOdeSystem(tuple(rows), self.fn_meta, remaining)


def substitute_generators(det: DeterminingSystem, xi_expr: Expr, eta_expr: Expr,
                          fn_meta: dict = None) -> TOdeSystem:
    """Substitute explicit xi/eta candidates and split off the x powers."""
    cache = {}

    def image(atom):
        if atom not in cache:
            base = xi_expr if atom.name == "xi" else eta_expr
            dt, dx = atom.deriv
            out = base
            for _ in range(dt):
                out = partial(out, t_var())
            for _ in range(dx):
                out = partial(out, jet(0))
            cache[atom] = out
        return cache[atom]

    rows = []
    x0 = jet(0)
    for idx, eq in enumerate(det.equations):
        e = eq.expr
        for atom in e.atoms(FUNC_KIND):
            if atom.name in ("xi", "eta"):
                e = e.substitute(atom, image(atom))
        for power, coeff in e.collect(x0):
            rows.append(TRow(idx, power, coeff))
    return TOdeSystem(tuple(rows), dict(fn_meta or {}), det.params)


def x_reduce(det: DeterminingSystem, ansatz: XAnsatz) -> TOdeSystem:
    """Apply the polynomial-in-x ansatz and equate x-coefficients."""
    clash = set(ansatz.fn_meta()) & set(det.params)
    if clash:
        raise InputError("ansatz symbols collide with parameters: %s" % sorted(clash))
    return substitute_generators(det, ansatz.xi_expr(), ansatz.eta_expr(),
                                 ansatz.fn_meta())


@dataclass(frozen=True)
class LinRow:
    source: tuple            # (determining eq index, x power, t power)
    coeffs: dict             # constant name -> ParamField
    rhs: ParamField


@dataclass(frozen=True)
class LinearSystem:
    rows: tuple
    columns: tuple           # constant names, elimination order
    const_info: dict         # constant name -> (fn name, t power)
    fn_meta: dict            # fn name -> ("xi"|"eta", x power)
    deg_t: int
    params: tuple = ()

    def bind(self, assignments: dict) -> "LinearSystem":
        rows = []
        for row in self.rows:
            try:
                coeffs = {k: v.bind(assignments) for k, v in row.coeffs.items()}
            except ZeroDivisionError as exc:
                raise GenericityViolationError(
                    "binding hits a vanishing divisor (%s); re-run the pipeline "
                    "from the determining system under this specialization" % exc) from exc
            coeffs = {k: v for k, v in coeffs.items() if not v.is_zero()}
            rhs = row.rhs.bind(assignments)
            if coeffs or not rhs.is_zero():
                rows.append(LinRow(row.source, coeffs, rhs))
        remaining = tuple(p for p in self.params if p not in assignments)
        return LinearSystem(tuple(rows), self.columns, self.const_info,
                            self.fn_meta, self.deg_t, remaining)


def t_reduce(tsys: TOdeSystem, deg_t: int) -> LinearSystem:
    """Swap each unknown function of t for a degree-deg_t polynomial."""
    if deg_t < 0:
        raise InputError("deg_t must be >= 0")
    fn_names = {a.name for row in tsys.rows for a in row.expr.atoms(FUNC_KIND)}
    for row in tsys.rows:
        for a in row.expr.atoms(FUNC_KIND):
            if a.args != ("t",):
                raise InputError("unknown function %s does not depend on t alone" % a)
    # ansatz symbols first (xi coefficients, then eta's), extras after
    ordered = [n for n in sorted(tsys.fn_meta, key=_name_key) if n in fn_names]
    ordered += sorted(fn_names.difference(ordered), key=_name_key)

    if set("c%d" % k for k in range(1, len(ordered) * (deg_t + 1) + 1)) & set(tsys.params):
        raise InputError("parameter names collide with ansatz constants c1, c2, ...")

    const_info, subs = {}, {}
    counter = 0
    t = Expr.of_atom(t_var())
    for name in ordered:
        table = []
        for j in range(deg_t + 1):
            counter += 1
            cname = "c%d" % counter
            const_info[cname] = (name, j)
            table.append(cname)
        subs[name] = table

    def image(atom) -> Expr:
        k = atom.deriv[0]
        out = Expr.zero()
        for j, cname in enumerate(subs[atom.name]):
            if j < k:
                continue
            fall = 1
            for step in range(k):
                fall *= j - step
            out = out + Expr.of_atom(const(cname)) * t ** (j - k) * Expr.of_coeff(fall)
        return out

    columns = ["c%d" % k for k in range(1, counter + 1)]
    rows = []
    for row in tsys.rows:
        e = row.expr
        for atom in e.atoms(FUNC_KIND):
            e = e.substitute(atom, image(atom))
        for power, coeff in e.collect(t_var()):
            lin: dict = {}
            rhs = ParamField.coerce(0)
            for m, c in coeff.terms.items():
                if not m:
                    rhs = rhs - c
                elif len(m) == 1 and m[0][0].kind == CONST_KIND and m[0][1] == 1:
                    lin[m[0][0].name] = lin.get(m[0][0].name, ParamField.coerce(0)) + c
                else:
                    raise InvariantViolation("reduced row is not linear in the constants")
            lin = {k: v for k, v in lin.items() if not v.is_zero()}
            rows.append(LinRow((row.source_eq, row.x_power, power), lin, rhs))
    return LinearSystem(tuple(rows), tuple(columns), const_info, dict(tsys.fn_meta),
                        deg_t, tsys.params)


@dataclass(frozen=True)
class TraceEntry:
    column: str
    status: str              # "pivot" or "free"
    row: tuple = None        # source of the pivot row
    divisor: str = ""        # recorded genericity divisor, if any


@dataclass(frozen=True)
class EliminationTrace:
    entries: tuple
    forced_zero: tuple       # constants that every solution sends to 0
    inconsistent_row: tuple = None

    def lines(self) -> list:
        out = []
        for e in self.entries:
            if e.status == "pivot":
                extra = " [assumes %s != 0]" % e.divisor if e.divisor else ""
                out.append("%s: pivot from equation %s%s" % (e.column, e.row, extra))
            else:
                out.append("%s: free" % e.column)
        if self.inconsistent_row is not None:
            out.append("inconsistent row from equation %s" % (self.inconsistent_row,))
        for c in self.forced_zero:
            out.append("%s = 0" % c)
        return out


@dataclass(frozen=True)
class SymmetryBasis:
    dim: int
    generators: tuple        # of Generator with concrete xi/eta
    genericity: tuple        # of ParamPoly, each assumed nonzero
    trace: EliminationTrace
    ansatz_deg_x: tuple = (0, 0)
    deg_t: int = 0


def _record_divisor(p, genericity: list) -> str:
    """Normalize and remember a parameter polynomial assumed nonzero."""
    if p.is_const():
        return ""
    div = p if p.leading_sign() > 0 else -p
    c = div.content()
    if c > 1:
        div = div.divexact_int(c)
    genericity.append(div)
    return poly_text(div)


def _row_strip_content(coeffs: dict, rhs):
    """Divide a polynomial row by the gcd of all its entries."""
    polys = list(coeffs.values())
    if not rhs.is_zero():
        polys.append(rhs)
    if not polys:
        return coeffs, rhs
    if all(p.is_const() for p in polys):
        g = 0
        for p in polys:
            g = _gcd(g, abs(p.const_value()))
        if g > 1:
            return ({k: v.divexact_int(g) for k, v in coeffs.items()},
                    rhs.divexact_int(g))
        return coeffs, rhs
    g = _gcd_many(polys)
    if g.is_const() and abs(g.const_value()) == 1:
        return coeffs, rhs
    return ({k: v.divexact(g) for k, v in coeffs.items()}, rhs.divexact(g))


def eliminate(system: LinearSystem) -> SymmetryBasis:
    """Exact Gaussian elimination over the parameter fraction field.

    Runs fraction-free: rows hold parameter polynomials and an update is
    p * row - r * pivot_row followed by content removal, so the only
    rational-function arithmetic happens when the null-space vectors are
    read off at the end.  Every pivot whose polynomial involves parameters
    is recorded as a genericity condition.
    """
    rows, rhs, sources = [], [], []
    genericity = []
    for r in system.rows:
        den_lcm = ParamPoly.one()
        for v in list(r.coeffs.values()) + [r.rhs]:
            g = poly_gcd(den_lcm, v.den)
            den_lcm = den_lcm.divexact(g) * v.den
        _record_divisor(den_lcm, genericity)
        rows.append({k: v.num * den_lcm.divexact(v.den)
                     for k, v in r.coeffs.items() if not v.is_zero()})
        rhs.append(r.rhs.num * den_lcm.divexact(r.rhs.den))
        sources.append(r.source)

    pivots = {}              # column -> row index
    used_rows = set()
    entries = []

    for col in system.columns:
        pick = None
        for i, row in enumerate(rows):
            if i not in used_rows and col in row:
                pick = i
                break
        if pick is None:
            entries.append(TraceEntry(col, "free"))
            continue
        p = rows[pick][col]
        divisor_text = _record_divisor(p, genericity)
        prow, prhs = rows[pick], rhs[pick]
        for i, row in enumerate(rows):
            if i == pick or col not in row:
                continue
            r = row.pop(col)
            new = {k: v * p for k, v in row.items()}
            for k, v in prow.items():
                if k == col:
                    continue
                w = new.get(k, ParamPoly.zero()) - r * v
                if w.is_zero():
                    new.pop(k, None)
                else:
                    new[k] = w
            new_rhs = rhs[i] * p - r * prhs
            rows[i], rhs[i] = _row_strip_content(new, new_rhs)
        pivots[col] = pick
        used_rows.add(pick)
        entries.append(TraceEntry(col, "pivot", sources[pick], divisor_text))

    inconsistent = None
    for i, row in enumerate(rows):
        if not row and not rhs[i].is_zero():
            inconsistent = sources[i]
            break
    if inconsistent is None and any(not v.is_zero() for v in rhs):
        raise InvariantViolation("inhomogeneous linear system; the pipeline only "
                                 "produces homogeneous ones")
    free_cols = [c for c in system.columns if c not in pivots]
    if inconsistent is not None:
        trace = EliminationTrace(tuple(entries), (), inconsistent)
        raise InputError(
            "no symmetry in ansatz class: inconsistent equation from %s; trace:\n%s"
            % (inconsistent, "\n".join(trace.lines())))

    vectors = []
    for f in free_cols:
        vec = {f: ParamField.coerce(1)}
        for col, ri in pivots.items():
            v = rows[ri].get(f)
            if v is not None and not v.is_zero():
                _record_divisor(rows[ri][col], genericity)
                vec[col] = ParamField(-v, rows[ri][col])
        vectors.append(_normalize_vector(vec))

    zero = ParamField.coerce(0)
    forced = tuple(c for c in system.columns
                   if all(vec.get(c, zero).is_zero() for vec in vectors))
    trace = EliminationTrace(tuple(entries), forced)

    generators = tuple(_vector_to_generator(vec, system) for vec in vectors)
    seen, dedup = set(), []
    for gpoly in genericity:
        key = poly_text(gpoly)
        if key not in seen and not gpoly.is_const():
            seen.add(key)
            dedup.append(gpoly)
    deg_xi = max((m[1] for m in system.fn_meta.values() if m[0] == "xi"), default=0)
    deg_eta = max((m[1] for m in system.fn_meta.values() if m[0] == "eta"), default=0)
    return SymmetryBasis(len(vectors), generators, tuple(dedup), trace,
                         (deg_xi, deg_eta), system.deg_t)


def _normalize_vector(vec: dict) -> dict:
    """Scale a rational null vector to integer entries with content 1."""
    if any(not v.is_rational() for v in vec.values()):
        return vec
    lcm = 1
    for v in vec.values():
        d = v.as_fraction().denominator
        g = _gcd(lcm, d)
        lcm = lcm * d // g
    gcd_all = 0
    for v in vec.values():
        gcd_all = _gcd(gcd_all, abs((v.as_fraction() * lcm).numerator))
    scale = Fraction(lcm, gcd_all or 1)
    return {k: v * ParamField.from_fraction(scale) for k, v in vec.items()}


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _vector_to_generator(vec: dict, system: LinearSystem) -> Generator:
    xi = Expr.zero()
    eta = Expr.zero()
    t = Expr.of_atom(t_var())
    x = Expr.of_atom(jet(0))
    for cname, value in vec.items():
        if value.is_zero():
            continue
        fn, tpow = system.const_info[cname]
        target, xpow = system.fn_meta[fn]
        mono = t ** tpow * x ** xpow
        if target == "xi":
            xi = xi + mono.scale(value)
        else:
            eta = eta + mono.scale(value)
    return Generator(xi, eta)


# -- specialization and verification -------------------------------------------


def specialize_params(obj, assignments: dict):
    """Substitute rational values for declared parameters.

    Works on OdeSpec, DeterminingSystem, TOdeSystem, LinearSystem and
    SymmetryBasis.  Specializing a basis whose elimination divided by a
    polynomial the assignment annihilates raises GenericityViolationError:
    re-run the pipeline from the determining system instead.
    """
    assignments = {k: Fraction(v) for k, v in assignments.items()}
    declared = getattr(obj, "params", None)
    if declared is not None:
        unknown = sorted(set(assignments) - set(declared))
        if unknown:
            raise InputError("binding for undeclared parameter '%s'" % unknown[0])
    if isinstance(obj, (OdeSpec, DeterminingSystem, TOdeSystem, LinearSystem)):
        return obj.bind(assignments)
    if isinstance(obj, SymmetryBasis):
        kept = []
        for divisor in obj.genericity:
            bound, _ = divisor.subst(assignments)
            if bound.is_zero():
                raise GenericityViolationError(
                    "assignment makes recorded divisor %s vanish; re-run the "
                    "pipeline from the determining system under this "
                    "specialization" % poly_text(divisor))
            if not bound.is_const():
                kept.append(bound)
        gens = tuple(Generator(g.xi.bind_params(assignments),
                               g.eta.bind_params(assignments))
                     for g in obj.generators)
        return SymmetryBasis(obj.dim, gens, tuple(kept), obj.trace,
                             obj.ansatz_deg_x, obj.deg_t)
    raise TypeError("cannot specialize %r" % (obj,))


@dataclass(frozen=True)
class BasisCheck:
    index: int
    residual: Expr
    ok: bool


@dataclass(frozen=True)
class BasisVerification:
    checks: tuple
    all_ok: bool

    def lines(self) -> list:
        out = []
        for c in self.checks:
            state = "ok" if c.ok else "RESIDUAL %s" % c.residual
            out.append("generator %d: %s" % (c.index, state))
        if not self.checks:
            out.append("empty basis: nothing to verify")
        return out


def verify_basis(basis: SymmetryBasis, ode: OdeSpec) -> BasisVerification:
    """Re-run the symmetry condition on every basis generator."""
    checks = []
    for i, g in enumerate(basis.generators):
        residual = symmetry_condition(ode, g)
        checks.append(BasisCheck(i, residual, residual.is_zero()))
    return BasisVerification(tuple(checks), all(c.ok for c in checks))


# -- the full pipeline ----------------------------------------------------------


@dataclass(frozen=True)
class Analysis:
    ode: OdeSpec
    generator: Generator
    condition: Expr
    determining: DeterminingSystem
    ansatz: XAnsatz
    t_system: TOdeSystem
    linear_system: LinearSystem
    basis: SymmetryBasis
    verification: BasisVerification

    @property
    def verdict(self) -> str:
        scope = "within polynomial ansatz class (deg_x=%d, deg_t=%d)" % (
            self.ansatz.deg_xi_x, self.linear_system.deg_t)
        if self.basis.dim == 0:
            return "symmetry space dimension 0 %s" % scope
        return "symmetry space dimension %d %s" % (self.basis.dim, scope)


def run_analysis(ode: OdeSpec, deg_x: int = 4, deg_t: int = 6) -> Analysis:
    """End-to-end symmetry analysis of a second-order rational ODE."""
    g = prolong(Generator.symbolic(), 2)
    cond = symmetry_condition(ode, g)
    det = split_determining(cond, ode)
    ansatz = XAnsatz(deg_x, deg_x)
    tsys = x_reduce(det, ansatz)
    linsys = t_reduce(tsys, deg_t)
    basis = eliminate(linsys)
    verification = verify_basis(basis, ode)
    return Analysis(ode, g, cond, det, ansatz, tsys, linsys, basis, verification)
