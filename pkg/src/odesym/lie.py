"""Prolonged generators, the linearized symmetry condition, and the
autonomous order reduction.

A point-symmetry generator V = xi(t,x) d/dt + eta(t,x) d/dx lifts to jet
space through the recursion

    eta^(k) = D_t eta^(k-1) - x^(k) D_t xi,      eta^(0) = eta.

For a second-order equation x'' = N/D the linearized symmetry condition is
V^(2)(x'' - N/D) restricted to the solution surface; this module returns
its polynomial numerator after substituting x'' = N/D and multiplying by
D**2 (CLEARED_DEN_POWER).  Collecting powers of x' then yields the
determining equations, each linear in the unknown-function atoms of xi and
eta.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import InputError, InvariantViolation, NonAutonomousError
from .expr import CONST_KIND, Expr, FUNC_KIND, T_KIND, func, jet, t_var
from .field import ParamField
from .jet import JetContext, partial, total_derivative

XI = func("xi", ("t", "x"))
ETA = func("eta", ("t", "x"))

# The condition is cleared by rhs_den ** CLEARED_DEN_POWER.
CLEARED_DEN_POWER = 2


def _check_params(e: Expr, params, what: str):
    declared = set(params)
    for c in e.terms.values():
        for s in c.symbols():
            if s not in declared:
                raise InputError("undeclared parameter '%s' in %s" % (s, what))


@dataclass(frozen=True)
class OdeSpec:
    """Scalar ODE x^(order) = rhs_num / rhs_den with polynomial sides."""
    order: int
    rhs_num: Expr
    rhs_den: Expr
    params: tuple = ()

    def __post_init__(self):
        if self.order < 1:
            raise InputError("ODE order must be >= 1")
        if self.rhs_den.is_zero():
            raise InputError("rhs_den is the zero polynomial")
        for side, name in ((self.rhs_num, "rhs_num"), (self.rhs_den, "rhs_den")):
            if side.jet_order() >= self.order:
                raise InputError("%s contains a jet variable of order >= %d" % (name, self.order))
            if side.atoms(FUNC_KIND) or side.atoms(CONST_KIND):
                raise InputError("%s must not contain unknown functions or constants" % name)
            _check_params(side, self.params, name)

    def bind(self, assignments: dict) -> "OdeSpec":
        num = self.rhs_num.bind_params(assignments)
        den = self.rhs_den.bind_params(assignments)
        if den.is_zero():
            raise InputError("parameter binding makes rhs_den vanish identically")
        remaining = tuple(p for p in self.params if p not in assignments)
        return OdeSpec(self.order, num, den, remaining)


@dataclass(frozen=True)
class Generator:
    """Point-symmetry generator; xi and eta may be symbolic or concrete."""
    xi: Expr
    eta: Expr
    prolongations: tuple = ()

    def __post_init__(self):
        for part, name in ((self.xi, "xi"), (self.eta, "eta")):
            if part.jet_order() > 0:
                raise InputError(
                    "%s depends on a derivative jet variable; "
                    "point symmetries allow (t, x) only" % name)

    @classmethod
    def symbolic(cls) -> "Generator":
        return cls(Expr.of_atom(XI), Expr.of_atom(ETA))

    def is_concrete(self) -> bool:
        return not (self.xi.atoms(FUNC_KIND) or self.eta.atoms(FUNC_KIND))


def prolong(g: Generator, k: int, ctx: JetContext = None) -> Generator:
    """Return g with prolongation coefficients eta^(1)..eta^(k) populated."""
    if k < 1:
        raise ValueError("prolongation order must be >= 1")
    etas = []
    prev = g.eta
    for i in range(1, k + 1):
        step = JetContext(i)
        nxt = total_derivative(prev, step) - Expr.of_atom(jet(i)) * total_derivative(g.xi, step)
        etas.append(nxt)
        prev = nxt
    return replace(g, prolongations=tuple(etas))


def symmetry_condition(ode: OdeSpec, g: Generator) -> Expr:
    """Polynomial numerator of V^(2)(x'' - f) on the surface x'' = f.

    f = rhs_num/rhs_den; the returned expression is the condition times
    rhs_den ** CLEARED_DEN_POWER.  It vanishes identically iff g generates
    a symmetry (for generic parameter values).
    """
    if ode.order != 2:
        raise InputError("symmetry_condition handles second-order equations only")
    g2 = g if len(g.prolongations) >= 2 else prolong(g, 2)
    eta1, eta2 = g2.prolongations[0], g2.prolongations[1]
    num, den = ode.rhs_num, ode.rhs_den
    xdd = jet(2)

    eta2_sub, d2 = eta2.rational_substitute(xdd, num, den)
    if d2 > 1:
        raise InvariantViolation("prolongation is nonlinear in x''")
    cond = eta2_sub * den ** (CLEARED_DEN_POWER - d2)
    for weight, v in ((g.xi, t_var()), (g.eta, jet(0)), (eta1, jet(1))):
        cond = cond - weight * (partial(num, v) * den - num * partial(den, v))
    return cond


@dataclass(frozen=True)
class DeterminingEq:
    xdot_power: int
    expr: Expr


@dataclass(frozen=True)
class DeterminingSystem:
    """Coefficients of the x'-powers of the cleared symmetry condition."""
    equations: tuple
    cleared_power: int
    params: tuple = ()

    def __post_init__(self):
        for eq in self.equations:
            if eq.expr.jet_order() > 0:
                raise InvariantViolation("determining equation contains a jet derivative")
            if eq.expr.func_degree() > 1:
                raise InvariantViolation("determining equation nonlinear in unknown functions")

    def exprs(self) -> list:
        return [eq.expr for eq in self.equations]

    def bind(self, assignments: dict) -> "DeterminingSystem":
        eqs = []
        for eq in self.equations:
            e = eq.expr.bind_params(assignments)
            if not e.is_zero():
                eqs.append(DeterminingEq(eq.xdot_power, e))
        remaining = tuple(p for p in self.params if p not in assignments)
        return DeterminingSystem(tuple(eqs), self.cleared_power, remaining)


def split_determining(cond: Expr, ode: OdeSpec) -> DeterminingSystem:
    """Collect the symmetry condition by powers of x'."""
    if cond.degree(jet(2)) > 0:
        raise InputError("condition still contains x''; substitute the equation first")
    eqs = tuple(DeterminingEq(p, e) for p, e in cond.collect(jet(1)))
    return DeterminingSystem(eqs, CLEARED_DEN_POWER, ode.params)


@dataclass(frozen=True)
class AutonomousOde3:
    """Third-order autonomous equation lhs(x, x', x'', x''') = 0."""
    lhs: Expr
    params: tuple = ()

    def __post_init__(self):
        offending = [Expr({m: c}) for m, c in self.lhs.sorted_terms()
                     if any(a.kind == T_KIND for a, _ in m)]
        if offending:
            raise NonAutonomousError(
                "equation is not autonomous; offending term: %s" % offending[0])
        if self.lhs.jet_order() != 3:
            raise InputError("expected a third-order equation (x''' present)")
        top = self.lhs.collect(jet(3))
        if top[-1][0] > 1:
            raise InputError("equation must be linear in x'''")
        lead = top[-1][1]
        if lead.atoms():
            raise InputError("coefficient of x''' must be constant, got %s" % lead)
        _check_params(self.lhs, self.params, "lhs")


def reduce_autonomous(ode3: AutonomousOde3) -> OdeSpec:
    """Rewrite an autonomous third-order equation as second order.

    With z = x' viewed as a function of x, the jets transform as
    x' -> z, x'' -> z z', x''' -> z z'^2 + z^2 z''; afterwards x plays the
    role of the independent variable and z of the dependent one, so the
    result is expressed in the usual (t, x) jet names.  Any monomial factor
    shared by numerator and denominator is cancelled (a z != 0 branch).
    """
    t, z, z1, z2 = t_var(), jet(0), jet(1), jet(2)
    images = {
        jet(0): Expr.of_atom(t),
        jet(1): Expr.of_atom(z),
        jet(2): Expr.of_atom(z) * Expr.of_atom(z1),
        jet(3): Expr.of_atom(z) * Expr.of_atom(z1) ** 2
                + Expr.of_atom(z) ** 2 * Expr.of_atom(z2),
    }
    out = Expr.zero()
    for m, c in ode3.lhs.terms.items():
        piece = Expr.of_coeff(c)
        for a, p in m:
            piece = piece * images[a] ** p
        out = out + piece
    parts = out.collect(z2)
    if not parts or parts[-1][0] != 1:
        raise InvariantViolation("reduced equation lost its z'' term")
    r1 = parts[-1][1]
    r0 = out - r1 * Expr.of_atom(z2)
    num, den = -r0, r1
    num, den = _cancel_monomial(num, den)
    return OdeSpec(2, num, den, ode3.params)


def _cancel_monomial(num: Expr, den: Expr) -> tuple:
    """Divide out the largest monomial dividing every term of num and den."""
    common = None
    for e in (num, den):
        for m in e.terms:
            powers = {a: p for a, p in m}
            if common is None:
                common = powers
            else:
                common = {a: min(p, powers.get(a, 0)) for a, p in common.items()}
                common = {a: p for a, p in common.items() if p}
        if not common:
            return num, den

    def strip(e: Expr) -> Expr:
        acc = {}
        for m, c in e.terms.items():
            kept = tuple((a, p - common.get(a, 0)) for a, p in m if p - common.get(a, 0))
            acc[kept] = c
        return Expr(acc)

    return strip(num), strip(den)


# -- ODE spec files ---------------------------------------------------------

def dumps_ode(ode, header=()) -> str:
    lines = ["# %s" % h for h in header]
    if isinstance(ode, OdeSpec):
        lines += ["order=%d" % ode.order,
                  "params=%s" % ",".join(ode.params),
                  "rhs_num=%s" % ode.rhs_num,
                  "rhs_den=%s" % ode.rhs_den]
    elif isinstance(ode, AutonomousOde3):
        lines += ["order=3",
                  "params=%s" % ",".join(ode.params),
                  "lhs=%s" % ode.lhs]
    else:
        raise TypeError("cannot serialize %r" % (ode,))
    return "\n".join(lines) + "\n"


def loads_ode(text: str, source: str = "<string>"):
    """Parse a key/value ODE spec file into OdeSpec or AutonomousOde3."""
    from .parse import parse_expr

    fields, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InputError("%s:%d: expected key=value, got %r" % (source, lineno, raw))
        key, _, value = line.partition("=")
        key = key.strip()
        if key in fields:
            raise InputError("%s:%d: duplicate key '%s'" % (source, lineno, key))
        fields[key] = value.strip()
        lines[key] = lineno

    def take(key, required=True):
        if key not in fields:
            if required:
                raise InputError("%s: missing required key '%s'" % (source, key))
            return None
        return fields.pop(key)

    try:
        order = int(take("order"))
    except ValueError as exc:
        raise InputError("%s: order must be an integer" % source) from exc
    params_raw = take("params", required=False) or ""
    params = tuple(p.strip() for p in params_raw.split(",") if p.strip())

    def parse_here(key, value):
        try:
            return parse_expr(value, params)
        except InputError as exc:
            raise InputError("%s:%d: in %s: %s" % (source, lines[key], key, exc)) from exc

    if order == 3:
        lhs = parse_here("lhs", take("lhs"))
        if fields:
            raise InputError("%s: unexpected key '%s'" % (source, sorted(fields)[0]))
        return AutonomousOde3(lhs, params)
    num = parse_here("rhs_num", take("rhs_num"))
    den = parse_here("rhs_den", take("rhs_den"))
    if fields:
        raise InputError("%s: unexpected key '%s'" % (source, sorted(fields)[0]))
    return OdeSpec(order, num, den, params)


def load_ode(path):
    with open(path, "r", encoding="utf-8") as fh:
        return loads_ode(fh.read(), source=str(path))


def silnikov_ode() -> OdeSpec:
    """The cubic reduction x'' = (t^3 - a^2 t - x - x'^2 x - b x' x)/x^2."""
    from .parse import parse_expr

    params = ("a", "b")
    return OdeSpec(
        2,
        parse_expr("t^3 - a^2*t - x - x'^2*x - b*x'*x", params),
        parse_expr("x^2", params),
        params,
    )
