"""Formal group laws and the standard groups they define.

A law of dimension d is a d-tuple of series F_j(X, Y) in 2d variables over
R = Zp[[t1..tm]].  Points of the standard group of level N are d-tuples of
ring elements of ideal order >= N; points are stored by their chart
coordinates, so the chart map is the identity on stored data.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .errors import ConvergenceFailure, InvalidLaw, InvalidPoint
from .series import (
    MultiSeries,
    RingDescriptor,
    RingElement,
    common_descriptor,
    compose_ring,
    format_monomial,
    ideal_order,
    substitute,
)
from .zp import bold_p_valuation, vp

# exactness of a polynomial law is certified at this many extra digits
LIFT_FACTOR = 4


def _signed(c: int, m: int) -> int:
    return c - m if c > m // 2 else c


def _shift(f: MultiSeries, nvars: int, offset: int) -> MultiSeries:
    """Re-home the X-variables of f at positions offset.. in an nvars-variable ring."""
    n = f.nvars
    terms = {}
    for key, c in f.terms.items():
        x = [0] * nvars
        x[offset:offset + n] = key[:n]
        terms[tuple(x) + key[n:]] = c
    return MultiSeries(f.descriptor, nvars, terms)


class FormalGroupLaw:
    def __init__(self, descriptor: RingDescriptor, dim: int, level: int,
                 components: Sequence[MultiSeries], name: str = "law"):
        self.descriptor = descriptor
        self.dim = dim
        self.level = level
        self.name = name
        if dim < 1:
            raise InvalidLaw("dimension must be >= 1")
        if len(components) != dim:
            raise InvalidLaw(f"expected {dim} components, got {len(components)}")
        comps = []
        for f in components:
            if f.nvars != 2 * dim:
                raise InvalidLaw(f"component in {f.nvars} variables, expected {2 * dim}")
            comps.append(f.with_descriptor(descriptor))
        self.components = tuple(comps)
        if level < 1:
            raise InvalidLaw("level must be >= 1")

    # -- basic data ----------------------------------------------------------

    @property
    def prime(self):
        return self.descriptor.prime

    @property
    def precision(self):
        return self.descriptor.precision

    @property
    def param_vars(self):
        return self.descriptor.param_vars

    @property
    def over_zp(self) -> bool:
        return self.descriptor.param_vars == 0

    def level_ok(self) -> bool:
        return self.level >= (2 if self.prime == 2 else 1)

    def variable_names(self, sets=("X", "Y")):
        if self.dim == 1:
            return list(sets)
        return [f"{s}{i + 1}" for s in sets for i in range(self.dim)]

    def coefficient(self, component: int, xexp, texp=None) -> int:
        key = tuple(xexp) + tuple(texp or (0,) * self.param_vars)
        return self.components[component].terms.get(key, 0)

    def with_precision(self, k: int) -> "FormalGroupLaw":
        d = self.descriptor.with_precision(k)
        return FormalGroupLaw(d, self.dim, self.level,
                              [f.with_descriptor(d) for f in self.components], self.name)

    def __repr__(self):
        names = self.variable_names()
        comps = "; ".join(f.format(names) for f in self.components)
        return f"FormalGroupLaw({self.name}, p={self.prime}, k={self.precision}, N={self.level}: {comps})"

    # -- exactness -----------------------------------------------------------

    @cached_property
    def exact(self) -> bool:
        """True when the signed lift of the components is an honest polynomial group law.

        Checked by verifying the identity and associativity axioms with no
        degree truncation at LIFT_FACTOR*k digits.  Exact laws can be
        evaluated at any internal precision up to ``lift_precision``.
        """
        deg = max(f.max_xdegree() for f in self.components)
        tdeg = max(f.max_tdegree() for f in self.components)
        cutoff = max(2, deg * deg, tdeg * (deg + 1))
        if cutoff > 16:
            return False
        d = self.descriptor
        big = RingDescriptor(d.prime, self.lift_precision, d.param_vars, cutoff)
        m = d.modulus
        comps = [MultiSeries(big, f.nvars, {k: _signed(c, m) for k, c in f.terms.items()})
                 for f in self.components]
        lifted = FormalGroupLaw(big, self.dim, self.level, comps)
        return all(c.passed for c in _axiom_checks(lifted))

    @property
    def lift_precision(self) -> int:
        return LIFT_FACTOR * self.precision + 8

    def lifted_terms(self):
        """Per component: list of (signed coefficient, exponent key)."""
        m = self.descriptor.modulus
        return [[(_signed(c, m), k) for k, c in sorted(f.terms.items())] for f in self.components]

    # -- points --------------------------------------------------------------

    def point(self, coords, guarantee=None) -> "StandardPoint":
        """Build a point from ints, PadicScalars or RingElements and check the level."""
        d = self.descriptor
        out = []
        for c in coords:
            if isinstance(c, RingElement):
                out.append(c)
            elif isinstance(c, int):
                out.append(RingElement.constant(d, c))
            else:  # PadicScalar
                out.append(RingElement.constant(d.with_precision(c.precision), c.residue))
        if len(out) != self.dim:
            raise InvalidPoint(f"expected {self.dim} coordinates, got {len(out)}")
        P = StandardPoint(tuple(out), guarantee)
        for j, c in enumerate(P.coordinates):
            common_descriptor(d, c.descriptor)
            o = ideal_order(c)
            if o < self.level:
                raise InvalidPoint(f"coordinate {j + 1} = {c.format()} has ideal order {o} < level {self.level}")
        return P

    def identity(self) -> "StandardPoint":
        return StandardPoint(tuple(RingElement.zero(self.descriptor) for _ in range(self.dim)))

    @cached_property
    def engine(self) -> "ZpEngine":
        if not self.over_zp:
            raise InvalidLaw("integer engine only exists for laws over Zp")
        return ZpEngine(self)

    @cached_property
    def inverse_series(self) -> tuple[MultiSeries, ...]:
        return formal_inverse(self)


@dataclass(frozen=True)
class StandardPoint:
    coordinates: tuple
    guarantee: int | None = field(default=None, compare=False)

    @property
    def dim(self):
        return len(self.coordinates)

    @property
    def precision(self) -> int:
        return min(c.descriptor.precision for c in self.coordinates)

    def ints(self) -> tuple[int, ...]:
        """Residues of constant coordinates (laws over Zp)."""
        zero = (0,) * self.coordinates[0].descriptor.param_vars
        return tuple(c.terms.get(zero, 0) for c in self.coordinates)

    def is_identity(self) -> bool:
        return all(c.is_zero() for c in self.coordinates)

    def equals(self, other: "StandardPoint") -> bool:
        return all(a == b for a, b in zip(self.coordinates, other.coordinates))

    def __eq__(self, other):
        if not isinstance(other, StandardPoint):
            return NotImplemented
        return len(self.coordinates) == len(other.coordinates) and self.equals(other)

    def __hash__(self):
        return hash(tuple(frozenset(c.terms.items()) for c in self.coordinates))

    def format(self) -> str:
        return "(" + ", ".join(c.format() for c in self.coordinates) + ")"

    def __repr__(self):
        return f"StandardPoint{self.format()}"


def zp_point(law: FormalGroupLaw, values: Sequence[int], precision: int | None = None) -> StandardPoint:
    k = precision or law.precision
    d = law.descriptor.with_precision(k)
    return StandardPoint(tuple(RingElement.constant(d, v) for v in values))


# ---------------------------------------------------------------------------
# validation


@dataclass
class AxiomCheck:
    name: str
    passed: bool
    component: int | None = None
    witness: str | None = None
    lhs: int | None = None
    rhs: int | None = None
    detail: str = ""


@dataclass
class ValidationReport:
    law: str
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_dict(self):
        return {
            "law": self.law,
            "passed": self.passed,
            "checks": [
                {k: v for k, v in vars(c).items() if v is not None and v != ""}
                for c in self.checks
            ],
        }


def _compare(name, lhs: Sequence[MultiSeries], rhs: Sequence[MultiSeries], names) -> AxiomCheck:
    for j, (a, b) in enumerate(zip(lhs, rhs)):
        key = a.first_difference(b)
        if key is not None:
            return AxiomCheck(
                name, False, component=j + 1,
                witness=format_monomial(key, names + _tnames(a)),
                lhs=a.terms.get(key, 0), rhs=b.terms.get(key, 0),
                detail=f"F{j + 1}: coefficient {a.terms.get(key, 0)} vs {b.terms.get(key, 0)}",
            )
    return AxiomCheck(name, True)


def _tnames(f: MultiSeries):
    m = f.descriptor.param_vars
    return ["t"] if m == 1 else [f"t{j + 1}" for j in range(m)]


def _axiom_checks(law: FormalGroupLaw):
    d = law.dim
    desc = law.descriptor
    F = law.components
    Xs = [MultiSeries.var(desc, 2 * d, i) for i in range(d)]
    Ys = [MultiSeries.var(desc, 2 * d, d + i) for i in range(d)]
    zero = MultiSeries.zero(desc, 2 * d)
    names2 = law.variable_names(("X", "Y"))
    checks = []

    left = [substitute(f, Xs + [zero] * d) for f in F]
    checks.append(_compare("identity F(X,0) = X", left, Xs, names2))
    right = [substitute(f, [zero] * d + Ys) for f in F]
    checks.append(_compare("identity F(0,Y) = Y", right, Ys, names2))

    n3 = 3 * d
    X3 = [MultiSeries.var(desc, n3, i) for i in range(d)]
    Y3 = [MultiSeries.var(desc, n3, d + i) for i in range(d)]
    Z3 = [MultiSeries.var(desc, n3, 2 * d + i) for i in range(d)]
    FXY = [_shift(f, n3, 0) for f in F]
    FYZ = [_shift(f, n3, d) for f in F]
    lhs = [substitute(f, FXY + Z3) for f in F]
    rhs = [substitute(f, X3 + FYZ) for f in F]
    names3 = law.variable_names(("X", "Y", "Z"))
    checks.append(_compare("associativity F(F(X,Y),Z) = F(X,F(Y,Z))", lhs, rhs, names3))
    return checks


def validate_law(law: FormalGroupLaw) -> ValidationReport:
    """Check every axiom and report all failures (never raises on a bad law)."""
    checks = _axiom_checks(law)
    need = 2 if law.prime == 2 else 1
    checks.append(AxiomCheck(
        "level", law.level_ok(),
        detail=f"N = {law.level}, need N >= {need} for p = {law.prime}"))
    return ValidationReport(law.name, checks)


def associativity_sides(law: FormalGroupLaw):
    """Both sides of the associativity identity as 3d-variable series."""
    d = law.dim
    desc = law.descriptor
    n3 = 3 * d
    X3 = [MultiSeries.var(desc, n3, i) for i in range(d)]
    Z3 = [MultiSeries.var(desc, n3, 2 * d + i) for i in range(d)]
    FXY = [_shift(f, n3, 0) for f in law.components]
    FYZ = [_shift(f, n3, d) for f in law.components]
    return ([substitute(f, FXY + Z3) for f in law.components],
            [substitute(f, X3 + FYZ) for f in law.components])


# ---------------------------------------------------------------------------
# formal inverse


def formal_inverse(law: FormalGroupLaw) -> tuple[MultiSeries, ...]:
    """Series i(X) with F(X, i(X)) = 0, solved one degree at a time."""
    d = law.dim
    desc = law.descriptor
    D = desc.degree_cutoff
    X = [MultiSeries.var(desc, d, i) for i in range(d)]
    inv = [-x for x in X]
    for deg in range(2, D + 1):
        val = [substitute(f, X + inv) for f in law.components]
        inv = [g - v.xpart(deg) for g, v in zip(inv, val)]
    val = [substitute(f, X + inv) for f in law.components]
    if any(not v.is_zero() for v in val):
        raise ConvergenceFailure("formal inverse does not reach the degree cutoff")
    return tuple(inv)


# ---------------------------------------------------------------------------
# integer engine for laws over Zp


class ZpEngine:
    """Group operations on raw residue tuples, at any precision up to the lift bound.

    The law's components are compiled into a Python function; this is the
    hot path for powers, roots and Lazard limits.
    """

    def __init__(self, law: FormalGroupLaw):
        self.law = law
        self.p = law.prime
        self.d = law.dim
        self.N = law.level
        self.exact = law.exact
        self._mul = _compile(law.lifted_terms(), self.d, 2 * self.d)
        m = law.descriptor.modulus
        inv_terms = [[(_signed(c, m), k) for k, c in sorted(f.terms.items())]
                     for f in law.inverse_series]
        self._inv0 = _compile(inv_terms, self.d, self.d)

    def max_precision(self, k: int | None = None) -> int:
        return self.law.lift_precision if self.exact else (k or self.law.precision)

    def mul(self, x, y, K):
        return self._mul(x, y, self.p ** K)

    def identity(self):
        return (0,) * self.d

    def inv(self, x, K):
        M = self.p ** K
        y = self._inv0(x, (), M)
        for _ in range(K // max(self.N, 1) + 4):
            r = self._mul(x, y, M)
            if not any(r):
                return y
            y = tuple((a - b) % M for a, b in zip(y, r))
        raise ConvergenceFailure("point inverse did not converge")

    def pow(self, x, n, K):
        if n < 0:
            x, n = self.inv(x, K), -n
        M = self.p ** K
        result = (0,) * self.d
        base = x
        while n:
            if n & 1:
                result = self._mul(result, base, M)
            n >>= 1
            if n:
                base = self._mul(base, base, M)
        return result

    def comm(self, x, y, K):
        M = self.p ** K
        xy = self._mul(x, y, M)
        ixiy = self._mul(self.inv(x, K), self.inv(y, K), M)
        return self._mul(ixiy, xy, M)

    def valuation(self, x, K):
        return min(vp(a % self.p ** K, self.p, cap=K) for a in x)

    def reduce(self, x, K):
        M = self.p ** K
        return tuple(a % M for a in x)


def _compile(component_terms, d, nvars):
    """Generate f(x, y, M) evaluating polynomial components mod M."""
    xs = [f"x{i}" for i in range(d)]
    ys = [f"y{i}" for i in range(nvars - d)]
    names = xs + ys
    lines = ["def _f(x, y, M):"]
    lines.append(f"    {', '.join(xs)}{',' if len(xs) == 1 else ''} = x")
    if ys:
        lines.append(f"    {', '.join(ys)}{',' if len(ys) == 1 else ''} = y")
    exprs = []
    for terms in component_terms:
        parts = []
        for c, key in terms:
            factors = [str(c)]
            for name, e in zip(names, key[:nvars]):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}**{e}")
            parts.append("*".join(factors))
        exprs.append(f"({' + '.join(parts) if parts else '0'}) % M")
    lines.append(f"    return ({', '.join(exprs)},)")
    ns: dict = {}
    exec("\n".join(lines), ns)
    return ns["_f"]


# ---------------------------------------------------------------------------
# group operations on points


def _zp_precision(law, *points):
    return min([law.precision] + [P.precision for P in points])


def _guarantee(law, points, K):
    """Precision to which a product of these points is trustworthy."""
    g = [P.guarantee for P in points if P.guarantee is not None]
    if not law.exact:
        orders = [min(ideal_order(c) for c in P.coordinates) for P in points]
        g.append((law.descriptor.degree_cutoff + 1) * max(law.level, min(orders)))
    if not g:
        return None
    return min(g)


def _from_ints(law, values, K, guarantee=None):
    if guarantee is not None and law.over_zp and guarantee < K:
        K, guarantee = guarantee, None
    d = law.descriptor.with_precision(K)
    return StandardPoint(tuple(RingElement._raw(d, 0, {(): v % d.modulus} if v % d.modulus else {})
                               for v in values), guarantee)


def gmul(law: FormalGroupLaw, P: StandardPoint, Q: StandardPoint) -> StandardPoint:
    g = _guarantee(law, (P, Q), None)
    if law.over_zp:
        K = _zp_precision(law, P, Q)
        return _from_ints(law, law.engine.mul(P.ints(), Q.ints(), K), K, g)
    coords = tuple(P.coordinates) + tuple(Q.coordinates)
    return StandardPoint(tuple(compose_ring(f, coords) for f in law.components), g)


def ginv(law: FormalGroupLaw, P: StandardPoint) -> StandardPoint:
    g = _guarantee(law, (P,), None)
    if law.over_zp:
        K = _zp_precision(law, P)
        return _from_ints(law, law.engine.inv(P.ints(), K), K, g)
    x = list(P.coordinates)
    y = [compose_ring(f, x) for f in law.inverse_series]
    sentinel = law.descriptor.order_sentinel
    for _ in range(sentinel // law.level + 4):
        r = [compose_ring(f, x + y) for f in law.components]
        if all(c.is_zero() for c in r):
            return StandardPoint(tuple(y), g)
        y = [a - b for a, b in zip(y, r)]
    raise ConvergenceFailure("point inverse did not converge")


def gcomm(law: FormalGroupLaw, P: StandardPoint, Q: StandardPoint) -> StandardPoint:
    """Group commutator P^-1 Q^-1 P Q."""
    return gmul(law, gmul(law, ginv(law, P), ginv(law, Q)), gmul(law, P, Q))


def gpow(law: FormalGroupLaw, P: StandardPoint, n: int) -> StandardPoint:
    if law.over_zp:
        K = _zp_precision(law, P)
        g = _guarantee(law, (P,), None)
        return _from_ints(law, law.engine.pow(P.ints(), n, K), K, g)
    if n < 0:
        P, n = ginv(law, P), -n
    result = law.identity()
    base = P
    while n:
        if n & 1:
            result = gmul(law, result, base)
        n >>= 1
        if n:
            base = gmul(law, base, base)
    return result


def extract_bracket(law: FormalGroupLaw):
    """c[i][j][l] = coeff(X_i Y_j in F_l) - coeff(X_j Y_i in F_l), as ring elements."""
    d = law.dim
    out = []
    for i in range(d):
        row = []
        for j in range(d):
            key_ij = [0] * (2 * d)
            key_ij[i] += 1
            key_ij[d + j] += 1
            key_ji = [0] * (2 * d)
            key_ji[j] += 1
            key_ji[d + i] += 1
            row.append([f.coefficient_ring(key_ij) - f.coefficient_ring(key_ji)
                        for f in law.components])
        out.append(row)
    return out


def bracket_constants_int(law: FormalGroupLaw):
    """extract_bracket for a law over Zp, as residues."""
    return [[[c.terms.get((), 0) for c in cell] for cell in row] for row in extract_bracket(law)]


# ---------------------------------------------------------------------------
# built-in laws


def _law(p, k, N, D, m, dim, comps, name):
    desc = RingDescriptor(p, k, m, D)
    series = [MultiSeries(desc, 2 * dim, terms) for terms in comps]
    return FormalGroupLaw(desc, dim, N, series, name)


def _key(d, m, x=(), y=(), t=()):
    """Exponent key with X_i for i in x, Y_j for j in y, t powers."""
    e = [0] * (2 * d + m)
    for i in x:
        e[i] += 1
    for j in y:
        e[d + j] += 1
    for j, power in enumerate(t):
        e[2 * d + j] = power
    return tuple(e)


def additive_law(p=3, k=6, N=None, D=6, dim=1):
    N = N or (2 if p == 2 else 1)
    comps = [{_key(dim, 0, x=[i]): 1, _key(dim, 0, y=[i]): 1} for i in range(dim)]
    return _law(p, k, N, D, 0, dim, comps, "additive")


def multiplicative_law(p=3, k=6, N=None, D=6):
    N = N or (2 if p == 2 else 1)
    comps = [{_key(1, 0, x=[0]): 1, _key(1, 0, y=[0]): 1, _key(1, 0, x=[0], y=[0]): 1}]
    return _law(p, k, N, D, 0, 1, comps, "multiplicative")


def twisted_multiplicative_law(p=3, k=6, N=None, D=6):
    """X + Y + t X Y over Zp[[t]]."""
    N = N or (2 if p == 2 else 1)
    comps = [{_key(1, 1, x=[0]): 1, _key(1, 1, y=[0]): 1, _key(1, 1, x=[0], y=[0], t=[1]): 1}]
    return _law(p, k, N, D, 1, 1, comps, "twisted-multiplicative")


def heisenberg_law(p=3, k=6, N=None, D=6):
    """Unitriangular 3x3 matrices (1 x1 x3; 0 1 x2; 0 0 1) in chart coordinates."""
    N = N or (2 if p == 2 else 1)
    comps = [
        {_key(3, 0, x=[0]): 1, _key(3, 0, y=[0]): 1},
        {_key(3, 0, x=[1]): 1, _key(3, 0, y=[1]): 1},
        {_key(3, 0, x=[2]): 1, _key(3, 0, y=[2]): 1, _key(3, 0, x=[0], y=[1]): 1},
    ]
    return _law(p, k, N, D, 0, 3, comps, "heisenberg")


BUILTIN_ZP_LAWS = {
    "additive": additive_law,
    "multiplicative": multiplicative_law,
    "heisenberg": heisenberg_law,
}

BUILTIN_LAWS = dict(BUILTIN_ZP_LAWS, **{"twisted-multiplicative": twisted_multiplicative_law})


def uniformity_valuation(p: int) -> int:
    return bold_p_valuation(p)
