"""Truncated multivariate power series over Zp and Zp[[t1..tm]].

A series in ``nvars`` variables X over the ring R = Zp[[t1..tm]] is stored
as a sparse map from a flat exponent tuple (X-exponents followed by
t-exponents) to a residue mod p^k.  Terms whose X-total-degree or
t-total-degree exceeds the cutoff D are dropped.  A ``RingElement`` is the
case ``nvars == 0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .errors import DescriptorMismatch, NonzeroConstantTerm, ValuationTooLow
from .zp import PadicScalar, looks_prime, vp


@dataclass(frozen=True)
class RingDescriptor:
    prime: int
    precision: int
    param_vars: int = 0
    degree_cutoff: int = 6

    def __post_init__(self):
        if not looks_prime(self.prime):
            raise ValueError(f"{self.prime} is not prime")
        if self.precision < 1:
            raise ValueError("precision must be >= 1")
        if self.param_vars < 0:
            raise ValueError("param_vars must be >= 0")
        if self.degree_cutoff < 2:
            raise ValueError("degree cutoff must be >= 2")

    @property
    def modulus(self) -> int:
        return self.prime ** self.precision

    def with_precision(self, k: int) -> "RingDescriptor":
        return RingDescriptor(self.prime, k, self.param_vars, self.degree_cutoff)

    def with_cutoff(self, d: int) -> "RingDescriptor":
        return RingDescriptor(self.prime, self.precision, self.param_vars, d)

    @property
    def order_sentinel(self) -> int:
        return self.precision + self.degree_cutoff


def common_descriptor(a: RingDescriptor, b: RingDescriptor) -> RingDescriptor:
    """Precision mixes to the minimum; anything else must agree exactly."""
    if a == b:
        return a
    if (a.prime, a.param_vars, a.degree_cutoff) != (b.prime, b.param_vars, b.degree_cutoff):
        raise DescriptorMismatch(f"{a} vs {b}")
    return a if a.precision <= b.precision else b


class Evaluation(NamedTuple):
    value: PadicScalar
    guarantee: int


class MultiSeries:
    __slots__ = ("descriptor", "nvars", "terms")

    def __init__(self, descriptor: RingDescriptor, nvars: int, terms=None):
        self.descriptor = descriptor
        self.nvars = nvars
        m = descriptor.modulus
        D = descriptor.degree_cutoff
        width = nvars + descriptor.param_vars
        clean = {}
        for key, c in (terms or {}).items():
            key = tuple(key)
            if len(key) != width:
                raise ValueError(f"exponent {key} has wrong length (want {width})")
            c %= m
            if c and sum(key[:nvars]) <= D and sum(key[nvars:]) <= D:
                clean[key] = c
        self.terms = clean

    # -- construction --------------------------------------------------------

    @classmethod
    def _raw(cls, descriptor, nvars, terms):
        obj = cls.__new__(cls)
        obj.descriptor = descriptor
        obj.nvars = nvars
        obj.terms = terms
        return obj

    def _like(self, terms, descriptor=None):
        # terms already reduced and truncated
        return type(self)._raw(descriptor or self.descriptor, self.nvars, terms)

    def _rebuild(self, descriptor, terms):
        obj = type(self)._raw(descriptor, self.nvars, {})
        MultiSeries.__init__(obj, descriptor, self.nvars, terms)
        return obj

    def _const(self, c: int):
        return self._rebuild(self.descriptor, {(0,) * (self.nvars + self.descriptor.param_vars): c})

    @classmethod
    def zero(cls, descriptor, nvars):
        return cls(descriptor, nvars)

    @classmethod
    def constant(cls, descriptor, nvars, c: int):
        return cls(descriptor, nvars, {(0,) * (nvars + descriptor.param_vars): c})

    @classmethod
    def one(cls, descriptor, nvars):
        return cls.constant(descriptor, nvars, 1)

    @classmethod
    def var(cls, descriptor, nvars, i: int, coeff: int = 1):
        key = [0] * (nvars + descriptor.param_vars)
        key[i] = 1
        return cls(descriptor, nvars, {tuple(key): coeff})

    @classmethod
    def tvar(cls, descriptor, nvars, j: int, coeff: int = 1):
        return cls.var(descriptor, nvars, nvars + j, coeff)

    @classmethod
    def from_ring(cls, element: "RingElement", nvars: int):
        """Embed a coefficient-ring element as an X-constant series."""
        pad = (0,) * nvars
        return cls._raw(element.descriptor, nvars, {pad + k: c for k, c in element.terms.items()})

    # -- inspection ----------------------------------------------------------

    @property
    def prime(self):
        return self.descriptor.prime

    def is_zero(self) -> bool:
        return not self.terms

    def xdeg(self, key) -> int:
        return sum(key[:self.nvars])

    def tdeg(self, key) -> int:
        return sum(key[self.nvars:])

    def max_xdegree(self) -> int:
        return max((self.xdeg(k) for k in self.terms), default=0)

    def max_tdegree(self) -> int:
        return max((self.tdeg(k) for k in self.terms), default=0)

    def coefficient(self, key) -> PadicScalar:
        d = self.descriptor
        return PadicScalar(d.prime, d.precision, self.terms.get(tuple(key), 0))

    def xpart(self, degree: int) -> "MultiSeries":
        return self._like({k: c for k, c in self.terms.items() if self.xdeg(k) == degree})

    def coefficient_ring(self, xexp) -> "RingElement":
        """Coefficient of X^xexp as an element of Zp[[t]]."""
        xexp = tuple(xexp)
        n = self.nvars
        return RingElement._raw(self.descriptor, 0,
                                {k[n:]: c for k, c in self.terms.items() if k[:n] == xexp})

    def x_monomials(self):
        n = self.nvars
        return sorted({k[:n] for k in self.terms})

    def has_x_constant(self) -> bool:
        return any(self.xdeg(k) == 0 for k in self.terms)

    def truncate(self, precision=None, cutoff=None) -> "MultiSeries":
        d = self.descriptor
        nd = RingDescriptor(d.prime, precision or d.precision, d.param_vars, cutoff or d.degree_cutoff)
        return self._rebuild(nd, self.terms)

    def with_descriptor(self, descriptor) -> "MultiSeries":
        return self._rebuild(descriptor, self.terms)

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, MultiSeries):
            raise TypeError(f"cannot combine series with {type(other).__name__}")
        if other.nvars != self.nvars:
            raise DescriptorMismatch(f"{self.nvars} vs {other.nvars} variables")
        return common_descriptor(self.descriptor, other.descriptor)

    def _coerce(self, other):
        if isinstance(other, int):
            return self._const(other)
        if isinstance(other, PadicScalar):
            if other.prime != self.prime:
                raise DescriptorMismatch("prime mismatch")
            c = self._coerce(other.residue)
            if other.precision < self.descriptor.precision:
                c = c.truncate(precision=other.precision)
            return c
        return other

    def __add__(self, other):
        other = self._coerce(other)
        d = self._check(other)
        m = d.modulus
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = (out.get(k, 0) + c) % m
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        if d.precision < self.descriptor.precision or d.precision < other.descriptor.precision:
            out = {k: c % m for k, c in out.items() if c % m}
        return self._like(out, d)

    __radd__ = __add__

    def __neg__(self):
        m = self.descriptor.modulus
        return self._like({k: (-c) % m for k, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        return self + (-other)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, PadicScalar)) and not isinstance(other, bool):
            if isinstance(other, PadicScalar):
                other = self._coerce(other)
            else:
                m = self.descriptor.modulus
                return self._like({k: c * other % m for k, c in self.terms.items() if c * other % m})
        d = self._check(other)
        return self._like(_mul_terms(self.terms, other.terms, self.nvars, d), d)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of a series")
        result = self._const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, MultiSeries):
            return NotImplemented
        if self.nvars != other.nvars:
            return False
        try:
            d = common_descriptor(self.descriptor, other.descriptor)
        except DescriptorMismatch:
            return False
        m = d.modulus
        keys = set(self.terms) | set(other.terms)
        return all((self.terms.get(k, 0) - other.terms.get(k, 0)) % m == 0 for k in keys)

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def first_difference(self, other):
        """Smallest exponent key (graded order) where the two series differ, or None."""
        d = common_descriptor(self.descriptor, other.descriptor)
        m = d.modulus
        keys = sorted(set(self.terms) | set(other.terms), key=lambda k: (sum(k), k[::-1]))
        for k in keys:
            if (self.terms.get(k, 0) - other.terms.get(k, 0)) % m:
                return k
        return None

    # -- printing ------------------------------------------------------------

    def format(self, names: Sequence[str] | None = None) -> str:
        return format_terms(self.terms, self.nvars, self.descriptor, names)

    def __repr__(self):
        return f"{type(self).__name__}({self.format()})"


class RingElement(MultiSeries):
    """Element of Zp[[t1..tm]] truncated at t-degree D and mod p^k."""

    __slots__ = ()

    def __init__(self, descriptor: RingDescriptor, terms=None):
        super().__init__(descriptor, 0, terms)

    @classmethod
    def constant(cls, descriptor, c: int):
        return cls(descriptor, {(0,) * descriptor.param_vars: c})

    @classmethod
    def zero(cls, descriptor):
        return cls(descriptor)

    @classmethod
    def one(cls, descriptor):
        return cls.constant(descriptor, 1)

    @classmethod
    def t(cls, descriptor, j=0, coeff=1):
        key = [0] * descriptor.param_vars
        key[j] = 1
        return cls(descriptor, {tuple(key): coeff})

    def constant_term(self) -> PadicScalar:
        return self.coefficient((0,) * self.descriptor.param_vars)

    def is_unit(self) -> bool:
        return self.constant_term().is_unit()

    def is_constant(self) -> bool:
        return all(sum(k) == 0 for k in self.terms)


def _mul_terms(a: dict, b: dict, nvars: int, d: RingDescriptor) -> dict:
    if not a or not b:
        return {}
    D = d.degree_cutoff
    m = d.modulus
    bl = [(k, c, sum(k[:nvars]), sum(k[nvars:])) for k, c in b.items()]
    out: dict = {}
    for ka, ca in a.items():
        xa, ta = sum(ka[:nvars]), sum(ka[nvars:])
        if xa > D or ta > D:
            continue
        for kb, cb, xb, tb in bl:
            if xa + xb > D or ta + tb > D:
                continue
            key = tuple(i + j for i, j in zip(ka, kb))
            out[key] = out.get(key, 0) + ca * cb
    return {k: c % m for k, c in out.items() if c % m}


def series_arith(op: str, f: MultiSeries, g: MultiSeries) -> MultiSeries:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    raise ValueError(f"unknown op {op!r}")


def _compose(f: MultiSeries, images: Sequence[MultiSeries], nvars_out: int, descriptor):
    """f(images) over the common descriptor, truncated."""
    n = f.nvars
    powers = [[None] for _ in range(n)]
    one = MultiSeries.one(descriptor, nvars_out) if nvars_out else RingElement.one(descriptor)

    def power(i, e):
        cache = powers[i]
        if len(cache) == 1:
            cache[0] = one
        while len(cache) <= e:
            cache.append(cache[-1] * images[i])
        return cache[e]

    acc = {}
    m = descriptor.modulus
    for key, c in f.terms.items():
        xexp, texp = key[:n], key[n:]
        term = None
        for i, e in enumerate(xexp):
            if e:
                term = power(i, e) if term is None else term * power(i, e)
                if term.is_zero():
                    break
        if term is None:
            term = one
        if term.is_zero():
            continue
        pad = (0,) * nvars_out
        mono = {pad + texp: c}
        prod = _mul_terms(term.terms, mono, nvars_out, descriptor)
        for k2, c2 in prod.items():
            acc[k2] = acc.get(k2, 0) + c2
    acc = {k: c % m for k, c in acc.items() if c % m}
    if nvars_out == 0:
        return RingElement._raw(descriptor, 0, acc)
    return MultiSeries._raw(descriptor, nvars_out, acc)


def substitute(f: MultiSeries, images: Sequence[MultiSeries]) -> MultiSeries:
    """Replace each X-variable of f by the matching image series."""
    if len(images) != f.nvars:
        raise ValueError(f"need {f.nvars} images, got {len(images)}")
    if not images:
        return f
    nout = images[0].nvars
    d = f.descriptor
    for g in images:
        if g.nvars != nout:
            raise DescriptorMismatch("images live in different variable sets")
        d = common_descriptor(d, g.descriptor)
        if nout and g.has_x_constant():
            raise NonzeroConstantTerm(f"image {g.format()} has a nonzero constant term")
    if nout == 0:
        return compose_ring(f, images)
    return _compose(f, images, nout, d)


def compose_ring(f: MultiSeries, elements: Sequence[RingElement]) -> RingElement:
    """Evaluate the X-variables of f at elements of the maximal ideal."""
    if len(elements) != f.nvars:
        raise ValueError(f"need {f.nvars} elements, got {len(elements)}")
    d = f.descriptor
    for e in elements:
        d = common_descriptor(d, e.descriptor)
        if ideal_order(e) < 1:
            raise ValuationTooLow(f"{e.format()} is not in the maximal ideal")
    return _compose(f, elements, 0, d)


def ideal_order(x: RingElement) -> int:
    """Largest N with x in m^{*N} at precision; zero maps to k + D."""
    d = x.descriptor
    if not x.terms:
        return d.order_sentinel
    n = x.nvars
    return min(vp(c, d.prime, cap=d.precision) + sum(k[n:]) for k, c in x.terms.items())


def evaluate(f: MultiSeries, point: Sequence, exact: bool = False) -> Evaluation:
    """Evaluate every variable (X first, then t) at p-adic integers of positive valuation.

    The dropped tail of degree > D has valuation >= (D+1)*vmin, so the value
    is guaranteed modulo p^min(k, (D+1)*vmin).  ``exact`` declares that f is
    an honest polynomial, in which case nothing was dropped.
    """
    d = f.descriptor
    p, k = d.prime, d.precision
    width = f.nvars + d.param_vars
    if len(point) != width:
        raise ValueError(f"need {width} coordinates, got {len(point)}")
    vals, precs = [], []
    for a in point:
        if isinstance(a, PadicScalar):
            if a.prime != p:
                raise DescriptorMismatch("point over a different prime")
            vals.append(a.residue)
            precs.append(a.precision)
        else:
            vals.append(int(a))
    kk = min([k] + precs)
    m = p ** kk
    vmin = kk
    for a in vals:
        v = vp(a % m, p, cap=kk)
        if v == 0:
            raise ValuationTooLow(f"coordinate {a} is a unit")
        vmin = min(vmin, v)
    total = 0
    for key, c in f.terms.items():
        term = c
        for a, e in zip(vals, key):
            if e:
                term = term * pow(a, e, m) % m
        total += term
    guarantee = kk if exact else min(kk, (d.degree_cutoff + 1) * vmin)
    return Evaluation(PadicScalar(p, kk, total), guarantee)


# ---------------------------------------------------------------------------


def variable_names(nvars: int, param_vars: int, names=None):
    xs = list(names) if names is not None else [f"x{i + 1}" for i in range(nvars)]
    ts = ["t"] if param_vars == 1 else [f"t{j + 1}" for j in range(param_vars)]
    return xs + ts


def format_monomial(key, names) -> str:
    parts = []
    for e, name in zip(key, names):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts) if parts else "1"


def format_terms(terms, nvars, descriptor, names=None) -> str:
    if not terms:
        return "0"
    allnames = variable_names(nvars, descriptor.param_vars, names)
    m = descriptor.modulus
    out = []
    for key in sorted(terms, key=lambda k: (sum(k), tuple(-e for e in k))):
        c = terms[key]
        sc = c - m if c > m // 2 else c
        mono = format_monomial(key, allnames)
        if mono == "1":
            out.append(str(sc))
        elif sc == 1:
            out.append(mono)
        elif sc == -1:
            out.append("-" + mono)
        else:
            out.append(f"{sc}*{mono}")
    s = " + ".join(out)
    return s.replace("+ -", "- ")
