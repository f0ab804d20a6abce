"""Lazard limit operations on a Zp-standard group.

For a uniform group G the underlying set carries a Zp-Lie lattice with

    x + y = lim (x^(p^n) y^(p^n))^(p^-n)
    [x, y] = lim comm(x^(p^n), y^(p^n))^(p^-2n)

and integer scalar multiples are powers.  Limits are evaluated at an
internal precision high enough to absorb the digits lost by the roots;
a limit is accepted once two successive iterates agree at the output
precision.
"""
from __future__ import annotations

from typing import NamedTuple, Sequence

from ..errors import InvalidLaw, NoStabilization, NotAPower, NotPowerful
from ..fgl import FormalGroupLaw, StandardPoint, _from_ints, zp_point
from ..zp import bold_p_valuation, vp
from .lie import LieLattice


class LimitResult(NamedTuple):
    point: StandardPoint
    index: int


def _require_zp(law: FormalGroupLaw):
    if not law.over_zp:
        raise InvalidLaw("Lazard operations need a law over Zp (specialize first)")
    if not law.level_ok():
        raise InvalidLaw(f"level {law.level} too small for uniformity at p = {law.prime}")


def _internal(law, kout, factor):
    return min(factor * kout + 4, law.engine.max_precision())


# ---------------------------------------------------------------------------
# roots


def root_int(eng, x, e: int, K: int):
    """p^e-th root of x at precision K; the result is meaningful mod p^(K-e)."""
    if e == 0:
        return eng.reduce(x, K)
    p, N = eng.p, eng.N
    pe = p ** e
    x = eng.reduce(x, K)
    if not any(x):
        return x
    if eng.valuation(x, K) < N + e:
        raise NotAPower("point is not in the image of the p^%d-power map" % e)
    M = p ** K
    q = tuple(a // pe for a in x)
    for _ in range(K + 2):
        r = eng.pow(q, pe, K)
        delta = eng.mul(eng.inv(r, K), x, K)
        if not any(delta):
            return q
        if eng.valuation(delta, K) < N + e:
            raise NotAPower("root refinement left the p^e-th power subgroup")
        q = eng.mul(q, tuple(a // pe for a in delta), K)
    if any(eng.mul(eng.inv(eng.pow(q, pe, K), K), x, K)):
        raise NotAPower("root iteration did not converge")
    return q


def p_root(law: FormalGroupLaw, P: StandardPoint, e: int = 1) -> StandardPoint:
    """Q with Q^(p^e) = P; the answer is returned at precision k - e."""
    _require_zp(law)
    if e < 1:
        raise ValueError("e must be >= 1")
    eng = law.engine
    K = P.precision
    q = root_int(eng, P.ints(), e, K)
    if K - e < 1:
        raise NotAPower("no digits left after taking the root")
    return _from_ints(law, q, K - e)


# ---------------------------------------------------------------------------
# limits


def _stabilize(law, kout, iterate, cap, what):
    M = law.prime ** kout
    prev = None
    for n in range(cap + 1):
        cur = tuple(a % M for a in iterate(n))
        if prev is not None and cur == prev:
            return cur, n
        prev = cur
    raise NoStabilization(f"{what} did not stabilize within {cap} iterations (non-uniform input?)")


def _confirm(law, kout, iterate, n, value, what):
    M = law.prime ** kout
    extra = tuple(a % M for a in iterate(n + 1))
    if extra != value:
        raise NoStabilization(f"{what} moved after stabilization index {n}")


def lazard_add_int(law, x, y, kout, confirm=False):
    eng = law.engine
    p = law.prime
    K = _internal(law, kout, 2)

    def it(n):
        pn = p ** n
        return root_int(eng, eng.mul(eng.pow(x, pn, K), eng.pow(y, pn, K), K), n, K)

    value, n = _stabilize(law, kout, it, kout, "Lazard sum")
    if confirm:
        _confirm(law, kout, it, n, value, "Lazard sum")
    return value, n


def lazard_bracket_int(law, x, y, kout, confirm=False):
    eng = law.engine
    p = law.prime
    K = _internal(law, kout, 3)

    def it(n):
        pn = p ** n
        return root_int(eng, eng.comm(eng.pow(x, pn, K), eng.pow(y, pn, K), K), 2 * n, K)

    value, n = _stabilize(law, kout, it, kout, "Lazard bracket")
    if confirm:
        _confirm(law, kout, it, n, value, "Lazard bracket")
    return value, n


def lazard_combination_int(law, coeffs, basis_ints, kout):
    """Sum over i of coeffs[i] * basis[i] in the Lazard lattice."""
    eng = law.engine
    p = law.prime
    K = _internal(law, kout, 2)
    span = p ** (K - law.level)

    def it(n):
        pn = p ** n
        acc = eng.identity()
        for c, e in zip(coeffs, basis_ints):
            if c % span:
                acc = eng.mul(acc, eng.pow(e, c * pn % span, K), K)
        return root_int(eng, acc, n, K)

    return _stabilize(law, kout, it, kout, "Lazard combination")[0]


def _out_precision(law, points, precision):
    return precision or min([law.precision] + [P.precision for P in points])


def lazard_add(law: FormalGroupLaw, P: StandardPoint, Q: StandardPoint,
               precision: int | None = None, confirm: bool = False) -> LimitResult:
    _require_zp(law)
    kout = _out_precision(law, (P, Q), precision)
    v, n = lazard_add_int(law, P.ints(), Q.ints(), kout, confirm)
    return LimitResult(_from_ints(law, v, kout), n)


def lazard_bracket(law: FormalGroupLaw, P: StandardPoint, Q: StandardPoint,
                   precision: int | None = None, confirm: bool = False) -> LimitResult:
    _require_zp(law)
    kout = _out_precision(law, (P, Q), precision)
    v, n = lazard_bracket_int(law, P.ints(), Q.ints(), kout, confirm)
    return LimitResult(_from_ints(law, v, kout), n)


def lazard_combination(law: FormalGroupLaw, coeffs: Sequence[int],
                       basis: Sequence[StandardPoint], precision: int | None = None) -> StandardPoint:
    _require_zp(law)
    kout = precision or law.precision
    v = lazard_combination_int(law, list(coeffs), [b.ints() for b in basis], kout)
    return _from_ints(law, v, kout)


# ---------------------------------------------------------------------------
# coordinates


def standard_basis(law: FormalGroupLaw) -> list[StandardPoint]:
    """e_i with chart coordinates p^N * delta_i."""
    pN = law.prime ** law.level
    return [zp_point(law, [pN if j == i else 0 for j in range(law.dim)]) for i in range(law.dim)]


def lie_coordinates_int(law, x, basis_ints, kout):
    """lambda mod p^(kout-N) with sum lambda_i e_i = x, by repeated Lazard subtraction."""
    eng = law.engine
    p, N = law.prime, law.level
    M = p ** kout
    pN = p ** N
    x = tuple(a % M for a in x)
    if any(a % pN for a in x):
        raise NotAPower("point is not in the standard group of this level")
    lam = [a // pN for a in x]
    for _ in range(kout + 2):
        q = lazard_combination_int(law, lam, basis_ints, kout)
        r, _ = lazard_add_int(law, x, eng.inv(q, kout), kout)
        if not any(r):
            span = p ** (kout - N)
            return [c % span for c in lam]
        lam = [c + a // pN for c, a in zip(lam, r)]
    raise NoStabilization("Lazard coordinates did not converge")


def lie_coordinates(law: FormalGroupLaw, P: StandardPoint, basis: Sequence[StandardPoint] | None = None,
                    precision: int | None = None):
    """Coordinates of P in the Lazard lattice, as PadicScalars at precision k - N."""
    from ..zp import PadicScalar
    _require_zp(law)
    basis = basis or standard_basis(law)
    kout = _out_precision(law, (P,), precision)
    lam = lie_coordinates_int(law, P.ints(), [b.ints() for b in basis], kout)
    return [PadicScalar(law.prime, kout - law.level, c) for c in lam]


def lie_lattice_of(law: FormalGroupLaw, confirm: bool = False):
    """Structure constants of the Lazard lattice in the basis e_i = p^N delta_i.

    Exact laws are worked at N extra digits so the constants come out at
    the law's full precision.
    """
    _require_zp(law)
    d, p, N = law.dim, law.prime, law.level
    k = law.precision
    kout = k + N if law.exact else k
    basis = standard_basis(law)
    bints = [b.ints() for b in basis]
    lat_k = kout - N
    m = p ** lat_k
    c = [[[0] * d for _ in range(d)] for _ in range(d)]
    indices = {}
    for i in range(d):
        for j in range(i + 1, d):
            b, n = lazard_bracket_int(law, bints[i], bints[j], kout, confirm)
            indices[(i, j)] = n
            lam = lie_coordinates_int(law, b, bints, kout)
            for l in range(d):
                c[i][j][l] = lam[l] % m
                c[j][i][l] = -lam[l] % m
    lattice = LieLattice(p, lat_k, d, c)
    if not lattice.is_powerful():
        raise NotPowerful("Lazard lattice is not powerful (level constraint violated?)")
    return lattice, basis


# ---------------------------------------------------------------------------
# coordinates of the second kind


class PowerTable:
    """Cached e_i^(p^j) for the digit-by-digit product decomposition."""

    def __init__(self, law: FormalGroupLaw, basis_ints, K: int):
        self.law = law
        self.eng = law.engine
        self.K = K
        self.basis = basis_ints
        p = law.prime
        self.powers = []
        for e in basis_ints:
            row = [tuple(e)]
            for _ in range(K):
                row.append(self.eng.pow(row[-1], p, K))
            self.powers.append(row)

    def product(self, mu):
        """e_1^mu_1 ... e_d^mu_d."""
        eng, K = self.eng, self.K
        acc = eng.identity()
        for i, m in enumerate(mu):
            acc = eng.mul(acc, self.power(i, m), K)
        return acc

    def power(self, i, m):
        eng, K, p = self.eng, self.K, self.law.prime
        acc = eng.identity()
        j = 0
        while m and j <= K:
            m, digit = divmod(m, p)
            for _ in range(digit):
                acc = eng.mul(acc, self.powers[i][j], K)
            j += 1
        return acc


def second_kind_int(table: PowerTable, h):
    """mu with e_1^mu_1 ... e_d^mu_d = h, one p-adic digit per level, mod p^(K-N)."""
    law, eng, K = table.law, table.eng, table.K
    p, N, d = law.prime, law.level, law.dim
    M = p ** K
    h = tuple(a % M for a in h)
    mu = [0] * d
    factors = [eng.identity() for _ in range(d)]
    for j in range(K - N):
        acc = eng.identity()
        for f in factors:
            acc = eng.mul(acc, f, K)
        r = eng.mul(eng.inv(acc, K), h, K)
        if not any(r):
            break
        scale = p ** (N + j)
        if any(a % scale for a in r):
            raise NotAPower("product decomposition lost track of the filtration")
        for i in range(d):
            digit = (r[i] // scale) % p
            if digit:
                mu[i] += digit * p ** j
                for _ in range(digit):
                    factors[i] = eng.mul(factors[i], table.powers[i][j], K)
    else:
        acc = eng.identity()
        for f in factors:
            acc = eng.mul(acc, f, K)
        if any(eng.mul(eng.inv(acc, K), h, K)):
            raise NotAPower("product decomposition did not close")
    return mu


def uniformity_index(p: int) -> int:
    return bold_p_valuation(p)


def in_power_subgroup(law: FormalGroupLaw, x, e: int, K: int) -> bool:
    """x in G^(p^e), read off the chart (valid for uniform G)."""
    return all(vp(a % law.prime ** K, law.prime, cap=K) >= law.level + e for a in x)
