"""Fixed-precision arithmetic in Zp and linear algebra over Z/p^k.

Every value is a residue class modulo p^k.  An inequality established at
precision is a true inequality in Zp; an equality only holds "to precision".
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InexactDivision, ModulusMismatch, NotAUnit


def vp(n: int, p: int, cap: int | None = None) -> int:
    """p-adic valuation of an integer; ``cap`` is returned for zero."""
    if n == 0:
        if cap is None:
            raise ValueError("valuation of 0 needs a cap")
        return cap
    v = 0
    while n % p == 0:
        n //= p
        v += 1
        if cap is not None and v >= cap:
            return cap
    return v


def vp_factorial(n: int, p: int) -> int:
    """Legendre's formula."""
    v, q = 0, p
    while q <= n:
        v += n // q
        q *= p
    return v


def looks_prime(p: int) -> bool:
    """Trial-division sanity check used to validate user-supplied primes."""
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def bold_p(p: int) -> int:
    """The uniformity modulus: p for odd p, 4 for p = 2."""
    return 4 if p == 2 else p


def bold_p_valuation(p: int) -> int:
    return 2 if p == 2 else 1


@dataclass(frozen=True)
class PadicScalar:
    prime: int
    precision: int
    residue: int = 0

    def __post_init__(self):
        if self.precision < 1:
            raise ValueError("precision must be >= 1")
        object.__setattr__(self, "residue", self.residue % self.prime ** self.precision)

    @property
    def modulus(self) -> int:
        return self.prime ** self.precision

    @property
    def valuation(self) -> int:
        return vp(self.residue, self.prime, cap=self.precision)

    def is_zero(self) -> bool:
        return self.residue == 0

    def is_unit(self) -> bool:
        return self.residue % self.prime != 0

    def truncate(self, precision: int) -> "PadicScalar":
        if precision > self.precision:
            raise ValueError("cannot raise precision of a stored residue")
        return PadicScalar(self.prime, precision, self.residue)

    def lift(self) -> int:
        """Least nonnegative integer representative."""
        return self.residue

    def signed(self) -> int:
        """Representative in (-p^k/2, p^k/2], for display."""
        m = self.modulus
        return self.residue - m if self.residue > m // 2 else self.residue

    def _coerce(self, other) -> "PadicScalar":
        if isinstance(other, int):
            return PadicScalar(self.prime, self.precision, other)
        if not isinstance(other, PadicScalar):
            return NotImplemented
        if other.prime != self.prime or other.precision != self.precision:
            raise ModulusMismatch(
                f"Z/{self.prime}^{self.precision} vs Z/{other.prime}^{other.precision}"
            )
        return other

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicScalar(self.prime, self.precision, self.residue + o.residue)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicScalar(self.prime, self.precision, self.residue - o.residue)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicScalar(self.prime, self.precision, self.residue * o.residue)

    __rmul__ = __mul__

    def __neg__(self):
        return PadicScalar(self.prime, self.precision, -self.residue)

    def __repr__(self):
        return f"PadicScalar({self.residue} mod {self.prime}^{self.precision})"

    def __str__(self):
        return str(self.residue)


def scalar_arith(op: str, x: PadicScalar, y: PadicScalar | None = None) -> PadicScalar:
    if op == "neg":
        return -x
    if y is None:
        raise TypeError(f"{op} needs two operands")
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    raise ValueError(f"unknown op {op!r}")


def inv_mod(a: int, p: int, k: int) -> int:
    m = p ** k
    if a % p == 0:
        raise NotAUnit(f"{a} is not a unit mod {p}^{k}")
    return pow(a, -1, m)


def scalar_inv(x: PadicScalar) -> PadicScalar:
    return PadicScalar(x.prime, x.precision, inv_mod(x.residue, x.prime, x.precision))


def exact_div(x: PadicScalar, y: PadicScalar) -> PadicScalar:
    """z with z*y = x; precision drops by valuation(y)."""
    if x.prime != y.prime or x.precision != y.precision:
        raise ModulusMismatch("exact_div operands differ in modulus")
    p, k = x.prime, x.precision
    if y.is_zero():
        raise InexactDivision("division by zero at precision")
    vy = y.valuation
    if x.valuation < vy:
        raise InexactDivision(f"valuation {x.valuation} < {vy}")
    newk = k - vy
    unit = (y.residue // p ** vy) % p ** newk
    return PadicScalar(p, newk, (x.residue // p ** vy) * pow(unit, -1, p ** newk))


# ---------------------------------------------------------------------------
# matrices


class PadicMatrix:
    """Dense matrix over Z/p^k with integer storage.

    ``entry`` hands out PadicScalars; arithmetic runs on the raw residues.
    """

    __slots__ = ("prime", "precision", "rows", "_hash")

    def __init__(self, prime: int, precision: int, rows: Iterable[Iterable[int]]):
        m = prime ** precision
        self.prime = prime
        self.precision = precision
        self.rows = tuple(tuple(int(x) % m for x in r) for r in rows)
        if not self.rows or not self.rows[0]:
            raise ValueError("empty matrix")
        width = len(self.rows[0])
        if any(len(r) != width for r in self.rows):
            raise ValueError("ragged rows")
        self._hash = None

    @classmethod
    def identity(cls, prime, precision, n):
        return cls(prime, precision, [[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, prime, precision, n, m=None):
        return cls(prime, precision, [[0] * (m or n) for _ in range(n)])

    @classmethod
    def unit(cls, prime, precision, n, i, j, scale=1):
        """scale * E_ij (0-based)."""
        rows = [[0] * n for _ in range(n)]
        rows[i][j] = scale
        return cls(prime, precision, rows)

    @property
    def modulus(self):
        return self.prime ** self.precision

    @property
    def shape(self):
        return len(self.rows), len(self.rows[0])

    def entry(self, i, j) -> PadicScalar:
        return PadicScalar(self.prime, self.precision, self.rows[i][j])

    def _check(self, other):
        if not isinstance(other, PadicMatrix):
            raise TypeError("expected PadicMatrix")
        if other.prime != self.prime:
            raise ModulusMismatch("matrices over different primes")
        return min(self.precision, other.precision)

    def truncate(self, precision):
        return PadicMatrix(self.prime, precision, self.rows)

    def __add__(self, other):
        k = self._check(other)
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return PadicMatrix(self.prime, k, [[a + b for a, b in zip(r, s)]
                                           for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        k = self._check(other)
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return PadicMatrix(self.prime, k, [[a - b for a, b in zip(r, s)]
                                           for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return PadicMatrix(self.prime, self.precision, [[-a for a in r] for r in self.rows])

    def scale(self, c: int) -> "PadicMatrix":
        return PadicMatrix(self.prime, self.precision, [[c * a for a in r] for r in self.rows])

    def __matmul__(self, other):
        k = self._check(other)
        return PadicMatrix(self.prime, k, matmul_int(self.rows, other.rows, self.prime ** k))

    __mul__ = __matmul__

    def commutator(self, other):
        """Additive commutator AB - BA."""
        return self @ other - other @ self

    def is_zero(self):
        return all(a == 0 for r in self.rows for a in r)

    def is_identity(self):
        return all(a == int(i == j) for i, r in enumerate(self.rows) for j, a in enumerate(r))

    def min_valuation(self) -> int:
        return min((vp(a, self.prime, cap=self.precision) for r in self.rows for a in r))

    def inverse(self) -> "PadicMatrix":
        n, m = self.shape
        if n != m:
            raise ValueError("inverse of non-square matrix")
        return PadicMatrix(self.prime, self.precision,
                           inverse_int(self.rows, self.prime, self.precision))

    def __eq__(self, other):
        if not isinstance(other, PadicMatrix):
            return NotImplemented
        return (self.prime == other.prime and self.precision == other.precision
                and self.rows == other.rows)

    def congruent(self, other, precision=None) -> bool:
        k = precision if precision is not None else min(self.precision, other.precision)
        m = self.prime ** k
        return self.shape == other.shape and all(
            (a - b) % m == 0 for r, s in zip(self.rows, other.rows) for a, b in zip(r, s))

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.prime, self.precision, self.rows))
        return self._hash

    def tolist(self):
        return [list(r) for r in self.rows]

    def __repr__(self):
        return f"PadicMatrix(p={self.prime}, k={self.precision}, {self.tolist()})"


def matmul_int(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], m: int):
    if len(a[0]) != len(b):
        raise ValueError("inner dimensions differ")
    cols = list(zip(*b))
    out = []
    for row in a:
        nz = [(j, x) for j, x in enumerate(row) if x]
        out.append([sum(x * c[j] for j, x in nz) % m for c in cols])
    return out


def inverse_int(rows, p, k):
    """Gauss-Jordan over Z/p^k; the pivot must be a unit at every step."""
    m = p ** k
    n = len(rows)
    a = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] % p), None)
        if piv is None:
            raise NotAUnit("matrix is singular mod p")
        a[col], a[piv] = a[piv], a[col]
        u = pow(a[col][col], -1, m)
        a[col] = [x * u % m for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [(x - f * y) % m for x, y in zip(a[r], a[col])]
    return [r[n:] for r in a]


# ---------------------------------------------------------------------------
# Howell form and kernels


def howell_form(rows: Sequence[Sequence[int]], p: int, k: int) -> list[list[int]]:
    """Canonical row echelon form over Z/p^k with the Howell property.

    Pivots are normalised to powers of p, entries above a pivot p^v are
    reduced into [0, p^v), and for every pivot row r the row p^(k-v)*r is
    re-inserted so that the span of rows vanishing on a column prefix is
    spanned by the form's own rows with that prefix zero.
    """
    m = p ** k
    if not rows:
        return []
    ncols = len(rows[0])
    pending = [[x % m for x in r] for r in rows]
    pending = [r for r in pending if any(r)]
    result: list[list[int]] = []
    for j in range(ncols):
        best, bestv = None, k
        for idx, r in enumerate(pending):
            if r[j]:
                v = vp(r[j], p, cap=k)
                if v < bestv:
                    best, bestv = idx, v
        if best is None:
            continue
        piv = pending.pop(best)
        pv = p ** bestv
        unit = piv[j] // pv
        uinv = pow(unit, -1, m)
        piv = [x * uinv % m for x in piv]
        nxt = []
        for r in pending:
            if r[j]:
                q = r[j] // pv
                r = [(x - q * y) % m for x, y in zip(r, piv)]
            if any(r):
                nxt.append(r)
        pending = nxt
        for i, r in enumerate(result):
            if r[j] >= pv:
                q = r[j] // pv
                result[i] = [(x - q * y) % m for x, y in zip(r, piv)]
        if bestv > 0:
            extra = [x * p ** (k - bestv) % m for x in piv]
            if any(extra):
                pending.append(extra)
        result.append(piv)
    return result


def howell_kernel(M: PadicMatrix) -> list[list[PadicScalar]]:
    """Generators of the left kernel {v : vM = 0 mod p^k}, in Howell form."""
    p, k = M.prime, M.precision
    return [[PadicScalar(p, k, x) for x in v] for v in kernel_int(M.rows, p, k)]


def kernel_int(rows, p, k):
    nrows, ncols = len(rows), len(rows[0])
    aug = [list(r) + [int(i == j) for j in range(nrows)] for i, r in enumerate(rows)]
    form = howell_form(aug, p, k)
    gens = [r[ncols:] for r in form if not any(r[:ncols])]
    return howell_form(gens, p, k)


def kernel_loss(rows, p, k) -> int:
    """Digits lost by the linear map v -> vM, or ``k`` if it is not certified injective.

    The map Zp^r -> Zp^c is injective iff its elementary divisors are nonzero;
    at precision this holds iff every kernel vector mod p^k is divisible by p.
    The returned number is the largest elementary-divisor valuation.
    """
    gens = kernel_int(rows, p, k)
    if not gens:
        return 0
    worst = 0
    for g in gens:
        v = min(vp(x, p, cap=k) for x in g)
        if v == 0:
            return k
        worst = max(worst, k - v)
    return worst
