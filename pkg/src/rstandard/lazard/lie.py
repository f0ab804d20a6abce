"""Zp-Lie lattices and their faithful matrix representations."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Sequence

from ..errors import NoStrategyApplies, RelationFailure, UnfaithfulRep
from ..zp import PadicMatrix, PadicScalar, bold_p_valuation, kernel_loss, vp

STRATEGIES = ("abelian", "adjoint", "nilpotent", "supplied")


class LieLattice:
    """Structure constants c[i][j][l] with [e_i, e_j] = sum_l c[i][j][l] e_l, mod p^k."""

    def __init__(self, prime: int, precision: int, rank: int, constants):
        self.prime = prime
        self.precision = precision
        self.rank = rank
        m = prime ** precision
        self.constants = tuple(tuple(tuple(int(x) % m for x in cell) for cell in row) for row in constants)
        if len(self.constants) != rank or any(len(r) != rank for r in self.constants):
            raise ValueError("structure constant table has the wrong shape")

    @property
    def modulus(self):
        return self.prime ** self.precision

    def constant(self, i, j, l) -> PadicScalar:
        return PadicScalar(self.prime, self.precision, self.constants[i][j][l])

    def bracket(self, u: Sequence[int], v: Sequence[int]) -> list[int]:
        d, m = self.rank, self.modulus
        out = [0] * d
        for i in range(d):
            if not u[i]:
                continue
            for j in range(d):
                if not v[j]:
                    continue
                s = u[i] * v[j]
                for l, c in enumerate(self.constants[i][j]):
                    if c:
                        out[l] += s * c
        return [x % m for x in out]

    def antisymmetry_failures(self):
        m = self.modulus
        bad = []
        for i in range(self.rank):
            if any(self.constants[i][i]):
                bad.append((i, i))
            for j in range(i + 1, self.rank):
                if any((a + b) % m for a, b in zip(self.constants[i][j], self.constants[j][i])):
                    bad.append((i, j))
        return bad

    def jacobi_failures(self):
        d = self.rank
        e = [[int(a == b) for b in range(d)] for a in range(d)]
        bad = []
        for i in range(d):
            for j in range(i + 1, d):
                for l in range(j + 1, d):
                    s = [0] * d
                    for a, b, c in ((i, j, l), (j, l, i), (l, i, j)):
                        t = self.bracket(self.bracket(e[a], e[b]), e[c])
                        s = [x + y for x, y in zip(s, t)]
                    if any(x % self.modulus for x in s):
                        bad.append((i, j, l))
        return bad

    def is_valid(self) -> bool:
        return not self.antisymmetry_failures() and not self.jacobi_failures()

    def is_abelian(self) -> bool:
        return not any(any(cell) for row in self.constants for cell in row)

    def is_powerful(self) -> bool:
        w = bold_p_valuation(self.prime)
        return all(vp(c, self.prime, cap=self.precision) >= w
                   for row in self.constants for cell in row for c in cell)

    def nilpotent_weights(self):
        """Weights with w(l) > w(i) + w(j) - 1 whenever c_ij^l != 0, or None.

        Weights exist iff the basis is adapted to a central series; a cycle
        in the dependency graph means no such grading (so the algebra is not
        triangular in this basis).
        """
        d = self.rank
        w = [1] * d
        for _ in range(d + 1):
            changed = False
            for i in range(d):
                for j in range(d):
                    for l, c in enumerate(self.constants[i][j]):
                        if c and w[l] < w[i] + w[j]:
                            w[l] = w[i] + w[j]
                            changed = True
            if not changed:
                return w
        return None

    def __eq__(self, other):
        return (isinstance(other, LieLattice) and self.prime == other.prime
                and self.rank == other.rank and self.constants == other.constants
                and self.precision == other.precision)

    def to_dict(self):
        nz = []
        for i in range(self.rank):
            for j in range(i + 1, self.rank):
                for l, c in enumerate(self.constants[i][j]):
                    if c:
                        nz.append([i + 1, j + 1, l + 1, c])
        return {"prime": self.prime, "precision": self.precision, "rank": self.rank, "brackets": nz}

    @classmethod
    def from_dict(cls, data):
        d = data["rank"]
        c = [[[0] * d for _ in range(d)] for _ in range(d)]
        for i, j, l, v in data.get("brackets", []):
            c[i - 1][j - 1][l - 1] = v
            c[j - 1][i - 1][l - 1] = -v
        return cls(data["prime"], data["precision"], d, c)

    def __repr__(self):
        return f"LieLattice(p={self.prime}, k={self.precision}, rank={self.rank}, {self.to_dict()['brackets']})"


# ---------------------------------------------------------------------------
# representations


@dataclass
class MatrixRep:
    lattice: LieLattice
    images: list
    strategy: str
    loss: int = 0
    weights: list | None = field(default=None, repr=False)

    @property
    def degree(self) -> int:
        return self.images[0].shape[0]

    @property
    def precision(self) -> int:
        return self.images[0].precision

    def image(self, coeffs: Sequence[int]) -> PadicMatrix:
        """sum_i coeffs[i] M_i."""
        L = self.lattice
        n = self.degree
        rows = [[0] * n for _ in range(n)]
        for c, M in zip(coeffs, self.images):
            if c:
                for r in range(n):
                    for s in range(n):
                        rows[r][s] += c * M.rows[r][s]
        return PadicMatrix(L.prime, self.precision, rows)

    def to_dict(self):
        return {"strategy": self.strategy, "degree": self.degree, "loss": self.loss,
                "precision": self.precision, "matrices": [M.tolist() for M in self.images]}


def relation_failures(L: LieLattice, mats: Sequence[PadicMatrix]):
    bad = []
    d = L.rank
    for i in range(d):
        for j in range(i + 1, d):
            lhs = mats[i].commutator(mats[j])
            rhs = PadicMatrix.zero(L.prime, lhs.precision, lhs.shape[0])
            for l, c in enumerate(L.constants[i][j]):
                if c:
                    rhs = rhs + mats[l].scale(c)
            if lhs != rhs:
                bad.append((i + 1, j + 1))
    return bad


def faithfulness_loss(L: LieLattice, mats: Sequence[PadicMatrix]) -> int:
    k = min(M.precision for M in mats)
    rows = [[x for r in M.rows for x in r] for M in mats]
    return kernel_loss(rows, L.prime, k)


def _abelian(L: LieLattice):
    if not L.is_abelian():
        return None
    d = L.rank
    return [PadicMatrix.unit(L.prime, L.precision, d, i, i) for i in range(d)]


def _adjoint(L: LieLattice):
    d = L.rank
    return [PadicMatrix(L.prime, L.precision,
                        [[L.constants[i][j][l] for j in range(d)] for l in range(d)])
            for i in range(d)]


def _nilpotent(L: LieLattice):
    """Left-regular action on U(L) modulo PBW monomials of weight > max weight."""
    w = L.nilpotent_weights()
    if w is None:
        return None, None
    d, m = L.rank, L.modulus
    cap = max(w)
    weight = lambda mono: sum(w[i] for i in mono)
    basis = [()]
    for r in range(1, cap + 1):
        basis.extend(mono for mono in combinations_with_replacement(range(d), r) if weight(mono) <= cap)
    index = {mono: n for n, mono in enumerate(basis)}

    @lru_cache(maxsize=None)
    def lmul(i, mono):
        if weight(mono) + w[i] > cap:
            return ()
        if not mono or i <= mono[0]:
            return (((i,) + mono, 1),)
        j, rest = mono[0], mono[1:]
        acc: dict = {}
        # x_i x_j rest = x_j (x_i rest) + [x_i, x_j] rest
        for m2, c2 in lmul(i, rest):
            for m3, c3 in lmul(j, m2):
                acc[m3] = acc.get(m3, 0) + c2 * c3
        for l, c in enumerate(L.constants[i][j]):
            if c:
                for m3, c3 in lmul(l, rest):
                    acc[m3] = acc.get(m3, 0) + c * c3
        return tuple((mm, c % m) for mm, c in acc.items() if c % m)

    n = len(basis)
    mats = []
    for i in range(d):
        rows = [[0] * n for _ in range(n)]
        for col, mono in enumerate(basis):
            for m3, c in lmul(i, mono):
                rows[index[m3]][col] += c
        mats.append(PadicMatrix(L.prime, L.precision, rows))
    return mats, w


def build_rep(L: LieLattice, strategy: str = "auto", supplied=None) -> MatrixRep:
    """A faithful representation of L, certified by relations and a kernel check."""
    if strategy not in STRATEGIES + ("auto",):
        raise ValueError(f"unknown strategy {strategy!r}")

    if strategy == "supplied" or (strategy == "auto" and supplied is not None):
        if supplied is None:
            raise NoStrategyApplies("strategy 'supplied' needs matrices")
        mats = [M if isinstance(M, PadicMatrix) else PadicMatrix(L.prime, L.precision, M) for M in supplied]
        if len(mats) != L.rank:
            raise RelationFailure(f"expected {L.rank} matrices, got {len(mats)}")
        if any(M.prime != L.prime for M in mats):
            raise RelationFailure("supplied matrices use a different prime")
        k = min([L.precision] + [M.precision for M in mats])
        mats = [M.truncate(k) for M in mats]
        bad = relation_failures(L, mats)
        if bad:
            raise RelationFailure(f"commutator relations fail for pairs {bad}")
        loss = faithfulness_loss(L, mats)
        if loss >= k:
            raise UnfaithfulRep("supplied representation has a nontrivial kernel")
        return MatrixRep(L, mats, "supplied", loss)

    order = ("abelian", "adjoint", "nilpotent") if strategy == "auto" else (strategy,)
    for name in order:
        weights = None
        if name == "abelian":
            mats = _abelian(L)
        elif name == "adjoint":
            mats = _adjoint(L)
        else:
            mats, weights = _nilpotent(L)
        if mats is None:
            if strategy != "auto":
                raise NoStrategyApplies(f"strategy {name!r} does not apply to this lattice")
            continue
        if relation_failures(L, mats):
            if strategy != "auto":
                raise RelationFailure(f"{name} matrices violate the bracket relations")
            continue
        loss = faithfulness_loss(L, mats)
        if loss >= L.precision:
            if strategy != "auto":
                raise UnfaithfulRep(f"{name} representation is not faithful")
            continue
        return MatrixRep(L, mats, name, loss, weights)
    raise NoStrategyApplies("no construction strategy yields a faithful representation; supply matrices")
