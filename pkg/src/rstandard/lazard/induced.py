"""The embedding G -> GL_n(Zp) obtained by inducing exp of a Lie representation.

H = G^bold-p is a uniform open normal subgroup; exp(rho(log h)) is a
faithful homomorphism on H, and inducing it up to G over a transversal
gives a faithful representation of G of degree [G:H] * l.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

from ..errors import NotAPower, TransversalVerificationFailed, InvalidPoint
from ..fgl import FormalGroupLaw, StandardPoint, _from_ints
from ..zp import PadicMatrix, bold_p, bold_p_valuation, matmul_int
from .lie import MatrixRep
from .limits import (PowerTable, lazard_combination_int, lie_coordinates_int,
                     root_int, second_kind_int, standard_basis)
from .matexp import ScaledExp, mat_exp


class BlockMonomial:
    """Block permutation matrix: column block i is blocks[i] placed in row block perm[i]."""

    __slots__ = ("prime", "precision", "perm", "blocks")

    def __init__(self, prime, precision, perm, blocks):
        self.prime = prime
        self.precision = precision
        self.perm = tuple(perm)
        m = prime ** precision
        self.blocks = tuple(tuple(tuple(x % m for x in r) for r in b) for b in blocks)

    @property
    def nblocks(self):
        return len(self.perm)

    @property
    def block_size(self):
        return len(self.blocks[0])

    @property
    def degree(self):
        return self.nblocks * self.block_size

    def __matmul__(self, other: "BlockMonomial") -> "BlockMonomial":
        # (A B) e_i = A (B_i e_{perm_B(i)}) = A_{perm_B(i)} B_i e_{perm_A(perm_B(i))}
        m = self.prime ** min(self.precision, other.precision)
        perm, blocks = [], []
        for i in range(other.nblocks):
            j = other.perm[i]
            perm.append(self.perm[j])
            blocks.append(matmul_int(self.blocks[j], other.blocks[i], m))
        return BlockMonomial(self.prime, min(self.precision, other.precision), perm, blocks)

    __mul__ = __matmul__

    def inverse(self) -> "BlockMonomial":
        inv = [0] * self.nblocks
        blocks = [None] * self.nblocks
        for i, j in enumerate(self.perm):
            inv[j] = i
            blocks[j] = PadicMatrix(self.prime, self.precision, self.blocks[i]).inverse().rows
        return BlockMonomial(self.prime, self.precision, inv, blocks)

    def is_identity(self) -> bool:
        n = self.block_size
        return all(j == i for i, j in enumerate(self.perm)) and all(
            b[r][c] == int(r == c) for b in self.blocks for r in range(n) for c in range(n))

    def __eq__(self, other):
        if not isinstance(other, BlockMonomial):
            return NotImplemented
        k = min(self.precision, other.precision)
        if self.perm != other.perm:
            return False
        m = self.prime ** k
        return all(x % m == y % m for a, b in zip(self.blocks, other.blocks)
                   for ra, rb in zip(a, b) for x, y in zip(ra, rb))

    def __hash__(self):
        return hash((self.perm, self.blocks))

    def to_matrix(self) -> PadicMatrix:
        n, l = self.degree, self.block_size
        rows = [[0] * n for _ in range(n)]
        for i, j in enumerate(self.perm):
            b = self.blocks[i]
            for r in range(l):
                for c in range(l):
                    rows[j * l + r][i * l + c] = b[r][c]
        return PadicMatrix(self.prime, self.precision, rows)

    def to_dict(self):
        return {"perm": list(self.perm), "blocks": [[list(r) for r in b] for b in self.blocks],
                "prime": self.prime, "precision": self.precision}

    @classmethod
    def from_dict(cls, data):
        return cls(data["prime"], data["precision"], data["perm"], data["blocks"])


def coset_transversal(law: FormalGroupLaw, basis: Sequence[StandardPoint] | None = None):
    """Representatives of G / G^bold-p, verified pairwise by failed root extraction."""
    basis = basis or standard_basis(law)
    p, k = law.prime, law.precision
    e = bold_p_valuation(p)
    if k < law.level + e + 1:
        raise TransversalVerificationFailed("precision too small to separate cosets")
    eng = law.engine
    bints = [b.ints() for b in basis]
    reps = [lazard_combination_int(law, list(v), bints, k) for v in product(range(bold_p(p)), repeat=law.dim)]
    for a in range(len(reps)):
        ia = eng.inv(reps[a], k)
        for b in range(a + 1, len(reps)):
            try:
                root_int(eng, eng.mul(ia, reps[b], k), e, k)
            except NotAPower:
                continue
            raise TransversalVerificationFailed(f"representatives {a} and {b} lie in the same coset")
    return [_from_ints(law, r, k) for r in reps]


def random_point(law: FormalGroupLaw, rng: random.Random, precision: int | None = None):
    k = precision or law.precision
    p, N = law.prime, law.level
    return tuple(p ** N * rng.randrange(p ** (k - N)) for _ in range(law.dim))


class UniformEmbedding:
    """g -> block-monomial matrix of degree bold-p^d * l over Z/p^(k-N)."""

    def __init__(self, law: FormalGroupLaw, rep: MatrixRep, basis=None, transversal=None):
        self.law = law
        self.rep = rep
        p, N, k = law.prime, law.level, law.precision
        self.k = k
        self.bold = bold_p(p)
        self.basis = list(basis or standard_basis(law))
        self.transversal = list(transversal or coset_transversal(law, self.basis))
        self.precision = min(k - N, rep.precision)
        eng = law.engine
        self.eng = eng
        self._t = [t.ints() for t in self.transversal]
        self._tinv = [eng.inv(t, k) for t in self._t]
        self._index = {}
        for i, t in enumerate(self._t):
            c = self.coset_class(t)
            if c in self._index:
                raise TransversalVerificationFailed("two representatives share a coset class")
            self._index[c] = i
        if len(self._index) != self.bold ** law.dim:
            raise TransversalVerificationFailed("transversal does not cover G / G^bold-p")
        self.table = PowerTable(law, [b.ints() for b in self.basis], k)
        reps = [M.truncate(self.precision) for M in rep.images]
        self.exps = [ScaledExp(M) for M in reps]

    @property
    def block_size(self):
        return self.rep.degree

    @property
    def index(self):
        return len(self._t)

    @property
    def degree(self):
        return self.index * self.block_size

    @property
    def degree_bound(self):
        p, N, d = self.law.prime, self.law.level, self.law.dim
        return p ** (N * d) * self.bold ** d * self.block_size

    def coset_class(self, x):
        pN = self.law.prime ** self.law.level
        return tuple((a % self.law.prime ** self.k) // pN % self.bold for a in x)

    def _ints(self, g):
        x = g.ints() if isinstance(g, StandardPoint) else tuple(g)
        pN = self.law.prime ** self.law.level
        M = self.law.prime ** self.k
        x = tuple(a % M for a in x)
        if any(a % pN for a in x):
            raise InvalidPoint("point is not in the standard group of this level")
        return x

    def m1(self, h):
        """exp(rho(log h)) for h in H, via h = e_1^mu_1 ... e_d^mu_d."""
        mu = second_kind_int(self.table, h)
        mod = self.law.prime ** self.precision
        acc = None
        for E, c in zip(self.exps, mu):
            if c % mod == 0:
                continue
            f = E(c)
            acc = f if acc is None else matmul_int(acc, f, mod)
        if acc is None:
            l = self.block_size
            acc = [[int(r == s) for s in range(l)] for r in range(l)]
        return acc

    def m1_first_kind(self, h) -> PadicMatrix:
        """The same block computed as exp(sum lambda_i M_i); used as a cross-check."""
        lam = lie_coordinates_int(self.law, h, [b.ints() for b in self.basis], self.k)
        return mat_exp(self.rep.image(lam).truncate(self.precision))

    def image(self, g) -> BlockMonomial:
        x = self._ints(g)
        eng, k = self.eng, self.k
        perm, blocks = [], []
        for t in self._t:
            y = eng.mul(x, t, k)
            j = self._index[self.coset_class(y)]
            h = eng.mul(self._tinv[j], y, k)
            perm.append(j)
            blocks.append(self.m1(h))
        return BlockMonomial(self.law.prime, self.precision, perm, blocks)

    def matrix(self, g) -> PadicMatrix:
        return self.image(g).to_matrix()


@dataclass
class GroupHomCertificate:
    law_name: str
    prime: int
    precision: int
    degree: int
    block_size: int
    index: int
    degree_bound: int
    strategy: str
    transversal_verified: bool
    pairs_checked: int
    multiplicative_failures: list = field(default_factory=list)
    points_checked: int = 0
    injective: bool = True
    first_kind_agreement: bool = True
    transversal_separated: bool = True
    seed: int = 0

    @property
    def valid(self) -> bool:
        return (self.transversal_verified and not self.multiplicative_failures and self.injective
                and self.first_kind_agreement and self.transversal_separated
                and self.degree <= self.degree_bound)

    def to_dict(self):
        return {"law": self.law_name, "prime": self.prime, "precision": self.precision,
                "degree": self.degree, "block_size": self.block_size, "index": self.index,
                "degree_bound": self.degree_bound, "strategy": self.strategy,
                "transversal_verified": self.transversal_verified,
                "pairs_checked": self.pairs_checked,
                "multiplicative_failures": self.multiplicative_failures,
                "points_checked": self.points_checked, "injective": self.injective,
                "first_kind_agreement": self.first_kind_agreement,
                "transversal_separated": self.transversal_separated, "seed": self.seed,
                "valid": self.valid}


def uniform_embedding(law: FormalGroupLaw, rep: MatrixRep, basis=None, transversal=None,
                      pairs: int = 100, seed: int = 0, cross_checks: int = 2, samples=()):
    """Build the embedding and certify it on random pairs, the transversal and ``samples``.

    Returns (embedding, certificate).
    """
    emb = UniformEmbedding(law, rep, basis, transversal)
    rng = random.Random(seed)
    k = law.precision
    eng = law.engine
    failures = []
    seen = {}
    injective = True
    for n in range(pairs):
        x, y = random_point(law, rng), random_point(law, rng)
        ix, iy = emb.image(x), emb.image(y)
        if emb.image(eng.mul(x, y, k)) != ix @ iy:
            failures.append(n)
        for pt, im in ((x, ix), (y, iy)):
            pt = tuple(a % law.prime ** k for a in pt)
            if seen.setdefault((im.perm, im.blocks), pt) != pt:
                injective = False
    M = law.prime ** k
    for pt in list(samples) + list(emb.transversal):
        pt = tuple(a % M for a in emb._ints(pt))
        im = emb.image(pt)
        other = seen.setdefault((im.perm, im.blocks), pt)
        if other != pt:
            injective = False
    t_images = {(im.perm, im.blocks) for im in map(emb.image, emb._t)}
    separated = len(t_images) == emb.index
    agree = True
    H = [tuple(bold_p(law.prime) * a for a in random_point(law, rng)) for _ in range(cross_checks)]
    for h in H:
        h = eng.reduce(h, k)
        if PadicMatrix(law.prime, emb.precision, emb.m1(h)) != emb.m1_first_kind(h):
            agree = False
    cert = GroupHomCertificate(
        law_name=law.name, prime=law.prime, precision=emb.precision, degree=emb.degree,
        block_size=emb.block_size, index=emb.index, degree_bound=emb.degree_bound,
        strategy=rep.strategy, transversal_verified=True, pairs_checked=pairs,
        multiplicative_failures=failures, points_checked=len(seen), injective=injective,
        first_kind_agreement=agree, transversal_separated=separated, seed=seed)
    return emb, cert
