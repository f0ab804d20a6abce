"""Separating finitely many points of a law over Zp[[t]] by a linear group.

Pipeline: pick a separator r whose nonvanishing at a point a certifies that
evaluation t -> a keeps the given points apart, find such an a, specialize
the law to Zp, embed the specialized group in GL_n(Zp), and record
everything needed to re-check the result in a certificate.
"""
from __future__ import annotations

import random
from contextlib import contextmanager
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import NamedTuple, Sequence

from .errors import (IndistinguishableAtPrecision, InvalidLaw, PrecisionExhausted, RStandardError,
                     SpecializedLawInvalid)
from .fgl import FormalGroupLaw, StandardPoint, gmul, validate_law, zp_point
from .lazard import (BlockMonomial, build_rep, coset_transversal, faithfulness_loss, lie_lattice_of,
                     relation_failures, uniform_embedding)
from .lazard.induced import UniformEmbedding
from .lazard.lie import LieLattice, MatrixRep
from .series import MultiSeries, RingDescriptor, RingElement, evaluate
from .zp import PadicMatrix, PadicScalar, vp


@contextmanager
def stage(name: str):
    try:
        yield
    except RStandardError as exc:
        if exc.stage is None:
            exc.stage = name
        raise


# ---------------------------------------------------------------------------
# separators


def dominant_constant(x: RingElement) -> bool:
    """True if x(a) != 0 for every a in (pZp)^m, read off the constant term.

    t^alpha contributes valuation >= |alpha| at such a, and the unknown tail
    beyond the cutoff contributes >= D + 1.
    """
    d = x.descriptor
    k = d.precision
    zero = (0,) * d.param_vars
    c0 = x.terms.get(zero, 0)
    if not c0:
        return False
    v0 = vp(c0, d.prime, cap=k)
    rest = [vp(c, d.prime, cap=k) + sum(key) for key, c in x.terms.items() if key != zero]
    bound = min(rest + [d.degree_cutoff + 1, k])
    return v0 < bound


def pairwise_separator(elements: Sequence[RingElement], skip_separated: bool = False) -> RingElement:
    """Product of r_i - r_j over unordered pairs.

    With ``skip_separated`` a factor is omitted when the difference stays
    nonzero under every evaluation anyway.
    """
    if not elements:
        raise ValueError("need at least one element")
    for (i, a), (j, b) in combinations(enumerate(elements), 2):
        if a == b:
            raise IndistinguishableAtPrecision(
                f"elements {i} and {j} agree at precision: {a.format()}")
    r = RingElement.one(elements[0].descriptor)
    for a, b in combinations(elements, 2):
        diff = a - b
        if skip_separated and dominant_constant(diff):
            continue
        r = r * diff
    return r


class SearchResult(NamedTuple):
    point: tuple
    value: PadicScalar
    guarantee: int
    tried: int

    @property
    def valuation(self) -> int:
        return self.value.valuation


def find_evaluation_point(r: RingElement, budget: int = 4) -> SearchResult:
    """First a = p*c, c in {0..B-1}^m (lexicographic), with r(a) provably nonzero."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    d = r.descriptor
    p, m = d.prime, d.param_vars
    tried = 0
    for c in product(range(budget), repeat=m):
        tried += 1
        a = tuple(PadicScalar(p, d.precision, p * ci) for ci in c)
        value, guarantee = evaluate(r, a)
        if value.truncate(guarantee).valuation < guarantee:
            return SearchResult(a, value.truncate(guarantee), guarantee, tried)
    raise PrecisionExhausted(
        f"no evaluation point in (p*{{0..{budget - 1}}})^{m} certifies r != 0; raise the budget, precision or cutoff")


# ---------------------------------------------------------------------------
# specialization


def specialize(law: FormalGroupLaw, a: Sequence) -> FormalGroupLaw:
    """Evaluate every coefficient of the law at t = a; the result is a law over Zp."""
    d = law.descriptor
    n = 2 * law.dim
    k = d.precision
    a = tuple(x if isinstance(x, PadicScalar) else PadicScalar(d.prime, k, x) for x in a)
    if len(a) != d.param_vars:
        raise ValueError(f"need {d.param_vars} evaluation coordinates")
    if d.param_vars == 0:
        return law
    evaluated = []
    for f in law.components:
        comp = {}
        for xexp in f.x_monomials():
            val, g = evaluate(f.coefficient_ring(xexp), a)
            k = min(k, g)
            comp[tuple(xexp)] = val.residue
        evaluated.append(comp)
    desc = RingDescriptor(d.prime, k, 0, d.degree_cutoff)
    comps = [MultiSeries(desc, n, terms) for terms in evaluated]
    name = f"{law.name}@t={','.join(str(x.residue) for x in a)}"
    spec = FormalGroupLaw(desc, law.dim, law.level, comps, name)
    report = validate_law(spec)
    if not report.passed:
        raise SpecializedLawInvalid(
            f"specialized law fails {report.failures()[0].name} at precision {k}; raise precision")
    return spec


def specialize_point(law: FormalGroupLaw, spec: FormalGroupLaw, P: StandardPoint, a) -> StandardPoint:
    if law.descriptor.param_vars == 0:
        return zp_point(spec, P.ints(), min(P.precision, spec.precision))
    vals, k = [], spec.precision
    for c in P.coordinates:
        v, g = evaluate(c, a)
        vals.append(v.residue)
        k = min(k, g, c.descriptor.precision)
    return zp_point(spec, vals, k)


def _random_point(law: FormalGroupLaw, rng: random.Random, tdeg: int = 2) -> StandardPoint:
    d = law.descriptor
    p, N, m = d.prime, law.level, d.param_vars
    coords = []
    for _ in range(law.dim):
        terms = {(0,) * m: p ** N * rng.randrange(p ** (d.precision - N))}
        for e in product(range(tdeg + 1), repeat=m):
            s = sum(e)
            if 1 <= s <= tdeg:
                need = max(0, N - s)
                terms[e] = p ** need * rng.randrange(p ** (d.precision - need))
        coords.append(RingElement(d, terms))
    return law.point(coords)


# ---------------------------------------------------------------------------
# certificate


@dataclass
class DiscriminationCertificate:
    law: FormalGroupLaw
    points: list
    coordinates: list
    factors: list
    separator: RingElement
    search: SearchResult | None
    specialized: FormalGroupLaw
    specialized_points: list
    lattice: LieLattice
    rep: MatrixRep
    embedding: UniformEmbedding
    images: list
    checks: dict = field(default_factory=dict)
    seed: int = 0

    @property
    def evaluation_point(self):
        if self.search:
            return self.search.point
        d = self.law.descriptor
        return tuple(PadicScalar(d.prime, d.precision, 0) for _ in range(d.param_vars))

    @property
    def degree(self) -> int:
        return self.embedding.degree

    @property
    def valid(self) -> bool:
        c = self.checks
        return bool(c.get("pairwise_distinct") and not c.get("multiplicativity_failures")
                    and not c.get("projection_failures") and c.get("separator_certified")
                    and c.get("embedding", {}).get("valid", False))

    def project(self, P: StandardPoint) -> StandardPoint:
        return specialize_point(self.law, self.specialized, P, self.evaluation_point)

    def image(self, P: StandardPoint) -> BlockMonomial:
        """Image of a point of the domain law under embedding o projection."""
        return self.embedding.image(self.project(P))

    def to_dict(self):
        from .serialize import law_to_json, point_to_json, ring_to_json
        s = self.search
        return {
            "kind": "discrimination-certificate",
            "law": law_to_json(self.law),
            "points": [point_to_json(P) for P in self.points],
            "coordinates": [ring_to_json(x) for x in self.coordinates],
            "separator": {"factors": [list(f) for f in self.factors],
                          "r": ring_to_json(self.separator)},
            "evaluation_point": [x.residue for x in self.evaluation_point],
            "evaluation": None if s is None else {
                "value": s.value.residue, "valuation": s.valuation,
                "guarantee": s.guarantee, "candidates_tried": s.tried},
            "specialized_law": law_to_json(self.specialized),
            "specialized_points": [list(P.ints()) for P in self.specialized_points],
            "lattice": self.lattice.to_dict(),
            "representation": self.rep.to_dict(),
            "transversal": [list(t) for t in self.embedding._t],
            "embedding": {"degree": self.embedding.degree, "block_size": self.embedding.block_size,
                          "index": self.embedding.index, "degree_bound": self.embedding.degree_bound,
                          "precision": self.embedding.precision},
            "images": [im.to_dict() for im in self.images],
            "checks": self.checks,
            "seed": self.seed,
            "valid": self.valid,
        }

    @classmethod
    def from_dict(cls, data) -> "DiscriminationCertificate":
        """Rebuild from JSON without repeating any search."""
        from .serialize import law_from_json, point_from_json, ring_from_json
        law = law_from_json(data["law"])
        spec = law_from_json(data["specialized_law"])
        d = law.descriptor
        points = [point_from_json(law, P) for P in data["points"]]
        coords = [ring_from_json(x, d) for x in data["coordinates"]]
        sep = ring_from_json(data["separator"]["r"], d)
        ev = data.get("evaluation")
        search = None
        if ev is not None:
            a = tuple(PadicScalar(d.prime, d.precision, x) for x in data["evaluation_point"])
            search = SearchResult(a, PadicScalar(d.prime, ev["guarantee"], ev["value"]),
                                  ev["guarantee"], ev.get("candidates_tried", 0))
        lattice = LieLattice.from_dict(data["lattice"])
        r = data["representation"]
        mats = [PadicMatrix(d.prime, r["precision"], M) for M in r["matrices"]]
        rep = MatrixRep(lattice, mats, r["strategy"], r.get("loss", 0))
        transversal = [zp_point(spec, t) for t in data["transversal"]]
        emb = UniformEmbedding(spec, rep, transversal=transversal)
        images = [BlockMonomial.from_dict(im) for im in data["images"]]
        spts = [zp_point(spec, P) for P in data["specialized_points"]]
        return cls(law, points, coords, [tuple(f) for f in data["separator"]["factors"]], sep, search,
                   spec, spts, lattice, rep, emb, images, data.get("checks", {}), data.get("seed", 0))


def _separation_factors(points, coords_index):
    """For each pair of points, one differing coordinate pair; dominant ones need no factor."""
    factors = set()
    for P, Q in combinations(points, 2):
        diffs = [(i, a, b) for i, (a, b) in enumerate(zip(P.coordinates, Q.coordinates)) if a != b]
        if any(dominant_constant(a - b) for _, a, b in diffs):
            continue
        _, a, b = diffs[0]
        i, j = sorted((coords_index(a), coords_index(b)))
        factors.add((i, j))
    return sorted(factors)


def discriminate_pipeline(law: FormalGroupLaw, points: Sequence[StandardPoint], budget: int = 4,
                          strategy: str = "auto", supplied=None, seed: int = 0,
                          projection_pairs: int = 50, embedding_pairs: int = 100,
                          skip_separated: bool = True) -> DiscriminationCertificate:
    points = list(points)
    if not points:
        raise ValueError("need at least one point")
    with stage("validate"):
        report = validate_law(law)
        if not report.passed:
            f = report.failures()[0]
            raise InvalidLaw(f"law fails {f.name} (witness {f.witness})")
    d = law.descriptor

    with stage("separate"):
        for (i, P), (j, Q) in combinations(enumerate(points), 2):
            if P == Q:
                raise IndistinguishableAtPrecision(f"points {i} and {j} agree at precision: {P.format()}")
        coords: list[RingElement] = []

        def index(x):
            for n, y in enumerate(coords):
                if x == y:
                    return n
            coords.append(x)
            return len(coords) - 1

        for P in points:
            for c in P.coordinates:
                index(c)
        if skip_separated:
            factors = _separation_factors(points, index)
        else:
            factors = list(combinations(range(len(coords)), 2))
        r = RingElement.one(d)
        for i, j in factors:
            r = r * (coords[i] - coords[j])

    search = None
    with stage("search"):
        if len(points) > 1:
            search = find_evaluation_point(r, budget)
        a = search.point if search else tuple(PadicScalar(d.prime, d.precision, 0) for _ in range(d.param_vars))

    with stage("specialize"):
        spec = specialize(law, a)
        spts = [specialize_point(law, spec, P, a) for P in points]
        for (i, P), (j, Q) in combinations(enumerate(spts), 2):
            if P == Q:
                raise IndistinguishableAtPrecision(f"projected points {i} and {j} coincide")

    with stage("lattice"):
        lattice, basis = lie_lattice_of(spec)
    with stage("represent"):
        rep = build_rep(lattice, strategy, supplied)
    with stage("embed"):
        emb, hom = uniform_embedding(spec, rep, basis, pairs=embedding_pairs, seed=seed)

    with stage("images"):
        images = [emb.image(P) for P in spts]
        distinct = all(images[i] != images[j] for i, j in combinations(range(len(images)), 2))
        mult_fail = []
        for i, j in combinations(range(len(points)), 2):
            if emb.image(gmul(spec, spts[i], spts[j])) != images[i] @ images[j]:
                mult_fail.append([i, j])
        rng = random.Random(seed)
        pairs = list(combinations(points, 2)) + [
            (_random_point(law, rng), _random_point(law, rng)) for _ in range(projection_pairs)]
        proj_fail = []
        for n, (P, Q) in enumerate(pairs):
            lhs = specialize_point(law, spec, gmul(law, P, Q), a)
            rhs = gmul(spec, specialize_point(law, spec, P, a), specialize_point(law, spec, Q, a))
            k = min(lhs.precision, rhs.precision)
            if any((x - y) % d.prime ** k for x, y in zip(lhs.ints(), rhs.ints())):
                proj_fail.append(n)

    checks = {
        "separator_certified": search is None or search.valuation < search.guarantee,
        "pairwise_distinct": distinct,
        "multiplicativity_pairs": len(points) * (len(points) - 1) // 2,
        "multiplicativity_failures": mult_fail,
        "projection_pairs": len(pairs),
        "projection_failures": proj_fail,
        "embedding": hom.to_dict(),
    }
    return DiscriminationCertificate(law, points, coords, factors, r, search, spec, spts, lattice, rep,
                                     emb, images, checks, seed)


# ---------------------------------------------------------------------------
# re-verification


@dataclass
class VerificationReport:
    checks: list

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks)

    def to_dict(self):
        return {"passed": self.passed, "checks": [{"check": n, "passed": ok} for n, ok in self.checks]}


def verify_certificate(data) -> VerificationReport:
    """Re-check a certificate from its JSON form; nothing is searched for."""
    cert = DiscriminationCertificate.from_dict(data)
    out = []
    law, spec = cert.law, cert.specialized
    out.append(("law validates", validate_law(law).passed))
    pts = cert.points
    out.append(("points distinct", all(P != Q for P, Q in combinations(pts, 2))))
    r = RingElement.one(law.descriptor)
    for i, j in cert.factors:
        r = r * (cert.coordinates[i] - cert.coordinates[j])
    out.append(("separator recomputes", r == cert.separator))
    if cert.search is not None:
        value, g = evaluate(r, cert.search.point)
        out.append(("separator nonzero at a", value.truncate(g).valuation < g))
    else:
        out.append(("separator nonzero at a", len(pts) <= 1))
    # every pair of points must be covered by a factor or by a dominant difference
    covered = True
    idx = {n: x for n, x in enumerate(cert.coordinates)}
    fset = set(map(tuple, cert.factors))
    for P, Q in combinations(pts, 2):
        ok = False
        for a, b in zip(P.coordinates, Q.coordinates):
            if a == b:
                continue
            if dominant_constant(a - b):
                ok = True
                break
            ia = next((n for n, x in idx.items() if x == a), None)
            ib = next((n for n, x in idx.items() if x == b), None)
            if ia is not None and ib is not None and tuple(sorted((ia, ib))) in fset:
                ok = True
                break
        covered = covered and ok
    out.append(("separator covers every pair", covered))
    try:
        respec = specialize(law, cert.evaluation_point)
        from .serialize import law_to_json
        out.append(("specialization recomputes", law_to_json(respec)["components"]
                    == law_to_json(spec)["components"]))
    except RStandardError:
        out.append(("specialization recomputes", False))
    spts = [cert.project(P) for P in pts]
    out.append(("projected points recompute", spts == cert.specialized_points))
    mats = cert.rep.images
    out.append(("representation relations", not relation_failures(cert.lattice, mats)))
    out.append(("representation faithful", faithfulness_loss(cert.lattice, mats) < cert.rep.precision))
    lattice, _ = lie_lattice_of(spec)
    out.append(("lattice recomputes", lattice.to_dict()["brackets"] == cert.lattice.to_dict()["brackets"]))
    try:
        canonical = [t.ints() for t in coset_transversal(spec)]
        out.append(("transversal verified", canonical == list(cert.embedding._t)))
    except RStandardError:
        out.append(("transversal verified", False))
    images = [cert.embedding.image(P) for P in spts]
    out.append(("images recompute", images == cert.images))
    out.append(("images pairwise distinct", all(a != b for a, b in combinations(images, 2))))
    mult = all(cert.embedding.image(gmul(spec, spts[i], spts[j])) == images[i] @ images[j]
               for i, j in combinations(range(len(spts)), 2))
    out.append(("multiplicativity on pairs from S", mult))
    return VerificationReport(out)
