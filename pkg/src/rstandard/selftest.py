"""Acceptance suite; ``rstandard selftest`` and tests/test_acceptance.py both run this."""
from __future__ import annotations

import random
import time
from dataclasses import dataclass
from itertools import combinations

from .errors import IndistinguishableAtPrecision, NoStrategyApplies
from .fgl import (BUILTIN_ZP_LAWS, _law, bracket_constants_int, gcomm, ginv, gmul, heisenberg_law,
                  twisted_multiplicative_law, validate_law, zp_point)
from .lazard import LieLattice, bch, build_rep, lie_lattice_of, mat_exp, mat_log, uniform_embedding
from .series import RingDescriptor, RingElement, evaluate
from .zp import PadicMatrix, PadicScalar, bold_p


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    seconds: float
    detail: str = ""

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number}: {verdict}  {self.name} ({self.seconds:.2f}s) {self.detail}".rstrip()


def _heis_matrix(x, m):
    x1, x2, x3 = x
    return [[1, x1 % m, x3 % m], [0, 1, x2 % m], [0, 0, 1]]


def _from_matrix(M):
    return (M.rows[0][1], M.rows[1][2], M.rows[0][2])


def criterion_1(seed=0, pairs=200):
    """Heisenberg law against unitriangular matrices."""
    p, k = 3, 8
    H = heisenberg_law(p, k, D=6)
    m = p ** k
    rng = random.Random(seed)
    bad = 0
    for _ in range(pairs):
        x = [p * rng.randrange(m // p) for _ in range(3)]
        y = [p * rng.randrange(m // p) for _ in range(3)]
        P, Q = zp_point(H, x), zp_point(H, y)
        A = PadicMatrix(p, k, _heis_matrix(x, m))
        B = PadicMatrix(p, k, _heis_matrix(y, m))
        ok = (gmul(H, P, Q).ints() == _from_matrix(A @ B)
              and ginv(H, P).ints() == _from_matrix(A.inverse())
              and gcomm(H, P, Q).ints() == _from_matrix(A.inverse() @ B.inverse() @ A @ B))
        bad += not ok
    return bad == 0, f"{pairs} pairs, {bad} mismatches"


def _random_domain_matrix(rng, p, k, n):
    w = 2 if p == 2 else 1
    return PadicMatrix(p, k, [[p ** w * rng.randrange(p ** (k - w)) for _ in range(n)] for _ in range(n)])


def criterion_2(seed=0, samples=100):
    """exp/log round trip, bch closure and the 1x1 fixture."""
    rng = random.Random(seed)
    k = 8
    bad = 0
    for p in (2, 3, 5):
        for s in range(samples):
            n = 1 + s % 3
            A = _random_domain_matrix(rng, p, k, n)
            B = _random_domain_matrix(rng, p, k, n)
            if mat_log(mat_exp(A)) != A:
                bad += 1
            if mat_exp(A) @ mat_exp(B) != mat_exp(bch(A, B)):
                bad += 1
    fixture = (mat_exp(PadicMatrix(3, 3, [[3]])).rows == ((13,),)
               and mat_log(PadicMatrix(3, 3, [[13]])).rows == ((3,),))
    return bad == 0 and fixture, f"{3 * samples} samples per identity, {bad} failures, fixture {'ok' if fixture else 'wrong'}"


def criterion_3():
    """Lazard constants versus p^N times the quadratic-part bracket."""
    p, k, N = 3, 6, 1
    notes = []
    ok = True
    for name in ("additive", "multiplicative", "heisenberg"):
        law = BUILTIN_ZP_LAWS[name](p=p, k=k, N=N)
        L, _ = lie_lattice_of(law)
        quad = bracket_constants_int(law)
        m = p ** (k - 2)
        d = law.dim
        agree = all((L.constants[i][j][l] - p ** N * quad[i][j][l]) % m == 0
                    for i in range(d) for j in range(d) for l in range(d))
        ok &= agree and L.is_powerful()
        if name != "heisenberg":
            ok &= L.is_abelian()
        else:
            exact = L.constants[0][1][2] == 3 and L.to_dict()["brackets"] == [[1, 2, 3, 3]]
            ok &= exact
        notes.append(f"{name}:{'ok' if agree else 'mismatch'}")
    return ok, ", ".join(notes)


def criterion_4(seed=0, pairs=100, timings=None):
    """The embedding for every built-in Zp-law."""
    p, k = 3, 6
    ok = True
    notes = []
    for name, ctor in sorted(BUILTIN_ZP_LAWS.items()):
        t0 = time.perf_counter()
        law = ctor(p=p, k=k)
        L, basis = lie_lattice_of(law)
        rep = build_rep(L)
        emb, cert = uniform_embedding(law, rep, basis, pairs=pairs, seed=seed)
        dt = time.perf_counter() - t0
        if timings is not None:
            timings[name] = dt
        good = (cert.valid and cert.pairs_checked >= 100 and cert.transversal_separated
                and cert.degree == bold_p(p) ** law.dim * rep.degree
                and cert.degree <= p ** (law.level * law.dim) * bold_p(p) ** law.dim * rep.degree
                and emb.index == bold_p(p) ** law.dim and dt < 60)
        ok &= good
        notes.append(f"{name}: n={cert.degree} l={rep.degree} {dt:.1f}s")
    return ok, "; ".join(notes)


def criterion_5(seed=0):
    """End-to-end discrimination for X + Y + tXY and the separator fixture."""
    from .discriminate import discriminate_pipeline, find_evaluation_point
    F = twisted_multiplicative_law(3, 6)
    d = F.descriptor
    t = RingElement.t(d)
    three = RingElement.constant(d, 3)
    S = [F.point([x]) for x in (three, t, three + t, three * t)]
    cert = discriminate_pipeline(F, S, seed=seed)
    distinct = all(a != b for a, b in combinations(cert.images, 2))
    sound = cert.search.valuation < 6 and cert.search.valuation < cert.search.guarantee
    ok = cert.valid and distinct and sound and not cert.checks["multiplicativity_failures"]
    d3 = RingDescriptor(3, 3, 1, 6)
    t3 = RingElement.t(d3)
    res = find_evaluation_point(t3 * (RingElement.constant(d3, 3) - t3), 4)
    fixture = res.point[0].residue == 6 and res.value.residue == 9
    return ok and fixture, (f"a={cert.search.point[0].residue}, v(r(a))={cert.search.valuation}, "
                            f"n={cert.degree}; fixture a={res.point[0].residue} r(a)={res.value.residue}")


def criterion_6():
    """Truncated geometric series at t = 3 is -1/2 mod 27."""
    d = RingDescriptor(3, 3, 1, 6)
    geo = RingElement(d, {(i,): 1 for i in range(7)})
    value, g = evaluate(geo, [PadicScalar(3, 3, 3)])
    ok = value.residue == 13 and g == 3 and (2 * value.residue + 1) % 27 == 0
    return ok, f"value {value.residue} mod 27, guarantee {g}"


def criterion_7(seed=0):
    """Existential transfer of non-commutation through a certificate."""
    from .discriminate import discriminate_pipeline
    from .sentences import SOUND, check_transfer
    H = heisenberg_law(3, 6)
    e1, e2 = zp_point(H, [3, 0, 0]), zp_point(H, [0, 3, 0])
    cert = discriminate_pipeline(H, [e1, e2], seed=seed)
    rep = check_transfer("E x y : [x,y] != 1", {"x": e1, "y": e2}, cert)
    marks = all(a.group_marking == SOUND and a.image_marking == SOUND for a in rep.atoms)
    neg = check_transfer("E x y : [x,y] != 1", {"x": e1, "y": zp_point(H, [6, 0, 0])}, cert)
    ok = rep.passed and marks and not neg.holds_in_group
    return ok, f"witness: {rep.verdict}; commuting witness: {neg.verdict}"


def _sl2_plus_center(k=4):
    c = [[[0] * 4 for _ in range(4)] for _ in range(4)]

    def put(i, j, l, v):
        c[i][j][l] = v
        c[j][i][l] = -v

    put(0, 1, 1, 2)
    put(0, 2, 2, -2)
    put(1, 2, 0, 1)
    return LieLattice(3, k, 4, c)


def criterion_8():
    """Negative controls."""
    from .discriminate import discriminate_pipeline
    bad = _law(3, 3, 1, 6, 0, 1, [{(1, 0): 1, (0, 1): 1, (2, 0): 1}], "mutated")
    rep = validate_law(bad)
    witness = not rep.passed and any(c.witness == "X^2" for c in rep.failures())
    F = twisted_multiplicative_law(3, 6)
    P = F.point([RingElement.t(F.descriptor)])
    try:
        discriminate_pipeline(F, [P, P])
        dup = False
    except IndistinguishableAtPrecision:
        dup = True
    try:
        build_rep(_sl2_plus_center())
        nostrat = False
    except NoStrategyApplies:
        nostrat = True
    return witness and dup and nostrat, f"witness X^2: {witness}, duplicate: {dup}, no strategy: {nostrat}"


CRITERIA = [
    (1, "Heisenberg oracle equivalence", criterion_1, 10.0),
    (2, "exp/log suite", criterion_2, None),
    (3, "Lazard consistency", criterion_3, None),
    (4, "linearity pipeline", criterion_4, None),
    (5, "discrimination end-to-end", criterion_5, None),
    (6, "evaluation fixture", criterion_6, None),
    (7, "existential transfer", criterion_7, None),
    (8, "negative controls", criterion_8, None),
]


def run_criterion(number: int) -> CriterionResult:
    for n, name, fn, limit in CRITERIA:
        if n == number:
            t0 = time.perf_counter()
            try:
                ok, detail = fn()
            except Exception as exc:  # a crash is a failure, reported as such
                ok, detail = False, f"raised {type(exc).__name__}: {exc}"
            dt = time.perf_counter() - t0
            if limit is not None and dt >= limit:
                ok, detail = False, f"{detail}; exceeded {limit:.0f}s"
            return CriterionResult(n, name, ok, dt, detail)
    raise ValueError(f"no criterion {number}")


def run_all(report=None) -> list[CriterionResult]:
    results = []
    t0 = time.perf_counter()
    for n, *_ in CRITERIA:
        r = run_criterion(n)
        results.append(r)
        if report:
            report(r.line())
    total = time.perf_counter() - t0
    ok = all(r.passed for r in results) and total < 300
    final = CriterionResult(9, "full selftest under 5 minutes", ok, total,
                            f"{sum(r.passed for r in results)}/8 passed")
    results.append(final)
    if report:
        report(final.line())
    return results
