import random

import pytest
from hypothesis import given, settings, strategies as st

from rstandard.discriminate import specialize
from rstandard.errors import NoStrategyApplies, NotAPower, RelationFailure, UnfaithfulRep
from rstandard.fgl import (additive_law, bracket_constants_int, gmul, gpow, heisenberg_law, multiplicative_law,
                           twisted_multiplicative_law, zp_point)
from rstandard.lazard import (LieLattice, build_rep, faithfulness_loss, lazard_add, lazard_bracket,
                              lazard_combination, lie_coordinates, lie_lattice_of, p_root,
                              relation_failures, standard_basis)
from rstandard.zp import PadicMatrix, PadicScalar

from oracles import heis_lazard_coords


def test_gpow_examples():
    F = multiplicative_law(3, 3)
    three = zp_point(F, [3])
    assert gpow(F, three, 2).ints() == (15,)
    assert gpow(F, three, 3).ints() == (((1 + 3) ** 3 - 1) % 27,) == (9,)
    assert gpow(F, three, 0).is_identity()


def test_p_root_examples():
    A = additive_law(3, 4)
    assert p_root(A, zp_point(A, [9])).ints()[0] % 27 == 3
    F = multiplicative_law(3, 3)
    r = p_root(F, zp_point(F, [9]))
    assert r.precision == 2 and r.ints() == (3,)
    cubes = {x for x in range(27) if ((1 + x) ** 3 - 1) % 27 == 9}
    assert {x % 9 for x in cubes} == {3}
    assert p_root(F, F.identity()).is_identity()


def test_p_root_rejects_non_powers():
    F = multiplicative_law(3, 4)
    with pytest.raises(NotAPower):
        p_root(F, zp_point(F, [3]))


@given(st.integers(0, 3 ** 6), st.sampled_from([1, 2]))
def test_p_root_inverts_power(x, e):
    F = multiplicative_law(3, 8)
    P = zp_point(F, [3 * x])
    Q = p_root(F, gpow(F, P, 3 ** e), e)
    assert Q.precision == 8 - e
    m = 3 ** Q.precision
    assert gpow(F, Q, 3 ** e).ints()[0] % m == gpow(F, P, 3 ** e).ints()[0] % m


def test_lazard_limits_abelian():
    F = multiplicative_law(3, 6)
    three = zp_point(F, [3])
    s = lazard_add(F, three, three, confirm=True)
    assert s.point.ints()[0] % 3 ** 6 == 15
    b = lazard_bracket(F, three, zp_point(F, [6]), confirm=True)
    assert b.point.is_identity()


def test_lazard_bracket_heisenberg():
    H = heisenberg_law(3, 6)
    e1, e2 = zp_point(H, [3, 0, 0]), zp_point(H, [0, 3, 0])
    res = lazard_bracket(H, e1, e2, confirm=True)
    assert res.point.ints() == (0, 0, 9)
    assert res.index >= 1


def test_lazard_add_heisenberg_matches_log_sum():
    H = heisenberg_law(3, 6)
    x, y = (3, 6, 9), (6, 3, 27)
    s = lazard_add(H, zp_point(H, x), zp_point(H, y), confirm=True).point.ints()
    lam = [a + b for a, b in zip(heis_lazard_coords(x, 6), heis_lazard_coords(y, 6))]
    assert list(heis_lazard_coords(s, 6)) == [c % 3 ** 5 for c in lam]


def test_lattice_examples():
    L, basis = lie_lattice_of(additive_law(3, 5))
    assert L.is_abelian() and L.is_powerful()
    F = twisted_multiplicative_law(3, 5)
    S = specialize(F, [PadicScalar(3, 5, 6)])
    assert lie_lattice_of(S)[0].is_abelian()
    L, basis = lie_lattice_of(heisenberg_law(3, 6), confirm=True)
    assert [b.ints() for b in basis] == [(3, 0, 0), (0, 3, 0), (0, 0, 3)]
    assert L.precision == 6 and L.to_dict()["brackets"] == [[1, 2, 3, 3]]
    assert L.is_valid() and L.is_powerful()


@pytest.mark.parametrize("ctor", [additive_law, multiplicative_law, heisenberg_law])
def test_lazard_quadratic_consistency(ctor):
    law = ctor(3, 6)
    L, _ = lie_lattice_of(law)
    q = bracket_constants_int(law)
    d, m = law.dim, 3 ** (6 - 2)
    for i in range(d):
        for j in range(d):
            for l in range(d):
                assert (L.constants[i][j][l] - 3 * q[i][j][l]) % m == 0


def test_coordinates_examples():
    H = heisenberg_law(3, 6)
    e1, e2, _ = standard_basis(H)
    assert [c.residue for c in lie_coordinates(H, e2)] == [0, 1, 0]
    assert [c.residue for c in lie_coordinates(H, gpow(H, e1, 5))] == [5, 0, 0]
    assert [c.residue for c in lie_coordinates(H, zp_point(H, [3, 6, 9]))] == [1, 2, 0]


@given(st.lists(st.integers(0, 3 ** 6), min_size=3, max_size=3))
def test_coordinates_match_matrix_log(x):
    H = heisenberg_law(3, 7)
    x = [3 * a for a in x]
    lam = [c.residue for c in lie_coordinates(H, zp_point(H, x))]
    assert tuple(lam) == heis_lazard_coords(x, 7)


@settings(max_examples=20)
@given(st.lists(st.integers(0, 3 ** 5 - 1), min_size=3, max_size=3))
def test_coordinates_roundtrip(lam):
    H = heisenberg_law(3, 6)
    P = lazard_combination(H, lam, standard_basis(H))
    got = [c.residue for c in lie_coordinates(H, P)]
    m = 3 ** (P.precision - 1)
    assert got == [c % m for c in lam]


def test_rep_abelian():
    L = LieLattice(3, 4, 2, [[[0, 0], [0, 0]], [[0, 0], [0, 0]]])
    rep = build_rep(L)
    assert rep.strategy == "abelian" and rep.degree == 2
    assert [M.tolist() for M in rep.images] == [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]


def sl2(k=4):
    c = [[[0] * 3 for _ in range(3)] for _ in range(3)]
    for i, j, l, v in ((0, 1, 1, 2), (0, 2, 2, -2), (1, 2, 0, 1)):
        c[i][j][l], c[j][i][l] = v, -v
    return LieLattice(3, k, 3, c)


def test_rep_adjoint_sl2():
    rep = build_rep(sl2())
    assert rep.strategy == "adjoint" and rep.degree == 3
    assert not relation_failures(rep.lattice, rep.images)
    assert faithfulness_loss(rep.lattice, rep.images) < 4
    ad_h = rep.images[0].tolist()
    assert ad_h == [[0, 0, 0], [0, 2, 0], [0, 0, 81 - 2]]


def test_rep_heisenberg_nilpotent_and_supplied():
    L, _ = lie_lattice_of(heisenberg_law(3, 6))
    rep = build_rep(L)
    assert rep.strategy == "nilpotent"
    assert not relation_failures(L, rep.images)
    E = lambda i, j, s=1: [[s if (r, c) == (i, j) else 0 for c in range(3)] for r in range(3)]
    sup = build_rep(L, "supplied", [E(0, 1), E(1, 2, 3), E(0, 2)])
    assert sup.degree == 3 and sup.strategy == "supplied"
    with pytest.raises(RelationFailure):
        build_rep(L, "supplied", [E(0, 1), E(1, 2), E(0, 2)])
    with pytest.raises(UnfaithfulRep):
        # commuting images with M3 = 0 satisfy the relations but kill e3
        build_rep(L, "supplied", [E(0, 2), E(0, 2), E(0, 2, 0)])


def test_no_strategy_for_sl2_plus_center():
    c = [[[0] * 4 for _ in range(4)] for _ in range(4)]
    for i, j, l, v in ((0, 1, 1, 2), (0, 2, 2, -2), (1, 2, 0, 1)):
        c[i][j][l], c[j][i][l] = v, -v
    with pytest.raises(NoStrategyApplies):
        build_rep(LieLattice(3, 4, 4, c))


@settings(max_examples=25)
@given(st.integers(0, 26), st.integers(0, 26), st.integers(0, 26))
def test_random_two_step_nilpotent(a, b, c):
    """x1, x2 generate; z1, z2 central; [x1, x2] = 3a z1 + 3b z2, [x1, z?] = 0."""
    d = 4
    C = [[[0] * d for _ in range(d)] for _ in range(d)]
    C[0][1][2], C[0][1][3] = 3 * a, 3 * b + 3 * c
    C[1][0][2], C[1][0][3] = -3 * a, -3 * b - 3 * c
    L = LieLattice(3, 4, d, C)
    rep = build_rep(L)
    assert not relation_failures(L, rep.images)
    assert faithfulness_loss(L, rep.images) < 4
