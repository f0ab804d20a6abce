import random

import pytest
from hypothesis import given, strategies as st

from rstandard.errors import InvalidPoint
from rstandard.fgl import (_law, additive_law, associativity_sides, bracket_constants_int, extract_bracket,
                           gcomm, ginv, gmul, gpow, heisenberg_law, multiplicative_law,
                           twisted_multiplicative_law, validate_law, zp_point)
from rstandard.series import MultiSeries, RingElement

from oracles import heis_comm, heis_inv, heis_mul, units_mul


def test_additive_law_validates():
    assert validate_law(additive_law(3, 4)).passed


def test_bad_identity_has_x_squared_witness():
    bad = _law(3, 3, 1, 6, 0, 1, [{(1, 0): 1, (0, 1): 1, (2, 0): 1}], "bad")
    rep = validate_law(bad)
    assert not rep.passed
    names = {c.name for c in rep.failures()}
    assert "identity F(X,0) = X" in names
    assert any(c.witness == "X^2" for c in rep.failures())


def test_low_level_is_reported():
    law = _law(2, 4, 1, 4, 0, 1, [{(1, 0): 1, (0, 1): 1}], "low")
    rep = validate_law(law)
    assert [c.name for c in rep.failures()] == ["level"]


def test_twisted_associativity_expansion():
    F = twisted_multiplicative_law(3, 4)
    assert validate_law(F).passed
    lhs, rhs = associativity_sides(F)
    expected = {(1, 0, 0, 0): 1, (0, 1, 0, 0): 1, (0, 0, 1, 0): 1,
                (1, 1, 0, 1): 1, (1, 0, 1, 1): 1, (0, 1, 1, 1): 1, (1, 1, 1, 2): 1}
    assert lhs[0] == rhs[0] == MultiSeries(F.descriptor, 3, expected)


def test_multiplicative_examples():
    F = multiplicative_law(3, 3)
    three = zp_point(F, [3])
    assert gmul(F, three, three).ints() == (15,)
    assert ginv(F, three).ints() == (6,)
    assert units_mul(3, 6, 27) == 0


def test_additive_inverse_is_negation():
    F = additive_law(5, 4)
    assert ginv(F, zp_point(F, [10])).ints() == (625 - 10,)


def test_heisenberg_examples():
    H = heisenberg_law(3, 6)
    e1, e2 = zp_point(H, [3, 0, 0]), zp_point(H, [0, 3, 0])
    assert gmul(H, e1, e2).ints() == (3, 3, 9)
    assert gcomm(H, e1, e2).ints() == (0, 0, 9)
    assert gcomm(H, e1, e1).is_identity()
    x = (3, 6, 12)
    assert ginv(H, zp_point(H, x)).ints() == tuple(v % 729 for v in (-3, -6, -12 + 18))


def test_abelian_commutator_trivial():
    F = multiplicative_law(3, 5)
    assert gcomm(F, zp_point(F, [6]), zp_point(F, [21])).is_identity()


def test_point_level_enforced():
    with pytest.raises(InvalidPoint):
        heisenberg_law(3, 4).point([1, 0, 0])


def test_bracket_extraction():
    assert bracket_constants_int(additive_law(3, 4)) == [[[0]]]
    assert bracket_constants_int(multiplicative_law(3, 4)) == [[[0]]]
    c = bracket_constants_int(heisenberg_law(3, 4))
    m = 81
    nonzero = {(i, j, l): c[i][j][l] % m for i in range(3) for j in range(3) for l in range(3)
               if c[i][j][l] % m}
    assert nonzero == {(0, 1, 2): 1, (1, 0, 2): m - 1}


def test_bracket_of_twisted_law_is_zero_ring_element():
    (((c,),),) = extract_bracket(twisted_multiplicative_law(3, 4))
    assert c.is_zero()


def test_heisenberg_matches_matrix_oracle():
    p, k = 3, 8
    m = p ** k
    H = heisenberg_law(p, k)
    rng = random.Random(1)
    for _ in range(200):
        x = [p * rng.randrange(m // p) for _ in range(3)]
        y = [p * rng.randrange(m // p) for _ in range(3)]
        P, Q = zp_point(H, x), zp_point(H, y)
        assert gmul(H, P, Q).ints() == heis_mul(x, y, m)
        assert ginv(H, P).ints() == heis_inv(x, m)
        assert gcomm(H, P, Q).ints() == heis_comm(x, y, m)


laws = st.sampled_from([("additive", additive_law), ("multiplicative", multiplicative_law),
                        ("heisenberg", heisenberg_law)])


@given(laws, st.sampled_from([3, 5]), st.data())
def test_associativity_and_inverse(entry, p, data):
    _, ctor = entry
    k = 6
    F = ctor(p, k)
    pts = [zp_point(F, [p * data.draw(st.integers(0, p ** (k - 1) - 1)) for _ in range(F.dim)])
           for _ in range(3)]
    P, Q, S = pts
    assert gmul(F, gmul(F, P, Q), S) == gmul(F, P, gmul(F, Q, S))
    assert gmul(F, ginv(F, P), P).is_identity()
    assert gmul(F, P, F.identity()) == P


@given(st.integers(0, 80), st.integers(-20, 20))
def test_gpow_matches_repeated_product(x, n):
    F = multiplicative_law(3, 5)
    P = zp_point(F, [3 * x])
    expected = F.identity()
    step = P if n >= 0 else ginv(F, P)
    for _ in range(abs(n)):
        expected = gmul(F, expected, step)
    assert gpow(F, P, n) == expected


def test_twisted_points_over_power_series():
    F = twisted_multiplicative_law(3, 4)
    t = RingElement.t(F.descriptor)
    P = F.point([t])
    Q = F.point([RingElement.constant(F.descriptor, 3)])
    R = gmul(F, P, Q)
    assert R.coordinates[0] == t + 3 + t * t * 3
    assert gmul(F, R, ginv(F, Q)) == P
