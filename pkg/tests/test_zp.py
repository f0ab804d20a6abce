import pytest
from hypothesis import given, strategies as st

from rstandard.errors import InexactDivision, ModulusMismatch, NotAUnit
from rstandard.zp import (PadicMatrix, PadicScalar, exact_div, howell_kernel, kernel_loss, scalar_arith,
                          scalar_inv, vp)

from oracles import brute_left_kernel, egcd_inverse, span


def S(x, p=3, k=3):
    return PadicScalar(p, k, x)


primes = st.sampled_from([2, 3, 5, 7])


@st.composite
def scalars(draw, n=1):
    p = draw(primes)
    k = draw(st.integers(1, 12))
    return [PadicScalar(p, k, draw(st.integers(0, p ** k - 1))) for _ in range(n)]


def test_add_wraps_to_zero():
    z = scalar_arith("add", S(25), S(2))
    assert z.residue == 0 and z.valuation == 3


def test_mul_wraps_to_zero():
    assert scalar_arith("mul", S(3), S(9)).residue == 0


def test_sub_and_neg():
    assert scalar_arith("sub", S(1), S(2)).residue == 26
    assert scalar_arith("neg", S(1)).residue == 26


def test_mismatch_raises():
    with pytest.raises(ModulusMismatch):
        S(1) + S(1, k=4)
    with pytest.raises(ModulusMismatch):
        S(1) * S(1, p=5)


def test_inverse_examples():
    assert scalar_inv(S(2)).residue == 14 == egcd_inverse(2, 27)
    assert scalar_inv(S(1)).residue == 1
    with pytest.raises(NotAUnit):
        scalar_inv(S(3))


def test_exact_div_examples():
    z = exact_div(S(18, k=4), S(9, k=4))
    assert (z.residue, z.precision) == (2, 2)
    assert exact_div(S(9), S(2)).residue == 18
    assert exact_div(S(7), S(1)) == S(7)
    with pytest.raises(InexactDivision):
        exact_div(S(3), S(9))


@given(scalars(1))
def test_additive_identity(xs):
    (x,) = xs
    assert x + 0 == x


@given(scalars(3))
def test_ring_axioms(xs):
    x, y, z = xs
    assert (x * y) * z == x * (y * z)
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z


@given(scalars(2))
def test_valuation_of_product(xs):
    x, y = xs
    assert (x * y).valuation == min(x.valuation + y.valuation, x.precision)


@given(scalars(2))
def test_exact_div_inverts_mul(xs):
    x, y = xs
    if y.is_zero():
        return
    z = exact_div(x * y, y)
    assert z.residue == x.residue % x.prime ** z.precision


@given(scalars(1))
def test_unit_inverse(xs):
    (x,) = xs
    if x.is_unit():
        assert (x * scalar_inv(x)).residue == 1


def test_kernel_examples():
    assert howell_kernel(PadicMatrix.identity(3, 2, 2)) == []
    (g,) = howell_kernel(PadicMatrix(3, 2, [[3]]))
    assert [x.residue for x in g] == [3]
    gens = {tuple(x.residue for x in g) for g in howell_kernel(PadicMatrix.zero(3, 2, 2))}
    assert gens == {(1, 0), (0, 1)}


small = st.lists(st.lists(st.integers(0, 8), min_size=1, max_size=2), min_size=1, max_size=2).filter(
    lambda rows: len({len(r) for r in rows}) == 1)


@given(small)
def test_kernel_matches_brute_force_over_z9(rows):
    M = PadicMatrix(3, 2, rows)
    gens = [[x.residue for x in g] for g in howell_kernel(M)]
    for g in gens:
        assert all(sum(g[i] * rows[i][j] for i in range(len(rows))) % 9 == 0 for j in range(len(rows[0])))
    assert span(gens, 3, 2, len(rows)) == brute_left_kernel(rows, 3, 2)


@given(st.lists(st.lists(st.integers(0, 3 ** 4 - 1), min_size=3, max_size=3), min_size=2, max_size=4))
def test_kernel_generators_annihilate(rows):
    M = PadicMatrix(3, 4, rows)
    for g in howell_kernel(M):
        v = [x.residue for x in g]
        assert all(sum(v[i] * rows[i][j] for i in range(len(rows))) % 81 == 0 for j in range(3))


def test_kernel_loss_distinguishes_injective_maps():
    assert kernel_loss([[1, 0], [0, 1]], 3, 4) == 0
    assert kernel_loss([[3, 0], [0, 1]], 3, 4) == 1
    assert kernel_loss([[1, 0], [1, 0]], 3, 4) == 4


def test_matrix_inverse_and_products():
    A = PadicMatrix(3, 4, [[1, 3], [6, 1]])
    assert (A @ A.inverse()).is_identity()
    with pytest.raises(NotAUnit):
        PadicMatrix(3, 4, [[3, 0], [0, 1]]).inverse()


def test_vp():
    assert vp(54, 3) == 3
    assert vp(0, 3, cap=5) == 5
