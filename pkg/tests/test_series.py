import pytest
from hypothesis import given, strategies as st

from rstandard.errors import DescriptorMismatch, NonzeroConstantTerm, ValuationTooLow
from rstandard.series import (MultiSeries, RingDescriptor, RingElement, evaluate, ideal_order,
                              series_arith, substitute)
from rstandard.zp import PadicScalar

from oracles import egcd_inverse

R1 = RingDescriptor(3, 3, 1, 6)


def t(d=R1, j=0, c=1):
    return RingElement.t(d, j, c)


def c(n, d=R1):
    return RingElement.constant(d, n)


def test_descriptor_checks():
    with pytest.raises(ValueError):
        RingDescriptor(4, 3)
    with pytest.raises(ValueError):
        RingDescriptor(3, 0)
    with pytest.raises(ValueError):
        RingDescriptor(3, 3, 0, 1)


def test_difference_of_squares():
    assert (c(1) + t()) * (c(1) - t()) == c(1) - t() * t()


def test_cutoff_drops_high_degree():
    d = RingDescriptor(3, 3, 0, 2)
    X = MultiSeries.var(d, 1, 0)
    f = X + X * X
    assert series_arith("mul", f, f) == X * X


def test_mul_by_one():
    f = c(2) + t() + t(c=5) * t()
    assert f * c(1) == f


def test_descriptor_mismatch():
    with pytest.raises(DescriptorMismatch):
        c(1) + RingElement.constant(RingDescriptor(5, 3, 1, 6), 1)


def test_substitute_examples():
    d = RingDescriptor(3, 4, 0, 6)
    X, Y = MultiSeries.var(d, 2, 0), MultiSeries.var(d, 2, 1)
    sq = MultiSeries.var(d, 1, 0) ** 2
    assert substitute(sq, [X + Y]) == X * X + X * Y * 2 + Y * Y
    F = X + Y + X * Y
    assert substitute(F, [MultiSeries.var(d, 1, 0), MultiSeries.zero(d, 1)]) == MultiSeries.var(d, 1, 0)
    with pytest.raises(NonzeroConstantTerm):
        substitute(sq, [X + 1])


def test_additive_associativity_by_substitution():
    d = RingDescriptor(3, 4, 0, 6)
    X, Y, Z = (MultiSeries.var(d, 3, i) for i in range(3))
    F = MultiSeries.var(d, 2, 0) + MultiSeries.var(d, 2, 1)
    assert substitute(F, [substitute(F, [X, Y]), Z]) == substitute(F, [X, substitute(F, [Y, Z])])


def test_evaluate_examples():
    a = [PadicScalar(3, 3, 3)]
    assert evaluate(c(1) + t(), a).value.residue == 4
    geo = RingElement(R1, {(i,): 1 for i in range(5)})
    v, g = evaluate(geo, a)
    assert v.residue == 13 and g == 3 and (2 * 13 + 1) % 27 == 0
    r = t() * (c(3) - t())
    assert evaluate(r, [PadicScalar(3, 3, 6)]).value.residue == 9
    with pytest.raises(ValuationTooLow):
        evaluate(t(), [PadicScalar(3, 3, 1)])


def test_evaluate_reports_weak_guarantee():
    d = RingDescriptor(3, 8, 1, 2)
    v, g = evaluate(c(1, d) + t(d), [PadicScalar(3, 8, 3)])
    assert g == 3


def test_ideal_order_examples():
    assert ideal_order(t(c=3)) == 2
    assert ideal_order(c(1)) == 0
    d = RingDescriptor(3, 6, 1, 6)
    assert ideal_order(t(d, c=3) * t(d) + c(27, d)) == 3
    assert ideal_order(RingElement.zero(d)) == 6 + 6


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("k", [1, 3, 6])
def test_geometric_series_consistency(p, k):
    d = RingDescriptor(p, k, 1, max(k, 2))
    geo = RingElement(d, {(i,): 1 for i in range(d.degree_cutoff + 1)})
    v, g = evaluate(geo, [PadicScalar(p, k, p)])
    assert v.residue % p ** g == egcd_inverse(1 - p, p ** k) % p ** g
    assert g == k


@st.composite
def ring_elements(draw, d=RingDescriptor(3, 4, 2, 4)):
    n = draw(st.integers(0, 5))
    terms = {}
    for _ in range(n):
        e = (draw(st.integers(0, 3)), draw(st.integers(0, 3)))
        terms[e] = draw(st.integers(0, 80))
    return RingElement(d, terms)


@st.composite
def ideal_elements(draw, d=RingDescriptor(3, 4, 2, 4)):
    x = draw(ring_elements(d))
    const = x.terms.get((0, 0), 0)
    return x - const + 3 * draw(st.integers(0, 26))


@given(ring_elements(), ring_elements())
def test_ideal_order_superadditive(x, y):
    cap = x.descriptor.order_sentinel
    assert ideal_order(x * y) >= min(ideal_order(x) + ideal_order(y), cap) or (x * y).is_zero()


@given(ring_elements(), ring_elements(), ideal_elements(), ideal_elements())
def test_evaluate_is_multiplicative_within_guarantee(f, g, a, b):
    d = f.descriptor
    pt = [PadicScalar(3, 4, 3), PadicScalar(3, 4, 6)]
    (vf, gf), (vg, gg), (vfg, gfg) = evaluate(f, pt), evaluate(g, pt), evaluate(f * g, pt)
    k = min(gf, gg, gfg)
    assert (vf.residue * vg.residue - vfg.residue) % 3 ** k == 0


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 80)), max_size=5),
       st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 80)), max_size=5),
       ideal_elements(), ideal_elements())
def test_substitute_respects_products(ft, gt, u, v):
    d = RingDescriptor(3, 4, 2, 4)
    f = MultiSeries(d, 2, {(i, j, 0, 0): c for i, j, c in ft})
    g = MultiSeries(d, 2, {(i, j, 0, 0): c for i, j, c in gt})
    X, Y = MultiSeries.var(d, 2, 0), MultiSeries.var(d, 2, 1)
    imgs = [X + Y * MultiSeries.from_ring(u, 2), Y + X * X]
    assert substitute(f * g, imgs) == substitute(f, imgs) * substitute(g, imgs)
