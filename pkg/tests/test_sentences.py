import random

import pytest
from hypothesis import given, settings, strategies as st

from rstandard.discriminate import discriminate_pipeline
from rstandard.errors import SentenceSyntaxError, UnboundVariable
from rstandard.fgl import gmul, heisenberg_law, zp_point
from rstandard.lazard.induced import random_point
from rstandard.sentences import (SOUND, TO_PRECISION, Atom, Commutator, Conj, Const, Disj, Power, Sentence,
                                 Var, Word, block_backend, check_transfer, eval_word, format_sentence, format_word, law_backend,
                                 matrix_backend, parse_sentence, parse_word)
from rstandard.zp import PadicMatrix

from oracles import heis_comm, heis_matrix


@pytest.fixture(scope="module")
def heis_cert():
    H = heisenberg_law(3, 6)
    e1, e2 = zp_point(H, [3, 0, 0]), zp_point(H, [0, 3, 0])
    return discriminate_pipeline(H, [e1, e2])


def test_parse_examples():
    s = parse_sentence("E x y : [x,y] != 1")
    assert s.variables == ("x", "y")
    (atom,) = s.atoms()
    assert not atom.equation and isinstance(atom.word.factors[0], Commutator)
    s = parse_sentence("E x : x = 1")
    assert s.atoms()[0].equation
    s = parse_sentence("E x : ( x^3 = 1 & x != 1 )")
    assert [a.equation for a in s.atoms()] == [True, False]
    assert format_sentence(s) == "E x : (x^3 = 1 & x != 1)"


def test_word_grammar():
    w = parse_word("(x y)^-2 g0 [x, [y, x]]")
    a, b, c = w.factors
    assert isinstance(a, Power) and a.exponent == -2
    assert b == Const(0)
    assert isinstance(c.right.factors[0], Commutator)
    assert format_word(w) == "(x * y)^-2 * g0 * [x, [y, x]]"


@pytest.mark.parametrize("text,pos", [
    ("E : x = 1", 2),
    ("E x : x = 2", 10),
    ("E x : x^ = 1", 9),
    ("E x : [x y] = 1", 10),
    ("E x : x = 1 &", 13),
    ("A x : x = 1", 0),
])
def test_syntax_errors_carry_position(text, pos):
    with pytest.raises(SentenceSyntaxError) as info:
        parse_sentence(text)
    assert info.value.position == pos


idents = st.sampled_from(["x", "y", "z"])


def words(depth=2):
    leaf = st.one_of(idents.map(Var), st.integers(0, 2).map(Const))
    if depth == 0:
        return st.lists(leaf, min_size=1, max_size=3).map(lambda fs: Word(tuple(fs)))
    sub = words(depth - 1)
    factor = st.one_of(
        leaf,
        st.tuples(st.one_of(leaf, sub), st.integers(-3, 3).filter(bool)).map(lambda t: Power(*t)),
        st.tuples(sub, sub).map(lambda t: Commutator(*t)),
        sub,
    )
    return st.lists(factor, min_size=1, max_size=3).map(lambda fs: Word(tuple(fs)))


def bodies(depth=2):
    atom = st.tuples(words(1), st.booleans()).map(lambda t: Atom(*t))
    if depth == 0:
        item = atom
    else:
        item = st.one_of(atom, bodies(depth - 1))
    conj = st.lists(item, min_size=1, max_size=3).map(lambda xs: Conj(tuple(xs)))
    return st.lists(conj, min_size=1, max_size=3).map(lambda xs: Disj(tuple(xs)))


sentences = bodies(1).map(lambda b: Sentence(("x", "y", "z"), b))


@settings(max_examples=50)
@given(sentences)
def test_round_trip(s):
    text = format_sentence(s)
    parsed = parse_sentence(text)
    assert parse_sentence(format_sentence(parsed)) == parsed
    assert format_sentence(parsed) == text


def test_eval_word_examples():
    H = heisenberg_law(3, 6)
    G = law_backend(H)
    x, y = zp_point(H, [3, 0, 0]), zp_point(H, [0, 3, 0])
    assert eval_word(parse_word("[x, y]"), {"x": x, "y": y}, G).ints() == (0, 0, 9)
    assert eval_word(Word(()), {}, G).is_identity()
    assert eval_word(parse_word("x x^-1"), {"x": x}, G).is_identity()
    assert eval_word(parse_word("g1^2"), {}, G, constants=[x, y]).ints() == (0, 6, 0)
    with pytest.raises(UnboundVariable):
        eval_word(parse_word("z"), {"x": x}, G)
    with pytest.raises(UnboundVariable):
        eval_word(parse_word("g3"), {}, G, constants=[x])


@given(st.lists(st.integers(0, 3 ** 7), min_size=6, max_size=6))
def test_law_and_matrix_backends_agree(v):
    m = 3 ** 8
    H = heisenberg_law(3, 8)
    x, y = [3 * a for a in v[:3]], [3 * a for a in v[3:]]
    w = parse_word("[x, y]")
    got = eval_word(w, {"x": zp_point(H, x), "y": zp_point(H, y)}, law_backend(H)).ints()
    M = eval_word(w, {"x": PadicMatrix(3, 8, heis_matrix(x, m)), "y": PadicMatrix(3, 8, heis_matrix(y, m))},
                  matrix_backend(3, 8, 3))
    assert got == heis_comm(x, y, m) == (M.rows[0][1], M.rows[1][2], M.rows[0][2])


_cache = {}


def _small_cert():
    if "c" not in _cache:
        H = heisenberg_law(3, 5)
        _cache["c"] = discriminate_pipeline(H, [zp_point(H, [3, 0, 0]), zp_point(H, [0, 3, 0])],
                                            embedding_pairs=10)
    return _cache["c"]


@settings(max_examples=15, deadline=None)
@given(words(1), st.integers(0, 10 ** 6))
def test_homomorphism_coherence(w, seed):
    cert = _small_cert()
    H = cert.law
    rng = random.Random(seed)
    assign = {v: zp_point(H, random_point(H, rng)) for v in "xyz"}
    consts = [zp_point(H, random_point(H, rng)) for _ in range(3)]
    emb = cert.embedding
    img = block_backend(3, emb.precision, emb.index, emb.block_size)
    lhs = cert.image(eval_word(w, assign, law_backend(H), consts))
    rhs = eval_word(w, {k: cert.image(v) for k, v in assign.items()}, img,
                    [cert.image(c) for c in consts])
    assert lhs == rhs


def test_transfer_noncommuting_witness(heis_cert):
    H = heis_cert.law
    rep = check_transfer("E x y : [x,y] != 1", {"x": zp_point(H, [3, 0, 0]), "y": zp_point(H, [0, 3, 0])},
                         heis_cert)
    assert rep.passed
    (a,) = rep.atoms
    assert a.group_marking == a.image_marking == SOUND


def test_transfer_identity_equation(heis_cert):
    rep = check_transfer("E x : x = 1", {"x": heis_cert.law.identity()}, heis_cert)
    assert rep.passed
    assert rep.atoms[0].group_marking == TO_PRECISION


def test_transfer_violated_in_group(heis_cert):
    H = heis_cert.law
    rep = check_transfer("E x y : [x,y] != 1", {"x": zp_point(H, [3, 0, 0]), "y": zp_point(H, [6, 0, 0])},
                         heis_cert)
    assert not rep.holds_in_group and not rep.passed
    assert "no transfer claim" in rep.verdict


def test_transfer_requires_full_witness(heis_cert):
    with pytest.raises(UnboundVariable):
        check_transfer("E x y : x = 1", {"x": heis_cert.law.identity()}, heis_cert)


def test_disjunction_and_failed_equation_marking(heis_cert):
    H = heis_cert.law
    e1 = zp_point(H, [3, 0, 0])
    rep = check_transfer("E x : x = 1 | x^3 != 1", {"x": e1}, heis_cert)
    assert rep.passed
    first, second = rep.atoms
    assert not first.in_group and first.group_marking == SOUND
    assert second.in_group and second.group_marking == SOUND
