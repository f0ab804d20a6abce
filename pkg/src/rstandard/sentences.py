"""Existential sentences over group words, and transfer through a certificate.

Grammar::

    sentence := "E" ident+ ":" disj
    disj     := conj { "|" conj }
    conj     := atom { "&" atom }
    atom     := word "=" "1" | word "!=" "1" | "(" disj ")"
    word     := factor { "*" factor | factor }
    factor   := base [ "^" signed-int ]
    base     := ident | "g" nat | "(" word ")" | "[" word "," word "]"

``[u, v]`` is the commutator u^-1 v^-1 u v and ``g0, g1, ...`` refer to a
declared list of constant points.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Union

from .errors import SentenceSyntaxError, UnboundVariable

# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    index: int


@dataclass(frozen=True)
class Power:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Commutator:
    left: "Word"
    right: "Word"


@dataclass(frozen=True)
class Word:
    factors: tuple = ()


Node = Union[Var, Const, Power, Commutator, Word]


@dataclass(frozen=True)
class Atom:
    word: Word
    equation: bool  # True for w = 1, False for w != 1


@dataclass(frozen=True)
class Conj:
    items: tuple


@dataclass(frozen=True)
class Disj:
    items: tuple


@dataclass(frozen=True)
class Sentence:
    variables: tuple
    body: Disj

    def atoms(self):
        out = []

        def walk(n):
            if isinstance(n, Atom):
                out.append(n)
            else:
                for c in n.items:
                    walk(c)

        walk(self.body)
        return out


# ---------------------------------------------------------------------------
# lexer / parser

_TOKEN = re.compile(r"\s*(?:(!=)|([A-Za-z_][A-Za-z_0-9]*)|(-?\d+)|(.))")


def _tokenize(text):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else m.end()
        if m.group(1):
            toks.append(("op", "!=", start))
        elif m.group(2):
            toks.append(("ident", m.group(2), start))
        elif m.group(3):
            toks.append(("int", m.group(3), start))
        elif m.group(4):
            ch = m.group(4)
            if ch.isspace():
                pos = m.end()
                continue
            if ch not in "():|&=*^[],":
                raise SentenceSyntaxError(f"unexpected character {ch!r}", start)
            toks.append(("op", ch, start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


_CONST = re.compile(r"g(\d+)$")


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, off=0):
        return self.toks[min(self.i + off, len(self.toks) - 1)]

    def error(self, msg):
        raise SentenceSyntaxError(msg, self.peek()[2])

    def accept(self, value):
        if self.peek()[1] == value and self.peek()[0] in ("op", "ident"):
            self.i += 1
            return True
        return False

    def expect(self, value):
        if not self.accept(value):
            got = self.peek()[1] or "end of input"
            self.error(f"expected {value!r}, found {got!r}")

    def sentence(self):
        if not (self.peek()[0] == "ident" and self.peek()[1] == "E"):
            self.error("sentence must start with 'E'")
        self.i += 1
        names = []
        while self.peek()[0] == "ident":
            name = self.peek()[1]
            if _CONST.match(name):
                self.error(f"{name!r} names a constant and cannot be bound")
            if name in names:
                self.error(f"variable {name!r} bound twice")
            names.append(name)
            self.i += 1
        if not names:
            self.error("expected at least one bound variable")
        self.expect(":")
        body = self.disj()
        if self.peek()[0] != "end":
            self.error(f"unexpected {self.peek()[1]!r}")
        return Sentence(tuple(names), body)

    def disj(self):
        items = [self.conj()]
        while self.accept("|"):
            items.append(self.conj())
        return Disj(tuple(items))

    def conj(self):
        items = [self.atom()]
        while self.accept("&"):
            items.append(self.atom())
        return Conj(tuple(items))

    def atom(self):
        if self.peek()[1] == "(":
            save = self.i
            try:
                return self._word_atom()
            except SentenceSyntaxError:
                self.i = save
            self.expect("(")
            inner = self.disj()
            self.expect(")")
            return inner
        return self._word_atom()

    def _word_atom(self):
        w = self.word()
        if self.accept("="):
            eq = True
        elif self.accept("!="):
            eq = False
        else:
            self.error("expected '=' or '!='")
        tok = self.peek()
        if tok[0] != "int" or tok[1] != "1":
            self.error("right-hand side must be 1")
        self.i += 1
        return Atom(w, eq)

    def _starts_factor(self):
        kind, val, _ = self.peek()
        return kind == "ident" or (kind == "op" and val in "([")

    def word(self):
        factors = [self.factor()]
        while True:
            if self.accept("*"):
                factors.append(self.factor())
            elif self._starts_factor():
                factors.append(self.factor())
            else:
                break
        return Word(tuple(factors))

    def factor(self):
        base = self.base()
        if self.accept("^"):
            tok = self.peek()
            if tok[0] != "int":
                self.error("exponent must be an integer")
            self.i += 1
            return Power(base, int(tok[1]))
        return base

    def base(self):
        kind, val, _ = self.peek()
        if kind == "ident":
            self.i += 1
            m = _CONST.match(val)
            return Const(int(m.group(1))) if m else Var(val)
        if self.accept("("):
            w = self.word()
            self.expect(")")
            return w
        if self.accept("["):
            a = self.word()
            self.expect(",")
            b = self.word()
            self.expect("]")
            return Commutator(a, b)
        self.error("expected a variable, constant, '(' or '['")


def parse_sentence(text: str) -> Sentence:
    return _Parser(text).sentence()


def parse_word(text: str) -> Word:
    p = _Parser(text)
    w = p.word()
    if p.peek()[0] != "end":
        p.error(f"unexpected {p.peek()[1]!r}")
    return w


# ---------------------------------------------------------------------------
# printing


def format_node(n) -> str:
    if isinstance(n, Var):
        return n.name
    if isinstance(n, Const):
        return f"g{n.index}"
    if isinstance(n, Power):
        return f"{format_node(n.base)}^{n.exponent}"
    if isinstance(n, Commutator):
        return f"[{format_word(n.left)}, {format_word(n.right)}]"
    if isinstance(n, Word):
        return f"({format_word(n)})"
    raise TypeError(n)


def format_word(w: Word) -> str:
    return " * ".join(format_node(f) for f in w.factors)


def format_body(n) -> str:
    if isinstance(n, Atom):
        return f"{format_word(n.word)} {'=' if n.equation else '!='} 1"
    if isinstance(n, Conj):
        return " & ".join(_maybe_group(c) for c in n.items)
    if isinstance(n, Disj):
        return " | ".join(format_body(c) for c in n.items)
    raise TypeError(n)


def _maybe_group(n):
    # a parenthesized disjunction inside a conjunction keeps its parentheses
    if isinstance(n, Disj):
        return f"({format_body(n)})"
    return format_body(n)


def format_sentence(s: Sentence) -> str:
    return f"E {' '.join(s.variables)} : {format_body(s.body)}"


# ---------------------------------------------------------------------------
# evaluation


@dataclass
class Backend:
    """A group given by its operations."""
    mul: Callable
    inv: Callable
    identity: Callable
    is_identity: Callable
    name: str = "group"

    def pow(self, x, n):
        if n < 0:
            x, n = self.inv(x), -n
        acc = self.identity()
        base = x
        while n:
            if n & 1:
                acc = self.mul(acc, base)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return acc


def law_backend(law) -> Backend:
    from .fgl import gmul, ginv
    return Backend(lambda a, b: gmul(law, a, b), lambda a: ginv(law, a), law.identity,
                   lambda a: a.is_identity(), f"law:{law.name}")


def matrix_backend(prime: int, precision: int, size: int) -> Backend:
    from .zp import PadicMatrix
    return Backend(lambda a, b: a @ b, lambda a: a.inverse(),
                   lambda: PadicMatrix.identity(prime, precision, size),
                   lambda a: a.is_identity(), "matrix")


def block_backend(prime: int, precision: int, nblocks: int, size: int) -> Backend:
    from .lazard import BlockMonomial
    ident = [[int(i == j) for j in range(size)] for i in range(size)]
    return Backend(lambda a, b: a @ b, lambda a: a.inverse(),
                   lambda: BlockMonomial(prime, precision, range(nblocks), [ident] * nblocks),
                   lambda a: a.is_identity(), "block-monomial")


def eval_word(w, assignment: dict, backend: Backend, constants=()):
    if isinstance(w, Word):
        acc = backend.identity()
        for f in w.factors:
            acc = backend.mul(acc, eval_word(f, assignment, backend, constants))
        return acc
    if isinstance(w, Var):
        if w.name not in assignment:
            raise UnboundVariable(f"variable {w.name!r} has no value")
        return assignment[w.name]
    if isinstance(w, Const):
        if w.index >= len(constants):
            raise UnboundVariable(f"constant g{w.index} is not declared")
        return constants[w.index]
    if isinstance(w, Power):
        return backend.pow(eval_word(w.base, assignment, backend, constants), w.exponent)
    if isinstance(w, Commutator):
        a = eval_word(w.left, assignment, backend, constants)
        b = eval_word(w.right, assignment, backend, constants)
        return backend.mul(backend.mul(backend.inv(a), backend.inv(b)), backend.mul(a, b))
    raise TypeError(f"not a word: {w!r}")


def atom_holds(atom: Atom, assignment, backend, constants=()) -> bool:
    trivial = backend.is_identity(eval_word(atom.word, assignment, backend, constants))
    return trivial if atom.equation else not trivial


def body_holds(n, values: dict) -> bool:
    """Truth of a body given precomputed atom truths keyed by id."""
    if isinstance(n, Atom):
        return values[id(n)]
    if isinstance(n, Conj):
        return all(body_holds(c, values) for c in n.items)
    return any(body_holds(c, values) for c in n.items)


# ---------------------------------------------------------------------------
# transfer


SOUND = "SOUND"
TO_PRECISION = "TO-PRECISION"


def _marking(atom: Atom, holds: bool) -> str:
    # a verified "!= 1" is a true inequality; a verified "= 1" only holds mod p^k
    nontrivial = holds != atom.equation
    return SOUND if nontrivial else TO_PRECISION


@dataclass
class AtomReport:
    text: str
    in_group: bool
    in_image: bool
    group_marking: str
    image_marking: str


@dataclass
class TransferReport:
    sentence: str
    atoms: list = field(default_factory=list)
    holds_in_group: bool = False
    holds_in_image: bool = False

    @property
    def verdict(self) -> str:
        if not self.holds_in_group:
            return "fails in G (no transfer claim)"
        if self.holds_in_image:
            return "holds in G and in the linear image"
        return "holds in G but not in the image (precision too low?)"

    @property
    def passed(self) -> bool:
        return self.holds_in_group and self.holds_in_image

    def to_dict(self):
        return {"sentence": self.sentence, "holds_in_group": self.holds_in_group,
                "holds_in_image": self.holds_in_image, "verdict": self.verdict,
                "atoms": [a.__dict__ for a in self.atoms]}


def check_transfer(sentence: Sentence | str, witness: dict, certificate, constants=()) -> TransferReport:
    """Evaluate each atom in G and under the certificate's homomorphism."""
    if isinstance(sentence, str):
        sentence = parse_sentence(sentence)
    missing = [v for v in sentence.variables if v not in witness]
    if missing:
        raise UnboundVariable(f"witness does not assign {', '.join(missing)}")
    law = certificate.law
    G = law_backend(law)
    emb = certificate.embedding
    img = block_backend(emb.law.prime, emb.precision, emb.index, emb.block_size)
    w_img = {v: certificate.image(P) for v, P in witness.items()}
    c_img = [certificate.image(P) for P in constants]
    in_g, in_i = {}, {}
    report = TransferReport(format_sentence(sentence))
    for atom in sentence.atoms():
        a = atom_holds(atom, witness, G, constants)
        b = atom_holds(atom, w_img, img, c_img)
        in_g[id(atom)], in_i[id(atom)] = a, b
        report.atoms.append(AtomReport(format_body(atom), a, b, _marking(atom, a), _marking(atom, b)))
    report.holds_in_group = body_holds(sentence.body, in_g)
    report.holds_in_image = body_holds(sentence.body, in_i)
    return report
