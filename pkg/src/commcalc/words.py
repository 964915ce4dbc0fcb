"""Reduced words in the free group F_m and a small expression language.

Words are stored run-length encoded as ``((generator, exponent), ...)`` with
1-based generator indices.  Conjugation and commutators follow the left
normed conventions ``h^g = g^-1 h g`` and ``[g, h] = g^-1 h^-1 g h``; a
bracket with more than two entries folds to the left.

Expression grammar::

    word   := factor { "*" factor }
    factor := atom { "^" ( ["-"] integer | ["-"] "(" word ")" ) }
    atom   := generator | variable | "1" | "(" word ")" | "[" word { "," word } "]"

Generators are ``x<n>`` or a single letter (``a`` = x1, ``b`` = x2, ...).
``1`` is the identity and ``x^-(y)`` means ``(x^y)^-1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Iterator

from .errors import RankError, UnboundVariable, WordSyntaxError, WordTooLong

MAX_LENGTH = 10**6

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def set_max_length(n: int) -> None:
    global MAX_LENGTH
    MAX_LENGTH = int(n)


def generator_name(i: int, rank: int | None = None) -> str:
    if (rank is None or rank <= len(_LETTERS)) and 1 <= i <= len(_LETTERS):
        return _LETTERS[i - 1]
    return f"x{i}"


class Word:
    """A freely reduced word; immutable and hashable."""

    __slots__ = ("rank", "runs", "_length")

    def __init__(self, rank: int, runs: Iterable[tuple[int, int]] = ()):
        if rank < 1:
            raise RankError(f"rank must be positive, got {rank}")
        stack: list[list[int]] = []
        length = 0
        for g, e in runs:
            if not 1 <= g <= rank:
                raise RankError(f"generator {g} outside rank {rank}")
            if e == 0:
                continue
            if stack and stack[-1][0] == g:
                length -= abs(stack[-1][1])
                stack[-1][1] += e
                if stack[-1][1] == 0:
                    stack.pop()
                else:
                    length += abs(stack[-1][1])
            else:
                stack.append([g, e])
                length += abs(e)
        if length > MAX_LENGTH:
            raise WordTooLong(f"word of length {length} exceeds cap {MAX_LENGTH}")
        self.rank = rank
        self.runs = tuple((g, e) for g, e in stack)
        self._length = length

    @classmethod
    def identity(cls, rank: int) -> Word:
        return cls(rank)

    @classmethod
    def generator(cls, i: int, rank: int) -> Word:
        return cls(rank, [(i, 1)])

    @classmethod
    def from_letters(cls, rank: int, letters: Iterable[int]) -> Word:
        """Build from signed generator indices, e.g. ``[1, 2, -1, -2]``."""
        return cls(rank, [(abs(x), 1 if x > 0 else -1) for x in letters])

    def letters(self) -> Iterator[int]:
        for g, e in self.runs:
            s = 1 if e > 0 else -1
            for _ in range(abs(e)):
                yield s * g

    def __len__(self) -> int:
        return self._length

    def is_identity(self) -> bool:
        return not self.runs

    def _check(self, other: Word) -> None:
        if not isinstance(other, Word):
            raise TypeError(f"expected Word, got {type(other).__name__}")
        if other.rank != self.rank:
            raise RankError(f"rank mismatch: {self.rank} vs {other.rank}")

    def __mul__(self, other: Word) -> Word:
        self._check(other)
        return Word(self.rank, self.runs + other.runs)

    def inverse(self) -> Word:
        return Word(self.rank, [(g, -e) for g, e in reversed(self.runs)])

    def __pow__(self, n: int) -> Word:
        if n < 0:
            return self.inverse() ** (-n)
        if n and len(self) * n > MAX_LENGTH:
            raise WordTooLong(f"power of length {len(self) * n} exceeds cap {MAX_LENGTH}")
        return Word(self.rank, self.runs * n)

    def conjugate(self, g: Word) -> Word:
        """``self^g = g^-1 self g``."""
        self._check(g)
        return Word(self.rank, g.inverse().runs + self.runs + g.runs)

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.rank == other.rank and self.runs == other.runs

    def __hash__(self) -> int:
        return hash((self.rank, self.runs))

    def __repr__(self) -> str:
        return f"Word({self.rank}, {format_word(self)!r})"

    def __str__(self) -> str:
        return format_word(self)


def commutator(a: Word, b: Word) -> Word:
    a._check(b)
    return Word(a.rank, a.inverse().runs + b.inverse().runs + a.runs + b.runs)


def left_normed(*items: Word) -> Word:
    """``[a1, a2, ..., an] = [[...[a1, a2], ...], an]``; a single item is returned as is."""
    if not items:
        raise ValueError("left_normed needs at least one entry")
    return reduce(commutator, items)


def right_normed(*items: Word) -> Word:
    """``[a1, [a2, [..., an]]]``."""
    if not items:
        raise ValueError("right_normed needs at least one entry")
    out = items[-1]
    for x in reversed(items[:-1]):
        out = commutator(x, out)
    return out


def group_op(kind: str, *operands):
    """Dispatch a group operation by name.

    ``multiply`` takes any number of words, ``power`` takes ``(word, n)``,
    ``conjugate`` takes ``(h, g)`` and returns ``g^-1 h g``.
    """
    if kind == "multiply":
        if not operands:
            raise ValueError("multiply needs operands")
        return reduce(lambda x, y: x * y, operands)
    if kind == "inverse":
        (w,) = operands
        return w.inverse()
    if kind == "conjugate":
        h, g = operands
        return h.conjugate(g)
    if kind == "commutator":
        a, b = operands
        return commutator(a, b)
    if kind == "leftNormed":
        return left_normed(*operands)
    if kind == "power":
        w, n = operands
        return w ** int(n)
    raise ValueError(f"unknown group operation {kind!r}")


def verify_identity(lhs: Word, rhs: Word) -> bool:
    """Exact equality in the free group."""
    lhs._check(rhs)
    return lhs == rhs


def format_word(w: Word) -> str:
    if not w.runs:
        return "1"
    parts = []
    for g, e in w.runs:
        name = generator_name(g, w.rank)
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


# ---------------------------------------------------------------------------
# Expression trees


@dataclass(frozen=True)
class Gen:
    index: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class Product:
    items: tuple


@dataclass(frozen=True)
class Power:
    base: object
    exponent: int


@dataclass(frozen=True)
class Conj:
    base: object
    by: object
    inverted: bool = False


@dataclass(frozen=True)
class Bracket:
    items: tuple


class WordAlgebra:
    """Evaluation backend producing reduced words."""

    def __init__(self, rank: int):
        self.rank = rank

    def generator(self, i: int) -> Word:
        return Word.generator(i, self.rank)

    def identity(self) -> Word:
        return Word.identity(self.rank)

    def mul(self, x, y):
        return x * y

    def inv(self, x):
        return x.inverse()

    def pow(self, x, n):
        return x**n

    def conj(self, x, g):
        return x.conjugate(g)

    def comm(self, x, y):
        return commutator(x, y)


def evaluate_tree(node, bindings, algebra):
    if isinstance(node, Gen):
        return algebra.generator(node.index)
    if isinstance(node, Var):
        try:
            return bindings[node.name]
        except KeyError:
            raise UnboundVariable(f"variable {node.name!r} is not bound") from None
    if isinstance(node, One):
        return algebra.identity()
    if isinstance(node, Product):
        vals = [evaluate_tree(x, bindings, algebra) for x in node.items]
        return reduce(algebra.mul, vals)
    if isinstance(node, Power):
        return algebra.pow(evaluate_tree(node.base, bindings, algebra), node.exponent)
    if isinstance(node, Conj):
        out = algebra.conj(
            evaluate_tree(node.base, bindings, algebra),
            evaluate_tree(node.by, bindings, algebra),
        )
        return algebra.inv(out) if node.inverted else out
    if isinstance(node, Bracket):
        vals = [evaluate_tree(x, bindings, algebra) for x in node.items]
        if len(vals) == 1:
            return vals[0]
        return reduce(algebra.comm, vals)
    raise TypeError(f"not an expression node: {node!r}")


def _tree_vars(node, acc):
    if isinstance(node, Var):
        acc.add(node.name)
    elif isinstance(node, (Product, Bracket)):
        for x in node.items:
            _tree_vars(x, acc)
    elif isinstance(node, Power):
        _tree_vars(node.base, acc)
    elif isinstance(node, Conj):
        _tree_vars(node.base, acc)
        _tree_vars(node.by, acc)
    return acc


@dataclass(frozen=True)
class WordPattern:
    """An expression over generators and named variables."""

    tree: object
    rank: int

    @property
    def variables(self) -> frozenset:
        return frozenset(_tree_vars(self.tree, set()))

    def evaluate(self, bindings=None, algebra=None):
        algebra = algebra or WordAlgebra(self.rank)
        return evaluate_tree(self.tree, bindings or {}, algebra)


def substitute(pattern: WordPattern, bindings: dict) -> Word:
    for name, w in bindings.items():
        if w.rank != pattern.rank:
            raise RankError(f"binding {name!r} has rank {w.rank}, pattern has {pattern.rank}")
    return pattern.evaluate(bindings)


# ---------------------------------------------------------------------------
# Parser

_TOKEN = re.compile(r"(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.)", re.DOTALL)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        start = pos
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1)), start))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "*^()[],-":
                raise WordSyntaxError(f"unexpected character {ch!r}", text, start)
            tokens.append((ch, ch, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, rank: int, variables):
        self.text = text
        self.rank = rank
        self.variables = frozenset(variables)
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind):
        tok = self.tokens[self.i]
        if tok[0] != kind:
            found = "end of input" if tok[0] == "end" else repr(tok[1])
            raise WordSyntaxError(f"expected {kind!r}, found {found}", self.text, tok[2])
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return WordSyntaxError(message, self.text, tok[2])

    def parse(self):
        node = self.word()
        if self.peek()[0] != "end":
            raise self.error("trailing input")
        return node

    def word(self):
        items = [self.factor()]
        while self.peek()[0] == "*":
            self.i += 1
            items.append(self.factor())
        return items[0] if len(items) == 1 else Product(tuple(items))

    def factor(self):
        node = self.atom()
        while self.peek()[0] == "^":
            self.i += 1
            negative = False
            if self.peek()[0] == "-":
                self.i += 1
                negative = True
            tok = self.peek()
            if tok[0] == "int":
                self.i += 1
                node = Power(node, -tok[1] if negative else tok[1])
            elif tok[0] == "(":
                self.i += 1
                by = self.word()
                self.take(")")
                node = Conj(node, by, negative)
            else:
                raise self.error("expected integer or '(' after '^'")
        return node

    def atom(self):
        tok = self.peek()
        kind = tok[0]
        if kind == "(":
            self.i += 1
            node = self.word()
            self.take(")")
            return node
        if kind == "[":
            self.i += 1
            items = [self.word()]
            while self.peek()[0] == ",":
                self.i += 1
                items.append(self.word())
            self.take("]")
            return Bracket(tuple(items))
        if kind == "int":
            if tok[1] != 1:
                raise self.error(f"integer {tok[1]} is not a word (only 1 denotes the identity)")
            self.i += 1
            return One()
        if kind == "name":
            self.i += 1
            name = tok[1]
            if name in self.variables:
                return Var(name)
            index = _generator_index(name)
            if index is None:
                raise self.error(f"unknown symbol {name!r}", tok)
            if index > self.rank:
                raise RankError(f"generator {name!r} outside rank {self.rank} (position {tok[2]})")
            return Gen(index)
        if kind == "end":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected {tok[1]!r}")


def _generator_index(name: str):
    if len(name) == 1 and name in _LETTERS:
        return _LETTERS.index(name) + 1
    m = re.fullmatch(r"x(\d+)", name)
    if m and int(m.group(1)) >= 1:
        return int(m.group(1))
    return None


def parse_pattern(text: str, rank: int, variables=()) -> WordPattern:
    return WordPattern(_Parser(text, rank, variables).parse(), rank)


def parse_word(text: str, rank: int) -> Word:
    return parse_pattern(text, rank).evaluate()
