"""Hall bases of basic commutators, Witt counts, and leading Lie parts.

The Hall order puts the generators first (x1 < x2 < ... < xm by default).
Composite commutators are ordered by weight and, inside a weight, by the
order in which the inductive enumeration creates them: candidate pairs
(u, v) are visited by (ordinal of v, ordinal of u) and kept when u > v and,
if u = (u1, u2), also u2 <= v.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial, gcd

from sympy import divisors
from sympy.functions.combinatorial.numbers import mobius

from .errors import CommCalcError, ResourceLimit
from .magnus import TruncatedSeries, lie_bracket
from .words import Word, _generator_index, commutator, generator_name

DEFAULT_BASIS_CAP = 200_000


@dataclass(frozen=True, eq=False)
class BasicCommutator:
    """A node of the Hall basis.

    ``key`` is the bracketing tree as nested tuples of generator indices, so
    ``(2, 1)`` is [x2, x1]; it identifies the commutator independently of
    the ordering conventions.
    """

    key: object
    weight: int
    multidegree: tuple
    ordinal: int
    left: BasicCommutator | None = field(default=None, repr=False)
    right: BasicCommutator | None = field(default=None, repr=False)

    @property
    def is_generator(self) -> bool:
        return self.left is None

    @property
    def generator(self) -> int:
        if not self.is_generator:
            raise CommCalcError(f"{self} is not a generator")
        return self.key

    def __eq__(self, other):
        if not isinstance(other, BasicCommutator):
            return NotImplemented
        return self.key == other.key and self.ordinal == other.ordinal

    def __hash__(self):
        return hash((self.key, self.ordinal))

    def __lt__(self, other):
        return self.ordinal < other.ordinal

    def __le__(self, other):
        return self.ordinal <= other.ordinal

    def __gt__(self, other):
        return self.ordinal > other.ordinal

    def __ge__(self, other):
        return self.ordinal >= other.ordinal

    def entries(self) -> list:
        """Left-normed entry list: [[u, v], w] gives entries(u) + [w]."""
        if self.is_generator:
            return [self]
        return self.left.entries() + [self.right]

    def format(self, rank: int | None = None) -> str:
        if self.is_generator:
            return generator_name(self.key, rank)
        parts = []
        for e in self.entries():
            parts.append(e.format(rank))
        return "[" + ",".join(parts) + "]"

    def __str__(self) -> str:
        return self.format(len(self.multidegree))

    def as_word(self, rank: int | None = None) -> Word:
        return as_word(self, rank)


def key_from_entries(*entries):
    """Tree key of the left-normed bracket of the given keys/generator indices."""
    key = entries[0]
    for e in entries[1:]:
        key = (key, e)
    return key


class HallBasis:
    """Ordered Hall basis of F_m through ``max_weight``."""

    def __init__(self, m: int, max_weight: int, generator_order=None,
                 pair_order: str = "vu", cap: int = DEFAULT_BASIS_CAP):
        if m < 1 or max_weight < 1:
            raise ValueError(f"need m >= 1 and max_weight >= 1, got {m}, {max_weight}")
        if pair_order not in ("vu", "uv"):
            raise ValueError(f"pair_order must be 'vu' or 'uv', not {pair_order!r}")
        order = tuple(generator_order) if generator_order else tuple(range(1, m + 1))
        if sorted(order) != list(range(1, m + 1)):
            raise ValueError(f"generator_order {order} is not a permutation of 1..{m}")
        self.m = m
        self.max_weight = max_weight
        self.generator_order = order
        self.pair_order = pair_order

        total = sum(witt_count(m, n) for n in range(1, max_weight + 1))
        if total > cap:
            raise ResourceLimit(f"Hall basis of F_{m} through weight {max_weight} has {total} elements (cap {cap})")

        elements = []
        strata = {1: []}
        for g in order:
            md = tuple(1 if i == g else 0 for i in range(1, m + 1))
            c = BasicCommutator(g, 1, md, len(elements))
            elements.append(c)
            strata[1].append(c)
        for n in range(2, max_weight + 1):
            pairs = []
            for wv in range(1, n):
                for v in strata[wv]:
                    for u in strata[n - wv]:
                        if u <= v:
                            continue
                        if not u.is_generator and u.right > v:
                            continue
                        pairs.append((u, v))
            if pair_order == "vu":
                pairs.sort(key=lambda p: (p[1].ordinal, p[0].ordinal))
            else:
                pairs.sort(key=lambda p: (p[0].ordinal, p[1].ordinal))
            strata[n] = []
            for u, v in pairs:
                md = tuple(x + y for x, y in zip(u.multidegree, v.multidegree))
                c = BasicCommutator((u.key, v.key), n, md, len(elements), u, v)
                elements.append(c)
                strata[n].append(c)
        self.elements = tuple(elements)
        self._strata = {n: tuple(s) for n, s in strata.items()}
        self._by_key = {c.key: c for c in elements}

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def stratum(self, n: int) -> tuple:
        return self._strata.get(n, ())

    def lookup(self, key) -> BasicCommutator:
        try:
            return self._by_key[key]
        except KeyError:
            raise KeyError(f"{key!r} is not a basic commutator of this basis") from None

    def find(self, key):
        return self._by_key.get(key)

    def by_entries(self, *entries) -> BasicCommutator:
        return self.lookup(key_from_entries(*entries))

    def parse(self, text: str) -> BasicCommutator:
        """Look up a basic commutator written as e.g. ``[b,a,a,[b,a]]``."""
        return self.lookup(_parse_key(text.replace(" ", ""), self.m))

    def offsets(self) -> dict:
        """Ordinal of the first element of each weight."""
        return {n: s[0].ordinal for n, s in self._strata.items() if s}


def _parse_key(text: str, m: int):
    pos = 0

    def item():
        nonlocal pos
        if text[pos] == "[":
            pos += 1
            parts = [item()]
            while text[pos] == ",":
                pos += 1
                parts.append(item())
            if text[pos] != "]":
                raise ValueError(f"expected ']' at {pos} in {text!r}")
            pos += 1
            return key_from_entries(*parts)
        start = pos
        while pos < len(text) and text[pos] not in ",]":
            pos += 1
        idx = _generator_index(text[start:pos])
        if idx is None or not 1 <= idx <= m:
            raise ValueError(f"bad generator {text[start:pos]!r} in {text!r}")
        return idx

    key = item()
    if pos != len(text):
        raise ValueError(f"trailing text in {text!r}")
    return key


@lru_cache(maxsize=64)
def generate_basis(m: int, max_weight: int, generator_order=None, pair_order: str = "vu",
                   cap: int = DEFAULT_BASIS_CAP) -> HallBasis:
    if generator_order is not None:
        generator_order = tuple(generator_order)
    return HallBasis(m, max_weight, generator_order, pair_order, cap)


def witt_count(m: int, n: int) -> int:
    """Number of basic commutators of weight n on m generators."""
    if m < 1 or n < 1:
        raise ValueError(f"need m, n >= 1, got {m}, {n}")
    return sum(int(mobius(d)) * m ** (n // d) for d in divisors(n)) // n


def witt_multidegree(counts) -> int:
    """Number of basic commutators with the given generator occurrence counts."""
    counts = [int(c) for c in counts]
    if any(c < 0 for c in counts):
        raise ValueError(f"negative count in {counts}")
    n = sum(counts)
    if n < 1:
        raise ValueError("total degree must be at least 1")
    g = 0
    for c in counts:
        g = gcd(g, c)
    total = 0
    for d in divisors(g):
        term = factorial(n // d)
        for c in counts:
            term //= factorial(c // d)
        total += int(mobius(d)) * term
    return total // n


def as_word(c: BasicCommutator, rank: int | None = None) -> Word:
    rank = rank or len(c.multidegree)
    if c.is_generator:
        return Word.generator(c.key, rank)
    return commutator(as_word(c.left, rank), as_word(c.right, rank))


_rho_cache: dict = {}


def rho(c: BasicCommutator, D: int) -> TruncatedSeries:
    """Leading Lie polynomial of c: the Lie bracket of the variables it names."""
    if c.weight >= D:
        raise CommCalcError(f"weight {c.weight} is not below truncation {D}")
    m = len(c.multidegree)
    cache_key = (c.key, m, D)
    hit = _rho_cache.get(cache_key)
    if hit is None:
        if c.is_generator:
            hit = TruncatedSeries.variable(c.key, m, D)
        else:
            hit = lie_bracket(rho(c.left, D), rho(c.right, D))
        _rho_cache[cache_key] = hit
    return hit
