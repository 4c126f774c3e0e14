"""Elements of the free product <a> * <b> in syllable normal form."""

from __future__ import annotations

import re
from typing import Iterable, NamedTuple, Sequence, Tuple

FACTORS = ("a", "b")


class Syllable(NamedTuple):
    factor: str
    exponent: int


def _factor_name(f) -> str:
    if isinstance(f, int):
        return FACTORS[f]
    name = str(f).lower()
    if name not in FACTORS:
        raise ValueError(f"unknown factor {f!r}")
    return name


def _reduce_pairs(raw: Iterable[Tuple[str, int]]) -> Tuple[Syllable, ...]:
    stack: list = []
    for f, e in raw:
        f = _factor_name(f)
        e = int(e)
        if e == 0:
            continue
        if stack and stack[-1][0] == f:
            merged = stack.pop()[1] + e
            if merged:
                stack.append((f, merged))
        else:
            stack.append((f, e))
    return tuple(Syllable(f, e) for f, e in stack)


class Word:
    """An immutable element of F = <a> * <b>.

    The syllables always alternate between the two factors and carry
    nonzero exponents of arbitrary size.
    """

    __slots__ = ("syllables", "_hash")

    def __init__(self, raw: Iterable[Tuple[str, int]] = ()):
        self.syllables = _reduce_pairs(raw)
        self._hash = None

    @classmethod
    def _trusted(cls, syllables: Sequence[Syllable]) -> "Word":
        w = cls.__new__(cls)
        w.syllables = tuple(syllables)
        w._hash = None
        return w

    @classmethod
    def gen(cls, factor: str, exponent: int = 1) -> "Word":
        return cls([(factor, exponent)])

    @property
    def syllable_length(self) -> int:
        return len(self.syllables)

    @property
    def word_length(self) -> int:
        return sum(abs(s.exponent) for s in self.syllables)

    def is_identity(self) -> bool:
        return not self.syllables

    def inverse(self) -> "Word":
        return Word._trusted(Syllable(s.factor, -s.exponent) for s in reversed(self.syllables))

    def __mul__(self, other: "Word") -> "Word":
        if not isinstance(other, Word):
            return NotImplemented
        if not self.syllables:
            return other
        if not other.syllables:
            return self
        return Word(self.syllables + other.syllables)

    def __pow__(self, k: int) -> "Word":
        if k < 0:
            return self.inverse() ** (-k)
        out = Word()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.syllables == other.syllables

    def __lt__(self, other: "Word") -> bool:
        return sort_key(self) < sort_key(other)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.syllables)
        return self._hash

    def __iter__(self):
        return iter(self.syllables)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Word._trusted(self.syllables[i])
        return self.syllables[i]

    def __str__(self) -> str:
        return format_word(self)

    def __repr__(self) -> str:
        return f"Word('{format_word(self)}')"


IDENTITY = Word()
A = Word.gen("a")
B = Word.gen("b")


def normalize(raw: Iterable[Tuple[str, int]]) -> Word:
    return Word(raw)


def concat(*words: Word) -> Word:
    out: list = []
    for w in words:
        out.extend(w.syllables)
    return Word(out)


def invert(w: Word) -> Word:
    return w.inverse()


def lengths(w: Word) -> Tuple[int, int]:
    return w.syllable_length, w.word_length


def sort_key(w: Word):
    # shorter first, then a before b, positive before negative, small before large
    return (len(w.syllables), tuple((s.factor, s.exponent < 0, abs(s.exponent)) for s in w.syllables))


def cyclic_reduce(w: Word) -> Tuple[Word, Word]:
    """Return (h, c) with w = h c h^-1 and c weakly cyclically reduced."""
    h = IDENTITY
    c = w
    while len(c.syllables) >= 2 and c.syllables[0].factor == c.syllables[-1].factor:
        last = Word._trusted(c.syllables[-1:])
        h = h * last.inverse()
        c = Word(c.syllables[-1:] + c.syllables[:-1])
    return h, c


def cyclically_reduced(w: Word) -> Word:
    return cyclic_reduce(w)[1]


def rotations(c: Word):
    """Syllable-boundary rotations of a weakly cyclically reduced word."""
    syl = c.syllables
    if len(syl) <= 1:
        return [c]
    return [Word._trusted(syl[i:] + syl[:i]) for i in range(len(syl))]


def cyclic_conjugates(w: Word) -> frozenset:
    if w.is_identity():
        raise ValueError("the identity has no cyclic conjugates")
    c = cyclically_reduced(w)
    return frozenset(rotations(c) + rotations(c.inverse()))


def cyclic_canonical(w: Word) -> Word:
    """A fixed representative of the symmetrized class of w."""
    return min(cyclic_conjugates(w), key=sort_key)


def is_conjugate(u: Word, v: Word) -> bool:
    cu, cv = cyclically_reduced(u), cyclically_reduced(v)
    if cu.is_identity() or cv.is_identity():
        return cu.is_identity() and cv.is_identity()
    return cv in rotations(cu)


# -- text codec -----------------------------------------------------------

_TOKEN = re.compile(r"([aAbB])(?:\^\(?(-?\d+)\)?)?")
_SEP = re.compile(r"[\s*.·]+")


def format_syllable(s: Syllable) -> str:
    return s.factor if s.exponent == 1 else f"{s.factor}^{s.exponent}"


def format_word(w: Word) -> str:
    if not w.syllables:
        return "1"
    return " ".join(format_syllable(s) for s in w.syllables)


def parse_word(text: str) -> Word:
    """Parse "a^2 b a^-1" or the compact letter form "aabA"."""
    s = text.strip()
    if s in ("", "1", "e"):
        return IDENTITY
    pairs = []
    pos = 0
    while pos < len(s):
        m = _SEP.match(s, pos)
        if m:
            pos = m.end()
            continue
        m = _TOKEN.match(s, pos)
        if not m:
            raise ValueError(f"cannot parse word {text!r} at offset {pos}")
        letter, exp = m.group(1), m.group(2)
        e = int(exp) if exp is not None else 1
        if letter.isupper():
            e = -e
        pairs.append((letter.lower(), e))
        pos = m.end()
    return Word(pairs)


def to_letters(w: Word) -> str:
    """Compact letter form, uppercase for inverses. Small words only."""
    out = []
    for s in w.syllables:
        ch = s.factor if s.exponent > 0 else s.factor.upper()
        out.append(ch * abs(s.exponent))
    return "".join(out)
