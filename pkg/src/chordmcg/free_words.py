"""Reduced words in a free group and generator-substitution endomorphisms.

A letter is a nonzero integer: ``i`` stands for the generator ``g_i`` and
``-i`` for its inverse.  Words are kept freely reduced at all times, so two
words are equal as group elements exactly when their letter tuples agree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "Word",
    "Endomorphism",
    "multiply",
    "apply",
    "is_identity",
    "reduce_letters",
    "parse_word",
]


def reduce_letters(letters: Iterable[int]) -> tuple[int, ...]:
    """Freely reduce a letter sequence with a single stack pass."""
    stack: list[int] = []
    for x in letters:
        if x == 0:
            raise ValueError("0 is not a letter")
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


@dataclass(frozen=True)
class Word:
    letters: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", reduce_letters(self.letters))

    @classmethod
    def gen(cls, i: int) -> "Word":
        if i == 0:
            raise ValueError("generator indices start at 1")
        return cls((i,))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def inverse(self) -> "Word":
        return _raw(tuple(-x for x in reversed(self.letters)))

    __invert__ = inverse

    def max_index(self) -> int:
        return max((abs(x) for x in self.letters), default=0)

    def exponent_sums(self, rank: int) -> tuple[int, ...]:
        v = [0] * rank
        for x in self.letters:
            if abs(x) > rank:
                raise ValueError(f"letter {x} out of range for rank {rank}")
            v[abs(x) - 1] += 1 if x > 0 else -1
        return tuple(v)

    def __str__(self) -> str:
        return format_word(self)

    def __repr__(self) -> str:
        return f"Word({format_word(self)!r})"


def _raw(letters: tuple[int, ...]) -> Word:
    # bypass reduction for tuples already known to be reduced
    w = object.__new__(Word)
    object.__setattr__(w, "letters", letters)
    return w


EMPTY = _raw(())


def multiply(u: Word, v: Word, rank: int | None = None) -> Word:
    """Product ``u * v``; cancellation happens only at the junction."""
    if rank is not None:
        for w in (u, v):
            if w.max_index() > rank:
                raise ValueError(f"generator index out of range for rank {rank}")
    a, b = u.letters, v.letters
    i = 0
    n = min(len(a), len(b))
    while i < n and a[len(a) - 1 - i] == -b[i]:
        i += 1
    return _raw(a[: len(a) - i] + b[i:])


def product(words: Iterable[Word]) -> Word:
    out = EMPTY
    for w in words:
        out = multiply(out, w)
    return out


_TOKEN = re.compile(r"([a-zA-Z])(\d+)")


def format_word(w: Word) -> str:
    """``a1 A2`` style: lowercase is the generator, uppercase its inverse."""
    if not w.letters:
        return "1"
    return " ".join(("a" if x > 0 else "A") + str(abs(x)) for x in w.letters)


def parse_word(text: str) -> Word:
    text = text.strip()
    if text in ("", "1"):
        return EMPTY
    letters = []
    for tok in text.split():
        m = _TOKEN.fullmatch(tok)
        if m is None:
            raise ValueError(f"bad word token {tok!r}")
        i = int(m.group(2))
        if i == 0:
            raise ValueError("generator indices start at 1")
        letters.append(i if m.group(1).islower() else -i)
    return Word(tuple(letters))


@dataclass(frozen=True)
class Endomorphism:
    """Substitution ``g_i -> images[i-1]`` on a free group of the given rank."""

    images: tuple[Word, ...]

    @property
    def rank(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, rank: int) -> "Endomorphism":
        return cls(tuple(Word.gen(i) for i in range(1, rank + 1)))

    @classmethod
    def from_map(cls, rank: int, changes: dict[int, Word]) -> "Endomorphism":
        imgs = [changes.get(i, Word.gen(i)) for i in range(1, rank + 1)]
        return cls(tuple(imgs))

    def __call__(self, w: Word) -> Word:
        return apply(self, w)

    def then(self, other: "Endomorphism") -> "Endomorphism":
        """``other`` after ``self``: ``x -> other(self(x))``."""
        return other.compose(self)

    def compose(self, inner: "Endomorphism") -> "Endomorphism":
        """``self`` after ``inner``: ``x -> self(inner(x))``."""
        if inner.rank != self.rank:
            raise ValueError("rank mismatch")
        return Endomorphism(tuple(apply(self, w) for w in inner.images))

    def __str__(self) -> str:
        return ", ".join(f"a{i + 1} -> {format_word(w)}" for i, w in enumerate(self.images))


def apply(f: Endomorphism, w: Word) -> Word:
    if w.max_index() > f.rank:
        raise ValueError(f"word uses generators beyond rank {f.rank}")
    out: list[int] = []
    for x in w.letters:
        img = f.images[abs(x) - 1].letters
        if x < 0:
            img = tuple(-y for y in reversed(img))
        for y in img:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
    return _raw(tuple(out))


def is_identity(f: Endomorphism) -> bool:
    return all(img.letters == (i + 1,) for i, img in enumerate(f.images))


def compose_all(maps: Sequence[Endomorphism], rank: int) -> Endomorphism:
    """``maps[0] o maps[1] o ... o maps[-1]``."""
    out = Endomorphism.identity(rank)
    for f in maps:
        out = out.compose(f)
    return out
