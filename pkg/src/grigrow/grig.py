"""Exact arithmetic in the first Grigorchuk group G = <a, b, c, d>.

Elements are stored as reduced words: a string over "abcd" in which the
letter a alternates with letters from {b, c, d}.  The group acts on the
right on binary rays through the wreath recursion

    a = swap,  b = (a, c),  c = (a, d),  d = (1, b)

where (u, v) means "act by u below 0 and by v below 1".  Products are read
left to right: ``x * y`` acts by x first, then by y.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

LETTERS = "abcd"

# {1, b, c, d} is a Klein four-group; "" is the identity.
_KLEIN = {
    ("b", "b"): "", ("c", "c"): "", ("d", "d"): "",
    ("b", "c"): "d", ("c", "b"): "d",
    ("b", "d"): "c", ("d", "b"): "c",
    ("c", "d"): "b", ("d", "c"): "b",
}

# section of a letter at the child 0 and at the child 1
_SECTION = {
    "a": ("", ""),
    "b": ("a", "c"),
    "c": ("a", "d"),
    "d": ("", "b"),
}


def _cache_size() -> int:
    raw = os.environ.get("GRIGROW_CACHE")
    if raw is None:
        return 1 << 20
    size = int(raw)
    if size <= 0:
        raise ValueError("GRIGROW_CACHE must be a positive integer")
    return size


CACHE_SIZE = _cache_size()


def reduce(letters: Iterable[str]) -> str:
    """Return the reduced form of a word over a, b, c, d.

    Uses the rewriting rules a^2 = 1 and the Klein four-group table on
    {b, c, d}.  The result is unique and ``reduce`` is idempotent.
    """
    stack: list[str] = []
    for s in letters:
        if s not in _SECTION:
            raise ValueError(f"not a generator: {s!r}")
        if not stack:
            stack.append(s)
            continue
        top = stack[-1]
        if s == "a":
            if top == "a":
                stack.pop()
            else:
                stack.append(s)
        elif top == "a":
            stack.append(s)
        else:
            stack.pop()
            merged = _KLEIN[(top, s)]
            if merged:
                stack.append(merged)
    return "".join(stack)


@lru_cache(maxsize=CACHE_SIZE)
def word_sections(word: str) -> tuple[bool, str, str]:
    """Root permutation and the two first-level sections of a reduced word."""
    swap = False
    left: list[str] = []
    right: list[str] = []
    for s in word:
        if s == "a":
            swap = not swap
            continue
        s0, s1 = _SECTION[s]
        # the section at the current image of child 0 (resp. 1)
        if swap:
            left.append(s1)
            right.append(s0)
        else:
            left.append(s0)
            right.append(s1)
    return swap, reduce("".join(left)), reduce("".join(right))


@lru_cache(maxsize=CACHE_SIZE)
def word_is_identity(word: str) -> bool:
    if not word:
        return True
    swap, left, right = word_sections(word)
    if swap:
        return False
    # contraction: |section| <= ceil(|word| / 2) < |word| once |word| >= 2
    return word_is_identity(left) and word_is_identity(right)


def depth_bound(length: int) -> int:
    """A level at which every nontrivial element of this length moves a vertex."""
    if length <= 1:
        return 3
    return 1 + depth_bound((length + 1) // 2)


@lru_cache(maxsize=CACHE_SIZE)
def _portrait(word: str, depth: int) -> int:
    # fixed width of 2^depth - 1 bits: root bit, then both subtrees
    if depth == 0 or not word:
        return 0
    swap, left, right = word_sections(word)
    width = (1 << (depth - 1)) - 1
    lo = _portrait(left, depth - 1)
    hi = _portrait(right, depth - 1)
    return (int(swap) << (2 * width)) | (lo << width) | hi


def portrait_key(word: str, depth: int) -> int:
    """Integer encoding of the root permutations down to ``depth`` levels.

    Two elements have the same key iff they act identically on all vertices
    of level ``depth``.
    """
    return _portrait(word, depth)


def _act_letter(s: str, bits: list[int]) -> None:
    """Act by one generator on a finite 0/1 list, in place."""
    if s == "a":
        if bits:
            bits[0] ^= 1
        return
    state = s
    for k, bit in enumerate(bits):
        if bit == 0:
            if state != "d" and k + 1 < len(bits):
                bits[k + 1] ^= 1
            return
        state = {"b": "c", "c": "d", "d": "b"}[state]


def _parse_bits(w: str | Sequence[int]) -> list[int]:
    if isinstance(w, str):
        out = []
        for ch in w:
            if ch in "01":
                out.append(int(ch))
            elif not ch.isspace():
                raise ValueError(f"not a binary digit: {ch!r}")
        return out
    return [int(b) for b in w]


@dataclass(frozen=True, eq=False)
class GrigElement:
    """An element of G, held as a reduced word.

    Equality is decided by the word problem, so two different reduced words
    naming the same element compare equal and hash alike.
    """

    word: str = ""
    _hash: int | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        reduced = reduce(self.word)
        if reduced != self.word:
            object.__setattr__(self, "word", reduced)

    @classmethod
    def parse(cls, text: str) -> "GrigElement":
        letters = [ch for ch in text if not ch.isspace()]
        for ch in letters:
            if ch not in LETTERS:
                raise ValueError(f"unexpected symbol {ch!r} in {text!r}")
        return cls("".join(letters))

    def __mul__(self, other: "GrigElement") -> "GrigElement":
        if not isinstance(other, GrigElement):
            return NotImplemented
        return GrigElement(self.word + other.word)

    def inverse(self) -> "GrigElement":
        # every generator is an involution
        return GrigElement(self.word[::-1])

    def __pow__(self, n: int) -> "GrigElement":
        base = self if n >= 0 else self.inverse()
        return GrigElement(base.word * abs(n))

    def __len__(self) -> int:
        return len(self.word)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GrigElement):
            return NotImplemented
        if self.word == other.word:
            return True
        return word_is_identity(reduce(self.word + other.word[::-1]))

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(portrait_key(self.word, 6)))
        return self._hash  # type: ignore[return-value]

    def __str__(self) -> str:
        return self.word or "1"

    def __repr__(self) -> str:
        return f"GrigElement({self.word!r})"

    def is_identity(self) -> bool:
        return word_is_identity(self.word)

    def key(self, depth: int) -> int:
        return portrait_key(self.word, depth)

    def sections(self) -> tuple[bool, "GrigElement", "GrigElement"]:
        swap, left, right = word_sections(self.word)
        return swap, GrigElement(left), GrigElement(right)

    def section_at(self, vertex: str) -> tuple[str, "GrigElement"]:
        """Image of a finite vertex and the section of self there."""
        word = self.word
        image = []
        for ch in vertex:
            swap, left, right = word_sections(word)
            bit = int(ch)
            image.append(str(bit ^ int(swap)))
            word = left if bit == 0 else right
        return "".join(image), GrigElement(word)

    def act_prefix(self, w: str | Sequence[int]) -> str:
        bits = _parse_bits(w)
        for s in self.word:
            _act_letter(s, bits)
        return "".join(map(str, bits))


ONE = GrigElement("")
a = GrigElement("a")
b = GrigElement("b")
c = GrigElement("c")
d = GrigElement("d")
GENERATORS = (a, b, c, d)


def multiply(x: GrigElement, y: GrigElement) -> GrigElement:
    return x * y


def sections(x: GrigElement) -> tuple[bool, GrigElement, GrigElement]:
    return x.sections()


def is_identity(x: GrigElement) -> bool:
    return x.is_identity()


def act_prefix(x: GrigElement, w: str | Sequence[int]) -> str:
    return x.act_prefix(w)


_SIGMA = {"a": "c", "b": "ada", "c": "aba", "d": "aca"}


def sigma_endo(x: GrigElement) -> GrigElement:
    """The substitution a->c, b->d^a, c->b^a, d->c^a."""
    return GrigElement("".join(_SIGMA[s] for s in x.word))


def reduced_words(length: int) -> Iterator[str]:
    """All reduced words of the given length, in lexicographic order."""
    if length == 0:
        yield ""
        return

    def extend(prefix: str) -> Iterator[str]:
        if len(prefix) == length:
            yield prefix
            return
        last = prefix[-1] if prefix else ""
        for s in LETTERS:
            if prefix and (s == "a") == (last == "a"):
                continue
            yield from extend(prefix + s)

    yield from extend("")


# -- behaviour on the designated points x_m = 0^m 1^oo -------------------

FIXES_TAIL = "FixesTail"
MOVES_OFF_SEQUENCE = "MovesOffSequence"

TAIL_MARGIN = 2


class ProbeDepthExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class TailBehavior:
    """How an element moves the points x_m = 0^m 1^oo.

    For m > level + margin the element either fixes x_m (FixesTail) or sends
    it off {x_l}.  ``exceptions`` maps k to l for every k <= level + margin
    with x_k g = x_l and k != l.
    """

    level: int
    kind: str
    exceptions: dict[int, int]
    margin: int = TAIL_MARGIN

    @property
    def horizon(self) -> int:
        return self.level + self.margin

    def image_index(self, m: int) -> int | None:
        """Index l with x_m g = x_l, or None when x_m leaves the sequence.

        Only valid for m > horizon or for exception keys; callers wanting
        small m should act directly.
        """
        if m in self.exceptions:
            return self.exceptions[m]
        if m <= self.horizon:
            raise ValueError("inside the exceptional window; act directly")
        return m if self.kind == FIXES_TAIL else None


def designated_image(x: GrigElement, m: int) -> int | None:
    """l with x_m x = x_l, or None; exact."""
    from .schreier import OrbitPoint, act_point

    image = act_point(x, OrbitPoint("0" * m))
    if set(image.prefix) <= {"0"}:
        return len(image.prefix)
    return None


def tail_class(x: GrigElement, probe_depth: int | None = None) -> TailBehavior:
    """Certified description of x on all designated points x_m."""
    if probe_depth is None:
        probe_depth = 2 * len(x) + 8
    word = x.word
    image_moved = False
    level = 0
    while len(word) > 1:
        if level >= probe_depth:
            raise ProbeDepthExceeded(
                f"section of {x} along 0^{level} still has length {len(word)}"
            )
        swap, left, _ = word_sections(word)
        image_moved = image_moved or swap
        word = left
        level += 1
    if not image_moved and word in ("", "d"):
        kind = FIXES_TAIL
    else:
        kind = MOVES_OFF_SEQUENCE
    exceptions = {}
    for k in range(level + TAIL_MARGIN + 1):
        ell = designated_image(x, k)
        if ell is not None and ell != k:
            exceptions[k] = ell
    return TailBehavior(level, kind, exceptions)
