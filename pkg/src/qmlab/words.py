"""Exact word algebra for finitely generated free groups.

A word is stored as a fully reduced tuple of signed generator indices:
letter ``+k`` is generator ``k-1`` of the alphabet, ``-k`` its inverse.
Reduction happens eagerly at construction, so every ``Word`` is a group
element, never a raw letter string.

The counting primitives at the bottom of the module (``count_occurrences``,
``periodic_count``) are the backend for Brooks counting quasimorphisms and
their exact homogenization.
"""

from __future__ import annotations

import itertools
from array import array
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import InputError

__all__ = [
    "Alphabet",
    "Word",
    "parse_word",
    "count_occurrences",
    "periodic_count",
    "enumerate_words",
    "ball",
    "random_reduced_word",
]

IDENTITY_TOKEN = "e"


@dataclass(frozen=True)
class Alphabet:
    """A finite set of free generators, default rank 2 on ("a", "b").

    Generator names must be alphanumeric, start with a letter, differ from
    the reserved identity token ``e``, and no name may be a prefix of
    another (keeps unspaced word text unambiguous).
    """

    names: tuple[str, ...] = ("a", "b")

    def __post_init__(self) -> None:
        if not self.names:
            raise InputError("alphabet needs at least one generator")
        if len(self.names) > 127:
            raise InputError("alphabet rank is limited to 127")
        seen: set[str] = set()
        for name in self.names:
            if not name or not name[0].isalpha() or not name.isalnum():
                raise InputError(f"invalid generator name: {name!r}")
            if name == IDENTITY_TOKEN:
                raise InputError(f"generator name {IDENTITY_TOKEN!r} is reserved for the identity")
            if name in seen:
                raise InputError(f"duplicate generator name: {name!r}")
            seen.add(name)
        for g0, g1 in itertools.combinations(self.names, 2):
            if g0.startswith(g1) or g1.startswith(g0):
                raise InputError(f"generator names may not be prefixes of each other: {g0!r}, {g1!r}")

    @property
    def rank(self) -> int:
        return len(self.names)

    def identity(self) -> "Word":
        return Word(self, ())

    def generator(self, index: int, sign: int = 1) -> "Word":
        if not 0 <= index < self.rank:
            raise InputError(f"generator index {index} outside [0, {self.rank})")
        if sign not in (1, -1):
            raise InputError(f"sign must be +1 or -1, got {sign}")
        return Word(self, (sign * (index + 1),))

    def generators(self) -> list["Word"]:
        return [self.generator(i) for i in range(self.rank)]

    def word(self, text: str) -> "Word":
        return parse_word(text, self)


#: The default rank-2 alphabet on generators a, b.
DEFAULT_ALPHABET = Alphabet()

_PACK_TABLE = bytes((i + 128) % 256 for i in range(256))


def _reduce_letters(letters: Iterable[int], rank: int) -> tuple[int, ...]:
    out: list[int] = []
    for v in letters:
        if not isinstance(v, int) or v == 0 or abs(v) > rank:
            raise InputError(f"letter {v!r} outside alphabet of rank {rank}")
        if out and out[-1] == -v:
            out.pop()
        else:
            out.append(v)
    return tuple(out)


class Word:
    """A freely reduced word; immutable, hashable, shareable across threads.

    ``letters`` is the reduced tuple of signed indices. The empty tuple is
    the identity. Arithmetic: ``u * v``, ``u ** n``, ``u.inverse()``.
    """

    __slots__ = ("alphabet", "letters", "_packed")

    def __init__(self, alphabet: Alphabet, letters: Iterable[int] = (), *, _reduced: bool = False):
        self.alphabet = alphabet
        if _reduced:
            self.letters = tuple(letters)
        else:
            self.letters = _reduce_letters(letters, alphabet.rank)
        self._packed: bytes | None = None

    @property
    def packed(self) -> bytes:
        """Letters encoded one byte each (offset by 128) for fast scanning."""
        b = self._packed
        if b is None:
            # array('b') writes two's complement; translating by +128 mod 256
            # lands letter v on byte 128+v at C speed
            b = array("b", self.letters).tobytes().translate(_PACK_TABLE)
            self._packed = b
        return b

    # -- basic protocol ------------------------------------------------

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Word):
            return NotImplemented
        return self.letters == other.letters and self.alphabet == other.alphabet

    def __hash__(self) -> int:
        return hash((self.alphabet.names, self.letters))

    def __repr__(self) -> str:
        return f"Word({self.text()!r})"

    @property
    def is_identity(self) -> bool:
        return not self.letters

    # -- group operations ----------------------------------------------

    def _check_same_alphabet(self, other: "Word") -> None:
        if self.alphabet is not other.alphabet and self.alphabet != other.alphabet:
            raise InputError("words live over different alphabets")

    def __mul__(self, other: "Word") -> "Word":
        self._check_same_alphabet(other)
        left = list(self.letters)
        right = other.letters
        i = 0
        n = len(right)
        while left and i < n and left[-1] == -right[i]:
            left.pop()
            i += 1
        return Word(self.alphabet, tuple(left) + right[i:], _reduced=True)

    def inverse(self) -> "Word":
        return Word(self.alphabet, tuple(-v for v in reversed(self.letters)), _reduced=True)

    def __invert__(self) -> "Word":
        return self.inverse()

    def __pow__(self, n: int) -> "Word":
        # u = conj * core * conj^-1 with core cyclically reduced, so
        # core^n concatenates without cancellation.
        if n == 0 or not self.letters:
            return Word(self.alphabet, (), _reduced=True)
        core, conj = self.cyclic_reduce()
        block = core.letters if n > 0 else core.inverse().letters
        inner = Word(self.alphabet, block * abs(n), _reduced=True)
        if conj.is_identity:
            return inner
        return conj * inner * conj.inverse()

    def conjugated_by(self, h: "Word") -> "Word":
        """h * self * h^-1."""
        return h * self * h.inverse()

    def cyclic_reduce(self) -> tuple["Word", "Word"]:
        """Split self = conjugator * core * conjugator^-1, core cyclically reduced."""
        letters = self.letters
        i, j = 0, len(letters)
        while j - i >= 2 and letters[i] == -letters[j - 1]:
            i += 1
            j -= 1
        core = Word(self.alphabet, letters[i:j], _reduced=True)
        conjugator = Word(self.alphabet, letters[:i], _reduced=True)
        return core, conjugator

    @property
    def is_cyclically_reduced(self) -> bool:
        letters = self.letters
        return len(letters) < 2 or letters[0] != -letters[-1]

    # -- text format -----------------------------------------------------

    def text(self, compact: bool = False) -> str:
        """Render as generator tokens with caret exponents, ``e`` for the identity.

        The spaced form (default) is the canonical printer output; the
        compact form drops separators and is used in descriptors.
        """
        if not self.letters:
            return IDENTITY_TOKEN
        names = self.alphabet.names
        tokens: list[str] = []
        for v, run in itertools.groupby(self.letters):
            count = sum(1 for _ in run)
            exp = count if v > 0 else -count
            name = names[abs(v) - 1]
            tokens.append(name if exp == 1 else f"{name}^{exp}")
        return ("" if compact else " ").join(tokens)


def parse_word(text: str, alphabet: Alphabet = DEFAULT_ALPHABET) -> Word:
    """Parse word text such as ``a b^-1 a^3`` (spaces optional) into a Word.

    ``e`` or the empty string denotes the identity. Raises InputError naming
    the offending token on failure.
    """
    names_by_length = sorted(alphabet.names, key=len, reverse=True)
    letters: list[int] = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        matched = None
        for name in names_by_length:
            if text.startswith(name, pos):
                matched = name
                break
        if matched is None:
            if text.startswith(IDENTITY_TOKEN, pos):
                pos += 1
                if pos < n and text[pos] == "^":
                    raise InputError(f"cannot exponentiate the identity token at position {pos - 1}")
                continue
            raise InputError(f"unrecognized token at position {pos}: {text[pos:pos + 8]!r}")
        pos += len(matched)
        exp = 1
        if pos < n and text[pos] == "^":
            pos += 1
            start = pos
            if pos < n and text[pos] == "-":
                pos += 1
            while pos < n and text[pos].isdigit():
                pos += 1
            if pos == start or text[start:pos] == "-":
                raise InputError(f"malformed exponent after {matched!r} at position {start}")
            exp = int(text[start:pos])
        index = alphabet.names.index(matched) + 1
        letter = index if exp > 0 else -index
        letters.extend([letter] * abs(exp))
    return Word(alphabet, letters)


# -- counting primitives -------------------------------------------------


@lru_cache(maxsize=1024)
def _scan_step(needle: bytes) -> int:
    # smallest shift at which the pattern can overlap itself; 0 marks a
    # border-free pattern, whose overlapping count equals bytes.count
    length = len(needle)
    for d in range(1, length):
        if needle[d:] == needle[:-d]:
            return d
    return 0


def _overlapping_count(haystack: bytes, needle: bytes) -> int:
    step = _scan_step(needle)
    if step == 0:
        return haystack.count(needle)
    count = 0
    start = 0
    while True:
        i = haystack.find(needle, start)
        if i < 0:
            return count
        count += 1
        start = i + step


def count_occurrences(pattern: Word, target: Word) -> int:
    """Number of (possibly overlapping) occurrences of pattern inside target.

    Counts every start index i with target[i : i+|pattern|] equal to pattern
    letterwise; both words must be over the same alphabet.
    """
    pattern._check_same_alphabet(target)
    if pattern.is_identity:
        raise InputError("pattern must be nonempty")
    return _overlapping_count(target.packed, pattern.packed)


def periodic_count(pattern: Word, base: Word) -> int:
    """Occurrences of pattern per period of the right-infinite word base^inf.

    Counts start positions in [0, |base|). Requires base nonempty and
    cyclically reduced, which makes base^inf reduced; the result is the
    per-period growth rate of count_occurrences(pattern, base^n) in n.
    """
    pattern._check_same_alphabet(base)
    if pattern.is_identity:
        raise InputError("pattern must be nonempty")
    if base.is_identity:
        raise InputError("base must be nonempty")
    if not base.is_cyclically_reduced:
        raise InputError("base must be cyclically reduced")
    lb, lp = len(base.letters), len(pattern.letters)
    reps = (lb + lp - 1 + lb - 1) // lb
    window = (base.packed * reps)[: lb + lp - 1]
    return _overlapping_count(window, pattern.packed, stop=lb)


# -- enumeration and sampling ---------------------------------------------


def _letter_order(rank: int) -> list[int]:
    # shortlex letter order: a < a^-1 < b < b^-1 < ...
    order: list[int] = []
    for i in range(1, rank + 1):
        order.extend((i, -i))
    return order


def enumerate_words(alphabet: Alphabet, max_length: int) -> Iterator[Word]:
    """Yield all reduced words of length <= max_length in shortlex order."""
    order = _letter_order(alphabet.rank)
    yield Word(alphabet, (), _reduced=True)
    frontier: list[tuple[int, ...]] = [()]
    for _ in range(max_length):
        new_frontier: list[tuple[int, ...]] = []
        for prefix in frontier:
            last = prefix[-1] if prefix else None
            for letter in order:
                if last is not None and letter == -last:
                    continue
                new_frontier.append(prefix + (letter,))
        for letters in new_frontier:
            yield Word(alphabet, letters, _reduced=True)
        frontier = new_frontier


def ball(alphabet: Alphabet, radius: int) -> list[Word]:
    """All reduced words of length <= radius, in shortlex order."""
    return list(enumerate_words(alphabet, radius))


def shortlex_key(word: Word) -> tuple[int, tuple[int, ...]]:
    order = _letter_order(word.alphabet.rank)
    return (len(word.letters), tuple(order.index(v) for v in word.letters))


def random_reduced_word(rng, alphabet: Alphabet, length: int) -> Word:
    """A uniformly random reduced word of exactly the given length.

    ``rng`` is any object with ``randrange`` (e.g. random.Random).
    """
    order = _letter_order(alphabet.rank)
    letters: list[int] = []
    for _ in range(length):
        if letters:
            choices = [v for v in order if v != -letters[-1]]
        else:
            choices = order
        letters.append(choices[rng.randrange(len(choices))])
    return Word(alphabet, letters, _reduced=True)
