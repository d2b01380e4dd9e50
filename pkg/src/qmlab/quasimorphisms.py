"""Brooks counting quasimorphisms, exact homogenization, defect machinery.

Every value is an exact ``Fraction`` (integers for Brooks and homogenized
Brooks maps). Defect upper bounds attached here are certified:

* little-counting Brooks ``f_w``: defect <= 3(|w| - 1). Splitting the
  reduced product z = red(uv) at the cancellation region shows the counts
  inside the cancelled part drop out of f_w(z) - f_w(u) - f_w(v) (the w and
  w^-1 counts cancel exactly), leaving three junction terms each bounded by
  |w| - 1 in absolute value.
* homogenization doubles a defect bound at worst.

True defects are suprema over infinitely many pairs, so the artifact only
ever certifies lower bounds by enumeration (``defect_lower_bound``) plus the
upper bounds above; a lower bound is never reported as the defect itself.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

from .errors import InputError, PreconditionError
from .words import (
    Alphabet,
    Word,
    count_occurrences,
    enumerate_words,
    parse_word,
    periodic_count,
    random_reduced_word,
)

__all__ = [
    "Quasimorphism",
    "brooks",
    "homogenize_exact",
    "homogenize_numeric",
    "numeric_homogenization",
    "linear_combination",
    "delta1",
    "defect_lower_bound",
    "parse_descriptor",
    "NumericHomogenization",
]

KIND_BROOKS = "brooks"
KIND_HOMOGENIZED_BROOKS = "homogenized-brooks"
KIND_LINEAR_COMBINATION = "linear-combination"
KIND_NUMERIC_HOMOGENIZATION = "numeric-homogenization"


class Quasimorphism:
    """A map Word -> Fraction with bounded coboundary defect.

    Immutable; evaluation is pure and reentrant, safe for parallel use.
    ``homogeneous`` is a structural guarantee that f(g^n) = n f(g) holds
    exactly for all integers n (true for homogenized kinds and their
    rational combinations).
    """

    __slots__ = (
        "alphabet",
        "kind",
        "descriptor",
        "pattern",
        "homogeneous",
        "defect_bound",
        "defect_provenance",
        "_evaluate",
    )

    def __init__(
        self,
        alphabet: Alphabet,
        evaluate: Callable[[Word], Fraction],
        kind: str,
        descriptor: str,
        *,
        pattern: Word | None = None,
        homogeneous: bool = False,
        defect_bound: Fraction | None = None,
        defect_provenance: str | None = None,
    ):
        self.alphabet = alphabet
        self._evaluate = evaluate
        self.kind = kind
        self.descriptor = descriptor
        self.pattern = pattern
        self.homogeneous = homogeneous
        self.defect_bound = defect_bound
        self.defect_provenance = defect_provenance

    def __call__(self, word: Word) -> Fraction:
        if word.alphabet != self.alphabet:
            raise InputError("word is over a different alphabet than the quasimorphism")
        return self._evaluate(word)

    def __repr__(self) -> str:
        return f"Quasimorphism({self.descriptor!r})"

    def with_defect_bound(self, bound: Fraction | int) -> "Quasimorphism":
        """Copy of self carrying a user-supplied defect upper bound.

        The bound is trusted; supplying an invalid one voids the numeric
        homogenization guarantee.
        """
        bound = Fraction(bound)
        if bound < 0:
            raise InputError("defect bound must be nonnegative")
        return Quasimorphism(
            self.alphabet,
            self._evaluate,
            self.kind,
            self.descriptor,
            pattern=self.pattern,
            homogeneous=self.homogeneous,
            defect_bound=bound,
            defect_provenance="user-supplied",
        )


def brooks(pattern: Word) -> Quasimorphism:
    """Little-counting Brooks quasimorphism f_w.

    f_w(g) counts all (overlapping) occurrences of w in the reduced word g
    minus the occurrences of w^-1; integer-valued, f_w(e) = 0.
    """
    if pattern.is_identity:
        raise InputError("pattern must be nonempty")
    inv = pattern.inverse()

    def evaluate(g: Word) -> Fraction:
        return Fraction(count_occurrences(pattern, g) - count_occurrences(inv, g))

    bound = Fraction(3 * (len(pattern) - 1))
    return Quasimorphism(
        pattern.alphabet,
        evaluate,
        KIND_BROOKS,
        f"brooks:{pattern.text(compact=True)}",
        pattern=pattern,
        defect_bound=bound,
        defect_provenance="derived",
    )


def homogenize_exact(f: Quasimorphism) -> Quasimorphism:
    """Exact homogenization of a Brooks quasimorphism via periodic counts.

    The result satisfies f(g^n) = n f(g) and f(h g h^-1) = f(g) exactly:
    it evaluates occurrence rates per period of core(g)^inf, where core(g)
    is the cyclic reduction, and rates per period are invariant under
    rotation of the core.
    """
    if f.kind != KIND_BROOKS or f.pattern is None:
        raise PreconditionError(f"homogenize_exact needs a brooks quasimorphism, got kind {f.kind!r}")
    pattern = f.pattern
    inv = pattern.inverse()

    def evaluate(g: Word) -> Fraction:
        core, _ = g.cyclic_reduce()
        if core.is_identity:
            return Fraction(0)
        return Fraction(periodic_count(pattern, core) - periodic_count(inv, core))

    bound = None if f.defect_bound is None else 2 * f.defect_bound
    return Quasimorphism(
        f.alphabet,
        evaluate,
        KIND_HOMOGENIZED_BROOKS,
        f"hom:{f.descriptor}",
        pattern=pattern,
        homogeneous=True,
        defect_bound=bound,
        defect_provenance="derived" if bound is not None else None,
    )


class NumericHomogenization(NamedTuple):
    estimate: Fraction
    error_bound: Fraction


def homogenize_numeric(f: Quasimorphism, g: Word, depth: int) -> NumericHomogenization:
    """Approximate the homogenization of f at g by f(g^depth)/depth.

    Returns the exact rational estimate together with the certified bound
    D/depth on its distance from the true homogenized value, where D is
    f's defect bound.
    """
    if depth < 1:
        raise InputError("depth must be a positive integer")
    if f.defect_bound is None:
        raise PreconditionError("numeric homogenization needs a defect bound on f")
    estimate = f(g ** depth) / depth
    return NumericHomogenization(estimate, Fraction(f.defect_bound, depth))


def numeric_homogenization(f: Quasimorphism, depth: int) -> Quasimorphism:
    """The quasimorphism g -> f(g^depth)/depth (approximately homogeneous)."""
    if depth < 1:
        raise InputError("depth must be a positive integer")
    if f.defect_bound is None:
        raise PreconditionError("numeric homogenization needs a defect bound on f")

    def evaluate(g: Word) -> Fraction:
        return f(g ** depth) / depth

    # |delta f_n| <= ((3(n-1) + n)/n) D <= 4D by telescoping g^n against n g.
    return Quasimorphism(
        f.alphabet,
        evaluate,
        KIND_NUMERIC_HOMOGENIZATION,
        f"numhom:{depth}:{f.descriptor}",
        defect_bound=4 * f.defect_bound,
        defect_provenance="derived",
    )


def linear_combination(coefficients: Sequence[Fraction | int], parts: Sequence[Quasimorphism]) -> Quasimorphism:
    """Pointwise rational combination sum(c_i * f_i)."""
    if len(coefficients) != len(parts):
        raise InputError(f"{len(coefficients)} coefficients for {len(parts)} parts")
    if not parts:
        raise InputError("linear combination needs at least one part")
    alphabet = parts[0].alphabet
    for part in parts:
        if part.alphabet != alphabet:
            raise InputError("all parts must share one alphabet")
    coeffs = [Fraction(c) for c in coefficients]

    def evaluate(g: Word) -> Fraction:
        return sum((c * part(g) for c, part in zip(coeffs, parts)), Fraction(0))

    bound: Fraction | None = Fraction(0)
    for c, part in zip(coeffs, parts):
        if part.defect_bound is None:
            bound = None
            break
        bound += abs(c) * part.defect_bound
    descriptor = "lincomb:" + ",".join(f"{c}*{part.descriptor}" for c, part in zip(coeffs, parts))
    return Quasimorphism(
        alphabet,
        evaluate,
        KIND_LINEAR_COMBINATION,
        descriptor,
        homogeneous=all(part.homogeneous for part in parts),
        defect_bound=bound,
        defect_provenance="derived" if bound is not None else None,
    )


def delta1(f: Quasimorphism) -> Callable[[Word, Word], Fraction]:
    """The coboundary pair map (g1, g2) -> f(g1) + f(g2) - f(g1 g2)."""

    def h(g1: Word, g2: Word) -> Fraction:
        return f(g1) + f(g2) - f(g1 * g2)

    return h


def _ball_size(rank: int, radius: int) -> int:
    size = 1
    layer = 1
    for length in range(1, radius + 1):
        layer = 2 * rank if length == 1 else layer * (2 * rank - 1)
        size += layer
    return size


def defect_lower_bound(f: Quasimorphism, radius: int, sample_budget: int = 200_000) -> Fraction:
    """Certified lower bound for the defect sup |f(g1 g2) - f(g1) - f(g2)|.

    Exhausts all pairs of words of length <= radius when the pair count fits
    the budget (monotone nondecreasing in radius there, since the balls are
    nested), otherwise evaluates a deterministic sample of that many pairs.
    Every returned value is a genuine lower bound and never exceeds any
    valid defect upper bound.
    """
    if radius < 1:
        raise InputError("radius must be >= 1")
    if sample_budget < 1:
        raise InputError("sample budget must be >= 1")
    best = Fraction(0)
    size = _ball_size(f.alphabet.rank, radius)
    if size * size <= sample_budget:
        values = {w.letters: f(w) for w in enumerate_words(f.alphabet, radius)}
        words = [Word(f.alphabet, ls, _reduced=True) for ls in values]
        for g1 in words:
            f1 = values[g1.letters]
            for g2 in words:
                residual = abs(f(g1 * g2) - f1 - values[g2.letters])
                if residual > best:
                    best = residual
    else:
        rng = random.Random(0x5EED ^ radius)
        for _ in range(sample_budget):
            g1 = random_reduced_word(rng, f.alphabet, rng.randrange(radius + 1))
            g2 = random_reduced_word(rng, f.alphabet, rng.randrange(radius + 1))
            residual = abs(f(g1 * g2) - f(g1) - f(g2))
            if residual > best:
                best = residual
    return best


# -- descriptors -----------------------------------------------------------


def _parse_term(text: str, alphabet: Alphabet) -> Quasimorphism:
    if text.startswith("hom:"):
        inner = _parse_term(text[len("hom:"):], alphabet)
        if inner.kind != KIND_BROOKS:
            raise InputError(f"hom: applies to brooks terms only, got {text!r}")
        return homogenize_exact(inner)
    if text.startswith("brooks:"):
        pattern = parse_word(text[len("brooks:"):], alphabet)
        if pattern.is_identity:
            raise InputError(f"empty pattern in descriptor {text!r}")
        return brooks(pattern)
    if text.startswith("numhom:"):
        rest = text[len("numhom:"):]
        depth_text, _, inner_text = rest.partition(":")
        try:
            depth = int(depth_text)
        except ValueError:
            raise InputError(f"malformed depth in descriptor {text!r}") from None
        return numeric_homogenization(_parse_term(inner_text, alphabet), depth)
    raise InputError(f"unrecognized quasimorphism descriptor: {text!r}")


def parse_descriptor(text: str, alphabet: Alphabet) -> Quasimorphism:
    """Build a quasimorphism from its descriptor text.

    Grammar: ``brooks:<word>``, ``hom:brooks:<word>``,
    ``numhom:<depth>:<term>``, or ``lincomb:<coeff>*<term>,...`` with exact
    rational coefficients such as ``1/2`` or ``-1``. Linear combination
    parts are single terms (no nesting).
    """
    text = text.strip()
    if text.startswith("lincomb:"):
        body = text[len("lincomb:"):]
        coefficients: list[Fraction] = []
        parts: list[Quasimorphism] = []
        for chunk in body.split(","):
            coeff_text, star, term_text = chunk.partition("*")
            if not star:
                raise InputError(f"lincomb part {chunk!r} must look like coeff*term")
            try:
                coefficients.append(Fraction(coeff_text))
            except (ValueError, ZeroDivisionError):
                raise InputError(f"malformed coefficient {coeff_text!r}") from None
            parts.append(_parse_term(term_text, alphabet))
        return linear_combination(coefficients, parts)
    return _parse_term(text, alphabet)
