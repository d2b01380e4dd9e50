"""Bounded 2-cocycles in the homogeneous model, with exact identity checkers.

A cocycle here is a map c : Word^3 -> Fraction. The primary constructor is
``coboundary_cocycle``: for a homogeneous quasimorphism f,

    c_f(g0, g1, g2) = f(g0^-1 g1) + f(g1^-1 g2) + f(g2^-1 g0),

which is invariant, alternating and restriction-homogeneous (its
inhomogeneous form vanishes on all pairs of powers of a common element).
On free groups every degree-2 bounded class arises this way, so c_f covers
every class the toolkit needs.

Checkers return exact residuals: a residual of 0 is a proof for the tested
instance, not a tolerance pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

from .errors import InputError, PreconditionError
from .quasimorphisms import Quasimorphism
from .subgroups import SubgroupGraph
from .words import Alphabet, Word, enumerate_words

__all__ = [
    "BoundedCocycle",
    "TwistWitness",
    "RestrictionWitness",
    "coboundary_cocycle",
    "to_inhomogeneous",
    "from_inhomogeneous",
    "cocycle_identity_residual",
    "check_restriction_homogeneous",
    "homogeneous_sum_residual",
    "tetrahedron_gap",
    "propagate_twist",
    "find_twist_witness",
    "restriction_nontrivial",
]

PROP_INVARIANT = "invariant"
PROP_ALTERNATING = "alternating"
PROP_RESTRICTION_HOMOGENEOUS = "restriction-homogeneous"


class BoundedCocycle:
    """An evaluatable 2-cocycle c : Word^3 -> Fraction.

    ``properties`` records which structural identities the evaluator is
    claimed to satisfy; checkers exist to verify the claims exactly on
    sampled inputs. Immutable and pure, safe for parallel evaluation.
    """

    __slots__ = ("alphabet", "provenance", "properties", "_evaluate", "_quasimorphism")

    def __init__(
        self,
        alphabet: Alphabet,
        evaluate: Callable[[Word, Word, Word], Fraction],
        provenance: str,
        properties: Iterable[str] = (),
        _quasimorphism: Quasimorphism | None = None,
    ):
        self.alphabet = alphabet
        self._evaluate = evaluate
        self.provenance = provenance
        self.properties = frozenset(properties)
        self._quasimorphism = _quasimorphism

    def __call__(self, g0: Word, g1: Word, g2: Word) -> Fraction:
        return self._evaluate(g0, g1, g2)

    def __repr__(self) -> str:
        return f"BoundedCocycle({self.provenance!r})"

    @property
    def is_restriction_homogeneous(self) -> bool:
        return PROP_RESTRICTION_HOMOGENEOUS in self.properties


@dataclass(frozen=True)
class TwistWitness:
    """A triple (g0, h0, e) with |c(g0, h0, e)| = 3 * epsilon > 0."""

    triple: tuple[Word, Word, Word]
    epsilon: Fraction


@dataclass(frozen=True)
class RestrictionWitness:
    """A triple of subgroup elements on which c is nonzero.

    Certifies that the restricted class is nonzero: for a free subgroup a
    restriction-homogeneous cocycle represents the zero class only if it
    vanishes identically on the subgroup.
    """

    triple: tuple[Word, Word, Word]
    value: Fraction


def coboundary_cocycle(f: Quasimorphism) -> BoundedCocycle:
    """The cocycle c_f of a homogeneous quasimorphism f.

    Requires structural homogeneity (homogenized kinds or their rational
    combinations); for such f the evaluator is invariant, alternating and
    restriction-homogeneous, with sup |c_f| bounded by any defect bound
    of f.
    """
    if not f.homogeneous:
        raise PreconditionError(
            f"coboundary cocycle needs a homogeneous quasimorphism; "
            f"{f.descriptor!r} has kind {f.kind!r} (hint: wrap brooks patterns in hom:)"
        )

    def evaluate(g0: Word, g1: Word, g2: Word) -> Fraction:
        return f(g0.inverse() * g1) + f(g1.inverse() * g2) + f(g2.inverse() * g0)

    return BoundedCocycle(
        f.alphabet,
        evaluate,
        provenance=f"coboundary-of:{f.descriptor}",
        properties=(PROP_INVARIANT, PROP_ALTERNATING, PROP_RESTRICTION_HOMOGENEOUS),
        _quasimorphism=f,
    )


def to_inhomogeneous(c: BoundedCocycle) -> Callable[[Word, Word], Fraction]:
    """Convert to the two-variable bar form h(g1, g2) = c(e, g1, g1 g2)."""
    e = c.alphabet.identity()

    def h(g1: Word, g2: Word) -> Fraction:
        return c(e, g1, g1 * g2)

    return h


def from_inhomogeneous(
    h: Callable[[Word, Word], Fraction],
    alphabet: Alphabet,
    provenance: str = "external",
    properties: Iterable[str] = (),
) -> BoundedCocycle:
    """Convert a two-variable bar form back: c(g0, g1, g2) = h(g0^-1 g1, g1^-1 g2).

    Inverse of ``to_inhomogeneous`` on invariant cocycles.
    """

    def evaluate(g0: Word, g1: Word, g2: Word) -> Fraction:
        return h(g0.inverse() * g1, g1.inverse() * g2)

    return BoundedCocycle(alphabet, evaluate, provenance=provenance, properties=properties)


def cocycle_identity_residual(c: BoundedCocycle, quadruple: tuple[Word, Word, Word, Word]) -> Fraction:
    """The simplicial differential on a quadruple; 0 for genuine cocycles.

    d2c(g0, g1, g2, g3) = c(g1,g2,g3) - c(g0,g2,g3) + c(g0,g1,g3) - c(g0,g1,g2).
    """
    g0, g1, g2, g3 = quadruple
    return c(g1, g2, g3) - c(g0, g2, g3) + c(g0, g1, g3) - c(g0, g1, g2)


def check_restriction_homogeneous(c: BoundedCocycle, g: Word, n: int, m: int) -> bool:
    """True iff c(e, g^n, g^m) = 0 exactly."""
    e = g.alphabet.identity()
    return c(e, g ** n, g ** m) == 0


def homogeneous_sum_residual(c: BoundedCocycle, g: Word, h: Word, N: int) -> Fraction:
    """Residual of the power-sum identity; 0 for restriction-homogeneous cocycles.

    Computes c(g^-(N+1), h, e) - sum_{i=0..N} c(g^-1, g^i h, e). Induction on
    the cocycle identity applied to (g^-(N+1), g^-(N+2), h, e) forces this
    to vanish whenever c is invariant, alternating and vanishes on triples
    (e, g^n, g^m).
    """
    if N < 0:
        raise InputError("N must be nonnegative")
    e = g.alphabet.identity()
    ginv = g.inverse()
    total = Fraction(0)
    power = e
    for _ in range(N + 1):
        total += c(ginv, power * h, e)
        power = power * g
    return c(g ** (-N - 1), h, e) - total


def tetrahedron_gap(c: BoundedCocycle, g: Word, h: Word, y: Word) -> Fraction:
    """Slack of |c(g,y,e) - c(g,h,e)| <= |c(h,y,e)| + |c(g^-1 h, g^-1 y, e)|.

    Nonnegative for invariant alternating cocycles: the cocycle identity on
    the quadruple (h, g, y, e) rewrites the left side as a difference of the
    two right-side terms.
    """
    e = g.alphabet.identity()
    ginv = g.inverse()
    bound = abs(c(h, y, e)) + abs(c(ginv * h, ginv * y, e))
    return bound - abs(c(g, y, e) - c(g, h, e))


def propagate_twist(
    c: BoundedCocycle,
    triple: tuple[Word, Word, Word],
    h: Word,
    epsilon: Fraction,
) -> int | None:
    """Given |c(triple)| >= 3*epsilon, find a face of the tetrahedron over h
    with |c| >= epsilon.

    Returns j in {0, 1, 2} for the face omitting triple[j]: 0 -> (g1,g2,h),
    1 -> (g0,g2,h), 2 -> (g0,g1,h). The cocycle identity guarantees some
    face qualifies, so None is only possible for corrupted evaluators.
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise InputError("epsilon must be positive")
    g0, g1, g2 = triple
    if abs(c(g0, g1, g2)) < 3 * epsilon:
        raise PreconditionError("triple is not 3*epsilon-twisted")
    faces = ((g1, g2, h), (g0, g2, h), (g0, g1, h))
    for j, face in enumerate(faces):
        if abs(c(*face)) >= epsilon:
            return j
    return None


def find_twist_witness(c: BoundedCocycle, radius: int) -> TwistWitness | None:
    """First pair (g0, h0) in shortlex order with c(g0, h0, e) nonzero.

    Scans |g0|, |h0| <= radius; returns the witness with
    epsilon = |c(g0, h0, e)| / 3, or None when the search space is exhausted.
    """
    if radius < 1:
        raise InputError("radius must be >= 1")
    e = c.alphabet.identity()
    candidates = list(enumerate_words(c.alphabet, radius))
    for g0 in candidates:
        for h0 in candidates:
            value = c(g0, h0, e)
            if value != 0:
                return TwistWitness((g0, h0, e), abs(value) / 3)
    return None


def _subgroup_ball(x: Word, y: Word, radius: int) -> list[Word]:
    """Elements of <x, y> of word length <= radius in the generators.

    Enumerates formal reduced words over {x, x^-1, y, y^-1} in shortlex
    order and deduplicates by the ambient group element; order of first
    discovery is kept, so the output is deterministic.
    """
    gens = (x, x.inverse(), y, y.inverse())
    seen: dict[tuple[int, ...], Word] = {}
    out: list[Word] = []
    e = x.alphabet.identity()
    seen[e.letters] = e
    out.append(e)
    # formal letters 0..3; letter i cancels letter i^1
    frontier: list[tuple[tuple[int, ...], Word]] = [((), e)]
    for _ in range(radius):
        new_frontier: list[tuple[tuple[int, ...], Word]] = []
        for formal, element in frontier:
            last = formal[-1] if formal else None
            for i, gen in enumerate(gens):
                if last is not None and i == last ^ 1:
                    continue
                candidate = element * gen
                new_frontier.append((formal + (i,), candidate))
                if candidate.letters not in seen:
                    seen[candidate.letters] = candidate
                    out.append(candidate)
        frontier = new_frontier
    return out


def restriction_nontrivial(
    c: BoundedCocycle,
    H: SubgroupGraph,
    generators: tuple[Word, Word],
    radius: int = 3,
) -> RestrictionWitness | None:
    """Search for a triple of H-elements on which c is nonzero.

    Checks the generating pair (x, y, e) first, then all triples of
    elements of H-word-length <= radius in deterministic order. A witness
    certifies the restricted class is nonzero; None only means no witness
    up to this radius, never that the restriction is trivial.
    """
    if radius < 0:
        raise InputError("radius must be nonnegative")
    x, y = generators
    if tuple(H.origin_generators) != (x, y):
        raise InputError("generators do not match the subgroup graph they were folded into")
    e = c.alphabet.identity()
    value = c(x, y, e)
    if value != 0:
        return RestrictionWitness((x, y, e), value)

    elements = _subgroup_ball(x, y, radius)
    f = c._quasimorphism
    if f is not None:
        # c(t0,t1,t2) = f(t0^-1 t1) + f(t1^-1 t2) + f(t2^-1 t0): precompute f
        # on all ordered quotients so the cubic scan is pure table lookups
        # (integer arithmetic for integer-valued f).
        inverses = [t.inverse() for t in elements]
        size = len(elements)
        matrix: list[list] = []
        for i in range(size):
            inv = inverses[i]
            row = []
            for j in range(size):
                value = f(inv * elements[j])
                row.append(int(value) if value.denominator == 1 else value)
            matrix.append(row)
        indices = range(size)
        for i0 in indices:
            row0 = matrix[i0]
            for i1 in indices:
                left = row0[i1]
                row1 = matrix[i1]
                for i2 in indices:
                    if left + row1[i2] + matrix[i2][i0]:
                        triple = (elements[i0], elements[i1], elements[i2])
                        return RestrictionWitness(triple, c(*triple))
        return None

    for t0 in elements:
        for t1 in elements:
            for t2 in elements:
                value = c(t0, t1, t2)
                if value != 0:
                    return RestrictionWitness((t0, t1, t2), value)
    return None
