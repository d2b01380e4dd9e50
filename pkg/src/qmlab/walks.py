"""Seeded lazy simple random walks on a free group.

Steps are uniform draws from a finite symmetric step set containing the
identity. Randomness is counter-based: the word at step k of stream s is a
pure function of (master seed, s, k), so trajectories are reproducible
byte-for-byte, support random access, and are independent of worker count
or scheduling. Streams with distinct ids are decorrelated through a
splitmix-style mixer; the contract is determinism plus pairwise-distinct
streams, not cryptographic quality.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigError
from .words import Alphabet, Word

__all__ = [
    "WalkConfig",
    "Walker",
    "Trajectory",
    "default_step_set",
    "default_walk_config",
    "make_walker",
    "sample_position",
    "sample_pair",
    "sample_trajectory",
]

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(x: int) -> int:
    x &= _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def _stream_seed(master_seed: int, stream_id: int) -> int:
    return _mix64(master_seed ^ _mix64((stream_id + 1) * _GOLDEN))


def _uniform_index(stream_seed: int, step: int, n: int) -> int:
    # rejection sampling keeps the draw exactly uniform on range(n)
    v = _mix64((stream_seed + (step + 1) * _GOLDEN) & _MASK)
    threshold = (1 << 64) - ((1 << 64) % n)
    while v >= threshold:
        v = _mix64((v + _GOLDEN) & _MASK)
    return v % n


def default_step_set(alphabet: Alphabet) -> tuple[Word, ...]:
    """The identity plus every generator and its inverse."""
    steps: list[Word] = [alphabet.identity()]
    for i in range(alphabet.rank):
        steps.append(alphabet.generator(i, 1))
        steps.append(alphabet.generator(i, -1))
    return tuple(steps)


@dataclass(frozen=True)
class WalkConfig:
    """Step set, master seed and laziness enforcement for a family of walks.

    The step set must be symmetric (closed under inversion); when
    ``check_lazy`` is set the identity must belong to it, making the walk
    lazy. Steps are drawn uniformly; weighted measures are rejected by
    construction.
    """

    step_words: tuple[Word, ...]
    seed: int
    check_lazy: bool = True

    def __post_init__(self) -> None:
        if not self.step_words:
            raise ConfigError("step set is empty")
        alphabet = self.step_words[0].alphabet
        letter_sets = set()
        for s in self.step_words:
            if s.alphabet != alphabet:
                raise ConfigError("step words must share one alphabet")
            letter_sets.add(s.letters)
        if len(letter_sets) != len(self.step_words):
            raise ConfigError("step set contains duplicates")
        for s in self.step_words:
            if s.inverse().letters not in letter_sets:
                raise ConfigError(f"step set is not symmetric: missing inverse of {s.text()!r}")
        if self.check_lazy and () not in letter_sets:
            raise ConfigError("lazy walk requires the identity in the step set")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer")

    @property
    def alphabet(self) -> Alphabet:
        return self.step_words[0].alphabet


def default_walk_config(seed: int, alphabet: Alphabet | None = None) -> WalkConfig:
    alphabet = alphabet if alphabet is not None else Alphabet()
    return WalkConfig(default_step_set(alphabet), seed)


@dataclass(frozen=True)
class Trajectory:
    """Positions x_0 = e, x_1, ..., x_n and the increments that produced them."""

    positions: tuple[Word, ...]
    increments: tuple[Word, ...]

    def log_text(self) -> str:
        """One position per line in word text format, for audit."""
        return "\n".join(p.text() for p in self.positions) + "\n"


class Walker:
    """Single-owner iterator over one walk stream; positions are cached.

    Distinct (config.seed, stream_id) pairs give independent streams; the
    same pair always reproduces the same trajectory.
    """

    __slots__ = ("config", "stream_id", "_seed", "_positions", "_increments")

    def __init__(self, config: WalkConfig, stream_id: int):
        if stream_id < 0:
            raise ConfigError("stream id must be nonnegative")
        self.config = config
        self.stream_id = stream_id
        self._seed = _stream_seed(config.seed & _MASK, stream_id)
        self._positions: list[Word] = [config.alphabet.identity()]
        self._increments: list[Word] = []

    def increment(self, k: int) -> Word:
        """The k-th sampled step (1-based), a pure function of (seed, stream, k)."""
        steps = self.config.step_words
        return steps[_uniform_index(self._seed, k, len(steps))]

    def position(self, n: int) -> Word:
        """x_n, the reduced product of the first n increments."""
        if n < 0:
            raise ConfigError("step count must be nonnegative")
        while len(self._increments) < n:
            k = len(self._increments) + 1
            g = self.increment(k)
            self._increments.append(g)
            self._positions.append(self._positions[-1] * g)
        return self._positions[n]

    def trajectory(self, n: int) -> Trajectory:
        self.position(n)
        return Trajectory(tuple(self._positions[: n + 1]), tuple(self._increments[:n]))


def make_walker(config: WalkConfig, stream_id: int) -> Walker:
    return Walker(config, stream_id)


def sample_position(walker: Walker, n: int) -> Word:
    return walker.position(n)


def sample_pair(config: WalkConfig, trial_index: int, n: int, m: int) -> tuple[Word, Word]:
    """Independent positions (x_n, y_m) for one trial.

    Trial t draws x from stream 2t and y from stream 2t+1, so trials are
    independent of each other and of evaluation order.
    """
    if trial_index < 0:
        raise ConfigError("trial index must be nonnegative")
    x = Walker(config, 2 * trial_index).position(n)
    y = Walker(config, 2 * trial_index + 1).position(m)
    return x, y


def sample_trajectory(config: WalkConfig, stream_id: int, n: int) -> Trajectory:
    return Walker(config, stream_id).trajectory(n)
