"""Stallings folding for finitely generated subgroups of free groups.

A subgroup is represented by its folded core graph: a based, connected,
generator-labeled graph in which no vertex carries two outgoing or two
incoming edges with the same label. Folding a wedge of generator loops to
a fixed point and pruning spurs yields a canonical object, independent of
fold order; rank and membership read off the graph exactly.

In a free ambient group this graph certifies freeness questions at desk
scale: a pair of elements generates a free group of rank equal to the
graph rank, with no finite normal part to correct for.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass

from .errors import InputError
from .words import Alphabet, Word

__all__ = ["SubgroupGraph", "FreePairCertificate", "stallings_graph", "certify_free_pair"]


def _fold(num_vertices: int, edges: list[tuple[int, int, int]], rng: random.Random | None):
    """Fold labeled edges to a fixed point via union-find.

    ``edges`` holds (u, letter, v) with positive letters. Returns the folded
    graph as (vertex roots, {root: {signed letter: target}}). Stale targets
    inside the adjacency dicts are resolved through find() on read.
    """
    parent = list(range(num_vertices))

    def find(a: int) -> int:
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    adj: list[dict[int, int]] = [{} for _ in range(num_vertices)]
    stack: list[tuple[int, int, int]] = list(edges)
    if rng is not None:
        rng.shuffle(stack)

    def merge(a: int, b: int) -> int:
        if len(adj[a]) < len(adj[b]):
            a, b = b, a
        parent[b] = a
        for sl, t in adj[b].items():
            stack.append((a, sl, t))
        adj[b] = {}
        return a

    while stack:
        u, sl, v = stack.pop()
        u, v = find(u), find(v)
        t = adj[u].get(sl)
        if t is not None:
            t = find(t)
            adj[u][sl] = t
        s = adj[v].get(-sl)
        if s is not None:
            s = find(s)
            adj[v][-sl] = s
        if t == v and s == u:
            continue
        if t is None and s is None:
            adj[u][sl] = v
            adj[v][-sl] = u
        elif t is not None and t != v:
            w = merge(v, t)
            stack.append((find(u), sl, w))
        elif s is not None and s != u:
            w = merge(u, s)
            stack.append((w, sl, find(v)))
        else:
            # one direction already recorded; fill in the other
            adj[u][sl] = v
            adj[v][-sl] = u

    roots = [v for v in range(num_vertices) if find(v) == v]
    resolved: dict[int, dict[int, int]] = {}
    for r in roots:
        resolved[r] = {sl: find(t) for sl, t in adj[r].items()}
    return find(0), resolved


def _prune(basepoint: int, adjacency: dict[int, dict[int, int]]) -> dict[int, dict[int, int]]:
    """Iteratively remove non-basepoint vertices of degree <= 1 (spurs)."""
    degree = {v: len(slots) for v, slots in adjacency.items()}
    queue = deque(v for v, d in degree.items() if d <= 1 and v != basepoint)
    removed: set[int] = set()
    while queue:
        v = queue.popleft()
        if v in removed or v == basepoint or degree[v] > 1:
            continue
        removed.add(v)
        for sl, t in adjacency[v].items():
            if t in removed:
                continue
            del adjacency[t][-sl]
            degree[t] -= 1
            if degree[t] <= 1 and t != basepoint:
                queue.append(t)
        adjacency[v] = {}
    return {v: slots for v, slots in adjacency.items() if v not in removed}


class SubgroupGraph:
    """Folded core graph of a finitely generated subgroup, canonically labeled.

    Vertices are 0..num_vertices-1 with basepoint 0, numbered by traversal
    order from the basepoint, so equal graphs compare equal componentwise.
    ``edges`` lists (src, letter, dst) with positive letters.
    """

    __slots__ = ("alphabet", "origin_generators", "num_vertices", "edges", "_out")

    def __init__(
        self,
        alphabet: Alphabet,
        origin_generators: tuple[Word, ...],
        num_vertices: int,
        edges: tuple[tuple[int, int, int], ...],
    ):
        self.alphabet = alphabet
        self.origin_generators = origin_generators
        self.num_vertices = num_vertices
        self.edges = edges
        out: dict[tuple[int, int], int] = {}
        for u, letter, v in edges:
            out[(u, letter)] = v
            out[(v, -letter)] = u
        self._out = out

    @property
    def rank(self) -> int:
        return len(self.edges) - self.num_vertices + 1

    def contains(self, g: Word) -> bool:
        """True iff the reduced word traces a closed path at the basepoint."""
        if g.alphabet != self.alphabet:
            raise InputError("word is over a different alphabet than the subgroup graph")
        v = 0
        for letter in g.letters:
            nxt = self._out.get((v, letter))
            if nxt is None:
                return False
            v = nxt
        return v == 0

    def export_text(self) -> str:
        """One edge per line: ``src label dst`` with generator names as labels."""
        names = self.alphabet.names
        lines = [f"{u} {names[letter - 1]} {v}" for u, letter, v in self.edges]
        return "\n".join(lines) + ("\n" if lines else "")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SubgroupGraph):
            return NotImplemented
        return (
            self.alphabet == other.alphabet
            and self.num_vertices == other.num_vertices
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.alphabet.names, self.num_vertices, self.edges))

    def __repr__(self) -> str:
        return f"SubgroupGraph(vertices={self.num_vertices}, edges={len(self.edges)}, rank={self.rank})"


def stallings_graph(generators: list[Word] | tuple[Word, ...], fold_seed: int | None = None) -> SubgroupGraph:
    """Fold the wedge of generator loops into the subgroup's core graph.

    The result is independent of fold order; ``fold_seed`` randomizes the
    fold schedule (used to test exactly that). An empty generator list
    yields the trivial graph of rank 0.
    """
    generators = tuple(generators)
    alphabet = generators[0].alphabet if generators else None
    for g in generators:
        if g.alphabet != generators[0].alphabet:
            raise InputError("generators must share one alphabet")
    if alphabet is None:
        alphabet = Alphabet()

    edges: list[tuple[int, int, int]] = []
    next_vertex = 1
    for g in generators:
        if g.is_identity:
            continue
        current = 0
        for i, letter in enumerate(g.letters):
            target = 0 if i == len(g.letters) - 1 else next_vertex
            if i < len(g.letters) - 1:
                next_vertex += 1
            if letter > 0:
                edges.append((current, letter, target))
            else:
                edges.append((target, -letter, current))
            current = target

    rng = random.Random(fold_seed) if fold_seed is not None else None
    base_root, adjacency = _fold(next_vertex, edges, rng)
    adjacency = _prune(base_root, adjacency)

    # canonical renumbering: BFS from the basepoint, slots in label order
    order = sorted({sl for slots in adjacency.values() for sl in slots}, key=lambda sl: (abs(sl), sl < 0))
    index = {base_root: 0}
    bfs = deque([base_root])
    while bfs:
        v = bfs.popleft()
        slots = adjacency[v]
        for sl in order:
            t = slots.get(sl)
            if t is not None and t not in index:
                index[t] = len(index)
                bfs.append(t)
    if len(index) != len(adjacency):
        raise AssertionError("folded graph is not connected")

    canonical_edges = sorted(
        (index[v], sl, index[slots[sl]])
        for v, slots in adjacency.items()
        for sl in slots
        if sl > 0
    )
    return SubgroupGraph(alphabet, generators, len(index), tuple(canonical_edges))


@dataclass(frozen=True)
class FreePairCertificate:
    """Outcome of the rank-2 freeness check for a pair of elements."""

    rank: int
    graph: SubgroupGraph

    @property
    def is_rank_two(self) -> bool:
        return self.rank == 2


def certify_free_pair(x: Word, y: Word) -> FreePairCertificate:
    """Certify whether <x, y> is free of rank 2 (else deficient, rank < 2)."""
    graph = stallings_graph([x, y])
    return FreePairCertificate(graph.rank, graph)
