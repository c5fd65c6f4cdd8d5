"""One-sided subshifts of finite type.

A subshift is the set of one-sided symbol sequences allowed by a 0/1
transition matrix, together with the left shift.  Points are restricted to
eventually periodic sequences (a preperiod word followed by a repeating
cycle); these are dense, closed under the shift and under inverse branches,
and make point equality decidable via a normal form.

The metric is ``d(x, y) = lam ** n`` with a contraction base ``0 < lam < 1``
(default 1/2), where ``n`` is the first index at which the sequences
disagree.  Two points at distance < 1 share their first symbol, so every
inverse branch of the shift is globally defined on balls of radius 1.

Words are tuples of small ints; ``parse_word``/``format_word`` convert to
and from digit strings for file formats and the CLI.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass
from functools import lru_cache, cached_property
from typing import Iterable, Sequence

from .errors import (
    DeadSymbolError,
    DepthOverflowError,
    InadmissibleCycleError,
    InadmissiblePointError,
    NonSquareMatrixError,
)

Word = tuple[int, ...]

#: Default cap on the number of depth-k words in a word graph.
VERTEX_BUDGET = 2**20


def parse_word(w: str | Sequence[int]) -> Word:
    """Coerce a digit string or int sequence to a word tuple."""
    if isinstance(w, str):
        return tuple(int(c) for c in w)
    return tuple(int(c) for c in w)


def format_word(w: Word) -> str:
    return "".join(str(c) for c in w)


@dataclass(frozen=True)
class MetricParams:
    """Contraction base and Hölder exponent of the sequence metric.

    ``distance(x, y) = lam ** n`` where n is the first disagreement index,
    so ``distance(shift x, shift y) = distance(x, y) / lam`` whenever x and
    y share their first symbol.
    """

    lam: float = 0.5
    alpha: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.lam < 1.0:
            raise ValueError(f"metric base must lie in (0,1), got {self.lam}")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"Hölder exponent must lie in (0,1], got {self.alpha}")


@dataclass(frozen=True)
class SubshiftSpec:
    """Alphabet size plus 0/1 transition matrix.

    ``transitions[a][b] == 1`` allows the two-letter word ``ab``.  The
    ``mixing`` flag records whether some power of the matrix is entrywise
    positive.  Build instances through :func:`build_subshift`, which
    validates the matrix and computes the flag.
    """

    alphabet_size: int
    transitions: tuple[tuple[int, ...], ...]
    mixing: bool

    def allows(self, a: int, b: int) -> bool:
        return self.transitions[a][b] == 1

    @cached_property
    def successors(self) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(b for b in range(self.alphabet_size) if row[b])
            for row in self.transitions
        )

    @cached_property
    def predecessors(self) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(a for a in range(self.alphabet_size) if self.transitions[a][b])
            for b in range(self.alphabet_size)
        )

    def is_admissible_word(self, w: Word) -> bool:
        if any(not 0 <= c < self.alphabet_size for c in w):
            return False
        return all(self.allows(a, b) for a, b in zip(w, w[1:]))

    def is_admissible_cycle(self, w: Word) -> bool:
        return bool(w) and self.is_admissible_word(w) and self.allows(w[-1], w[0])

    @property
    def is_full_shift(self) -> bool:
        return all(all(e == 1 for e in row) for row in self.transitions)


def build_subshift(alphabet_size: int, transitions: Sequence[Sequence[int]]) -> SubshiftSpec:
    """Validate a transition matrix and compute the mixing flag.

    Raises ``NonSquareMatrixError`` for a malformed matrix and
    ``DeadSymbolError`` when a symbol has no successor or no predecessor.
    A reducible (non-mixing) matrix is legal; only the flag records it.
    """
    if alphabet_size < 1 or len(transitions) != alphabet_size:
        raise NonSquareMatrixError(
            f"expected {alphabet_size} rows, got {len(transitions)}"
        )
    rows = []
    for row in transitions:
        if len(row) != alphabet_size:
            raise NonSquareMatrixError("transition matrix is not square")
        if any(e not in (0, 1) for e in row):
            raise NonSquareMatrixError("transition entries must be 0 or 1")
        rows.append(tuple(int(e) for e in row))
    matrix = tuple(rows)
    for a in range(alphabet_size):
        if not any(matrix[a]):
            raise DeadSymbolError(f"symbol {a} has no successor")
        if not any(matrix[b][a] for b in range(alphabet_size)):
            raise DeadSymbolError(f"symbol {a} has no predecessor")
    return SubshiftSpec(alphabet_size, matrix, _is_primitive(matrix))


def _is_primitive(matrix: tuple[tuple[int, ...], ...]) -> bool:
    """Whether some power of the 0/1 matrix is entrywise positive."""
    n = len(matrix)
    bits = [sum(1 << j for j in range(n) if matrix[i][j]) for i in range(n)]
    cur = bits
    full = (1 << n) - 1
    # Wielandt: a primitive matrix has a positive power by n^2 - 2n + 2.
    for _ in range(n * n - 2 * n + 2):
        if all(row == full for row in cur):
            return True
        cur = [
            _or_rows(bits, row)
            for row in cur
        ]
    return all(row == full for row in cur)


def _or_rows(bits: list[int], row: int) -> int:
    acc = 0
    for j, b in enumerate(bits):
        if row >> j & 1:
            acc |= b
    return acc


def full_shift(alphabet_size: int) -> SubshiftSpec:
    return build_subshift(alphabet_size, [[1] * alphabet_size] * alphabet_size)


def golden_mean_shift() -> SubshiftSpec:
    """Two symbols, word 11 forbidden."""
    return build_subshift(2, [[1, 1], [1, 0]])


def load_subshift(obj: dict) -> SubshiftSpec:
    """Build from the JSON object ``{"alphabet": n, "transitions": [[..]]}``."""
    return build_subshift(int(obj["alphabet"]), obj["transitions"])


def dump_subshift(spec: SubshiftSpec) -> dict:
    return {"alphabet": spec.alphabet_size, "transitions": [list(r) for r in spec.transitions]}


# ---------------------------------------------------------------------------
# symbolic points


def _primitive_root(cycle: Word) -> Word:
    n = len(cycle)
    for d in range(1, n):
        if n % d == 0 and cycle == cycle[:d] * (n // d):
            return cycle[:d]
    return cycle


@dataclass(frozen=True)
class SymbolicPoint:
    """Eventually periodic sequence: preperiod word + repeating cycle.

    Construction normalizes to the unique representation with a primitive
    cycle and the shortest possible preperiod (trailing preperiod symbols
    matching the cycle's last symbol are absorbed by rotating the cycle,
    which leaves the sequence unchanged).  Dataclass equality on the
    normalized fields therefore decides point equality, and the points of
    ``Fix(shift^n)`` are exactly those with an empty preperiod.
    """

    preperiod: Word
    cycle: Word

    def __post_init__(self):
        pre = tuple(self.preperiod)
        cyc = _primitive_root(tuple(self.cycle))
        if not cyc:
            raise ValueError("cycle must be nonempty")
        while pre and pre[-1] == cyc[-1]:
            pre = pre[:-1]
            cyc = (cyc[-1],) + cyc[:-1]
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "cycle", cyc)

    def symbol(self, i: int) -> int:
        p = len(self.preperiod)
        if i < p:
            return self.preperiod[i]
        return self.cycle[(i - p) % len(self.cycle)]

    def prefix(self, m: int) -> Word:
        p = len(self.preperiod)
        if m <= p:
            return self.preperiod[:m]
        reps = (m - p) // len(self.cycle) + 1
        return (self.preperiod + self.cycle * reps)[:m]

    def shift(self, n: int = 1) -> "SymbolicPoint":
        p = len(self.preperiod)
        if n <= p:
            return SymbolicPoint(self.preperiod[n:], self.cycle)
        r = (n - p) % len(self.cycle)
        return SymbolicPoint((), self.cycle[r:] + self.cycle[:r])

    @property
    def is_periodic(self) -> bool:
        return not self.preperiod

    @property
    def period(self) -> int:
        """Minimal period when periodic (cycle is primitive)."""
        return len(self.cycle)

    def prepend(self, a: int) -> "SymbolicPoint":
        return SymbolicPoint((a,) + self.preperiod, self.cycle)

    def __str__(self) -> str:
        return f"{format_word(self.preperiod)}({format_word(self.cycle)})*"


def point(preperiod: str | Sequence[int], cycle: str | Sequence[int]) -> SymbolicPoint:
    """Convenience constructor accepting digit strings, e.g. point("0", "01")."""
    return SymbolicPoint(parse_word(preperiod), parse_word(cycle))


def periodic_point(cycle: str | Sequence[int]) -> SymbolicPoint:
    return SymbolicPoint((), parse_word(cycle))


def check_point(spec: SubshiftSpec, x: SymbolicPoint) -> None:
    """Raise ``InadmissiblePointError`` unless every transition of x is allowed."""
    n = len(x.preperiod) + len(x.cycle)
    for i in range(n):
        a, b = x.symbol(i), x.symbol(i + 1)
        if not (0 <= a < spec.alphabet_size) or not spec.allows(a, b):
            raise InadmissiblePointError(f"{x} violates transitions at index {i}")


def first_disagreement(x: SymbolicPoint, y: SymbolicPoint) -> int | None:
    """First index where the sequences differ; None when x == y."""
    if x == y:
        return None
    bound = (
        len(x.preperiod)
        + len(y.preperiod)
        + math.lcm(len(x.cycle), len(y.cycle))
    )
    for i in range(bound + 1):
        if x.symbol(i) != y.symbol(i):
            return i
    raise AssertionError("distinct normal forms must disagree within the bound")


def distance(x: SymbolicPoint, y: SymbolicPoint, m: MetricParams = MetricParams()) -> float:
    """lam**n with n the first disagreement index; 0 for equal points."""
    n = first_disagreement(x, y)
    if n is None:
        return 0.0
    return m.lam**n


def cylinder_distance(u: Word, v: Word, m: MetricParams = MetricParams()) -> float:
    """Distance scale of the cylinders of two equal-length words."""
    for i, (a, b) in enumerate(zip(u, v)):
        if a != b:
            return m.lam**i
    return 0.0


# ---------------------------------------------------------------------------
# words and word graphs


@lru_cache(maxsize=None)
def admissible_words(spec: SubshiftSpec, k: int) -> tuple[Word, ...]:
    """All admissible words of length k, sorted lexicographically."""
    if k == 0:
        return ((),)
    words: list[Word] = [(a,) for a in range(spec.alphabet_size)]
    for _ in range(k - 1):
        words = [w + (b,) for w in words for b in spec.successors[w[-1]]]
    return tuple(sorted(words))


@dataclass(frozen=True)
class WordGraph:
    """De Bruijn-style graph of admissible depth-k words.

    Vertices are the admissible k-words; there is an edge u -> v exactly
    when u and v overlap in k-1 symbols and the extended word u·v[-1] is
    admissible, so bi-infinite admissible sequences correspond to
    bi-infinite edge paths.  Edge weights are supplied by the algorithms
    that consume the graph (a fresh graph carries none).
    """

    spec: SubshiftSpec
    depth: int
    vertices: tuple[Word, ...]
    edges: tuple[tuple[int, int], ...]
    weights: tuple[float, ...] | None = None  # unset on a fresh graph

    @cached_property
    def index(self) -> dict[Word, int]:
        return {w: i for i, w in enumerate(self.vertices)}

    @cached_property
    def out_edges(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in self.vertices]
        for u, v in self.edges:
            adj[u].append(v)
        return tuple(tuple(a) for a in adj)

    @cached_property
    def in_edges(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in self.vertices]
        for u, v in self.edges:
            adj[v].append(u)
        return tuple(tuple(a) for a in adj)

    def edge_word(self, u: int, v: int) -> Word:
        """The (depth+1)-word read along edge u -> v."""
        return self.vertices[u] + (self.vertices[v][-1],)

    def path_word(self, path: Sequence[int]) -> Word:
        """The word read along a vertex path (first symbols, then the tail)."""
        if not path:
            return ()
        w = list(self.vertices[path[0]])
        for v in path[1:]:
            w.append(self.vertices[v][-1])
        return tuple(w)

    def with_weights(self, weight_of_source) -> "WordGraph":
        """Copy with edge weights, each edge weighted by its source word."""
        ws = tuple(float(weight_of_source(self.vertices[u])) for u, _ in self.edges)
        return WordGraph(self.spec, self.depth, self.vertices, self.edges, ws)


@lru_cache(maxsize=None)
def _word_graph_cached(spec: SubshiftSpec, depth: int) -> WordGraph:
    vertices = admissible_words(spec, depth)
    index = {w: i for i, w in enumerate(vertices)}
    edges = []
    for i, u in enumerate(vertices):
        suffix = u[1:]
        for b in spec.successors[u[-1]]:
            v = suffix + (b,)
            j = index.get(v)
            if j is not None:
                edges.append((i, j))
    return WordGraph(spec, depth, vertices, tuple(edges))


def word_graph(spec: SubshiftSpec, depth: int, budget: int = VERTEX_BUDGET) -> WordGraph:
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if spec.alphabet_size**depth > budget:
        raise DepthOverflowError(
            f"{spec.alphabet_size}^{depth} words exceed the budget of {budget}"
        )
    return _word_graph_cached(spec, depth)


def inverse_branches(spec: SubshiftSpec, y: SymbolicPoint) -> list[SymbolicPoint]:
    """All points x with shift(x) = y; one per admissible prepended symbol."""
    check_point(spec, y)
    y0 = y.symbol(0)
    return [y.prepend(a) for a in spec.predecessors[y0]]


# ---------------------------------------------------------------------------
# walks, cycles, probes


def shortest_connector(spec: SubshiftSpec, a: int, b: int) -> Word | None:
    """Shortest word u with a·u·b admissible (u may be empty); None if b is
    unreachable from a."""
    if spec.allows(a, b):
        return ()
    seen = {a: ()}
    queue = deque([a])
    while queue:
        s = queue.popleft()
        for t in spec.successors[s]:
            if t not in seen:
                seen[t] = seen[s] + (t,)
                if spec.allows(t, b):
                    return seen[t]
                queue.append(t)
    return None


def canonical_cycle(w: Word) -> Word:
    """Primitive root rotated to its lexicographically least rotation.

    This is the canonical name of a periodic *orbit* (rotations of a cycle
    word describe the same orbit, unlike the phase-pinned cycles of
    :class:`SymbolicPoint`).
    """
    w = _primitive_root(tuple(w))
    return min(w[i:] + w[:i] for i in range(len(w)))


def orbit_points(cycle: Word) -> list[SymbolicPoint]:
    """The distinct points of the periodic orbit with the given cycle word."""
    w = _primitive_root(tuple(cycle))
    return [SymbolicPoint((), w[i:] + w[:i]) for i in range(len(w))]


def periodic_probe(spec: SubshiftSpec, w: Word) -> SymbolicPoint:
    """A deterministic admissible point in the cylinder of w.

    Uses the periodic extension of w when the self-junction is admissible,
    otherwise extends w by a shortest admissible return path; as a last
    resort (reducible subshifts) walks forward until a symbol repeats.
    """
    if spec.is_admissible_cycle(w):
        return SymbolicPoint((), w)
    connector = shortest_connector(spec, w[-1], w[0])
    if connector is not None:
        return SymbolicPoint((), w + connector)
    # walk forward deterministically until a symbol repeats, closing a cycle
    walk = list(w)
    pos = {s: i for i, s in enumerate(walk)}
    while True:
        nxt = spec.successors[walk[-1]][0]
        if nxt in pos:
            start = pos[nxt]
            return SymbolicPoint(tuple(walk[:start]), tuple(walk[start:]))
        walk.append(nxt)
        pos[nxt] = len(walk) - 1


def random_cycle(spec: SubshiftSpec, rng: random.Random, length_hint: int = 3) -> Word:
    """Random admissible cycle word of roughly the requested length."""
    for _ in range(64):
        s = rng.randrange(spec.alphabet_size)
        walk = [s]
        for _ in range(max(0, length_hint - 1)):
            walk.append(rng.choice(spec.successors[walk[-1]]))
        connector = shortest_connector(spec, walk[-1], walk[0])
        if connector is not None:
            return tuple(walk) + connector
    raise InadmissibleCycleError("failed to draw an admissible cycle")


def random_point(
    spec: SubshiftSpec,
    rng: random.Random,
    max_preperiod: int = 4,
    cycle_hint: int = 3,
) -> SymbolicPoint:
    """Random eventually periodic admissible point (for tests and probes)."""
    cyc = random_cycle(spec, rng, cycle_hint)
    pre_len = rng.randrange(max_preperiod + 1)
    pre: list[int] = []
    head = cyc[0]
    for _ in range(pre_len):
        preds = spec.predecessors[head]
        if not preds:
            break
        head = rng.choice(preds)
        pre.insert(0, head)
    return SymbolicPoint(tuple(pre), cyc)


def enumerate_paths(graph: WordGraph, length: int) -> Iterable[tuple[int, ...]]:
    """All vertex paths with the given number of edges (small graphs only)."""
    if length == 0:
        for i in range(len(graph.vertices)):
            yield (i,)
        return
    for prefix in enumerate_paths(graph, length - 1):
        for nxt in graph.out_edges[prefix[-1]]:
            yield prefix + (nxt,)


__all__ = [
    "MetricParams",
    "SubshiftSpec",
    "SymbolicPoint",
    "Word",
    "WordGraph",
    "admissible_words",
    "build_subshift",
    "canonical_cycle",
    "check_point",
    "cylinder_distance",
    "distance",
    "dump_subshift",
    "first_disagreement",
    "format_word",
    "full_shift",
    "golden_mean_shift",
    "inverse_branches",
    "load_subshift",
    "orbit_points",
    "parse_word",
    "periodic_point",
    "periodic_probe",
    "point",
    "random_cycle",
    "random_point",
    "shortest_connector",
    "word_graph",
]
