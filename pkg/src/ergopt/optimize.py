"""Ergodic optimization on the word graph.

Maximal Birkhoff averages, maximizing periodic orbits, calibrated
sub-actions, the coboundary deficiency, the Mañé action table, and the
Aubry set, all computed on the depth-k word graph of a locally constant
potential, where the mean edge weight of a cycle equals the Birkhoff
average of the corresponding periodic orbit.

Weights that are ints or Fractions are processed in exact rational
arithmetic; float weights use float arithmetic with a configurable zero
tolerance (default 1e-9).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache

import networkx as nx
import numpy as np

from .errors import (
    BudgetExceededError,
    CalibrationViolationError,
    InadmissibleCycleError,
    NoCycleError,
    NonConvergenceError,
    ResolutionTooCoarseError,
    ValidationError,
)
from .potential import Potential, holder_constant
from .sft import (
    SubshiftSpec,
    SymbolicPoint,
    Word,
    WordGraph,
    admissible_words,
    canonical_cycle,
    check_point,
    format_word,
    word_graph,
)

DEFAULT_TOLERANCE = 1e-9


# ---------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class MaxResult:
    """Outcome of the maximal-ergodic-average computation.

    ``critical_cycles`` lists the simple cycles of the word graph whose mean
    weight equals ``m0`` (within ``tolerance``), each given as a tuple of
    vertex words rotated to start at its least vertex, the whole list sorted
    lexicographically (so the head of the list is the deterministic
    tie-break winner).
    """

    m0: float | Fraction
    critical_cycles: tuple[tuple[Word, ...], ...]
    tolerance: float
    depth: int
    exact: bool
    complete: bool = True  # False when enumeration hit the cycle budget

    @property
    def cycle_words(self) -> tuple[Word, ...]:
        """Canonical symbol cycle words (primitive, least rotation)."""
        return tuple(
            canonical_cycle(tuple(v[0] for v in cyc)) for cyc in self.critical_cycles
        )

    @property
    def unique(self) -> bool:
        return len(self.critical_cycles) == 1


@dataclass(frozen=True)
class BruteForceResult:
    """Exact maximum over all periodic orbits up to a period cap."""

    m0: float | Fraction
    cycles: tuple[Word, ...]  # canonical cycle words of all argmax orbits
    gap: float | Fraction | None  # m0 minus the best non-maximizing mean
    n_orbits: int

    def __iter__(self):
        return iter((self.m0, list(self.cycles)))


@dataclass(frozen=True)
class SubAction:
    """Calibrated sub-action V on (k-1)-words (k >= 2) or symbols (k = 1).

    V satisfies A(w) - m0 + V(prefix) - V(shifted prefix) <= 0 on every
    depth-k cylinder, with equality attained along some in-edge of every
    vertex reachable from the critical cycles, and is normalized to
    max V = 0.
    """

    spec: SubshiftSpec
    depth: int
    values: dict[Word, float | Fraction]
    m0: float | Fraction
    potential_depth: int

    def value(self, w: Word):
        return self.values[tuple(w[: self.depth])]

    def shifted_value(self, w: Word):
        return self.values[tuple(w[1 : 1 + self.depth])]


@dataclass(frozen=True)
class Deficiency:
    """B = A - m0 + V - V∘shift as a locally constant function.

    B is nonpositive (within tolerance) everywhere; ``mather_edges`` are
    the word-graph edges where it vanishes, and the recurrent part of that
    subgraph carries every maximizing cycle.
    """

    spec: SubshiftSpec
    depth: int  # cylinder depth of B (max(potential depth, 2))
    values: dict[Word, float | Fraction]
    graph_depth: int  # depth of the word graph the edges refer to
    mather_edges: tuple[tuple[Word, Word], ...]
    recurrent_edges: tuple[tuple[Word, Word], ...]
    tolerance: float

    def value(self, w: Word):
        return self.values[tuple(w[: self.depth])]

    def edge_value(self, u: Word, v: Word):
        return self.value(tuple(u) + (v[-1],))


@dataclass(frozen=True)
class ManeTable:
    """Mañé action potential at cylinder resolution.

    ``entry(u, v)`` is the supremum of sum(A - m0) over nonempty admissible
    paths u -> v in the depth-k word graph (None when v is unreachable,
    possible only for non-mixing subshifts).  ``bound_q`` is the empirical
    maximum entry, recorded as the table's uniform upper bound.
    """

    words: tuple[Word, ...]
    table: tuple[tuple[object, ...], ...]  # rows of numbers / None
    m0: float | Fraction
    bound_q: float | Fraction
    tolerance: float
    critical_words: frozenset[Word]

    @cached_property
    def index(self) -> dict[Word, int]:
        return {w: i for i, w in enumerate(self.words)}

    def entry(self, u, v):
        from .sft import parse_word

        return self.table[self.index[parse_word(u)]][self.index[parse_word(v)]]


@dataclass(frozen=True)
class AubrySet:
    """Vertices u with S(u, u) = 0 (within tolerance)."""

    words: frozenset[Word]
    tolerance: float

    def __contains__(self, w) -> bool:
        from .sft import parse_word

        return parse_word(w) in self.words


# ---------------------------------------------------------------------------
# maximum mean cycle


def _edge_weights(a: Potential, g: WordGraph) -> list:
    """Weight of edge (u, v) = value of A on the source cylinder."""
    return [a.value(g.vertices[u]) for u, _v in g.edges]


def _karp_component(
    nodes: list[int],
    in_edges: dict[int, list[tuple[int, object]]],
    zero,
):
    """Karp's recurrence for the max mean cycle of one strongly connected
    component; ``in_edges`` maps local target -> [(local source, weight)]."""
    n = len(nodes)
    prev = [None] * n
    prev[0] = zero
    table = [prev]
    for _ in range(n):
        cur = [None] * n
        for v in range(n):
            best = None
            for u, w in in_edges[v]:
                if prev[u] is not None:
                    cand = prev[u] + w
                    if best is None or cand > best:
                        best = cand
            cur[v] = best
        table.append(cur)
        prev = cur
    best_mean = None
    d_n = table[n]
    for v in range(n):
        if d_n[v] is None:
            continue
        worst = None
        for j in range(n):
            if table[j][v] is None:
                continue
            cand = (d_n[v] - table[j][v]) / (n - j)
            if worst is None or cand < worst:
                worst = cand
        if worst is not None and (best_mean is None or worst > best_mean):
            best_mean = worst
    return best_mean


def max_mean(
    a: Potential,
    tolerance: float = DEFAULT_TOLERANCE,
    cycle_budget: int = 10_000,
) -> MaxResult:
    """Maximal ergodic average of a locally constant potential.

    Runs the length-indexed Bellman recurrence per strongly connected
    component of the word graph, then extracts every simple cycle of mean
    m0 from the tight subgraph of a globally relaxed subsolution.
    Deterministic tie-break: cycles are reported sorted by their vertex
    sequences.  Degenerate potentials (e.g. constants) can have
    exponentially many critical cycles; past ``cycle_budget`` the result
    is truncated to the deterministic shortest cycle through the least
    recurrent vertex, with ``complete`` cleared.
    """
    g = word_graph(a.spec, a.depth)
    weights = _edge_weights(a, g)
    exact = a.exact
    zero = Fraction(0) if exact else 0.0

    dg = nx.DiGraph()
    dg.add_nodes_from(range(len(g.vertices)))
    dg.add_edges_from(g.edges)

    m0 = None
    for comp in nx.strongly_connected_components(dg):
        nodes = sorted(comp)
        if len(nodes) == 1 and not dg.has_edge(nodes[0], nodes[0]):
            continue
        loc = {v: i for i, v in enumerate(nodes)}
        in_edges: dict[int, list[tuple[int, object]]] = {i: [] for i in range(len(nodes))}
        for (u, v), w in zip(g.edges, weights):
            if u in loc and v in loc:
                in_edges[loc[v]].append((loc[u], w))
        cand = _karp_component(nodes, in_edges, zero)
        if cand is not None and (m0 is None or cand > m0):
            m0 = cand
    if m0 is None:
        raise NoCycleError("word graph has no cycle")

    cycles, complete = _critical_cycles(g, weights, m0, tolerance, exact, cycle_budget)
    return MaxResult(m0, cycles, tolerance, a.depth, exact, complete)


def _critical_cycles(
    g: WordGraph,
    weights: list,
    m0,
    tolerance: float,
    exact: bool,
    cycle_budget: int,
) -> tuple[tuple[Word, ...], ...]:
    n = len(g.vertices)
    zero = Fraction(0) if exact else 0.0
    v_fn = [zero] * n
    for _ in range(n):
        changed = False
        for (u, v), w in zip(g.edges, weights):
            cand = v_fn[u] + w - m0
            if cand > v_fn[v]:
                v_fn[v] = cand
                changed = True
        if not changed:
            break

    tol = 0 if exact else tolerance
    tight = nx.DiGraph()
    weight_of = {}
    for (u, v), w in zip(g.edges, weights):
        weight_of[(u, v)] = w
        if w - m0 + v_fn[u] - v_fn[v] >= -tol:
            tight.add_edge(u, v)

    out = []
    complete = True
    for cyc in nx.simple_cycles(tight):
        mean = sum(
            weight_of[(cyc[i], cyc[(i + 1) % len(cyc)])] for i in range(len(cyc))
        ) / len(cyc)
        if exact:
            if mean != m0:
                continue
        elif abs(mean - m0) > tolerance:
            continue
        k = cyc.index(min(cyc))
        out.append(tuple(cyc[k:] + cyc[:k]))
        if len(out) > cycle_budget:
            out = [_least_tight_cycle(tight)]
            complete = False
            break
    out.sort()
    return (
        tuple(tuple(g.vertices[i] for i in cyc) for cyc in out),
        complete,
    )


def _least_tight_cycle(tight: nx.DiGraph) -> tuple[int, ...]:
    """Deterministic representative cycle of a large tight subgraph: the
    shortest return walk through the least recurrent vertex, ties broken
    toward smaller vertex indices."""
    best_v = None
    for comp in nx.strongly_connected_components(tight):
        if len(comp) > 1 or tight.has_edge(next(iter(comp)), next(iter(comp))):
            v = min(comp)
            if best_v is None or v < best_v[0]:
                best_v = (v, comp)
    if best_v is None:
        raise NoCycleError("tight subgraph has no cycle")
    v0, comp = best_v
    if tight.has_edge(v0, v0):
        return (v0,)
    # distance back to v0 within the component
    dist = {v0: 0}
    frontier = [v0]
    while frontier:
        nxt = []
        for v in frontier:
            for u in tight.predecessors(v):
                if u in comp and u not in dist:
                    dist[u] = dist[v] + 1
                    nxt.append(u)
        frontier = nxt
    walk = [v0]
    cur = v0
    while True:
        cur = min(
            (w for w in tight.successors(cur) if w in dist),
            key=lambda w: (dist[w], w),
        )
        if cur == v0:
            return tuple(walk)
        walk.append(cur)


# ---------------------------------------------------------------------------
# brute force over periodic orbits


@lru_cache(maxsize=None)
def _lyndon_words(alphabet: int, max_len: int) -> tuple[Word, ...]:
    """All Lyndon words of length <= max_len over 0..alphabet-1 (Duval)."""
    out: list[Word] = []
    w = [-1]
    while w:
        w[-1] += 1
        out.append(tuple(w))
        m = len(w)
        while len(w) < max_len:
            w.append(w[len(w) - m])
        while w and w[-1] == alphabet - 1:
            w.pop()
    return tuple(out)


@lru_cache(maxsize=None)
def _cycle_data(spec: SubshiftSpec, max_period: int, depth: int):
    """Admissible primitive cycles (canonical rotation) with window counts.

    Returns (cycles, counts, periods, words) where counts[i, j] is the
    number of cyclic depth-windows of cycle i equal to word j.
    """
    words = admissible_words(spec, depth)
    widx = {w: j for j, w in enumerate(words)}
    cycles = [
        c for c in _lyndon_words(spec.alphabet_size, max_period)
        if spec.is_admissible_cycle(c)
    ]
    counts = np.zeros((len(cycles), len(words)), dtype=np.int32)
    periods = np.array([len(c) for c in cycles], dtype=np.int64)
    for i, c in enumerate(cycles):
        reps = c * (depth // len(c) + 2)
        for s in range(len(c)):
            counts[i, widx[reps[s : s + depth]]] += 1
    return tuple(cycles), counts, periods, words


def brute_force(
    a: Potential,
    max_period: int,
    budget: int = 5_000_000,
    argmax_tolerance: float | None = None,
) -> BruteForceResult:
    """Exact maximum of Birkhoff averages over all periodic orbits of
    period <= max_period, with every argmax orbit (canonical cycle words).

    Independent of :func:`max_mean`: enumerates primitive admissible
    necklaces and averages the potential along each.
    """
    approx = spec_cycle_count(a.spec, max_period)
    if approx > budget:
        raise BudgetExceededError(
            f"{approx} periodic orbits exceed the budget of {budget}"
        )
    cycles, counts, periods, words = _cycle_data(a.spec, max_period, a.depth)
    if not cycles:
        raise NoCycleError("no admissible periodic orbit")

    if a.exact:
        vals = [a.values[w] for w in words]
        means = []
        for i in range(len(cycles)):
            row = counts[i]
            total = Fraction(0)
            for j in row.nonzero()[0]:
                total += int(row[j]) * vals[j]
            means.append(total / int(periods[i]))
        m0 = max(means)
        arg = [i for i, m in enumerate(means) if m == m0]
        rest = [m for i, m in enumerate(means) if m != m0]
        gap = (m0 - max(rest)) if rest else None
    else:
        vals = np.array([float(a.values[w]) for w in words])
        means = counts @ vals / periods
        m0 = float(means.max())
        if argmax_tolerance is None:
            argmax_tolerance = 1e-12 * max(1.0, abs(m0))
        mask = means >= m0 - argmax_tolerance
        arg = list(np.nonzero(mask)[0])
        rest_means = means[~mask]
        gap = float(m0 - rest_means.max()) if rest_means.size else None
    return BruteForceResult(m0, tuple(cycles[i] for i in arg), gap, len(cycles))


@lru_cache(maxsize=None)
def spec_cycle_count(spec: SubshiftSpec, max_period: int) -> int:
    """Number of admissible primitive necklaces of period <= max_period."""
    return sum(
        1
        for c in _lyndon_words(spec.alphabet_size, max_period)
        if spec.is_admissible_cycle(c)
    )


# ---------------------------------------------------------------------------
# sub-action and deficiency


def subaction(
    a: Potential, r: MaxResult, tolerance: float = DEFAULT_TOLERANCE
) -> SubAction:
    """Calibrated sub-action by longest-path relaxation from the critical
    cycles (valid because every cycle mean of A - m0 is nonpositive)."""
    dv = max(a.depth - 1, 1)
    g = word_graph(a.spec, dv)
    weights = [a.value(g.edge_word(u, v)) for u, v in g.edges]
    exact = a.exact
    m0 = r.m0
    zero = Fraction(0) if exact else 0.0
    n = len(g.vertices)

    critical = set()
    for cyc in r.critical_cycles:
        for w in cyc:
            critical.add(g.index[w[:dv]])
    if not critical:
        raise NoCycleError("result lists no critical cycle")

    # float dust on "zero" cycles must not masquerade as a positive cycle
    eps = 0 if exact else 1e-13 * max(1.0, abs(float(m0)))
    v_fn: list = [zero if i in critical else None for i in range(n)]
    passes = 0
    while True:
        best_gain = zero
        for (u, v), w in zip(g.edges, weights):
            if v_fn[u] is None:
                continue
            cand = v_fn[u] + w - m0
            if v_fn[v] is None:
                v_fn[v] = cand
                best_gain = max(best_gain, abs(cand) + 1)
            elif cand > v_fn[v] + eps:
                best_gain = max(best_gain, cand - v_fn[v])
                v_fn[v] = cand
        passes += 1
        if best_gain <= eps:
            break
        if passes > n + 1:
            if float(best_gain) > tolerance:
                raise NonConvergenceError(
                    "relaxation kept improving past the pass cap: positive cycle"
                )
            break

    _complete_subaction(g, weights, m0, v_fn, zero, n)

    top = max(v_fn)
    values = {g.vertices[i]: v_fn[i] - top for i in range(n)}
    return SubAction(a.spec, dv, values, m0, a.depth)


def _complete_subaction(g: WordGraph, weights, m0, v_fn, zero, n) -> None:
    """Assign finite values to vertices unreachable from the critical set
    (non-mixing subshifts only), preserving the edgewise subsolution."""
    if all(v is not None for v in v_fn):
        return
    forward = {i for i, v in enumerate(v_fn) if v is not None}
    # vertices that can reach the finite set: backward min-relaxation
    for _ in range(n):
        changed = False
        for (u, v), w in zip(g.edges, weights):
            if u in forward or v_fn[v] is None:
                continue
            cand = v_fn[v] - w + m0
            if v_fn[u] is None or cand < v_fn[u]:
                v_fn[u] = cand
                changed = True
        if not changed:
            break
    if all(v is not None for v in v_fn):
        return
    # leftover vertices can neither reach nor be reached from the finite
    # part directly; relax among themselves and shift to clear cross edges
    rest = [i for i in range(n) if v_fn[i] is None]
    rest_set = set(rest)
    v0 = {i: zero for i in rest}
    for _ in range(len(rest)):
        for (u, v), w in zip(g.edges, weights):
            if u in rest_set and v in rest_set:
                cand = v0[u] + w - m0
                if cand > v0[v]:
                    v0[v] = cand
    shift = zero
    for (u, v), w in zip(g.edges, weights):
        if v in rest_set and u not in rest_set and v_fn[u] is not None:
            need = v_fn[u] + w - m0 - v0[v]
            if need > shift:
                shift = need
    for i in rest:
        v_fn[i] = v0[i] + shift


def deficiency(
    a: Potential, v: SubAction, tolerance: float = DEFAULT_TOLERANCE
) -> Deficiency:
    """Edgewise deficiency B = A - m0 + V - V∘shift.

    B is a locally constant function of depth max(k, 2); on a word-graph
    edge its value depends only on the edge word.  Raises
    ``CalibrationViolationError`` if B exceeds the tolerance anywhere.
    """
    depth_b = max(a.depth, 2)
    exact = a.exact and all(
        isinstance(x, (int, Fraction)) and not isinstance(x, bool)
        for x in v.values.values()
    )
    tol = 0 if exact else tolerance
    values: dict[Word, object] = {}
    for w in admissible_words(a.spec, depth_b):
        b = a.value(w) - v.m0 + v.value(w) - v.shifted_value(w)
        if b > tol:
            raise CalibrationViolationError(
                f"B({format_word(w)}) = {b} exceeds the tolerance"
            )
        values[w] = b

    g = word_graph(a.spec, a.depth)
    mather = []
    mather_idx = []
    for u, vtx in g.edges:
        b = values[(g.edge_word(u, vtx))[:depth_b]]
        if b >= -(tolerance if not exact else 0):
            mather.append((g.vertices[u], g.vertices[vtx]))
            mather_idx.append((u, vtx))

    sub = nx.DiGraph(mather_idx)
    recurrent = []
    for comp in nx.strongly_connected_components(sub):
        if len(comp) > 1 or sub.has_edge(next(iter(comp)), next(iter(comp))):
            for u, vtx in mather_idx:
                if u in comp and vtx in comp:
                    recurrent.append((g.vertices[u], g.vertices[vtx]))
    return Deficiency(
        a.spec,
        depth_b,
        values,
        a.depth,
        tuple(mather),
        tuple(recurrent),
        tolerance,
    )


# ---------------------------------------------------------------------------
# Mañé table and Aubry set


def mane_table(
    a: Potential, r: MaxResult, tolerance: float = DEFAULT_TOLERANCE
) -> ManeTable:
    """Best path sums of A - m0 between all ordered vertex pairs.

    Computed by max-plus Kleene accumulation; finite because every cycle of
    A - m0 has nonpositive total weight (zero cycles never improve a path).
    The recorded ``bound_q`` is the empirical maximum entry.
    """
    g = word_graph(a.spec, a.depth)
    n = len(g.vertices)
    m0 = r.m0
    exact = a.exact

    if exact:
        NEG = None
        t0 = [[NEG] * n for _ in range(n)]
        for u, v in g.edges:
            w = a.value(g.vertices[u]) - m0
            if t0[u][v] is NEG or w > t0[u][v]:
                t0[u][v] = w
        s = [row[:] for row in t0]
        for step in range(n):
            new = [row[:] for row in s]
            improved = False
            for u in range(n):
                row = s[u]
                for mid in range(n):
                    base = row[mid]
                    if base is NEG:
                        continue
                    trow = t0[mid]
                    for v in range(n):
                        e = trow[v]
                        if e is NEG:
                            continue
                        cand = base + e
                        if new[u][v] is NEG or cand > new[u][v]:
                            new[u][v] = cand
                            improved = True
            if step == n - 1 and improved:
                # the extra composition still strictly improved: positive cycle
                raise NonConvergenceError("positive cycle in action table")
            s = new
        table = tuple(tuple(row) for row in s)
        finite = [x for row in s for x in row if x is not NEG]
    else:
        t0 = np.full((n, n), -np.inf)
        for u, v in g.edges:
            w = float(a.value(g.vertices[u])) - float(m0)
            t0[u, v] = max(t0[u, v], w)
        s = t0.copy()
        for step in range(n):
            ext = (s[:, :, None] + t0[None, :, :]).max(axis=1)
            new = np.maximum(s, ext)
            if step == n - 1 and (new > s + max(tolerance, 1e-12)).any():
                raise NonConvergenceError("positive cycle in action table")
            s = new
        table = tuple(
            tuple(None if x == -np.inf else float(x) for x in row) for row in s
        )
        finite = [x for row in table for x in row if x is not None]

    bound_q = max(finite)
    critical = frozenset(w for cyc in r.critical_cycles for w in cyc)
    return ManeTable(g.vertices, table, m0, bound_q, tolerance, critical)


def aubry_set(t: ManeTable, tolerance: float | None = None) -> AubrySet:
    """Vertices with vanishing self-action; asserts it contains every
    critical-cycle vertex."""
    tol = t.tolerance if tolerance is None else tolerance
    words = frozenset(
        w
        for i, w in enumerate(t.words)
        if t.table[i][i] is not None and abs(t.table[i][i]) <= tol
    )
    missing = t.critical_words - words
    if missing:
        raise CalibrationViolationError(
            f"critical vertices missing from the Aubry set: "
            f"{sorted(format_word(w) for w in missing)}"
        )
    return AubrySet(words, tol)


# ---------------------------------------------------------------------------
# invariant measures


@dataclass(frozen=True, eq=False)
class InvariantMeasure:
    """Shift-invariant probability: periodic-orbit kind or Markov kind.

    A periodic measure equidistributes on the orbit of its cycle word; a
    Markov measure is a stochastic matrix over depth-k words together with
    its stationary row vector.  ``mass`` returns cylinder masses at any
    depth.
    """

    spec: SubshiftSpec
    kind: str  # "periodic" | "markov"
    cycle: Word | None = None
    words: tuple[Word, ...] | None = None
    matrix: object = None  # numpy (n, n) row-stochastic
    stationary: object = None  # numpy (n,)
    _windex: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("periodic", "markov"):
            raise ValidationError(f"unknown measure kind {self.kind!r}")
        if self.kind == "markov":
            self._windex.update({w: i for i, w in enumerate(self.words)})

    @property
    def depth(self) -> int:
        return len(self.words[0]) if self.kind == "markov" else 1

    def mass(self, w) -> float | Fraction:
        from .sft import parse_word

        w = parse_word(w)
        if self.kind == "periodic":
            c = self.cycle
            n = len(c)
            reps = c * (len(w) // n + 2)
            hits = sum(1 for s in range(n) if reps[s : s + len(w)] == w)
            return Fraction(hits, n)
        k = self.depth
        if len(w) <= k:
            return float(
                sum(
                    self.stationary[i]
                    for i, u in enumerate(self.words)
                    if u[: len(w)] == w
                )
            )
        i = self._windex.get(w[:k])
        if i is None:
            return 0.0
        p = float(self.stationary[i])
        for s in range(len(w) - k):
            j = self._windex.get(w[s + 1 : s + 1 + k])
            if j is None:
                return 0.0
            p *= float(self.matrix[i, j])
            i = j
        return p

    def integrate(self, a: Potential) -> float | Fraction:
        if a.spec != self.spec:
            raise ValidationError("measure and potential live on different subshifts")
        return sum(self.mass(w) * a.values[w] for w in admissible_words(self.spec, a.depth))

    def support_words(self, depth: int) -> frozenset[Word]:
        """Depth-words whose cylinders meet the support."""
        if self.kind == "periodic":
            c = self.cycle
            reps = c * (depth // len(c) + 2)
            return frozenset(reps[s : s + depth] for s in range(len(c)))
        out = set()
        for w in admissible_words(self.spec, depth):
            if self.mass(w) > 0:
                out.add(w)
        return frozenset(out)


def orbit_measure(spec: SubshiftSpec, cycle) -> InvariantMeasure:
    """Equidistribution on the periodic orbit of an admissible cycle word."""
    from .sft import parse_word

    c = canonical_cycle(parse_word(cycle))
    if not spec.is_admissible_cycle(c):
        raise InadmissibleCycleError(f"cycle {format_word(c)} does not close admissibly")
    return InvariantMeasure(spec, "periodic", cycle=c)


def markov_measure(
    spec: SubshiftSpec, words: tuple[Word, ...], matrix, stationary
) -> InvariantMeasure:
    matrix = np.asarray(matrix, dtype=float)
    stationary = np.asarray(stationary, dtype=float)
    return InvariantMeasure(
        spec, "markov", words=tuple(words), matrix=matrix, stationary=stationary
    )


# ---------------------------------------------------------------------------
# pointwise action sums


@dataclass(frozen=True)
class OrbitSumReport:
    """Comparison of table entries with a direct orbit sum.

    ``direct_sum`` is sum_{j<N} (A(shift^j x) - m0) along the point's own
    orbit; ``table_value`` the action-table entry between the endpoint
    cylinders.  The additivity identity compares S(u,u) against
    S(u,v) + S(v,u).  ``resolution_bound`` bounds the cylinder-resolution
    error term.
    """

    word_from: Word
    word_to: Word
    direct_sum: float
    table_value: float | None
    table_self: float | None
    additivity_lhs: float | None
    additivity_rhs: float | None
    resolution_bound: float
    segment_consistent: bool
    additivity_consistent: bool


def orbit_additivity_check(
    a: Potential,
    x: SymbolicPoint,
    big_n: int,
    r: MaxResult | None = None,
    table: ManeTable | None = None,
    table_depth: int | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> OrbitSumReport:
    """Check the pointwise action identities along an orbit segment.

    Requires 0 < N <= minimal period of x (unconstrained beyond N > 0 when
    x is not periodic) and that the segment's points are separated at the
    table's cylinder depth.  A ``table_depth`` above the potential's depth
    tightens the resolution bound by the factor lam^(gap * alpha).

    At N = period the identity degenerates to S(x, x) = 2 S(x, x); that
    holds only on maximizing orbits (where the self-action vanishes), so
    for other orbits the report carries ``additivity_consistent = False``
    rather than raising.
    """
    check_point(a.spec, x)
    if big_n <= 0:
        raise ValidationError("N must be positive")
    if x.is_periodic and big_n > x.period:
        raise ValidationError(f"N must not exceed the minimal period {x.period}")
    if table_depth is None:
        table_depth = a.depth if table is None else len(next(iter(table.words)))
    if table_depth < a.depth:
        raise ValidationError("table depth below the potential depth")
    from .potential import lift

    deep = lift(a, table_depth)
    if r is None:
        r = max_mean(deep, tolerance)
    if table is None:
        table = mane_table(deep, r, tolerance)

    pts = [x.shift(j) for j in range(big_n + 1)]
    k = table_depth
    for i in range(big_n + 1):
        for j in range(i + 1, big_n + 1):
            if pts[i] != pts[j] and pts[i].prefix(k) == pts[j].prefix(k):
                raise ResolutionTooCoarseError(
                    f"orbit points {i} and {j} share the depth-{k} cylinder"
                )

    u, v = pts[0].prefix(k), pts[big_n].prefix(k)
    direct = sum(a.eval(p) - r.m0 for p in pts[:big_n])
    s_uv = table.entry(u, v)
    s_vu = table.entry(v, u)
    s_uu = table.entry(u, u)
    gap = table_depth - a.depth
    lam, alpha = a.metric.lam, a.metric.alpha
    bound = holder_constant(a) * lam ** (gap * alpha) + tolerance
    seg_ok = s_uv is not None and s_uv >= direct - tolerance and s_uv <= direct + bound
    add_rhs = None if (s_uv is None or s_vu is None) else s_uv + s_vu
    add_ok = (
        s_uu is not None
        and add_rhs is not None
        and abs(s_uu - add_rhs) <= bound + tolerance
    )
    return OrbitSumReport(
        u, v, float(direct), s_uv, s_uu, s_uu, add_rhs, float(bound), seg_ok, add_ok
    )


__all__ = [
    "AubrySet",
    "BruteForceResult",
    "Deficiency",
    "InvariantMeasure",
    "ManeTable",
    "MaxResult",
    "OrbitSumReport",
    "SubAction",
    "aubry_set",
    "brute_force",
    "deficiency",
    "mane_table",
    "markov_measure",
    "max_mean",
    "orbit_additivity_check",
    "orbit_measure",
    "subaction",
]
