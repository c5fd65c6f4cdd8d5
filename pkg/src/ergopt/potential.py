"""Locally constant potentials of finite cylinder depth.

A depth-k potential assigns a real value to every admissible k-word; its
value at a point depends only on the first k symbols.  For this class the
Hölder constant is an exact finite maximum (disagreement depths 0..k-1),
and a general function of sequences can be discretized onto cylinders with
a reported oscillation tail bound.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

from .errors import (
    InadmissiblePointError,
    SamplerFailureError,
    SubshiftMismatchError,
)
from .sft import (
    MetricParams,
    SubshiftSpec,
    SymbolicPoint,
    Word,
    admissible_words,
    format_word,
    parse_word,
    periodic_probe,
    random_point,
    shortest_connector,
)

Real = float  # int and Fraction values are accepted and kept exact


@dataclass(frozen=True, eq=True)
class Potential:
    """Locally constant function of the first ``depth`` symbols."""

    spec: SubshiftSpec
    depth: int
    values: Mapping[Word, Real]
    metric: MetricParams = MetricParams()

    def __post_init__(self):
        expected = set(admissible_words(self.spec, self.depth))
        got = set(self.values)
        if got != expected:
            missing = expected - got
            extra = got - expected
            raise InadmissiblePointError(
                f"potential values must cover exactly the admissible "
                f"{self.depth}-words (missing {len(missing)}, extra {len(extra)})"
            )

    def value(self, w: Word) -> Real:
        """Value on the cylinder of a word with at least ``depth`` symbols."""
        key = tuple(w[: self.depth])
        try:
            return self.values[key]
        except KeyError:
            raise InadmissiblePointError(f"word {format_word(key)} is not admissible")

    def eval(self, x: SymbolicPoint) -> Real:
        return self.value(x.prefix(self.depth))

    @property
    def exact(self) -> bool:
        """True when every value is an int or Fraction (exact arithmetic)."""
        return all(
            isinstance(v, (int, Fraction)) and not isinstance(v, bool)
            for v in self.values.values()
        )

    def sup_norm(self) -> Real:
        return max(abs(v) for v in self.values.values())

    def __hash__(self):
        return hash((self.spec, self.depth, tuple(sorted(self.values.items())), self.metric))


@dataclass(frozen=True)
class DiscretizationReport:
    """Oscillation evidence for a cylinder discretization.

    ``tail_bound`` is the largest spread of sampler values observed within a
    single depth-k cylinder; it is an estimate, not a certified Hölder
    bound, and vanishes when the source already is depth-k locally constant.
    ``certified_tail`` is the modulus of continuity evaluated at the
    cylinder diameter when the caller supplied one, else None.
    """

    depth: int
    tail_bound: float
    certified_tail: float | None = None


def make_potential(
    spec: SubshiftSpec,
    values: Mapping[str | Word, Real],
    metric: MetricParams = MetricParams(),
) -> Potential:
    """Build a potential from a {word: value} mapping (words may be strings)."""
    vals = {parse_word(w): v for w, v in values.items()}
    depths = {len(w) for w in vals}
    if len(depths) != 1:
        raise ValueError("all words must have the same length")
    return Potential(spec, depths.pop(), vals, metric)


def constant_potential(
    spec: SubshiftSpec,
    c: Real,
    depth: int = 1,
    metric: MetricParams = MetricParams(),
) -> Potential:
    return Potential(spec, depth, {w: c for w in admissible_words(spec, depth)}, metric)


def random_potential(
    spec: SubshiftSpec,
    depth: int,
    rng,
    metric: MetricParams = MetricParams(),
    low: float = 0.0,
    high: float = 1.0,
) -> Potential:
    """Independent uniform values per admissible depth-word.

    ``rng`` may be a ``random.Random`` or a numpy generator; only
    ``uniform`` is used.
    """
    vals = {w: float(rng.uniform(low, high)) for w in admissible_words(spec, depth)}
    return Potential(spec, depth, vals, metric)


def lift(a: Potential, depth: int) -> Potential:
    """Re-express at a deeper cylinder depth; evaluation is unchanged."""
    if depth < a.depth:
        raise ValueError("lifting cannot reduce the depth")
    if depth == a.depth:
        return a
    vals = {w: a.value(w) for w in admissible_words(a.spec, depth)}
    return Potential(a.spec, depth, vals, a.metric)


def affine_combine(
    a: Potential,
    scale: Real,
    shift_const: Real,
    addend: Potential | None = None,
) -> Potential:
    """Pointwise scale*a + shift_const (+ addend), at the common depth."""
    if addend is not None and addend.spec != a.spec:
        raise SubshiftMismatchError("potentials live on different subshifts")
    depth = a.depth if addend is None else max(a.depth, addend.depth)
    vals: dict[Word, Real] = {}
    for w in admissible_words(a.spec, depth):
        v = scale * a.value(w) + shift_const
        if addend is not None:
            v = v + addend.value(w)
        vals[w] = v
    metric = a.metric
    return Potential(a.spec, depth, vals, metric)


def holder_constant(a: Potential, exponent: float | None = None) -> float:
    """Exact Hölder constant sup |A(x)-A(y)| / d(x,y)**alpha.

    For a locally constant potential the supremum is a maximum over the
    finitely many disagreement depths j in 0..k-1: oscillation of values
    across pairs of cylinders that agree for exactly j symbols, divided by
    lam**(j*alpha).
    """
    alpha = a.metric.alpha if exponent is None else exponent
    lam = a.metric.lam
    best = 0.0

    def walk(words: list[Word], j: int) -> tuple[Real, Real]:
        # returns (min, max) of values over the group of words sharing a
        # j-prefix; updates `best` with oscillations across its children
        nonlocal best
        if j == a.depth:
            v = a.values[words[0]]
            return v, v
        groups: dict[int, list[Word]] = {}
        for w in words:
            groups.setdefault(w[j], []).append(w)
        bounds = [walk(g, j + 1) for g in groups.values()]
        lo = min(b[0] for b in bounds)
        hi = max(b[1] for b in bounds)
        if len(bounds) > 1:
            # max cross-child oscillation: widest (max_i - min_j), i != j
            osc = 0.0
            for i, (lo_i, hi_i) in enumerate(bounds):
                for jj, (lo_j, _) in enumerate(bounds):
                    if i != jj:
                        osc = max(osc, float(hi_i - lo_j))
            best = max(best, osc / lam ** (j * alpha))
        return lo, hi

    walk(list(a.values.keys()), 0)
    return best


def discretize(
    sampler: Callable[[SymbolicPoint], Real],
    spec: SubshiftSpec,
    depth: int,
    probes_per_cylinder: int = 1,
    metric: MetricParams = MetricParams(),
    rng: random.Random | None = None,
    modulus: Callable[[float], float] | None = None,
) -> tuple[Potential, DiscretizationReport]:
    """Evaluate a function of sequences on depth-k cylinders.

    The value on each k-word is the sampler at the cylinder's canonical
    probe (the periodic extension of the word, detoured through a shortest
    admissible return path when the self-junction is forbidden).  Extra
    probes with random admissible periodic tails feed the oscillation
    estimate ``tail_bound``; a caller-supplied modulus of continuity turns
    the cylinder diameter lam**depth into the certified bound
    ``certified_tail``.  The sampler must be reentrant.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if probes_per_cylinder < 1:
        raise ValueError("need at least one probe per cylinder")
    rng = rng or random.Random(0)
    vals: dict[Word, Real] = {}
    tail = 0.0
    for w in admissible_words(spec, depth):
        probes = [periodic_probe(spec, w)]
        for _ in range(probes_per_cylinder - 1):
            tail_pt = random_point(spec, rng, max_preperiod=0, cycle_hint=depth + 2)
            probes.append(_with_prefix(spec, w, tail_pt, rng))
        try:
            samples = [sampler(p) for p in probes]
        except Exception as exc:  # noqa: BLE001 - re-raised with cylinder id
            raise SamplerFailureError(
                f"sampler failed on cylinder [{format_word(w)}]: {exc}"
            ) from exc
        vals[w] = samples[0]
        tail = max(tail, float(max(samples) - min(samples)))
    certified = modulus(metric.lam**depth) if modulus is not None else None
    return (
        Potential(spec, depth, vals, metric),
        DiscretizationReport(depth, tail, certified),
    )


def _with_prefix(
    spec: SubshiftSpec, w: Word, tail: SymbolicPoint, rng: random.Random
) -> SymbolicPoint:
    """A point of the cylinder [w] whose tail follows the given periodic point."""
    bridge = shortest_connector(spec, w[-1], tail.symbol(0))
    if bridge is None:
        return periodic_probe(spec, w)
    return SymbolicPoint(w + bridge + tail.preperiod, tail.cycle)


def load_potential(obj: dict, spec: SubshiftSpec | None = None) -> Potential:
    """Build from ``{"depth": k, "values": {"word": v}, "lambda": l, "alpha": a}``.

    When no subshift is supplied, the full shift on the symbols present in
    the keys is assumed.
    """
    vals = {parse_word(w): float(v) for w, v in obj["values"].items()}
    if spec is None:
        from .sft import full_shift

        alphabet = max(max(w) for w in vals) + 1
        spec = full_shift(alphabet)
    metric = MetricParams(float(obj.get("lambda", 0.5)), float(obj.get("alpha", 1.0)))
    depth = int(obj["depth"])
    return Potential(spec, depth, vals, metric)


def dump_potential(a: Potential) -> dict:
    return {
        "depth": a.depth,
        "values": {format_word(w): float(v) for w, v in sorted(a.values.items())},
        "lambda": a.metric.lam,
        "alpha": a.metric.alpha,
    }


__all__ = [
    "DiscretizationReport",
    "Potential",
    "affine_combine",
    "constant_potential",
    "discretize",
    "dump_potential",
    "holder_constant",
    "lift",
    "load_potential",
    "make_potential",
    "random_potential",
]
