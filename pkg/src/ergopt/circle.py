"""Degree-2 expanding circle maps and their shift potentials.

An expanding, orientation-preserving degree-2 covering of the circle that
fixes 0 is conjugate to the doubling map; the conjugacy is pinned down by
coding the preimage tree of the non-fixed preimage of 0.  Reading
-log f' at the coded points turns the map into a locally constant
potential on the full 2-shift (with zero pressure in the limit), and the
construction inverts: the eigenmeasure of the dual transfer operator of a
zero-pressure potential rebuilds a circle map whose coding recovers the
potential.

Maps are handled through their lifts F: [0, 1] -> [0, 2] with F(0) = 0 and
F strictly increasing; evaluation is F mod 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import (
    DepthOverflowError,
    PressureNotZeroError,
    ResolutionTooCoarseError,
    RootFindingFailureError,
    ValidationError,
)
from .optimize import max_mean
from .potential import Potential
from .thermo import pressure
from .sft import MetricParams, Word, admissible_words, full_shift, word_graph

ROOT_XTOL = 1e-13
NODE_BUDGET = 2**20


@dataclass(frozen=True, eq=False)
class CircleMap:
    """Degree-2 expanding orientation-preserving circle map fixing 0.

    ``lift`` is the strictly increasing lift on [0, 1] with lift(0) = 0 and
    lift(1) = 2; ``derivative`` may be supplied or finite-differenced.  The
    expansion bound and the Hölder exponent of the derivative are metadata
    (certified only at sample points).
    """

    lift: Callable[[float], float]
    derivative: Callable[[float], float]
    expansion: float = 1.0
    deriv_holder: float = 1.0
    kind: str = "callback"
    params: dict = field(default_factory=dict)
    accuracy: float | None = None

    def evaluate(self, x: float) -> float:
        return self.lift_ext(x) % 1.0

    def lift_ext(self, x: float) -> float:
        k = math.floor(x)
        return self.lift(x - k) + 2.0 * k


def doubling_map() -> CircleMap:
    return CircleMap(
        lift=lambda x: 2.0 * x,
        derivative=lambda x: 2.0,
        expansion=2.0,
        kind="builtin",
        params={"name": "doubling"},
    )


def perturbed_doubling(epsilon: float) -> CircleMap:
    """f(x) = 2x + eps*sin(2 pi x)/(2 pi) mod 1; f' = 2 + eps*cos(2 pi x)."""
    if abs(epsilon) >= 1.0:
        raise ValidationError("perturbation must keep the map expanding")
    two_pi = 2.0 * math.pi
    return CircleMap(
        lift=lambda x: 2.0 * x + epsilon * math.sin(two_pi * x) / two_pi,
        derivative=lambda x: 2.0 + epsilon * math.cos(two_pi * x),
        expansion=2.0 - abs(epsilon),
        kind="builtin",
        params={"name": "perturbed_doubling", "epsilon": epsilon},
    )


def table_map(knots, fd_step: float = 1e-7) -> CircleMap:
    """Monotone interpolation map from lift knots [[x, lift(x)], ...].

    The lift must be strictly increasing with total increment 2.  When the
    origin is not fixed, the map is conjugated by the rotation that moves
    its (unique) fixed point to 0.  The derivative is a centered finite
    difference of the interpolated lift with the given step (recorded in
    ``params``).
    """
    xs = np.array([k[0] for k in knots], dtype=float)
    ys = np.array([k[1] for k in knots], dtype=float)
    if xs[0] != 0.0 or abs(xs[-1] - 1.0) > 1e-12:
        raise ValidationError("knots must span [0, 1]")
    if (np.diff(xs) <= 0).any() or (np.diff(ys) <= 0).any():
        raise ValidationError("lift knots must be strictly increasing")
    if abs((ys[-1] - ys[0]) - 2.0) > 1e-9:
        raise ValidationError("lift increment over one period must be 2 (degree 2)")

    def base_lift(x: float) -> float:
        return float(np.interp(x, xs, ys))

    def base_ext(x: float) -> float:
        k = math.floor(x)
        return base_lift(x - k) + 2.0 * k

    f0 = base_lift(0.0) % 1.0
    if min(f0, 1.0 - f0) <= 1e-12:
        shift = round(ys[0])
        x_star = 0.0

        def lift(x: float) -> float:
            return base_lift(x) - shift

    else:
        # h(x) = F(x) - x increases by exactly 1 over [0, 1], so it crosses
        # one integer: the fixed point of the circle map
        target = math.floor(base_lift(0.0) - 0.0) + 1.0
        x_star = float(brentq(lambda x: base_lift(x) - x - target, 0.0, 1.0,
                              xtol=ROOT_XTOL))
        anchor = base_ext(x_star)

        def lift(x: float) -> float:
            return base_ext(x + x_star) - anchor

    def lift_ext(x: float) -> float:
        k = math.floor(x)
        return lift(x - k) + 2.0 * k

    def derivative(x: float) -> float:
        return (lift_ext(x + fd_step) - lift_ext(x - fd_step)) / (2.0 * fd_step)

    grid = np.linspace(0.0, 1.0, 513)
    slopes = np.diff([lift(float(g)) for g in grid]) * 512
    expansion = float(slopes.min())
    spacing = float(np.diff(xs).max())
    return CircleMap(
        lift=lift,
        derivative=derivative,
        expansion=expansion,
        kind="table",
        params={"fd_step": fd_step, "n_knots": len(xs), "pinned_at": x_star},
        accuracy=spacing,
    )


def load_map(obj: dict) -> CircleMap:
    kind = obj.get("kind")
    if kind == "builtin":
        name = obj.get("name")
        if name == "doubling":
            return doubling_map()
        if name == "perturbed_doubling":
            return perturbed_doubling(float(obj.get("epsilon", 0.0)))
        raise ValidationError(f"unknown builtin map {name!r}")
    if kind == "table":
        return table_map(obj["knots"])
    raise ValidationError(f"unknown map kind {kind!r}")


def dump_map(f: CircleMap, n_knots: int = 1025) -> dict:
    if f.kind == "builtin":
        return {"kind": "builtin", **f.params}
    xs = np.linspace(0.0, 1.0, n_knots)
    return {
        "kind": "table",
        "knots": [[float(x), float(f.lift_ext(float(x)))] for x in xs],
    }


def validate_circle_map(f: CircleMap, samples: int = 512) -> None:
    """Sampled sanity checks: increasing lift, degree 2, expansion > 1."""
    xs = np.linspace(0.0, 1.0, samples + 1)
    vals = [f.lift_ext(float(x)) for x in xs]
    if (np.diff(vals) <= 0).any():
        raise ValidationError("lift is not strictly increasing at samples")
    if abs(vals[-1] - vals[0] - 2.0) > 1e-9:
        raise ValidationError("map does not have degree 2")
    if abs(vals[0]) > 1e-9:
        raise ValidationError("map must fix 0 (pin the fixed point first)")
    dmin = min(f.derivative(float(x)) for x in xs[:-1])
    if dmin <= 1.0:
        raise ValidationError(f"derivative {dmin} is not expanding at samples")


# ---------------------------------------------------------------------------
# coding


@dataclass(frozen=True, eq=False)
class CodingTable:
    """Ordered preimage tree of the non-fixed preimage of 0.

    ``entries[w]`` is the coded point z_w with f(z_{w + (b,)}) = z_w and
    z_{w+(0,)} < z_{w+(1,)}; the matching doubling-map point is the dyadic
    0.reverse(w)1, so the table gives the conjugacy on a dense set.
    """

    depth: int
    entries: dict[Word, float]

    def point(self, code) -> float:
        from .sft import parse_word

        return self.entries[parse_word(code)]

    @staticmethod
    def dyadic(code: Word) -> float:
        """Doubling-map coded point with the same code: 0.reverse(code)1."""
        val = 0.5
        for b in code:  # reversed word, read from the deep end
            val = (val + b) / 2.0
        return val
        # equivalently: binary 0.(code reversed)1


def _branch_root(f: CircleMap, target: float, branch: int, z: float) -> float:
    lo, hi = (0.0, z) if branch == 0 else (z, 1.0)
    want = target + branch

    def g(x: float) -> float:
        return f.lift(x) - want

    try:
        glo, ghi = g(lo), g(hi)
        if glo > 0 or ghi < 0:
            raise ValueError(f"no sign change on branch {branch}")
        return float(brentq(g, lo, hi, xtol=ROOT_XTOL))
    except ValueError as exc:
        raise RootFindingFailureError(
            f"branch {branch} root for target {target} failed: {exc}"
        ) from exc


def coding_table(f: CircleMap, depth: int) -> CodingTable:
    """Solve the preimage tree of z (the non-fixed preimage of 0) level by
    level with bracketed root finding; codes are assigned by circular order."""
    if 2 ** (depth + 1) > NODE_BUDGET:
        raise DepthOverflowError(f"coding tree to depth {depth} exceeds the budget")
    z = _branch_root_for_one(f)
    entries: dict[Word, float] = {(): z}
    level: list[Word] = [()]
    for _ in range(depth):
        nxt: list[Word] = []
        for w in level:
            target = entries[w]
            for b in (0, 1):
                entries[w + (b,)] = _branch_root(f, target, b, z)
                nxt.append(w + (b,))
        level = nxt
    return CodingTable(depth, entries)


def _branch_root_for_one(f: CircleMap) -> float:
    def g(x: float) -> float:
        return f.lift(x) - 1.0

    try:
        return float(brentq(g, 0.0, 1.0, xtol=ROOT_XTOL))
    except ValueError as exc:
        raise RootFindingFailureError(f"preimage of 0 not bracketed: {exc}") from exc


def theta_holder_estimate(table: CodingTable) -> tuple[float, float]:
    """Empirical Hölder exponents of the conjugacy and its inverse.

    At each dyadic scale 2^-j the coded points of level j are equally
    spaced on the doubling side; regressing the log of their extreme
    image gaps against the log scale estimates the exponents (identity
    conjugacies give 1).  These are labeled estimates: certified
    bi-Hölder constants are out of numerical reach.
    """
    log_scale, log_max, log_min = [], [], []
    for level in range(1, table.depth + 1):
        pts = sorted(
            v for w, v in table.entries.items() if len(w) == level
        )
        gaps = [b - a for a, b in zip(pts, pts[1:]) if b > a]
        if len(gaps) < 1:
            continue
        log_scale.append(math.log(2.0**-level))
        log_max.append(math.log(max(gaps)))
        log_min.append(math.log(min(gaps)))
    if len(log_scale) < 2:
        raise ValidationError("need at least two levels for the estimate")
    forward = float(np.polyfit(log_scale, log_max, 1)[0])
    inv_slope = float(np.polyfit(log_scale, log_min, 1)[0])
    return forward, 1.0 / inv_slope


def conjugacy_residual(f: CircleMap, table: CodingTable) -> float:
    """max |f(theta(x)) - theta(Tx)| over coded points at the table depth.

    In code terms: f(z_w) must equal z_{w[:-1]}, so the residual reduces to
    the root-finding error of the tree.
    """
    worst = 0.0
    for w, val in table.entries.items():
        if not w:
            continue
        parent = table.entries[w[:-1]]
        got = f.evaluate(val)
        diff = abs(got - parent)
        worst = max(worst, min(diff, 1.0 - diff))
    return worst


# ---------------------------------------------------------------------------
# potential extraction


@dataclass(frozen=True)
class CodingReport:
    """Discretization evidence for a potential extracted from a map."""

    depth: int
    tail_bound: float
    pressure_residual: float


def potential_from_map(
    f: CircleMap,
    depth: int,
    metric: MetricParams = MetricParams(),
) -> tuple[Potential, CodingReport]:
    """-log f' read at the coded cylinder anchors, on the full 2-shift.

    The anchor of the cylinder of a word w is the coded point with code
    reverse(w) (the dyadic midpoint of the w-interval); the level below
    feeds the oscillation tail bound.  The exact potential of the map has
    zero pressure, so the report records the discretized pressure as a
    residual to compare against the tail bound.
    """
    table = coding_table(f, depth + 1)
    spec = full_shift(2)
    vals: dict[Word, float] = {}
    tail = 0.0
    for w in admissible_words(spec, depth):
        code = tuple(reversed(w))
        anchor = -math.log(f.derivative(table.entries[code]))
        vals[w] = anchor
        probes = [anchor] + [
            -math.log(f.derivative(table.entries[(b,) + code])) for b in (0, 1)
        ]
        tail = max(tail, max(probes) - min(probes))
    pot = Potential(spec, depth, vals, metric)
    res = abs(pressure(pot, 1.0))
    return pot, CodingReport(depth, tail, res)


@dataclass(frozen=True, eq=False)
class LyapunovResult:
    """Maximizing orbit of the expansion exponent at a working depth.

    ``ambiguous`` is set when the surviving critical cycles describe more
    than one distinct circle orbit (dyadically identified codes of the
    same orbit, like the two fixed codes of the fixed point, do not count).
    """

    cycle: Word
    orbit: tuple[float, ...]
    exponent: float
    discretized_mean: float
    ambiguous: bool
    competing_cycles: tuple[Word, ...]


def lyapunov_maximize(
    f: CircleMap, depth: int, max_period: int = 12
) -> LyapunovResult:
    """Maximize the average expansion rate over periodic orbits.

    Runs the maximal-average machinery on the +log f' discretization at
    the given depth, then converts the winning cycle word into a true
    periodic orbit of the map by contracting the composed inverse branches
    along the itinerary.  Multiple surviving cycles are reported through
    the ``ambiguous`` flag, not an error.
    """
    table = coding_table(f, depth)
    spec = full_shift(2)
    vals = {
        w: math.log(f.derivative(table.entries[tuple(reversed(w))]))
        for w in admissible_words(spec, depth)
    }
    pot = Potential(spec, depth, vals)
    r = max_mean(pot)
    cycles = r.cycle_words
    cycle = cycles[0]
    z = table.entries[()]

    orbit = _cycle_orbit(f, cycle, z)
    exponent = sum(math.log(f.derivative(p)) for p in orbit) / len(orbit)
    disc_mean = sum(vals[tuple(_window(cycle, i, depth))] for i in range(len(cycle)))
    disc_mean /= len(cycle)

    ambiguous = not r.complete
    for other in cycles[1:8]:
        if not _same_circle_orbit(orbit, _cycle_orbit(f, other, z)):
            ambiguous = True
            break
    return LyapunovResult(cycle, tuple(orbit), exponent, disc_mean, ambiguous, cycles)


def _cycle_orbit(f: CircleMap, cycle: Word, z: float) -> list[float]:
    """The periodic orbit with the given itinerary, by contracting the
    composed inverse branches to their fixed point (tolerance 1e-12)."""
    y = 0.5
    for _ in range(400):
        prev = y
        for b in reversed(cycle):
            y = _branch_root(f, y, b, z)
        if abs(y - prev) <= 1e-12:
            break
    else:
        raise RootFindingFailureError("inverse-branch contraction did not settle")
    orbit = [y]
    for _ in range(len(cycle) - 1):
        orbit.append(f.evaluate(orbit[-1]))
    return orbit


def _circle_gap(a: float, b: float) -> float:
    d = abs(a % 1.0 - b % 1.0)
    return min(d, 1.0 - d)


def _same_circle_orbit(o1, o2, tol: float = 1e-9) -> bool:
    if len(o1) != len(o2):
        return False
    return all(min(_circle_gap(p, q) for q in o2) <= tol for p in o1)


def _window(cycle: Word, i: int, depth: int) -> Word:
    reps = cycle * (depth // len(cycle) + 2)
    return reps[i : i + depth]


# ---------------------------------------------------------------------------
# map reconstruction


@dataclass(frozen=True, eq=False)
class EigenMeasureTable:
    """Dual-operator eigenmeasure masses on dyadic cylinders.

    ``masses[i]`` is the mass of the cylinder of the depth-R word with
    binary code i; ``theta`` is the cumulative function on the dyadic grid
    (theta[i] = mass of [0, i/2^R)), strictly increasing with theta[0] = 0
    and theta[-1] = 1.
    """

    depth: int
    masses: np.ndarray
    theta: np.ndarray

    def mass(self, w: Word) -> float:
        gap = self.depth - len(w)
        if gap < 0:
            raise ValidationError("word deeper than the table")
        i = 0
        for b in w:
            i = (i << 1) | b
        return float(self.theta[(i + 1) << gap] - self.theta[i << gap])

    def theta_at(self, numerator: int, level: int) -> float:
        """theta at the dyadic numerator / 2**level."""
        return float(self.theta[numerator << (self.depth - level)])


def eigenmeasure_table(a: Potential, depth: int) -> EigenMeasureTable:
    """Cylinder masses of the eigenmeasure of the dual transfer operator.

    Masses obey mass(w) = exp(A(w_head)) * mass(w[1:]), anchored at the
    (k-1)-word marginals given by the Perron right eigenvector of the
    transfer matrix on the (k-1)-graph.  Requires the full 2-shift.
    """
    if not a.spec.is_full_shift or a.spec.alphabet_size != 2:
        raise ValidationError("eigenmeasure tables require the full 2-shift")
    if 2**depth > NODE_BUDGET:
        raise DepthOverflowError("eigenmeasure table exceeds the node budget")
    k = a.depth
    s_len = k - 1
    if depth < max(s_len, 1):
        raise ResolutionTooCoarseError("table depth below the potential depth")

    if s_len == 0:
        base = np.array([1.0])
    else:
        g = word_graph(a.spec, s_len)
        n = len(g.vertices)
        mat = np.zeros((n, n))
        for u, v in g.edges:
            mat[u, v] = math.exp(float(a.value(g.edge_word(u, v))))
        vec = np.ones(n)
        for _ in range(200_000):
            nxt = mat @ vec
            nxt /= nxt.sum()
            if np.abs(nxt - vec).max() < 1e-15:
                vec = nxt
                break
            vec = nxt
        base = np.zeros(2**s_len)
        for i, w in enumerate(g.vertices):
            code = 0
            for b in w:
                code = (code << 1) | b
            base[code] = vec[i]

    # factor by suffix: F[s, b] = mass(w·b)/mass(w), s = last k-1 bits of w
    n_suffix = 2**s_len
    factors = np.zeros((n_suffix, 2))
    for s in range(n_suffix):
        sw = tuple((s >> (s_len - 1 - j)) & 1 for j in range(s_len))
        for b in (0, 1):
            word = sw + (b,)  # the new depth-k window appended by b
            if s_len:
                new_s = ((s << 1) | b) & (n_suffix - 1)  # suffix of w·b
                ratio = base[new_s] / base[s]
            else:
                ratio = 1.0
            factors[s, b] = math.exp(float(a.value(word))) * ratio

    masses = base.copy()
    level = s_len if s_len else 0
    if level == 0:
        masses = np.array([1.0])
    while level < depth:
        size = masses.size
        nxt = np.zeros(size * 2)
        suffix_mask = n_suffix - 1
        idx = np.arange(size)
        suf = idx & suffix_mask if s_len else np.zeros(size, dtype=int)
        nxt[0::2] = masses * factors[suf, 0]
        nxt[1::2] = masses * factors[suf, 1]
        masses = nxt
        level += 1
    total = masses.sum()
    masses = masses / total
    theta = np.concatenate(([0.0], np.cumsum(masses)))
    theta[-1] = 1.0
    if (masses <= 0).any():
        raise ValidationError("eigenmeasure has a null cylinder")
    return EigenMeasureTable(depth, masses, theta)


def map_from_potential(
    a: Potential, resolution: int, tolerance: float = 1e-9
) -> tuple[CircleMap, EigenMeasureTable]:
    """Rebuild the circle map of a zero-pressure potential (tabulated).

    The conjugacy sends the dyadic cylinder of each word to an arc whose
    length is the eigenmeasure mass, and the rebuilt map is doubling seen
    through that change of coordinates; its derivative is exp(-A) in the
    new coordinates.  The result is a knot table at the requested
    resolution (a power of two), evaluated by monotone interpolation.
    """
    from .thermo import pressure

    if abs(pressure(a, 1.0)) > tolerance:
        raise PressureNotZeroError(
            f"pressure {pressure(a, 1.0)} is not within {tolerance} of zero"
        )
    r_depth = max(1, int(round(math.log2(resolution))))
    if 2**r_depth != resolution:
        raise ValidationError("resolution must be a power of two")
    if r_depth < a.depth + 2:
        raise ResolutionTooCoarseError("resolution below the potential depth")

    emt = eigenmeasure_table(a, r_depth)
    theta = emt.theta
    size = emt.masses.size

    # knots at the arc images of the dyadic grid: the rebuilt map is linear
    # between them (theta stretches every dyadic cell by a constant factor),
    # so the interpolated table is the map itself up to rounding
    xs = theta
    half = size // 2
    lift_vals = np.empty(size + 1)
    lift_vals[: half + 1] = theta[0 : size + 1 : 2][: half + 1]
    lift_vals[half : size + 1] = 1.0 + theta[0 : size + 1 : 2]
    lift_vals[0] = 0.0
    lift_vals[-1] = 2.0

    fmap = table_map(np.column_stack((xs, lift_vals)).tolist())
    return fmap, emt


__all__ = [
    "CircleMap",
    "CodingReport",
    "CodingTable",
    "EigenMeasureTable",
    "LyapunovResult",
    "coding_table",
    "conjugacy_residual",
    "doubling_map",
    "dump_map",
    "eigenmeasure_table",
    "lyapunov_maximize",
    "load_map",
    "map_from_potential",
    "perturbed_doubling",
    "potential_from_map",
    "table_map",
    "theta_holder_estimate",
    "validate_circle_map",
]
