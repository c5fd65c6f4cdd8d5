"""Shadowing of pseudo-orbits with jumps.

A delta-pseudo-orbit is a finite sequence of points that follows the shift
except at M jump indices, each of size at most delta.  For delta below
(1 - lam) every jump preserves the leading symbol, so the true shadowing
point can be read off symbolically: its symbol stream is the sequence of
leading symbols of the pseudo-orbit (closed into a cycle word when the
pseudo-orbit is closed).  The certificate measures the shadowing distance
and the worst Birkhoff-sum deviation against their certified bounds.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .errors import (
    BoundViolatedError,
    BranchMissingError,
    DeltaTooLargeError,
    ValidationError,
)
from .potential import Potential, holder_constant
from .sft import (
    MetricParams,
    SubshiftSpec,
    SymbolicPoint,
    Word,
    canonical_cycle,
    check_point,
    distance,
    random_cycle,
    shortest_connector,
)

#: Radius at which every inverse branch of the shift is globally defined
#: (points at distance < 1 share their first symbol).
EPSILON_0 = 1.0


def epsilon_1(metric: MetricParams) -> float:
    """Largest admissible jump size: (1 - lam) * epsilon_0."""
    return (1.0 - metric.lam) * EPSILON_0


@dataclass(frozen=True)
class PseudoOrbit:
    """Points x_0..x_N with jump indices and the max jump size delta."""

    points: tuple[SymbolicPoint, ...]
    delta: float
    jumps: tuple[int, ...]
    closed: bool
    metric: MetricParams = MetricParams()

    @property
    def n_jumps(self) -> int:
        return len(self.jumps)

    @property
    def length(self) -> int:
        return len(self.points) - 1

    @classmethod
    def from_points(
        cls,
        points,
        spec: SubshiftSpec,
        metric: MetricParams = MetricParams(),
    ) -> "PseudoOrbit":
        pts = tuple(points)
        if len(pts) < 2:
            raise ValidationError("a pseudo-orbit needs at least two points")
        for p in pts:
            check_point(spec, p)
        jumps = []
        delta = 0.0
        for i in range(len(pts) - 1):
            nxt = pts[i].shift()
            if nxt != pts[i + 1]:
                jumps.append(i)
                delta = max(delta, distance(nxt, pts[i + 1], metric))
        return cls(pts, delta, tuple(jumps), pts[-1] == pts[0], metric)


@dataclass(frozen=True)
class ShadowingCertificate:
    """Measured shadowing quantities against their certified bounds.

    ``k1`` is (M+1) * Hold_alpha(A) / ((1 - lam**alpha) * (1 - lam)**alpha);
    the same constant expressed in the expansion convention (expansion rate
    1/lam) is recorded alongside for auditability.
    """

    point: SymbolicPoint
    shadow_radius: float
    birkhoff_bound: float
    k1: float
    measured_max_distance: float
    measured_sum_deviation: float
    delta: float
    n_jumps: int
    constants: dict


def k1_constant(hold: float, metric: MetricParams, n_jumps: int) -> float:
    """Birkhoff-sum constant of the shadowing bound."""
    lam, alpha = metric.lam, metric.alpha
    return (n_jumps + 1) * hold / ((1.0 - lam**alpha) * (1.0 - lam) ** alpha)


def shadow(po: PseudoOrbit, spec: SubshiftSpec) -> SymbolicPoint:
    """True orbit shadowing a pseudo-orbit.

    For a closed pseudo-orbit the result is the N-periodic point whose
    cycle word collects the leading symbols of x_0..x_{N-1}; otherwise it
    is the point with those leading symbols prepended to x_N, so that
    shift^N(p) = x_N exactly.  Requires delta < (1 - lam).
    """
    eps1 = epsilon_1(po.metric)
    if po.delta >= eps1:
        raise DeltaTooLargeError(f"delta = {po.delta} is not below {eps1}")
    lead = tuple(p.symbol(0) for p in po.points[:-1])
    # jumps below cylinder separation keep consecutive leading symbols
    # admissible; anything else means the branch selection broke down
    for i in range(len(lead) - 1):
        if not spec.allows(lead[i], lead[i + 1]):
            raise BranchMissingError(f"no admissible branch at index {i}")
    if po.closed:
        if not spec.allows(lead[-1], lead[0]):
            raise BranchMissingError("closing transition is not admissible")
        return SymbolicPoint((), lead)
    tail = po.points[-1]
    if not spec.allows(lead[-1], tail.symbol(0)):
        raise BranchMissingError("no admissible branch into the final point")
    return SymbolicPoint(lead + tail.preperiod, tail.cycle)


def certify(po: PseudoOrbit, p: SymbolicPoint, a: Potential) -> ShadowingCertificate:
    """Measure the shadowing distance and Birkhoff-sum deviation of p.

    Asserts measured_max_distance <= lam*delta/(1-lam) and the worst
    segment deviation |sum A(shift^k p) - sum A(x_k)| <= M * k1 * delta**alpha,
    raising ``BoundViolatedError`` with the offending index otherwise.
    """
    metric = a.metric
    lam, alpha = metric.lam, metric.alpha
    n = po.length
    m_jumps = po.n_jumps
    hold = holder_constant(a)
    k1 = k1_constant(hold, metric, m_jumps)
    radius = lam * po.delta / (1.0 - lam)
    sum_bound = m_jumps * k1 * po.delta**alpha

    max_dist = 0.0
    worst_k = -1
    cur = p
    devs = []
    for k in range(n + 1):
        d = distance(cur, po.points[k], metric)
        if d > max_dist:
            max_dist, worst_k = d, k
        devs.append(float(a.eval(cur)) - float(a.eval(po.points[k])))
        cur = cur.shift()
    if max_dist > radius + 1e-12:
        raise BoundViolatedError(
            f"shadow distance {max_dist} at index {worst_k} exceeds {radius}"
        )

    # max over segments i..j of |prefix[j+1] - prefix[i]| = spread of prefixes
    prefix = [0.0]
    for d in devs:
        prefix.append(prefix[-1] + d)
    sum_dev = max(prefix) - min(prefix)
    if sum_dev > sum_bound + 1e-12:
        i = prefix.index(min(prefix))
        j = prefix.index(max(prefix))
        raise BoundViolatedError(
            f"Birkhoff deviation {sum_dev} on segment {min(i, j)}..{max(i, j)} "
            f"exceeds {sum_bound}"
        )

    constants = {
        "lambda_contraction": lam,
        "alpha": alpha,
        "hold_alpha": hold,
        "k1_contraction_convention": k1,
        "expansion_rate": 1.0 / lam,
        "k1_expansion_convention": (m_jumps + 1)
        * hold
        / ((1.0 - (1.0 / lam) ** (-alpha)) * (1.0 - (1.0 / lam) ** (-1)) ** alpha),
        "epsilon_0": EPSILON_0,
        "epsilon_1": epsilon_1(metric),
    }
    return ShadowingCertificate(
        p,
        radius,
        sum_bound,
        k1,
        max_dist,
        sum_dev,
        po.delta,
        m_jumps,
        constants,
    )


def _detour_block(spec: SubshiftSpec, c: Word) -> Word:
    """A short admissible block b with c[-1] -> b -> c[0] admissible that
    deviates from the periodic continuation of c."""
    cont = (c * 3)[: spec.alphabet_size + len(c) + 2]
    for t in spec.successors[c[-1]]:
        if t == c[0]:
            continue
        tail = shortest_connector(spec, t, c[0])
        if tail is not None:
            return (t,) + tail
    # every successor of c[-1] equals c[0]; deviate one step later
    for t in spec.successors[c[0]]:
        if t == c[1 % len(c)]:
            continue
        tail = shortest_connector(spec, t, c[0])
        if tail is not None:
            b = (c[0], t) + tail
            if b != cont[: len(b)]:
                return b
    raise BranchMissingError("cycle admits no admissible detour")


def random_pseudo_orbit(
    spec: SubshiftSpec,
    rng: random.Random,
    n_jumps: int,
    metric: MetricParams = MetricParams(),
    delta: float = 0.05,
    closed: bool = True,
    run_slack: int = 3,
) -> PseudoOrbit:
    """Seeded pseudo-orbit gluing true orbit runs along random periodic
    orbits with jumps of size at most delta.

    Each glue point agrees with the incoming orbit for at least
    ceil(log delta / log lam) symbols.  A closed orbit with one jump uses
    an almost-returning point (a periodic pattern broken by a short
    admissible detour).
    """
    if n_jumps < 1:
        raise ValidationError("need at least one jump")
    lam = metric.lam
    min_run = math.ceil(math.log(delta) / math.log(lam))

    def reps_for(c: Word) -> int:
        return math.ceil(min_run / len(c)) + rng.randrange(run_slack + 1)

    for _ in range(64):
        if closed and n_jumps == 1:
            c = random_cycle(spec, rng, rng.randint(1, 3))
            b = _detour_block(spec, c)
            head = c * reps_for(c) + b
            x0 = SymbolicPoint(head, c)
            run = len(head) + len(c) * rng.randrange(run_slack + 1)
            points = [x0]
            cur = x0
            for _ in range(run - 1):
                cur = cur.shift()
                points.append(cur)
            points.append(x0)
        else:
            # a run of n_seg switching segments has n_seg - 1 interior glue
            # jumps; closing adds the wrap jump
            n_seg = n_jumps if closed else n_jumps + 1
            cycles: list[Word] = []
            stuck = False
            while len(cycles) < n_seg + 1:
                c = random_cycle(spec, rng, rng.randint(1, 3))
                if cycles and canonical_cycle(c) == canonical_cycle(cycles[-1]):
                    stuck = True
                    break
                cycles.append(c)
            if stuck:
                continue
            if closed:
                if canonical_cycle(cycles[0]) == canonical_cycle(cycles[-2]):
                    continue
                cycles[-1] = cycles[0]
            points = []
            ok = True
            for i in range(n_seg):
                c_now, c_next = cycles[i], cycles[i + 1]
                head = c_now * reps_for(c_now)
                bridge = shortest_connector(spec, head[-1], c_next[0])
                if bridge is None:
                    ok = False
                    break
                run_len = len(head) + len(bridge)
                cur = SymbolicPoint(head + bridge, c_next)
                for _ in range(run_len):
                    points.append(cur)
                    cur = cur.shift()
            if not ok:
                continue
            if closed:
                points.append(points[0])
        po = PseudoOrbit.from_points(points, spec, metric)
        if po.n_jumps == n_jumps and po.delta <= delta and po.closed == closed:
            return po
    raise BranchMissingError("failed to draw a pseudo-orbit with the requested jumps")


__all__ = [
    "EPSILON_0",
    "PseudoOrbit",
    "ShadowingCertificate",
    "certify",
    "epsilon_1",
    "k1_constant",
    "random_pseudo_orbit",
    "shadow",
]
