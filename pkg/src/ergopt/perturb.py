"""Constructive perturbations: orbit locking, support penalties,
separating functionals, and randomized genericity experiments.

The locking perturbation adds a bump supported on a small neighborhood of
a chosen periodic orbit to the coboundary-reduced potential, sized so that
the orbit measure becomes the unique maximizer with an explicit gap; the
bump's sup norm and Hölder constant obey closed-form bounds in the bump
radius.  A pressure correction keeps the perturbed potential at zero
pressure (up to an additive constant bounded by the bump's sup norm).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .errors import (
    BoundViolatedError,
    DepthBudgetError,
    InadmissibleCycleError,
    LockFailedError,
    NotExtremeError,
    SeparationTooSmallError,
    ValidationError,
)
from .optimize import (
    BruteForceResult,
    InvariantMeasure,
    brute_force,
    deficiency,
    max_mean,
    subaction,
)
from .potential import (
    Potential,
    affine_combine,
    holder_constant,
    random_potential,
)
from .sft import (
    MetricParams,
    SubshiftSpec,
    Word,
    admissible_words,
    canonical_cycle,
    cylinder_distance,
    distance,
    format_word,
    orbit_points,
    parse_word,
)
from .shadowing import k1_constant
from .thermo import pressure

VERTEX_BUDGET = 2**20


@dataclass(frozen=True)
class PerturbationParams:
    """Constants of the locking bump.

    eta = (1 - lam)/2; k_sep is the smallest K with 1/(1 - lam^K) < 3/2 and
    1 - (lam + lam^K)/(1 - lam^K) > eta; d_sep is the orbit separation
    scale (pairwise orbit distances exceed 2*d_sep); big_q = k1*(4/eta)**gamma
    with k1 the shadowing constant at exponent gamma for the reduced
    potential's Hölder constant (floored to keep the bump nonzero for
    coboundary-trivial inputs).
    """

    delta: float
    beta: float
    gamma: float
    eta: float
    big_q: float
    k_sep: int
    d_sep: float
    k1: float


def separation_constant(lam: float, eta: float) -> int:
    for k in range(1, 10**6):
        c1 = 1.0 / (1.0 - lam**k)
        c2 = 1.0 - (lam + lam**k) / (1.0 - lam**k)
        if c1 < 1.5 and c2 > eta:
            return k
    raise ValidationError("no separation constant found")


def perturbation_params(
    metric: MetricParams,
    delta: float,
    beta: float,
    gamma: float,
    hold_b: float,
    min_sep: float,
    k1_floor: float = 1.0,
) -> PerturbationParams:
    alpha, lam = metric.alpha, metric.lam
    if not (alpha <= beta < gamma <= 1.0):
        raise ValidationError(
            f"need alpha <= beta < gamma <= 1, got ({alpha}, {beta}, {gamma})"
        )
    if delta <= 0:
        raise ValidationError("bump radius must be positive")
    eta = (1.0 - lam) / 2.0
    k_sep = separation_constant(lam, eta)
    d_sep = 0.4 * min_sep if math.isfinite(min_sep) else 0.5
    # the shadowing constant at exponent gamma, with a floor so that a
    # coboundary-exact input (B identically 0) still produces a bump
    k1 = k1_constant(max(hold_b, k1_floor), MetricParams(lam, gamma), n_jumps=1)
    big_q = k1 * (4.0 / eta) ** gamma
    return PerturbationParams(delta, beta, gamma, eta, big_q, k_sep, d_sep, k1)


@dataclass(frozen=True, eq=False)
class LockCertificate:
    """Measured norms of the locking perturbation against their bounds."""

    cycle: Word
    params: PerturbationParams
    depth: int
    phi_sup: float
    psi_sup: float
    hold_beta_psi: float
    sup_bound: float  # 4 Q delta^gamma
    hold_bound: float  # 4 Q delta^(gamma-beta)
    pressure_shift: float  # the additive correction t
    base_pressure: float
    bounds_applicable: bool  # max |B| on the orbit <= Q delta^gamma
    gap: float
    max_period: int


@dataclass(frozen=True, eq=False)
class LockResult:
    psi: Potential
    perturbed: Potential
    certificate: LockCertificate


def lock_orbit(
    a: Potential,
    cycle,
    delta: float,
    beta: float | None = None,
    gamma: float = 1.0,
    max_period: int = 12,
    tolerance: float = 1e-9,
    k1_floor: float = 1.0,
    budget: int = VERTEX_BUDGET,
) -> LockResult:
    """Perturb ``a`` so the orbit of ``cycle`` is the unique maximizer.

    Builds the reduced potential B through the sub-action, bumps it by
    phi(x) = max(0, (3 Q d^(g-b) - B(p_x)/d^b) (d^b - |x|^b)) at a cylinder
    depth fine enough to resolve the radius d = delta (|x| is the distance
    to the orbit, p_x the nearest orbit point), applies the additive
    pressure correction, and certifies by brute force over periods up to
    ``max_period`` that the orbit measure is the unique maximizer with a
    positive gap.
    """
    spec, metric = a.spec, a.metric
    c = canonical_cycle(parse_word(cycle))
    if not spec.is_admissible_cycle(c):
        raise InadmissibleCycleError(f"cycle {format_word(c)} does not close")
    if beta is None:
        beta = (metric.alpha + gamma) / 2.0
    orbit = orbit_points(c)
    n_orbit = len(orbit)
    if n_orbit > 1:
        min_sep = min(
            distance(orbit[i], orbit[j], metric)
            for i in range(n_orbit)
            for j in range(i + 1, n_orbit)
        )
        if delta >= min_sep / 2.0:
            raise SeparationTooSmallError(
                f"delta = {delta} is not below half the orbit separation {min_sep}"
            )
    else:
        min_sep = math.inf

    lam = metric.lam
    m_delta = math.ceil(math.log(delta) / math.log(lam))
    # resolve the radius, and exceed the period so that the only sequences
    # staying inside the orbit's cylinders are the orbit itself
    depth = max(m_delta + a.depth, n_orbit + 1)
    if spec.alphabet_size**depth > budget:
        raise DepthBudgetError(f"resolving delta needs depth {depth}")

    r = max_mean(a, tolerance)
    v = subaction(a, r, tolerance)
    defi = deficiency(a, v, tolerance)
    b_pot = Potential(spec, defi.depth, defi.values, metric)
    hold_b = holder_constant(b_pot, exponent=gamma)
    params = perturbation_params(metric, delta, beta, gamma, hold_b, min_sep, k1_floor)
    big_q = params.big_q

    orbit_words = [p.prefix(depth) for p in orbit]
    if len(set(orbit_words)) != n_orbit:
        raise SeparationTooSmallError("working depth does not separate the orbit")
    b_orbit = [float(b_pot.eval(p)) for p in orbit]

    amp = 3.0 * big_q * delta ** (gamma - beta)
    phi_vals: dict[Word, float] = {}
    for w in admissible_words(spec, depth):
        dist = min(cylinder_distance(w, ow, metric) for ow in orbit_words)
        nearest = min(
            range(n_orbit), key=lambda i: cylinder_distance(w, orbit_words[i], metric)
        )
        gain = delta**beta - dist**beta
        if gain <= 0:
            phi_vals[w] = 0.0
        else:
            phi_vals[w] = max(0.0, (amp - b_orbit[nearest] / delta**beta) * gain)
    phi = Potential(spec, depth, phi_vals, metric)

    base_pressure = pressure(a, 1.0)
    shift = -pressure(affine_combine(a, 1.0, 0.0, phi), 1.0)
    psi = affine_combine(phi, 1.0, shift)
    perturbed = affine_combine(a, 1.0, 0.0, psi)

    phi_sup = max(abs(x) for x in phi_vals.values())
    psi_sup = max(abs(x) for x in psi.values.values())
    hold_beta_psi = holder_constant(psi, exponent=beta)
    sup_bound = 4.0 * big_q * delta**gamma
    hold_bound = 4.0 * big_q * delta ** (gamma - beta)
    applicable = max(abs(x) for x in b_orbit) <= big_q * delta**gamma + tolerance
    if applicable:
        slack = 1e-9 * max(1.0, sup_bound)
        if phi_sup > sup_bound + slack or hold_beta_psi > hold_bound + slack:
            raise BoundViolatedError(
                f"bump norms ({phi_sup}, {hold_beta_psi}) exceed the certified "
                f"bounds ({sup_bound}, {hold_bound})"
            )
    if abs(base_pressure) <= tolerance and abs(shift) > phi_sup + 1e-9:
        # the pressure correction of a pressure-zero input is bounded by
        # the bump's sup norm
        raise BoundViolatedError(
            f"pressure correction {shift} exceeds the bump norm {phi_sup}"
        )

    bf = brute_force(perturbed, max_period)
    if bf.cycles != (c,):
        raise LockFailedError(
            f"brute force maximizers {[format_word(x) for x in bf.cycles]} "
            f"!= {format_word(c)}"
        )
    if bf.gap is None or bf.gap <= 0:
        raise LockFailedError("no positive gap to the next orbit")

    cert = LockCertificate(
        c,
        params,
        depth,
        phi_sup,
        psi_sup,
        hold_beta_psi,
        sup_bound,
        hold_bound,
        shift,
        base_pressure,
        applicable,
        float(bf.gap),
        max_period,
    )
    return LockResult(psi, perturbed, cert)


# ---------------------------------------------------------------------------
# support penalties


def support_penalty(
    a: Potential,
    mu: InvariantMeasure,
    strength: float,
    depth: int | None = None,
    beta: float | None = None,
) -> Potential:
    """A + psi with psi = -strength * dist(x, supp mu)^beta, zero exactly on
    the support cylinders at the working depth."""
    if mu.spec != a.spec:
        raise ValidationError("measure and potential live on different subshifts")
    if depth is None:
        if mu.kind == "periodic":
            depth = max(a.depth, len(mu.cycle) + 1)
        else:
            depth = max(a.depth, mu.depth)
    beta = a.metric.alpha if beta is None else beta
    support = mu.support_words(depth)
    if not support:
        raise ValidationError("measure has empty support at the working depth")
    vals: dict[Word, float] = {}
    for w in admissible_words(a.spec, depth):
        if w in support:
            vals[w] = 0.0
        else:
            d = min(cylinder_distance(w, s, a.metric) for s in support)
            vals[w] = -strength * d**beta
    psi = Potential(a.spec, depth, vals, a.metric)
    return affine_combine(a, 1.0, 0.0, psi)


# ---------------------------------------------------------------------------
# separating functionals


@dataclass(frozen=True, eq=False)
class SeparatingFunctional:
    """Linear functional on measures with a unique argmax at the target.

    Evaluates as sum_i coefficients[i] * integral(tests[i]); built from a
    finite test family, so it is the finite constructive version of a
    separating functional on the moment polytope.
    """

    coefficients: tuple[float, ...]
    tests: tuple[Potential, ...]
    target_index: int
    margin: float

    def evaluate(self, mu: InvariantMeasure) -> float:
        return float(
            sum(c * float(mu.integrate(t)) for c, t in zip(self.coefficients, self.tests))
        )


def separating_functional(
    measures,
    tests,
    target_index: int = 0,
    tolerance: float = 1e-9,
) -> SeparatingFunctional:
    """Strictly separate one measure from the rest by test moments.

    Solves max margin s.t. lam . (m_target - m_other) >= margin for all
    others, |lam_i| <= 1; a nonpositive optimal margin means the target's
    moment vector is not an extreme point of the finite set, raising
    ``NotExtremeError``.
    """
    measures = list(measures)
    tests = tuple(tests)
    if not 0 <= target_index < len(measures):
        raise ValidationError("target index out of range")
    moments = np.array(
        [[float(m.integrate(t)) for t in tests] for m in measures], dtype=float
    )
    target = moments[target_index]
    others = [moments[i] for i in range(len(measures)) if i != target_index]
    if not others:
        return SeparatingFunctional(
            tuple(0.0 for _ in tests), tests, target_index, math.inf
        )
    n = len(tests)
    a_ub = np.array(
        [np.concatenate((-(target - other), [1.0])) for other in others]
    )
    c = np.concatenate((np.zeros(n), [-1.0]))
    bounds = [(-1.0, 1.0)] * n + [(None, None)]
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(len(others)), bounds=bounds,
                  method="highs")
    if not res.success:
        raise NotExtremeError(f"separation program failed: {res.message}")
    margin = -res.fun
    if margin <= tolerance:
        raise NotExtremeError(
            f"target moment vector is not strictly extreme (margin {margin})"
        )
    coeffs = tuple(float(x) for x in res.x[:n])
    fn = SeparatingFunctional(coeffs, tests, target_index, float(margin))
    scores = [fn.evaluate(m) for m in measures]
    best = max(scores)
    winners = [i for i, s in enumerate(scores) if s >= best - tolerance]
    if winners != [target_index]:
        raise NotExtremeError(f"argmax not unique at the target: {winners}")
    return fn


# ---------------------------------------------------------------------------
# genericity experiments


@dataclass(frozen=True)
class GenericityRecord:
    sample_id: int
    m0: float
    unique: bool
    period: int
    gap: float


@dataclass(frozen=True, eq=False)
class GenericityStats:
    """Empirical frequency of unique periodic maximizers among random
    potentials (independent uniform values per word, split per-sample
    seeds for schedule-independent reproducibility)."""

    records: tuple[GenericityRecord, ...]
    frequency: float
    seed: int
    depth: int
    max_period: int


def genericity_experiment(
    spec: SubshiftSpec,
    depth: int,
    samples: int,
    max_period: int,
    seed: int,
    gap_threshold: float = 1e-6,
    oracle_tolerance: float = 1e-10,
) -> GenericityStats:
    records = []
    hits = 0
    for i in range(samples):
        rng = np.random.default_rng([seed, i])
        pot = random_potential(spec, depth, rng)
        r = max_mean(pot)
        bf: BruteForceResult = brute_force(pot, max_period)
        if abs(float(r.m0) - float(bf.m0)) > oracle_tolerance:
            raise LockFailedError(
                f"sample {i}: max_mean and brute force disagree on m0"
            )
        unique = (
            len(bf.cycles) == 1
            and bf.gap is not None
            and float(bf.gap) > gap_threshold
        )
        hits += unique
        period = len(bf.cycles[0]) if bf.cycles else 0
        gap = float(bf.gap) if bf.gap is not None else 0.0
        records.append(GenericityRecord(i, float(bf.m0), unique, period, gap))
    freq = hits / samples if samples else 0.0
    return GenericityStats(tuple(records), freq, seed, depth, max_period)


__all__ = [
    "GenericityRecord",
    "GenericityStats",
    "LockCertificate",
    "LockResult",
    "PerturbationParams",
    "genericity_experiment",
    "lock_orbit",
    "perturbation_params",
    "separating_functional",
    "separation_constant",
    "support_penalty",
    "SeparatingFunctional",
]
