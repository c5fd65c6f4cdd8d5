"""Transfer operator, pressure, equilibrium states, zero-temperature scans.

For a depth-k locally constant potential the transfer operator acts on
cylinder functions through the nonnegative matrix L[u][v] = exp(t*A(u)) on
word-graph edges; the topological pressure is the log of its spectral
radius and the equilibrium state is the Markov measure assembled from the
Perron left/right eigenvectors.

Large inverse temperatures are handled by conjugating with a calibrated
sub-action and factoring out exp(t*m0): the rescaled matrix has entries
exp(t*B) in (0, 1] and spectral radius in [1, n] for every t >= 0, so
scans up to t of order 10^3 stay well conditioned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .errors import NonConvergenceError, ValidationError
from .optimize import (
    InvariantMeasure,
    MaxResult,
    SubAction,
    markov_measure,
    max_mean,
    orbit_measure,
    subaction,
)
from .potential import Potential, affine_combine
from .sft import SubshiftSpec, Word, admissible_words, word_graph

POWER_TOL = 5e-14
POWER_MAXITER = 200_000
VARIATIONAL_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """Raw transfer matrix exp(t*A(source)) on word-graph edges.

    Intended for inspection and residual tests at moderate t; the pressure
    and equilibrium computations use a stabilized rescaling internally.
    """

    spec: SubshiftSpec
    depth: int
    words: tuple[Word, ...]
    matrix: np.ndarray
    t: float


@dataclass(frozen=True, eq=False)
class ThermoState:
    """Equilibrium data at one inverse temperature."""

    t: float
    pressure: float
    equilibrium: InvariantMeasure
    entropy: float
    energy: float


def transfer_matrix(a: Potential, t: float = 1.0) -> TransferMatrix:
    g = word_graph(a.spec, a.depth)
    n = len(g.vertices)
    mat = np.zeros((n, n))
    for u, v in g.edges:
        mat[u, v] = math.exp(t * float(a.value(g.vertices[u])))
    return TransferMatrix(a.spec, a.depth, g.vertices, mat, t)


def _scaled_matrix(a: Potential, t: float, r: MaxResult | None = None,
                   v: SubAction | None = None):
    """Sub-action-conjugated, m0-factored matrix: entries exp(t*B) <= e^eps.

    Returns (graph, matrix, log_factor) with
    log rho(L_tA) = log_factor + log rho(matrix).
    """
    if r is None:
        r = max_mean(a)
    if v is None:
        v = subaction(a, r)
    g = word_graph(a.spec, a.depth)
    n = len(g.vertices)
    m0 = float(r.m0)
    mat = np.zeros((n, n))
    for u, vtx in g.edges:
        w = g.vertices[u]
        b = float(a.value(w)) - m0 + float(v.value(w)) - float(v.shifted_value(
            w + (g.vertices[vtx][-1],)
        ))
        mat[u, vtx] = math.exp(t * b)
    return g, mat, t * m0


def _perron_value(mat: np.ndarray, tol: float = POWER_TOL) -> float:
    """Spectral radius of a nonnegative matrix, component by component.

    Power iteration on (block + I) with Collatz–Wielandt bounds; the
    identity shift makes every irreducible block primitive, so the bounds
    converge geometrically.
    """
    n = mat.shape[0]
    dg = nx.DiGraph((int(i), int(j)) for i, j in zip(*np.nonzero(mat)))
    dg.add_nodes_from(range(n))
    best = 0.0
    for comp in nx.strongly_connected_components(dg):
        nodes = sorted(comp)
        if len(nodes) == 1 and mat[nodes[0], nodes[0]] == 0.0:
            continue
        block = mat[np.ix_(nodes, nodes)]
        best = max(best, _perron_block(block, tol))
    return best


def _perron_block(block: np.ndarray, tol: float) -> float:
    n = block.shape[0]
    if n == 1:
        return float(block[0, 0])
    if n == 2:
        a, b = block[0]
        c, d = block[1]
        disc = math.sqrt((a - d) * (a - d) + 4.0 * b * c)
        return (a + d + disc) / 2.0
    x = np.ones(n)
    shifted = block + np.eye(n)
    for _ in range(POWER_MAXITER):
        y = shifted @ x
        ratios = y / x
        lo, hi = ratios.min(), ratios.max()
        x = y / y.max()
        if hi - lo <= tol * max(1.0, hi):
            return (lo + hi) / 2.0 - 1.0
    raise NonConvergenceError("power iteration did not reach the tolerance")


def _perron_vectors(mat: np.ndarray, tol: float = POWER_TOL):
    """Right and left Perron vectors of an irreducible nonnegative matrix."""
    n = mat.shape[0]
    rho = _perron_block(mat, tol) if n <= 2 else None
    shifted = mat + np.eye(n)

    def iterate(m):
        x = np.ones(n)
        for _ in range(POWER_MAXITER):
            y = m @ x
            # components decaying to zero (possible at very large inverse
            # temperatures, where off-support entries underflow) are
            # excluded from the Collatz bounds
            mask = x > x.max() * 1e-13
            ratios = y[mask] / x[mask]
            lo, hi = ratios.min(), ratios.max()
            nxt = y / y.max()
            done = hi - lo <= tol * max(1.0, hi) and np.abs(nxt - x).max() <= tol
            x = nxt
            if done:
                return x, (lo + hi) / 2.0 - 1.0
        raise NonConvergenceError("eigenvector iteration did not converge")

    right, rv = iterate(shifted)
    left, lv = iterate(shifted.T)
    return right, left, (rho if rho is not None else (rv + lv) / 2.0)


def pressure(a: Potential, t: float = 1.0) -> float:
    """Topological pressure P(tA) = log spectral radius of the transfer
    matrix, exact for blocks of size <= 2."""
    _g, mat, log_factor = _scaled_matrix(a, t)
    rho = _perron_value(mat)
    if rho <= 0.0:
        raise NonConvergenceError("transfer matrix has no cycle")
    return log_factor + math.log(rho)


def equilibrium(a: Potential, t: float = 1.0) -> ThermoState:
    """Equilibrium (Gibbs–Markov) state of t*A on a mixing subshift.

    The chain is P(u, v) = L[u][v] r(v) / (rho r(u)) with r the right
    Perron vector and stationary law pi = l*r (componentwise, normalized);
    entropy comes from the Markov chain formula and the variational
    identity pressure = entropy + t * energy is asserted to 1e-8.
    """
    if not a.spec.mixing:
        raise ValidationError("equilibrium states require a mixing subshift")
    g, mat, log_factor = _scaled_matrix(a, t)
    n = mat.shape[0]
    right, left, rho = _perron_vectors(mat)
    chain = np.zeros((n, n))
    for u in range(n):
        if right[u] <= 0.0:
            continue
        row = mat[u] * right / (rho * right[u])
        chain[u] = row
        s = row.sum()
        if s > 0:
            chain[u] = row / s  # renormalize away eigenvector residual
    weights = left * right
    pi = weights / weights.sum()

    logp = np.zeros_like(chain)
    mask = chain > 0
    logp[mask] = np.log(chain[mask])
    entropy = float(-(pi[:, None] * chain * logp).sum())
    energy = float(
        sum(pi[i] * float(a.value(w)) for i, w in enumerate(g.vertices))
    )
    press = log_factor + math.log(rho)
    residual = abs(press - entropy - t * energy)
    if residual > VARIATIONAL_TOL:
        raise NonConvergenceError(
            f"variational identity residual {residual} exceeds {VARIATIONAL_TOL}"
        )
    mu = markov_measure(a.spec, g.vertices, chain, pi)
    return ThermoState(t, press, mu, entropy, energy)


def normalize_pressure(a: Potential) -> Potential:
    """Additively normalize to zero pressure (exact: P(A+c) = P(A)+c)."""
    return affine_combine(a, 1.0, -pressure(a, 1.0))


def eigen_data(a: Potential, t: float = 1.0):
    """(words, raw matrix, rho, right, left) of the transfer operator.

    Eigenvectors are unscaled diagnostics on the raw matrix (moderate t
    only), normalized to max 1; the left vector represents the
    eigenmeasure of the dual operator at cylinder resolution.
    """
    tm = transfer_matrix(a, t)
    g, mat, log_factor = _scaled_matrix(a, t)
    right_s, left_s, rho_s = _perron_vectors(mat)
    # undo the sub-action conjugation: L = e^{t m0} D^{-1} M D
    v = subaction(a, max_mean(a))
    d = np.array([math.exp(t * float(v.value(w))) for w in g.vertices])
    right = right_s / d
    left = left_s * d
    right /= right.max()
    left /= left.max()
    rho = math.exp(log_factor) * rho_s
    return tm.words, tm.matrix, rho, right, left


@dataclass(frozen=True)
class DerivativeReport:
    """Finite-difference check of the pressure derivative.

    The directional derivative of the pressure at A along B equals the
    integral of B against the equilibrium state of A; central differences
    converge at rate O(h^2), so halving h should shrink the error by about
    four.
    """

    exact: float
    steps: tuple[float, ...]
    finite_differences: tuple[float, ...]
    errors: tuple[float, ...]
    ratios: tuple[float, ...]


def pressure_derivative_check(
    a: Potential, b: Potential, h: float = 1e-3
) -> DerivativeReport:
    if h <= 0:
        raise ValidationError("h must be positive")
    state = equilibrium(a, 1.0)
    exact = float(state.equilibrium.integrate(b))
    steps = (h, h / 2, h / 4)
    fds = []
    for s in steps:
        plus = affine_combine(a, 1.0, 0.0, _scaled(b, s))
        minus = affine_combine(a, 1.0, 0.0, _scaled(b, -s))
        fds.append((pressure(plus) - pressure(minus)) / (2 * s))
    errors = tuple(abs(fd - exact) for fd in fds)
    ratios = tuple(
        errors[i] / errors[i + 1] if errors[i + 1] > 0 else math.inf
        for i in range(len(errors) - 1)
    )
    return DerivativeReport(exact, steps, tuple(fds), errors, ratios)


def _scaled(b: Potential, s: float) -> Potential:
    return affine_combine(b, s, 0.0)


def measure_distance(
    mu: InvariantMeasure, nu: InvariantMeasure, depth_cap: int
) -> float:
    """Weighted cylinder-mass discrepancy, a metric for weak convergence.

    Sums 2**-(j*alphabet_size + rank(w)) * |mu[w] - nu[w]| over all
    admissible words w of length j = 1..depth_cap, where rank(w) is the
    0-based lexicographic index of w among the admissible words of its
    length.  Zero exactly when all cylinder masses to depth_cap agree.
    """
    if mu.spec != nu.spec:
        raise ValidationError("measures live on different subshifts")
    n = mu.spec.alphabet_size
    total = 0.0
    for j in range(1, depth_cap + 1):
        for rank, w in enumerate(admissible_words(mu.spec, j)):
            weight = 2.0 ** -(j * n + rank)
            total += weight * abs(float(mu.mass(w)) - float(nu.mass(w)))
    return total


@dataclass(frozen=True, eq=False)
class ZeroTempScan:
    """Equilibrium states along an increasing grid of inverse temperatures.

    Tracks the energy ascent toward the maximal ergodic average and, when
    the potential has a unique maximizing cycle, the weak* distance to the
    corresponding periodic measure.
    """

    states: tuple[ThermoState, ...]
    m0: float
    energies: tuple[float, ...]
    entropies: tuple[float, ...]
    distances: tuple[float, ...] | None
    candidate_cycle: Word | None
    energy_nondecreasing: bool
    distance_nonincreasing: bool | None


def zero_temp_scan(
    a: Potential,
    t_grid,
    candidate_depth: int = 3,
    monotonicity_slack: float = 1e-10,
) -> ZeroTempScan:
    grid = [float(t) for t in t_grid]
    if not grid or any(t <= 0 for t in grid) or sorted(grid) != grid:
        raise ValidationError("t grid must be nonempty, positive, increasing")
    r = max_mean(a)
    states = tuple(equilibrium(a, t) for t in grid)
    energies = tuple(s.energy for s in states)
    entropies = tuple(s.entropy for s in states)
    distances = None
    candidate = None
    if r.unique:
        candidate = r.cycle_words[0]
        target = orbit_measure(a.spec, candidate)
        distances = tuple(
            measure_distance(s.equilibrium, target, candidate_depth) for s in states
        )
    nondec = all(
        energies[i + 1] >= energies[i] - monotonicity_slack
        for i in range(len(energies) - 1)
    )
    noninc = None
    if distances is not None:
        noninc = all(
            distances[i + 1] <= distances[i] + monotonicity_slack
            for i in range(len(distances) - 1)
        )
    return ZeroTempScan(
        states, float(r.m0), energies, entropies, distances, candidate, nondec, noninc
    )


__all__ = [
    "DerivativeReport",
    "ThermoState",
    "TransferMatrix",
    "ZeroTempScan",
    "equilibrium",
    "measure_distance",
    "normalize_pressure",
    "pressure",
    "pressure_derivative_check",
    "transfer_matrix",
    "zero_temp_scan",
]
