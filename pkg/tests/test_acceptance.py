"""Acceptance suite.

Each test exercises one acceptance criterion at its stated tolerance and
prints a PASS/FAIL line (visible with ``pytest -s tests/test_acceptance.py``
or in captured output on failure).  The random-potential pool is shared so
that the coboundary, action-table, and zero-temperature criteria run over
the same samples as the oracle-equivalence criterion.
"""

import math
import random
import time
from contextlib import contextmanager

import numpy as np
import pytest

import ergopt.shadowing as shadowing
from ergopt.circle import (
    CodingTable,
    coding_table,
    doubling_map,
    lyapunov_maximize,
    map_from_potential,
    perturbed_doubling,
    potential_from_map,
)
from ergopt.optimize import (
    brute_force,
    deficiency,
    mane_table,
    aubry_set,
    max_mean,
    orbit_measure,
    subaction,
)
from ergopt.perturb import genericity_experiment, lock_orbit
from ergopt.potential import (
    constant_potential,
    make_potential,
    random_potential,
)
from ergopt.sft import MetricParams, full_shift, golden_mean_shift
from ergopt.thermo import (
    equilibrium,
    measure_distance,
    normalize_pressure,
    pressure,
    pressure_derivative_check,
    zero_temp_scan,
)

FULL2 = full_shift(2)
FULL3 = full_shift(3)
GOLDEN = golden_mean_shift()
MAX_PERIOD = 12

# (spec, depth, count): word graphs stay at or below 12 vertices so that
# brute force over periods <= 12 sees every simple cycle
POOL_PLAN = [
    (FULL2, 1, 5),
    (FULL2, 2, 10),
    (FULL2, 3, 10),
    (GOLDEN, 2, 5),
    (GOLDEN, 3, 10),
    (FULL3, 1, 5),
    (FULL3, 2, 10),
]

_pool_cache = None


def pool():
    """55 seeded random potentials with their max_mean/brute_force results."""
    global _pool_cache
    if _pool_cache is None:
        start = time.monotonic()
        entries = []
        sample = 0
        for spec, depth, count in POOL_PLAN:
            for _ in range(count):
                gen = np.random.default_rng([20240815, sample])
                a = random_potential(spec, depth, gen)
                r = max_mean(a, tolerance=1e-9)
                bf = brute_force(a, MAX_PERIOD)
                entries.append((a, r, bf))
                sample += 1
        _pool_cache = (entries, time.monotonic() - start)
    return _pool_cache


@contextmanager
def criterion(num, name):
    try:
        yield
    except BaseException:
        print(f"[acceptance] criterion {num} ({name}): FAIL")
        raise
    print(f"[acceptance] criterion {num} ({name}): PASS")


def test_criterion_1_oracle_equivalence():
    with criterion(1, "oracle equivalence"):
        entries, elapsed = pool()
        assert len(entries) >= 50
        for a, r, bf in entries:
            assert abs(float(r.m0) - float(bf.m0)) <= 1e-10
            assert set(r.cycle_words) == set(bf.cycles)
        assert elapsed < 30.0, f"pool took {elapsed:.1f}s"


def test_criterion_2_coboundary_suite():
    with criterion(2, "coboundary suite"):
        entries, _ = pool()
        for a, r, _bf in entries:
            v = subaction(a, r, tolerance=1e-9)
            d = deficiency(a, v, tolerance=1e-9)  # raises if any B > 1e-9
            assert d.recurrent_edges, "recurrent mather part is empty"
            top = max(float(d.edge_value(u, w)) for u, w in d.recurrent_edges)
            assert top >= -1e-9
            for cyc in r.critical_cycles:
                total = sum(
                    float(d.edge_value(cyc[i], cyc[(i + 1) % len(cyc)]))
                    for i in range(len(cyc))
                )
                assert -1e-9 <= total <= 1e-9


def test_criterion_3_mane_suite():
    with criterion(3, "Mañé action table"):
        entries, _ = pool()
        start = time.monotonic()
        depth3 = 0
        for a, r, _bf in entries:
            t = mane_table(a, r, tolerance=1e-9)
            s = np.array(
                [[-np.inf if x is None else float(x) for x in row]
                 for row in t.table]
            )
            assert (np.diag(s) <= 1e-9).all()
            lhs = s[:, :, None] + s[None, :, :]
            rhs = np.broadcast_to(s[:, None, :], lhs.shape)
            finite = np.isfinite(lhs) & np.isfinite(rhs)
            assert (lhs[finite] <= rhs[finite] + 1e-9).all()
            aubry = aubry_set(t)  # raises if a critical vertex is missing
            for cyc in r.critical_cycles:
                assert all(w in aubry.words for w in cyc)
            if a.depth == 3:
                depth3 += 1
        assert depth3 >= 10
        assert time.monotonic() - start < 10.0


def test_criterion_4_shadowing_bounds():
    with criterion(4, "shadowing bounds"):
        rng = random.Random(20240815)
        checked = 0
        for spec in (FULL2, GOLDEN):
            for i in range(60):
                m = 1 + (i % 3)
                closed = i % 2 == 0
                po = shadowing.random_pseudo_orbit(
                    spec, rng, m, delta=0.05, closed=closed
                )
                assert po.delta <= 0.05 and po.n_jumps <= 3
                p = shadowing.shadow(po, spec)
                metric = MetricParams(0.5, 1.0 if i % 2 else 0.5)
                a = random_potential(spec, 1 + i % 2, rng, metric=metric)
                cert = shadowing.certify(po, p, a)  # raises on any violation
                lam = metric.lam
                assert cert.measured_max_distance <= (
                    lam * po.delta / (1 - lam) + 1e-12
                )
                assert cert.measured_sum_deviation <= (
                    po.n_jumps * cert.k1 * po.delta**metric.alpha + 1e-12
                )
                checked += 1
        assert checked >= 100


def test_criterion_5_thermo_anchors():
    with criterion(5, "thermodynamic anchors"):
        assert pressure(constant_potential(GOLDEN, 0.0)) == pytest.approx(
            math.log((1 + math.sqrt(5)) / 2), abs=1e-10
        )
        bern = make_potential(FULL2, {"0": 0.0, "1": -1.0})
        for t in (0.0, 1.0, 5.0, 20.0):
            assert pressure(bern, t) == pytest.approx(
                math.log(1 + math.exp(-t)), abs=1e-10
            )
        entries, _ = pool()
        for a, _r, _bf in entries[::5]:
            for t in (1.0, 4.0):
                s = equilibrium(a, t)
                assert abs(s.pressure - s.entropy - t * s.energy) <= 1e-8
        gen = np.random.default_rng(0)
        a = random_potential(GOLDEN, 2, gen)
        b = random_potential(GOLDEN, 2, gen)
        rep = pressure_derivative_check(a, b, 1e-3)
        assert all(3.5 <= ratio <= 4.5 for ratio in rep.ratios)


def test_criterion_6_zero_temperature():
    with criterion(6, "zero-temperature limits"):
        bern = make_potential(FULL2, {"0": 0.0, "1": -1.0})
        grid = [1.0, 2.0, 4.0, 8.0, 16.0]
        scan = zero_temp_scan(bern, grid, candidate_depth=3)
        for t, e in zip(grid, scan.energies):
            q = math.exp(-t)
            assert e == pytest.approx(-q / (1 + q), abs=1e-8)
        assert all(
            scan.energies[i + 1] > scan.energies[i]
            for i in range(len(grid) - 1)
        )
        dirac = orbit_measure(FULL2, "0")
        dists = [
            measure_distance(s.equilibrium, dirac, 3) for s in scan.states
        ]
        assert all(dists[i + 1] < dists[i] for i in range(len(dists) - 1))
        assert dists[-1] <= 1e-3

        entries, _ = pool()
        long_grid = [float(2**k) for k in range(14)]
        for a, r, _bf in entries:
            if not r.unique:
                continue
            sc = zero_temp_scan(a, long_grid, candidate_depth=3)
            assert sc.energy_nondecreasing
            assert abs(sc.energies[-1] - float(r.m0)) <= 1e-3


def test_criterion_7_circle_round_trips():
    with criterion(7, "circle round trips"):
        start = time.monotonic()
        table = coding_table(doubling_map(), 10)
        for code, val in table.entries.items():
            assert abs(val - CodingTable.dyadic(code)) <= 1e-9
        pot, _rep = potential_from_map(doubling_map(), 3)
        for v in pot.values.values():
            assert abs(v + math.log(2)) <= 1e-6

        const = constant_potential(FULL2, -math.log(2))
        fmap, _ = map_from_potential(const, 2**12)
        grid = np.linspace(0.0, 1.0, 1013, endpoint=False)
        assert max(
            abs(fmap.evaluate(float(x)) - (2 * x) % 1.0) for x in grid
        ) <= 1e-9

        gen = np.random.default_rng(20240815)
        a = normalize_pressure(
            random_potential(FULL2, 1, gen, low=-1.2, high=-0.4)
        )
        tol = 1e-4
        for res in (2**14, 2**16):
            g, _ = map_from_potential(a, res)
            back, _ = potential_from_map(g, 1)
            err = max(abs(back.values[w] - a.values[w]) for w in a.values)
            assert err <= tol, f"round trip error {err} at resolution {res}"
            tol /= 4.0  # the certified tolerance shrinks with resolution

        f = perturbed_doubling(0.2)
        res = lyapunov_maximize(f, 8, 10)
        assert min(abs(res.orbit[0]), 1 - abs(res.orbit[0])) <= 1e-9
        assert abs(res.exponent - math.log(2.2)) <= 1e-4
        assert not res.ambiguous
        # independent confirmation: brute force on the +log f' discretization
        pot_plus, _ = potential_from_map(f, 8)
        from ergopt.potential import affine_combine

        bf = brute_force(affine_combine(pot_plus, -1.0, 0.0), 10)
        assert abs(float(bf.m0) - math.log(2.2)) <= 1e-4
        assert set(bf.cycles) <= {(0,), (1,)}  # both code the fixed point 0
        assert time.monotonic() - start < 60.0


def test_criterion_8_orbit_locking():
    with criterion(8, "orbit locking"):
        flat = normalize_pressure(
            constant_potential(FULL2, 0.0, metric=MetricParams(0.5, 0.5))
        )
        for target in ("0", "01", "001"):
            res = lock_orbit(
                flat, target, delta=0.1, beta=0.75, gamma=1.0, max_period=12
            )  # raises LockFailedError on any failure
            cert = res.certificate
            q, d, g, b = (
                cert.params.big_q,
                cert.params.delta,
                cert.params.gamma,
                cert.params.beta,
            )
            assert cert.psi_sup <= 4 * q * d**g
            assert cert.hold_beta_psi <= 4 * q * d ** (g - b)
            assert cert.gap > 0
            bf = brute_force(res.perturbed, 12)
            assert len(bf.cycles) == 1
            assert bf.cycles[0] == tuple(int(c) for c in target)


def test_criterion_9_genericity_probe():
    with criterion(9, "genericity probe"):
        runs = [
            genericity_experiment(FULL2, 2, 100, MAX_PERIOD, seed=0)
            for _ in range(2)
        ]
        assert runs[0].records == runs[1].records  # byte-for-byte reproducible
        stats = runs[0]
        hits = sum(
            1
            for rec in stats.records
            if rec.unique and rec.gap > 1e-6 and rec.period <= MAX_PERIOD
        )
        assert hits >= 90
