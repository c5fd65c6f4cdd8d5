import math
import random

import numpy as np
import pytest

from ergopt.errors import (
    NotExtremeError,
    SeparationTooSmallError,
    ValidationError,
)
from ergopt.optimize import brute_force, orbit_measure
from ergopt.potential import (
    constant_potential,
    make_potential,
    random_potential,
)
from ergopt.perturb import (
    genericity_experiment,
    lock_orbit,
    perturbation_params,
    separating_functional,
    separation_constant,
    support_penalty,
)
from ergopt.sft import MetricParams, canonical_cycle
from ergopt.thermo import normalize_pressure

LOCK_METRIC = MetricParams(0.5, 0.5)


@pytest.fixture
def flat(full2):
    # pressure-normalized constant potential: every measure maximizes
    return normalize_pressure(constant_potential(full2, 0.0, metric=LOCK_METRIC))


class TestParams:
    def test_separation_constant_half(self):
        # lam = 1/2: K = 3 is the first with 1/(1-lam^K) < 3/2 and
        # 1 - (lam + lam^K)/(1 - lam^K) > eta = 1/4
        assert separation_constant(0.5, 0.25) == 3

    def test_q_formula(self):
        p = perturbation_params(LOCK_METRIC, 0.1, 0.75, 1.0, hold_b=0.0,
                                min_sep=1.0)
        assert p.eta == 0.25
        # floored k1 = 2 * 1 / ((1 - 0.5) * 0.5) = 8; Q = 8 * (4/0.25)
        assert p.k1 == pytest.approx(8.0)
        assert p.big_q == pytest.approx(128.0)
        assert p.k_sep == 3
        assert p.d_sep == pytest.approx(0.4)

    def test_exponent_ordering_enforced(self):
        with pytest.raises(ValidationError):
            perturbation_params(MetricParams(0.5, 1.0), 0.1, 0.75, 1.0, 0.0, 1.0)


class TestLockOrbit:
    @pytest.mark.parametrize("cycle", ["0", "01", "001"])
    def test_locks_on_flat_potential(self, flat, cycle):
        res = lock_orbit(flat, cycle, delta=0.1, beta=0.75, gamma=1.0,
                         max_period=12)
        cert = res.certificate
        assert cert.gap > 0
        assert cert.bounds_applicable
        assert cert.phi_sup <= cert.sup_bound + 1e-9
        assert cert.hold_beta_psi <= cert.hold_bound + 1e-9
        assert cert.psi_sup <= 2 * cert.phi_sup + 1e-9
        assert abs(cert.pressure_shift) <= cert.phi_sup + 1e-9
        bf = brute_force(res.perturbed, 12)
        assert bf.cycles == (canonical_cycle(tuple(int(c) for c in cycle)),)

    def test_bump_peaks_exactly_on_orbit(self, flat):
        # B + phi attains its maximum exactly on the target orbit's
        # cylinders (B vanishes identically for a flat potential)
        res = lock_orbit(flat, "01", delta=0.1, beta=0.75, gamma=1.0)
        psi, cert = res.psi, res.certificate
        shift = cert.pressure_shift
        peak = max(v - shift for v in psi.values.values())
        orbit_cylinders = {
            tuple(((0, 1) * psi.depth)[: psi.depth]),
            tuple(((1, 0) * psi.depth)[: psi.depth]),
        }
        assert peak > 0
        for w, v in psi.values.items():
            phi = v - shift
            if w in orbit_cylinders:
                assert phi == pytest.approx(peak)
            else:
                assert phi < peak - 1e-9

    def test_preserves_existing_maximizer(self, full2):
        # a potential already uniquely maximized at the fixed point 0
        a = make_potential(full2, {"0": 0.0, "1": -1.0}, LOCK_METRIC)
        a = normalize_pressure(a)
        before = brute_force(a, 12)
        res = lock_orbit(a, "0", delta=0.1, beta=0.75, gamma=1.0)
        after = brute_force(res.perturbed, 12)
        assert before.cycles == after.cycles == ((0,),)
        assert after.gap >= before.gap

    def test_separation_guard(self, flat):
        # the (001) orbit has separation 1/2, so delta must be below 1/4
        with pytest.raises(SeparationTooSmallError):
            lock_orbit(flat, "001", delta=0.3, beta=0.75, gamma=1.0)

    def test_golden_mean_lock(self, golden):
        a = normalize_pressure(
            constant_potential(golden, 0.0, metric=LOCK_METRIC)
        )
        res = lock_orbit(a, "001", delta=0.1, beta=0.75, gamma=1.0)
        assert res.certificate.gap > 0

    def test_locks_nonoptimal_orbit(self, full2):
        # locking an orbit that the base potential does not favor
        gen = np.random.default_rng(2)
        a = normalize_pressure(
            random_potential(full2, 1, gen, metric=LOCK_METRIC)
        )
        base = brute_force(a, 12)
        res = lock_orbit(a, "011", delta=0.05, beta=0.75, gamma=1.0,
                         max_period=12)
        assert res.certificate.gap > 0
        after = brute_force(res.perturbed, 12)
        assert after.cycles == ((0, 1, 1),)
        assert base.cycles != after.cycles  # the lock moved the maximizer

    def test_long_period_orbit_raises_depth(self, flat):
        # period 6 exceeds the radius-resolving depth; the working depth
        # must exceed the period so the locked neighborhood holds no other
        # invariant sequence
        res = lock_orbit(flat, "000111", delta=0.05, beta=0.75, gamma=1.0,
                         max_period=12)
        assert res.certificate.depth >= 7
        assert res.certificate.gap > 0
        bf = brute_force(res.perturbed, 12)
        assert bf.cycles == ((0, 0, 0, 1, 1, 1),)


class TestSupportPenalty:
    def test_whole_graph_support_unchanged(self, full2, rng):
        a = random_potential(full2, 1, rng)
        mu = equilibrium_like_full_support(full2)
        out = support_penalty(a, mu, 1.0)
        for w in out.values:
            assert out.values[w] == pytest.approx(a.value(w))

    def test_fixed_point_support(self, full2, rng):
        a = random_potential(full2, 1, rng)
        mu = orbit_measure(full2, "0")
        out = support_penalty(a, mu, 1.0)
        zeros = [w for w in out.values if set(w) == {0}]
        for w in zeros:
            assert out.values[w] == pytest.approx(a.value(w))
        others = [w for w in out.values if set(w) != {0}]
        for w in others:
            assert out.values[w] < a.value(w)

    def test_invariant_integrals(self, full2, rng):
        # the penalty never changes the integral for measures inside the
        # support and strictly decreases it otherwise
        a = random_potential(full2, 1, rng)
        mu = orbit_measure(full2, "01")
        out = support_penalty(a, mu, 2.0)
        assert float(mu.integrate(out)) == pytest.approx(float(mu.integrate(a)))
        nu = orbit_measure(full2, "001")
        assert float(nu.integrate(out)) < float(nu.integrate(a)) - 1e-9

    def test_maximizer_moves_into_support(self, full2, rng):
        a = random_potential(full2, 1, rng)
        mu = orbit_measure(full2, "01")
        out = support_penalty(a, mu, 10.0)
        bf = brute_force(out, 8)
        assert set(bf.cycles) <= {(0, 1)} or all(
            set(c) <= {0, 1} and len(c) <= 2 for c in bf.cycles
        )

    def test_stability_probe_under_small_noise(self, full2):
        # semi-continuity: maximizers of the penalized potential survive
        # small perturbations, staying on the support of the target
        from ergopt.potential import affine_combine

        gen = np.random.default_rng(5)
        a = random_potential(full2, 1, gen)
        mu = orbit_measure(full2, "01")
        out = support_penalty(a, mu, 5.0)
        assert brute_force(out, 8).cycles == ((0, 1),)
        for i in range(20):
            noise_gen = np.random.default_rng([5, i])
            noise = random_potential(
                full2, out.depth, noise_gen, low=-0.01, high=0.01
            )
            bf = brute_force(affine_combine(out, 1.0, 0.0, noise), 8)
            assert bf.cycles == ((0, 1),)


def equilibrium_like_full_support(spec):
    import numpy as np

    from ergopt.optimize import markov_measure

    mat = np.full((2, 2), 0.5)
    return markov_measure(spec, ((0,), (1,)), mat, np.array([0.5, 0.5]))


class TestSeparatingFunctional:
    def test_two_diracs(self, full2):
        mu = [orbit_measure(full2, "0"), orbit_measure(full2, "1")]
        tests = [
            make_potential(full2, {"0": 1.0, "1": 0.0}),
            make_potential(full2, {"0": 0.0, "1": 1.0}),
        ]
        fn = separating_functional(mu, tests, 0)
        scores = [fn.evaluate(m) for m in mu]
        assert scores[0] > scores[1]

    def test_midpoint_not_extreme(self, full2):
        mu = [
            orbit_measure(full2, "01"),  # the moment midpoint of the diracs
            orbit_measure(full2, "0"),
            orbit_measure(full2, "1"),
        ]
        tests = [
            make_potential(full2, {"0": 1.0, "1": 0.0}),
            make_potential(full2, {"0": 0.0, "1": 1.0}),
        ]
        with pytest.raises(NotExtremeError):
            separating_functional(mu, tests, 0)

    def test_three_periodic_depth2(self, full2):
        mu = [
            orbit_measure(full2, "0"),
            orbit_measure(full2, "01"),
            orbit_measure(full2, "011"),
        ]
        tests = [
            make_potential(full2, {"00": 1.0, "01": 0.0, "10": 0.0, "11": 0.0}),
            make_potential(full2, {"00": 0.0, "01": 1.0, "10": 0.0, "11": 0.0}),
            make_potential(full2, {"00": 0.0, "01": 0.0, "10": 0.0, "11": 1.0}),
        ]
        for target in range(3):
            fn = separating_functional(mu, tests, target)
            scores = [fn.evaluate(m) for m in mu]
            assert max(range(3), key=scores.__getitem__) == target

    def test_single_measure_trivial(self, full2):
        fn = separating_functional(
            [orbit_measure(full2, "0")],
            [make_potential(full2, {"0": 1.0, "1": 0.0})],
            0,
        )
        assert fn.margin == math.inf


class TestGenericity:
    def test_empty(self, full2):
        stats = genericity_experiment(full2, 2, 0, 8, seed=0)
        assert stats.records == () and stats.frequency == 0.0

    def test_depth1_always_unique(self, full2):
        stats = genericity_experiment(full2, 1, 30, 8, seed=1)
        assert stats.frequency == 1.0

    def test_reproducible(self, full2):
        s1 = genericity_experiment(full2, 2, 10, 12, seed=0)
        s2 = genericity_experiment(full2, 2, 10, 12, seed=0)
        assert s1.records == s2.records

    def test_depth2_high_frequency(self, full2):
        stats = genericity_experiment(full2, 2, 30, 12, seed=0)
        assert stats.frequency >= 0.9
        for rec in stats.records:
            if rec.unique:
                assert rec.gap > 1e-6
