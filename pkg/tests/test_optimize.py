import math
import random
from fractions import Fraction

import pytest

from ergopt.errors import (
    InadmissibleCycleError,
    ResolutionTooCoarseError,
    ValidationError,
)
from ergopt.optimize import (
    aubry_set,
    brute_force,
    deficiency,
    mane_table,
    max_mean,
    orbit_additivity_check,
    orbit_measure,
    subaction,
)
from ergopt.potential import (
    affine_combine,
    constant_potential,
    make_potential,
    random_potential,
)
from ergopt.sft import (
    admissible_words,
    format_word,
    periodic_point,
    point,
    word_graph,
)


def depth1_example(full2):
    return make_potential(full2, {"0": 0, "1": -1})


def depth2_cycle_example(full2):
    return make_potential(full2, {"00": 0, "01": 1, "10": 1, "11": 0})


class TestMaxMean:
    def test_fixed_point_winner(self, full2):
        a = make_potential(full2, {"0": 0, "1": 1})
        r = max_mean(a)
        assert r.m0 == 1 and r.cycle_words == ((1,),)

    def test_two_cycle_winner(self, full2):
        r = max_mean(depth2_cycle_example(full2))
        assert r.m0 == 1 and r.cycle_words == ((0, 1),)

    def test_matches_brute_force_on_random(self, golden, rng):
        for _ in range(10):
            a = random_potential(golden, 2, rng)
            r = max_mean(a)
            bf = brute_force(a, 12)
            assert float(r.m0) == pytest.approx(float(bf.m0), abs=1e-10)
            assert set(r.cycle_words) == set(bf.cycles)

    def test_exact_rational(self, golden):
        a = make_potential(
            golden, {"0": Fraction(1, 3), "1": Fraction(2, 7)}
        )
        r = max_mean(a)
        bf = brute_force(a, 12)
        assert isinstance(r.m0, Fraction) and r.m0 == bf.m0

    def test_translation_and_scaling(self, full3, rng):
        a = random_potential(full3, 2, rng)
        r = max_mean(a)
        r_shift = max_mean(affine_combine(a, 1.0, 2.5))
        assert float(r_shift.m0) == pytest.approx(float(r.m0) + 2.5)
        assert r_shift.cycle_words == r.cycle_words
        r_scale = max_mean(affine_combine(a, 3.0, 0.0))
        assert float(r_scale.m0) == pytest.approx(3.0 * float(r.m0))
        assert r_scale.cycle_words == r.cycle_words

    def test_reducible_spec(self, reducible):
        a = make_potential(reducible, {"0": 2, "1": 5})
        r = max_mean(a)
        assert r.m0 == 5 and r.cycle_words == ((1,),)

    def test_constant_budget_fallback(self, full2):
        a = constant_potential(full2, 1.0, depth=3)
        r = max_mean(a, cycle_budget=3)
        assert not r.complete
        assert r.cycle_words == (((0,)),)
        assert float(r.m0) == pytest.approx(1.0)


class TestBruteForce:
    def test_constant(self, full2):
        bf = brute_force(constant_potential(full2, 2.0), 4)
        assert bf.m0 == pytest.approx(2.0)
        # every admissible necklace up to period 4 maximizes
        assert bf.gap is None
        assert (0, 1, 1) in bf.cycles

    def test_depth1_example(self, full2):
        bf = brute_force(depth1_example(full2), 3)
        assert bf.m0 == 0 and bf.cycles == ((0,),)

    def test_depth2_example(self, full2):
        bf = brute_force(depth2_cycle_example(full2), 3)
        assert bf.m0 == 1 and bf.cycles == ((0, 1),)

    def test_budget(self, full3):
        from ergopt.errors import BudgetExceededError

        with pytest.raises(BudgetExceededError):
            brute_force(constant_potential(full3, 0.0), 12, budget=100)

    def test_golden_mean_has_no_11(self, golden):
        bf = brute_force(constant_potential(golden, 0.0), 5)
        assert all(golden.is_admissible_cycle(c) for c in bf.cycles)
        assert (1,) not in bf.cycles


class TestSubaction:
    def test_constant_potential(self, golden):
        a = constant_potential(golden, 1.5)
        v = subaction(a, max_mean(a))
        assert set(v.values.values()) == {0}

    def test_depth1_example(self, full2):
        a = depth1_example(full2)
        v = subaction(a, max_mean(a))
        assert v.values[(0,)] == 0 and v.values[(1,)] == 0

    def test_translation_invariance(self, golden, rng):
        a = random_potential(golden, 2, rng)
        v1 = subaction(a, max_mean(a))
        shifted = affine_combine(a, 1.0, 4.0)
        v2 = subaction(shifted, max_mean(shifted))
        for w in v1.values:
            assert float(v2.values[w]) == pytest.approx(float(v1.values[w]))

    def test_calibration_and_subsolution(self, full3, rng):
        for _ in range(5):
            a = random_potential(full3, 2, rng)
            r = max_mean(a)
            v = subaction(a, r)
            g = word_graph(a.spec, v.depth)
            m0 = float(r.m0)
            for vi, vertex in enumerate(g.vertices):
                residuals = []
                for ui in g.in_edges[vi]:
                    w = g.edge_word(ui, vi)
                    b = (
                        float(a.value(w))
                        - m0
                        + float(v.values[g.vertices[ui]])
                        - float(v.values[vertex])
                    )
                    residuals.append(b)
                    assert b <= 1e-9  # subsolution edgewise
                assert max(residuals) == pytest.approx(0.0, abs=1e-9)  # calibrated
            assert max(float(x) for x in v.values.values()) == pytest.approx(0.0)

    def test_reducible_still_subsolution(self, reducible):
        a = make_potential(reducible, {"0": 2, "1": 5})
        r = max_mean(a)
        v = subaction(a, r)
        m0 = 5
        g = word_graph(reducible, 1)
        for u, vtx in g.edges:
            w = g.edge_word(u, vtx)
            b = a.value(w) - m0 + v.values[g.vertices[u]] - v.values[g.vertices[vtx]]
            assert b <= 1e-9


class TestDeficiency:
    def test_constant(self, golden):
        a = constant_potential(golden, 0.25)
        d = deficiency(a, subaction(a, max_mean(a)))
        assert all(abs(x) <= 1e-12 for x in d.values.values())
        g = word_graph(golden, 1)
        assert len(d.mather_edges) == len(g.edges)

    def test_depth1_example(self, full2):
        a = depth1_example(full2)
        d = deficiency(a, subaction(a, max_mean(a)))
        assert d.values[(0, 0)] == 0 and d.values[(0, 1)] == 0
        assert d.values[(1, 0)] == -1 and d.values[(1, 1)] == -1
        assert set(d.mather_edges) == {((0,), (0,)), ((0,), (1,))}
        assert set(d.recurrent_edges) == {((0,), (0,))}

    def test_depth2_example(self, full2):
        a = depth2_cycle_example(full2)
        d = deficiency(a, subaction(a, max_mean(a)))
        assert d.values[(0, 1)] == 0 and d.values[(1, 0)] == 0
        assert d.values[(0, 0)] == -1 and d.values[(1, 1)] == -1
        assert set(d.recurrent_edges) == {((0, 1), (1, 0)), ((1, 0), (0, 1))}

    def test_coboundary_integrals(self, golden, rng):
        # integral of B against any periodic measure equals integral of
        # A - m0; zero exactly on maximizing cycles
        for _ in range(5):
            a = random_potential(golden, 2, rng)
            r = max_mean(a)
            d = deficiency(a, subaction(a, r))
            bf = brute_force(a, 8)
            b_pot = make_potential(
                golden, {format_word(w): v for w, v in d.values.items()},
                a.metric,
            )
            for cyc in brute_force(constant_potential(golden, 0.0), 6).cycles:
                nu = orbit_measure(golden, cyc)
                lhs = float(nu.integrate(b_pot))
                rhs = float(nu.integrate(a)) - float(r.m0)
                assert lhs == pytest.approx(rhs, abs=1e-10)
                if cyc in bf.cycles:
                    assert lhs == pytest.approx(0.0, abs=1e-10)
                else:
                    assert lhs < 0

    def test_recurrent_mather_measures_maximize(self, full3, rng):
        # any cycle inside the recurrent mather subgraph attains m0
        import networkx as nx

        for _ in range(5):
            a = random_potential(full3, 2, rng)
            r = max_mean(a)
            d = deficiency(a, subaction(a, r))
            g = word_graph(a.spec, a.depth)
            sub = nx.DiGraph(
                (g.index[u], g.index[v]) for u, v in d.recurrent_edges
            )
            for cyc in nx.simple_cycles(sub):
                mean = sum(
                    float(a.value(g.vertices[u])) for u in cyc
                ) / len(cyc)
                assert mean == pytest.approx(float(r.m0), abs=1e-9)


class TestManeTable:
    def test_depth1_example(self, full2):
        a = depth1_example(full2)
        t = mane_table(a, max_mean(a))
        assert t.entry("0", "0") == 0
        assert t.entry("0", "1") == 0
        assert t.entry("1", "0") == -1
        assert t.entry("1", "1") == -1

    def test_constant_zero_table(self, golden):
        a = constant_potential(golden, 0.7)
        t = mane_table(a, max_mean(a))
        for i in range(2):
            for j in range(2):
                assert t.table[i][j] == 0

    def test_self_action_nonpositive_and_triangle(self, golden, rng):
        for _ in range(5):
            a = random_potential(golden, 2, rng)
            t = mane_table(a, max_mean(a))
            n = len(t.words)
            for i in range(n):
                assert t.table[i][i] <= 1e-9
                for j in range(n):
                    for k in range(n):
                        sij, sjk, sik = t.table[i][j], t.table[j][k], t.table[i][k]
                        if None in (sij, sjk, sik):
                            continue
                        assert sij + sjk <= sik + 1e-9

    def test_bounded_by_subaction_differences(self, full2, rng):
        a = random_potential(full2, 2, rng)
        r = max_mean(a)
        v = subaction(a, r)
        t = mane_table(a, r)
        for i, u in enumerate(t.words):
            for j, w in enumerate(t.words):
                if t.table[i][j] is None:
                    continue
                assert t.table[i][j] <= float(v.value(w)) - float(v.value(u)) + 1e-9

    def test_unreachable_marker_on_reducible(self, reducible):
        a = make_potential(reducible, {"0": 0, "1": 0})
        t = mane_table(a, max_mean(a))
        idx = t.index
        assert t.entry("0", "1") is None
        assert t.entry("0", "0") == 0

    def test_bound_q_dominates(self, full3, rng):
        a = random_potential(full3, 2, rng)
        t = mane_table(a, max_mean(a))
        for row in t.table:
            for x in row:
                if x is not None:
                    assert x <= t.bound_q


class TestAubrySet:
    def test_depth1_example(self, full2):
        a = depth1_example(full2)
        s = aubry_set(mane_table(a, max_mean(a)))
        assert s.words == frozenset({(0,)})
        assert "0" in s and "1" not in s

    def test_constant_all_vertices(self, golden):
        a = constant_potential(golden, 0.0, depth=2)
        s = aubry_set(mane_table(a, max_mean(a)))
        assert s.words == set(admissible_words(golden, 2))

    def test_depth2_example(self, full2):
        a = depth2_cycle_example(full2)
        s = aubry_set(mane_table(a, max_mean(a)))
        assert s.words == frozenset({(0, 1), (1, 0)})

    def test_contains_critical_vertices(self, full3, rng):
        for _ in range(5):
            a = random_potential(full3, 2, rng)
            r = max_mean(a)
            s = aubry_set(mane_table(a, r))
            for cyc in r.critical_cycles:
                for w in cyc:
                    assert w in s.words


class TestOrbitMeasure:
    def test_fixed_point(self, full2):
        mu = orbit_measure(full2, "0")
        assert mu.mass("0") == 1 and mu.mass("1") == 0
        assert mu.mass("0000") == 1

    def test_two_cycle(self, full2):
        mu = orbit_measure(full2, "01")
        assert mu.mass("0") == Fraction(1, 2)
        assert mu.mass("01") == Fraction(1, 2)
        assert mu.mass("10") == Fraction(1, 2)
        assert mu.mass("00") == 0 and mu.mass("11") == 0

    def test_three_cycle(self, full2):
        mu = orbit_measure(full2, "001")
        assert mu.mass("00") == Fraction(1, 3)
        assert mu.mass("01") == Fraction(1, 3)
        assert mu.mass("10") == Fraction(1, 3)
        assert mu.mass("11") == 0

    def test_inadmissible_cycle(self, golden):
        with pytest.raises(InadmissibleCycleError):
            orbit_measure(golden, "11")

    def test_shift_invariance(self, full2, rng):
        from ergopt.sft import random_cycle

        for _ in range(10):
            mu = orbit_measure(full2, random_cycle(full2, rng, 4))
            for j in (1, 2, 3):
                for w in admissible_words(full2, j):
                    right = sum(mu.mass(w + (b,)) for b in (0, 1))
                    left = sum(mu.mass((b,) + w) for b in (0, 1))
                    assert right == mu.mass(w) == left

    def test_mass_sums_to_one_per_depth(self, golden):
        mu = orbit_measure(golden, "001")
        for j in (1, 2, 3, 4):
            total = sum(mu.mass(w) for w in admissible_words(golden, j))
            assert total == 1


class TestOrbitAdditivity:
    def test_fixed_point_self_consistency(self, full2):
        a = depth1_example(full2)
        rep = orbit_additivity_check(a, periodic_point("0"), 1)
        assert rep.table_self == 0
        assert rep.segment_consistent and rep.additivity_consistent

    def test_two_cycle(self, full2):
        a = depth2_cycle_example(full2)
        rep = orbit_additivity_check(a, periodic_point("01"), 1)
        assert rep.direct_sum == pytest.approx(0.0)
        assert rep.table_value == pytest.approx(0.0)
        assert rep.additivity_rhs == pytest.approx(rep.table_self)

    def test_preperiodic_prefix_sum(self, full2):
        a = depth1_example(full2)
        rep = orbit_additivity_check(a, point("1", "0"), 1)
        assert rep.direct_sum == pytest.approx(-1.0)
        assert rep.table_value == pytest.approx(-1.0)

    def test_n_bounded_by_period(self, full2):
        a = depth1_example(full2)
        with pytest.raises(ValidationError):
            orbit_additivity_check(a, periodic_point("01"), 3)

    def test_resolution_too_coarse(self, full2):
        a = depth1_example(full2)
        # 0110* and its shifts collide at depth 1
        with pytest.raises(ResolutionTooCoarseError):
            orbit_additivity_check(a, periodic_point("0011"), 4)

    def test_deeper_table_separates_and_tightens(self, full2):
        from ergopt.potential import holder_constant

        a = depth1_example(full2)
        rep = orbit_additivity_check(a, periodic_point("0011"), 3, table_depth=4)
        assert rep.resolution_bound < holder_constant(a) + 1e-9
        assert rep.direct_sum == pytest.approx(-1.0)
        assert rep.segment_consistent and rep.additivity_consistent

    def test_full_period_degenerates_off_the_aubry_set(self, full2):
        # at N = period the identity forces S(x, x) = 0, which holds only
        # for maximizing orbits; elsewhere the report flags inconsistency
        a = depth1_example(full2)
        rep = orbit_additivity_check(a, periodic_point("0011"), 4, table_depth=4)
        assert not rep.additivity_consistent
        ok = orbit_additivity_check(a, periodic_point("0"), 1)
        assert ok.additivity_consistent


def test_measure_integrate_matches_birkhoff(full2, rng):
    a = random_potential(full2, 2, rng)
    mu = orbit_measure(full2, "011")
    x = periodic_point("011")
    direct = sum(a.eval(x.shift(j)) for j in range(3)) / 3
    assert float(mu.integrate(a)) == pytest.approx(direct)
