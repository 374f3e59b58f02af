import math
import random
import warnings

import pytest

import limitdp.corpus as corpus
import limitdp.evaluations as ev
import limitdp.values as values
from limitdp.errors import InvalidEvaluationError, NotUncontrolledError
from limitdp.problems import forced_play


@pytest.fixture
def cycle():
    return corpus.example1_cycle()


class TestPayoff:
    def test_cycle_cesaro(self, cycle):
        play = forced_play(cycle, "z0", 4)  # rewards 1, 0, 1, 0
        val, err = values.payoff(cycle, play, ev.cesaro(2))
        assert val == 0.5 and err == 0.0

    def test_cycle_discounted_geometric_series(self, cycle):
        play = forced_play(cycle, "z0", 40)
        val, err = values.payoff(cycle, play, ev.discounted(0.5), tail_tol=1e-12)
        # lam * sum (1-lam)^{2j} = 1 / (2 - lam)
        assert val == pytest.approx(2.0 / 3.0, abs=1e-11)
        assert err <= 1e-12

    def test_dirac_reads_single_stage(self, cycle):
        play = forced_play(cycle, "z1", 5)  # rewards 0, 1, 0, 1, 0
        for t in (1, 2, 3):
            val, err = values.payoff(cycle, play, ev.dirac(t))
            assert (val, err) == (float(t % 2 == 0), 0.0)

    def test_short_prefix_reports_shortfall(self, cycle):
        play = forced_play(cycle, "z0", 2)
        val, err = values.payoff(cycle, play, ev.cesaro(4))
        assert val == 0.25 and err == pytest.approx(0.5, abs=1e-15)

    def test_renormalized_truncation_shifts_payoff_by_tail_at_most(self, cycle):
        theta = ev.discounted(0.25)
        tol = 1e-3
        play = forced_play(cycle, "z0", 100)
        mat = ev.materialize(theta, tol)
        rewards = [cycle.rewards[z] for z in play.prefix]
        raw_payoff = sum(w * r for w, r in zip(mat.weights, rewards))
        mass = sum(mat.weights)
        renormalized = sum((w / mass) * r for w, r in zip(mat.weights, rewards))
        assert abs(raw_payoff - renormalized) <= tol + 1e-12


class TestValue:
    def test_example1_combs(self, cycle):
        for k in range(1, 20):
            assert values.value(cycle, corpus.odd_comb(k), "z0")[0] == pytest.approx(1, abs=1e-12)
            assert values.value(cycle, corpus.odd_comb(k), "z1")[0] == 0.0
            assert values.value(cycle, corpus.even_comb(k), "z0")[0] == 0.0
            assert values.value(cycle, corpus.even_comb(k), "z1")[0] == pytest.approx(1, abs=1e-12)

    def test_cycle_cesaro_closed_form(self, cycle):
        for n in range(1, 30):
            val, err = values.value(cycle, ev.cesaro(n), "z0")
            assert val == math.ceil(n / 2) / n and err == 0.0

    def test_example2_tree_delayed_cesaro_is_one(self):
        tree = corpus.example2_tree(6, 30)
        for K in (2, 4, 6):
            vf = values.value_function(tree, ev.delay(ev.cesaro(K), K))
            assert vf[(0, 0)] == 1.0
            assert vf[(3, 7)] == 1.0

    def test_example3_line_dirac(self):
        line = corpus.example3_line(12)
        vf = values.value_function(line, ev.dirac(5))
        for z in line.states:
            assert vf[z] == (1.0 if z == -5 else 0.0)


class TestDiscountedFixpoint:
    def test_cycle_closed_form(self, cycle):
        lam = 0.5
        vf = values.value_discounted_fixpoint(cycle, lam, tol=1e-10)
        assert vf["z0"] == pytest.approx(1.0 / (2.0 - lam), abs=1e-9)
        assert vf["z1"] == pytest.approx((1.0 - lam) / (2.0 - lam), abs=1e-9)

    def test_lambda_one_is_myopic(self):
        p = corpus.random_problem(6, 3, seed=3)
        vf = values.value_discounted_fixpoint(p, 1.0)
        for z in p.states:
            assert vf[z] == max(p.rewards[z2] for z2 in p.successors_map[z])

    def test_agrees_with_truncated_value(self, cycle):
        lam = 0.3
        vf = values.value_discounted_fixpoint(cycle, lam, tol=1e-10)
        val, err = values.value(cycle, ev.discounted(lam), "z0", tail_tol=1e-12)
        assert abs(vf["z0"] - val) <= 1e-9

    def test_residual_bound(self):
        for seed in range(5):
            p = corpus.random_problem(7, 3, seed=seed)
            for lam in (0.5, 0.1, 0.01):
                rep = values.fixpoint_residual_check(p, lam, tol=1e-9)
                assert rep.passed, rep

    def test_invalid_lambda(self, cycle):
        with pytest.raises(InvalidEvaluationError):
            values.value_discounted_fixpoint(cycle, 0.0)


class TestDelayedValue:
    def test_cycle(self, cycle):
        val, _ = values.delayed_value(cycle, ev.cesaro(2), 1, "z0")
        assert val == 0.5

    def test_m_zero_is_value(self, cycle):
        theta = ev.cesaro(3)
        assert values.delayed_value(cycle, theta, 0, "z0") == values.value(cycle, theta, "z0")

    def test_line_reaches_reward(self):
        line = corpus.example3_line(12)
        for t in (2, 5, 9):
            val, _ = values.delayed_value(line, ev.dirac(1), t - 1, -t)
            assert val == 1.0

    def test_matches_delayed_evaluation(self):
        for seed in range(10):
            p = corpus.random_problem(6, 3, seed=seed)
            theta = ev.cesaro(4)
            for m in (1, 2, 5):
                direct = values.value(p, ev.delay(theta, m), p.states[0])[0]
                viaset = values.delayed_value(p, theta, m, p.states[0])[0]
                assert direct == viaset


class TestVStar:
    def test_cycle(self, cycle):
        family = [ev.cesaro(2 * k) for k in range(1, 60)]
        assert values.v_star_finite(cycle, "z0", family) == 0.5
        assert values.v_star_finite(cycle, "z1", family) == 0.5

    def test_line_interior_goes_to_zero(self):
        line = corpus.example3_line(40)
        family = [ev.cesaro(k) for k in (2, 4, 8, 16, 32, 64, 128)]
        report = values.v_star_report(line, family)
        # interior states far from the right cap: the closure still contains 0
        # only for z <= 0; the best cesaro value decays like 1/k
        for z in range(-10, 11):
            assert report.values[z] <= 1.0 / 128 + 1e-12

    def test_impatient_family_warns(self, cycle):
        with pytest.warns(UserWarning):
            values.v_star_finite(cycle, "z0", [ev.cesaro(2), ev.cesaro(4)])

    def test_rejects_increasing_tv(self, cycle):
        with pytest.raises(InvalidEvaluationError):
            values.v_star_finite(cycle, "z0", [ev.cesaro(100), ev.cesaro(2)])

    def test_monotone_in_family_extension(self):
        p = corpus.random_problem(8, 3, seed=7)
        family = [ev.cesaro(2 ** j) for j in range(1, 9)]
        z = p.states[0]
        prev = None
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # short prefixes are impatient
            for size in range(4, len(family) + 1):
                cur = values.v_star_finite(p, z, family[:size])
                if prev is not None:
                    assert cur <= prev + 1e-12
                prev = cur


class TestLemma1AndBellman:
    def test_cycle_cesaro_bound(self, cycle):
        for n in (1, 2, 5, 10):
            rep = values.lemma1_check(cycle, ev.cesaro(n))
            assert rep.passed
            assert rep.details["bound"] == pytest.approx(2.0 / n, abs=1e-15)

    def test_dirac1_trivial(self, cycle):
        rep = values.lemma1_check(cycle, ev.dirac(1))
        assert rep.details["bound"] == 2.0 and rep.passed

    def test_random_sweep(self):
        rng = random.Random(0)
        for seed in range(20):
            p = corpus.random_problem(3 + seed % 8, 3, seed)
            thetas = [ev.cesaro(rng.randint(1, 20)), ev.dirac(rng.randint(1, 6)),
                      corpus.random_explicit_evaluation(8, rng)]
            for theta in thetas:
                assert values.lemma1_check(p, theta).passed

    def test_bellman_consistency(self):
        for seed in range(10):
            p = corpus.random_problem(6, 3, seed=seed)
            for theta in (ev.cesaro(5), ev.discounted(0.2),
                          ev.from_weights((0.5, 0.25, 0.25)), ev.delay(ev.cesaro(2), 3)):
                rep = values.bellman_consistency_check(p, theta)
                assert rep.passed, (seed, theta, rep)

    def test_bellman_rejects_dirac1(self, cycle):
        with pytest.raises(InvalidEvaluationError):
            values.bellman_consistency_check(cycle, ev.dirac(1))


class TestSandwich:
    def test_cycle_all_near_half(self, cycle):
        family = [ev.cesaro(2 * k) for k in range(1, 21)]
        rep = values.sandwich_check(cycle, "z0", family, m0=2)
        assert rep.holds
        for q in (rep.lower, rep.liminf_half, rep.limsup_half, rep.upper):
            assert q == pytest.approx(0.5, abs=1e-12)

    def test_constant_family_all_equal(self, cycle):
        family = [ev.cesaro(8)] * 6
        rep = values.sandwich_check(cycle, "z0", family, m0=1)
        assert rep.holds
        assert rep.lower == rep.upper == rep.liminf_half == rep.limsup_half

    def test_tree_upper_stays_one(self):
        # horizons within the branching cap: some reachable node is about to
        # deliver k straight rewards, so the upper (inf-sup) term stays 1
        # while the root value sequence caps at 1/2
        tree = corpus.example2_tree(6, 24)
        family = [ev.cesaro(k) for k in (2, 3, 4, 5, 6)]
        rep = values.sandwich_check(tree, (0, 0), family, m0=2)
        assert rep.holds
        assert rep.upper == 1.0
        assert rep.limsup_half <= 0.5 + 1e-12


class TestUncontrolledBound:
    def test_two_cycle_cesaro(self, cycle):
        rep = values.uncontrolled_bound_check(cycle, ev.cesaro(100), 2, "z0")
        assert rep.epsilon == pytest.approx(0.0, abs=1e-12)
        assert rep.gap <= 2 * 0.01 + 1e-9
        assert rep.holds

    def test_p_cycle_discounted(self):
        for period in range(2, 7):
            pattern = [1.0 if i == 0 else 0.0 for i in range(period)]
            p = corpus.uncontrolled_cycle(period, pattern)
            for lam in (0.1, 0.01):
                rep = values.uncontrolled_bound_check(p, ev.discounted(lam), period,
                                                      p.states[0])
                assert rep.holds, (period, lam, rep)

    def test_constant_rewards_zero_gap(self):
        p = corpus.uncontrolled_cycle(3, (0.5, 0.5, 0.5))
        for theta in (ev.cesaro(7), ev.dirac(4), ev.discounted(0.3)):
            rep = values.uncontrolled_bound_check(p, theta, 3, "c0")
            assert rep.gap <= 1e-9

    def test_rejects_controlled(self, cycle):
        p = corpus.random_problem(5, 3, seed=1)
        with pytest.raises(NotUncontrolledError):
            values.uncontrolled_bound_check(p, ev.cesaro(4), 2, p.states[0])


class TestConvergenceSweep:
    def test_cycle_cesaro_converges(self, cycle):
        family = [(k, ev.cesaro(k)) for k in range(2, 120)]
        res = values.convergence_sweep(cycle, {"cesaro": family}, ["z0", "z1"])
        summary = res.summaries["cesaro"]
        assert summary["final_dist_to_vstar"] <= 1.0 / 119 + 1e-12
        assert not summary["oscillating"]

    def test_alternating_combs_oscillate(self, cycle):
        family = [(k, corpus.alternating_comb(k)) for k in range(1, 30)]
        res = values.convergence_sweep(cycle, {"nu": family}, ["z0", "z1"])
        summary = res.summaries["nu"]
        assert summary["oscillating"]
        assert summary["sup_weight_trajectory"][-1] == pytest.approx(1 / 29, abs=1e-12)
        # the comb's total variation does not vanish: one 1/k jump per tooth edge
        assert summary["tv_trajectory"][-1] == pytest.approx(2.0, abs=1e-12)

    def test_tree_nonuniform_convergence(self):
        tree = corpus.example2_tree(6, 24)
        family = [(k, ev.cesaro(k)) for k in (2, 4, 6, 8, 10, 12)]
        with pytest.warns(UserWarning, match="impatient"):
            res = values.convergence_sweep(tree, {"cesaro": family}, list(tree.states),
                                           vstar_family=[ev.delay(ev.cesaro(k), k)
                                                         for k in (2, 4, 8, 16, 32, 64, 128)])
        by_k = {}
        for row in res.rows:
            by_k.setdefault(row["k"], []).append(row["value"])
        for k, vals in by_k.items():
            if k <= 6:
                # some branch holds k consecutive ones, so the sup over nodes is 1
                assert max(vals) == 1.0
            else:
                # beyond the branching cap the longest run of ones is 6
                assert 0.5 <= max(vals) < 1.0
        root_vals = [row["value"] for row in res.rows if row["state"] == (0, 0)]
        assert root_vals[-1] == 0.5

    def test_row_order_deterministic(self, cycle):
        family = [(k, ev.cesaro(k)) for k in (2, 3)]
        res = values.convergence_sweep(cycle, {"f": family}, ["z0", "z1"])
        keys = [(r["family"], r["k"], r["state"]) for r in res.rows]
        assert keys == [("f", 2, "z0"), ("f", 2, "z1"), ("f", 3, "z0"), ("f", 3, "z1")]
