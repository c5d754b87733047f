import math
from itertools import product

import numpy as np
import pytest

from modheat import constants
from modheat.heat import (BlowupHypothesis, HeatProblem, SolverConfig,
                          ball_indicator, certify_hypothesis,
                          divergence_witness, lambda_index_set,
                          linear_propagate, lower_bound_envelope,
                          lower_bound_sequence, picard_terms, plateau_data,
                          solve, term_index, unit_ball_volume)
from modheat.corpus import propagation_corpus
from modheat.modnorm import ModNormSpec, build_partition, mod_norm_decomp
from modheat.spectral import GridFunction, SpectralGrid, forward_transform


@pytest.fixture(scope="module")
def small_problem(grid1):
    u0 = GridFunction(grid1, 0.01 * np.exp(-grid1.x_axis ** 2 / 2))
    return HeatProblem(2.0, 2, u0)


@pytest.fixture(scope="module")
def certified_hypothesis():
    gamma = 4 * math.e * (1 + 1e-6)
    return BlowupHypothesis(gamma=gamma, r=1.0, beta=2.0, k=2, d=1)


class TestLinearPropagator:
    def test_time_zero_is_identity(self, gauss1):
        out = linear_propagate(gauss1, 0.0, 1.3)
        assert np.max(np.abs(out.values - gauss1.values)) <= 1e-14

    def test_negative_time_rejected(self, gauss1):
        with pytest.raises(ValueError):
            linear_propagate(gauss1, -0.1, 2.0)

    def test_semigroup_property(self, gauss1):
        rng = np.random.default_rng(12)
        for _ in range(20):
            t1, t2 = rng.uniform(0.01, 2.0, size=2)
            beta = rng.choice([0.5, 1.0, 2.0])
            a = linear_propagate(linear_propagate(gauss1, t1, beta), t2, beta)
            b = linear_propagate(gauss1, t1 + t2, beta)
            assert np.max(np.abs(a.values - b.values)) <= 1e-12

    def test_gaussian_closed_form(self, grid1, gauss1):
        t = 0.5
        out = linear_propagate(gauss1, t, 2.0)
        ref = (1 + 2 * t) ** -0.5 * np.exp(-grid1.x_axis ** 2 / (2 * (1 + 2 * t)))
        np.testing.assert_allclose(out.values, ref, atol=1e-8)

    def test_uniform_modulation_bound(self):
        grid = SpectralGrid(1, 2048, 160.0)
        part = build_partition(grid)
        spec = ModNormSpec(2, 1, 0)
        corpus = propagation_corpus(grid, 10, seed=1234)
        base = [mod_norm_decomp(f, spec, part) for f in corpus]
        for t in (0.01, 0.1, 1.0, 10.0):
            for f, b in zip(corpus, base):
                ratio = mod_norm_decomp(linear_propagate(f, t, 2.0), spec,
                                        part) / b
                assert ratio <= constants.PROPAGATOR_UNIFORM_CONST


class TestSolver:
    def test_zero_data_stays_zero(self, grid1, part1):
        z = GridFunction(grid1, np.zeros(grid1.shape))
        tr = solve(HeatProblem(2.0, 2, z), SolverConfig(dt=0.05, t_max=0.5),
                   part1)
        assert max(tr.norms) == 0.0
        assert not tr.blowup_detected

    def test_small_data_bounded_and_resolution_stable(self, small_problem, part1):
        tr = solve(small_problem, SolverConfig(dt=0.002, t_max=1.0), part1)
        assert not tr.blowup_detected
        assert max(tr.norms) <= 2.0 * tr.norms[0]
        tr2 = solve(small_problem, SolverConfig(dt=0.001, t_max=1.0), part1)
        coarse = np.array(tr.norms)
        fine = np.array(tr2.norms[::2])
        assert np.max(np.abs(coarse - fine) / fine) <= 0.01

    def test_etd1_first_order_convergence(self, grid1, part1):
        u0 = GridFunction(grid1, 0.5 * np.exp(-grid1.x_axis ** 2 / 2))
        prob = HeatProblem(2.0, 2, u0)

        def final(dt):
            tr = solve(prob, SolverConfig(dt=dt, t_max=0.25,
                                          snapshot_every=10 ** 9), part1)
            return tr.snapshots[-1][1]

        ref = final(1 / 1024)
        e1 = np.max(np.abs(final(1 / 256) - ref))
        e2 = np.max(np.abs(final(1 / 512) - ref))
        assert e1 / e2 >= 1.8

    def test_etd2_beats_etd1(self, grid1, part1):
        u0 = GridFunction(grid1, 0.5 * np.exp(-grid1.x_axis ** 2 / 2))
        prob = HeatProblem(2.0, 2, u0)

        def final(scheme, dt):
            tr = solve(prob, SolverConfig(dt=dt, t_max=0.25, scheme=scheme,
                                          snapshot_every=10 ** 9), part1)
            return tr.snapshots[-1][1]

        ref = final("ETD2", 1 / 2048)
        e1 = np.max(np.abs(final("ETD1", 1 / 256) - ref))
        e2 = np.max(np.abs(final("ETD2", 1 / 256) - ref))
        assert e2 < e1 / 20

    def test_threshold_must_exceed_initial(self, small_problem, part1):
        cfg = SolverConfig(dt=0.01, t_max=0.1, blowup_threshold=1e-9)
        with pytest.raises(ValueError):
            solve(small_problem, cfg, part1)

    def test_bad_config_rejected(self):
        with pytest.raises(ValueError):
            SolverConfig(dt=0.5, t_max=0.1)
        with pytest.raises(ValueError):
            SolverConfig(dt=0.01, t_max=1.0, scheme="RK4")

    def test_certified_data_blows_up_with_monotone_tail(self, grid1, part1):
        u0 = GridFunction(grid1, 41.0 * np.exp(-2 * np.pi * grid1.x_axis ** 2))
        tr = solve(HeatProblem(2.0, 2, u0),
                   SolverConfig(dt=2e-4, t_max=0.5), part1)
        assert tr.blowup_detected
        assert tr.t_detect < 0.5
        assert tr.norms[-1] > 1e6 * tr.norms[0]
        tail = np.array(tr.norms[len(tr.norms) // 5:])
        assert np.all(np.diff(tail) >= -1e-10 * tail[:-1])

    def test_loose_closed_form_constant_also_blows_up(self, grid1, part1):
        # amplitude above the closed-form sufficient level
        # (4 e r^beta (k-1))^(1/(k-1)) e^(2 pi r^beta) ~ 5823: detection is
        # near-immediate and well before twice the guaranteed horizon
        amp = (4 * math.e) * math.exp(2 * math.pi)
        u0 = GridFunction(grid1, 1.001 * amp
                          * np.exp(-2 * np.pi * grid1.x_axis ** 2))
        hyp = BlowupHypothesis(gamma=11.0, r=1.0, beta=2.0, k=2, d=1)
        assert certify_hypothesis(hyp, u0).all_passed
        tr = solve(HeatProblem(2.0, 2, u0),
                   SolverConfig(dt=1e-5, t_max=0.5), part1)
        assert tr.blowup_detected
        assert tr.t_detect < 0.5
        assert tr.norms[-1] > 1e6 * tr.norms[0]

    def test_sign_flag_changes_dynamics(self, grid1, part1):
        u0 = GridFunction(grid1, 0.5 * np.exp(-grid1.x_axis ** 2 / 2))
        grow = solve(HeatProblem(2.0, 2, u0, source_sign=1),
                     SolverConfig(dt=0.01, t_max=0.2), part1)
        damp = solve(HeatProblem(2.0, 2, u0, source_sign=-1),
                     SolverConfig(dt=0.01, t_max=0.2), part1)
        assert damp.norms[-1] < grow.norms[-1]


class TestHypothesisCertificate:
    def test_volume_condition_at_equality(self, grid1):
        u0 = GridFunction(grid1, 41.0 * np.exp(-2 * np.pi * grid1.x_axis ** 2))
        hyp = BlowupHypothesis(gamma=11.0, r=1.0, beta=2.0, k=2, d=1)
        cert = certify_hypothesis(hyp, u0)
        cond = cert.condition("volume")
        assert cond.value == 2.0 and cond.bound == 2.0 and cond.passed

    def test_gamma_threshold_boundary(self, grid1):
        u0 = GridFunction(grid1, 41.0 * np.exp(-2 * np.pi * grid1.x_axis ** 2))
        ok = BlowupHypothesis(gamma=11.0, r=1.0, beta=2.0, k=2, d=1)
        bad = BlowupHypothesis(gamma=10.0, r=1.0, beta=2.0, k=2, d=1)
        assert 4 * math.e == pytest.approx(10.87312731, abs=1e-7)
        assert certify_hypothesis(ok, u0).condition("gamma_threshold").passed
        assert not certify_hypothesis(bad, u0).condition("gamma_threshold").passed

    def test_remark_gaussian_passes_all(self, grid1):
        u0 = GridFunction(grid1, 41.0 * np.exp(-2 * np.pi * grid1.x_axis ** 2))
        hyp = BlowupHypothesis(gamma=11.0, r=1.0, beta=2.0, k=2, d=1)
        cert = certify_hypothesis(hyp, u0)
        assert cert.all_passed
        assert cert.horizon == pytest.approx(0.25)

    def test_plateau_data_passes_at_marginal_gamma(self, grid1,
                                                   certified_hypothesis):
        h = certified_hypothesis
        u0 = plateau_data(grid1, h.gamma, h.r)
        cert = certify_hypothesis(h, u0)
        assert cert.all_passed

    def test_plateau_transform_is_exact_box(self, grid1, certified_hypothesis):
        h = certified_hypothesis
        u0 = plateau_data(grid1, h.gamma, h.r)
        F = forward_transform(u0)
        ball = ball_indicator(grid1, h.r)
        np.testing.assert_allclose(F.values.real, h.gamma * ball, atol=1e-10)

    def test_failed_conditions_reported_not_raised(self, grid1, gauss1):
        # plain Gaussian fails the plateau bound at gamma = 11 but certifies
        hyp = BlowupHypothesis(gamma=11.0, r=1.0, beta=2.0, k=2, d=1)
        cert = certify_hypothesis(hyp, gauss1)
        assert not cert.condition("plateau_lower_bound").passed
        assert not cert.all_passed

    def test_dimension_mismatch_rejected(self, grid2, gauss1):
        hyp = BlowupHypothesis(gamma=11.0, r=1.0, beta=2.0, k=2, d=2)
        with pytest.raises(ValueError):
            certify_hypothesis(hyp, gauss1)


class TestLambdaIndexSet:
    def test_first_term_forced(self):
        for k in (2, 3, 4):
            assert lambda_index_set(1, k) == {(1,) * k}

    @pytest.mark.parametrize("j,k", [(2, 2), (3, 2), (4, 2), (2, 3), (3, 3),
                                     (2, 4)])
    def test_brute_force_oracle(self, j, k):
        # independent enumeration over all tuples of admissible labels
        allowed = {t * k - (t - 1) for t in range(j)}
        target = j * k - (j - 1)
        oracle = {tup for tup in product(sorted(allowed), repeat=k)
                  if sum(tup) == target}
        assert lambda_index_set(j, k) == oracle

    def test_known_quadratic_patterns(self):
        # the fourth and fifth terms of the quadratic recursion
        assert lambda_index_set(3, 2) == {(1, 3), (3, 1), (2, 2)}
        assert lambda_index_set(4, 2) == {(1, 4), (4, 1), (2, 3), (3, 2)}

    def test_cubic_second_term_multiplicity(self):
        # k = 3: the combination u_1^2 u_3 enters with multiplicity 3
        tuples = lambda_index_set(2, 3)
        assert tuples == {(1, 1, 3), (1, 3, 1), (3, 1, 1)}

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            lambda_index_set(0, 2)
        with pytest.raises(ValueError):
            lambda_index_set(1, 1)


@pytest.fixture(scope="module")
def small_picard(grid1, part1):
    u0 = GridFunction(grid1, 0.01 * np.exp(-grid1.x_axis ** 2 / 2))
    prob = HeatProblem(2.0, 2, u0)
    t_grid = np.linspace(0.0, 0.5, 33)
    return prob, picard_terms(prob, 6, t_grid, part1)


class TestPicardSeries:
    def test_first_term_is_linear_flow(self, small_picard):
        prob, res = small_picard
        t = res.t_grid[17]
        lin = linear_propagate(prob.u0, t, prob.beta)
        assert np.max(np.abs(res.trajectories[0][17] - lin.values)) == 0.0

    def test_ratios_fall_below_one_by_third_term(self, small_picard):
        _, res = small_picard
        assert all(r < 1.0 for r in res.ratios[1:])
        assert res.summable

    def test_partial_sum_matches_solver(self, small_picard, part1):
        prob, res = small_picard
        partial = sum(res.trajectories[i][-1] for i in range(6))
        tr = solve(prob, SolverConfig(dt=1 / 512, t_max=0.5,
                                      snapshot_every=10 ** 9), part1)
        t_end, u_end = tr.snapshots[-1]
        assert t_end == pytest.approx(0.5)
        assert np.max(np.abs(partial - u_end)) <= 1e-4

    def test_fourier_positivity_preserved(self, grid1, part1):
        # nonnegative-transform data: every term keeps a nonnegative,
        # real transform up to roundoff
        u0 = plateau_data(grid1, 0.1, 1.0)
        prob = HeatProblem(2.0, 2, u0)
        res = picard_terms(prob, 6, np.linspace(0.0, 0.25, 17), part1)
        for traj in res.trajectories:
            for vals in traj:
                uhat = forward_transform(GridFunction(grid1, vals)).values
                assert uhat.real.min() >= -1e-10
                assert np.max(np.abs(uhat.imag)) <= 1e-10

    def test_cubic_nonlinearity_runs(self, grid1, part1):
        u0 = GridFunction(grid1, 0.05 * np.exp(-grid1.x_axis ** 2 / 2))
        prob = HeatProblem(2.0, 3, u0)
        res = picard_terms(prob, 3, np.linspace(0.0, 0.3, 17), part1)
        assert res.term_indices == [1, 3, 5]
        assert res.sup_norms[2] < res.sup_norms[1] < res.sup_norms[0]

    def test_depth_validation(self, small_problem):
        with pytest.raises(ValueError):
            picard_terms(small_problem, 0, np.linspace(0, 1, 5))
        with pytest.raises(ValueError):
            picard_terms(small_problem, 2, np.linspace(0.5, 1, 5))


class TestLowerBoundEnvelope:
    def test_first_term_closed_form(self, certified_hypothesis):
        h = certified_hypothesis
        t = 0.2
        for xi in (0.0, 0.5, 0.99):
            want = h.gamma * math.exp(-t * xi ** h.beta)
            assert lower_bound_sequence(h, 1, t, [xi]) == pytest.approx(want)

    def test_outside_support_is_zero(self, certified_hypothesis):
        assert lower_bound_sequence(certified_hypothesis, 1, 0.2, [1.01]) == 0.0

    def test_invalid_series_index_rejected(self):
        h = BlowupHypothesis(gamma=50.0, r=1.0, beta=2.0, k=3, d=1)
        with pytest.raises(ValueError):
            lower_bound_sequence(h, 2, 0.1, [0.0])  # 2 != m(k-1)+1 for k=3

    def test_general_k_exponents(self):
        h = BlowupHypothesis(gamma=50.0, r=1.0, beta=2.0, k=3, d=1)
        # series index 5 corresponds to the m = 2 envelope
        t, xi = 0.3, 0.2
        want = (h.gamma ** 5 * math.exp(-4 * (h.k - 1) * 2 * t) * t ** 2
                * math.exp(-t * xi ** 2))
        assert lower_bound_sequence(h, 5, t, [xi]) == pytest.approx(want)

    def test_picard_terms_dominate_envelope(self, grid1, part1,
                                            certified_hypothesis):
        h = certified_hypothesis
        u0 = plateau_data(grid1, h.gamma, h.r)
        prob = HeatProblem(2.0, 2, u0)
        t_grid = np.linspace(0.0, 0.25, 33)
        res = picard_terms(prob, 6, t_grid, part1)
        ball = grid1.freq_magnitude <= h.r
        slack = constants.PICARD_DOMINATION_SLACK
        for pos, idx in enumerate(res.term_indices):
            for ti in range(1, len(t_grid)):
                uhat = forward_transform(
                    GridFunction(grid1, res.trajectories[pos][ti])).values
                env = lower_bound_envelope(h, idx, t_grid[ti], grid1)
                assert np.all(uhat.real[ball] * slack >= env[ball])


class TestDivergenceWitness:
    def test_marginal_point_ratio_is_one(self):
        h = BlowupHypothesis(gamma=4 * math.e, r=1.0, beta=2.0, k=2, d=1)
        w = divergence_witness(h, 0.25, 12)
        assert abs(w.ratio - 1.0) <= 1e-9
        assert w.divergent

    def test_double_gamma_gives_ratio_two(self):
        h = BlowupHypothesis(gamma=8 * math.e, r=1.0, beta=2.0, k=2, d=1)
        w = divergence_witness(h, 0.25, 12)
        assert w.ratio == pytest.approx(2.0, rel=1e-12)
        assert w.divergent
        assert np.all(np.diff(w.partial_sums) > 0)

    def test_below_threshold_is_inconclusive(self):
        h = BlowupHypothesis(gamma=5.0, r=1.0, beta=2.0, k=2, d=1)
        w = divergence_witness(h, 0.25, 12)
        assert not w.divergent
        assert "no divergence guarantee" in w.label

    def test_cubic_marginal_point(self):
        # general exponent: the same algebra pins ratio = 1 at the threshold
        k = 3
        gamma = (4 * 2 * math.e) ** (1 / (k - 1))
        h = BlowupHypothesis(gamma=gamma, r=1.0, beta=1.0, k=k, d=1)
        w = divergence_witness(h, h.horizon, 8)
        assert abs(w.ratio - 1.0) <= 1e-9

    def test_first_term_is_plateau_mass(self):
        h = BlowupHypothesis(gamma=12.0, r=1.0, beta=2.0, k=2, d=1)
        w = divergence_witness(h, 0.25, 4)
        assert w.terms[0] == pytest.approx(h.gamma * 2.0)  # gamma |B(1)|


class TestConvolutionInequality:
    @pytest.mark.parametrize("dim,n,half,r", [(1, 256, 16.0, 1.0),
                                              (2, 32, 8.0, 1.2)])
    def test_ball_selfconvolution_dominates_ball(self, dim, n, half, r):
        grid = SpectralGrid(dim, n, half)
        assert r ** dim * unit_ball_volume(dim) >= 2 ** dim
        chi = ball_indicator(grid, r)
        flat = chi.reshape(-1)
        pts = grid.freq_mesh.reshape(-1, dim)
        inside = np.nonzero(flat)[0]
        w = grid.freq_spacing ** dim
        for i in inside:
            # direct quadrature of the convolution at lattice point i
            shifted = pts[i] - pts[inside]
            level = np.sqrt(np.sum(shifted ** 2, axis=1))
            conv = w * np.sum(level <= r)
            assert conv >= 1.0
