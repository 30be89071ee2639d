"""Monte Carlo harness: record arithmetic, per-experiment contracts, seeds
and determinism.  Dimensions are kept small; the full-scale runs live in
test_acceptance.py."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectrallab.bfactors import BFactorSpec, build_b
from spectrallab.distributions import EntryDistribution, sample_matrix
from spectrallab.experiments import (
    CSV_HEADER,
    ConfigError,
    ExperimentConfig,
    TrialRecord,
    b_seed,
    fit_constant,
    nearest_rank,
    records_from_csv,
    records_to_csv,
    run_experiment,
    run_log_bound,
    run_main_bound,
    run_rudelson_audit,
    run_sharpness,
    run_small_columns,
    run_smin,
    run_sparse_norm,
    run_variance_audit,
    sign_moment,
    small_column_threshold,
    trial_seed,
)
from spectrallab.seeding import STREAM_A, derive_seed
from spectrallab.spectral import smallest_singular_value, spectral_norm

GAUSS = EntryDistribution("gaussian", {}, "unit_variance")
RAD = EntryDistribution("rademacher")
RAD45 = EntryDistribution("rademacher", {}, "unit_moment:4.5")
PARETO = EntryDistribution("symmetric_pareto", {"alpha": 3.5}, "unit_variance")
IDENTITY = BFactorSpec("identity", 1, 1)
ZERO = BFactorSpec("zero", 1, 1)


def cfg(experiment, dims, dist=RAD45, b=IDENTITY, trials=3, seed=1, **params):
    return ExperimentConfig(experiment, dims, dist, b, trials, seed, params)


def rebuild_w(c, m, n, N, t):
    """Recompute trial t's product outside the harness."""
    s = trial_seed(c.base_seed, t, m, n, N)
    b = build_b(c.b_factor.resized(m, N), b_seed(c.base_seed, m, N))
    return b @ sample_matrix(c.distribution, N, n, derive_seed(s, STREAM_A))


class TestFitConstant:
    def test_single(self):
        r = TrialRecord.make("x", 1, 1, 1, 0, 0, 2.5, 1.0)
        assert fit_constant([r]) == 2.5

    def _records(self, ratios):
        return [TrialRecord.make("x", 1, 1, 1, i, 0, v, 1.0) for i, v in enumerate(ratios)]

    def test_max(self):
        assert fit_constant(self._records([1, 2, 3]), 1.0) == 3

    def test_nearest_rank_median(self):
        assert fit_constant(self._records([3, 1, 2]), 0.5) == 2

    def test_empty(self):
        with pytest.raises(ValueError, match="empty"):
            fit_constant([])

    @pytest.mark.parametrize("q", [0.0, 1.5])
    def test_bad_quantile(self, q):
        with pytest.raises(ValueError):
            nearest_rank([1.0], q)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(0, 1e6), min_size=1, max_size=50), st.floats(0.001, 1.0))
    def test_dominates_lower_quantiles(self, ratios, q):
        assert nearest_rank(ratios, 1.0) >= nearest_rank(ratios, q)
        assert nearest_rank(ratios, q) in ratios


class TestRecords:
    def test_ratio_exact(self):
        r = TrialRecord.make("x", 1, 2, 3, 0, 5, 0.1, 0.3)
        assert r.ratio == 0.1 / 0.3

    def test_normalizer_positive(self):
        with pytest.raises(ValueError, match="positive"):
            TrialRecord.make("x", 1, 1, 1, 0, 0, 1.0, 0.0)

    def test_csv_round_trip(self):
        recs = [TrialRecord.make("e", 2, 3, 4, i, 2**64 - 1 - i, math.pi * i, math.e) for i in range(4)]
        text = records_to_csv(recs)
        assert text.splitlines()[0] == ",".join(CSV_HEADER)
        assert records_from_csv(text) == recs

    def test_bad_header(self):
        with pytest.raises(ValueError, match="header"):
            records_from_csv("a,b\n")


class TestConfig:
    def test_round_trip(self):
        c = cfg("main_bound", [(3, 4, 5)], eps=0.5)
        assert ExperimentConfig.from_dict(c.to_dict()).to_dict() == c.to_dict()

    @pytest.mark.parametrize(
        "mutate",
        [lambda d: d.update(trials=0), lambda d: d.update(dims=[[1, 0, 2]]), lambda d: d.update(dims=[]),
         lambda d: d.pop("base_seed"), lambda d: d.update(extra=1), lambda d: d.update(distribution={"kind": "x"})],
    )
    def test_invalid(self, mutate):
        d = cfg("main_bound", [(3, 4, 5)]).to_dict()
        mutate(d)
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(d)

    def test_unknown_experiment(self):
        with pytest.raises(ConfigError, match="unknown experiment"):
            run_experiment(cfg("bai_yin", [(2, 2, 2)]))


class TestMainAndLog:
    def test_zero_b(self):
        rep = run_main_bound(cfg("main_bound", [(20, 20, 40)], b=ZERO))
        assert all(r.measured == 0 and r.ratio == 0 for r in rep.records)

    def test_gaussian_near_one(self):
        rep = run_main_bound(cfg("main_bound", [(400, 400, 400)], dist=GAUSS, trials=5))
        assert 0.9 <= rep.summary["mean_ratio"] <= 1.1

    def test_heavy_tail_rejected(self):
        with pytest.raises(ConfigError, match="sharpness"):
            run_main_bound(cfg("main_bound", [(5, 5, 5)], dist=PARETO))

    def test_strong_normalizer_reported(self):
        proj = BFactorSpec("orthogonal_projection", 1, 1, {"rank": 10})
        rep = run_main_bound(cfg("main_bound", [(30, 30, 120)], b=proj))
        info = rep.summary["by_dims"]["30x30x120"]
        assert info["b_norm"] == pytest.approx(1.0, abs=1e-9)
        assert info["b_hs"] == pytest.approx(math.sqrt(10))
        assert info["large_columns"] <= info["large_columns_bound"]

    def test_ratios_match_records(self):
        rep = run_main_bound(cfg("main_bound", [(10, 12, 30)]))
        for r in rep.records:
            assert r.normalizer == math.sqrt(12) + math.sqrt(10)
            assert r.ratio == r.measured / r.normalizer

    def test_measured_is_norm_of_product(self):
        c = cfg("main_bound", [(8, 6, 20)], b=BFactorSpec("orthogonal_projection", 1, 1))
        rep = run_main_bound(c)
        for r in rep.records:
            assert r.measured == pytest.approx(spectral_norm(rebuild_w(c, 8, 6, 20, r.trial)).value, rel=1e-8)

    def test_log_bound_zero(self):
        rep = run_log_bound(cfg("log_bound", [(20, 20, 20)], dist=RAD, b=ZERO))
        assert fit_constant(rep.records) == 0.0

    def test_log_bound_fourth_moment_required(self):
        with pytest.raises(ConfigError, match="fourth"):
            run_log_bound(cfg("log_bound", [(5, 5, 5)], dist=GAUSS))

    def test_same_seeds_same_measurements(self):
        dims = [(30, 30, 30), (50, 50, 60)]
        main = run_main_bound(cfg("main_bound", dims, dist=RAD, seed=7))
        log = run_log_bound(cfg("log_bound", dims, dist=RAD, seed=7))
        for a, b in zip(main.records, log.records):
            assert a.measured == b.measured
            assert b.ratio * b.normalizer == pytest.approx(a.ratio * a.normalizer, rel=1e-15)
            assert b.normalizer == math.sqrt(b.n * math.log(2 * b.n))

    def test_log_bound_stable_across_n(self):
        rep = run_log_bound(cfg("log_bound", [(100, 100, 100), (200, 200, 200), (500, 500, 500)], dist=RAD, trials=3))
        fits = [fit_constant([r for r in rep.records if r.n == n]) for n in (100, 200, 500)]
        assert max(fits) / min(fits) <= 1.5


class TestSmallColumns:
    DIAG = BFactorSpec("diagonal_column_norms", 1, 1)

    def test_zero_columns(self):
        c = cfg("small_columns", [(10, 10, 50)], dist=RAD, b=BFactorSpec("diagonal_column_norms", 1, 1, {"value": 0.0}))
        assert all(r.ratio == 0 for r in run_small_columns(c).records)

    def test_offending_column_named(self):
        norms = [0.01] * 50
        norms[17] = 0.9
        c = cfg("small_columns", [(10, 10, 50)], dist=RAD,
                b=BFactorSpec("diagonal_column_norms", 1, 1, {"norms": norms}))
        with pytest.raises(ConfigError, match="column 17"):
            run_small_columns(c)

    def test_threshold_default(self):
        c = cfg("small_columns", [(30, 30, 300)], dist=RAD, b=self.DIAG, eps=0.5, M=1.0)
        rep = run_small_columns(c)
        assert rep.records[0].normalizer == math.sqrt(30)
        assert small_column_threshold(30, 0.5, 1.0) == pytest.approx(math.log(60) ** -2.5)

    def test_doubling_m_monotone(self):
        one = run_small_columns(cfg("small_columns", [(30, 30, 300)], dist=RAD, b=self.DIAG, M=1.0))
        two = run_small_columns(cfg("small_columns", [(30, 30, 300)], dist=RAD, b=self.DIAG, M=2.0))
        for a, b in zip(one.records, two.records):
            assert b.measured >= a.measured

    def test_wrong_factor(self):
        with pytest.raises(ConfigError, match="diagonal_column_norms"):
            run_small_columns(cfg("small_columns", [(5, 5, 5)], dist=RAD))


class TestSparse:
    def test_dense_limit(self):
        c = cfg("sparse_norm", [(50, 50, 50)], dist=EntryDistribution("sparse_sign", {"p": 1.0}))
        rep = run_sparse_norm(c)
        assert math.isfinite(rep.fitted_constant) and rep.fitted_constant > 0

    def test_norm_dominates_columns(self):
        c = cfg("sparse_norm", [(80, 80, 80)], dist=EntryDistribution("sparse_sign", {"p": 0.05}), trials=4)
        rep = run_sparse_norm(c)
        for r in rep.records:
            w = rebuild_w(c, 80, 80, 80, r.trial)
            assert r.measured >= np.linalg.norm(w, axis=0).max() * (1 - 1e-12)

    def test_grid_tags_and_uniformity(self):
        c = cfg("sparse_norm", [(60, 60, 60)], dist=EntryDistribution("sparse_sign", {"p": 0.1}),
                p_grid=[0.05, 0.5], uniformity_limit=1e9)
        rep = run_sparse_norm(c)
        assert {r.experiment for r in rep.records} == {"sparse_norm[p=0.05]", "sparse_norm[p=0.5]"}
        fits = rep.summary["fitted_by_p"]
        assert rep.summary["uniformity_factor"] == pytest.approx(max(fits.values()) / min(fits.values()))

    def test_p_out_of_range(self):
        c = cfg("sparse_norm", [(5, 5, 5)], dist=EntryDistribution("sparse_sign", {"p": 0.1}), p_grid=[0.0])
        with pytest.raises(ConfigError, match="outside"):
            run_sparse_norm(c)

    def test_needs_sparse_sign(self):
        with pytest.raises(ConfigError):
            run_sparse_norm(cfg("sparse_norm", [(5, 5, 5)]))


class TestSmin:
    def test_orthogonal_columns(self):
        q, _ = np.linalg.qr(np.random.default_rng(1).standard_normal((30, 12)))
        assert smallest_singular_value(q) == pytest.approx(1.0, abs=1e-12)

    def test_m_less_than_n(self):
        with pytest.raises(ConfigError, match="m >= n"):
            run_smin(cfg("smin", [(5, 10, 1)], dist=GAUSS))

    def test_unit_variance_required(self):
        with pytest.raises(ConfigError, match="unit-variance"):
            run_smin(cfg("smin", [(10, 5, 1)], dist=EntryDistribution("gaussian", {}, "unit_moment:4")))

    def test_square_median_bracket(self):
        rep = run_smin(cfg("smin", [(200, 200, 1)], dist=GAUSS, trials=15))
        med = rep.summary["quantiles"]["0.5"]
        assert 0.05 <= med <= 5
        assert rep.records[0].normalizer == math.sqrt(200) - math.sqrt(199)

    def test_quantile_curve_monotone(self):
        rep = run_smin(cfg("smin", [(40, 20, 1)], dist=GAUSS, trials=30))
        q = list(rep.summary["quantiles"].values())
        assert q == sorted(q)


class TestSharpness:
    def test_finite_fourth_rejected(self):
        with pytest.raises(ConfigError, match="infinite fourth"):
            run_sharpness(cfg("sharpness", [(5, 5, 5)], dist=GAUSS))

    def test_ratio_at_least_max_entry(self):
        c = cfg("sharpness", [(60, 60, 60)], dist=PARETO, trials=3)
        rep = run_sharpness(c)
        for r in rep.records:
            w = rebuild_w(c, 60, 60, 60, r.trial)
            assert r.ratio >= np.abs(w).max() / (2 * math.sqrt(60)) * (1 - 1e-12)

    def test_control_reported(self):
        c = cfg("sharpness", [(20, 20, 20), (40, 40, 40)], dist=PARETO, trials=3,
                control={"kind": "gaussian", "params": {}, "normalization": "unit_variance"})
        rep = run_sharpness(c)
        assert len(rep.summary["control_medians"]) == 2
        assert len(rep.records) == 12


class TestRudelsonAudit:
    def test_single_vector(self):
        u = np.array([[0.6, 0.8, 2.0]])
        assert sign_moment(u, 3.0, 50, seed=1) == pytest.approx(np.sum(u * u), rel=1e-9)

    def test_orthonormal_family(self):
        c = cfg("rudelson_audit", [(10, 10, 1), (40, 40, 1)], dist=RAD, trials=1,
                family="orthonormal", sign_draws=300)
        rep = run_rudelson_audit(c)
        for r in rep.records:
            # sum eps_i e_i e_i^T is a diagonal sign matrix: LHS is exactly 1
            assert r.measured == pytest.approx(1.0, rel=1e-8)
            assert r.normalizer == pytest.approx(math.sqrt(2) + math.sqrt(math.log(r.m)))
            assert r.measured <= rep.fitted_constant * r.normalizer * (1 + 1e-12)

    def test_stability_small(self):
        c = cfg("rudelson_audit", [(10, 20, 1), (50, 100, 1)], dist=RAD, trials=2, sign_draws=100)
        rep = run_rudelson_audit(c)
        assert rep.summary["stability_factor"] <= 2.0
        assert rep.summary["arbitrary_family_max_ratio"] <= 1.0


class TestVarianceAudit:
    def test_zero(self):
        rep = run_variance_audit(cfg("variance_audit", [(20, 20, 20)], dist=RAD, b=ZERO))
        info = rep.summary["by_dims"]["20x20x20"]
        assert info["mean_sq_norm"] == 0 and info["var_sq_norm"] == 0
        assert fit_constant(rep.records) == 0

    def test_rademacher_identity(self):
        rep = run_variance_audit(cfg("variance_audit", [(500, 500, 500)], dist=RAD, trials=4))
        info = rep.summary["by_dims"]["500x500x500"]
        assert info["mean_ok"] and info["var_ok"]

    def test_gaussian_projection(self):
        dist = EntryDistribution("gaussian", {}, "unit_moment:4")
        rep = run_variance_audit(cfg("variance_audit", [(40, 40, 200)], dist=dist,
                                     b=BFactorSpec("orthogonal_projection", 1, 1), trials=10))
        info = rep.summary["by_dims"]["40x40x200"]
        assert info["mean_ok"] and info["var_ok"]
        assert info["mean_sq_norm"] <= 40 + 3 * info["se_mean"]


class TestControlledColumns:
    GRID = [[1, 1], [1, 0.25], [2, 0.5], [4, 0.25], [4, 1], [8, 0.5], [8, 0.25]]

    def test_extremal_b_has_unit_norm(self):
        rep = run_experiment(cfg("controlled_columns", [(40, 40, 1)], dist=RAD, trials=1, grid=[[2, 0.5]]))
        assert rep.records[0].N == 160

    def test_invalid_grid(self):
        with pytest.raises(ConfigError):
            run_experiment(cfg("controlled_columns", [(10, 10, 1)], dist=RAD, grid=[[0.5, 0.5]]))

    @pytest.mark.xfail(reason="the a*b^(1/2)*log^(1/4) term is not attained by this ensemble at n=200; "
                              "measured stability factor is about 5 (see the decisions ledger)", strict=False)
    def test_shape_stable_within_two(self):
        rep = run_experiment(cfg("controlled_columns", [(200, 200, 1)], dist=RAD, trials=5, seed=112, grid=self.GRID))
        assert rep.summary["stability_factor"] <= 2.0


class TestSmallAij:
    def test_runs_and_bounds_m(self):
        dist = EntryDistribution("student_t", {"nu": 5}, "unit_moment:2.5")
        rep = run_experiment(cfg("small_aij", [(100, 100, 100)], dist=dist, trials=3))
        for r in rep.records:
            assert r.normalizer >= math.sqrt(r.n)


class TestDeterminism:
    @pytest.mark.parametrize("workers", [2, 8])
    def test_thread_count_invariant(self, workers):
        c = cfg("main_bound", [(30, 20, 60), (10, 10, 10)], b=BFactorSpec("orthogonal_projection", 1, 1), trials=6)
        assert run_experiment(c, workers=1).to_csv() == run_experiment(c, workers=workers).to_csv()

    def test_seed_depends_on_trial_and_dims(self):
        seeds = {trial_seed(1, t, m, 5, 5) for t in range(5) for m in (3, 4)}
        assert len(seeds) == 10
