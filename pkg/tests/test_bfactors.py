"""Deterministic factors: norm constraint, column profiles, large/small split."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectrallab.bfactors import (
    BFactorSpec,
    InfeasibleProfile,
    build_b,
    column_split,
    split_cardinality_bound,
    split_threshold,
)
from spectrallab.matrix import column_norms, hilbert_schmidt_norm
from spectrallab.spectral import jacobi_eigenvalues, spectral_norm

SPECS = [
    BFactorSpec("identity", 6, 9),
    BFactorSpec("zero", 4, 7),
    BFactorSpec("orthogonal_projection", 6, 20, {"rank": 4}),
    BFactorSpec("row_selection", 5, 12),
    BFactorSpec("diagonal_column_norms", 5, 15, {"value": 0.4}),
    BFactorSpec("scaled_random_orthonormal_rows", 6, 18, {"scale": 0.7}),
]


class TestBuild:
    def test_identity(self):
        b = build_b(BFactorSpec("identity", 3, 3))
        np.testing.assert_array_equal(b, np.eye(3))
        assert spectral_norm(b).value == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("r", [0, 1, 3, 5])
    def test_projection_spectrum(self, r):
        b = build_b(BFactorSpec("orthogonal_projection", 5, 12, {"rank": r}), seed=2)
        eig = np.sort(jacobi_eigenvalues(b @ b.T)[0])
        np.testing.assert_allclose(eig, [0.0] * (5 - r) + [1.0] * r, atol=1e-12)

    def test_diagonal_norms_realized(self):
        norms = np.linspace(0.05, 0.6, 20)
        b = build_b(BFactorSpec("diagonal_column_norms", 6, 20, {"norms": norms.tolist()}))
        recomputed = np.array([math.sqrt(sum(b[i, j] ** 2 for i in range(6))) for j in range(20)])
        np.testing.assert_allclose(recomputed, norms, atol=1e-12)

    def test_constant_norm(self):
        b = build_b(BFactorSpec("diagonal_column_norms", 4, 16, {"value": 0.5}))
        np.testing.assert_allclose(column_norms(b), 0.5, atol=1e-12)

    def test_column_above_one_rejected(self):
        with pytest.raises(InfeasibleProfile, match=r"column 2 .*\|\|B\|\| <= 1"):
            build_b(BFactorSpec("diagonal_column_norms", 3, 4, {"norms": [0.1, 0.2, 1.5, 0.3]}))

    def test_too_much_mass_rejected(self):
        with pytest.raises(InfeasibleProfile, match="squared mass"):
            build_b(BFactorSpec("diagonal_column_norms", 2, 10, {"value": 0.9}))

    def test_seeded_reproducible(self):
        s = BFactorSpec("orthogonal_projection", 4, 10)
        np.testing.assert_array_equal(build_b(s, 5), build_b(s, 5))

    @pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.kind)
    def test_norm_and_hs_bounds(self, spec):
        b = build_b(spec, seed=3)
        op = spectral_norm(b).value
        assert op <= 1 + 1e-10
        assert column_norms(b).max() <= op + 1e-12
        assert hilbert_schmidt_norm(b) ** 2 <= spec.n + 1e-10

    @pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.kind)
    def test_json_round_trip(self, spec):
        assert BFactorSpec.from_json(spec.to_json()) == spec

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown B kind"):
            BFactorSpec("circulant", 2, 2)


class TestColumnSplit:
    def test_identity_all_large(self):
        b = np.eye(10)
        assert split_threshold(10, 0.5) < 1
        large, small = column_split(b, 0.5)
        np.testing.assert_array_equal(large, np.arange(10))
        assert small.size == 0

    def test_zero_all_small(self):
        large, small = column_split(np.zeros((4, 9)), 0.5)
        assert large.size == 0 and small.size == 9

    def test_projection_count(self):
        n = 20
        b = build_b(BFactorSpec("orthogonal_projection", n, 400), seed=7)
        large, _ = column_split(b, 0.5, 1.0)
        thr = split_threshold(n, 0.5, 1.0)
        direct = sum(1 for j in range(400) if np.linalg.norm(b[:, j]) > thr)
        assert large.size == direct
        assert direct <= n * math.log(2 * n) ** 3

    @settings(max_examples=40, deadline=None)
    @given(
        st.integers(1, 12), st.integers(1, 60), st.floats(0.1, 0.9), st.floats(0.05, 5.0), st.integers(0, 2**32)
    )
    def test_partition_and_markov(self, n, N, eps, c0, seed):
        b = build_b(BFactorSpec("scaled_random_orthonormal_rows", n, max(N, n), {"scale": 1.0}), seed)
        large, small = column_split(b, eps, c0)
        assert np.intersect1d(large, small).size == 0
        np.testing.assert_array_equal(np.union1d(large, small), np.arange(b.shape[1]))
        assert large.size < split_cardinality_bound(n, eps, c0) or large.size == 0
