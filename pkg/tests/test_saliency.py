"""Saliency metrics against hand computations and enumeration oracles."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import map_pairs, random_map
from gazekit import (
    FixationMap,
    GazeMap,
    MetricReport,
    NoFixations,
    DegenerateRange,
    ZeroVariance,
    auc_borji,
    auc_judd,
    cc,
    kl_div,
    normalize_to_simplex,
    nss,
    radar_normalize,
    score_maps,
    sim,
)

QUARTET = np.array([[0.4, 0.3], [0.2, 0.1]])


def kl_oracle(g: np.ndarray, p: np.ndarray, floor: float = 1e-8) -> float:
    clamped = np.maximum(p, floor)
    q = clamped / clamped.sum()
    total = 0.0
    for i in range(g.shape[0]):
        for j in range(g.shape[1]):
            if g[i, j] > 0.0:
                total += g[i, j] * (math.log(g[i, j]) - math.log(q[i, j]))
    return total


def auc_oracle(pred: np.ndarray, mask: np.ndarray) -> float:
    """Exhaustive threshold enumeration, integrated trapezoidally by hand."""
    pos = pred[mask]
    neg = pred[~mask]
    points = [(0.0, 0.0)]
    for t in sorted(set(pos.tolist()), reverse=True):
        tpr = float((pos >= t).mean())
        fpr = float((neg >= t).mean())
        points.append((fpr, tpr))
    points.append((1.0, 1.0))
    area = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return area


class TestCC:
    def test_self_correlation(self, rng):
        for _ in range(5):
            m = random_map(rng, 7, 9)
            assert abs(cc(m, m) - 1.0) < 1e-9

    def test_exact_anticorrelation(self):
        # gt = 0.5 - pred cell-for-cell.
        pred = GazeMap(QUARTET)
        gt = GazeMap(0.5 - QUARTET)
        assert abs(cc(pred, gt) + 1.0) < 1e-12

    def test_uniform_raises(self):
        uniform = normalize_to_simplex(np.ones((4, 4)))
        with pytest.raises(ZeroVariance):
            cc(uniform, GazeMap(np.eye(4) / 4.0))

    @given(pair=map_pairs())
    def test_symmetry(self, pair):
        p, q = pair
        assert abs(cc(p, q) - cc(q, p)) < 1e-12


class TestKL:
    def test_identity_is_zero(self, rng):
        m = random_map(rng, 6, 6, low=0.2)
        assert abs(kl_div(m, m)) < 1e-9

    def test_delta_versus_uniform(self):
        v = np.zeros((64, 64))
        v[10, 20] = 1.0
        uniform = normalize_to_simplex(np.ones((64, 64)))
        assert abs(kl_div(GazeMap(v), uniform) - math.log(4096.0)) < 1e-6

    def test_matches_summation_oracle(self, rng):
        for _ in range(10):
            g = random_map(rng, 8, 8)
            p = random_map(rng, 8, 8)
            assert abs(kl_div(g, p) - kl_oracle(g.values, p.values)) < 1e-12

    def test_floor_clamps_zero_predictions(self):
        g = GazeMap(np.array([[0.5, 0.5], [0.0, 0.0]]))
        p = GazeMap(np.array([[1.0, 0.0], [0.0, 0.0]]))
        # Finite because the zero prediction cell is floored.
        assert math.isfinite(kl_div(g, p))
        assert kl_div(g, p) > 1.0

    @given(pair=map_pairs())
    def test_nonnegative(self, pair):
        g, p = pair
        assert kl_div(g, p) >= 0.0


class TestSIM:
    def test_self_is_one(self, rng):
        m = random_map(rng, 5, 5)
        assert abs(sim(m, m) - 1.0) < 1e-12

    def test_half_overlap(self):
        pred = GazeMap(np.array([[1.0, 0.0], [0.0, 0.0]]))
        gt = GazeMap(np.array([[0.5, 0.5], [0.0, 0.0]]))
        assert abs(sim(pred, gt) - 0.5) < 1e-12

    def test_disjoint_supports(self):
        pred = GazeMap(np.array([[1.0, 0.0], [0.0, 0.0]]))
        gt = GazeMap(np.array([[0.0, 0.0], [0.0, 1.0]]))
        assert sim(pred, gt) == 0.0

    @given(pair=map_pairs())
    def test_symmetric_and_bounded(self, pair):
        p, q = pair
        s = sim(p, q)
        assert abs(s - sim(q, p)) < 1e-12
        assert s <= 1.0 + 1e-12

    @given(pair=map_pairs())
    def test_equality_only_at_identical_maps(self, pair):
        p, q = pair
        if np.abs(p.values - q.values).max() > 1e-7:
            assert sim(p, q) < 1.0 - 1e-12


class TestNSS:
    def test_hand_fixture(self):
        # mean 0.25, population variance 0.0125; one fixation at the 0.4
        # cell: (0.4 - 0.25) / sqrt(0.0125).
        fix = FixationMap(np.array([[True, False], [False, False]]))
        expected = 0.15 / math.sqrt(0.0125)
        assert abs(nss(GazeMap(QUARTET), fix) - expected) < 1e-9
        assert abs(expected - 1.3416407865) < 1e-9

    def test_all_cells_fixated_gives_zero(self, rng):
        m = random_map(rng, 4, 6)
        fix = FixationMap(np.ones((4, 6), dtype=bool))
        assert abs(nss(m, fix)) < 1e-12

    def test_uniform_raises(self):
        uniform = normalize_to_simplex(np.ones((3, 3)))
        with pytest.raises(ZeroVariance):
            nss(uniform, FixationMap(np.eye(3, dtype=bool)))

    def test_empty_fixations_raise(self, rng):
        with pytest.raises(NoFixations):
            nss(random_map(rng, 3, 3), FixationMap(np.zeros((3, 3), dtype=bool)))

    @given(
        seed=st.integers(0, 2**32 - 1),
        a=st.floats(0.1, 10.0),
        b=st.floats(-5.0, 5.0),
    )
    def test_positive_affine_invariance(self, seed, a, b):
        gen = np.random.default_rng(seed)
        raw = gen.uniform(0.0, 1.0, size=(5, 5))
        mask = np.zeros((5, 5), dtype=bool)
        mask[gen.integers(0, 5), gen.integers(0, 5)] = True
        fix = FixationMap(mask)
        # Raw value grids on purpose: standardization absorbs the affine map.
        assert abs(nss(raw, fix) - nss(a * raw + b, fix)) < 1e-7


class TestAUCJudd:
    def test_perfect_ranking(self, rng):
        values = rng.permutation(np.arange(1.0, 26.0)).reshape(5, 5)
        pred = normalize_to_simplex(values)
        mask = values >= np.partition(values.ravel(), -3)[-3]
        assert auc_judd(pred, FixationMap(mask)) == 1.0

    def test_constant_prediction_scores_half(self):
        uniform = normalize_to_simplex(np.ones((4, 4)))
        fix = FixationMap(np.eye(4, dtype=bool))
        assert abs(auc_judd(uniform, fix) - 0.5) < 1e-12

    def test_three_by_three_enumeration(self):
        pred = np.array([[0.9, 0.1, 0.4], [0.2, 0.8, 0.3], [0.5, 0.6, 0.7]])
        mask = np.zeros((3, 3), dtype=bool)
        mask[0, 0] = mask[1, 2] = True  # values 0.9 (best) and 0.3 (rank 7)
        assert auc_judd(pred, mask) == auc_oracle(pred, mask)

    def test_random_maps_match_enumeration(self, rng):
        # Same value up to summation order of the trapezoid areas.
        for _ in range(25):
            pred = rng.uniform(0.0, 1.0, size=(6, 6))
            mask = rng.uniform(size=(6, 6)) < 0.25
            if not mask.any() or mask.all():
                continue
            assert abs(auc_judd(pred, mask) - auc_oracle(pred, mask)) < 1e-12

    @given(seed=st.integers(0, 2**32 - 1))
    def test_monotone_transform_invariance(self, seed):
        gen = np.random.default_rng(seed)
        pred = gen.uniform(0.1, 1.0, size=(5, 5))
        mask = gen.uniform(size=(5, 5)) < 0.3
        if not mask.any() or mask.all():
            return
        base = auc_judd(pred, mask)
        assert abs(auc_judd(pred**2, mask) - base) < 1e-12
        assert abs(auc_judd(pred + 3.7, mask) - base) < 1e-12


class TestAUCBorji:
    def test_perfect_ranking_every_seed(self, rng):
        values = rng.permutation(np.arange(1.0, 37.0)).reshape(6, 6)
        pred = normalize_to_simplex(values)
        mask = values >= np.partition(values.ravel(), -4)[-4]
        for seed in range(5):
            assert auc_borji(pred, FixationMap(mask), n_splits=20, seed=seed) == 1.0

    def test_deterministic_to_the_last_bit(self, rng):
        pred = random_map(rng, 8, 8)
        mask = np.random.default_rng(3).uniform(size=(8, 8)) < 0.2
        mask[0, 0] = True
        a = auc_borji(pred, mask, n_splits=50, seed=11)
        b = auc_borji(pred, mask, n_splits=50, seed=11)
        assert a == b

    def test_converges_to_full_negative_set_auc(self, rng):
        pred = random_map(rng, 10, 10)
        mask = np.random.default_rng(5).uniform(size=(10, 10)) < 0.15
        mask[2, 2] = True
        full = auc_judd(pred, mask)
        d_small = abs(auc_borji(pred, mask, n_splits=5, seed=0) - full)
        d_large = abs(auc_borji(pred, mask, n_splits=500, seed=0) - full)
        assert d_large <= d_small + 0.02
        assert d_large < 0.02


class TestRadarNormalize:
    def test_plain(self):
        assert radar_normalize([1.0, 3.0, 5.0]) == [0.0, 0.5, 1.0]

    def test_inverted(self):
        assert radar_normalize([1.0, 3.0, 5.0], invert=True) == [1.0, 0.5, 0.0]

    def test_degenerate(self):
        with pytest.raises(DegenerateRange):
            radar_normalize([2.0, 2.0, 2.0])


class TestScoreMaps:
    def test_assembles_component_metrics(self, rng):
        pred = random_map(rng, 8, 8)
        gt = random_map(rng, 8, 8)
        mask = np.zeros((8, 8), dtype=bool)
        mask[1, 1] = mask[5, 6] = True
        fix = FixationMap(mask)
        report = score_maps(pred, gt, fix, n_splits=20, seed=4)
        assert report.cc == cc(pred, gt)
        assert report.kl == kl_div(gt, pred)
        assert report.sim == sim(pred, gt)
        assert report.auc_judd == auc_judd(pred, fix)
        assert report.auc_borji == auc_borji(pred, fix, n_splits=20, seed=4)
        assert report.nss == nss(pred, fix)

    def test_report_rejects_out_of_range_values(self):
        with pytest.raises(ValueError):
            MetricReport(cc=0.5, kl=-0.1, sim=0.5, auc_judd=0.5, auc_borji=0.5, nss=0.0)
        with pytest.raises(ValueError):
            MetricReport(cc=0.5, kl=0.1, sim=1.5, auc_judd=0.5, auc_borji=0.5, nss=0.0)
