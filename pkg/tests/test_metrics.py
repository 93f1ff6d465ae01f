import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import rankdata

import tomoaug.metrics as metrics
from tomoaug import (
    Image2D,
    PairRecord,
    bland_altman_points,
    bonferroni,
    consistency_report,
    dice,
    disk_phantom,
    lesion_volume,
    threshold_segment,
    wilcoxon_greater,
)


def brute_force_wilcoxon_greater(x, y):
    # independent oracle: full enumeration over all sign assignments
    diff = np.asarray(x, float) - np.asarray(y, float)
    diff = diff[diff != 0.0]
    ranks = rankdata(np.abs(diff))
    observed = ranks[diff > 0].sum()
    count = 0
    total = 0
    for signs in itertools.product((0, 1), repeat=len(ranks)):
        w = sum(r for r, s in zip(ranks, signs) if s)
        count += w >= observed - 1e-9
        total += 1
    return count / total


class TestDice:
    def test_hand_counted_overlap(self):
        # |X|=4, |Y|=6, |X & Y|=3 on 3x3 grids
        x = np.array([[1, 1, 0], [1, 1, 0], [0, 0, 0]], dtype=float)
        y = np.array([[1, 1, 1], [0, 1, 1], [0, 0, 1]], dtype=float)
        assert dice(x, y) == pytest.approx(0.6)

    def test_identical_nonempty_is_one(self):
        x = np.array([[1.0, 0.0], [0.0, 1.0]])
        assert dice(x, x) == 1.0

    def test_disjoint_is_zero(self):
        x = np.array([[1.0, 0.0]])
        y = np.array([[0.0, 1.0]])
        assert dice(x, y) == 0.0

    def test_empty_vs_nonempty_is_zero(self):
        x = np.array([[1.0, 1.0]])
        assert dice(x, np.zeros((1, 2))) == 0.0

    def test_both_empty_is_one(self):
        assert dice(np.zeros((3, 3)), np.zeros((3, 3))) == 1.0

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ValueError):
            dice(np.zeros((2, 2)), np.zeros((3, 3)))

    def test_rejects_nonbinary_values(self):
        with pytest.raises(ValueError):
            dice(np.array([[0.5]]), np.array([[1.0]]))

    def test_accepts_mask_images(self):
        a = Image2D(np.ones((2, 2)))
        b = Image2D(np.zeros((2, 2)))
        assert dice(a, b) == 0.0

    @given(st.integers(0, 2**16 - 1), st.integers(0, 2**16 - 1))
    def test_symmetric_and_bounded(self, bits_a, bits_b):
        a = np.array([(bits_a >> i) & 1 for i in range(16)], float).reshape(4, 4)
        b = np.array([(bits_b >> i) & 1 for i in range(16)], float).reshape(4, 4)
        d = dice(a, b)
        assert d == dice(b, a)
        assert 0.0 <= d <= 1.0
        if np.array_equal(a, b):
            assert d == 1.0


class TestLesionVolume:
    def test_empty_mask_zero(self):
        assert lesion_volume(np.zeros((4, 4))) == 0.0

    def test_unit_spacing_counts_pixels(self):
        m = np.zeros((5, 5))
        m[0, :5] = 1
        m[1, :5] = 1
        assert lesion_volume(m) == 10.0

    def test_half_millimeter_pixels(self):
        m = np.zeros((5, 5))
        m.ravel()[:10] = 1
        assert lesion_volume(m, spacing=(0.5, 0.5)) == 2.5

    def test_mask_image_supplies_spacing(self):
        m = Image2D(np.ones((2, 3)), (0.5, 2.0))
        assert lesion_volume(m) == 6.0


class TestWilcoxon:
    def test_all_positive_n6_exact(self):
        x = [2.0, 3.0, 4.0, 5.0, 6.0, 7.0]
        y = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
        assert wilcoxon_greater(x, y) == pytest.approx(1.0 / 64.0)

    def test_pointwise_equal_is_error(self):
        v = [1.0, 2.0, 3.0, 4.0, 5.0]
        with pytest.raises(ValueError):
            wilcoxon_greater(v, v)

    def test_rejects_short_input(self):
        with pytest.raises(ValueError):
            wilcoxon_greater([1.0, 2.0], [0.0, 0.0])

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            wilcoxon_greater([1.0] * 6, [0.0] * 5)

    @pytest.mark.parametrize("n", [5, 8, 12])
    def test_exact_path_matches_brute_force(self, n):
        rng = np.random.default_rng(n)
        for trial in range(6):
            x = np.round(rng.normal(size=n), 1)
            y = np.round(rng.normal(size=n), 1)
            if np.all(x - y == 0):
                continue
            assert wilcoxon_greater(x, y) == pytest.approx(
                brute_force_wilcoxon_greater(x, y), abs=1e-12
            )

    def test_ties_get_midranks(self):
        # differences 1, 1, -2, 3, 3: |d| ranks (1.5, 1.5, 3, 4.5, 4.5)
        x = [1.0, 1.0, 0.0, 3.0, 3.0]
        y = [0.0, 0.0, 2.0, 0.0, 0.0]
        assert wilcoxon_greater(x, y) == pytest.approx(
            brute_force_wilcoxon_greater(x, y), abs=1e-12
        )

    def test_zero_differences_dropped(self):
        x = [1.0, 2.0, 3.0, 4.0, 5.0, 9.0]
        y = [1.0, 2.0, 0.0, 1.0, 2.0, 3.0]  # first two pairs tie exactly
        p = wilcoxon_greater(x, y)
        assert p == pytest.approx(1.0 / 16.0)  # 4 nonzero, all positive

    def test_normal_approximation_close_to_exact_at_boundary(self, monkeypatch):
        rng = np.random.default_rng(42)
        x = rng.normal(0.3, 1.0, 20)
        y = rng.normal(0.0, 1.0, 20)
        exact = wilcoxon_greater(x, y)
        monkeypatch.setattr(metrics, "EXACT_LIMIT", 0)
        approx = wilcoxon_greater(x, y)
        assert abs(exact - approx) < 0.01

    def test_large_sample_uses_normal_path(self):
        rng = np.random.default_rng(1)
        x = rng.normal(0.5, 1.0, 60)
        y = rng.normal(0.0, 1.0, 60)
        p = wilcoxon_greater(x, y)
        assert 0.0 < p < 0.05

    def test_direction_is_x_greater(self):
        rng = np.random.default_rng(2)
        y = rng.normal(0.0, 1.0, 15)
        x = y + np.abs(rng.normal(1.0, 0.2, 15))
        assert wilcoxon_greater(x, y) < 0.01
        assert wilcoxon_greater(y, x) > 0.99


class TestBonferroni:
    def test_scales_and_clamps(self):
        out = bonferroni([0.01, 0.5], 3)
        assert np.allclose(out, [0.03, 1.0])

    def test_default_m_is_length(self):
        out = bonferroni([0.1, 0.2, 0.3])
        assert np.allclose(out, [0.3, 0.6, 0.9])

    def test_rejects_m_smaller_than_input(self):
        with pytest.raises(ValueError):
            bonferroni([0.1, 0.2, 0.3], 2)

    def test_rejects_out_of_range_p(self):
        with pytest.raises(ValueError):
            bonferroni([1.5])

    @given(
        st.lists(st.floats(0.0, 1.0), min_size=1, max_size=8),
        st.integers(8, 50),
    )
    @settings(max_examples=50)
    def test_monotone_and_bounded(self, ps, m):
        out = bonferroni(ps, m)
        assert np.all(out <= 1.0)
        assert np.all(out >= np.asarray(ps) - 1e-12)
        # clamping may collapse distinct p-values to 1, but never reorders
        assert np.all(np.diff(out[np.argsort(ps, kind="stable")]) >= 0.0)


class TestBlandAltman:
    def test_arithmetic_example(self):
        records = [
            PairRecord("p0", 10.0, 8.0, 1.0),
            PairRecord("p1", 6.0, 6.0, 1.0),
        ]
        ba = bland_altman_points(records)
        assert ba.points == ((9.0, 2.0), (6.0, 0.0))

    def test_sign_convention_soft_minus_sharp(self):
        ba = bland_altman_points([PairRecord("p", 3.0, 5.0, 1.0)])
        assert ba.points[0][1] == -2.0

    def test_identical_volumes_zero_bias_zero_limits(self):
        records = [PairRecord(f"p{i}", 4.0, 4.0, 1.0) for i in range(5)]
        ba = bland_altman_points(records)
        assert ba.bias == 0.0
        assert ba.lower == 0.0
        assert ba.upper == 0.0

    def test_limits_are_1_96_sample_std(self):
        records = [
            PairRecord("a", 10.0, 8.0, 1.0),
            PairRecord("b", 6.0, 6.0, 1.0),
        ]
        ba = bland_altman_points(records)
        spread = np.std([2.0, 0.0], ddof=1)
        assert ba.bias == pytest.approx(1.0)
        assert ba.upper == pytest.approx(1.0 + 1.96 * spread)
        assert ba.lower == pytest.approx(1.0 - 1.96 * spread)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            bland_altman_points([])

    def test_pair_record_validates_dice(self):
        with pytest.raises(ValueError):
            PairRecord("p", 1.0, 1.0, 1.5)


class TestCsv:
    def test_columns_and_rows(self, tmp_path):
        records = [
            PairRecord("p0", 10.0, 8.0, 0.5),
            PairRecord("p1", 6.0, 6.0, 1.0),
        ]
        path = tmp_path / "pairs.csv"
        metrics.write_pairs_csv(records, path)
        lines = path.read_bytes().decode("ascii").split("\n")
        assert lines[0] == "pair_id,mean_volume,diff_volume,dice"
        assert lines[1] == "p0,9.0,2.0,0.5"
        assert lines[2] == "p1,6.0,0.0,1.0"
        assert lines[3] == ""

    def test_lf_endings(self, tmp_path):
        path = tmp_path / "pairs.csv"
        metrics.write_pairs_csv([PairRecord("p", 1.0, 1.0, 1.0)], path)
        raw = path.read_bytes()
        assert b"\r" not in raw
        assert raw.endswith(b"\n")

    def test_identical_input_identical_bytes(self, tmp_path):
        records = [PairRecord("p", 1 / 3, 2 / 7, 0.123456789)]
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        metrics.write_pairs_csv(records, a)
        metrics.write_pairs_csv(records, b)
        assert a.read_bytes() == b.read_bytes()


class TestThresholdSegment:
    def test_uniform_image_outside_window_empty(self):
        img = Image2D(np.full((6, 6), 10.0))
        mask = threshold_segment(img, 0.0, 1.0)
        assert mask.values.sum() == 0.0

    def test_small_blob_filtered(self):
        v = np.zeros((8, 8))
        v[2, 2:5] = 1.0  # 3-pixel blob
        mask = threshold_segment(Image2D(v), 0.5, 1.5, min_component_px=5)
        assert mask.values.sum() == 0.0

    def test_blob_at_cutoff_survives(self):
        v = np.zeros((8, 8))
        v[2, 2:7] = 1.0
        mask = threshold_segment(Image2D(v), 0.5, 1.5, min_component_px=5)
        assert mask.values.sum() == 5.0

    def test_components_are_4_connected(self):
        # two diagonal pixels are separate components
        v = np.zeros((4, 4))
        v[1, 1] = 1.0
        v[2, 2] = 1.0
        mask = threshold_segment(Image2D(v), 0.5, 1.5, min_component_px=2)
        assert mask.values.sum() == 0.0

    def test_recovers_disk_against_ground_truth(self):
        truth = disk_phantom(96, 0.6, 1.0)
        noisy = Image2D(truth.values + 0.02 * np.sin(np.arange(96 * 96)).reshape(96, 96))
        mask = threshold_segment(noisy, 0.4, 1.2, min_component_px=10)
        gt = (truth.values >= 0.5).astype(float)
        assert dice(mask, gt) >= 0.98

    def test_mask_keeps_spacing(self):
        img = Image2D(np.ones((4, 4)), (0.7, 0.7))
        assert threshold_segment(img, 0.0, 2.0).spacing == (0.7, 0.7)

    def test_rejects_inverted_bounds(self):
        with pytest.raises(ValueError):
            threshold_segment(Image2D(np.ones((2, 2))), 1.0, 0.0)


class TestConsistencyReport:
    def test_identical_pairs(self):
        m = np.ones((3, 3))
        report = consistency_report([(m, m), (m, m)])
        assert report.summary_line() == "1.00 (0.00)"
        assert report.dices == (1.0, 1.0)

    def test_mean_and_sample_std(self):
        a = np.array([[1.0, 0.0], [0.0, 0.0]])
        b = np.array([[0.0, 1.0], [0.0, 0.0]])
        report = consistency_report([(a, a), (a, b)])  # dices 1.0, 0.0
        assert report.mean == pytest.approx(0.5)
        assert report.std == pytest.approx(np.std([1.0, 0.0], ddof=1))

    def test_dices_of_half_and_one(self):
        x = np.array([[1.0, 1.0, 0.0, 0.0]])
        y = np.array([[1.0, 0.0, 1.0, 0.0]])  # dice 0.5
        report = consistency_report([(x, y), (x, x)])
        assert report.mean == pytest.approx(0.75)
        assert report.std == pytest.approx(np.std([0.5, 1.0], ddof=1))

    def test_row_count_matches_pairs(self):
        m = np.ones((2, 2))
        report = consistency_report([(m, m)] * 7)
        assert len(report.dices) == 7

    def test_single_pair_zero_std(self):
        m = np.ones((2, 2))
        assert consistency_report([(m, m)]).std == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            consistency_report([])
