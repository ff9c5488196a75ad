import math

import numpy as np
import pandas as pd
import pytest

from enhancement.mapping_funcs import DegenerateHistogramError, EnhanceParams, MappingCurve, apply_curve, \
    build_agcwd_curve, build_mapping_curve, compute_threshold, splice_curve
from imagecore.color_funcs import rgb_to_hsv
from preprocessing.degradation_funcs import degrade
from preprocessing.scene_funcs import SCENE_KINDS, make_scene


def brute_force_threshold(plane: np.ndarray, percentile: float) -> float:
    levels = sorted(float(x) * 255 for x in plane.ravel())
    rank = math.ceil(percentile / 100.0 * len(levels))
    p = levels[max(rank, 1) - 1]
    i_max = levels[-1]
    between = []
    for level in levels:
        if p < level < i_max:
            between.append(level)
    return 255 - math.fsum(between) / len(between)


def scalar_agcwd(plane: np.ndarray, alpha: float, l_max: float = 255.0) -> list[float]:
    hist = [0] * 256
    for x in plane.ravel():
        hist[int(round(float(x) * 255))] += 1
    total = sum(hist)
    pdf = [h / total for h in hist]
    pdf_max, pdf_min = max(pdf), min(pdf)
    pdf_w = [pdf_max * ((p - pdf_min) / (pdf_max - pdf_min)) ** alpha for p in pdf]
    norm = sum(pdf_w)
    lut, running = [], 0.0
    for level in range(256):
        running += pdf_w[level]
        lut.append(0.0 if level == 0 else l_max * (level / l_max) ** (1 - running / norm))
    return lut


def dark_plane(rng: np.random.Generator, shape=(64, 64)) -> np.ndarray:
    return rng.random(shape) ** 3 * 0.8


class TestComputeThreshold:

    def test_hundred_levels(self) -> None:
        plane = (np.arange(100, dtype=np.float64) * (255.0 / 99.0) / 255.0).reshape(10, 10)
        assert compute_threshold(plane, 75) == brute_force_threshold(plane, 75)

    def test_matches_brute_force(self, rng) -> None:
        for _ in range(100):
            plane = rng.random((16, 16))
            assert compute_threshold(plane, 75) == brute_force_threshold(plane, 75)
            assert compute_threshold(plane, 50) == brute_force_threshold(plane, 50)

    def test_brighter_image_has_smaller_threshold(self, rng) -> None:
        for _ in range(20):
            dark = rng.random((16, 16)) * 0.6
            assert compute_threshold(dark * 1.5, 75) < compute_threshold(dark, 75)

    def test_constant_plane_is_degenerate(self) -> None:
        with pytest.raises(DegenerateHistogramError):
            compute_threshold(np.full((8, 8), 0.3), 75)

    def test_threshold_range(self, rng) -> None:
        assert 0 < compute_threshold(rng.random((8, 8)), 75) < 255

    @pytest.mark.parametrize("percentile", [0, 100, -5])
    def test_rejects_invalid_percentile(self, percentile) -> None:
        with pytest.raises(ValueError):
            compute_threshold(np.zeros((2, 2)), percentile)


class TestBuildAgcwdCurve:

    def test_endpoints(self, rng) -> None:
        for _ in range(10):
            lut = build_agcwd_curve(rng.random((16, 16)), 0.5)
            assert lut[0] == 0.0
            assert lut[255] == pytest.approx(255.0)

    def test_uniform_histogram(self) -> None:
        plane = (np.arange(256, dtype=np.float64) / 255.0).reshape(16, 16)
        lut = build_agcwd_curve(plane, 1.0)
        expected = [0.0] + [255 * (level / 255) ** (1 - (level + 1) / 256) for level in range(1, 256)]
        np.testing.assert_allclose(lut, expected, rtol=1e-12)

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 1.0])
    def test_matches_scalar_evaluation(self, rng, alpha) -> None:
        plane = dark_plane(rng, (16, 16))
        np.testing.assert_allclose(build_agcwd_curve(plane, alpha), scalar_agcwd(plane, alpha), rtol=1e-9)

    def test_saturates_at_l_max(self, rng) -> None:
        plane = dark_plane(rng, (16, 16)) * 0.3
        l_max = float(plane.max()) * 255
        lut = build_agcwd_curve(plane, 0.5, l_max=l_max)
        np.testing.assert_allclose(lut, scalar_agcwd(plane, 0.5, l_max), rtol=1e-9)
        assert lut[math.ceil(l_max)] == pytest.approx(l_max)
        assert lut[255] == pytest.approx(l_max)

    @pytest.mark.parametrize("l_max", [0.0, 300.0])
    def test_rejects_invalid_l_max(self, rng, l_max) -> None:
        with pytest.raises(ValueError):
            build_agcwd_curve(dark_plane(rng, (8, 8)), 0.5, l_max=l_max)

    def test_brightens_dark_histograms(self, rng) -> None:
        lut = build_agcwd_curve(dark_plane(rng), 0.5)
        levels = np.arange(256)
        assert np.all(lut[1:255] > levels[1:255])

    def test_constant_plane_is_degenerate(self) -> None:
        with pytest.raises(DegenerateHistogramError):
            build_agcwd_curve(np.full((4, 4), 0.5), 0.5)


class TestSpliceCurve:

    def test_identity_above_threshold(self, rng) -> None:
        lut = splice_curve(build_agcwd_curve(dark_plane(rng), 0.5), 150.0)
        assert lut[250] == 250.0

    def test_threshold_level_takes_identity(self, rng) -> None:
        lut = splice_curve(build_agcwd_curve(dark_plane(rng), 0.5), 150.0)
        assert lut[150] == 150.0
        assert lut[149] >= 149.0

    def test_continuity_at_threshold(self, rng) -> None:
        threshold = 120.4
        lut = splice_curve(build_agcwd_curve(dark_plane(rng), 0.5), threshold)
        below = math.floor(threshold)
        assert abs(lut[below + 1] - lut[below]) <= 1.0

    def test_zero_threshold_is_identity(self, rng) -> None:
        lut = splice_curve(build_agcwd_curve(dark_plane(rng), 0.5), 0.0)
        np.testing.assert_array_equal(lut, np.arange(256))


class TestBuildMappingCurve:

    def test_identity_region_and_lift(self, rng) -> None:
        params = EnhanceParams()
        for _ in range(20):
            curve = build_mapping_curve(dark_plane(rng), params)
            levels = np.arange(256, dtype=np.float64)
            start = math.ceil(curve.threshold)
            np.testing.assert_array_equal(curve.lut[start:], levels[start:])
            assert np.all(curve.lut[:start] >= levels[:start])
            assert 0 < curve.threshold < 255

    def test_brightest_level_is_lifted_to_threshold(self, rng) -> None:
        plane = dark_plane(rng) * 0.3
        curve = build_mapping_curve(plane, EnhanceParams())
        top = math.ceil(float(plane.max()) * 255)
        assert top < curve.threshold
        assert curve.lut[top] == pytest.approx(curve.threshold)

    def test_monotone_over_synthetic_corpus(self) -> None:
        params = EnhanceParams()
        exposures = [0.1, 0.25, 0.5, 0.75, 1.0]
        count = 0
        for k in range(50):
            kind = SCENE_KINDS[k % len(SCENE_KINDS)]
            img = degrade(make_scene(kind, size=64, seed=k), exposure=exposures[k % 5],
                          noise_sigma=(k % 4) * 5.0 / 255.0, seed=k)
            curve = build_mapping_curve(rgb_to_hsv(img).v, params)
            assert np.all(np.diff(curve.lut) >= 0)
            assert curve.lut[255] <= 255
            count += 1
        assert count == 50

    def test_degenerate_plane_falls_back_to_identity(self, caplog) -> None:
        curve = build_mapping_curve(np.full((8, 8), 0.2), EnhanceParams())
        assert curve.threshold == 0.0
        np.testing.assert_array_equal(curve.lut, np.arange(256))
        assert "identity" in caplog.text

    def test_params_validation(self) -> None:
        with pytest.raises(ValueError):
            EnhanceParams(percentile=100)
        with pytest.raises(ValueError):
            EnhanceParams(alpha=1.5)
        with pytest.raises(ValueError):
            EnhanceParams(histogram_bins=128)


class TestMappingCurve:

    def test_rejects_decreasing_lut(self) -> None:
        lut = np.arange(256, dtype=np.float64)
        lut[10] = 0.0
        with pytest.raises(ValueError):
            MappingCurve(lut=lut, threshold=0.0)

    def test_rejects_wrong_length(self) -> None:
        with pytest.raises(ValueError):
            MappingCurve(lut=np.arange(255, dtype=np.float64), threshold=0.0)

    def test_lut_is_frozen(self) -> None:
        curve = MappingCurve.identity()
        with pytest.raises(ValueError):
            curve.lut[0] = 3.0

    def test_save_csv(self, tmp_path) -> None:
        path = tmp_path / "curve.csv"
        MappingCurve.identity().save_csv(str(path))
        df = pd.read_csv(path)
        assert list(df.columns) == ["index", "value"]
        assert len(df) == 256
        assert df["value"].iloc[200] == pytest.approx(200.0)


class TestApplyCurve:

    def test_identity_curve(self, rng) -> None:
        plane = rng.random((12, 12))
        np.testing.assert_allclose(apply_curve(plane, MappingCurve.identity()), plane, atol=1e-6)

    def test_constant_curve(self, rng) -> None:
        curve = MappingCurve(lut=np.full(256, 128.0), threshold=0.0)
        np.testing.assert_allclose(apply_curve(rng.random((5, 5)), curve), 128.0 / 255.0)

    def test_matches_scalar_interpolation(self, rng) -> None:
        lut = np.sort(rng.uniform(0, 255, 256))
        curve = MappingCurve(lut=lut, threshold=0.0)
        plane = rng.random((10, 10))
        out = apply_curve(plane, curve)
        for (r, c), x in np.ndenumerate(plane):
            level = x * 255
            lo = min(int(math.floor(level)), 254)
            frac = level - lo
            expected = (lut[lo] + (lut[lo + 1] - lut[lo]) * frac) / 255
            assert out[r, c] == pytest.approx(expected, abs=1e-12)
