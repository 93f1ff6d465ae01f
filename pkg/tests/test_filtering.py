import numpy as np
import pytest

from tomoaug import (
    FilterSpec,
    FrequencyResponse,
    RECONSTRUCTION_GAIN,
    Sinogram,
    add_noise,
    analytic_disk_sinogram,
    disk_phantom,
    fbp,
    filter_response,
    filter_sinogram,
    kab_response,
    pad_for_radon,
    radon,
    ramp_response,
)


def band_limited_ramp_lag(m):
    # the textbook spatial ramp kernel, restated independently of the
    # implementation: 1/4 at lag 0, -1/(pi m)^2 at odd lags, 0 at even lags
    m = abs(int(m))
    if m == 0:
        return 0.25
    if m % 2 == 0:
        return 0.0
    return -1.0 / (np.pi * m) ** 2


class TestFilterSpec:
    def test_constructors(self):
        assert FilterSpec.ramp().kind == "ramp"
        k = FilterSpec.kab(12.5, 2.0)
        assert (k.kind, k.a, k.b) == ("kab", 12.5, 2.0)

    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError):
            FilterSpec("hann")

    def test_rejects_nonpositive_b(self):
        with pytest.raises(ValueError):
            FilterSpec.kab(1.0, 0.0)

    def test_rejects_a_below_minus_one(self):
        with pytest.raises(ValueError):
            FilterSpec.kab(-1.0001, 1.0)

    def test_boundary_a_minus_one_allowed(self):
        FilterSpec.kab(-1.0, 0.7)


class TestRampResponse:
    def test_padding_is_next_power_of_two(self):
        assert ramp_response(367).n_padded == 1024
        assert ramp_response(255).n_padded == 512
        assert ramp_response(256).n_padded == 512
        assert ramp_response(257).n_padded == 1024

    def test_gain_count_covers_half_spectrum(self):
        r = ramp_response(11)
        assert r.gains.shape == (r.n_padded // 2 + 1,)
        assert r.normalized_freq[0] == 0.0
        assert r.normalized_freq[-1] == 1.0

    def test_midband_tracks_half_normalized_frequency(self):
        r = ramp_response(255)
        w = r.normalized_freq
        mid = (w > 0.1) & (w < 0.9)
        assert np.abs(r.gains[mid] - w[mid] / 2.0).max() < 1e-6

    def test_dc_gain_small_positive(self):
        r = ramp_response(101)
        assert 0.0 < r.gains[0] < r.gains[1]

    def test_strictly_increasing(self):
        r = ramp_response(363)
        assert np.all(np.diff(r.gains) > 0)

    def test_gains_nonnegative(self):
        for n in (1, 2, 5, 64, 367):
            assert ramp_response(n).gains.min() >= 0.0

    def test_matches_transform_of_lag_kernel(self):
        # same kernel assembled here from the lag rule, then transformed
        n = 37
        r = ramp_response(n)
        P = r.n_padded
        kernel = np.zeros(P)
        for k in range(P):
            lag = k if k <= P // 2 else k - P
            kernel[k] = band_limited_ramp_lag(lag)
        ref = np.fft.rfft(kernel).real
        assert np.allclose(r.gains, ref, atol=1e-15)


class TestKabResponse:
    @pytest.mark.parametrize("b", [0.3, 1.0, 2.0, 4.0])
    def test_a_zero_is_ramp_bitwise(self, b):
        n = 121
        assert kab_response(n, 0.0, b).gains.tobytes() == ramp_response(n).gains.tobytes()

    def test_nyquist_gain_factor_31_for_strong_sharpening(self):
        n = 101
        r = ramp_response(n)
        k = kab_response(n, 30.0, 3.0)
        assert k.gains[-1] == pytest.approx(31.0 * r.gains[-1], rel=1e-12)

    def test_nyquist_gain_zero_for_full_smoothing(self):
        k = kab_response(101, -1.0, 0.7)
        assert k.gains[-1] == pytest.approx(0.0, abs=1e-15)

    def test_gains_nonnegative_down_to_a_minus_one(self):
        assert kab_response(63, -1.0, 0.3).gains.min() >= 0.0

    def test_gain_increases_with_a_at_fixed_frequency(self):
        n = 75
        gains = [kab_response(n, a, 1.0).gains for a in (-1.0, -0.5, 0.0, 10.0, 30.0)]
        mid = len(gains[0]) // 2
        values = [g[mid] for g in gains]
        assert all(x < y for x, y in zip(values, values[1:]))

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            kab_response(11, -1.5, 1.0)
        with pytest.raises(ValueError):
            kab_response(11, 1.0, 0.0)

    def test_filter_response_dispatch(self):
        n = 41
        assert np.array_equal(
            filter_response(FilterSpec.ramp(), n).gains, ramp_response(n).gains
        )
        assert np.array_equal(
            filter_response(FilterSpec.kab(2.0, 1.5), n).gains,
            kab_response(n, 2.0, 1.5).gains,
        )


class TestFrequencyResponse:
    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError):
            FrequencyResponse(16, np.zeros(5))

    def test_rejects_nonfinite(self):
        g = np.zeros(9)
        g[3] = np.inf
        with pytest.raises(ValueError):
            FrequencyResponse(16, g)


class TestFilterSinogram:
    def test_identity_response_is_noop(self):
        rng = np.random.default_rng(0)
        s = Sinogram(rng.normal(size=(6, 31)))
        resp = FrequencyResponse(64, np.ones(33))
        out = filter_sinogram(s, resp)
        assert np.abs(out.values - s.values).max() < 1e-6 * np.abs(s.values).max()

    def test_zero_response_zeroes_everything(self):
        s = Sinogram(np.ones((3, 9)))
        out = filter_sinogram(s, FrequencyResponse(32, np.zeros(17)))
        assert np.abs(out.values).max() < 1e-15

    def test_rejects_insufficient_padding(self):
        s = Sinogram(np.ones((3, 31)))
        with pytest.raises(ValueError):
            filter_sinogram(s, FrequencyResponse(32, np.zeros(17)))

    def test_matches_direct_spatial_convolution(self):
        # dual route: dense convolution with the lag-rule kernel
        rng = np.random.default_rng(7)
        n = 33
        s = Sinogram(rng.normal(size=(4, n)))
        out = filter_sinogram(s, ramp_response(n)).values
        ref = np.zeros_like(out)
        for j in range(n):
            for m in range(n):
                ref[:, j] += s.values[:, m] * band_limited_ramp_lag(j - m)
        assert np.abs(out - ref).max() < 1e-12

    def test_filtered_disk_has_negative_lobes_outside_support(self):
        R = 8.0
        sino = analytic_disk_sinogram(R, 1.0, 1, 41)
        out = filter_sinogram(sino, ramp_response(41))
        t = sino.detector_axis()
        just_outside = (np.abs(t) > R) & (np.abs(t) <= R + 4)
        assert out.values[0][just_outside].max() < 0.0

    def test_geometry_unchanged(self):
        s = Sinogram(np.ones((5, 21)), det_spacing=0.8)
        out = filter_sinogram(s, ramp_response(21))
        assert out.values.shape == (5, 21)
        assert out.det_spacing == 0.8


class TestFbp:
    def test_zero_sinogram_zero_image(self):
        img = fbp(Sinogram(np.zeros((12, 21))), FilterSpec.ramp())
        assert np.all(img.values == 0.0)
        assert img.values.shape == (21, 21)

    def test_linearity_in_sinogram(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=(10, 25))
        b = rng.normal(size=(10, 25))
        fa = fbp(Sinogram(a), FilterSpec.ramp()).values
        fb = fbp(Sinogram(b), FilterSpec.ramp()).values
        fab = fbp(Sinogram(a + 0.5 * b), FilterSpec.ramp()).values
        ref = fa + 0.5 * fb
        assert np.abs(fab - ref).max() <= 1e-6 * np.abs(ref).max()

    def test_gain_constant_value(self):
        assert RECONSTRUCTION_GAIN == pytest.approx(2.0 * np.pi, rel=0, abs=0)

    def test_det_spacing_scales_into_result(self):
        # same dimensionless sinogram at two spacings: values scale by 1/tau
        rng = np.random.default_rng(4)
        raw = rng.normal(size=(8, 15))
        f1 = fbp(Sinogram(raw, det_spacing=1.0), FilterSpec.ramp()).values
        f2 = fbp(Sinogram(raw, det_spacing=2.0), FilterSpec.ramp()).values
        assert np.allclose(f1, 2.0 * f2)

    def test_small_disk_amplitude_recovered(self):
        img = disk_phantom(65, 0.6, 2.0)
        padded, rec = pad_for_radon(img)
        sino = radon(padded, 180)
        recon = fbp(sino, FilterSpec.ramp())
        c = recon.values.shape[0] // 2
        core = recon.values[c - 5:c + 6, c - 5:c + 6]
        assert core.mean() == pytest.approx(2.0, rel=0.03)

    def test_sharpening_filter_amplifies_noise(self):
        img = add_noise(disk_phantom(64, 0.7, 1.0), 0.05, 21)
        padded, _ = pad_for_radon(img)
        sino = radon(padded, 90)
        flat = slice(28, 37)
        v_ramp = fbp(sino, FilterSpec.ramp()).values[flat, flat].std()
        v_sharp = fbp(sino, FilterSpec.kab(30.0, 3.0)).values[flat, flat].std()
        assert v_sharp > v_ramp
