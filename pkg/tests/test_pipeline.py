import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import signal

from bodyauth.body_model import NoiseModel, Scene, synthesize_csi
from bodyauth.errors import BodyauthError
from bodyauth.pipeline import (CsiSanitizer, FilterSpec, design_butterworth,
                               filter_series, phase_difference, sanitize,
                               wrap_angle)


def gain_at(spec, freq_hz):
    b, a = design_butterworth(spec)
    _, h = signal.freqz(b, a, worN=[freq_hz], fs=spec.rate_hz)
    return abs(h[0])


class TestDesignButterworth:
    def test_dc_gain(self):
        assert gain_at(FilterSpec(), 0.0) == pytest.approx(1.0, abs=1e-9)

    def test_cutoff_gain(self):
        assert gain_at(FilterSpec(), 1.0) == pytest.approx(0.7071, abs=0.01)

    def test_stopband_gain(self):
        assert gain_at(FilterSpec(), 5.0) <= 1e-3

    def test_invalid_cutoff(self):
        with pytest.raises(BodyauthError):
            FilterSpec(cutoff_hz=25.0)

    def test_poles_inside_unit_circle(self):
        b, a = design_butterworth(FilterSpec())
        assert np.all(np.abs(np.roots(a)) < 1.0)


class TestFilterSeries:
    def test_constant_passthrough(self):
        x = np.full((200, 3), 4.2)
        assert np.allclose(filter_series(x, FilterSpec()), 4.2)

    def test_stopband_sinusoid_suppressed(self):
        t = np.arange(1000) / 50.0
        x = np.sin(2 * np.pi * 10.0 * t)[:, None]
        y = filter_series(x, FilterSpec())
        assert np.max(np.abs(y[100:-100])) < 1e-2

    def test_passband_sinusoid_preserved(self):
        t = np.arange(2000) / 50.0
        x = np.sin(2 * np.pi * 0.2 * t)[:, None]
        y = filter_series(x, FilterSpec())
        mid = y[500:1500, 0]
        assert np.max(np.abs(mid)) == pytest.approx(1.0, rel=0.02)

    def test_too_short(self):
        with pytest.raises(BodyauthError):
            filter_series(np.zeros((10, 1)), FilterSpec())

    def test_zero_phase_no_lag(self):
        # a slow sinusoid should come out in phase, not delayed
        t = np.arange(2000) / 50.0
        x = np.sin(2 * np.pi * 0.2 * t)[:, None]
        y = filter_series(x, FilterSpec())
        xc = np.correlate(y[500:1500, 0], x[500:1500, 0], mode="full")
        assert np.argmax(xc) == len(xc) // 2

    def test_bounded_output_on_bounded_input(self, rng):
        x = np.clip(rng.standard_normal((500, 1)), -1, 1)
        y = filter_series(x, FilterSpec())
        assert np.all(np.isfinite(y))
        assert np.max(np.abs(y)) < 10.0


class TestPhaseDifference:
    def test_arithmetic(self):
        out = phase_difference(np.array([[0.5], [0.7], [0.4]]))
        assert out[:, 0] == pytest.approx([0.2, -0.3])

    def test_wrap_case(self):
        # oracle: -6.2 + 2 pi = 0.0831853...
        out = phase_difference(np.array([[3.1], [-3.1]]))
        assert out[0, 0] == pytest.approx(2 * np.pi - 6.2, abs=1e-12)

    def test_constant_offset_cancels(self, rng):
        true = np.cumsum(rng.uniform(-0.1, 0.1, size=(50, 4)), axis=0)
        shifted = true + 0.987
        assert np.allclose(phase_difference(shifted), phase_difference(true), atol=1e-12)

    def test_linear_ramp_gives_constant(self):
        slope = 0.01
        phases = (slope * np.arange(100))[:, None]
        out = phase_difference(phases)
        assert np.allclose(out, slope, atol=1e-12)

    def test_too_short(self):
        with pytest.raises(BodyauthError):
            phase_difference(np.zeros((1, 3)))

    @given(st.lists(st.floats(-50, 50), min_size=2, max_size=20))
    def test_output_range(self, values):
        out = phase_difference(np.array(values)[:, None])
        assert np.all(out > -np.pi) and np.all(out <= np.pi)

    @given(st.floats(-100, 100), st.floats(-20, 20))
    def test_wrap_preserves_angle(self, base, offset):
        w = wrap_angle(np.array([base]))[0]
        assert np.cos(w) == pytest.approx(np.cos(base), abs=1e-9)
        assert np.sin(w) == pytest.approx(np.sin(base), abs=1e-9)


class TestSanitize:
    def test_noiseless_static_scene(self, simple_scene):
        series = synthesize_csi(simple_scene, 4.0)
        processed = sanitize(series)
        amps = processed.filtered_amplitudes
        assert np.allclose(amps, amps[0], rtol=1e-6)
        assert processed.filtered_phase_diffs.shape[0] == amps.shape[0] - 1

    def test_cfo_only_gives_constant_slope(self):
        scene = Scene(bodies=(), noise=NoiseModel(cfo_delta_t=1e-12), seed=0)
        series = synthesize_csi(scene, 4.0)
        processed = sanitize(series)
        for k in (0, 29):
            expected = 2 * np.pi * scene.subcarrier_freqs_hz[k] * 1e-12 / scene.rate_hz
            assert np.allclose(processed.filtered_phase_diffs[:, k], expected, rtol=1e-6)

    def test_smoothing_reduces_variance(self):
        noise = NoiseModel(sigma_s=0.1, sigma_b=0.05, sigma_m=0.05, amp_jitter_sigma=0.02)
        scene = Scene(bodies=(), noise=noise, seed=3)
        series = synthesize_csi(scene, 10.0)
        processed = sanitize(series)
        raw_amp_var = series.amplitudes.var(axis=0)
        assert np.all(processed.filtered_amplitudes.var(axis=0) < raw_amp_var)
        raw_diff_var = phase_difference(series.phases).var(axis=0)
        assert np.all(processed.filtered_phase_diffs.var(axis=0) < raw_diff_var)

    def test_transformer_wrapper(self, simple_scene):
        series = synthesize_csi(simple_scene, 2.0)
        out = CsiSanitizer().fit(series).transform(series)
        direct = sanitize(series)
        assert np.allclose(out.filtered_amplitudes, direct.filtered_amplitudes)
        assert CsiSanitizer(order=3).get_params()["order"] == 3
