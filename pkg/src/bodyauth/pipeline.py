"""CSI sanitization: Butterworth smoothing and offset-cancelling phase
differencing.

Amplitudes are smoothed with a zero-phase low-pass Butterworth filter
(default 5th order, 1 Hz cutoff at 50 Hz sampling). Raw phases carry
per-packet offsets and a CFO slope; differencing consecutive phases cancels
the constant offsets, and the differenced series is then smoothed with the
same filter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal
from sklearn.base import BaseEstimator, TransformerMixin

from .csi import CsiSeries
from .errors import BodyauthError


@dataclass(frozen=True)
class FilterSpec:
    order: int = 5
    cutoff_hz: float = 1.0
    rate_hz: float = 50.0

    def __post_init__(self):
        if self.order < 1:
            raise BodyauthError("filter order must be >= 1")
        if not (0 < self.cutoff_hz < self.rate_hz / 2):
            raise BodyauthError("cutoff must lie in (0, Nyquist)")


@dataclass(frozen=True)
class ProcessedSeries:
    """Sanitized series: filtered amplitudes (N, S) and filtered phase
    differences (N-1, S)."""

    filtered_amplitudes: np.ndarray
    filtered_phase_diffs: np.ndarray
    rate_hz: float

    def __post_init__(self):
        if self.filtered_phase_diffs.shape[0] != self.filtered_amplitudes.shape[0] - 1:
            raise BodyauthError("phase-diff series must be one sample shorter")


def design_butterworth(spec: FilterSpec) -> tuple[np.ndarray, np.ndarray]:
    """Digital low-pass Butterworth (b, a) via the bilinear transform with
    cutoff prewarping; unit DC gain."""
    return signal.butter(spec.order, spec.cutoff_hz, btype="low", fs=spec.rate_hz)


def filter_series(series: np.ndarray, spec: FilterSpec) -> np.ndarray:
    """Zero-phase (forward-backward) filtering along axis 0, independently
    per subcarrier; reflect-padded to suppress startup transients."""
    x = np.asarray(series, dtype=float)
    padlen = 3 * spec.order
    if x.shape[0] <= padlen:
        raise BodyauthError(
            f"series too short to filter: need > {padlen} samples, got {x.shape[0]}"
        )
    b, a = design_butterworth(spec)
    return signal.filtfilt(b, a, x, axis=0, padlen=padlen)


def wrap_angle(x: np.ndarray) -> np.ndarray:
    """Wrap angles into (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2 * np.pi)


def phase_difference(phases: np.ndarray) -> np.ndarray:
    """Consecutive phase differences wrapped to (-pi, pi]; cancels any
    per-series constant offset exactly."""
    p = np.asarray(phases, dtype=float)
    if p.shape[0] < 2:
        raise BodyauthError("need at least 2 phase samples to difference")
    return wrap_angle(np.diff(p, axis=0))


def sanitize(series: CsiSeries, spec: FilterSpec | None = None) -> ProcessedSeries:
    """Filter amplitudes and differenced phases per subcarrier."""
    if spec is None:
        spec = FilterSpec(rate_hz=series.rate_hz)
    if series.n_frames == 0:
        raise BodyauthError("empty CSI series")
    amps = filter_series(series.amplitudes, spec)
    diffs = filter_series(phase_difference(series.phases), spec)
    return ProcessedSeries(filtered_amplitudes=amps, filtered_phase_diffs=diffs,
                           rate_hz=series.rate_hz)


class CsiSanitizer(BaseEstimator, TransformerMixin):
    """Stateless transformer wrapping :func:`sanitize` so the sanitization
    step composes in estimator pipelines."""

    def __init__(self, order: int = 5, cutoff_hz: float = 1.0):
        self.order = order
        self.cutoff_hz = cutoff_hz

    def fit(self, X, y=None):
        return self

    def transform(self, X: CsiSeries) -> ProcessedSeries:
        spec = FilterSpec(order=self.order, cutoff_hz=self.cutoff_hz, rate_hz=X.rate_hz)
        return sanitize(X, spec)
