"""Statistical feature extraction, PCA reduction and [-1, 1] normalization.

Each one-second window yields 8 statistics per subcarrier per channel
(amplitude, phase-diff): with 30 subcarriers that is 8 x 30 x 2 = 480
dimensions. Vectors are laid out channel-major: for channel in (amplitude,
phase-diff), for each subcarrier, the 8 statistics in STAT_NAMES order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .errors import BodyauthError
from .pipeline import ProcessedSeries

STAT_NAMES = ("mean", "max", "min", "mad", "iqr", "rms", "skewness", "kurtosis")
N_STATS = len(STAT_NAMES)
CHANNELS = ("amplitude", "phase_diff")


@dataclass(frozen=True)
class Window:
    """One analysis window: amplitudes (w, S) and phase diffs (w-1, S)."""

    amplitudes: np.ndarray
    phase_diffs: np.ndarray
    index: int


def window(series: ProcessedSeries, window_s: float = 1.0) -> list[Window]:
    """Non-overlapping consecutive windows; a trailing partial window is
    dropped."""
    w = int(round(window_s * series.rate_hz))
    if w < 8:
        raise BodyauthError("window must cover at least 8 samples")
    n = series.filtered_amplitudes.shape[0]
    count = n // w
    if count == 0:
        raise BodyauthError(f"series shorter than one window ({n} < {w} samples)")
    out = []
    for i in range(count):
        amp = series.filtered_amplitudes[i * w:(i + 1) * w]
        pd = series.filtered_phase_diffs[i * w:(i + 1) * w - 1]
        out.append(Window(amplitudes=amp, phase_diffs=pd, index=i))
    return out


def _stat_block(x: np.ndarray) -> np.ndarray:
    """Statistics along axis 0 of (T, S) data -> (S, 8).

    Skewness/kurtosis are population moments (m3/m2^1.5, m4/m2^2,
    non-excess); zero-variance columns define both as 0.
    """
    mean = x.mean(axis=0)
    centered = x - mean
    m2 = np.mean(centered ** 2, axis=0)
    m3 = np.mean(centered ** 3, axis=0)
    m4 = np.mean(centered ** 4, axis=0)
    safe = m2 > 0
    skew = np.zeros_like(m2)
    kurt = np.zeros_like(m2)
    skew[safe] = m3[safe] / m2[safe] ** 1.5
    kurt[safe] = m4[safe] / m2[safe] ** 2
    q25, q75 = np.percentile(x, [25, 75], axis=0)
    return np.column_stack([
        mean,
        x.max(axis=0),
        x.min(axis=0),
        np.mean(np.abs(centered), axis=0),
        q75 - q25,
        np.sqrt(np.mean(x ** 2, axis=0)),
        skew,
        kurt,
    ])


def extract_stats(win: Window) -> np.ndarray:
    """480-dim feature vector of one window (for 30 subcarriers)."""
    if win.amplitudes.shape[0] == 0 or win.phase_diffs.shape[0] == 0:
        raise BodyauthError("empty window")
    blocks = [_stat_block(win.amplitudes), _stat_block(win.phase_diffs)]
    vec = np.concatenate([b.ravel() for b in blocks])
    if not np.all(np.isfinite(vec)):
        raise BodyauthError("non-finite feature value")
    return vec


def feature_matrix(series: ProcessedSeries, window_s: float = 1.0) -> np.ndarray:
    """Stack extract_stats over all windows -> (n_windows, 8*S*2)."""
    return np.array([extract_stats(w) for w in window(series, window_s)])


class PcaReducer(BaseEstimator, TransformerMixin):
    """PCA keeping the smallest component count whose cumulative variance
    fraction reaches ``retain``; deterministic sign convention (the
    largest-magnitude entry of each component is positive)."""

    def __init__(self, retain: float = 0.90):
        self.retain = retain

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[0] < 2:
            raise BodyauthError("PCA needs at least 2 samples")
        self.mean_ = X.mean(axis=0)
        centered = X - self.mean_
        _, s, vt = np.linalg.svd(centered, full_matrices=False)
        variances = s ** 2 / (X.shape[0] - 1)
        total = variances.sum()
        if total <= 0:
            raise BodyauthError("all-constant data: no principal components")
        rank_tol = s[0] * max(X.shape) * np.finfo(float).eps
        rank = int(np.sum(s > rank_tol))
        cumulative = np.cumsum(variances) / total
        k = int(np.searchsorted(cumulative, self.retain - 1e-12) + 1)
        k = min(max(k, 1), rank)
        components = vt[:k].copy()
        for row in components:
            if row[np.argmax(np.abs(row))] < 0:
                row *= -1
        self.components_ = components
        self.variances_ = variances[:k]
        self.n_components_ = k
        return self

    def transform(self, X):
        if not hasattr(self, "components_"):
            raise NotFittedError("PcaReducer is not fitted")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.mean_.shape[0]:
            raise BodyauthError(
                f"dimension mismatch: expected {self.mean_.shape[0]}, got {X.shape[1]}"
            )
        return (X - self.mean_) @ self.components_.T


class RangeNormalizer(BaseEstimator, TransformerMixin):
    """Per-dimension affine map sending the fitted [min, max] to [-1, +1];
    zero-range dimensions map to 0 and out-of-range values clamp."""

    def fit(self, X, y=None):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[0] < 1:
            raise BodyauthError("normalizer needs at least 1 sample")
        self.min_ = X.min(axis=0)
        self.max_ = X.max(axis=0)
        return self

    def transform(self, X):
        if not hasattr(self, "min_"):
            raise NotFittedError("RangeNormalizer is not fitted")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        span = self.max_ - self.min_
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(span > 0, 2 * (X - self.min_) / span - 1, 0.0)
        return np.clip(out, -1.0, 1.0)
