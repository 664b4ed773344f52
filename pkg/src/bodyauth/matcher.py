"""Multi-period Gaussian matching with per-period thresholds and an OR
decision.

Registration splits the recorded features into t periods (default 4 x 30 s).
Each period becomes a diagonal Gaussian model; a sample's score against a
period is the geometric mean of the per-dimension densities, and its
threshold is set so that 90% of the period's own registration samples pass.
A new sample is accepted if it clears any period's threshold.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .errors import BodyauthError, FormatError
from .features import PcaReducer, RangeNormalizer

logger = logging.getLogger(__name__)

MIN_PERIOD_SAMPLES = 10
VARIANCE_FLOOR = 1e-6


@dataclass(frozen=True)
class PeriodModel:
    mean: np.ndarray
    variance: np.ndarray
    threshold: float
    sample_count: int

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        var = np.asarray(self.variance, dtype=float)
        if mean.shape != var.shape or mean.ndim != 1:
            raise BodyauthError("mean and variance must be 1-D and equally long")
        if np.any(var <= 0):
            raise BodyauthError("variances must be positive (floored at epsilon)")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "variance", var)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


def log_score(period: PeriodModel, samples: np.ndarray) -> np.ndarray:
    """Log of the geometric-mean Gaussian density, one value per sample."""
    x = np.atleast_2d(np.asarray(samples, dtype=float))
    if x.shape[1] != period.dim:
        raise BodyauthError(f"dimension mismatch: expected {period.dim}, got {x.shape[1]}")
    var = period.variance
    per_dim = -0.5 * np.log(2 * np.pi * var) - (x - period.mean) ** 2 / (2 * var)
    return per_dim.mean(axis=1)


def score(period: PeriodModel, sample: np.ndarray) -> float:
    """Geometric mean of per-dimension Gaussian densities, in linear domain."""
    return float(np.exp(log_score(period, sample)[0]))


def fit_period(samples: np.ndarray, variance_floor: float = VARIANCE_FLOOR) -> PeriodModel:
    """Per-dimension mean/variance plus the 90th-percentile self-score
    threshold (the ceil(0.9 n)-th largest self-score, inclusive)."""
    x = np.atleast_2d(np.asarray(samples, dtype=float))
    n = x.shape[0]
    if n < MIN_PERIOD_SAMPLES:
        raise BodyauthError(f"need >= {MIN_PERIOD_SAMPLES} samples per period, got {n}")
    mean = x.mean(axis=0)
    variance = np.maximum(x.var(axis=0), variance_floor)
    model = PeriodModel(mean=mean, variance=variance, threshold=0.0, sample_count=n)
    self_scores = np.sort(np.exp(log_score(model, x)))[::-1]
    threshold = float(self_scores[math.ceil(0.9 * n) - 1])
    return PeriodModel(mean=mean, variance=variance, threshold=threshold, sample_count=n)


@dataclass(frozen=True)
class AuthDecision:
    accepted: bool
    per_period_scores: tuple[float, ...]
    best_period: int


class GaussianPeriodAuthenticator(BaseEstimator):
    """Estimator-shaped matcher: fit on raw feature rows labeled by
    registration period, predict per-sample accept/reject.

    The PCA basis and normalizer are fitted once on the union of all
    registration periods and then frozen; period models live in the
    transformed space.
    """

    def __init__(self, retain: float = 0.90, variance_floor: float = VARIANCE_FLOOR,
                 period_secs: float = 30.0):
        self.retain = retain
        self.variance_floor = variance_floor
        self.period_secs = period_secs

    def fit(self, X, y):
        """X: (n, d) raw feature rows; y: integer period label per row."""
        X = np.asarray(X, dtype=float)
        y = np.asarray(y)
        labels = sorted(set(y.tolist()))
        if not labels:
            raise BodyauthError("no registration periods")
        self.pca_ = PcaReducer(retain=self.retain).fit(X)
        reduced = self.pca_.transform(X)
        self.normalizer_ = RangeNormalizer().fit(reduced)
        transformed = self.normalizer_.transform(reduced)
        self.periods_ = tuple(
            fit_period(transformed[y == label], self.variance_floor) for label in labels
        )
        self.created_at_ = time.time()
        return self

    @property
    def t(self) -> int:
        return len(self.periods_)

    def _check_fitted(self):
        if not hasattr(self, "periods_"):
            raise BodyauthError("authenticator is not fitted")

    def transform(self, X) -> np.ndarray:
        self._check_fitted()
        return self.normalizer_.transform(self.pca_.transform(np.atleast_2d(X)))

    def decide(self, raw_sample: np.ndarray) -> AuthDecision:
        """Full decision for one raw feature vector: accepted iff the score
        clears any period's threshold (logical OR)."""
        self._check_fitted()
        s = self.transform(raw_sample)[0]
        scores, margins = [], []
        for period in self.periods_:
            value = float(np.exp(log_score(period, s)[0]))
            scores.append(value)
            margins.append(math.log(max(value, 1e-300)) - math.log(max(period.threshold, 1e-300)))
        best = int(np.argmax(margins))
        accepted = any(v >= p.threshold for v, p in zip(scores, self.periods_))
        return AuthDecision(accepted=accepted, per_period_scores=tuple(scores), best_period=best)

    def predict(self, X) -> np.ndarray:
        """Vectorized accept/reject over raw feature rows."""
        self._check_fitted()
        transformed = self.transform(X)
        accepted = np.zeros(transformed.shape[0], dtype=bool)
        for period in self.periods_:
            accepted |= np.exp(log_score(period, transformed)) >= period.threshold
        return accepted

    def update(self, latest_raw_samples: np.ndarray) -> "GaussianPeriodAuthenticator":
        """New authenticator with the oldest period replaced by a model of
        the latest samples; PCA/normalizer stay frozen. Returns self
        unchanged (with a warning) when the sample count is insufficient."""
        self._check_fitted()
        latest = np.atleast_2d(np.asarray(latest_raw_samples, dtype=float))
        if latest.shape[0] < MIN_PERIOD_SAMPLES:
            logger.warning("update skipped: %d samples < %d", latest.shape[0], MIN_PERIOD_SAMPLES)
            return self
        new_period = fit_period(self.transform(latest), self.variance_floor)
        clone = GaussianPeriodAuthenticator(retain=self.retain,
                                            variance_floor=self.variance_floor,
                                            period_secs=self.period_secs)
        clone.pca_ = self.pca_
        clone.normalizer_ = self.normalizer_
        clone.periods_ = tuple(self.periods_[1:]) + (new_period,)
        clone.created_at_ = self.created_at_
        return clone

    def to_dict(self) -> dict:
        self._check_fitted()
        return {
            "t": self.t,
            "period_secs": self.period_secs,
            "retain": self.retain,
            "variance_floor": self.variance_floor,
            "created_at": self.created_at_,
            "pca": {
                "mean": self.pca_.mean_.tolist(),
                "basis": self.pca_.components_.tolist(),
                "variances": self.pca_.variances_.tolist(),
            },
            "normalizer": {
                "min": self.normalizer_.min_.tolist(),
                "max": self.normalizer_.max_.tolist(),
            },
            "periods": [
                {
                    "mean": p.mean.tolist(),
                    "variance": p.variance.tolist(),
                    "threshold": p.threshold,
                    "sample_count": p.sample_count,
                }
                for p in self.periods_
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "GaussianPeriodAuthenticator":
        try:
            auth = cls(retain=doc["retain"], variance_floor=doc["variance_floor"],
                       period_secs=doc["period_secs"])
            pca = PcaReducer(retain=doc["retain"])
            pca.mean_ = np.array(doc["pca"]["mean"], dtype=float)
            pca.components_ = np.array(doc["pca"]["basis"], dtype=float)
            pca.variances_ = np.array(doc["pca"]["variances"], dtype=float)
            pca.n_components_ = pca.components_.shape[0]
            norm = RangeNormalizer()
            norm.min_ = np.array(doc["normalizer"]["min"], dtype=float)
            norm.max_ = np.array(doc["normalizer"]["max"], dtype=float)
            auth.pca_ = pca
            auth.normalizer_ = norm
            auth.periods_ = tuple(
                PeriodModel(mean=np.array(p["mean"], dtype=float),
                            variance=np.array(p["variance"], dtype=float),
                            threshold=float(p["threshold"]),
                            sample_count=int(p["sample_count"]))
                for p in doc["periods"]
            )
            auth.created_at_ = float(doc["created_at"])
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed profile document: {exc}") from exc
        return auth


def register(period_samples: list[np.ndarray], retain: float = 0.90,
             period_secs: float = 30.0) -> GaussianPeriodAuthenticator:
    """Fit the authenticator from t lists of raw feature vectors."""
    if not period_samples:
        raise BodyauthError("need at least one registration period")
    X = np.concatenate([np.atleast_2d(np.asarray(p, dtype=float)) for p in period_samples])
    y = np.concatenate([
        np.full(np.atleast_2d(np.asarray(p)).shape[0], i)
        for i, p in enumerate(period_samples)
    ])
    return GaussianPeriodAuthenticator(retain=retain, period_secs=period_secs).fit(X, y)


def authenticate(auth: GaussianPeriodAuthenticator, raw_sample: np.ndarray) -> AuthDecision:
    return auth.decide(raw_sample)
