"""Evaluation metrics and the multi-subject evaluation harness.

Three headline numbers over a cohort of subjects monitored for a fixed
horizon with authentication every few minutes:

* mean interruption interval (minutes until the first wrongful lockout),
* mean authentication accuracy ((t - base) / t per subject, 100% if never
  interrupted),
* mean defending precision (1 minus the mean off-diagonal wrongful-accept
  rate of the subject-vs-adversary confusion matrix).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .csi import CsiSeries
from .errors import BodyauthError
from .features import feature_matrix
from .matcher import GaussianPeriodAuthenticator, register
from .pipeline import FilterSpec, sanitize


@dataclass(frozen=True)
class InterruptionHistogram:
    """counts[t] = subjects whose first interruption fell at minute t; the
    grid is {interval, 2*interval, ..., horizon}."""

    counts: dict[int, int]
    interval_min: int = 5
    horizon_min: int = 60

    def __post_init__(self):
        grid = self.grid()
        for t in self.counts:
            if t not in grid:
                raise BodyauthError(f"histogram time {t} not on the {self.interval_min}-minute grid")
        if any(c < 0 for c in self.counts.values()):
            raise BodyauthError("histogram counts must be >= 0")

    def grid(self) -> tuple[int, ...]:
        return tuple(range(self.interval_min, self.horizon_min + 1, self.interval_min))

    @property
    def total(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class ConfusionMatrix:
    """values[i, j] = fraction of adversary j's attempts wrongly accepted
    when subject i is registered; the diagonal is unused."""

    values: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise BodyauthError("confusion matrix must be square")
        off = v[~np.eye(v.shape[0], dtype=bool)]
        if off.size and (off.min() < 0 or off.max() > 1):
            raise BodyauthError("off-diagonal entries must lie in [0, 1]")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class EvalReport:
    mii_minutes: float
    maa: float
    mdp: float
    histogram: InterruptionHistogram
    confusion: ConfusionMatrix
    latency_ms: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "mii_minutes": self.mii_minutes,
            "maa": self.maa,
            "mdp": self.mdp,
            "histogram": {str(k): v for k, v in sorted(self.histogram.counts.items())},
            "interval_min": self.histogram.interval_min,
            "horizon_min": self.histogram.horizon_min,
            "confusion": self.confusion.values.tolist(),
            "labels": list(self.confusion.labels),
            "latency_ms": self.latency_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def mean_interruption_interval(h: InterruptionHistogram) -> float:
    """Weighted mean of first-interruption minutes."""
    if h.total == 0:
        raise BodyauthError("empty histogram")
    return sum(n * t for t, n in h.counts.items()) / h.total


def subject_accuracy(first_interruption_min: int, interval_min: int = 5,
                     horizon_min: int = 60) -> float:
    """(t - interval) / t for an interruption at minute t; 1.0 when the
    subject is never interrupted (t = horizon)."""
    grid = range(interval_min, horizon_min + 1, interval_min)
    if first_interruption_min not in grid:
        raise BodyauthError(f"time {first_interruption_min} not on the grid")
    if first_interruption_min == horizon_min:
        return 1.0
    return (first_interruption_min - interval_min) / first_interruption_min


def mean_auth_accuracy(h: InterruptionHistogram) -> float:
    if h.total == 0:
        raise BodyauthError("empty histogram")
    acc = sum(
        n * subject_accuracy(t, h.interval_min, h.horizon_min)
        for t, n in h.counts.items()
    )
    return acc / h.total


def mean_defending_precision(c: ConfusionMatrix) -> float:
    n = c.n
    if n < 2:
        raise BodyauthError("need at least 2 subjects")
    off = c.values[~np.eye(n, dtype=bool)]
    return 1.0 - float(off.sum()) / (n * (n - 1))


@dataclass(frozen=True)
class SubjectData:
    label: str
    registration: CsiSeries
    monitoring: CsiSeries


def _majority_accept(decisions: np.ndarray) -> bool:
    return int(decisions.sum()) * 2 > decisions.size


def _register_subject(subject: SubjectData, t: int, period_secs: float,
                      spec: FilterSpec) -> GaussianPeriodAuthenticator:
    raw = feature_matrix(sanitize(subject.registration, spec))
    per_period = int(period_secs)  # one-second windows -> period_secs samples
    needed = t * per_period
    if raw.shape[0] < needed:
        raise BodyauthError(
            f"{subject.label}: registration covers {raw.shape[0]} s, need {needed} s"
        )
    periods = [raw[i * per_period:(i + 1) * per_period] for i in range(t)]
    return register(periods, period_secs=period_secs)


def run_evaluation(subjects: list[SubjectData], interval_min: int = 5,
                   horizon_min: int = 60, t: int = 4, period_secs: float = 30.0,
                   spec: FilterSpec | None = None) -> EvalReport:
    """Register every subject, monitor them for the horizon with one
    majority-vote decision per interval, and cross-pair every profile
    against every other subject's stream."""
    if len(subjects) < 2:
        raise BodyauthError("need at least 2 subjects")
    if spec is None:
        spec = FilterSpec(rate_hz=subjects[0].monitoring.rate_hz)

    windows_per_interval = interval_min * 60  # one-second windows
    n_intervals = horizon_min // interval_min

    t_filter = t_features = 0.0
    profiles, monitor_features = [], []
    for subject in subjects:
        profiles.append(_register_subject(subject, t, period_secs, spec))
        start = time.perf_counter()
        processed = sanitize(subject.monitoring, spec)
        t_filter += time.perf_counter() - start
        start = time.perf_counter()
        raw = feature_matrix(processed)
        t_features += time.perf_counter() - start
        if raw.shape[0] < windows_per_interval:
            raise BodyauthError(f"{subject.label}: stream shorter than one interval")
        monitor_features.append(raw)

    counts = {}
    t_match = 0.0
    for profile, raw in zip(profiles, monitor_features):
        start = time.perf_counter()
        accepted = profile.predict(raw)
        t_match += time.perf_counter() - start
        first = horizon_min
        for q in range(1, n_intervals + 1):
            chunk = accepted[(q - 1) * windows_per_interval:q * windows_per_interval]
            if chunk.size < windows_per_interval or not _majority_accept(chunk):
                first = q * interval_min
                break
        counts[first] = counts.get(first, 0) + 1

    n = len(subjects)
    confusion = np.zeros((n, n))
    for i, profile in enumerate(profiles):
        for j, raw in enumerate(monitor_features):
            if i == j:
                continue
            accepted = profile.predict(raw)
            wins = sum(
                _majority_accept(accepted[(q - 1) * windows_per_interval:q * windows_per_interval])
                for q in range(1, n_intervals + 1)
            )
            confusion[i, j] = wins / n_intervals

    histogram = InterruptionHistogram(counts=counts, interval_min=interval_min,
                                      horizon_min=horizon_min)
    matrix = ConfusionMatrix(values=confusion, labels=tuple(s.label for s in subjects))
    return EvalReport(
        mii_minutes=mean_interruption_interval(histogram),
        maa=mean_auth_accuracy(histogram),
        mdp=mean_defending_precision(matrix),
        histogram=histogram,
        confusion=matrix,
        latency_ms={
            "filter": 1e3 * t_filter / n,
            "features": 1e3 * t_features / n,
            "match": 1e3 * t_match / n,
        },
    )
