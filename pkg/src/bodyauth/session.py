"""Streaming session state machine: login -> registration recording ->
periodic continuous authentication -> lock on mismatch.

States move only along Locked -> Registering -> Monitoring -> Locked.
Frames are ignored while Locked; no frame sequence alone can unlock.

Event stream format (one line per event): ``ts_us EVENT detail`` with
EVENT in {REGISTERED, AUTH_OK, LOCKED_OUT, WARN}.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import numpy as np

from .csi import CsiFrame, CsiSeries
from .errors import BodyauthError
from .features import feature_matrix
from .matcher import GaussianPeriodAuthenticator, register
from .pipeline import FilterSpec, sanitize

logger = logging.getLogger(__name__)


class Phase(enum.Enum):
    LOCKED = "Locked"
    REGISTERING = "Registering"
    MONITORING = "Monitoring"


@dataclass(frozen=True)
class SessionConfig:
    t: int = 4
    period_secs: float = 30.0
    auth_interval_s: float = 300.0
    rate_hz: float = 50.0
    filter_order: int = 5
    filter_cutoff_hz: float = 1.0
    update_enabled: bool = True
    retain: float = 0.90
    max_gap_s: float = 1.0

    def __post_init__(self):
        if self.t < 1:
            raise BodyauthError("t must be >= 1")
        if self.auth_interval_s < 2.0:  # two one-second windows minimum
            raise BodyauthError("auth_interval_s must cover at least two windows")

    @property
    def filter_spec(self) -> FilterSpec:
        return FilterSpec(order=self.filter_order, cutoff_hz=self.filter_cutoff_hz,
                          rate_hz=self.rate_hz)

    @property
    def registration_frames(self) -> int:
        return int(round(self.t * self.period_secs * self.rate_hz))


@dataclass(frozen=True)
class Event:
    ts_us: int
    kind: str  # REGISTERED | AUTH_OK | LOCKED_OUT | WARN
    detail: str = ""

    def format(self) -> str:
        return f"{self.ts_us} {self.kind} {self.detail}".rstrip()


class Session:
    """Single-owner state machine; ``profile`` is swapped atomically on
    update so concurrent readers only ever see a complete profile."""

    def __init__(self, config: SessionConfig | None = None):
        self.config = config or SessionConfig()
        self.phase = Phase.LOCKED
        self.profile: GaussianPeriodAuthenticator | None = None
        self.dropped_frames = 0
        self._buffer_ts: list[int] = []
        self._buffer_amp: list[np.ndarray] = []
        self._buffer_ph: list[np.ndarray] = []
        self._last_ts: int | None = None
        self.next_auth_deadline_us: int | None = None

    def _clear_buffer(self):
        self._buffer_ts.clear()
        self._buffer_amp.clear()
        self._buffer_ph.clear()

    def _buffer_series(self) -> CsiSeries:
        return CsiSeries(np.array(self._buffer_ts, dtype=np.int64),
                         np.array(self._buffer_amp), np.array(self._buffer_ph),
                         rate_hz=self.config.rate_hz)

    def on_primary_login(self, ts_us: int = 0) -> list[Event]:
        if self.phase == Phase.MONITORING:
            logger.warning("login event ignored while Monitoring")
            return [Event(ts_us, "WARN", "login ignored: already monitoring")]
        if self.phase == Phase.REGISTERING:
            logger.warning("login during registration: restarting")
        self.phase = Phase.REGISTERING
        self.profile = None
        self._clear_buffer()
        self._last_ts = None
        self.next_auth_deadline_us = None
        return []

    def ingest_frame(self, frame: CsiFrame) -> list[Event]:
        if self.phase == Phase.LOCKED:
            self.dropped_frames += 1
            return []
        if self._last_ts is not None and frame.timestamp_us < self._last_ts:
            self.dropped_frames += 1
            return []
        events: list[Event] = []
        gap_us = int(self.config.max_gap_s * 1e6)
        if (self.phase == Phase.REGISTERING and self._last_ts is not None
                and frame.timestamp_us - self._last_ts > gap_us):
            self._clear_buffer()
            events.append(Event(frame.timestamp_us, "WARN", "frame gap: registration restarted"))
        self._last_ts = frame.timestamp_us
        self._buffer_ts.append(frame.timestamp_us)
        self._buffer_amp.append(frame.amplitudes)
        self._buffer_ph.append(frame.phases)

        if self.phase == Phase.REGISTERING and len(self._buffer_ts) >= self.config.registration_frames:
            events.extend(self._finish_registration())
        elif self.phase == Phase.MONITORING:
            # rolling window: keep a little more than one auth interval
            keep = int(round(1.5 * self.config.auth_interval_s * self.config.rate_hz))
            if len(self._buffer_ts) > keep:
                drop = len(self._buffer_ts) - keep
                del self._buffer_ts[:drop], self._buffer_amp[:drop], self._buffer_ph[:drop]
        return events

    def _finish_registration(self) -> list[Event]:
        series = self._buffer_series()
        raw = feature_matrix(sanitize(series, self.config.filter_spec))
        per_period = int(self.config.period_secs)
        periods = [raw[i * per_period:(i + 1) * per_period] for i in range(self.config.t)]
        self.profile = register(periods, retain=self.config.retain,
                                period_secs=self.config.period_secs)
        self.phase = Phase.MONITORING
        ts = self._buffer_ts[-1]
        self.next_auth_deadline_us = ts + int(self.config.auth_interval_s * 1e6)
        self._clear_buffer()
        return [Event(ts, "REGISTERED", f"t={self.config.t} periods")]

    def tick(self, now_us: int) -> list[Event]:
        if self.phase != Phase.MONITORING or now_us < self.next_auth_deadline_us:
            return []
        needed = int(round(self.config.auth_interval_s * self.config.rate_hz))
        if len(self._buffer_ts) < needed:
            logger.warning("authentication deferred: %d/%d frames buffered",
                           len(self._buffer_ts), needed)
            return [Event(now_us, "WARN", "auth deferred: insufficient frames")]
        series = self._buffer_series().slice(len(self._buffer_ts) - needed, len(self._buffer_ts))
        raw = feature_matrix(sanitize(series, self.config.filter_spec))
        accepted = self.profile.predict(raw)
        passed = int(accepted.sum()) * 2 > accepted.size
        if passed:
            if self.config.update_enabled:
                self.profile = self.profile.update(raw)
            self.next_auth_deadline_us = now_us + int(self.config.auth_interval_s * 1e6)
            self._clear_buffer()
            return [Event(now_us, "AUTH_OK",
                          f"windows={accepted.size} accepted={int(accepted.sum())}")]
        self.phase = Phase.LOCKED
        self.profile = None
        self._clear_buffer()
        self.next_auth_deadline_us = None
        return [Event(now_us, "LOCKED_OUT",
                      f"windows={accepted.size} accepted={int(accepted.sum())}")]

    def run_stream(self, series: CsiSeries, login_ts_us: int | None = None) -> list[Event]:
        """Replay a recorded frame stream: login at the first frame, then
        ingest and tick in timestamp order."""
        events: list[Event] = []
        if login_ts_us is None:
            login_ts_us = int(series.timestamps_us[0])
        events.extend(self.on_primary_login(login_ts_us))
        for i in range(series.n_frames):
            frame = series.frame(i)
            events.extend(self.ingest_frame(frame))
            if self.phase == Phase.MONITORING:
                events.extend(self.tick(frame.timestamp_us))
            if self.phase == Phase.LOCKED:
                break
        if self.phase == Phase.REGISTERING:
            events.append(Event(self._last_ts or login_ts_us, "WARN",
                                "stream ended mid-registration"))
        return events
