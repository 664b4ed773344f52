"""CSI frame containers and the CSI CSV interchange format.

CSV contract: header ``ts_us,a1..aS,p1..pS`` (literally ``a1,a2,...``),
one row per frame, amplitudes non-negative decimals, phases in radians,
UTF-8 with LF line endings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FormatError


@dataclass(frozen=True)
class CsiFrame:
    timestamp_us: int
    amplitudes: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=float)
        ph = np.asarray(self.phases, dtype=float)
        if amp.shape != ph.shape or amp.ndim != 1:
            raise FormatError("amplitude and phase arrays must be 1-D and equally long")
        object.__setattr__(self, "amplitudes", amp)
        object.__setattr__(self, "phases", ph)


@dataclass(frozen=True)
class CsiSeries:
    """Packet-rate CSI samples: shape (frames, subcarriers)."""

    timestamps_us: np.ndarray
    amplitudes: np.ndarray
    phases: np.ndarray
    rate_hz: float = 50.0

    def __post_init__(self):
        ts = np.asarray(self.timestamps_us, dtype=np.int64)
        amp = np.asarray(self.amplitudes, dtype=float)
        ph = np.asarray(self.phases, dtype=float)
        if amp.shape != ph.shape or amp.ndim != 2:
            raise FormatError("amplitudes and phases must be 2-D with equal shape")
        if ts.shape != (amp.shape[0],):
            raise FormatError("timestamp count must match the frame count")
        if ts.size > 1 and np.any(np.diff(ts) <= 0):
            raise FormatError("timestamps must strictly increase")
        object.__setattr__(self, "timestamps_us", ts)
        object.__setattr__(self, "amplitudes", amp)
        object.__setattr__(self, "phases", ph)

    @property
    def n_frames(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def n_subcarriers(self) -> int:
        return self.amplitudes.shape[1]

    def frame(self, i: int) -> CsiFrame:
        return CsiFrame(int(self.timestamps_us[i]), self.amplitudes[i], self.phases[i])

    def slice(self, start: int, stop: int) -> "CsiSeries":
        return CsiSeries(self.timestamps_us[start:stop], self.amplitudes[start:stop],
                         self.phases[start:stop], self.rate_hz)


def csv_header(n_subcarriers: int) -> str:
    amps = ",".join(f"a{i}" for i in range(1, n_subcarriers + 1))
    phs = ",".join(f"p{i}" for i in range(1, n_subcarriers + 1))
    return f"ts_us,{amps},{phs}"


def write_csv(series: CsiSeries, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(csv_header(series.n_subcarriers) + "\n")
        for i in range(series.n_frames):
            amp = ",".join(repr(v) for v in series.amplitudes[i].tolist())
            ph = ",".join(repr(v) for v in series.phases[i].tolist())
            fh.write(f"{int(series.timestamps_us[i])},{amp},{ph}\n")


def read_csv(path, rate_hz: float = 50.0) -> CsiSeries:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if not header.startswith("ts_us,"):
            raise FormatError(f"{path}: missing ts_us header")
        cols = header.split(",")
        if (len(cols) - 1) % 2 != 0:
            raise FormatError(f"{path}: header must hold equal amplitude/phase columns")
        n_sub = (len(cols) - 1) // 2
        if cols != csv_header(n_sub).split(","):
            raise FormatError(f"{path}: unexpected header {header!r}")
        timestamps, amps, phases = [], [], []
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 1 + 2 * n_sub:
                raise FormatError(
                    f"{path}:{lineno}: expected {1 + 2 * n_sub} columns, got {len(parts)}"
                )
            try:
                timestamps.append(int(parts[0]))
                row = [float(v) for v in parts[1:]]
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from exc
            if any(v < 0 for v in row[:n_sub]):
                raise FormatError(f"{path}:{lineno}: negative amplitude")
            amps.append(row[:n_sub])
            phases.append(row[n_sub:])
    if not timestamps:
        raise FormatError(f"{path}: no data rows")
    return CsiSeries(np.array(timestamps, dtype=np.int64), np.array(amps),
                     np.array(phases), rate_hz=rate_hz)
