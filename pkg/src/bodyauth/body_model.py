"""Electromagnetic body model and synthetic CSI generation.

The human torso is abstracted as concentric tissue circles. A reflected
signal copy picks up per-layer power decay and a propagation delay set by
each layer's permittivity/permeability; together with free-space decay over
the transmitter-body and body-receiver legs this yields one complex channel
coefficient per body. Summing the line-of-sight term and all body terms per
subcarrier gives the channel vector H, from which noisy per-packet CSI
frames are synthesized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .csi import CsiSeries
from .errors import BodyauthError, GeometryError

SPEED_OF_LIGHT = 299792458.0
MU0 = 4e-7 * math.pi
EPS0 = 8.8541878128e-12


@dataclass(frozen=True)
class TissueLayer:
    name: str
    radius_m: float
    rel_permittivity: float
    rel_permeability: float
    decay_c: float

    def __post_init__(self):
        if not (self.radius_m > 0):
            raise BodyauthError(f"layer {self.name!r}: radius must be > 0")
        if not (self.rel_permittivity >= 1):
            raise BodyauthError(f"layer {self.name!r}: rel_permittivity must be >= 1")
        if not (self.rel_permeability > 0):
            raise BodyauthError(f"layer {self.name!r}: rel_permeability must be > 0")
        if not (0 < self.decay_c <= 1):
            raise BodyauthError(f"layer {self.name!r}: decay_c must be in (0, 1]")


@dataclass(frozen=True)
class BodyProfile:
    """Ordered tissue layers, innermost first; n = 0 is a transparent body."""

    layers: tuple[TissueLayer, ...]
    label: str = "subject"

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        radii = [layer.radius_m for layer in self.layers]
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise BodyauthError(f"body {self.label!r}: radii must strictly increase")

    @property
    def n_layers(self) -> int:
        return len(self.layers)

    @property
    def outer_radius_m(self) -> float:
        return self.layers[-1].radius_m if self.layers else 0.0


@dataclass(frozen=True)
class PathGeometry:
    l1_m: float
    l2_m: float
    offset_b_m: float
    in_lengths_m: tuple[float, ...]
    out_lengths_m: tuple[float, ...]

    def __post_init__(self):
        if not (self.l1_m > 0 and self.l2_m > 0):
            raise BodyauthError("l1_m and l2_m must be > 0")
        if self.offset_b_m < 0:
            raise BodyauthError("offset_b_m must be >= 0")
        if any(d < 0 for d in self.in_lengths_m) or any(d < 0 for d in self.out_lengths_m):
            raise BodyauthError("path lengths must be >= 0")
        object.__setattr__(self, "in_lengths_m", tuple(self.in_lengths_m))
        object.__setattr__(self, "out_lengths_m", tuple(self.out_lengths_m))


@dataclass(frozen=True)
class AirConstants:
    mu0: float = MU0
    eps0: float = EPS0
    decay_exponent: float = 1.0  # amplitude decay (lambda / 4 pi l) ** exponent

    def __post_init__(self):
        c = 1.0 / math.sqrt(self.mu0 * self.eps0)
        if abs(c - SPEED_OF_LIGHT) / SPEED_OF_LIGHT > 1e-6:
            raise BodyauthError("mu0/eps0 inconsistent with the speed of light")


@dataclass(frozen=True)
class NoiseModel:
    sigma_s: float = 0.0
    sigma_b: float = 0.0
    sigma_m: float = 0.0
    cfo_delta_t: float = 0.0
    amp_jitter_sigma: float = 0.0
    motion_amp: float = 0.0
    motion_freq_hz: float = 0.3

    def __post_init__(self):
        for name in ("sigma_s", "sigma_b", "sigma_m", "amp_jitter_sigma"):
            if getattr(self, name) < 0:
                raise BodyauthError(f"{name} must be >= 0")
        if not (self.motion_freq_hz < 1.0):
            raise BodyauthError("motion_freq_hz must stay below 1 Hz")


def default_subcarrier_offsets(count: int = 30, bandwidth_hz: float = 20e6) -> np.ndarray:
    """Evenly spaced subcarrier offsets spanning the channel bandwidth."""
    if count < 1:
        raise BodyauthError("subcarrier count must be >= 1")
    if count == 1:
        return np.zeros(1)
    return np.linspace(-bandwidth_hz / 2, bandwidth_hz / 2, count)


@dataclass(frozen=True)
class Scene:
    bodies: tuple[tuple[BodyProfile, PathGeometry], ...]
    los_path_m: float = 3.0
    carrier_hz: float = 5e9
    subcarrier_offsets_hz: np.ndarray = field(
        default_factory=default_subcarrier_offsets
    )
    rate_hz: float = 50.0
    noise: NoiseModel = field(default_factory=NoiseModel)
    air: AirConstants = field(default_factory=AirConstants)
    seed: int = 0
    rx_gain: float = 2e4  # reported-amplitude scale, mimics CSI tool units



    def __post_init__(self):
        object.__setattr__(self, "bodies", tuple(self.bodies))
        offsets = np.asarray(self.subcarrier_offsets_hz, dtype=float)
        if offsets.size < 1:
            raise BodyauthError("at least one subcarrier offset is required")
        object.__setattr__(self, "subcarrier_offsets_hz", offsets)
        if self.los_path_m <= 0:
            raise BodyauthError("los_path_m must be > 0")
        if self.rate_hz <= 0:
            raise BodyauthError("rate_hz must be > 0")

    @property
    def subcarrier_freqs_hz(self) -> np.ndarray:
        return self.carrier_hz + self.subcarrier_offsets_hz


def default_body_profile(label: str = "subject", radius_scale: float = 1.0,
                         permittivity_scale: float = 1.0) -> BodyProfile:
    """Six-layer torso profile with placeholder tissue constants.

    The per-tissue values are configurable defaults, not measured ground
    truth; scale knobs give a cheap way to synthesize distinct subjects.
    """
    base = [
        ("bone", 0.050, 12.0, 1.0, 0.90),
        ("viscera", 0.100, 50.0, 1.0, 0.70),
        ("visceral_fat", 0.120, 5.5, 1.0, 0.88),
        ("muscle", 0.150, 52.0, 1.0, 0.60),
        ("subcutaneous_fat", 0.170, 5.5, 1.0, 0.90),
        ("skin", 0.180, 38.0, 1.0, 0.80),
    ]
    layers = [
        TissueLayer(name, r * radius_scale, max(1.0, eps * permittivity_scale), mu, c)
        for name, r, eps, mu, c in base
    ]
    return BodyProfile(layers=tuple(layers), label=label)


def transmit_sample(amplitude: float, freq_hz: float, phase0: float, t: float) -> complex:
    """Complex baseband sample A * exp(-j 2 pi f t + j phi0)."""
    for v in (amplitude, freq_hz, phase0, t):
        if not math.isfinite(v):
            raise BodyauthError("non-finite input to transmit_sample")
    if amplitude <= 0 or freq_hz <= 0:
        raise BodyauthError("amplitude and frequency must be > 0")
    return amplitude * complex(math.cos(-2 * math.pi * freq_hz * t + phase0),
                               math.sin(-2 * math.pi * freq_hz * t + phase0))


def derive_path_lengths(profile: BodyProfile, offset_b_m: float) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Chord-segment lengths through each tissue layer for a straight ray.

    Layer i spans the annulus between radii r_{i-1} and r_i; a ray at
    perpendicular offset b crosses it twice (entry and exit side).
    """
    if profile.n_layers == 0:
        return (), ()
    if offset_b_m >= profile.outer_radius_m:
        raise GeometryError(
            f"ray misses body: offset {offset_b_m} >= outer radius {profile.outer_radius_m}"
        )
    b2 = offset_b_m * offset_b_m
    half = [math.sqrt(max(layer.radius_m ** 2 - b2, 0.0)) for layer in profile.layers]
    lengths = [half[0]] + [half[i] - half[i - 1] for i in range(1, len(half))]
    return tuple(lengths), tuple(lengths)


def body_coefficient(profile: BodyProfile, geometry: PathGeometry, freq_hz: float,
                     air: AirConstants = AirConstants()) -> complex:
    """Per-body complex channel factor: product of layer decays times the
    phase accrued over the in-body path at each layer's propagation speed."""
    if len(geometry.in_lengths_m) != profile.n_layers or len(geometry.out_lengths_m) != profile.n_layers:
        raise BodyauthError("path-length vectors must match the layer count")
    decay = 1.0
    delay = 0.0
    for layer, d_in, d_out in zip(profile.layers, geometry.in_lengths_m, geometry.out_lengths_m):
        decay *= layer.decay_c
        speed_inv = math.sqrt(layer.rel_permeability * air.mu0 * layer.rel_permittivity * air.eps0)
        delay += (d_in + d_out) * speed_inv
    phase = -2 * math.pi * freq_hz * delay
    return decay * complex(math.cos(phase), math.sin(phase))


def free_space_coefficient(distance_m: float, freq_hz: float,
                           air: AirConstants = AirConstants()) -> complex:
    """One free-space leg: Friis amplitude decay lambda/(4 pi l) and the
    air propagation phase."""
    if distance_m <= 0:
        raise BodyauthError("zero or negative distance gives a singular decay")
    wavelength = SPEED_OF_LIGHT / freq_hz
    amp = (wavelength / (4 * math.pi * distance_m)) ** air.decay_exponent
    phase = -2 * math.pi * freq_hz * distance_m * math.sqrt(air.mu0 * air.eps0)
    return amp * complex(math.cos(phase), math.sin(phase))


def air_coefficient(l1_m: float, l2_m: float, freq_hz: float,
                    air: AirConstants = AirConstants()) -> complex:
    """Two-leg air factor c1 * c2 for the transmitter-body-receiver path."""
    return free_space_coefficient(l1_m, freq_hz, air) * free_space_coefficient(l2_m, freq_hz, air)


def channel_response(scene: Scene) -> np.ndarray:
    """Per-subcarrier complex channel vector H: line-of-sight term plus one
    additive reflected copy per body."""
    freqs = scene.subcarrier_freqs_hz
    h = np.array([free_space_coefficient(scene.los_path_m, f, scene.air) for f in freqs],
                 dtype=complex)
    for profile, geometry in scene.bodies:
        for k, f in enumerate(freqs):
            h[k] += air_coefficient(geometry.l1_m, geometry.l2_m, f, scene.air) * \
                body_coefficient(profile, geometry, f, scene.air)
    return h


def synthesize_csi(scene: Scene, duration_s: float) -> CsiSeries:
    """Emit duration * rate noisy CSI frames for a static scene.

    Per frame: amplitude = |H_k| * (1 + jitter) * (1 + motion modulation);
    phase = arg(H_k) + Gaussian offsets + a deterministic CFO ramp of
    2 pi f_k cfo_delta_t per second. Deterministic under a fixed seed.
    """
    if duration_s <= 0:
        raise BodyauthError("duration_s must be > 0")
    n_frames = int(round(duration_s * scene.rate_hz))
    h = channel_response(scene)
    freqs = scene.subcarrier_freqs_hz
    n_sub = freqs.size
    rng = np.random.default_rng(scene.seed)
    noise = scene.noise

    t = np.arange(n_frames) / scene.rate_hz
    base_amp = scene.rx_gain * np.abs(h)[None, :]
    base_phase = np.angle(h)[None, :]

    jitter = noise.amp_jitter_sigma * rng.standard_normal((n_frames, n_sub)) \
        if noise.amp_jitter_sigma > 0 else 0.0
    motion = noise.motion_amp * np.sin(2 * np.pi * noise.motion_freq_hz * t)[:, None] \
        if noise.motion_amp > 0 else 0.0
    amplitudes = base_amp * (1.0 + jitter) * (1.0 + motion)
    amplitudes = np.ascontiguousarray(
        np.broadcast_to(np.maximum(amplitudes, 0.0), (n_frames, n_sub)))

    # sampling/packet-boundary offsets are per packet, shared by subcarriers;
    # measurement error is drawn per subcarrier
    packet_offset = np.zeros((n_frames, 1))
    if noise.sigma_s > 0:
        packet_offset = packet_offset + noise.sigma_s * rng.standard_normal((n_frames, 1))
    if noise.sigma_b > 0:
        packet_offset = packet_offset + noise.sigma_b * rng.standard_normal((n_frames, 1))
    meas = noise.sigma_m * rng.standard_normal((n_frames, n_sub)) if noise.sigma_m > 0 else 0.0
    cfo = 2 * np.pi * noise.cfo_delta_t * np.outer(t, freqs)
    phases = np.ascontiguousarray(
        np.broadcast_to(base_phase + packet_offset + meas + cfo, (n_frames, n_sub)))

    timestamps = np.round(t * 1e6).astype(np.int64)
    return CsiSeries(timestamps_us=timestamps, amplitudes=amplitudes,
                     phases=phases, rate_hz=scene.rate_hz)
