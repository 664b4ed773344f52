"""Strict line-oriented key=value config parsing for scene and session
files.

Scene files use sections [scene], [noise], [body.N] and [layer.N.M]
(N, M counted from 1, innermost layer first); session files use a single
[session] section. Unknown sections or keys are errors with line numbers.
"""

from __future__ import annotations

import re

from .body_model import (AirConstants, BodyProfile, NoiseModel, PathGeometry,
                         Scene, TissueLayer, default_body_profile,
                         default_subcarrier_offsets, derive_path_lengths)
from .errors import ConfigError
from .session import SessionConfig

_SECTION_RE = re.compile(r"^\[([a-z0-9_.]+)\]$")

SCENE_KEYS = {"carrier_hz", "rate_hz", "los_path_m", "seed", "subcarriers", "bandwidth_hz",
              "rx_gain", "decay_exponent"}
NOISE_KEYS = {"sigma_s", "sigma_b", "sigma_m", "cfo_delta_t", "amp_jitter_sigma",
              "motion_amp", "motion_freq_hz"}
BODY_KEYS = {"label", "l1_m", "l2_m", "offset_b_m", "profile"}
LAYER_KEYS = {"name", "radius_m", "rel_permittivity", "rel_permeability", "decay_c"}
SESSION_KEYS = {"t", "period_secs", "auth_interval_s", "rate_hz", "filter_order",
                "filter_cutoff_hz", "update_enabled", "retain", "max_gap_s"}


def _parse_sections(text: str, source: str) -> dict[str, dict[str, tuple[str, int]]]:
    sections: dict[str, dict[str, tuple[str, int]]] = {}
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _SECTION_RE.match(stripped)
        if m:
            current = m.group(1)
            if current in sections:
                raise ConfigError(f"{source}:{lineno}: duplicate section [{current}]")
            sections[current] = {}
            continue
        if current is None:
            raise ConfigError(f"{source}:{lineno}: key outside any section")
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected key=value")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if key in sections[current]:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        sections[current][key] = (value, lineno)
    return sections


def _check_keys(section: str, entries: dict, allowed: set[str], source: str):
    for key, (_, lineno) in entries.items():
        if key not in allowed:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r} in [{section}]")


def _get(entries: dict, key: str, cast, default, source: str):
    if key not in entries:
        return default
    value, lineno = entries[key]
    try:
        if cast is bool:
            if value.lower() not in ("true", "false", "0", "1"):
                raise ValueError(f"expected boolean, got {value!r}")
            return value.lower() in ("true", "1")
        return cast(value)
    except ValueError as exc:
        raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {exc}") from exc


def parse_scene(text: str, source: str = "<scene>", seed: int | None = None) -> Scene:
    sections = _parse_sections(text, source)
    for name in sections:
        if name not in ("scene", "noise") and not re.fullmatch(r"body\.\d+|layer\.\d+\.\d+", name):
            raise ConfigError(f"{source}: unknown section [{name}]")

    scene_sec = sections.get("scene", {})
    _check_keys("scene", scene_sec, SCENE_KEYS, source)
    carrier = _get(scene_sec, "carrier_hz", float, 5e9, source)
    rate = _get(scene_sec, "rate_hz", float, 50.0, source)
    los = _get(scene_sec, "los_path_m", float, 3.0, source)
    file_seed = _get(scene_sec, "seed", int, 0, source)
    count = _get(scene_sec, "subcarriers", int, 30, source)
    bandwidth = _get(scene_sec, "bandwidth_hz", float, 20e6, source)

    noise_sec = sections.get("noise", {})
    _check_keys("noise", noise_sec, NOISE_KEYS, source)
    noise = NoiseModel(
        sigma_s=_get(noise_sec, "sigma_s", float, 0.0, source),
        sigma_b=_get(noise_sec, "sigma_b", float, 0.0, source),
        sigma_m=_get(noise_sec, "sigma_m", float, 0.0, source),
        cfo_delta_t=_get(noise_sec, "cfo_delta_t", float, 0.0, source),
        amp_jitter_sigma=_get(noise_sec, "amp_jitter_sigma", float, 0.0, source),
        motion_amp=_get(noise_sec, "motion_amp", float, 0.0, source),
        motion_freq_hz=_get(noise_sec, "motion_freq_hz", float, 0.3, source),
    )

    bodies = []
    body_ids = sorted(
        int(name.split(".")[1]) for name in sections if name.startswith("body.")
    )
    for bid in body_ids:
        body_sec = sections[f"body.{bid}"]
        _check_keys(f"body.{bid}", body_sec, BODY_KEYS, source)
        label = _get(body_sec, "label", str, f"body{bid}", source)
        layer_ids = sorted(
            int(name.split(".")[2]) for name in sections
            if re.fullmatch(rf"layer\.{bid}\.\d+", name)
        )
        if layer_ids:
            layers = []
            for lid in layer_ids:
                layer_sec = sections[f"layer.{bid}.{lid}"]
                _check_keys(f"layer.{bid}.{lid}", layer_sec, LAYER_KEYS, source)
                layers.append(TissueLayer(
                    name=_get(layer_sec, "name", str, f"layer{lid}", source),
                    radius_m=_get(layer_sec, "radius_m", float, 0.0, source),
                    rel_permittivity=_get(layer_sec, "rel_permittivity", float, 1.0, source),
                    rel_permeability=_get(layer_sec, "rel_permeability", float, 1.0, source),
                    decay_c=_get(layer_sec, "decay_c", float, 1.0, source),
                ))
            profile = BodyProfile(layers=tuple(layers), label=label)
        else:
            profile = default_body_profile(label=label)
        offset = _get(body_sec, "offset_b_m", float, 0.0, source)
        in_len, out_len = derive_path_lengths(profile, offset)
        geometry = PathGeometry(
            l1_m=_get(body_sec, "l1_m", float, 1.5, source),
            l2_m=_get(body_sec, "l2_m", float, 1.5, source),
            offset_b_m=offset,
            in_lengths_m=in_len,
            out_lengths_m=out_len,
        )
        bodies.append((profile, geometry))

    # orphan layer sections (no matching body) are configuration mistakes
    for name in sections:
        if name.startswith("layer."):
            bid = int(name.split(".")[1])
            if f"body.{bid}" not in sections:
                raise ConfigError(f"{source}: [{name}] has no matching [body.{bid}]")

    return Scene(
        bodies=tuple(bodies),
        los_path_m=los,
        carrier_hz=carrier,
        subcarrier_offsets_hz=default_subcarrier_offsets(count, bandwidth),
        rate_hz=rate,
        noise=noise,
        air=AirConstants(decay_exponent=_get(scene_sec, "decay_exponent", float, 1.0, source)),
        seed=file_seed if seed is None else seed,
        rx_gain=_get(scene_sec, "rx_gain", float, 2e4, source),
    )


def parse_session_config(text: str, source: str = "<config>") -> SessionConfig:
    sections = _parse_sections(text, source)
    for name in sections:
        if name != "session":
            raise ConfigError(f"{source}: unknown section [{name}]")
    sec = sections.get("session", {})
    _check_keys("session", sec, SESSION_KEYS, source)
    return SessionConfig(
        t=_get(sec, "t", int, 4, source),
        period_secs=_get(sec, "period_secs", float, 30.0, source),
        auth_interval_s=_get(sec, "auth_interval_s", float, 300.0, source),
        rate_hz=_get(sec, "rate_hz", float, 50.0, source),
        filter_order=_get(sec, "filter_order", int, 5, source),
        filter_cutoff_hz=_get(sec, "filter_cutoff_hz", float, 1.0, source),
        update_enabled=_get(sec, "update_enabled", bool, True, source),
        retain=_get(sec, "retain", float, 0.90, source),
        max_gap_s=_get(sec, "max_gap_s", float, 1.0, source),
    )
