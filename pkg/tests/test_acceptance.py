"""Acceptance gate: the ten headline criteria, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""

import math
import time

import numpy as np
import pytest

from bodyauth.body_model import synthesize_csi
from bodyauth.cohort import generate_cohort, subject_scene
from bodyauth.csi import CsiFrame
from bodyauth.features import PcaReducer, Window, extract_stats
from bodyauth.matcher import (GaussianPeriodAuthenticator, PeriodModel,
                              fit_period, log_score, score)
from bodyauth.metrics import (ConfusionMatrix, InterruptionHistogram,
                              mean_auth_accuracy, mean_defending_precision,
                              mean_interruption_interval, run_evaluation,
                              subject_accuracy)
from bodyauth.pipeline import (FilterSpec, design_butterworth,
                               phase_difference, sanitize)
from bodyauth.session import Phase, Session, SessionConfig


def report(number: int, name: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] criterion {number}: {name}" + (f" ({detail})" if detail else ""))
    assert ok, f"criterion {number} failed: {name} {detail}"


@pytest.fixture(scope="module")
def cohort_report():
    start = time.perf_counter()
    subjects = generate_cohort(10, registration_s=120.0, monitoring_s=3600.0)
    rep = run_evaluation(subjects, interval_min=5, horizon_min=60)
    return rep, time.perf_counter() - start


def test_criterion_1_metric_anchors():
    start = time.perf_counter()
    ok = (
        subject_accuracy(10) == pytest.approx(0.50)
        and subject_accuracy(55) == pytest.approx(0.9091, abs=1e-4)
        and subject_accuracy(60) == 1.0
    )
    elapsed = time.perf_counter() - start
    report(1, "metric formula anchors", ok and elapsed < 1.0,
           f"50%/90.91%/100%, {elapsed:.3f}s")


def test_criterion_2_metric_oracles():
    start = time.perf_counter()
    rng = np.random.default_rng(20260823)
    grid = list(range(5, 61, 5))
    worst = 0.0
    for _ in range(1000):
        counts = {t: int(rng.integers(0, 5)) for t in rng.choice(grid, size=4, replace=False)}
        if sum(counts.values()) == 0:
            counts[60] = 1
        h = InterruptionHistogram(counts=counts)
        total = sum(counts.values())
        brute_mii = sum(t * n for t, n in counts.items()) / total
        brute_maa = sum(
            n * (1.0 if t == 60 else (t - 5) / t) for t, n in counts.items()
        ) / total
        n_sub = int(rng.integers(2, 7))
        values = rng.uniform(0, 1, size=(n_sub, n_sub))
        c = ConfusionMatrix(values=values)
        brute_mdp = 1.0 - sum(
            values[i, j] for i in range(n_sub) for j in range(n_sub) if i != j
        ) / (n_sub * (n_sub - 1))
        worst = max(
            worst,
            abs(mean_interruption_interval(h) - brute_mii),
            abs(mean_auth_accuracy(h) - brute_maa),
            abs(mean_defending_precision(c) - brute_mdp),
        )
    elapsed = time.perf_counter() - start
    report(2, "metric oracle equivalence", worst <= 1e-12 and elapsed < 10.0,
           f"worst |err| {worst:.2e}, {elapsed:.2f}s")


def test_criterion_3_filter_contract():
    from scipy import signal

    start = time.perf_counter()
    b, a = design_butterworth(FilterSpec(order=5, cutoff_hz=1.0, rate_hz=50.0))
    _, h = signal.freqz(b, a, worN=[0.0, 1.0, 5.0], fs=50.0)
    gains = np.abs(h)
    ok = (
        abs(gains[0] - 1.0) <= 1e-9
        and abs(gains[1] - 0.7071) <= 0.01
        and gains[2] <= 1e-3
    )
    elapsed = time.perf_counter() - start
    report(3, "filter contract",
           ok and elapsed < 1.0,
           f"DC {gains[0]:.9f}, 1Hz {gains[1]:.4f}, 5Hz {gains[2]:.2e}, {elapsed:.3f}s")


def test_criterion_4_phase_sanitization():
    rng = np.random.default_rng(4)
    true = np.cumsum(rng.uniform(-0.05, 0.05, size=(400, 30)), axis=0)
    offsets = rng.uniform(-np.pi, np.pi, size=(1, 30))
    err_offset = np.max(np.abs(phase_difference(true + offsets) - phase_difference(true)))

    # pure CFO ramp: zero out everything except the oscillator drift
    from bodyauth.body_model import NoiseModel, Scene
    cfo_scene = Scene(bodies=(), noise=NoiseModel(cfo_delta_t=1e-12), seed=0)
    cfo_series = synthesize_csi(cfo_scene, 4.0)
    diffs = phase_difference(cfo_series.phases)
    slopes = 2 * np.pi * np.array(cfo_scene.subcarrier_freqs_hz) * 1e-12 / cfo_scene.rate_hz
    err_cfo = np.max(np.abs(diffs - slopes))
    ok = err_offset <= 1e-12 and err_cfo <= 1e-9
    report(4, "phase sanitization",
           ok, f"offset err {err_offset:.2e}, cfo err {err_cfo:.2e}")


def test_criterion_5_matcher_closed_forms():
    peak = 1.0 / math.sqrt(2 * math.pi)
    ok = True
    details = []
    for m in (1, 10, 480):
        p = PeriodModel(mean=np.zeros(m), variance=np.ones(m), threshold=0.0, sample_count=10)
        v = score(p, np.zeros(m))
        details.append(f"m={m}: {v:.6f}")
        ok &= abs(v - 0.398942) <= 1e-6
    rng = np.random.default_rng(5)
    for n in (10, 30, 100, 137):
        X = rng.standard_normal((n, 8))
        model = fit_period(X)
        passed = int(np.sum(np.exp(log_score(model, X)) >= model.threshold))
        ok &= passed >= math.ceil(0.9 * n)
    report(5, "matcher closed forms", ok, "; ".join(details))


def test_criterion_6_feature_oracle():
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(1000):
        w = int(rng.integers(8, 60))
        col = rng.uniform(-5, 5, size=(w, 1))
        pdiff = rng.uniform(-np.pi, np.pi, size=(w - 1, 1))
        vec = extract_stats(Window(amplitudes=col, phase_diffs=pdiff, index=0))
        data = col[:, 0]
        mean = data.sum() / w
        centered = data - mean
        m2 = (centered ** 2).sum() / w
        m3 = (centered ** 3).sum() / w
        m4 = (centered ** 4).sum() / w
        q25, q75 = np.percentile(data, [25, 75])
        brute = np.array([
            mean, data.max(), data.min(), np.abs(centered).sum() / w,
            q75 - q25, math.sqrt((data ** 2).sum() / w),
            m3 / m2 ** 1.5 if m2 > 0 else 0.0,
            m4 / m2 ** 2 if m2 > 0 else 0.0,
        ])
        scale = np.maximum(np.abs(brute), 1.0)
        worst = max(worst, float(np.max(np.abs(vec[:8] - brute) / scale)))
    X = rng.standard_normal((100, 20)) * rng.uniform(0.5, 4.0, size=20)
    pca = PcaReducer(retain=0.90).fit(X)
    frac = pca.variances_.sum() / np.var(X - X.mean(axis=0), axis=0, ddof=1).sum()
    ok = worst <= 1e-9 and frac >= 0.90
    report(6, "feature oracle", ok, f"worst rel err {worst:.2e}, PCA retained {frac:.3f}")


def test_criterion_7_or_beats_pooled():
    start = time.perf_counter()
    rng = np.random.default_rng(7)
    dim, per_period, t = 8, 240, 4
    or_false_rates, pooled_false_rates = [], []
    or_true_rates, pooled_true_rates = [], []
    for _ in range(20):
        drifts = [rng.standard_normal(dim) * 1.2 for _ in range(t)]
        periods = [rng.standard_normal((per_period, dim)) * 0.25 + d for d in drifts]
        X = np.concatenate(periods)
        y = np.concatenate([np.full(per_period, p) for p in range(t)])
        centroid = np.mean(drifts, axis=0)
        impostor = rng.standard_normal((240, dim)) * 0.1 + centroid

        # both matchers are calibrated to pass >= 90% of the legal user's
        # registration samples, so their legal acceptance is matched
        auth = GaussianPeriodAuthenticator(retain=0.9999).fit(X, y)
        or_true_rates.append(np.mean(auth.predict(X)))
        or_false_rates.append(np.mean(auth.predict(impostor)))

        pooled = fit_period(auth.transform(X))
        pooled_true_rates.append(np.mean(
            np.exp(log_score(pooled, auth.transform(X))) >= pooled.threshold))
        pooled_false_rates.append(np.mean(
            np.exp(log_score(pooled, auth.transform(impostor))) >= pooled.threshold))
    or_true = float(np.mean(or_true_rates))
    or_false = float(np.mean(or_false_rates))
    pooled_true = float(np.mean(pooled_true_rates))
    pooled_false = float(np.mean(pooled_false_rates))
    elapsed = time.perf_counter() - start
    ok = (or_true >= 0.9 - 1e-9 and pooled_true >= 0.9 - 1e-9
          and or_false < pooled_false and elapsed < 30.0)
    report(7, "multi-period OR beats pooled matcher", ok,
           f"genuine {or_true:.3f}/{pooled_true:.3f}, "
           f"impostor {or_false:.3f} < {pooled_false:.3f}, {elapsed:.1f}s")


def test_criterion_8_end_to_end(cohort_report):
    rep, elapsed = cohort_report
    ok = rep.maa >= 0.85 and rep.mdp >= 0.85 and elapsed < 300.0
    report(8, "end-to-end synthetic evaluation", ok,
           f"mI2 {rep.mii_minutes:.1f} min, mA2 {rep.maa:.4f}, mDP {rep.mdp:.4f}, "
           f"{elapsed:.0f}s, 10 subjects x 60 min, seed 42")


def test_criterion_9_latency(cohort_report):
    import statistics

    rep, _ = cohort_report
    scene = subject_scene(0, seed=909)
    series = synthesize_csi(scene, 120.0)
    spec = FilterSpec()
    one_second = series.slice(0, 50)
    from bodyauth.features import feature_matrix, window
    from bodyauth.matcher import register

    raw = feature_matrix(sanitize(series, spec))
    profile = register([raw[i * 30:(i + 1) * 30] for i in range(4)])
    stages = {"filter": [], "features": [], "match": []}
    for _ in range(50):
        t0 = time.perf_counter()
        processed = sanitize(one_second, spec)
        stages["filter"].append(time.perf_counter() - t0)
        win = window(processed, 1.0)[0]
        t0 = time.perf_counter()
        vec = extract_stats(win)
        stages["features"].append(time.perf_counter() - t0)
        t0 = time.perf_counter()
        profile.decide(vec)
        stages["match"].append(time.perf_counter() - t0)
    medians = {k: statistics.median(v) * 1e3 for k, v in stages.items()}
    total = sum(medians.values())
    report(9, "per-window latency", total < 300.0,
           ", ".join(f"{k} {v:.2f} ms" for k, v in medians.items())
           + f", total {total:.2f} ms < 300 ms")


def test_criterion_10_session_safety():
    rng = np.random.default_rng(10)
    cfg = SessionConfig(t=2, period_secs=10.0, auth_interval_s=10.0)

    # (a) no frame sequence without a login exits Locked: 1000 randomized trials
    locked_ok = True
    for _ in range(1000):
        session = Session(cfg)
        for _ in range(int(rng.integers(1, 6))):
            ts = int(rng.integers(0, 10 ** 9))
            frame = CsiFrame(ts, rng.uniform(0, 100, 30), rng.uniform(-np.pi, np.pi, 30))
            session.ingest_frame(frame)
            session.tick(ts)
            if session.phase != Phase.LOCKED:
                locked_ok = False

    # (b) replayed impostor handoffs always end LOCKED_OUT
    handoff_ok = True
    genuine = synthesize_csi(subject_scene(0, seed=1001), 30.0)
    for trial in range(5):
        impostor = synthesize_csi(subject_scene(1 + trial % 3, seed=2000 + trial), 40.0)
        session = Session(cfg)
        session.run_stream(genuine)
        if session.phase != Phase.MONITORING:
            handoff_ok = False
            continue
        offset = int(genuine.timestamps_us[-1]) + 20_000
        saw_lockout = False
        for i in range(impostor.n_frames):
            frame = CsiFrame(int(impostor.timestamps_us[i]) + offset,
                             impostor.amplitudes[i], impostor.phases[i])
            session.ingest_frame(frame)
            events = session.tick(frame.timestamp_us)
            if any(e.kind == "LOCKED_OUT" for e in events):
                saw_lockout = True
                break
        handoff_ok &= saw_lockout and session.phase == Phase.LOCKED
    report(10, "session safety", locked_ok and handoff_ok,
           "1000 locked-state trials, 5 impostor handoffs")
