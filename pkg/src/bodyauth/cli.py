"""Command-line entry point.

Subcommands: synth (scene -> CSI CSV), register (CSI -> profile), auth
(profile + CSI -> per-window decisions), run (streaming session), evaluate
(subject directory -> metrics report), bench (stage latency table).

Exit codes: 0 success, 1 domain error, 2 usage error. BODYAUTH_SEED
overrides --seed when set.
"""

from __future__ import annotations

import argparse
import json
import os
import statistics
import sys
import time
from pathlib import Path

from . import config as configmod
from . import csi, metrics
from .body_model import synthesize_csi
from .errors import BodyauthError, FormatError
from .features import extract_stats, feature_matrix, window
from .matcher import GaussianPeriodAuthenticator, register
from .pipeline import FilterSpec, sanitize
from .session import Session


def _seed_override(seed: int) -> int:
    env = os.environ.get("BODYAUTH_SEED")
    return int(env) if env else seed


def cmd_synth(args) -> int:
    text = Path(args.scene).read_text(encoding="utf-8")
    scene = configmod.parse_scene(text, source=args.scene, seed=_seed_override(args.seed))
    series = synthesize_csi(scene, args.duration)
    csi.write_csv(series, args.out)
    print(f"wrote {series.n_frames} frames x {series.n_subcarriers} subcarriers to {args.out}")
    return 0


def _registration_features(series: csi.CsiSeries, periods: int, period_secs: float,
                           spec: FilterSpec):
    needed_s = periods * period_secs
    available_s = series.n_frames / series.rate_hz
    if available_s < needed_s:
        raise BodyauthError(
            f"input covers {available_s:.1f} s but registration needs {needed_s:.1f} s"
        )
    raw = feature_matrix(sanitize(series, spec))
    per_period = int(period_secs)
    return [raw[i * per_period:(i + 1) * per_period] for i in range(periods)]


def cmd_register(args) -> int:
    series = csi.read_csv(args.infile, rate_hz=args.rate)
    spec = FilterSpec(rate_hz=series.rate_hz)
    period_samples = _registration_features(series, args.periods, args.period_secs, spec)
    auth = register(period_samples, period_secs=args.period_secs)
    Path(args.out).write_text(json.dumps(auth.to_dict(), indent=2), encoding="utf-8")
    for i, period in enumerate(auth.periods_, start=1):
        print(f"period {i}: n={period.sample_count} threshold={period.threshold:.6g}")
    print(f"wrote profile with t={auth.t} to {args.out}")
    return 0


def cmd_auth(args) -> int:
    doc = json.loads(Path(args.profile).read_text(encoding="utf-8"))
    auth = GaussianPeriodAuthenticator.from_dict(doc)
    try:
        series = csi.read_csv(args.infile, rate_hz=args.rate)
    except FormatError as exc:
        if "no data rows" in str(exc):
            print(f"usage error: {exc}", file=sys.stderr)
            return 2
        raise
    raw = feature_matrix(sanitize(series, FilterSpec(rate_hz=series.rate_hz)))
    accepted = 0
    for i, vec in enumerate(raw):
        decision = auth.decide(vec)
        accepted += decision.accepted
        verdict = "ACCEPT" if decision.accepted else "REJECT"
        best = decision.best_period
        print(f"{i} {decision.per_period_scores[best]:.6g} {best + 1} {verdict}")
    print(f"acceptance_rate {accepted / len(raw):.4f}")
    return 0


def cmd_run(args) -> int:
    cfg_text = Path(args.config).read_text(encoding="utf-8")
    cfg = configmod.parse_session_config(cfg_text, source=args.config)
    if args.infile == "-":
        import tempfile
        with tempfile.NamedTemporaryFile("w", suffix=".csv", delete=False) as tmp:
            tmp.write(sys.stdin.read())
            path = tmp.name
        series = csi.read_csv(path, rate_hz=cfg.rate_hz)
        os.unlink(path)
    else:
        series = csi.read_csv(args.infile, rate_hz=cfg.rate_hz)
    session = Session(cfg)
    for event in session.run_stream(series):
        print(event.format())
    if session.dropped_frames:
        print(f"# dropped_frames {session.dropped_frames}", file=sys.stderr)
    return 0


def cmd_evaluate(args) -> int:
    files = sorted(Path(args.subjects).glob("*.csv"))
    if len(files) < 2:
        raise BodyauthError(f"need >= 2 subject CSI files in {args.subjects}, found {len(files)}")
    reg_s = args.periods * args.period_secs
    subjects = []
    for path in files:
        series = csi.read_csv(path, rate_hz=args.rate)
        split = int(round(reg_s * series.rate_hz))
        if series.n_frames <= split:
            raise BodyauthError(f"{path}: too short for registration plus monitoring")
        subjects.append(metrics.SubjectData(
            label=path.stem,
            registration=series.slice(0, split),
            monitoring=series.slice(split, series.n_frames),
        ))
    horizon = int(len(range(0, subjects[0].monitoring.n_frames))
                  / subjects[0].monitoring.rate_hz // 60)
    horizon = (horizon // args.interval_min) * args.interval_min
    report = metrics.run_evaluation(subjects, interval_min=args.interval_min,
                                    horizon_min=horizon, t=args.periods,
                                    period_secs=args.period_secs)
    Path(args.report).write_text(report.to_json(), encoding="utf-8")
    print(f"mI2 {report.mii_minutes:.2f} min")
    print(f"mA2 {report.maa:.4f}")
    print(f"mDP {report.mdp:.4f}")
    return 0


def cmd_bench(args) -> int:
    if args.iters < 10:
        raise BodyauthError("--iters must be >= 10")
    series = csi.read_csv(args.infile, rate_hz=args.rate)
    spec = FilterSpec(rate_hz=series.rate_hz)
    one_second = series.slice(0, int(series.rate_hz))
    if one_second.n_frames <= 3 * spec.order:
        raise BodyauthError("input shorter than one analysis window")
    profile = _bench_profile(series, spec)
    stages = {"filter": [], "features": [], "match": []}
    for _ in range(args.iters):
        start = time.perf_counter()
        processed = sanitize(one_second, spec)
        stages["filter"].append(time.perf_counter() - start)
        win = window(processed, 1.0)[0]
        start = time.perf_counter()
        vec = extract_stats(win)
        stages["features"].append(time.perf_counter() - start)
        start = time.perf_counter()
        profile.decide(vec)
        stages["match"].append(time.perf_counter() - start)
    total_median = 0.0
    print(f"{'stage':<10}{'median_ms':>12}{'max_ms':>12}")
    for name, values in stages.items():
        med = statistics.median(values) * 1e3
        total_median += med
        print(f"{name:<10}{med:>12.3f}{max(values) * 1e3:>12.3f}")
    print(f"{'total':<10}{total_median:>12.3f}")
    return 0


def _bench_profile(series: csi.CsiSeries, spec: FilterSpec) -> GaussianPeriodAuthenticator:
    # registration cut for matching: reuse the input stream, shrink the
    # period length if the file is short
    raw = feature_matrix(sanitize(series, spec))
    per_period = max(10, raw.shape[0] // 4)
    periods = [raw[i * per_period:(i + 1) * per_period]
               for i in range(max(1, raw.shape[0] // per_period))]
    periods = [p for p in periods if p.shape[0] >= 10]
    if not periods:
        raise BodyauthError("input too short to build a benchmark profile (need >= 10 s)")
    return register(periods)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bodyauth",
                                     description="Contactless continuous authentication toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize a CSI CSV from a scene file")
    p.add_argument("--scene", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--duration", type=float, required=True, help="seconds")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("register", help="build a profile from a CSI CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--periods", type=int, default=4)
    p.add_argument("--period-secs", dest="period_secs", type=float, default=30.0)
    p.add_argument("--rate", type=float, default=50.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_register)

    p = sub.add_parser("auth", help="authenticate a CSI CSV against a profile")
    p.add_argument("--profile", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--rate", type=float, default=50.0)
    p.set_defaults(func=cmd_auth)

    p = sub.add_parser("run", help="drive the session state machine over a stream")
    p.add_argument("--config", required=True)
    p.add_argument("--in", dest="infile", required=True, help="CSI CSV or - for stdin")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("evaluate", help="run the multi-subject evaluation harness")
    p.add_argument("--subjects", required=True, help="directory of per-subject CSI CSVs")
    p.add_argument("--interval-min", dest="interval_min", type=int, default=5)
    p.add_argument("--periods", type=int, default=4)
    p.add_argument("--period-secs", dest="period_secs", type=float, default=30.0)
    p.add_argument("--rate", type=float, default=50.0)
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench", help="measure per-stage latency on a 1 s window")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--rate", type=float, default=50.0)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BodyauthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error: malformed JSON profile: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
