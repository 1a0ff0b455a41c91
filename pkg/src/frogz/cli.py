"""Command-line entry point: classify, exact, simulate, sweep, verify.

Configs are JSON, outputs are CSV/JSONL.  Exit codes: 0 success/decisive,
1 malformed config, 2 invalid spec or guard refusal, 3 Boundary/Unknown
verdict, 4 verification violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from datetime import datetime, timezone

from . import __version__
from .classify import (
    Outcome, ProcessParams, classify, min_alignment_exponent, series_test,
)
from .errors import (
    BoundViolationError, FrogzError, InvalidSpecError, MalformedConfigError,
    TooLargeError,
)
from .exact import (
    ENUMERATION_MAX_STEPS, WalkLaw, b, bound_check, brute_force_reach,
    build_reach_table, reach_prob,
)
from .mc import SimConfig, estimate_activation_profile, estimate_survival
from .sequences import INF, L0_L1, SequenceSpec, m_of

EXIT_OK = 0
EXIT_BAD_CONFIG = 1
EXIT_INVALID_SPEC = 2
EXIT_INDECISIVE = 3
EXIT_VIOLATION = 4


def _load_config(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _params_from_config(cfg: dict) -> ProcessParams:
    try:
        spec = SequenceSpec.from_dict(cfg["spec"])
        return ProcessParams(N=int(cfg["N"]), L=int(cfg["L"]), spec=spec)
    except KeyError as exc:
        raise KeyError(f"missing config key {exc}") from exc


def _write_out(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _append_record(store: str | None, subcommand: str, config: dict,
                   result, seed) -> None:
    if not store:
        return
    record = {
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "subcommand": subcommand,
        "config": config,
        "result": result,
        "version": __version__,
        "seed": seed,
    }
    with open(store, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")


def cmd_classify(args) -> int:
    config = _load_config(args.config)
    params = _params_from_config(config)
    verdict = classify(params)
    payload = json.dumps(verdict.to_dict(), sort_keys=True) + "\n"
    _write_out(payload, args.out)
    _append_record(args.store, "classify", config, verdict.to_dict(), args.seed)
    if verdict.outcome in (Outcome.BOUNDARY, Outcome.UNKNOWN):
        return EXIT_INDECISIVE
    return EXIT_OK


def cmd_exact(args) -> int:
    config = _load_config(args.config)
    spec = SequenceSpec.from_dict(config["spec"])
    N, L = int(config["N"]), int(config["L"])
    n_max = int(config.get("n_max", 50))
    table = build_reach_table(spec, N, L, n_max)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "a_n", "lower", "upper", "partial_product"])
    for row in table.rows:
        writer.writerow([row.n, repr(row.a_n), repr(row.lower), repr(row.upper),
                         repr(row.partial_product)])
    _write_out(buf.getvalue(), args.out)
    _append_record(args.store, "exact", config,
                   {"rows": len(table.rows)}, args.seed)
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = _load_config(args.config)
    params = _params_from_config(config.get("params", config))
    horizon = args.horizon or int(config.get("horizon", 0))
    trials = args.trials or int(config.get("trials", 0))
    seed = args.seed if args.seed is not None else int(config.get("seed", 0))
    cfg = SimConfig(
        params=params, horizon=horizon, trials=trials, seed=seed,
        ci_level=float(config.get("ci_level", 0.95)),
    )
    result = estimate_survival(cfg, threads=args.threads)
    _write_out(result.to_jsonl(), args.out)
    if args.profile:
        profile = estimate_activation_profile(cfg, threads=args.threads)
        with open(args.profile, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["site", "p_hat_Ei", "ci_half", "lower_bound_curve"])
            for i in range(len(profile.sites)):
                lb = profile.lower_curve[i]
                writer.writerow([
                    int(profile.sites[i]), repr(float(profile.p_hat[i])),
                    repr(float(profile.ci_half[i])),
                    "" if math.isnan(lb) else repr(float(lb)),
                ])
    _append_record(args.store, "simulate", cfg.to_dict(),
                   result.aggregate_dict()["result"], seed)
    return EXIT_OK


def _parse_range(text: str) -> range:
    lo, _, hi = text.partition(":")
    if not lo or not hi:
        return range(0)
    return range(int(lo), int(hi) + 1)


def cmd_sweep(args) -> int:
    config = _load_config(args.config)
    spec = SequenceSpec.from_dict(config["spec"])
    n_range = _parse_range(args.n_range)
    l_range = _parse_range(args.l_range)
    l0, l1, _ = L0_L1(spec)
    m = m_of(spec)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["N", "L", "outcome", "m", "b", "L0", "L1", "min_E", "min_F"])
    for N in n_range:
        for L in l_range:
            verdict = classify(ProcessParams(N=N, L=L, spec=spec))
            if spec.has_overrides:
                min_e = min_f = ""
            else:
                _, best = min_alignment_exponent(spec, N, L)
                min_e, min_f = repr(best.power_exp), best.log_exp
            writer.writerow([
                N, L, verdict.outcome.value,
                "inf" if m == INF else m, b(N, L),
                "inf" if l0 == INF else int(l0),
                "inf" if l1 == INF else int(l1),
                min_e, min_f,
            ])
    _write_out(buf.getvalue(), args.out)
    _append_record(args.store, "sweep", config,
                   {"rows": len(n_range) * len(l_range)}, args.seed)
    return EXIT_OK


def cmd_verify(args) -> int:
    config = _load_config(args.config) if args.config else {}
    l_max = int(config.get("l_max", 8))
    if l_max > ENUMERATION_MAX_STEPS:
        sys.stderr.write(f"refusing oracle mode with L > {ENUMERATION_MAX_STEPS}\n")
        return EXIT_INVALID_SPEC
    p_grid = config.get("p_grid", [round(0.1 * i, 1) for i in range(1, 10)])
    q_grid = config.get("q_grid", [0.1, 0.3, 0.5, 0.7, 0.9])
    n_grid = config.get("N_grid", [1, 2, 3])
    checked = 0
    failures = []
    for L in range(1, l_max + 1):
        for p in p_grid:
            law = WalkLaw(p_right=p, steps=L)
            for d in range(1, L + 1):
                dp = reach_prob(law, d)
                oracle = brute_force_reach(law, d)
                checked += 1
                if abs(dp - oracle) > 1e-12:
                    failures.append(("reach", p, L, d, dp, oracle))
    from .sequences import ConstantForm, single
    for qv in q_grid:
        spec = single(ConstantForm(q=qv))
        for N in n_grid:
            for L in range(1, l_max + 1):
                try:
                    bound_check(spec, N, L, 0)
                    checked += L
                except BoundViolationError as exc:
                    failures.append(("bound", qv, N, L, str(exc)))
    report = {"checked": checked, "failures": failures}
    _write_out(json.dumps(report, sort_keys=True) + "\n", args.out)
    _append_record(args.store, "verify", config, report, args.seed)
    if failures:
        sys.stderr.write(f"{len(failures)} violations, first: {failures[0]}\n")
        return EXIT_VIOLATION
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frogz",
        description="finite-lifetime random-walk system analysis and simulation",
    )
    parser.add_argument("--version", action="version", version=f"frogz {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, needs_config in [
        ("classify", cmd_classify, True),
        ("exact", cmd_exact, True),
        ("simulate", cmd_simulate, True),
        ("sweep", cmd_sweep, True),
        ("verify", cmd_verify, False),
    ]:
        p = sub.add_parser(name)
        p.add_argument("--config", required=needs_config)
        p.add_argument("--out", default=None)
        p.add_argument("--store", default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=1)
        p.set_defaults(fn=fn)
    sub.choices["simulate"].add_argument("--trials", type=int, default=None)
    sub.choices["simulate"].add_argument("--horizon", type=int, default=None)
    sub.choices["simulate"].add_argument("--profile", default=None)
    sub.choices["sweep"].add_argument("--n-range", required=True)
    sub.choices["sweep"].add_argument("--l-range", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (json.JSONDecodeError, KeyError, FileNotFoundError,
            MalformedConfigError) as exc:
        sys.stderr.write(f"bad config: {exc}\n")
        return EXIT_BAD_CONFIG
    except TooLargeError as exc:
        sys.stderr.write(f"refused: {exc}\n")
        return EXIT_INVALID_SPEC
    except (InvalidSpecError, FrogzError, ValueError) as exc:
        sys.stderr.write(f"invalid input: {exc}\n")
        return EXIT_INVALID_SPEC


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
