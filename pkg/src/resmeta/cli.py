"""Command-line front end.

Subcommands: ``run``, ``verify`` (``check`` is ``verify --suite lemmas``),
``bound``, ``witness`` and ``export``.  Exit codes: 0 pass, 1 fail,
2 inconclusive, 3 invalid configuration or arguments.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import bounds
from .config import ConfigError, load, parse_f_family
from .iterations import Trajectory, residual_series, to_csv
from .oracle import MAX_CAP, METRICS, WitnessQuery, check_domination, find_meta_witness, find_quasi_witness, residual_sequence
from .suites import SUITES, nat_record, run_suite, zoo_scenarios

EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_CONFIG = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("%s: error: %s\n" % (self.prog, message))
        raise SystemExit(EXIT_CONFIG)


def _scenario_from(args):
    if args.config:
        cfg = load(args.config)
        return cfg, cfg.scenario()
    return None, [s for s in zoo_scenarios() if s.name == "r1-linear"][0]


def _cap(args, cfg):
    cap = args.cap if args.cap is not None else (cfg.cap if cfg else 100_000)
    if not 0 <= cap <= MAX_CAP:
        raise UsageError("--cap must lie in [0, %d]" % MAX_CAP)
    return cap


def _out_dir(args, cfg):
    out = args.out or (cfg.out if cfg else "out")
    os.makedirs(out, exist_ok=True)
    return out


def _dump(obj, path=None):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text


def _grid(cfg):
    if cfg is None:
        return [0, 1, 2, 3, 4], [(t, parse_f_family(t)) for t in ("identity", "affine(1,10)", "doubling")]
    return cfg.k_grid, cfg.f_families()


# -- run ---------------------------------------------------------------------------


def _sample_indices(steps):
    out, m = [], 1
    while m <= steps:
        out.append(m)
        m *= 10
    if steps not in out:
        out.append(steps)
    return [0] + out


def cmd_run(args):
    cfg, sc = _scenario_from(args)
    steps = cfg.steps if cfg else 10_000
    tag = cfg.tag if cfg else "MAR*"
    cap = _cap(args, cfg)
    out = _out_dir(args, cfg)
    traj = Trajectory(sc, tag)
    traj.extend(steps)
    extra = {}
    if not sc.errors.is_zero:
        other = {"MAR": "MAR*", "MAR*": "MAR", "HPPA2": "HPPA2*", "HPPA2*": "HPPA2"}[tag]
        partner = Trajectory(sc, other).points(steps)
        extra["gap"] = np.linalg.norm(np.asarray(traj.points(steps)) - np.asarray(partner), axis=1)
    csv_path = os.path.join(out, "%s.csv" % sc.name)
    to_csv(traj, csv_path, steps, extra=extra)

    R = sc.bundle.R
    ra, rb = residual_series(traj, R, steps)
    Y = np.asarray(traj.points(steps))
    samples = _sample_indices(steps)
    stats = {
        "steps": steps,
        "tag": tag,
        "N": sc.N,
        "R": R,
        "final_point": [float(c) for c in Y[-1]],
        "max_distance_to_q": float(np.max(np.linalg.norm(Y - sc.q, axis=1))),
    }
    if sc.projection_ref is not None:
        stats["projection_ref"] = [float(c) for c in sc.projection_ref]
        stats["final_dist_to_ref"] = float(np.linalg.norm(Y[-1] - sc.projection_ref))
    if extra:
        stats["final_gap"] = float(extra["gap"][-1])
    residual_table = [{"n": n, "resA": float(ra[n]), "resB": float(rb[n])} for n in samples]

    k_grid, f_grid = _grid(cfg)
    witnesses, bound_rows, verdicts = [], [], []
    has_moduli = all(getattr(sc.bundle, m) is not None for m in ("a", "ell", "A", "P"))
    for k in k_grid:
        for fname, f in f_grid:
            w = find_meta_witness(WitnessQuery(traj, k, f, cap))
            witnesses.append({"k": k, "f": fname, "found": w.found, "n_star": w.n_star, "checked_upto": w.checked_upto})
            if has_moduli and tag == "MAR*":
                value, _ = bounds.evaluate("mu4", sc, k, 0, f)
                verdict = check_domination(value, w)
                bound_rows.append({"k": k, "f": fname, "name": "mu4", "bound": nat_record(value)})
                verdicts.append({"k": k, "f": fname, "verdict": verdict})
    report = {
        "scenario": sc.name,
        "config": args.config,
        "csv": os.path.basename(csv_path),
        "stats": stats,
        "residuals": residual_table,
        "witnesses": witnesses,
        "bounds": bound_rows,
        "verdicts": verdicts,
    }
    _dump(report, os.path.join(out, "%s.report.json" % sc.name))
    print("wrote %s and %s" % (csv_path, os.path.join(out, "%s.report.json" % sc.name)))
    if any(v["verdict"] == "fail" for v in verdicts):
        return EXIT_FAIL
    return EXIT_PASS


# -- verify ------------------------------------------------------------------------


def cmd_verify(args):
    if args.suite not in SUITES:
        raise UsageError("unknown suite %r (choose from %s)" % (args.suite, ", ".join(SUITES)))
    cfg = load(args.config) if args.config else None
    kwargs = {}
    if cfg is not None and args.suite not in ("operators", "lemmas"):
        kwargs["scenarios"] = [cfg.scenario()]
        kwargs["k_grid"], kwargs["f_grid"] = _grid(cfg)
    if args.cap is not None or cfg is not None:
        kwargs["cap"] = _cap(args, cfg)
    seed = args.seed if args.seed is not None else (cfg.seed if cfg else 0)
    report = run_suite(args.suite, seed=seed, **kwargs)
    payload = report.as_dict()
    path = None
    if args.out:
        path = os.path.join(_out_dir(args, cfg), "verify-%s.json" % args.suite)
    text = _dump(payload, path)
    if path is None:
        print(text)
    c = report.counts()
    sys.stderr.write(
        "%s: %d pass, %d fail, %d inconclusive (%.1fs)\n" % (args.suite, c["pass"], c["fail"], c["inconclusive"], report.seconds)
    )
    return report.exit_code


# -- bound -------------------------------------------------------------------------


def _overrides(items):
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError("--set expects name=value, got %r" % item)
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def bound_record(value):
    rec = {"value": "⊤" if value.is_top else value.value, "lower_bound": value.lo}
    if value.is_top:
        rec["lower_bound_log2"] = max(value.lo.bit_length() - 1, 0)
        rec["certified"] = value.certified
    return rec


def cmd_bound(args):
    cfg, sc = _scenario_from(args)
    try:
        f = parse_f_family(args.f)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        value, details = bounds.evaluate(args.name, sc, args.k, args.n, f, _overrides(args.set))
    except bounds.BoundError as exc:
        raise UsageError(str(exc)) from None
    details.update(bound_record(value))
    print(_dump(details))
    return EXIT_PASS


# -- witness -----------------------------------------------------------------------


def cmd_witness(args):
    cfg, sc = _scenario_from(args)
    cap = _cap(args, cfg)
    tag = cfg.tag if cfg else "MAR*"
    try:
        f = parse_f_family(args.f)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.metric not in METRICS:
        raise UsageError("unknown metric %r" % args.metric)
    traj = Trajectory(sc, tag)
    if args.quasi:
        which = {"residual-A": "A", "residual-B": "B"}.get(args.metric, "both")
        w = find_quasi_witness(residual_sequence(traj, sc.bundle.R, which), args.k, f, cap)
    else:
        point = sc.projection_ref if args.metric == "gap-to-point" else None
        w = find_meta_witness(WitnessQuery(traj, args.k, f, cap, metric=args.metric, point=point))
    rec = {
        "scenario": sc.name,
        "tag": tag,
        "k": args.k,
        "f": args.f,
        "metric": args.metric,
        "quasi": bool(args.quasi),
        "cap": cap,
        "found": w.found,
        "n_star": w.n_star,
        "checked_upto": w.checked_upto,
    }
    print(_dump(rec))
    return EXIT_PASS if w.found else EXIT_INCONCLUSIVE


# -- export ------------------------------------------------------------------------


def cmd_export(args):
    cfg, sc = _scenario_from(args)
    steps = args.steps if args.steps is not None else (cfg.steps if cfg else 10_000)
    tag = cfg.tag if cfg else "MAR*"
    out = _out_dir(args, cfg)
    traj = Trajectory(sc, tag)
    path = to_csv(traj, os.path.join(out, "%s.csv" % sc.name), steps)
    print(path)
    return EXIT_PASS


# -- entry point -------------------------------------------------------------------


def build_parser():
    p = _Parser(prog="resmeta", description="Alternating resolvent iterations: simulate, bound, verify.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, suite=False):
        sp.add_argument("--config", help="scenario file (TOML)")
        sp.add_argument("--cap", type=int, help="witness search cap")
        sp.add_argument("--seed", type=int, help="random seed")
        sp.add_argument("--out", help="output directory")
        if suite:
            sp.add_argument("--suite", required=True, help="one of: " + ", ".join(SUITES))

    common(sub.add_parser("run", help="simulate and write CSV plus report"))
    common(sub.add_parser("verify", help="run a verification suite"), suite=True)
    common(sub.add_parser("check", help="run the lemma suite"))
    b = sub.add_parser("bound", help="evaluate a named rate")
    common(b)
    b.add_argument("name", help="rate name (use 'list' to show all)")
    b.add_argument("--k", type=int, default=0)
    b.add_argument("--n", type=int, default=0)
    b.add_argument("--f", default="identity")
    b.add_argument("--set", action="append", metavar="NAME=VALUE", help="override a modulus or constant")
    w = sub.add_parser("witness", help="least metastability or quasi-rate witness")
    common(w)
    w.add_argument("--k", type=int, default=0)
    w.add_argument("--f", default="identity")
    w.add_argument("--metric", default="cauchy-pair")
    w.add_argument("--quasi", action="store_true", help="quasi-rate witness of a residual sequence")
    e = sub.add_parser("export", help="write the plot-ready trajectory CSV")
    common(e)
    e.add_argument("--steps", type=int)
    return p


def main(argv=None):
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    args = build_parser().parse_args(argv)
    if args.command == "check":
        args.command, args.suite = "verify", "lemmas"
    if args.command == "bound" and args.name == "list":
        print("\n".join(bounds.names()))
        return EXIT_PASS
    handler = {"run": cmd_run, "verify": cmd_verify, "bound": cmd_bound, "witness": cmd_witness, "export": cmd_export}
    try:
        return handler[args.command](args)
    except (ConfigError, UsageError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_CONFIG
    except OSError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
