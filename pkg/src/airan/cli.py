"""Command line: run, sweep and validate scenarios."""
from __future__ import annotations

import argparse
import csv
import itertools
import json
import sys
from pathlib import Path

import yaml

from .scenario import ParseError, ValidationError, load_scenario, run_experiment, with_param


def _parse_param(text: str) -> tuple[str, list]:
    if "=" not in text:
        raise ValidationError(f"--param {text!r}: expected path=value[,value...]")
    path, values = text.split("=", 1)
    return path.strip(), [yaml.safe_load(v) for v in values.split(",")]


def cmd_run(args) -> int:
    sc = load_scenario(args.scenario)
    seed = sc.seed if args.seed is None else args.seed
    digest = run_experiment(sc, args.out, seed)
    print(f"{digest.run_id} {digest.hash}")
    return 0


def cmd_sweep(args) -> int:
    base = load_scenario(args.scenario)
    seed = base.seed if args.seed is None else args.seed
    params = [_parse_param(p) for p in args.param]
    out = Path(args.out)
    rows = []
    for combo in itertools.product(*[[(path, v) for v in values] for path, values in params]):
        sc = base
        for path, value in combo:
            sc = with_param(sc, path, value)
        tag = "__".join(f"{path}={value}" for path, value in combo) or "base"
        digest = run_experiment(sc, out / tag, seed)
        print(f"{tag} {digest.hash}")
        rows.append({"run": tag, "hash": digest.hash,
                     **{k: v for k, v in digest.kpis.items() if isinstance(v, (int, float))}})
    out.mkdir(parents=True, exist_ok=True)
    fields = sorted({k for r in rows for k in r} - {"run", "hash"})
    with open(out / "sweep.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=["run", "hash"] + fields)
        writer.writeheader()
        writer.writerows(rows)
    return 0


def cmd_validate(args) -> int:
    sc = load_scenario(args.scenario)
    print(json.dumps({"scenario": sc.name, "valid": True}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="airan", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one scenario to its horizon")
    r.add_argument("--scenario", required=True, help="YAML file or preset name")
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--out", required=True, help="metrics directory")
    r.set_defaults(func=cmd_run)
    s = sub.add_parser("sweep", help="run the cartesian product of parameter values")
    s.add_argument("--scenario", required=True)
    s.add_argument("--param", action="append", default=[], help="dotted.path=v1,v2 (repeatable)")
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sweep)
    v = sub.add_parser("validate", help="load and validate a scenario")
    v.add_argument("--scenario", required=True)
    v.set_defaults(func=cmd_validate)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
