"""Command line entry point."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from pathlib import Path

from . import checks
from .channel import ArrayGeometry, dft_matrix
from .codes import HAMMING_15_11_H, get_code, registry_keys
from .harness import emit, load_config, run_scenario
from .mapping import lut_build
from .measurement import beam_pattern, combiner_from_row


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.workers is not None:
        cfg = dataclasses.replace(cfg, workers=args.workers)
    records = run_scenario(cfg)
    if args.out:
        prefix = Path(args.out)
        prefix.with_suffix(".csv").write_text(emit(records, "csv", cfg))
        prefix.with_suffix(".json").write_text(emit(records, "json", cfg))
    else:
        sys.stdout.write(emit(records, args.format, cfg))
    return 0


def cmd_codes(args) -> int:
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["key", "n", "k", "d", "e_n", "m"])
    for key in registry_keys():
        c = get_code(key)
        w.writerow([key, c.n, c.k, c.d, c.e_n, c.m])
        if args.matrices:
            sys.stdout.write(c.H.to_text() + "\n")
    return 0


def table1_csv() -> str:
    return lut_build(HAMMING_15_11_H, [1], 1).to_csv()


def cmd_table1(args) -> int:
    sys.stdout.write(table1_csv())
    return 0


def cmd_verify(args) -> int:
    failed = 0
    for r in checks.run_all(args.trials):
        failed += not r.ok
        print(f"{'PASS' if r.ok else 'FAIL'}  {r.name}  {r.detail}".rstrip())
    return 1 if failed else 0


def cmd_beampattern(args) -> int:
    code = get_code(args.code)
    if not 0 <= args.row < code.H.rows:
        print(f"row must be in [0, {code.H.rows})", file=sys.stderr)
        return 2
    u = dft_matrix(ArrayGeometry(code.n, args.delta))
    w = combiner_from_row(code.H.to_array()[args.row], u)
    omega, gain = beam_pattern(w, args.delta, args.points)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["omega", "gain"])
    for o, g in zip(omega, gain):
        out.writerow([f"{o:.6f}", f"{g:.6f}"])
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lbcbeam", description="Beam discovery with linear block codes")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("run", help="run a scenario sweep")
    p.add_argument("config")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="write <out>.csv and <out>.json instead of stdout")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("codes", help="code registry")
    csub = p.add_subparsers(dest="codes_cmd", required=True)
    pl = csub.add_parser("list")
    pl.add_argument("--matrices", action="store_true")
    pl.set_defaults(func=cmd_codes)

    p = sub.add_parser("table1", help="syndrome table of the (15,11) Hamming code")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("verify", help="run the invariant suites")
    p.add_argument("--trials", type=int, default=1000)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("beampattern", help="gain vs angle of one combiner")
    p.add_argument("code")
    p.add_argument("row", type=int)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--points", type=int, default=721)
    p.set_defaults(func=cmd_beampattern)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
