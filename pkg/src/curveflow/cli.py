"""Command line entry point: ``curveflow run | compare | presets``."""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from importlib import resources
from pathlib import Path

from .config import ConfigError, load, parse_text
from .experiment import EXIT_CONFIG, EXIT_OK, fmt, merge_traces, run_experiment


def preset_names() -> list:
    root = resources.files("curveflow") / "presets"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".cfg"))


def preset_text(name: str) -> str:
    return (resources.files("curveflow") / "presets" / f"{name}.cfg").read_text()


def _preset_title(text: str) -> str:
    for line in text.splitlines():
        if line.startswith("#"):
            return line.lstrip("# ").strip()
    return ""


def load_config(name_or_path: str):
    """A config path, or the name of a shipped preset."""
    path = Path(name_or_path)
    if not path.exists() and name_or_path in preset_names():
        return parse_text(preset_text(name_or_path), f"preset:{name_or_path}")
    return load(path)


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    result = run_experiment(cfg, args.out)
    if result.message:
        print(f"error: {result.message}", file=sys.stderr)
    if result.summary:
        s = result.summary
        print(f"{cfg.scenario}: {s['steps']} steps, termination {s['termination']}, "
              f"energy {s['initial_energy']:.6g} -> {s['final_energy']:.6g}, "
              f"output {result.out_dir}")
    return result.exit_code


def cmd_compare(args) -> int:
    try:
        cols, body, labels = merge_traces(args.traces)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.svg and f"{labels[0]}:{args.column}" not in cols:
        print(f"error: no trace column {args.column!r}", file=sys.stderr)
        return EXIT_CONFIG
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh)
        w.writerow(cols)
        for row in body:
            w.writerow([fmt(int(row[0]))] + [fmt(v) for v in row[1:]])
    finally:
        if args.out:
            fh.close()
    if args.svg:
        try:
            from .plots import write_energy_svg
        except ImportError:
            print("error: SVG output needs matplotlib", file=sys.stderr)
            return EXIT_CONFIG
        series = [(lab, body[:, cols.index(f"{lab}:{args.column}")]) for lab in labels]
        write_energy_svg(args.svg, series, ylabel=args.column)
    return EXIT_OK


def cmd_presets(args) -> int:
    if args.action == "list":
        for name in preset_names():
            print(f"{name:24s} {_preset_title(preset_text(name))}")
        return EXIT_OK
    if args.name not in preset_names():
        print(f"error: no preset named {args.name!r}", file=sys.stderr)
        return EXIT_CONFIG
    sys.stdout.write(preset_text(args.name))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="curveflow",
                                     description="Constrained gradient flows of curves on surfaces.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one experiment from a config file or preset name")
    p.add_argument("config")
    p.add_argument("--out", help="output directory (overrides config and CURVEFLOW_OUT)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="merge traces by step, optionally plot an overlay")
    p.add_argument("traces", nargs="+")
    p.add_argument("--svg", help="write an overlay plot")
    p.add_argument("--column", default="energy", help="trace column to plot (default: energy)")
    p.add_argument("--out", help="merged CSV path (default: stdout)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("presets", help="list or print the shipped presets")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors exit with 2 already
        return int(exc.code or 0)
    if args.command == "presets" and args.action == "show" and not args.name:
        print("error: presets show needs a preset name", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "compare" and args.column == "k":
        print("error: cannot plot the step column", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
