"""Command line entry point: ``limitcone run|render|verify``."""
import argparse
import json
import os
import sys

from .errors import LimitconeError
from .report import SVG, verify, write_bundle
from .render import render_bundle
from .scenarios import load_config, run_scenario

EXIT_IO = 6


def _parser():
    p = argparse.ArgumentParser(prog="limitcone",
                                description="Limit cones of multi-Fuchsian representations.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario and write report.json, curves.csv, cone.svg")
    run.add_argument("config")
    run.add_argument("--precision-bits", type=int)
    run.add_argument("--q-max", type=int)
    run.add_argument("--word-max-len", type=int)
    run.add_argument("--out-dir")

    render = sub.add_parser("render", help="draw a stored bundle as SVG")
    render.add_argument("bundle")
    render.add_argument("-o", "--output", required=True)

    ver = sub.add_parser("verify", help="recheck stored curves and cloud against the stored hull")
    ver.add_argument("bundle")
    return p


def _run(args):
    cfg = load_config(args.config, precision_bits=args.precision_bits, q_max=args.q_max,
                      word_max_len=args.word_max_len, out_dir=args.out_dir)
    out_dir = cfg.out_dir or os.path.join("out", cfg.scenario)
    bundle = run_scenario(cfg)
    write_bundle(bundle, out_dir)
    render_bundle(out_dir, os.path.join(out_dir, SVG))
    h = bundle.hull
    print(f"{cfg.scenario}: {h.verdict} hull with {len(h.vertices)} vertices "
          f"at {bundle.precision_bits} bits")
    if bundle.cloud_summary:
        c = bundle.cloud_summary
        print(f"cloud: {c['points']} points, {c['outside']} outside")
    print(f"wrote {out_dir}")
    return bundle.exit_status


def _verify(args):
    status, summary = verify(args.bundle)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return status


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == "run":
            return _run(args)
        if args.command == "render":
            render_bundle(args.bundle, args.output)
            return 0
        return _verify(args)
    except LimitconeError as exc:
        print(f"limitcone: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"limitcone: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
