"""Command line: ``lpbesov run|validate|list-suites``.

Exit codes: 0 success, 1 a suite failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import SUITE_HELP, SUITES, ConfigError, from_raw, load_raw, validate

EXIT_OK, EXIT_SUITE_FAILED, EXIT_USAGE = 0, 1, 2


def _load(path):
    try:
        return load_raw(path)
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
    except ValueError as exc:  # tomllib.TOMLDecodeError subclasses ValueError
        print(f"error: {path}: {exc}", file=sys.stderr)
    return None


def cmd_validate(args) -> int:
    raw = _load(args.config)
    if raw is None:
        return EXIT_USAGE
    diags = validate(raw)
    for d in diags:
        print(d)
    if any(d.level == "error" for d in diags):
        return EXIT_USAGE
    print("ok: configuration is runnable")
    return EXIT_OK


def cmd_run(args) -> int:
    from .runner import run

    raw = _load(args.config)
    if raw is None:
        return EXIT_USAGE
    try:
        cfg = from_raw(raw)
    except ConfigError as exc:
        for d in exc.diagnostics:
            print(d, file=sys.stderr)
        return EXIT_USAGE
    if args.output_dir:
        cfg.output_dir = args.output_dir
    for note in cfg.notes:
        print(note)
    status, summary = run(cfg, threads=args.threads)
    for name, s in summary["suites"].items():
        print(f"{name:18s} {s['status']}" + (f"  ({s['error']})" if s["error"] else ""))
    for c in summary["criteria"]:
        where = f" [{c['group']}]" if c["group"] else ""
        if not c["acceptance_setup"]:
            where += " (outside the acceptance setup)"
        print(f"  {'PASS' if c['passed'] else 'FAIL'} #{c['id']} {c['name']}{where}: {c['measured']}")
    return status


def cmd_list(args) -> int:
    for name in SUITES:
        print(f"{name:18s} {SUITE_HELP[name]}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lpbesov", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the suites named in a config file")
    p.add_argument("config")
    p.add_argument("-o", "--output-dir", help="overrides output_dir (LPBESOV_OUTPUT_DIR wins)")
    p.add_argument("-j", "--threads", type=int, default=None,
                   help="suites run concurrently (default: LPBESOV_THREADS or 1)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("validate", help="list configuration problems")
    p.add_argument("config")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("list-suites", help="show the available suites")
    p.set_defaults(func=cmd_list)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
