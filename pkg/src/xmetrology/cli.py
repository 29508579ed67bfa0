"""Command-line entry point: ``xmetrology {verify,sweep,figure}``.

Settings resolve as command-line flag, then ``key = value`` config file, then
built-in default.  Invalid sweep specifications and unknown figure ids exit
with status 1 and a one-line diagnostic; ``verify`` exits 1 on unregistered
mismatches and 2 when a suite crashes.
"""

from __future__ import annotations

import argparse
import sys
import traceback
from pathlib import Path

from . import audit, sweep
from .oracle import FD_STEP

SWEEP_DEFAULTS = {
    "quantity": "all",
    "sign": "plus",
    "channel": "none",
    "alpha": str(sweep.FIGURE_ALPHA),
    "beta": ",".join(str(b) for b in sweep.FIGURE_BETAS),
    "q": str(sweep.FIGURE_Q),
    "p": "0",
    "fd_step": str(FD_STEP),
    "closed_form": "general",
    "out": "sweep.csv",
}
CONFIG_KEYS = set(SWEEP_DEFAULTS) | {"suite"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def read_config(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment, dashes in keys become underscores."""
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {n}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise UsageError(f"config line {n}: unknown key {key!r}")
        values[key] = value
    return values


def resolve(args: argparse.Namespace, keys, defaults: dict) -> dict:
    config = read_config(args.config) if getattr(args, "config", None) else {}
    out = {}
    for key in keys:
        flag = getattr(args, key, None)
        out[key] = flag if flag is not None else config.get(key, defaults.get(key))
    return out


def _add_grid_flags(p: argparse.ArgumentParser):
    p.add_argument("--alpha", help="coherent amplitude(s): value, list a,b or range start:step:stop")
    p.add_argument("--beta", help="second coherent amplitude(s)")
    p.add_argument("--q", help="mixing parameter grid in [0, 1]")
    p.add_argument("--p", help="decoherence probability grid in [0, 1]")
    p.add_argument("--sign", help="plus, minus or both")
    p.add_argument("--fd-step", dest="fd_step", help=f"finite-difference step (default {FD_STEP})")
    p.add_argument(
        "--closed-form",
        dest="closed_form",
        help="general (block formulas, default) or printed (channel expressions verbatim)",
    )
    p.add_argument("--config", help="plain-text key = value file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="xmetrology", description="QFI, skew information and concurrence for two-qubit X-states.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run the closed-form vs oracle suites")
    v.add_argument("--out", default="verify-report", help="directory for verify_report.json and discrepancies.jsonl")
    v.add_argument("--fd-step", dest="fd_step", type=float, default=FD_STEP)
    v.add_argument("--suite", action="append", choices=sorted(audit.SUITES), help="run only this suite (repeatable)")
    v.add_argument("--quiet", action="store_true")

    s = sub.add_parser("sweep", help="write a CSV over a parameter grid")
    s.add_argument("--quantity", help="qfi, skew, concurrence or all")
    s.add_argument("--channel", help="none, pdc, dpc, adc (comma list allowed)")
    s.add_argument("--out", help="CSV path")
    _add_grid_flags(s)

    f = sub.add_parser("figure", help="reproduce a figure as CSV + SVG")
    f.add_argument("id", help="fig1, fig2, fig3 or fig4")
    f.add_argument("--out", default=".", help="output directory")
    _add_grid_flags(f)
    return parser


def spec_from_settings(settings: dict) -> sweep.SweepSpec:
    try:
        fd_step = float(settings["fd_step"])
    except ValueError:
        raise sweep.SweepSpecError(f"fd-step: cannot parse {settings['fd_step']!r}") from None
    return sweep.SweepSpec(
        quantity=settings["quantity"],
        signs=sweep.parse_signs(settings["sign"]),
        channels=tuple(c.strip() for c in str(settings["channel"]).split(",") if c.strip()),
        alpha=sweep.parse_grid(settings["alpha"], "alpha"),
        beta=sweep.parse_grid(settings["beta"], "beta"),
        q=sweep.parse_grid(settings["q"], "q"),
        p=sweep.parse_grid(settings["p"], "p"),
        fd_step=fd_step,
        closed_form=settings["closed_form"],
        out=settings["out"],
    )


def cmd_verify(args) -> int:
    progress = None if args.quiet else (lambda line: print(line, flush=True))
    result = audit.run_verify(args.suite, step=args.fd_step, progress=progress)
    report, disc = audit.write_reports(result, args.out)
    summary = result.summary()
    for check in result.checks:
        if check.status != "pass":
            print(f"{check.status:24s} {check.check_id}  max deviation {check.deviation:.3g}")
    for name, err in result.errors.items():
        print(f"suite error              {name}: {err}")
    print(
        f"{summary['checks']} checks in {summary['suites']} suites, "
        f"{summary['elapsed_seconds']} s; report {report}; discrepancies {disc}"
    )
    if result.errors:
        return 2
    return 0 if result.ok else 1


def cmd_sweep(args) -> int:
    settings = resolve(args, SWEEP_DEFAULTS, SWEEP_DEFAULTS)
    spec = spec_from_settings(settings)
    path = sweep.write_sweep(sweep.run_sweep(spec), spec.out)
    print(f"wrote {spec.n_rows()} rows to {path}")
    return 0


def cmd_figure(args) -> int:
    if args.id not in sweep.FIGURE_IDS:
        raise sweep.SweepSpecError(f"unknown figure id {args.id!r}; expected one of {', '.join(sweep.FIGURE_IDS)}")
    settings = resolve(args, ("alpha", "beta", "q", "p", "sign", "fd_step", "closed_form"), {})
    overrides = {}
    for key in ("alpha", "beta", "q", "p"):
        if settings[key] is not None:
            overrides[key] = sweep.parse_grid(settings[key], key)
    if settings["sign"] is not None:
        overrides["signs"] = sweep.parse_signs(settings["sign"])
    if settings["fd_step"] is not None:
        overrides["fd_step"] = float(settings["fd_step"])
    if settings["closed_form"] is not None:
        overrides["closed_form"] = settings["closed_form"]
    paths = sweep.run_figure(args.id, args.out, **overrides)
    print(f"wrote {paths['csv']}, {paths['svg']}, {paths['meta']}")
    return 0


COMMANDS = {"verify": cmd_verify, "sweep": cmd_sweep, "figure": cmd_figure}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return COMMANDS[args.command](args)
    except (UsageError, sweep.SweepSpecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
