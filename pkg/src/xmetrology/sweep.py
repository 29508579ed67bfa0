"""Parameter sweeps over quasi-Werner families and figure-data reproduction.

A sweep evaluates closed-form and oracle values on a rectangular grid and
writes one CSV row per (family, alpha, beta, q, channel, p, quantity) point.
Rows are emitted in nested-loop order over sorted grid axes, so identical
specs give byte-identical files no matter how the work is scheduled.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import oracle
from . import quasi_werner as qw
from .channels import Channel

CSV_HEADER = "family,sign,alpha,beta,q,channel,p,s,quantity,closed_form,oracle,abs_dev"
QUANTITY_CHOICES = ("qfi", "skew", "concurrence", "all")
CHANNEL_CHOICES = ("none", "pdc", "dpc", "adc")
FAMILY_NAMES = {1: "quasiWernerPlus", -1: "quasiWernerMinus"}
CLOSED_FORM_MODES = ("general", "printed")

FIGURE_ALPHA = 0.5
FIGURE_BETAS = (0.5, 0.7, 1.0, 1.5)
FIGURE_Q = 0.9
FIGURE_IDS = ("fig1", "fig2", "fig3", "fig4")


class SweepSpecError(ValueError):
    """Raised for grids that are empty, malformed or outside the parameter domain."""


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def parse_grid(text, name: str) -> tuple:
    """``"0:0.01:1"`` (inclusive start:step:stop), ``"0.5,0.7"`` or a single number."""
    if isinstance(text, (int, float)):
        return (float(text),)
    if isinstance(text, (list, tuple)):
        values = [float(v) for v in text]
    else:
        text = str(text).strip()
        try:
            if ":" in text:
                parts = [float(v) for v in text.split(":")]
                if len(parts) != 3:
                    raise SweepSpecError(f"{name}: range must be start:step:stop, got {text!r}")
                start, step, stop = parts
                if step <= 0:
                    raise SweepSpecError(f"{name}: range step must be positive, got {step}")
                count = math.floor((stop - start) / step + 1e-9) + 1
                values = [round(start + i * step, 12) for i in range(max(count, 0))]
            else:
                values = [float(v) for v in text.split(",") if v.strip()]
        except ValueError as exc:
            if isinstance(exc, SweepSpecError):
                raise
            raise SweepSpecError(f"{name}: cannot parse {text!r}") from None
    if not values:
        raise SweepSpecError(f"{name}: empty grid")
    if any(not math.isfinite(v) for v in values):
        raise SweepSpecError(f"{name}: non-finite value")
    return tuple(sorted(set(values)))


def parse_signs(text) -> tuple:
    if text in ("both", None):
        return (1, -1)
    if isinstance(text, (list, tuple)):
        signs = {qw.parse_sign(t) for t in text}
    else:
        try:
            signs = {qw.parse_sign(t.strip()) for t in str(text).split(",")}
        except ValueError as exc:
            raise SweepSpecError(f"sign: {exc}") from None
    return tuple(sorted(signs, reverse=True))


@dataclass(frozen=True)
class SweepSpec:
    quantity: str = "all"
    signs: tuple = (1,)
    channels: tuple = ("none",)
    alpha: tuple = (FIGURE_ALPHA,)
    beta: tuple = FIGURE_BETAS
    q: tuple = (FIGURE_Q,)
    p: tuple = (0.0,)
    theta: str = "q"
    fd_step: float = oracle.FD_STEP
    closed_form: str = "general"
    out: Optional[str] = None

    def __post_init__(self):
        if self.quantity not in QUANTITY_CHOICES:
            raise SweepSpecError(f"quantity must be one of {', '.join(QUANTITY_CHOICES)}, got {self.quantity!r}")
        for ch in self.channels:
            if ch not in CHANNEL_CHOICES:
                raise SweepSpecError(f"channel must be one of {', '.join(CHANNEL_CHOICES)}, got {ch!r}")
        if self.theta != "q":
            raise SweepSpecError("only theta = q is supported")
        if self.closed_form not in CLOSED_FORM_MODES:
            raise SweepSpecError(f"closed-form mode must be general or printed, got {self.closed_form!r}")
        if not (0 < self.fd_step < 0.1):
            raise SweepSpecError(f"fd-step must lie in (0, 0.1), got {self.fd_step}")
        for name in ("signs", "channels", "alpha", "beta", "q", "p"):
            if not getattr(self, name):
                raise SweepSpecError(f"{name}: empty grid")
        if min(self.alpha) <= 0 or min(self.beta) <= 0:
            raise SweepSpecError("alpha and beta must be positive")
        if min(self.q) < 0 or max(self.q) > 1:
            raise SweepSpecError("q must lie in [0, 1]")
        if min(self.p) < 0 or max(self.p) > 1:
            raise SweepSpecError("p must lie in [0, 1]")

    @property
    def quantities(self) -> tuple:
        if self.quantity == "all":
            return tuple(sorted(qw.QUANTITIES))
        return (self.quantity,)

    def n_rows(self) -> int:
        per_channel = sum(1 if ch == "none" else len(self.p) for ch in self.channels)
        return len(self.signs) * len(self.alpha) * len(self.beta) * len(self.q) * per_channel * len(self.quantities)

    def metadata(self) -> dict:
        meta = asdict(self)
        meta["signs"] = [qw.sign_label(s) for s in self.signs]
        meta["quantities"] = list(self.quantities)
        meta["estimated_parameter"] = "q"
        meta["rows"] = self.n_rows()
        return meta


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: list = field(default_factory=list)

    def csv_text(self) -> str:
        lines = [CSV_HEADER]
        for r in self.rows:
            lines.append(
                ",".join(
                    [
                        r["family"],
                        r["sign"],
                        fmt(r["alpha"]),
                        fmt(r["beta"]),
                        fmt(r["q"]),
                        r["channel"],
                        fmt(r["p"]),
                        fmt(r["s"]),
                        r["quantity"],
                        fmt(r["closed_form"]),
                        fmt(r["oracle"]),
                        fmt(r["abs_dev"]),
                    ]
                )
            )
        return "\n".join(lines) + "\n"

    def column(self, quantity: str, sign: int, beta: float, key: str = "closed_form") -> np.ndarray:
        label = qw.sign_label(sign)
        return np.array(
            [r[key] for r in self.rows if r["quantity"] == quantity and r["sign"] == label and r["beta"] == beta]
        )


def _block(spec: SweepSpec, sign: int, alpha: float, beta: float) -> list:
    """All rows for one (sign, alpha, beta), in q, channel, p, quantity order."""
    points = []
    for q in spec.q:
        for channel in spec.channels:
            for p in (0.0,) if channel == "none" else spec.p:
                points.append((channel, p, q))
    chans = {}
    for channel, p, _ in points:
        if (channel, p) not in chans:
            chans[(channel, p)] = None if channel == "none" else Channel(channel, p)
    ref = qw.oracle_points(
        alpha, beta, sign, [(chans[(c, p)], q) for c, p, q in points], spec.fd_step, spec.quantities
    )
    rows = []
    for j, (channel, p, q) in enumerate(points):
        ch = chans[(channel, p)]
        params = qw.QuasiWernerParams(alpha, beta, q, sign)
        if spec.closed_form == "general":
            try:
                closed = qw.block_closed_forms(params, ch)
            except (ArithmeticError, ValueError):
                closed = {}
        for quantity in spec.quantities:
            if spec.closed_form == "general":
                value = float(closed.get(quantity, float("nan")))
            else:
                value = qw.closed_value(params, ch, quantity, "printed")
            o = float(ref[quantity][j])
            rows.append(
                {
                    "family": FAMILY_NAMES[sign],
                    "sign": qw.sign_label(sign),
                    "alpha": alpha,
                    "beta": beta,
                    "q": q,
                    "channel": channel,
                    "p": p,
                    "s": 1.0 - p,
                    "quantity": quantity,
                    "closed_form": value,
                    "oracle": o,
                    "abs_dev": abs(value - o),
                }
            )
    return rows


def run_sweep(spec: SweepSpec, workers: Optional[int] = None) -> SweepResult:
    """Evaluate every grid point; blocks may run on a thread pool but rows keep grid order."""
    tasks = [(sign, alpha, beta) for sign in spec.signs for alpha in spec.alpha for beta in spec.beta]
    workers = workers or min(4, os.cpu_count() or 1)
    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(workers) as pool:
            blocks = list(pool.map(lambda t: _block(spec, *t), tasks))
    else:
        blocks = [_block(spec, *t) for t in tasks]
    return SweepResult(spec, [row for block in blocks for row in block])


def write_sweep(result: SweepResult, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(result.csv_text())
    meta = path.with_suffix(".meta.json")
    meta.write_text(json.dumps(result.spec.metadata(), indent=2, sort_keys=True) + "\n")
    return path


# --------------------------------------------------------------------------
# Figures
# --------------------------------------------------------------------------

FIGURE_CHANNELS = {"fig2": "pdc", "fig3": "dpc", "fig4": "adc"}
FIGURE_TITLES = {
    "fig1": "Concurrence versus q",
    "fig2": "Phase damping",
    "fig3": "Depolarizing",
    "fig4": "Amplitude damping",
}
QUANTITY_LABELS = {"qfi": "QFI", "skew": "Skew information", "concurrence": "Concurrence"}


def figure_spec(fig_id: str, **overrides) -> SweepSpec:
    """Default sweep behind each figure; keyword overrides replace individual fields."""
    if fig_id not in FIGURE_IDS:
        raise SweepSpecError(f"unknown figure id {fig_id!r}; expected one of {', '.join(FIGURE_IDS)}")
    if fig_id == "fig1":
        base = dict(quantity="concurrence", channels=("none",), q=parse_grid("0:0.01:1", "q"), p=(0.0,))
    else:
        base = dict(quantity="all", channels=(FIGURE_CHANNELS[fig_id],), q=(FIGURE_Q,), p=parse_grid("0:0.01:1", "p"))
    base.update(signs=(1, -1), alpha=(FIGURE_ALPHA,), beta=FIGURE_BETAS)
    base.update({k: v for k, v in overrides.items() if v is not None})
    return SweepSpec(**base)


_COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _ticks(lo: float, hi: float, n: int = 5) -> list:
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def render_svg(result: SweepResult, fig_id: str) -> str:
    """Plain SVG 1.1: one panel per (sign, quantity), one polyline per beta."""
    spec = result.spec
    xkey = "q" if fig_id == "fig1" else "p"
    quantities = spec.quantities
    pw, ph, margin = 300, 220, 60
    width = margin + len(quantities) * (pw + margin)
    height = 40 + len(spec.signs) * (ph + margin + 20)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<text x="{width / 2}" y="20" text-anchor="middle" font-size="14">{FIGURE_TITLES[fig_id]}</text>',
    ]
    for row, sign in enumerate(spec.signs):
        for col, quantity in enumerate(quantities):
            x0 = margin + col * (pw + margin)
            y0 = 40 + row * (ph + margin + 20)
            curves = []
            for beta in spec.beta:
                sel = [
                    r
                    for r in result.rows
                    if r["quantity"] == quantity and r["sign"] == qw.sign_label(sign) and r["beta"] == beta
                ]
                xs = np.array([r[xkey] for r in sel])
                ys = np.array([r["closed_form"] if math.isfinite(r["closed_form"]) else r["oracle"] for r in sel])
                curves.append((beta, xs, ys))
            allx = np.concatenate([c[1] for c in curves])
            ally = np.concatenate([c[2] for c in curves])
            xlo, xhi = float(allx.min()), float(allx.max())
            ylo, yhi = min(0.0, float(ally.min())), float(ally.max())
            if xhi == xlo:
                xhi = xlo + 1.0
            if yhi == ylo:
                yhi = ylo + 1.0

            def sx(v):
                return x0 + (v - xlo) / (xhi - xlo) * pw

            def sy(v):
                return y0 + ph - (v - ylo) / (yhi - ylo) * ph

            out.append(f'<rect x="{x0}" y="{y0}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
            for t in _ticks(xlo, xhi):
                out.append(f'<text x="{sx(t):.2f}" y="{y0 + ph + 14}" text-anchor="middle">{t:.2g}</text>')
            for t in _ticks(ylo, yhi):
                out.append(f'<text x="{x0 - 4}" y="{sy(t) + 4:.2f}" text-anchor="end">{t:.3g}</text>')
            out.append(f'<text x="{x0 + pw / 2}" y="{y0 + ph + 30}" text-anchor="middle">{xkey}</text>')
            label = f"{QUANTITY_LABELS[quantity]} ({'psi+' if sign > 0 else 'psi-'})"
            out.append(f'<text x="{x0 + pw / 2}" y="{y0 - 6}" text-anchor="middle">{label}</text>')
            for k, (beta, xs, ys) in enumerate(curves):
                colour = _COLOURS[k % len(_COLOURS)]
                pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(xs, ys))
                out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{pts}"/>')
                ly = y0 + 14 + 14 * k
                out.append(f'<line x1="{x0 + pw - 70}" y1="{ly - 4}" x2="{x0 + pw - 55}" y2="{ly - 4}" stroke="{colour}"/>')
                out.append(f'<text x="{x0 + pw - 50}" y="{ly}">beta={beta:g}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def run_figure(fig_id: str, out_dir, **overrides) -> dict:
    """Write ``<id>.csv``, ``<id>.svg`` and ``<id>.meta.json``; return their paths."""
    spec = figure_spec(fig_id, **overrides)
    result = run_sweep(spec)
    out = Path(out_dir)
    csv_path = write_sweep(result, out / f"{fig_id}.csv")
    svg_path = out / f"{fig_id}.svg"
    svg_path.write_text(render_svg(result, fig_id))
    return {"csv": csv_path, "svg": svg_path, "meta": csv_path.with_suffix(".meta.json"), "result": result}
