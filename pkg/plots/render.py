#!/usr/bin/env python3
"""Render figures from solver CSV dumps.

Reads the snapshot/report CSV files written by the relax-rd CLI and
produces publication-style images: travelling-wave overlays with the exact
profile, 2D support maps over time, the frog-model multi-panel evolution,
and convergence-rate tables.  This script only consumes files; it never
imports the solver.

Usage:
  plots/render.py --kind wave_overlay --in snap_*.csv --exact exact_*.csv --out fig.png
  plots/render.py --kind support_map --in snap_*.csv --out fig.png
  plots/render.py --kind frog_panels --in snap_0.csv ... snap_5.csv --out fig.png
  plots/render.py --kind rate_table --in report.csv --out fig.png
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

KINDS = ("wave_overlay", "support_map", "frog_panels", "rate_table")


class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple
    output: str
    exact_inputs: tuple = ()
    threshold: float = 1e-6

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")
        if not self.inputs:
            raise SchemaError("no input files given")


@dataclass
class RenderResult:
    path: str
    metrics: dict = field(default_factory=dict)


@dataclass
class Snapshot:
    t: float
    names: list
    columns: np.ndarray      # (ncols, npoints)
    path: str

    @property
    def is_2d(self):
        return self.names[:2] == ["x", "y"]


def read_snapshot(path: str) -> Snapshot:
    """Parse one snapshot CSV; schema errors name the file and line."""
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as exc:
        raise SchemaError(f"{path}: {exc}") from None
    if not lines or not lines[0].startswith("# t="):
        raise SchemaError(f"{path}:1: expected '# t=<time>' header")
    try:
        t = float(lines[0][4:])
    except ValueError:
        raise SchemaError(f"{path}:1: bad time value {lines[0][4:]!r}") from None
    if len(lines) < 3:
        raise SchemaError(f"{path}:2: snapshot has no data rows")
    names = lines[1].split(",")
    if names[0] != "x":
        raise SchemaError(f"{path}:2: first column must be 'x', got {names[0]!r}")
    rows = []
    for i, line in enumerate(lines[2:], start=3):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != len(names):
            raise SchemaError(f"{path}:{i}: {len(parts)} fields, header has {len(names)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise SchemaError(f"{path}:{i}: non-numeric field") from None
    return Snapshot(t, names, np.array(rows).T, path)


def read_report(path: str):
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as exc:
        raise SchemaError(f"{path}: {exc}") from None
    header = "m,error_l1,error_l2,rate_l1,rate_l2,wall_time"
    if not lines or lines[0] != header:
        raise SchemaError(f"{path}:1: expected report header {header!r}")
    rows = []
    for i, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 6:
            raise SchemaError(f"{path}:{i}: expected 6 fields")
        rows.append([parts[0]] + [p if p else None for p in parts[1:]])
    return rows


def _save(fig, output: str) -> None:
    os.makedirs(os.path.dirname(output) or ".", exist_ok=True)
    fig.savefig(output, dpi=110, metadata={"Software": "relax-rd plots"})
    plt.close(fig)


def _render_wave_overlay(spec: FigureSpec) -> RenderResult:
    """Markers over the exact profiles.  Two deviation metrics are
    annotated: the raw maximum over all markers, and the maximum with the
    single front-bracketing marker of each snapshot excluded -- at a
    square-root front the exact slope is unbounded inside that one cell,
    so its pointwise value measures sub-cell front placement, not the
    visual quality of the overlay."""
    snaps = [read_snapshot(p) for p in spec.inputs]
    exacts = [read_snapshot(p) for p in spec.exact_inputs]
    if exacts and len(exacts) != len(snaps):
        raise SchemaError("need one exact profile per snapshot (or none)")
    snaps.sort(key=lambda s: s.t)
    exacts.sort(key=lambda s: s.t)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    max_dev = off_front_dev = None
    for i, snap in enumerate(snaps):
        x, u = snap.columns[0], snap.columns[1]
        ax.plot(x[::4], u[::4], "o", ms=3.0, mfc="none", color="C0")
        if exacts:
            ex = exacts[i]
            if ex.columns.shape[1] != snap.columns.shape[1]:
                raise SchemaError(f"{ex.path}: exact grid differs from {snap.path}")
            ax.plot(ex.columns[0], ex.columns[1], "-", lw=1.0, color="k")
            dev = np.abs(u - ex.columns[1])
            max_dev = max(max_dev or 0.0, float(dev.max()))
            support = np.where(ex.columns[1] > 0)[0]
            if len(support):
                last = support[-1]
                drop = [i for i in (last, last + 1) if i < len(dev)]
                dev = np.delete(dev, drop)
            off_front_dev = max(off_front_dev or 0.0, float(dev.max()))
    ax.set_xlabel("x")
    ax.set_ylabel(snaps[0].names[1])
    times = ", ".join(f"{s.t:g}" for s in snaps)
    title = f"numerical (markers) at t = {times}"
    if max_dev is not None:
        title += (f"; exact (lines), max marker deviation {max_dev:.2e}"
                  f" ({off_front_dev:.2e} off-front)")
    ax.set_title(title, fontsize=9)
    _save(fig, spec.output)
    return RenderResult(spec.output, {"max_marker_deviation": max_dev,
                                      "off_front_deviation": off_front_dev})


def _render_support_map(spec: FigureSpec) -> RenderResult:
    snaps = sorted((read_snapshot(p) for p in spec.inputs), key=lambda s: s.t)
    for s in snaps:
        if not s.is_2d:
            raise SchemaError(f"{s.path}: support maps need 2D snapshots (x,y,u)")
    n = len(snaps)
    fig, axes = plt.subplots(1, n, figsize=(2.4 * n, 2.6), squeeze=False)
    supports = []
    for ax, snap in zip(axes[0], snaps):
        x, y, u = snap.columns[0], snap.columns[1], snap.columns[2]
        xs, ys = np.unique(x), np.unique(y)
        grid = u.reshape(len(ys), len(xs))
        mask = grid > spec.threshold
        supports.append(int(mask.sum()))
        ax.imshow(mask, origin="lower", extent=(xs[0], xs[-1], ys[0], ys[-1]),
                  cmap="Greys", vmin=0, vmax=1, interpolation="nearest")
        ax.set_title(f"t = {snap.t:g}", fontsize=9)
        ax.set_xticks([])
        ax.set_yticks([])
    _save(fig, spec.output)
    return RenderResult(spec.output, {"support_cells": supports})


FROG_COLS = ["u_m", "u_s", "c_u", "v_m", "v_s"]


def _render_frog_panels(spec: FigureSpec) -> RenderResult:
    snaps = sorted((read_snapshot(p) for p in spec.inputs), key=lambda s: s.t)
    for s in snaps:
        if s.names[1:] != FROG_COLS:
            raise SchemaError(f"{s.path}: expected columns x,{','.join(FROG_COLS)}")
    n = len(snaps)
    ncols = 2
    nrows = math.ceil(n / ncols)
    fig, axes = plt.subplots(nrows, ncols, figsize=(9, 2.4 * nrows), squeeze=False)
    for k, snap in enumerate(snaps):
        ax = axes[k // ncols][k % ncols]
        x = snap.columns[0]
        um, us, cu, vm, vs = snap.columns[1:6]
        ax.plot(x, um, color="C0", lw=1.2, label="u migrating")
        ax.plot(x, us, color="C0", lw=0.8, alpha=0.5, label="u settled")
        ax.plot(x, vm, color="C2", lw=1.2, label="v migrating")
        ax.plot(x, vs, color="C2", lw=0.8, alpha=0.5, label="v settled")
        ax.plot(x, us + vs, "k--", lw=1.2, label="total settled")
        ax.set_title(f"t = {snap.t:g}", fontsize=9)
        if k == 0:
            ax.legend(fontsize=7, loc="upper right")
    for k in range(n, nrows * ncols):
        axes[k // ncols][k % ncols].axis("off")
    fig.tight_layout()
    _save(fig, spec.output)
    return RenderResult(spec.output, {"panels": n})


def _render_rate_table(spec: FigureSpec) -> RenderResult:
    rows = read_report(spec.inputs[0])
    fig, ax = plt.subplots(figsize=(6.4, 0.5 + 0.4 * len(rows)))
    ax.axis("off")
    header = ["N", "L1 error", "L2 error", "L1 rate", "L2 rate"]
    cells = []
    for r in rows:
        fmt = lambda v, spec_="{:.4e}": "-" if v is None else spec_.format(float(v))
        cells.append([r[0], fmt(r[1]), fmt(r[2]),
                      fmt(r[3], "{:.2f}"), fmt(r[4], "{:.2f}")])
    table = ax.table(cellText=cells, colLabels=header, loc="center")
    table.scale(1.0, 1.3)
    _save(fig, spec.output)
    return RenderResult(spec.output, {"rows": len(rows)})


_RENDERERS = {
    "wave_overlay": _render_wave_overlay,
    "support_map": _render_support_map,
    "frog_panels": _render_frog_panels,
    "rate_table": _render_rate_table,
}


def render(spec: FigureSpec) -> RenderResult:
    """Render one figure; inputs are validated before anything is written."""
    return _RENDERERS[spec.kind](spec)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kind", required=True, choices=KINDS)
    ap.add_argument("--in", dest="inputs", nargs="+", required=True)
    ap.add_argument("--exact", dest="exacts", nargs="*", default=[])
    ap.add_argument("--out", required=True)
    ap.add_argument("--threshold", type=float, default=1e-6,
                    help="support cutoff for support_map")
    args = ap.parse_args(argv)
    try:
        spec = FigureSpec(args.kind, tuple(args.inputs), args.out,
                          tuple(args.exacts), args.threshold)
        result = render(spec)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for key, val in result.metrics.items():
        print(f"{key}: {val}")
    print(f"wrote {result.path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
