#!/usr/bin/env python3
"""Regenerate paper-style figures from trotter-scope CSV artifacts.

Usage: ``python plots/render.py --spec fig.json``

The spec is a JSON object::

    {"kind": "bounds", "inputs": ["one-step.csv"],
     "output": "bounds.png", "logy": true, "logx": false}

Five figure kinds, one per CSV schema (no cross-file joins; files listed
together are overlaid):

* ``bounds``        - error-vs-time traces with every bound overlay
                      (one-step scenario CSV)
* ``entropy``       - state and operator-induced entropy traces
                      (induced-entropy scenario CSV)
* ``distribution``  - histogram of the per-segment vector norms with the
                      Frobenius reference line (long-time scenario CSV)
* ``steps``         - minimal Trotter step counts, scrambling vs baseline
                      (min-steps scenario CSV)
* ``scan``          - energy versus peak entanglement scatter
                      (energy-entropy scenario CSV)

All numbers come from the CSVs; nothing is recomputed.  A SHA-256 checksum
of the input files is embedded in the image metadata.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

KINDS = ("bounds", "entropy", "distribution", "steps", "scan")

REQUIRED_COLUMNS = {
    "bounds": ("t", "exact", "scrambling", "worst", "haar_mean", "vecnorm",
               "entanglement", "frobprod"),
    "entropy": ("t", "s_state", "s_induced_o", "s_induced_m"),
    "distribution": ("k", "v_o", "v_o_m", "v_m"),
    "steps": ("observable", "t", "r_scrambling", "r_baseline"),
    "scan": ("energy", "s_max"),
}

BOUND_STYLES = [
    ("exact", "exact error", {"marker": ".", "lw": 1.0}),
    ("scrambling", "scrambling bound", {"lw": 1.4}),
    ("scrambling_local", "local scrambling bound", {"lw": 1.0, "ls": ":"}),
    ("vecnorm", "vector-norm bound", {"lw": 1.0}),
    ("entanglement", "entanglement bound", {"lw": 1.0}),
    ("worst", "worst case", {"ls": "--", "lw": 1.2}),
    ("haar_mean", "Haar average", {"ls": "-.", "lw": 1.2}),
    ("frobprod", "2|O|_F |M|_F dt^(p+1)", {"ls": "--", "lw": 0.9}),
]


class SpecError(Exception):
    pass


class Table:
    """One parsed CSV: '#'-prefixed metadata, a header row, string cells."""

    def __init__(self, path: Path):
        self.path = path
        self.meta: dict[str, str] = {}
        lines = path.read_text().splitlines()
        body = []
        for line in lines:
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                self.meta[key.strip()] = value.strip()
            elif line:
                body.append(line)
        if not body:
            raise SpecError(f"{path}: no header row")
        self.columns = body[0].split(",")
        self.rows = [line.split(",") for line in body[1:]]

    def require(self, columns) -> None:
        for col in columns:
            if col not in self.columns:
                raise SpecError(f"{self.path}: missing column {col!r}")

    def floats(self, column: str) -> list[float]:
        idx = self.columns.index(column)
        return [float(row[idx]) for row in self.rows]

    def strings(self, column: str) -> list[str]:
        idx = self.columns.index(column)
        return [row[idx] for row in self.rows]


def checksum(paths: list[Path]) -> str:
    digest = hashlib.sha256()
    for path in paths:
        digest.update(path.read_bytes())
    return digest.hexdigest()


def _label(table: Table, suffix: str = "") -> str:
    stem = table.path.stem
    return f"{stem} {suffix}".strip()


def draw_bounds(ax, tables, spec):
    for table in tables:
        t = table.floats("t")
        for col, label, style in BOUND_STYLES:
            if col not in table.columns:
                continue
            ys = table.floats(col)
            if any(y != y for y in ys):  # NaN column (e.g. no leading sum)
                continue
            prefix = f"{table.path.stem}: " if len(tables) > 1 else ""
            ax.plot(t, ys, label=prefix + label, **style)
    ax.set_xlabel("t")
    ax.set_ylabel("observable error")
    if spec.get("logy", True):
        ax.set_yscale("log")


def draw_entropy(ax, tables, spec):
    for table in tables:
        t = table.floats("t")
        prefix = f"{table.path.stem}: " if len(tables) > 1 else ""
        ax.plot(t, table.floats("s_state"), label=prefix + "S(psi(t))", lw=1.4)
        ax.plot(t, table.floats("s_induced_o"), label=prefix + "S(psi_O)", lw=1.0)
        ax.plot(t, table.floats("s_induced_m"), label=prefix + "S(psi_M)", lw=1.0)
    ax.set_xlabel("t")
    cut = tables[0].meta.get("cut")
    ax.set_ylabel(f"entanglement entropy{f' on {cut}' if cut else ''}")


def draw_distribution(ax, tables, spec):
    for table in tables:
        prefix = f"{table.path.stem}: " if len(tables) > 1 else ""
        for col, label in (("v_o", "v(O, psi~_rk)"), ("v_o_m", "v(O, psi~_rk,M)")):
            ax.hist(
                table.floats(col), bins=40, histtype="step", label=prefix + label
            )
        ref = table.meta.get("o_frobenius")
        if ref is not None:
            ax.axvline(
                float(ref), color="k", ls="--", lw=1.0, label=prefix + "|O|_F"
            )
    ax.set_xlabel("vector norm")
    ax.set_ylabel("count")


def draw_steps(ax, tables, spec):
    table = tables[0]
    if len(tables) > 1:
        raise SpecError("steps figures take a single input CSV")
    ts = table.floats("t")
    target_t = ts[0] if ts else None
    names, scr, base = [], [], []
    for name, t, r_s, r_b in zip(
        table.strings("observable"),
        ts,
        table.floats("r_scrambling"),
        table.floats("r_baseline"),
    ):
        if t == target_t:
            names.append(name)
            scr.append(r_s)
            base.append(r_b)
    x = range(len(names))
    width = 0.4
    ax.bar([i - width / 2 for i in x], scr, width, label="scrambling bound")
    ax.bar([i + width / 2 for i in x], base, width, label="spectral baseline")
    ax.set_xticks(list(x))
    ax.set_xticklabels(names, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel(f"Trotter steps (t={target_t})")
    if spec.get("logy", True) and scr:
        ax.set_yscale("log")


def draw_scan(ax, tables, spec):
    for table in tables:
        prefix = f"{table.path.stem}" if len(tables) > 1 else None
        ax.scatter(
            table.floats("energy"), table.floats("s_max"), s=9, label=prefix
        )
        cap = table.meta.get("max_entropy")
        if cap is not None:
            ax.axhline(float(cap), color="k", ls="--", lw=1.0)
    ax.set_xlabel("initial energy")
    ax.set_ylabel("peak entanglement entropy")


DRAWERS = {
    "bounds": draw_bounds,
    "entropy": draw_entropy,
    "distribution": draw_distribution,
    "steps": draw_steps,
    "scan": draw_scan,
}


def render(spec: dict) -> Path:
    """Render one figure spec; returns the output path."""
    kind = spec.get("kind")
    if kind not in KINDS:
        raise SpecError(f"unknown figure kind {kind!r}; choose from {KINDS}")
    inputs = [Path(p) for p in spec.get("inputs", [])]
    if not inputs:
        raise SpecError("spec needs a non-empty 'inputs' list")
    output = spec.get("output")
    if not output:
        raise SpecError("spec needs an 'output' image path")
    tables = []
    for path in inputs:
        if not path.exists():
            raise SpecError(f"input CSV not found: {path}")
        table = Table(path)
        table.require(REQUIRED_COLUMNS[kind])
        tables.append(table)

    fig, ax = plt.subplots(figsize=(6.0, 4.0), dpi=140)
    DRAWERS[kind](ax, tables, spec)
    if spec.get("logx", False):
        ax.set_xscale("log")
    handles, _ = ax.get_legend_handles_labels()
    if handles:
        ax.legend(fontsize=7, loc="best")
    ax.set_title(kind)
    fig.tight_layout()
    out_path = Path(output)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(
        out_path,
        metadata={
            "input-sha256": checksum(inputs),
            "figure-kind": kind,
        },
    )
    plt.close(fig)
    return out_path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render.py", description="render figures from trotter-scope CSVs"
    )
    parser.add_argument("--spec", required=True, type=Path, help="figure spec JSON")
    args = parser.parse_args(argv)
    try:
        spec = json.loads(args.spec.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"bad spec file: {exc}", file=sys.stderr)
        return 2
    try:
        out = render(spec)
    except SpecError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
