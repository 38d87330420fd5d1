"""Plot tool: render a laboratory run directory into PNG and SVG figures.

    solitonplots --kind distance --in runs/stability --out figs

Rendering is a pure function of the input files: fixed style, stripped
timestamps, salted SVG ids, so repeated invocations are byte-identical.
Exit codes: 0 rendered, 2 missing or schema-mismatched input.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib.pyplot as plt

from solitonplots import figures
from solitonplots.readers import (MissingInput, SchemaMismatch, find_tables,
                                  load_summary, read_table)

KINDS = ("distance", "modulation", "spectrum", "coercivity")

MODULATION = "blacksoliton.modulation.v1"
DISTANCE = "blacksoliton.distance.v1"
SPECTRUM = "blacksoliton.spectrum.v1"
COERCIVITY = "blacksoliton.coercivity.v1"


@dataclass(frozen=True)
class PlotSpec:
    kind: str
    indir: Path
    outdir: Path
    logy: bool = False


def _build(spec: PlotSpec) -> plt.Figure:
    if spec.kind == "distance":
        modulated = find_tables(spec.indir, "modulation*.csv", MODULATION)
        if not modulated:
            raise MissingInput(f"{spec.indir}: no modulation*.csv")
        raw = find_tables(spec.indir, "distance*.csv", DISTANCE) \
            + find_tables(spec.indir, "control_*.csv", DISTANCE)
        thresholds = []
        summary_path = spec.indir / "summary.json"
        if summary_path.is_file():
            ladder = load_summary(summary_path).get("ladder", [])
            thresholds = [10.0 * float(d) for d in ladder]
        return figures.distance_figure(modulated, raw, thresholds, spec.logy)

    if spec.kind == "modulation":
        tables = find_tables(spec.indir, "modulation*.csv", MODULATION)
        if not tables:
            raise MissingInput(f"{spec.indir}: no modulation*.csv")
        return figures.modulation_figure(tables)

    if spec.kind == "spectrum":
        kplus = read_table(spec.indir / "spectrum_kplus.csv", SPECTRUM)
        kminus = read_table(spec.indir / "spectrum_kminus.csv", SPECTRUM)
        return figures.spectrum_figure(kplus, kminus)

    if spec.kind == "coercivity":
        probes = read_table(spec.indir / "probes.csv", COERCIVITY)
        summary = load_summary(spec.indir / "summary.json")
        try:
            c, C = float(summary["c_lower"]), float(summary["C_upper"])
        except KeyError as exc:
            raise SchemaMismatch(f"{spec.indir}/summary.json: missing {exc}")
        return figures.coercivity_figure(probes, c, C, logy=True)

    raise ValueError(f"unknown plot kind {spec.kind!r}")


def render(spec: PlotSpec) -> list[Path]:
    """Build the figure and write <kind>.png and <kind>.svg."""
    with plt.rc_context(figures.RC):
        fig = _build(spec)
        spec.outdir.mkdir(parents=True, exist_ok=True)
        written = []
        try:
            for ext, metadata in (("png", {"Software": "solitonplots"}),
                                  ("svg", {"Date": None})):
                path = spec.outdir / f"{spec.kind}.{ext}"
                fig.savefig(path, format=ext, metadata=metadata)
                written.append(path)
        finally:
            plt.close(fig)
    return written


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="solitonplots",
                                 description=__doc__.splitlines()[0])
    ap.add_argument("--kind", required=True, choices=KINDS)
    ap.add_argument("--in", dest="indir", required=True,
                    help="run directory to read")
    ap.add_argument("--out", dest="outdir", required=True,
                    help="directory for the rendered figures")
    ap.add_argument("--logy", action="store_true",
                    help="log scale where the kind supports it")
    args = ap.parse_args(argv)
    spec = PlotSpec(kind=args.kind, indir=Path(args.indir),
                    outdir=Path(args.outdir), logy=args.logy)
    try:
        written = render(spec)
    except (MissingInput, SchemaMismatch) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
