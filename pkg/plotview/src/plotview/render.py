"""CSV parsing and deterministic overlay rendering."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

EXPECTED_COLUMNS = ("axis_mhz", "field", "method", "branch", "re", "im")

METHOD_COLORS = {
    "lindblad": "#1f77b4",
    "analytic": "#d62728",
    "oracle": "#2ca02c",
}
FALLBACK_COLORS = ("#9467bd", "#8c564b", "#e377c2")


class MissingColumnError(ValueError):
    """CSV header does not carry the expected sweep columns."""


class EmptyDataError(ValueError):
    """No plottable rows after filtering."""


@dataclass(frozen=True)
class PlotSpec:
    csv_path: Path
    out_path: Path
    fields: Optional[tuple[str, ...]] = None    # None: every field in the file
    methods: Optional[tuple[str, ...]] = None   # None: every method in the file
    axis_label: str = "detuning (MHz)"
    value_label: str = "coherence (arb. units)"
    dpi: int = 150


@dataclass(frozen=True)
class Row:
    axis_mhz: float
    field: str
    method: str
    re: Optional[float]
    im: Optional[float]


def read_rows(csv_path) -> list[Row]:
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MissingColumnError(f"{csv_path}: empty file") from None
        if tuple(header) != EXPECTED_COLUMNS:
            raise MissingColumnError(
                f"{csv_path}: expected columns {EXPECTED_COLUMNS}, found {tuple(header)}"
            )
        rows = []
        for rec in reader:
            axis, fid, method, _branch, re_s, im_s = rec
            rows.append(
                Row(
                    float(axis), fid, method,
                    float(re_s) if re_s else None,
                    float(im_s) if im_s else None,
                )
            )
    return rows


def _trace(rows: Sequence[Row], fid: str, method: str):
    xs, res, ims = [], [], []
    for r in rows:
        if r.field == fid and r.method == method:
            xs.append(r.axis_mhz)
            res.append(np.nan if r.re is None else r.re)
            ims.append(np.nan if r.im is None else r.im)
    order = np.argsort(xs)
    return (
        np.asarray(xs)[order],
        np.asarray(res)[order],
        np.asarray(ims)[order],
    )


def build_figure(spec: PlotSpec):
    """Figure with one panel per field: Im solid, Re dashed, color per method."""
    rows = read_rows(spec.csv_path)
    if not rows:
        raise EmptyDataError(f"{spec.csv_path}: no data rows")

    fields = spec.fields or tuple(sorted({r.field for r in rows}))
    methods = spec.methods or tuple(sorted({r.method for r in rows}))
    missing = [f for f in fields if not any(r.field == f for r in rows)]
    if missing:
        raise EmptyDataError(f"{spec.csv_path}: no rows for fields {missing}")

    colors = dict(METHOD_COLORS)
    spare = iter(FALLBACK_COLORS)
    for m in methods:
        colors.setdefault(m, next(spare, "#7f7f7f"))

    fig, axes = plt.subplots(
        len(fields), 1, figsize=(7.0, 3.0 * len(fields)), squeeze=False, sharex=True
    )
    plotted_any = False
    for ax, fid in zip(axes[:, 0], fields):
        for method in methods:
            xs, res, ims = _trace(rows, fid, method)
            if len(xs) == 0:
                continue
            plotted_any = True
            ax.plot(xs, ims, "-", color=colors[method], label=f"{method} Im")
            ax.plot(xs, res, "--", color=colors[method], label=f"{method} Re", alpha=0.85)
        ax.set_ylabel(spec.value_label)
        ax.set_title(f"{fid} beam", fontsize=10)
        ax.legend(fontsize=8, loc="best")
        ax.axhline(0.0, color="0.7", lw=0.6, zorder=0)
    if not plotted_any:
        plt.close(fig)
        raise EmptyDataError(
            f"{spec.csv_path}: no rows for methods {methods} in fields {fields}"
        )
    axes[-1, 0].set_xlabel(spec.axis_label)
    fig.tight_layout()
    return fig


def render(spec: PlotSpec) -> Path:
    """Write the overlay image; byte-identical for identical input and style."""
    fig = build_figure(spec)
    out = Path(spec.out_path)
    # strip the version-bearing metadata so the bytes depend on data alone
    fig.savefig(out, dpi=spec.dpi, metadata={"Software": None})
    plt.close(fig)
    return out
