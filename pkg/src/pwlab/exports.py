"""Plot-oriented exports: delimited samples, exact SVG polylines, and
matplotlib figures rendered to files."""

from __future__ import annotations

import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from ._rat import rat_str
from .pwl import PWL


def write_csv(path, f: PWL, grid: int = 0) -> None:
    """Sampled graph (x, f(x)) as CSV; grid 0 means the exact breakpoints,
    otherwise grid+1 equally spaced sample points."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "x_float", "y_float"])
        if grid <= 0:
            for x, y in f.breakpoints:
                w.writerow([rat_str(x), rat_str(y), float(x), float(y)])
        else:
            lo, hi = f.domain
            span = hi - lo
            for i in range(grid + 1):
                x = lo + span * i / grid
                y = f.value_at(x)
                w.writerow([rat_str(x), rat_str(y), float(x), float(y)])


def write_summary_csv(path, rows, header) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def write_svg(path, f: PWL, width: int = 800, height: int = 800, margin: int = 20) -> None:
    """Polyline through the exact breakpoints scaled to the viewport; the
    function is piecewise linear, so nothing is sampled."""
    lo, hi = f.domain
    xspan = hi - lo
    ys = [y for _, y in f.breakpoints]
    ymin, ymax = min(ys), max(ys)
    yspan = ymax - ymin
    if yspan == 0:
        yspan = xspan
    w_in, h_in = width - 2 * margin, height - 2 * margin
    pts = []
    for x, y in f.breakpoints:
        px = margin + float((x - lo) / xspan) * w_in
        py = height - margin - float((y - ymin) / yspan) * h_in
        pts.append(f"{px:.6g},{py:.6g}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">\n'
        )
        fh.write(
            f'  <rect x="{margin}" y="{margin}" width="{w_in}" height="{h_in}" '
            'fill="none" stroke="#ccc"/>\n'
        )
        fh.write(
            '  <polyline fill="none" stroke="#1f77b4" stroke-width="1" points="'
            + " ".join(pts)
            + '"/>\n'
        )
        fh.write("</svg>\n")


def write_png(path, f: PWL, shaded=None, title: str = "", dpi: int = 110) -> None:
    """Matplotlib rendering of the function with optional shaded interval
    sets (label -> IntervalSet), e.g. target sets or strategy cells."""
    fig, ax = plt.subplots(figsize=(7, 5))
    xs = [float(x) for x, _ in f.breakpoints]
    ys = [float(y) for _, y in f.breakpoints]
    ax.plot(xs, ys, lw=0.8, color="#1f77b4")
    palette = ["#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"]
    if shaded:
        for i, (label, s) in enumerate(shaded.items()):
            color = palette[i % len(palette)]
            first = True
            for part in s.parts:
                ax.axvspan(
                    float(part.lo),
                    float(part.hi),
                    alpha=0.25,
                    color=color,
                    label=label if first else None,
                )
                first = False
        ax.legend(loc="upper left", fontsize=8)
    if title:
        ax.set_title(title)
    ax.set_xlabel("x")
    ax.set_ylabel("f(x)")
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
