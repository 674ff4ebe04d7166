"""Standalone SVG line charts from metric CSV files."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence
from xml.etree import ElementTree as ET

WIDTH, HEIGHT = 720, 440
LEFT, RIGHT, TOP, BOTTOM = 70, 190, 30, 50
COLORS = ["#d62728", "#1f77b4", "#2ca02c", "#000000", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"]


def read_columns(csv_path: str | Path) -> tuple[list[str], dict[str, list[float]]]:
    with open(csv_path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = {h: [float(r[i]) for r in body] for i, h in enumerate(header)}
    return header, data


def _span(lo: float, hi: float) -> tuple[float, float]:
    if hi - lo < 1e-12:
        return lo - 0.5, hi + 0.5
    return lo, hi


def emit_plot(
    csv_path: str | Path,
    columns: Sequence[str],
    out_path: str | Path,
    title: str | None = None,
) -> Path:
    """Plot ``columns`` against the CSV's first column as one polyline each.

    The y axis spans exactly the min and max over the plotted columns.
    """
    header, data = read_columns(csv_path)
    missing = [c for c in columns if c not in data]
    if missing:
        raise KeyError(f"columns not in {csv_path}: {', '.join(missing)}")
    xs = data[header[0]]
    ys_all = [v for c in columns for v in data[c]]
    x0, x1 = _span(min(xs), max(xs))
    y0, y1 = _span(min(ys_all), max(ys_all))
    w, h = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def sx(x):
        return LEFT + (x - x0) / (x1 - x0) * w

    def sy(y):
        return TOP + (y1 - y) / (y1 - y0) * h

    svg = ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        width=str(WIDTH),
        height=str(HEIGHT),
        viewBox=f"0 0 {WIDTH} {HEIGHT}",
    )
    ET.SubElement(svg, "rect", width=str(WIDTH), height=str(HEIGHT), fill="white")
    ET.SubElement(
        svg, "rect", id="plot-area", x=str(LEFT), y=str(TOP), width=str(w), height=str(h),
        fill="none", stroke="#888",
    )
    if title:
        ET.SubElement(svg, "text", x=str(LEFT), y=str(TOP - 10), **{"font-size": "13"}).text = title

    axes = ET.SubElement(svg, "g", id="axes", **{"font-size": "11", "font-family": "sans-serif"})
    for i in range(6):
        xv = x0 + (x1 - x0) * i / 5
        yv = y0 + (y1 - y0) * i / 5
        ET.SubElement(axes, "line", x1=f"{sx(xv):.3f}", y1=str(TOP + h), x2=f"{sx(xv):.3f}", y2=str(TOP + h + 5), stroke="black")
        ET.SubElement(axes, "text", x=f"{sx(xv):.3f}", y=str(TOP + h + 18), **{"text-anchor": "middle"}).text = f"{xv:.3g}"
        ET.SubElement(axes, "line", x1=str(LEFT - 5), y1=f"{sy(yv):.3f}", x2=str(LEFT), y2=f"{sy(yv):.3f}", stroke="black")
        ET.SubElement(axes, "text", x=str(LEFT - 8), y=f"{sy(yv) + 4:.3f}", **{"text-anchor": "end"}).text = f"{yv:.3g}"
    ET.SubElement(axes, "text", x=str(LEFT + w / 2), y=str(HEIGHT - 10), **{"text-anchor": "middle"}).text = header[0]

    series = ET.SubElement(svg, "g", id="series", fill="none", **{"stroke-width": "1.6"})
    legend = ET.SubElement(svg, "g", id="legend", **{"font-size": "11", "font-family": "sans-serif"})
    for i, col in enumerate(columns):
        color = COLORS[i % len(COLORS)]
        pts = " ".join(f"{sx(x):.3f},{sy(y):.3f}" for x, y in zip(xs, data[col]))
        ET.SubElement(series, "polyline", points=pts, stroke=color, **{"data-column": col})
        ly = TOP + 10 + 16 * i
        ET.SubElement(legend, "line", x1=str(WIDTH - RIGHT + 12), y1=str(ly), x2=str(WIDTH - RIGHT + 32), y2=str(ly), stroke=color, **{"stroke-width": "2"})
        ET.SubElement(legend, "text", x=str(WIDTH - RIGHT + 36), y=str(ly + 4)).text = col

    out_path = Path(out_path)
    ET.ElementTree(svg).write(out_path, encoding="utf-8", xml_declaration=True)
    return out_path
