"""Report emission for the experiment harness.

CSV and JSON reports embed the fully resolved configuration (defaults
included) so every run is reproducible from its output alone.  Reals are
serialized with 17 significant digits, which round-trips IEEE doubles
losslessly.  SVG output is a minimal hand-rolled line chart (polylines and
text only, no external assets).
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Sequence

Row = dict[str, Any]


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(path: Path, columns: Sequence[str], rows: Sequence[Row], config: Row) -> None:
    lines = [f"# config: {json.dumps(config, sort_keys=True)}"]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(format_value(row[c]) for c in columns))
    path.write_text("\n".join(lines) + "\n")


def write_json(path: Path, rows: Sequence[Row], config: Row, extra: Row | None = None) -> None:
    doc: Row = {"config": config, "rows": rows}
    if extra:
        doc.update(extra)
    path.write_text(json.dumps(doc, sort_keys=True, indent=1, default=format_value) + "\n")


def emit_svg(
    rows: Sequence[Row],
    x: str,
    y: Sequence[str],
    path: Path,
    width: int = 640,
    height: int = 420,
) -> None:
    """Standalone SVG line chart: one polyline per y column, axes and legend."""
    if not rows:
        raise ValueError("cannot plot an empty row set")
    for col in [x, *y]:
        if col not in rows[0]:
            raise ValueError(f"unknown column {col!r}")
    margin = 55
    xs = [float(r[x]) for r in rows]
    all_ys = [float(r[c]) for r in rows for c in y]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(all_ys), max(all_ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    def sx(v: float) -> float:
        return margin + (v - x_lo) / (x_hi - x_lo) * (width - 2 * margin)

    def sy(v: float) -> float:
        return height - margin - (v - y_lo) / (y_hi - y_lo) * (height - 2 * margin)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" '
        f'stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="{height - 12}" text-anchor="middle" '
        f'font-size="13">{x}</text>',
        f'<text x="14" y="{height / 2:.1f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 14 {height / 2:.1f})">{", ".join(y)}</text>',
        f'<text x="{margin}" y="{height - margin + 16}" font-size="11" '
        f'text-anchor="middle">{format(x_lo, ".4g")}</text>',
        f'<text x="{width - margin}" y="{height - margin + 16}" font-size="11" '
        f'text-anchor="middle">{format(x_hi, ".4g")}</text>',
        f'<text x="{margin - 6}" y="{height - margin}" font-size="11" '
        f'text-anchor="end">{format(y_lo, ".4g")}</text>',
        f'<text x="{margin - 6}" y="{margin + 4}" font-size="11" '
        f'text-anchor="end">{format(y_hi, ".4g")}</text>',
    ]
    for idx, col in enumerate(y):
        color = colors[idx % len(colors)]
        points = " ".join(
            f"{sx(float(r[x])):.2f},{sy(float(r[col])):.2f}" for r in rows
        )
        parts.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        ly = margin + 16 * idx
        parts.append(
            f'<line x1="{width - margin - 90}" y1="{ly}" x2="{width - margin - 70}" '
            f'y2="{ly}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{width - margin - 64}" y="{ly + 4}" font-size="12">{col}</text>'
        )
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n")
