"""Known redundancy exponents for k-batch codes and their tradeoff diagram.

Each curve gives ``delta(eps)`` with redundancy ``~ n^delta`` at ``k = n^eps``;
polylog factors are dropped. The HPPV20 segments use the ``lambda_m``
constants of the published tradeoff figure, which approximate rather than
restate that construction's theorem.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from batchlab.errors import BatchLabError

TOL = 1e-12


@dataclass(frozen=True)
class ExponentCurve:
    name: str
    kind: str  # "lower" or "upper"
    lo: float
    hi: float
    formula: Callable[[float], float]
    note: str = ""

    def covers(self, eps: float) -> bool:
        return self.lo - TOL <= eps <= self.hi + TOL

    def __call__(self, eps: float) -> float:
        return self.formula(eps)


def _hppv20(m: int, lam: float) -> Callable[[float], float]:
    L = math.log2(lam)
    return lambda e: (m - L) * e + (m - 1) * L / m - m + 2


_HPPV20_SEGMENTS = [
    (3, 7.2361, 0.41, 0.64),
    (4, 15.5436, 0.63, 0.75),
    (5, 31.7877, 0.75, 0.8),
    (6, 63.9217, 0.8, 0.83),
]


def curve_catalog() -> list[ExponentCurve]:
    curves = [
        ExponentCurve("distance", "lower", 0.0, 1.0, lambda e: e, "minimum distance k"),
        ExponentCurve("RV16/Woo16", "lower", 0.0, 1.0, lambda e: 0.5, "k >= 3"),
        ExponentCurve("tensor", "lower", 0.0, 1.0, lambda e: (1 + e) / 2, "sqrt(Nk), linear systematic"),
        ExponentCurve("VY16", "upper", 0.0, 0.0, lambda e: 0.5, "fixed k"),
        ExponentCurve("PV19a", "upper", 0.0, 1 / 3, lambda e: (3 * e + 1) / 2),
        ExponentCurve("PPV20", "upper", 0.0, 0.5, lambda e: math.log(3, 4) + (2 - math.log2(3)) * e),
        # 2/3 + 5e/3 exceeds 1 past e = 1/5
        ExponentCurve("AY17a", "upper", 0.0, 0.2, lambda e: 2 / 3 + 5 * e / 3),
        ExponentCurve("AY17b", "upper", 0.0, 0.5, lambda e: 5 / 6 + e / 3),
        ExponentCurve("DGRS14", "upper", 0.2, 7 / 32, lambda e: 4 * e),
        ExponentCurve("DGRS14-point", "upper", 0.25, 0.25, lambda e: 7 / 8),
    ]
    for m, lam, lo, hi in _HPPV20_SEGMENTS:
        curves.append(ExponentCurve(f"HPPV20-m{m}", "upper", lo, hi, _hppv20(m, lam), f"lambda={lam}"))
    curves.append(ExponentCurve("HPPV20-trivial", "upper", 0.8, 1.0, lambda e: 1.0))
    return curves


def evaluate(eps: float, curves: list[ExponentCurve] | None = None) -> dict[str, float]:
    if not 0.0 <= eps <= 1.0:
        raise BatchLabError(f"epsilon {eps} outside [0, 1]")
    curves = curve_catalog() if curves is None else curves
    return {c.name: c(eps) for c in curves if c.covers(eps)}


def grid(step: float) -> list[float]:
    if not 0 < step <= 1:
        raise BatchLabError(f"grid step {step} outside (0, 1]")
    pts = []
    i = 0
    while i * step <= 1 + TOL:
        pts.append(round(i * step, 12))
        i += 1
    if pts[-1] < 1.0:
        pts.append(1.0)
    return pts


def _fmt(x: float) -> str:
    return format(x, ".12g")


def curve_rows(step: float) -> list[tuple[float, str, float]]:
    curves = curve_catalog()
    rows = []
    for eps in grid(step):
        for name, val in evaluate(eps, curves).items():
            rows.append((eps, name, val))
    return rows


def write_csv(rows: list[tuple[float, str, float]], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["epsilon", "curve", "exponent"])
        for eps, name, val in rows:
            w.writerow([_fmt(eps), name, _fmt(val)])


# SVG layout: plot box in pixels, both axes span [0, 1]
_W, _H, _L, _R, _T, _B = 640, 480, 70, 170, 30, 50
_YMIN = 0.0
_LOWER_COLOR = "#c0392b"
_UPPER_COLOR = "#1f4e9c"


def _px(eps: float, delta: float) -> tuple[float, float]:
    x = _L + eps * (_W - _L - _R)
    y = _T + (1 - (delta - _YMIN) / (1 - _YMIN)) * (_H - _T - _B)
    return round(x, 2), round(y, 2)


def render_svg(step: float) -> str:
    curves = curve_catalog()
    pts = grid(step)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
    ]
    x0, y0 = _px(0, _YMIN)
    x1, y1 = _px(1, 1)
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>')
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>')
    for tick in (0, 0.25, 0.5, 0.75, 1):
        tx, _ = _px(tick, _YMIN)
        out.append(f'<text x="{tx}" y="{y0 + 18}" font-size="11" text-anchor="middle">{tick:g}</text>')
    for tick in (0, 0.25, 0.5, 0.75, 1):
        _, ty = _px(0, tick)
        out.append(f'<text x="{x0 - 8}" y="{ty + 4}" font-size="11" text-anchor="end">{tick:g}</text>')
    out.append(f'<text x="{(x0 + x1) / 2}" y="{_H - 10}" font-size="12" text-anchor="middle">log_N(k)</text>')
    out.append(
        f'<text x="16" y="{(y0 + y1) / 2}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 16 {(y0 + y1) / 2})">log_N(N - n)</text>'
    )
    legend_y = _T + 10
    for c in curves:
        xs = [e for e in pts if c.covers(e)]
        if c.lo not in xs and c.covers(c.lo):
            xs.insert(0, c.lo)
        if c.hi not in xs:
            xs.append(c.hi)
        color = _LOWER_COLOR if c.kind == "lower" else _UPPER_COLOR
        dash = "" if c.kind == "lower" else ' stroke-dasharray="6,4"'
        coords = [_px(e, c(e)) for e in sorted(set(xs))]
        if len(coords) == 1:
            cx, cy = coords[0]
            out.append(f'<circle cx="{cx}" cy="{cy}" r="3" fill="{color}" data-curve="{c.name}" data-kind="{c.kind}"/>')
        else:
            pts_attr = " ".join(f"{x},{y}" for x, y in coords)
            out.append(
                f'<polyline points="{pts_attr}" fill="none" stroke="{color}" stroke-width="1.6"{dash} '
                f'data-curve="{c.name}" data-kind="{c.kind}"/>'
            )
        lx = _W - _R + 12
        out.append(f'<line x1="{lx}" y1="{legend_y}" x2="{lx + 24}" y2="{legend_y}" stroke="{color}"{dash}/>')
        out.append(f'<text x="{lx + 30}" y="{legend_y + 4}" font-size="10">{c.name}</text>')
        legend_y += 16
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot(grid_step: float, csv_path: str | Path, svg_path: str | Path) -> list[tuple[float, str, float]]:
    rows = curve_rows(grid_step)
    svg = render_svg(grid_step)
    try:
        write_csv(rows, csv_path)
        Path(svg_path).write_text(svg)
    except OSError as exc:
        raise BatchLabError(f"cannot write plot output: {exc}") from None
    return rows
