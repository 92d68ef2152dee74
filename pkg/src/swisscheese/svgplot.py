"""Minimal deterministic SVG output.

Byte-identical figures across runs matter more here than styling, so
this writes SVG 1.1 by hand: fixed palette, fixed float formatting, no
timestamps or generated ids anywhere.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .content import CoverEstimate, DiskUnion
from .domain import SwissCheeseDomain

PALETTE = ("#1f6fb2", "#c23b22", "#2e8540", "#8c5e99", "#b08000", "#4a4a4a")


def _f(x: float) -> str:
    return format(float(x), ".6g")


def _write(path, width: int, height: int, parts: list[str]) -> None:
    doc = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
           f'height="{height}" viewBox="0 0 {width} {height}" version="1.1">',
           '<rect width="100%" height="100%" fill="white"/>']
    doc.extend(parts)
    doc.append("</svg>")
    Path(path).write_text("\n".join(doc) + "\n", encoding="ascii")


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if not math.isfinite(lo) or not math.isfinite(hi) or hi <= lo:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + k * step for k in range(count)]


def line_plot(path, series, title: str = "", xlabel: str = "",
              ylabel: str = "", logy: bool = False,
              width: int = 640, height: int = 420) -> None:
    """Plot (label, xs, ys) triples as polylines with a shared frame."""
    ml, mr, mt, mb = 64, 16, 34, 46
    pw, ph = width - ml - mr, height - mt - mb
    xs_all = np.concatenate([np.asarray(s[1], dtype=float) for s in series])
    ys_all = np.concatenate([np.asarray(s[2], dtype=float) for s in series])
    if logy:
        ys_all = np.log10(np.maximum(ys_all, 1e-300))
    x0, x1 = float(np.min(xs_all)), float(np.max(xs_all))
    y0, y1 = float(np.min(ys_all)), float(np.max(ys_all))
    if x1 <= x0:
        x1 = x0 + 1.0
    if y1 <= y0:
        y1 = y0 + 1.0
    pad = 0.04 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def px(x):
        return ml + (x - x0) / (x1 - x0) * pw

    def py(y):
        return mt + ph - (y - y0) / (y1 - y0) * ph

    parts = [f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" '
             'fill="none" stroke="#999" stroke-width="1"/>']
    if title:
        parts.append(f'<text x="{width // 2}" y="20" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="14">{title}</text>')
    for tx in _ticks(x0, x1):
        parts.append(f'<line x1="{_f(px(tx))}" y1="{mt + ph}" x2="{_f(px(tx))}" '
                     f'y2="{mt + ph + 4}" stroke="#555"/>')
        parts.append(f'<text x="{_f(px(tx))}" y="{mt + ph + 18}" '
                     'text-anchor="middle" font-family="sans-serif" '
                     f'font-size="11">{_f(tx)}</text>')
    for ty in _ticks(y0, y1):
        label = f"1e{_f(ty)}" if logy else _f(ty)
        parts.append(f'<line x1="{ml - 4}" y1="{_f(py(ty))}" x2="{ml}" '
                     f'y2="{_f(py(ty))}" stroke="#555"/>')
        parts.append(f'<text x="{ml - 8}" y="{_f(py(ty) + 4)}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11">{label}</text>')
    if xlabel:
        parts.append(f'<text x="{width // 2}" y="{height - 8}" '
                     'text-anchor="middle" font-family="sans-serif" '
                     f'font-size="12">{xlabel}</text>')
    if ylabel:
        parts.append(f'<text x="16" y="{mt + ph // 2}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="12" '
                     f'transform="rotate(-90 16 {mt + ph // 2})">{ylabel}</text>')

    for k, (label, xs, ys) in enumerate(series):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if logy:
            ys = np.log10(np.maximum(ys, 1e-300))
        pts = " ".join(f"{_f(px(a))},{_f(py(b))}" for a, b in zip(xs, ys))
        color = PALETTE[k % len(PALETTE)]
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     'stroke-width="1.5"/>')
        ly = mt + 16 + 16 * k
        parts.append(f'<line x1="{ml + 10}" y1="{ly - 4}" x2="{ml + 34}" '
                     f'y2="{ly - 4}" stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{ml + 40}" y="{ly}" font-family="sans-serif" '
                     f'font-size="11">{label}</text>')
    _write(path, width, height, parts)


def domain_figure(path, domain: SwissCheeseDomain, max_annulus: int = 8,
                  size: int = 640) -> None:
    """Unit disk, annulus rings, holes, and their margin rings."""
    c = size / 2.0
    scale = size / 2.2

    def sx(x):
        return c + x * scale

    def sy(y):
        return c - y * scale

    parts = [f'<circle cx="{_f(c)}" cy="{_f(c)}" r="{_f(scale)}" fill="none" '
             'stroke="#333" stroke-width="1.5"/>']
    for n in range(1, max_annulus + 1):
        parts.append(f'<circle cx="{_f(c)}" cy="{_f(c)}" '
                     f'r="{_f(scale * 2.0 ** -n)}" fill="none" stroke="#bbb" '
                     'stroke-width="0.7" stroke-dasharray="4 3"/>')
    for k, n in enumerate(domain.indices):
        if n > max_annulus:
            break
        a, r, s = domain.a[k], domain.r[k], domain.s[k]
        color = PALETTE[0] if domain.inside_annulus[k] else PALETTE[1]
        parts.append(f'<circle cx="{_f(sx(a))}" cy="{_f(sy(0.0))}" '
                     f'r="{_f(max(scale * r, 0.6))}" fill="{color}" '
                     'fill-opacity="0.55"/>')
        parts.append(f'<circle cx="{_f(sx(a))}" cy="{_f(sy(0.0))}" '
                     f'r="{_f(max(scale * (r + s), 0.8))}" fill="none" '
                     f'stroke="{PALETTE[2]}" stroke-width="0.7"/>')
    _write(path, size, size, parts)


def cover_figure(path, cover: CoverEstimate, target: DiskUnion,
                 size: int = 640) -> None:
    """Kept dyadic squares over the target disks, zoomed to the target."""
    xs = [c.real for c, _ in target.disks]
    ys = [c.imag for c, _ in target.disks]
    rs = [r for _, r in target.disks]
    x0 = min(x - r for x, r in zip(xs, rs))
    x1 = max(x + r for x, r in zip(xs, rs))
    y0 = min(y - r for y, r in zip(ys, rs))
    y1 = max(y + r for y, r in zip(ys, rs))
    span = max(x1 - x0, y1 - y0) * 1.3
    cx, cy = (x0 + x1) / 2.0, (y0 + y1) / 2.0
    scale = size / span

    def sx(x):
        return (x - cx) * scale + size / 2.0

    def sy(y):
        return size / 2.0 - (y - cy) * scale

    parts = []
    for lv, i, j in cover.squares:
        s = 2.0 ** (-lv)
        parts.append(f'<rect x="{_f(sx(i * s))}" y="{_f(sy((j + 1) * s))}" '
                     f'width="{_f(s * scale)}" height="{_f(s * scale)}" '
                     f'fill="{PALETTE[4]}" fill-opacity="0.25" '
                     f'stroke="{PALETTE[4]}" stroke-width="0.6"/>')
    for (cc, r) in target.disks:
        parts.append(f'<circle cx="{_f(sx(cc.real))}" cy="{_f(sy(cc.imag))}" '
                     f'r="{_f(r * scale)}" fill="none" stroke="{PALETTE[0]}" '
                     'stroke-width="1.4"/>')
    if target.band is not None:
        bc, rin, rout = target.band
        for rr in (rin, rout):
            parts.append(f'<circle cx="{_f(sx(bc.real))}" cy="{_f(sy(bc.imag))}" '
                         f'r="{_f(rr * scale)}" fill="none" '
                         f'stroke="{PALETTE[2]}" stroke-width="0.8" '
                         'stroke-dasharray="5 4"/>')
    _write(path, size, size, parts)
