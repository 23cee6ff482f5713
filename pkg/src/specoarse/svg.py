"""Static SVG 1.1 renderings: spectrum rows and Gershgorin discs."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

__all__ = ["spectrum_svg", "gershgorin_svg"]

_HEAD = ('<?xml version="1.0" encoding="UTF-8"?>\n'
         '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
         'width="{w}" height="{h}" viewBox="0 0 {w} {h}">\n')
_ARROW = ('<defs><marker id="arrow" markerWidth="8" markerHeight="8" refX="7" refY="4" '
          'orient="auto"><path d="M0,0 L8,4 L0,8 z" fill="#c0392b"/></marker></defs>\n')


def _f(x):
    return f"{x:.3f}"


def _scale(lo, hi, a, b):
    if hi <= lo:
        lo, hi = lo - 1.0, hi + 1.0
    pad = 0.03 * (hi - lo)
    lo, hi = lo - pad, hi + pad
    return lambda x: a + (x - lo) * (b - a) / (hi - lo)


def spectrum_svg(fine, samples, title="", width=960, row_height=36):
    """One row per coarse sample above a row for the fine spectrum.

    Parameters
    ----------
    fine : array or None
        Fine-grid (oracle) spectrum; the bottom row is left empty if None.
    samples : list of (coarse_values, [(shift, converged_value), ...])
        Coarse spectrum of each sample and the refinements started from it;
        each refinement is drawn as an arrow from the shift down to the
        converged value on the fine row.
    """
    rows = len(samples) + 1
    top, left, right = 40, 90, width - 20
    height = top + rows * row_height + 40
    pts = [np.asarray(c, dtype=float) for c, _ in samples]
    if fine is not None:
        pts.append(np.asarray(fine, dtype=float))
    allv = np.concatenate(pts) if pts else np.zeros(1)
    X = _scale(float(allv.min()), float(allv.max()), left, right)
    fine_y = top + (rows - 1) * row_height + row_height / 2

    out = [_HEAD.format(w=width, h=_f(height)), _ARROW,
           f'<rect width="{width}" height="{_f(height)}" fill="white"/>\n']
    if title:
        out.append(f'<text x="{left}" y="22" font-family="sans-serif" font-size="14">'
                   f'{escape(title)}</text>\n')
    for r, (coarse, refs) in enumerate(samples):
        y = top + r * row_height + row_height / 2
        out.append(f'<text x="8" y="{_f(y + 4)}" font-family="sans-serif" font-size="11">'
                   f'sample {r}</text>\n')
        out.append(f'<line x1="{left}" y1="{_f(y)}" x2="{right}" y2="{_f(y)}" stroke="#ddd"/>\n')
        for v in coarse:
            out.append(f'<circle cx="{_f(X(v))}" cy="{_f(y)}" r="3" fill="#2e86c1"/>\n')
        for s, v in refs:
            out.append(f'<line x1="{_f(X(s))}" y1="{_f(y + 3)}" x2="{_f(X(v))}" '
                       f'y2="{_f(fine_y - 6)}" stroke="#c0392b" stroke-width="0.6" '
                       f'stroke-opacity="0.6" marker-end="url(#arrow)"/>\n')
    out.append(f'<text x="8" y="{_f(fine_y + 4)}" font-family="sans-serif" font-size="11">'
               f'fine</text>\n')
    out.append(f'<line x1="{left}" y1="{_f(fine_y)}" x2="{right}" y2="{_f(fine_y)}" '
               f'stroke="black"/>\n')
    if fine is not None:
        for v in fine:
            x = _f(X(v))
            out.append(f'<line x1="{x}" y1="{_f(fine_y - 7)}" x2="{x}" y2="{_f(fine_y + 7)}" '
                       f'stroke="black"/>\n')
    lo, hi = float(allv.min()), float(allv.max())
    for v in np.linspace(lo, hi, 5):
        out.append(f'<text x="{_f(X(v))}" y="{_f(height - 12)}" font-family="sans-serif" '
                   f'font-size="10" text-anchor="middle">{v:.4g}</text>\n')
    out.append("</svg>\n")
    return "".join(out)


def gershgorin_svg(discs, eigenvalues=None, title="", size=720):
    """Discs in the complex plane, with eigenvalues as dots when given."""
    c = np.array([d.center for d in discs], dtype=float)
    r = np.array([d.radius for d in discs], dtype=float)
    xs = [c - r, c + r]
    ys = [-r, r]
    if eigenvalues is not None:
        ev = np.asarray(eigenvalues, dtype=complex)
        xs.append(ev.real)
        ys.append(ev.imag)
    xlo, xhi = min(float(np.min(x)) for x in xs), max(float(np.max(x)) for x in xs)
    ylo, yhi = min(float(np.min(y)) for y in ys), max(float(np.max(y)) for y in ys)
    span = max(xhi - xlo, yhi - ylo, 1e-12)
    cx, cy = 0.5 * (xlo + xhi), 0.5 * (ylo + yhi)
    margin = 30
    unit = (size - 2 * margin) / (1.06 * span)

    def X(x):
        return size / 2 + (x - cx) * unit

    def Y(y):
        return size / 2 - (y - cy) * unit

    out = [_HEAD.format(w=size, h=size), f'<rect width="{size}" height="{size}" fill="white"/>\n']
    if title:
        out.append(f'<text x="{margin}" y="20" font-family="sans-serif" font-size="14">'
                   f'{escape(title)}</text>\n')
    out.append(f'<line x1="0" y1="{_f(Y(0))}" x2="{size}" y2="{_f(Y(0))}" stroke="#bbb"/>\n')
    out.append(f'<line x1="{_f(X(0))}" y1="0" x2="{_f(X(0))}" y2="{size}" stroke="#bbb"/>\n')
    for ci, ri in zip(c, r):
        out.append(f'<circle cx="{_f(X(ci))}" cy="{_f(Y(0))}" r="{_f(ri * unit)}" '
                   f'fill="#2e86c1" fill-opacity="0.05" stroke="#2e86c1" stroke-width="0.7"/>\n')
    if eigenvalues is not None:
        for z in ev:
            out.append(f'<circle cx="{_f(X(z.real))}" cy="{_f(Y(z.imag))}" r="2" '
                       f'fill="#c0392b"/>\n')
    out.append("</svg>\n")
    return "".join(out)
