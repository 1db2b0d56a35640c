"""Serialization of networks, curves and fields to JSON, CSV and SVG."""

from __future__ import annotations

import json
import math
from xml.sax.saxutils import escape

import numpy as np

from .geometry import PlaneCurve
from .network import ExpandingNetwork, SolveReport


def fmt(x: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    return format(float(x), ".17g")


def network_to_dict(net: ExpandingNetwork, report: SolveReport | None = None) -> dict:
    out = {
        "time": net.t,
        "triple_point": [float(v) for v in net.P],
        "tangents": net.tangents.tolist(),
        "balance_residual": net.balance_residual,
        "asymptote_thetas": [ln.theta for ln in net.config.lines],
        "curves": [{"vertices": c.vertices.tolist(), "asymptote_theta": c.asymptote.theta,
                    "family_height": c.family_height}
                   for c in net.curves],
    }
    if report is not None:
        out["certificate"] = {"radius": report.certificate_radius,
                              "min_inward": report.certificate_min_inward}
        out["solver"] = {"iterations": report.iterations,
                         "field_evaluations": report.field_evaluations,
                         "jacobian_cond": report.jacobian_cond,
                         "fallback_steps": report.fallback_steps}
    return out


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not serializable: {type(obj).__name__}")


def dumps(obj) -> str:
    # json writes floats with repr, the shortest string that parses back bit-exactly;
    # nan and inf (e.g. a skipped certificate) become null
    return json.dumps(_finite(obj), default=_json_default, indent=1)


def _finite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def curves_to_csv(curves) -> str:
    lines = ["curve,index,x,y"]
    for ci, c in enumerate(curves):
        v = c.vertices if isinstance(c, PlaneCurve) else np.asarray(c)
        lines.extend(f"{ci},{k},{fmt(x)},{fmt(y)}" for k, (x, y) in enumerate(v))
    return "\n".join(lines) + "\n"


def field_to_csv(points, values) -> str:
    lines = ["x,y,Vx,Vy"]
    for (x, y), (vx, vy) in zip(points, values):
        lines.append(",".join(fmt(t) for t in (x, y, vx, vy)))
    return "\n".join(lines) + "\n"


_COLORS = ("#1f77b4", "#d62728", "#2ca02c")


def to_svg(curves, thetas=(), point=None, width: int = 600, title: str = "") -> str:
    """Static plot in mathematical orientation (y up).

    One ``path`` per curve, the asymptotic half-lines as dashed ``line``
    elements, and ``point`` (if given) as a circle.  The viewBox holds every
    vertex.
    """
    verts = [np.asarray(c.vertices if isinstance(c, PlaneCurve) else c, dtype=float)
             for c in curves]
    allv = np.vstack(verts + [np.zeros((1, 2))] + ([np.atleast_2d(point)] if point is not None else []))
    lo, hi = allv.min(axis=0), allv.max(axis=0)
    span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-9))
    pad = 0.05 * span
    x0, y0 = lo[0] - pad, -(hi[1] + pad)
    w, h = hi[0] - lo[0] + 2 * pad, hi[1] - lo[1] + 2 * pad
    stroke = span / 400.0
    height = int(round(width * h / w))
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="{fmt(x0)} {fmt(y0)} {fmt(w)} {fmt(h)}">',
    ]
    if title:
        parts.append(f"<title>{escape(title)}</title>")
    reach = 2.0 * span + float(np.max(np.abs(allv)))
    for th in thetas:
        ex, ey = reach * math.cos(th), reach * math.sin(th)
        parts.append(f'<line x1="0" y1="0" x2="{fmt(ex)}" y2="{fmt(-ey)}" stroke="#999999" '
                     f'stroke-width="{fmt(stroke)}" stroke-dasharray="{fmt(4 * stroke)}"/>')
    for k, v in enumerate(verts):
        d = "M " + " L ".join(f"{fmt(x)} {fmt(-y)}" for x, y in v)
        parts.append(f'<path d="{d}" fill="none" stroke="{_COLORS[k % 3]}" '
                     f'stroke-width="{fmt(2 * stroke)}"/>')
    if point is not None:
        parts.append(f'<circle cx="{fmt(point[0])}" cy="{fmt(-point[1])}" r="{fmt(4 * stroke)}" '
                     f'fill="black"/>')
    # scale bar (a power of ten) in the lower left corner
    unit = 10.0 ** math.floor(math.log10(span / 4.0))
    bx, by = x0 + pad / 2, y0 + h - pad / 2
    parts.append(f'<line x1="{fmt(bx)}" y1="{fmt(by)}" x2="{fmt(bx + unit)}" y2="{fmt(by)}" '
                 f'stroke="black" stroke-width="{fmt(stroke)}"/>')
    parts.append(f'<text x="{fmt(bx)}" y="{fmt(by - stroke * 3)}" font-size="{fmt(span / 40)}">'
                 f'scale {unit:g}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def network_to_svg(net: ExpandingNetwork) -> str:
    return to_svg(net.curves, [ln.theta for ln in net.config.lines], net.P,
                  title=f"expanding network at t={net.t}")
