"""SVG pictures in the Poincaré disk via ``z -> (z - i) / (z + i)``."""

from __future__ import annotations

import math

from .farey import ExtRat, GeodesicEdge
from .geometry import Horocycle, as_scalar

_SIZE = 800
_PAD = 1.04


def disk_point(x) -> tuple[float, float]:
    """Image of a boundary point of the upper half-plane on the unit circle."""
    if isinstance(x, ExtRat) and x.den == 0 or (isinstance(x, float) and math.isinf(x)):
        return (1.0, 0.0)
    t = float(as_scalar(x))
    d = t * t + 1
    return ((t * t - 1) / d, -2 * t / d)


def cayley(z: complex) -> complex:
    return (z - 1j) / (z + 1j)


def geodesic_arc(u, v):
    """``("line", P, Q)`` or ``("arc", P, Q, centre, radius)`` for the geodesic ``u v``."""
    P, Q = disk_point(u), disk_point(v)
    # the orthogonal circle is centred where the tangents at P and Q meet
    s = P[0] * Q[0] + P[1] * Q[1]
    if 1 + s < 1e-12:
        return ("line", P, Q)
    k = 1 / (1 + s)
    C = ((P[0] + Q[0]) * k, (P[1] + Q[1]) * k)
    r = math.sqrt(max(C[0] ** 2 + C[1] ** 2 - 1, 0.0))
    if r > 1e6:
        return ("line", P, Q)
    return ("arc", P, Q, C, r)


def _circle_through(a: complex, b: complex, c: complex):
    d = 2 * (a.real * (b.imag - c.imag) + b.real * (c.imag - a.imag) + c.real * (a.imag - b.imag))
    aa, bb, cc = abs(a) ** 2, abs(b) ** 2, abs(c) ** 2
    ux = (aa * (b.imag - c.imag) + bb * (c.imag - a.imag) + cc * (a.imag - b.imag)) / d
    uy = (aa * (c.real - b.real) + bb * (a.real - c.real) + cc * (b.real - a.real)) / d
    centre = complex(ux, uy)
    return centre, abs(a - centre)


def horocycle_circle(h: Horocycle):
    """Centre and radius of the horocycle's image in the disk."""
    if h.at_infinity:
        t = float(h.size)
        pts = [complex(0, t), complex(1, t), complex(-1, t)]
    else:
        x, d = float(as_scalar(h.base)), float(h.size)
        pts = [complex(x, d), complex(x + d / 2, d / 2), complex(x - d / 2, d / 2)]
    c, r = _circle_through(*(cayley(p) for p in pts))
    return (c.real, c.imag), r


def _xy(p) -> str:
    # screen coordinates: y grows downward
    return f"{p[0] * _SIZE / 2:.4f} {-p[1] * _SIZE / 2:.4f}"


def _path(u, v) -> str:
    g = geodesic_arc(u, v)
    if g[0] == "line":
        return f"M {_xy(g[1])} L {_xy(g[2])}"
    _, P, Q, C, r = g
    # minor arc from P to Q about C, in screen orientation
    cross = (P[0] - C[0]) * (-(Q[1] - C[1])) - (-(P[1] - C[1])) * (Q[0] - C[0])
    sweep = 1 if cross > 0 else 0
    R = r * _SIZE / 2
    return f"M {_xy(P)} A {R:.4f} {R:.4f} 0 0 {sweep} {_xy(Q)}"


def render_svg(edges, horocycles=(), vertices=(), title: str | None = None) -> str:
    """Deterministic SVG of geodesics (and optional horocycles and vertex dots)."""
    half = _SIZE / 2 * _PAD
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{-half:.1f} {-half:.1f} {2 * half:.1f} {2 * half:.1f}" '
        f'width="{_SIZE}" height="{_SIZE}">',
    ]
    if title:
        lines.append(f"<title>{title}</title>")
    lines.append(f'<circle cx="0" cy="0" r="{_SIZE / 2:.1f}" fill="none" stroke="black" stroke-width="1.5"/>')
    lines.append('<g fill="none" stroke="#1f4e9a" stroke-width="0.6">')
    for e in sorted(edges):
        lines.append(f'<path d="{_path(e.lo, e.hi)}"/>')
    lines.append("</g>")
    if horocycles:
        lines.append('<g fill="none" stroke="#b03030" stroke-width="0.6">')
        for h in sorted(horocycles, key=lambda h: disk_point(h.base)):
            (cx, cy), r = horocycle_circle(h)
            s = _SIZE / 2
            lines.append(f'<circle cx="{cx * s:.4f}" cy="{-cy * s:.4f}" r="{r * s:.4f}"/>')
        lines.append("</g>")
    if vertices:
        lines.append('<g fill="black">')
        for v in vertices:
            x, y = _xy(disk_point(v)).split()
            lines.append(f'<circle cx="{x}" cy="{y}" r="1.5"/>')
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_edges(edges: list[GeodesicEdge], **kw) -> str:
    return render_svg(edges, **kw)
