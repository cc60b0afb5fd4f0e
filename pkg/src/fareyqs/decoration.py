"""Horocycle decorations, lambda lengths and the pinched condition."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .farey import INF, ONE, ZERO, ExtRat, GeodesicEdge, Window, default_fan_base, fan_matrix
from .geometry import (
    Horocycle,
    arc_length_in_triangle,
    horocycle_arc,
    is_exact,
    lambda_from_horocycles,
    size_for_unit_arc,
)
from .shear import ShearFunction, VertexMap, develop


class Decoration:
    """One horocycle per vertex, keyed by its base point."""

    def __init__(self, horocycles):
        self._h = {}
        for h in horocycles:
            self._h[_key(h.base)] = h

    @classmethod
    def from_sizes(cls, sizes: dict) -> "Decoration":
        return cls(Horocycle(b, s) for b, s in sizes.items())

    def __getitem__(self, base) -> Horocycle:
        try:
            return self._h[_key(base)]
        except KeyError:
            raise KeyError(f"no horocycle at {base}") from None

    def __contains__(self, base) -> bool:
        return _key(base) in self._h

    def __iter__(self):
        return iter(self._h.values())

    def __len__(self):
        return len(self._h)

    def rescaled(self, factors: dict) -> "Decoration":
        """Multiply selected horocycle sizes by the given factors."""
        out = []
        for h in self:
            f = factors.get(h.base)
            out.append(h if f is None else Horocycle(h.base, h.size * f))
        return Decoration(out)

    def to_json(self) -> list:
        items = sorted(self, key=lambda h: _sort_key(h.base))
        return [{"vertex": str(h.base), "size": str(h.size)} for h in items]


def _key(base):
    if isinstance(base, ExtRat):
        return base
    if isinstance(base, float):
        if math.isinf(base):
            return INF
        return base
    return ExtRat.coerce(base)


def _sort_key(b):
    return (1, 0) if b == INF or (isinstance(b, float) and math.isinf(b)) else (0, float(b))


def canonical_decoration(w: Window) -> Decoration:
    """Diameter ``1/q**2`` at ``p/q`` and height 1 at infinity: every Farey lambda length is 1."""
    hs = [Horocycle(v, Fraction(1, v.den * v.den)) for v in w.iter_vertices() if v.den]
    hs.append(Horocycle(INF, Fraction(1)))
    return Decoration(hs)


class LambdaAssignment(dict):
    """Edge -> positive lambda length."""

    def __setitem__(self, e, value):
        if not value > 0:
            raise ValueError(f"lambda length on {e} must be positive")
        super().__setitem__(e, value)

    def to_json(self) -> list:
        return [{"edge": str(e), "lambda": str(v)} for e, v in sorted(self.items())]


def lambda_lengths(T, dec: Decoration) -> LambdaAssignment:
    """Lambda length of every edge of ``T`` from the decoration's horocycles."""
    lams = LambdaAssignment()
    for e in T.sorted_edges():
        lams[e] = lambda_from_horocycles(dec[e.lo], dec[e.hi])
    return lams


@dataclass
class PinchReport:
    passed: bool
    min: object
    max: object
    witnesses: dict = field(default_factory=dict)  # "min"/"max" -> edge

    def to_json(self) -> dict:
        return {"pass": self.passed, "min": str(self.min), "max": str(self.max),
                "witnesses": {k: str(v) for k, v in self.witnesses.items()}}


def is_pinched(lams: dict, M) -> PinchReport:
    """Whether every lambda length lies in ``[1/M, M]``."""
    if not M > 1:
        raise ValueError("M must exceed 1")
    if not lams:
        raise ValueError("empty assignment")
    lo_e = min(lams, key=lams.__getitem__)
    hi_e = max(lams, key=lams.__getitem__)
    lo, hi = lams[lo_e], lams[hi_e]
    inv = 1 / Fraction(M) if is_exact(M) else 1 / M
    return PinchReport(inv <= lo and hi <= M, lo, hi, {"min": lo_e, "max": hi_e})


# --- decorations built from shears ------------------------------------------


def _anchor_neighbors(p: ExtRat):
    a, b, c, d = fan_matrix(p)
    return ExtRat(b, d), ExtRat(a + b, c + d)


def decoration_for_vertex_map(h: VertexMap) -> Decoration:
    """At each image vertex, the horocycle with unit arc in the index-0 fan sector.

    The sector at ``p`` lies between ``(p, A(0))`` and ``(p, A(1))`` for the
    default fan anchor; both are Farey parents of ``p`` and so belong to
    every window containing ``p``.
    """
    out = []
    for p in h.domain():
        u, v = _anchor_neighbors(p)
        out.append(Horocycle(h[p], size_for_unit_arc(h[p], h[u], h[v])))
    return Decoration(out)


def decoration_from_shears(s: ShearFunction, w: Window, normalization=(ZERO, ONE, INF)) -> Decoration:
    """Decoration of the developed triangulation with one unit arc per vertex."""
    wi = w if w.include_infinity else Window(w.max_num, w.max_den, True)
    return decoration_for_vertex_map(develop(s, wi, normalization))


def decoration_arcs(T, dec: Decoration) -> dict:
    """Directly measured horocyclic arcs: ``(vertex, (u, v)) -> length`` for each triangle corner."""
    arcs = {}
    for tri in T.triangles():
        for i in range(3):
            p, u, v = tri[i], tri[(i + 1) % 3], tri[(i + 2) % 3]
            arcs[(p, (u, v))] = horocycle_arc(dec[p], u, v)
    return arcs


def lambda_arcs(T, lams: dict) -> dict:
    """Arcs from lambda lengths alone: ``alpha_a = lam_bc / (lam_ab lam_ac)``."""
    arcs = {}
    for tri in T.triangles():
        for i in range(3):
            p, u, v = tri[i], tri[(i + 1) % 3], tri[(i + 2) % 3]
            arcs[(p, (u, v))] = arc_length_in_triangle(
                lams[GeodesicEdge(u, v)], lams[GeodesicEdge(p, u)], lams[GeodesicEdge(p, v)]
            )
    return arcs


def fan_arc_runs(T, arcs: dict) -> dict:
    """For each vertex, its arcs in circular order grouped into contiguous runs."""
    by_vertex: dict = {}
    for (p, (u, v)), a in arcs.items():
        by_vertex.setdefault(p, {})[frozenset((u, v))] = a
    runs = {}
    for p, sectors in by_vertex.items():
        nbrs = T.neighbors_in_order(p)
        n = len(nbrs)
        seq = [sectors.get(frozenset((nbrs[i], nbrs[(i + 1) % n]))) for i in range(n)] if n > 1 else []
        # start right after a missing sector so no run is cut at the wrap
        gaps = [i for i, a in enumerate(seq) if a is None]
        if gaps:
            seq = seq[gaps[-1] + 1:] + seq[:gaps[-1] + 1]
        out, cur = [], []
        for a in seq:
            if a is None:
                if cur:
                    out.append(cur)
                cur = []
            else:
                cur.append(a)
        if cur:
            out.append(cur)
        runs[p] = out
    return runs


def run_ratios(run: list):
    """Extreme right/left sums over all splits of a contiguous arc run."""
    lo = hi = None
    n_arcs = len(run)
    for k in range(1, n_arcs):
        right = left = 0
        for n in range(1, min(k, n_arcs - k) + 1):
            right += run[k + n - 1]
            left += run[k - n]
            r = right / left
            if lo is None or r < lo:
                lo = r
            if hi is None or r > hi:
                hi = r
    return lo, hi


@dataclass
class PinchedQSReport:
    M: object
    arc_min: object
    arc_max: object
    ratio_min: object
    ratio_max: object
    arcs_ok: bool
    ratios_ok: bool

    @property
    def passed(self) -> bool:
        return self.arcs_ok and self.ratios_ok


def pinched_forces_qs(T, lams: dict, M) -> PinchedQSReport:
    """Measure arcs and fan ratios implied by ``lams`` and check ``M**3`` and ``M**6``."""
    arcs = lambda_arcs(T, lams)
    vals = list(arcs.values())
    a_lo, a_hi = min(vals), max(vals)
    r_lo = r_hi = None
    for runs in fan_arc_runs(T, arcs).values():
        for run in runs:
            lo, hi = run_ratios(run)
            if lo is None:
                continue
            r_lo = lo if r_lo is None or lo < r_lo else r_lo
            r_hi = hi if r_hi is None or hi > r_hi else r_hi
    Mq = Fraction(M) if is_exact(M) else M
    arcs_ok = 1 / Mq**3 <= a_lo and a_hi <= Mq**3
    ratios_ok = r_lo is None or (1 / Mq**6 <= r_lo and r_hi <= Mq**6)
    return PinchedQSReport(M, a_lo, a_hi, r_lo, r_hi, arcs_ok, ratios_ok)


__all__ = [
    "Decoration", "LambdaAssignment", "canonical_decoration", "lambda_lengths", "is_pinched",
    "decoration_for_vertex_map", "decoration_from_shears", "decoration_arcs", "lambda_arcs",
    "pinched_forces_qs", "default_fan_base",
]
