"""Finite window triangulations: flips with Ptolemy updates and crossing counts."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .decoration import Decoration
from .farey import (
    INF,
    ONE,
    ZERO,
    ExtRat,
    GeodesicEdge,
    Window,
    circular_cross,
    cyclically_increasing,
    farey_edges_in_window,
    sorted_vertices,
    vertex_sort_key,
)
from .geometry import Horocycle, is_exact, penetration_depth, ptolemy
from .shear import VertexMap


class InvalidFlipError(ValueError):
    pass


class CrossingEdgesError(ValueError):
    pass


def _edge_key(e: GeodesicEdge):
    return (vertex_sort_key(e.lo), vertex_sort_key(e.hi))


class WindowTriangulation:
    """A finite set of pairwise non-crossing edges on rational vertices.

    ``backend`` records how the edges were produced: ``"farey"``,
    ``("diff", removed, added)`` relative to the Farey edges of the window,
    or ``("image_of", vertex_map)``.
    """

    def __init__(self, window: Window, edges, backend, *, check: bool = True):
        self.window = window
        self.edges = frozenset(edges)
        self.backend = backend
        self._adj = None
        self._tris = None
        if check:
            self._check_added()

    # construction

    @classmethod
    def farey(cls, w: Window) -> "WindowTriangulation":
        return cls(w, farey_edges_in_window(w), "farey", check=False)

    @classmethod
    def from_diff(cls, w: Window, removed, added) -> "WindowTriangulation":
        base = set(farey_edges_in_window(w))
        removed = frozenset(removed)
        added = frozenset(added)
        missing = removed - base
        if missing:
            raise ValueError(f"removed edge {min(missing, key=_edge_key)} is not a window Farey edge")
        t = cls(w, (base - removed) | added, ("diff", removed, added - base), check=False)
        t._check_new(added - base)
        return t

    @classmethod
    def image_of(cls, h: VertexMap, w: Window | None = None) -> "WindowTriangulation":
        """``h(F)``: images of the Farey edges whose endpoints lie in ``h``'s domain."""
        if not h.exact:
            raise ValueError("image triangulations need an exact vertex map")
        w = w or h.window
        edges = []
        for e in farey_edges_in_window(w):
            if e.lo in h and e.hi in h:
                edges.append(GeodesicEdge(h[e.lo], h[e.hi]))
        return cls(w, edges, ("image_of", h), check=False)

    def _check_added(self):
        if self.backend == "farey":
            return
        if self.backend[0] == "diff":
            self._check_new(self.backend[2])
        else:
            self._check_new(self.edges)

    def _check_new(self, new):
        new = sorted(new, key=_edge_key)
        if not new:
            return
        rk = _Ranks(self.vertices())
        C, D = rk.arrays(self.edges)
        for e in new:
            if _count_crossings(rk.pair(e), C, D):
                raise CrossingEdgesError(f"edge {e} crosses another edge")

    def with_edges(self, edges) -> "WindowTriangulation":
        """Same window, new edge set, recorded as a diff against Farey."""
        base = set(farey_edges_in_window(self.window))
        edges = frozenset(edges)
        return WindowTriangulation(
            self.window, edges, ("diff", frozenset(base - edges), frozenset(edges - base)), check=False
        )

    # structure

    def __contains__(self, e) -> bool:
        return e in self.edges

    def __eq__(self, other):
        if not isinstance(other, WindowTriangulation):
            return NotImplemented
        return self.window == other.window and self.edges == other.edges

    def __hash__(self):
        return hash((self.window, self.edges))

    def __len__(self):
        return len(self.edges)

    def sorted_edges(self) -> list[GeodesicEdge]:
        return sorted(self.edges, key=_edge_key)

    def vertices(self) -> list[ExtRat]:
        vs = set()
        for e in self.edges:
            vs.add(e.lo)
            vs.add(e.hi)
        return sorted_vertices(vs)

    def adjacency(self) -> dict:
        if self._adj is None:
            adj: dict = {}
            for e in self.edges:
                adj.setdefault(e.lo, set()).add(e.hi)
                adj.setdefault(e.hi, set()).add(e.lo)
            self._adj = adj
        return self._adj

    def neighbors_in_order(self, p) -> list[ExtRat]:
        """Neighbors of ``p`` in positive circular order starting just after ``p``."""
        p = ExtRat.coerce(p)
        nb = sorted_vertices(self.adjacency().get(p, ()))
        after = [v for v in nb if p < v]
        before = [v for v in nb if v < p]
        return after + before

    def triangles(self) -> list[tuple]:
        """All faces, each as a positively ordered vertex triple starting at its least vertex.

        With pairwise non-crossing edges every 3-cycle bounds a face.
        """
        if self._tris is None:
            adj = self.adjacency()
            out = set()
            for e in self.edges:
                for w in adj[e.lo] & adj[e.hi]:
                    t = sorted((e.lo, e.hi, w), key=vertex_sort_key)
                    out.add(tuple(t))
            self._tris = sorted(out, key=lambda t: tuple(vertex_sort_key(v) for v in t))
        return self._tris

    def _sides(self, e: GeodesicEdge):
        """Apexes of the faces on ``e``: (inside ``(lo, hi)``, outside), ``None`` when absent."""
        adj = self.adjacency()
        inside = outside = None
        for w in adj.get(e.lo, set()) & adj.get(e.hi, set()):
            if e.lo < w < e.hi:
                inside = w
            else:
                outside = w
        return inside, outside

    def flip_quad(self, e: GeodesicEdge) -> tuple:
        """``(a, b, c, d)`` in circular order with diagonal ``(a, c) = e``."""
        if e not in self.edges:
            raise InvalidFlipError(f"{e} is not an edge")
        b, d = self._sides(e)
        if b is None or d is None:
            raise InvalidFlipError(f"{e} is a boundary edge of the window")
        return (e.lo, b, e.hi, d)

    def is_interior(self, e: GeodesicEdge) -> bool:
        b, d = self._sides(e)
        return b is not None and d is not None

    def interior_edges(self) -> list[GeodesicEdge]:
        return [e for e in self.sorted_edges() if self.is_interior(e)]

    def to_json(self) -> dict:
        from .serialize import triangulation_to_json

        return triangulation_to_json(self)


def quad_of_edge(T: WindowTriangulation, e: GeodesicEdge) -> tuple:
    """The quadrilateral with diagonal ``e``, listed in increasing (hence circular) order."""
    return tuple(sorted(T.flip_quad(e), key=vertex_sort_key))


def _tri(a, b, c) -> frozenset:
    return frozenset((a, b, c))


def simultaneous_flip(T: WindowTriangulation, D, lams: dict | None = None):
    """Replace every diagonal in ``D`` by the other diagonal of its quadrilateral.

    The quadrilaterals must be pairwise triangle-disjoint.  With ``lams``, new
    diagonals get their Ptolemy value and all other values carry over.
    Returns ``(T', lams')`` (``lams'`` is ``None`` when ``lams`` is).
    """
    D = sorted(set(D), key=_edge_key)
    if not D:
        raise InvalidFlipError("empty flip set")
    used: dict = {}
    quads = []
    for e in D:
        a, b, c, d = T.flip_quad(e)
        for t in (_tri(a, b, c), _tri(a, c, d)):
            if t in used:
                raise InvalidFlipError(f"quadrilaterals of {used[t]} and {e} share a triangle")
            used[t] = e
        quads.append((e, (a, b, c, d)))
    edges = set(T.edges)
    new_lams = None if lams is None else type(lams)(lams) if isinstance(lams, dict) else dict(lams)
    for e, (a, b, c, d) in quads:
        f = GeodesicEdge(b, d)
        edges.discard(e)
        edges.add(f)
        if lams is not None:
            new_lams.pop(e)
            dict.__setitem__(new_lams, f, ptolemy(
                lams[GeodesicEdge(a, b)], lams[GeodesicEdge(b, c)],
                lams[GeodesicEdge(c, d)], lams[GeodesicEdge(d, a)], lams[e],
            ))
    T2 = T.with_edges(edges)
    T2._check_new([GeodesicEdge(q[1], q[3]) for _, q in quads])
    return T2, new_lams


# --- crossings --------------------------------------------------------------


class _Ranks:
    """Integer positions on the circle for a fixed vertex set (infinity last)."""

    def __init__(self, vertices):
        self.order = sorted_vertices(set(vertices))
        self.rank = {v: i for i, v in enumerate(self.order)}

    def pair(self, e: GeodesicEdge) -> tuple[int, int]:
        return self.rank[e.lo], self.rank[e.hi]

    def arrays(self, edges):
        pairs = [self.pair(e) for e in edges]
        if not pairs:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        arr = np.array(pairs, dtype=np.int64)
        return arr[:, 0], arr[:, 1]


def _count_crossings(pair, C, D) -> int:
    a, b = pair
    # exactly one endpoint strictly inside (a, b), the other strictly outside
    in_c = (C > a) & (C < b)
    in_d = (D > a) & (D < b)
    out_c = (C < a) | (C > b)
    out_d = (D < a) | (D > b)
    return int(np.count_nonzero((in_c & out_d) | (in_d & out_c)))


def intersection_number(e: GeodesicEdge, T: WindowTriangulation) -> int:
    """How many edges of ``T`` cross ``e`` (shared endpoints never count)."""
    rk = _Ranks(T.vertices() + [e.lo, e.hi])
    C, D = rk.arrays(T.edges)
    return _count_crossings(rk.pair(e), C, D)


@dataclass
class CrossingReport:
    n: int
    m: int
    witness_n: GeodesicEdge | None
    witness_m: GeodesicEdge | None
    note: str = "window values are lower bounds for the full sups"

    def __iter__(self):
        return iter((self.n, self.m))

    def __eq__(self, other):
        if isinstance(other, tuple):
            return (self.n, self.m) == other
        return NotImplemented

    def to_json(self) -> dict:
        return {
            "n": self.n, "m": self.m,
            "witnesses": [None if w is None else str(w) for w in (self.witness_n, self.witness_m)],
            "note": self.note,
        }


def _max_over(src: WindowTriangulation, dst: WindowTriangulation, rk: _Ranks):
    C, D = rk.arrays(dst.edges)
    best, wit = 0, None
    for e in src.interior_edges():
        c = _count_crossings(rk.pair(e), C, D)
        if c > best:
            best, wit = c, e
    return best, wit


def max_crossing(T1: WindowTriangulation, T2: WindowTriangulation) -> CrossingReport:
    """``(n, m)``: the most edges of ``T2`` crossed by one interior edge of ``T1``, and conversely."""
    rk = _Ranks(T1.vertices() + T2.vertices())
    n, wn = _max_over(T1, T2, rk)
    m, wm = _max_over(T2, T1, rk)
    return CrossingReport(n, m, wn, wm)


@dataclass
class TransitivityReport:
    n: int
    m: int
    measured: int
    bound: int
    witness: GeodesicEdge | None

    @property
    def passed(self) -> bool:
        return self.measured <= self.bound

    @property
    def slack(self) -> int:
        return self.bound - self.measured

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.m, "measured": self.measured, "bound": self.bound,
                "slack": self.slack, "pass": self.passed,
                "witness": None if self.witness is None else str(self.witness)}


def check_transitivity_bound(T1, T2, T3) -> TransitivityReport:
    """Check ``max i(., T3)`` over ``T1`` against ``9 (n + 2)(m + 2)``."""
    n = max_crossing(T1, T2).n
    m = max_crossing(T2, T3).n
    rk = _Ranks(T1.vertices() + T3.vertices())
    measured, wit = _max_over(T1, T3, rk)
    return TransitivityReport(n, m, measured, 9 * (n + 2) * (m + 2), wit)


# --- horoball depth ---------------------------------------------------------


def arc_depth(e: GeodesicEdge, dec: Decoration) -> float:
    """Deepest penetration of ``e`` into a horoball of ``dec`` not based at its endpoints."""
    best = 0.0
    for h in dec:
        if _same_point(h.base, e.lo) or _same_point(h.base, e.hi):
            continue
        best = max(best, penetration_depth(e, h))
    return best


def _same_point(x, v: ExtRat) -> bool:
    if isinstance(x, ExtRat):
        return x == v
    if isinstance(x, float):
        return (math.isinf(x) and v.den == 0) or (v.den != 0 and x == v.num / v.den)
    return v.den != 0 and x == Fraction(v.num, v.den)


def retract_decoration(dec: Decoration, d) -> Decoration:
    """Push every horocycle a distance ``d`` toward its base point."""
    if d < 0:
        raise ValueError("retraction distance must be non-negative")
    if d == 0:
        return Decoration(list(dec))
    f = math.exp(d)
    return Decoration(
        Horocycle(h.base, h.size * f if h.at_infinity else h.size / f) for h in dec
    )


# --- greedy flip path back to Farey ----------------------------------------


def _disjoint_subset(T: WindowTriangulation, edges) -> list[GeodesicEdge]:
    used: set = set()
    chosen = []
    for e in edges:
        a, b, c, d = T.flip_quad(e)
        ts = (_tri(a, b, c), _tri(a, c, d))
        if ts[0] in used or ts[1] in used:
            continue
        used.update(ts)
        chosen.append(e)
    return chosen


def flip_path_search(T: WindowTriangulation, budget: int):
    """Greedy sequence of simultaneous flips taking ``T`` to the window's Farey edges.

    Each move flips a maximal triangle-disjoint set of edges whose flip
    strictly lowers their crossing count with Farey, larger gains first.
    Returns the list of flip sets, or ``None`` if stuck or over ``budget``.
    """
    if budget < 0:
        raise ValueError("budget must be non-negative")
    target = frozenset(farey_edges_in_window(T.window))
    rk = _Ranks(T.vertices() + sorted_vertices({v for e in target for v in (e.lo, e.hi)}))
    C, D = rk.arrays(target)
    cache: dict = {}

    def cost(e):
        c = cache.get(e)
        if c is None:
            c = cache[e] = _count_crossings(rk.pair(e), C, D)
        return c

    moves = []
    cur = T
    while cur.edges != target:
        if len(moves) >= budget:
            return None
        gains = []
        for e in cur.interior_edges():
            if e in target:
                continue
            a, b, c, d = cur.flip_quad(e)
            g = cost(e) - cost(GeodesicEdge(b, d))
            if g > 0:
                gains.append((-g, _edge_key(e), e))
        if not gains:
            return None
        gains.sort(key=lambda t: (t[0], t[1]))
        move = _disjoint_subset(cur, [g[2] for g in gains])
        cur, _ = simultaneous_flip(cur, move)
        moves.append(move)
    return moves


def apply_flip_sequence(T: WindowTriangulation, seq, lams: dict | None = None):
    for D in seq:
        T, lams = simultaneous_flip(T, D, lams)
    return T, lams


def random_flip_set(T: WindowTriangulation, rng: random.Random, size: int = 1) -> list[GeodesicEdge]:
    """Up to ``size`` interior edges with triangle-disjoint quadrilaterals."""
    cands = T.interior_edges()
    rng.shuffle(cands)
    return _disjoint_subset(T, cands)[:size]


def random_flip_sequence(T: WindowTriangulation, rng: random.Random, depth: int, max_size: int = 2):
    seq = []
    for _ in range(depth):
        D = random_flip_set(T, rng, rng.randint(1, max_size))
        if not D:
            break
        T, _ = simultaneous_flip(T, D)
        seq.append(D)
    return T, seq


# --- characteristic maps -----------------------------------------------------


def characteristic_map(T: WindowTriangulation, base=(ZERO, ONE, INF), image=None) -> VertexMap:
    """The vertex map sending Farey triangles to faces of ``T`` one crossing at a time.

    ``base`` (a Farey triangle) goes to ``image`` (a face of ``T``, default
    ``base`` itself).  The map is defined wherever the faces of ``T`` reach.
    """
    base = [ExtRat.coerce(v) for v in base]
    image = base if image is None else [ExtRat.coerce(v) for v in image]
    if tuple(sorted(image, key=vertex_sort_key)) not in set(T.triangles()):
        raise ValueError(f"{image} is not a face of the triangulation")
    if not cyclically_increasing(*base):
        base = [base[1], base[0], base[2]]
        image = [image[1], image[0], image[2]]
    if not cyclically_increasing(*image):
        raise ValueError("base and image triangles have opposite orientations")
    img = {}
    for v, w in zip(base, image):
        img[v] = w
    adj = T.adjacency()
    stack = [(base[i], base[(i + 1) % 3], base[(i + 2) % 3]) for i in range(3)]
    while stack:
        x, y, z = stack.pop()
        X, Y, Z = img[x], img[y], img[z]
        cands = [w for w in adj.get(X, set()) & adj.get(Y, set()) if w != Z]
        if not cands:
            continue
        V = cands[0]
        m = ExtRat(x.num + y.num, x.den + y.den)
        v = m if m != z else ExtRat(x.num - y.num, x.den - y.den)
        if v in img:
            continue
        img[v] = V
        stack.append((x, v, y))
        stack.append((v, y, x))
    return VertexMap({(k.num, k.den): (w.num, w.den) for k, w in img.items()}, exact=True,
                     window=T.window)


def image_edges(h: VertexMap, T: WindowTriangulation) -> list[GeodesicEdge]:
    """``h`` applied to the edges of ``T`` lying in its domain."""
    return sorted(
        (GeodesicEdge(h[e.lo], h[e.hi]) for e in T.edges if e.lo in h and e.hi in h), key=_edge_key
    )


@dataclass
class FlipMoveReport:
    moves: list = field(default_factory=list)
    reached: bool = False

    def to_json(self) -> dict:
        return {"reached": self.reached, "moves": [[str(e) for e in D] for D in self.moves],
                "note": "windowed flip semantics: an upper bound inside the window only"}


__all__ = [
    "WindowTriangulation", "InvalidFlipError", "CrossingEdgesError", "quad_of_edge",
    "simultaneous_flip", "intersection_number", "max_crossing", "check_transitivity_bound",
    "arc_depth", "retract_decoration", "flip_path_search", "apply_flip_sequence",
    "random_flip_set", "random_flip_sequence", "characteristic_map", "image_edges", "is_exact",
]
