"""Shear functions on the Farey triangulation and what they determine.

A shear function assigns a real number to every Farey edge.  When each value
is the logarithm of a positive rational (its *multiplier*) the developing map
sends rationals to rationals and everything here runs in exact arithmetic.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, NamedTuple, Optional

import numpy as np

from .farey import (
    INF,
    ONE,
    ZERO,
    ExtRat,
    GeodesicEdge,
    Window,
    cyclically_increasing,
    det,
    fan_matrix,
    opposite_vertices,
    sorted_vertices,
)
from .geometry import Mobius, is_exact, mobius_from_triples, place_by_multiplier, quad_multiplier


class DegenerateDevelopmentError(ValueError):
    """The developed vertex map fails to preserve circular order."""


class ShearValue(NamedTuple):
    log: float
    mult: object = None  # exact positive rational e**log, when known

    @classmethod
    def of_mult(cls, mult) -> "ShearValue":
        mult = Fraction(mult)
        if mult <= 0:
            raise ValueError("multiplier must be positive")
        return cls(math.log(mult), mult if mult.denominator != 1 else int(mult))

    @classmethod
    def of_log(cls, log: float) -> "ShearValue":
        log = float(log)
        return cls(log, 1 if log == 0 else None)

    @property
    def float_mult(self) -> float:
        return float(self.mult) if self.mult is not None else math.exp(self.log)


ZERO_SHEAR = ShearValue(0.0, 1)

Pair = tuple  # (num, den) of a canonical ExtRat
Rule = Callable[[Pair, Pair], Optional[ShearValue]]


def _key(u: Pair, v: Pair):
    return (u, v) if u < v else (v, u)


class ShearFunction:
    """Edge -> shear, as sparse entries over a rule over a constant default.

    ``rule`` receives the two endpoints as ``(num, den)`` pairs and returns a
    :class:`ShearValue` or ``None`` to defer to the default.  ``support``, if
    given, maps a window to a finite set of edges outside of which the rule
    is silent there.
    """

    def __init__(
        self,
        entries: dict | None = None,
        *,
        default: ShearValue = ZERO_SHEAR,
        rule: Rule | None = None,
        rule_exact: bool = True,
        name: str | None = None,
        support: Callable[[Window], Iterable[GeodesicEdge]] | None = None,
    ):
        self._entries: dict = {}
        self._edges: dict = {}
        for e, val in (entries or {}).items():
            e = e if isinstance(e, GeodesicEdge) else GeodesicEdge(*e)
            if abs(det(e.lo, e.hi)) != 1:
                raise ValueError(f"{e} is not a Farey edge")
            if not isinstance(val, ShearValue):
                val = ShearValue.of_mult(val) if is_exact(val) else ShearValue.of_log(val)
            self._entries[_key((e.lo.num, e.lo.den), (e.hi.num, e.hi.den))] = val
            self._edges[e] = val
        self.default = default
        self.rule = rule
        self.name = name
        self.support = support
        self._rule_exact = rule_exact
        self.is_exact = (
            default.mult is not None
            and (rule is None or rule_exact)
            and all(v.mult is not None for v in self._entries.values())
        )

    @classmethod
    def zero(cls) -> "ShearFunction":
        return cls(name="zero")

    @classmethod
    def from_multipliers(cls, mults: dict, **kw) -> "ShearFunction":
        return cls({e: ShearValue.of_mult(m) for e, m in mults.items()}, **kw)

    @classmethod
    def from_logs(cls, logs: dict, **kw) -> "ShearFunction":
        return cls({e: ShearValue.of_log(x) for e, x in logs.items()}, **kw)

    @property
    def entries(self) -> dict:
        return dict(self._edges)

    def with_entries(self, entries: dict) -> "ShearFunction":
        merged = dict(self._edges)
        for e, v in entries.items():
            e = e if isinstance(e, GeodesicEdge) else GeodesicEdge(*e)
            merged[e] = v
        return ShearFunction(merged, default=self.default, rule=self.rule,
                             rule_exact=self._rule_exact, name=self.name, support=self.support)

    def _lookup(self, u: Pair, v: Pair) -> ShearValue:
        val = self._entries.get(_key(u, v))
        if val is not None:
            return val
        if self.rule is not None:
            val = self.rule(u, v)
            if val is not None:
                return val
        return self.default

    def shear(self, e: GeodesicEdge) -> ShearValue:
        if abs(det(e.lo, e.hi)) != 1:
            raise ValueError(f"{e} is not a Farey edge")
        return self._lookup((e.lo.num, e.lo.den), (e.hi.num, e.hi.den))

    def value(self, e: GeodesicEdge) -> float:
        return self.shear(e).log

    def multiplier(self, e: GeodesicEdge):
        return self.shear(e).mult

    __call__ = value


# --- vertex maps -----------------------------------------------------------


def _proj_less(a, b) -> bool:
    # a, b: reduced (P, Q) pairs with Q >= 0
    if a[1] == 0:
        return False
    if b[1] == 0:
        return True
    return a[0] * b[1] < b[0] * a[1]


class VertexMap:
    """A map from window vertices to boundary points.

    Exact maps store images as reduced ``(P, Q)`` integer pairs and hand
    back :class:`ExtRat`; float maps store plain floats (``inf`` for infinity).
    """

    def __init__(self, images: dict, *, exact: bool, window: Window | None = None,
                 normalization: tuple = (ZERO, ONE, INF)):
        self._img = images
        self.exact = exact
        self.window = window
        self.normalization = tuple(normalization)

    @classmethod
    def from_mapping(cls, mapping: dict, window: Window | None = None, **kw) -> "VertexMap":
        vals = list(mapping.values())
        exact = all(is_exact(v) for v in vals)
        img = {}
        for k, v in mapping.items():
            k = ExtRat.coerce(k)
            if exact:
                v = ExtRat.coerce(v)
                img[(k.num, k.den)] = (v.num, v.den)
            else:
                img[(k.num, k.den)] = float(v)
        return cls(img, exact=exact, window=window, **kw)

    @classmethod
    def from_function(cls, f, vertices: Iterable, window: Window | None = None, **kw) -> "VertexMap":
        return cls.from_mapping({v: f(v) for v in vertices}, window, **kw)

    def __len__(self):
        return len(self._img)

    def __contains__(self, v) -> bool:
        v = ExtRat.coerce(v)
        return (v.num, v.den) in self._img

    def __getitem__(self, v):
        v = ExtRat.coerce(v)
        val = self._img[(v.num, v.den)]
        if self.exact:
            return ExtRat._raw(*val)
        return val

    def get_pair(self, key: Pair):
        return self._img.get(key)

    def domain(self) -> list[ExtRat]:
        return sorted_vertices(ExtRat._raw(*k) for k in self._img)

    def items(self):
        for v in self.domain():
            yield v, self[v]

    def to_json(self) -> list:
        return [[str(v), str(img)] for v, img in self.items()]

    def is_order_preserving(self) -> bool:
        dom = self.domain()
        if len(dom) < 3:
            return len(set(self._img.values())) == len(dom)
        imgs = [self._img[(v.num, v.den)] for v in dom]
        if self.exact:
            less = _proj_less
        else:
            def less(a, b):
                return a < b
        descents = 0
        n = len(imgs)
        for i in range(n):
            a, b = imgs[i], imgs[(i + 1) % n]
            if not less(a, b):
                descents += 1
                if descents > 1:
                    return False
        return descents == 1

    def compose(self, other: "VertexMap") -> "VertexMap":
        """``self o other`` on the vertices of ``other`` whose image lies in ``self``'s domain."""
        if not (self.exact and other.exact):
            raise ValueError("composition needs exact vertex maps")
        img = {}
        for k, v in other._img.items():
            w = self._img.get(v)
            if w is not None:
                img[k] = w
        return VertexMap(img, exact=True, window=other.window)

    def inverse(self) -> "VertexMap":
        if not self.exact:
            raise ValueError("inverse needs an exact vertex map")
        return VertexMap({v: k for k, v in self._img.items()}, exact=True)


def _canon(p: int, q: int) -> Pair:
    if q < 0:
        return (-p, -q)
    if q == 0:
        return (1, 0)
    return (p, q)


def _reduce(P: int, Q: int) -> Pair:
    g = math.gcd(P, Q)
    if Q < 0:
        g = -g
    elif Q == 0:
        return (1, 0)
    return (P // g, Q // g)


def develop(
    s: ShearFunction,
    w: Window,
    normalization=(ZERO, ONE, INF),
    *,
    exact: bool | None = None,
    rng: random.Random | None = None,
) -> VertexMap:
    """Developing map of ``s`` on the vertices of ``w``.

    Starts from the normalization triangle (fixed pointwise) and crosses one
    Farey edge at a time; the vertex beyond edge ``(x, y)`` of a placed
    triangle ``(x, y, z)`` goes to the point whose quad multiplier is
    ``exp(s(x, y))``.  ``rng`` shuffles the processing order, which must not
    change the result.
    """
    if exact is None:
        exact = s.is_exact
    if exact and not s.is_exact:
        raise ValueError("exact development needs rational multipliers")
    tri = [ExtRat.coerce(v) for v in normalization]
    for i in range(3):
        u, v = tri[i], tri[(i + 1) % 3]
        if u == v or abs(det(u, v)) != 1:
            raise ValueError(f"normalization {normalization} is not a Farey triangle")
    for v in tri:
        if v.den and v not in w:
            raise ValueError(f"normalization vertex {v} lies outside the window")
    if not cyclically_increasing(*tri):
        tri = [tri[1], tri[0], tri[2]]
    N, D = w.max_num, w.max_den
    lookup = s._lookup

    def image(v):
        if exact:
            return (v.num, v.den)
        return (1.0, 0.0) if v.den == 0 else (v.num / v.den, 1.0)

    img = {}
    a, b, c = ((v.num, v.den) for v in tri)
    A, B, C = (image(v) for v in tri)
    img[a], img[b], img[c] = A, B, C

    queue = deque()
    # (x, y, z, X, Y, Z): cross edge (x, y) of the increasing triangle (x, y, z)
    queue.append((a, b, c, A, B, C))
    queue.append((b, c, a, B, C, A))
    queue.append((c, a, b, C, A, B))
    pending = list(queue) if rng is not None else None
    if rng is not None:
        queue.clear()

    def pop():
        if rng is None:
            return queue.popleft()
        i = rng.randrange(len(pending))
        pending[i], pending[-1] = pending[-1], pending[i]
        return pending.pop()

    def push(item):
        if rng is None:
            queue.append(item)
        else:
            pending.append(item)

    while queue or pending:
        x, y, z, X, Y, Z = pop()
        m = (x[0] + y[0], x[1] + y[1])
        if m == z:
            v = _canon(x[0] - y[0], x[1] - y[1])
        else:
            v = m
        vq = v[1]
        if vq == 0:
            if v in img:
                continue
        elif vq > D or v[0] > N or v[0] < -N:
            continue
        if v in img:
            raise RuntimeError(f"vertex {v} reached twice")  # dual graph is a tree
        sv = lookup(x, y)
        zy = Z[0] * Y[1] - Z[1] * Y[0]
        zx = Z[0] * X[1] - Z[1] * X[0]
        if exact:
            mult = sv.mult
            if type(mult) is int:
                ma, mb = mult, 1
            else:
                ma, mb = mult.numerator, mult.denominator
            V = _reduce(mb * X[0] * zy + ma * Y[0] * zx, mb * X[1] * zy + ma * Y[1] * zx)
        else:
            try:
                ma = sv.float_mult
            except OverflowError:
                raise DegenerateDevelopmentError(f"shear on {x}-{y} overflows binary64") from None
            P = X[0] * zy + ma * Y[0] * zx
            Q = X[1] * zy + ma * Y[1] * zx
            V = (1.0, 0.0) if Q == 0 else (P / Q, 1.0)
        img[v] = V
        # new increasing triangle (y, x, v); its fresh edges are (x, v) and (v, y)
        push((x, v, y, X, V, Y))
        push((v, y, x, V, Y, X))

    if not w.include_infinity:
        img.pop((1, 0), None)
    if not exact:
        img = {k: (math.inf if V[1] == 0 else V[0]) for k, V in img.items()}
    h = VertexMap(img, exact=exact, window=w, normalization=tuple(tri))
    if not h.is_order_preserving():
        raise DegenerateDevelopmentError("developed map does not preserve circular order")
    return h


def support_edges(s: ShearFunction, w: Window) -> list[GeodesicEdge]:
    """Edges with both ends in ``w`` where ``s`` is nonzero."""
    if s.default.log != 0:
        raise ValueError("a nonzero default shear has infinite support")
    cands = set(s.entries)
    if s.rule is not None:
        if s.support is None:
            raise ValueError("rule-based shear without a support enumerator")
        cands.update(s.support(w))
    out = [e for e in cands if e.lo in w and e.hi in w and s.shear(e).log != 0]
    return sorted(out, key=lambda e: (e.lo, e.hi))


def _far_of(e: GeodesicEdge, ref: ExtRat):
    # the open arc cut off by e that does not contain ref
    a, b = e.lo, e.hi
    ref_inside = a < ref < b

    def far(v) -> bool:
        return v != a and v != b and (a < v < b) != ref_inside
    return far


def _edge_shear_map(e: GeodesicEdge, ref: ExtRat, mult) -> Mobius:
    """The hyperbolic map along ``e`` that shears its far side by ``mult``."""
    far = _far_of(e, ref)
    p, q = opposite_vertices(e)
    z, w = (p, q) if far(q) else (q, p)
    x, y = e.lo, e.hi
    if not cyclically_increasing(x, y, z):
        x, y = y, x
    w2 = place_by_multiplier(x, y, z, mult)
    return mobius_from_triples((x, y, w), (x, y, w2))


def develop_sparse(s: ShearFunction, vertices, w: Window, normalization=(ZERO, ONE, INF)) -> VertexMap:
    """Developing map at chosen vertices for a shear with finite support in ``w``.

    Off the support every crossing is the identity, so the image of ``v`` is
    the composition of one shear map per support edge separating ``v`` from
    the normalization triangle, nearest edge first.  Exact arithmetic only.
    """
    tri = [ExtRat.coerce(t) for t in normalization]
    for i in range(3):
        if abs(det(tri[i], tri[(i + 1) % 3])) != 1:
            raise ValueError(f"normalization {normalization} is not a Farey triangle")
    if not s.is_exact:
        raise ValueError("sparse development needs rational multipliers")
    maps = []
    for e in support_edges(s, w):
        ref = next(t for t in tri if t != e.lo and t != e.hi)
        far = _far_of(e, ref)
        if any(far(t) for t in tri):
            raise ValueError(f"support edge {e} cuts the normalization triangle")
        maps.append((e, far, _edge_shear_map(e, ref, s.multiplier(e))))
    img = {}
    for v in vertices:
        v = ExtRat.coerce(v)
        if v.den and v not in w:
            raise ValueError(f"vertex {v} lies outside the window")
        crossed = [(e, far, m) for e, far, m in maps if far(v)]
        # far sides are nested; the nearest edge lies beyond none of the others
        depth = [sum(_beyond(c[0], d[0], d[1]) for d in crossed) for c in crossed]
        t = v
        for _, (_, _, m) in sorted(zip(depth, crossed), key=lambda dc: -dc[0]):
            t = m(t)
        img[(v.num, v.den)] = (t.num, t.den)
    return VertexMap(img, exact=True, window=w, normalization=tuple(tri))


def _beyond(e: GeodesicEdge, e2: GeodesicEdge, far2) -> bool:
    """Whether ``e`` lies in the closed far side of ``e2`` (and differs from it)."""
    return e != e2 and all(t == e2.lo or t == e2.hi or far2(t) for t in (e.lo, e.hi))


def quad_of_farey_edge(e: GeodesicEdge) -> tuple[ExtRat, ExtRat, ExtRat, ExtRat]:
    """``(x, y, z, w)`` with ``(x, y, z)`` positively oriented and ``w`` across ``e``."""
    p, q = opposite_vertices(e)
    x, y = e.lo, e.hi
    if cyclically_increasing(x, y, p):
        return (x, y, p, q)
    return (x, y, q, p)


def multiplier_from_vertex_map(h: VertexMap, e: GeodesicEdge):
    quad = quad_of_farey_edge(e)
    for v in quad:
        if v not in h:
            raise KeyError(f"vertex {v} of the quadrilateral on {e} is outside the map's domain")
    return quad_multiplier(*(h[v] for v in quad))


def shear_from_vertex_map(h: VertexMap, e: GeodesicEdge) -> float:
    """Shear of ``h(F)`` across ``h(e)``."""
    return math.log(multiplier_from_vertex_map(h, e))


# --- fans ----------------------------------------------------------------


def fan_shears(s: ShearFunction, p, j_lo: int, j_hi: int, base=None) -> list[ShearValue]:
    """``s(E_j)`` for ``j_lo <= j <= j_hi`` along the fan at ``p``."""
    p = ExtRat.coerce(p)
    a, b, c, d = fan_matrix(p, base)
    tip = (p.num, p.den)
    lookup = s._lookup
    out = []
    if (a, b, c, d) == (1, 0, 0, 1):
        for j in range(j_lo, j_hi + 1):
            out.append(lookup((j, 1), tip))
        return out
    for j in range(j_lo, j_hi + 1):
        P, Q = a * j + b, c * j + d
        out.append(lookup(_canon(P, Q), tip))
    return out


def _arcs(shears: list[ShearValue], j_lo: int, k: int, exact: bool) -> list:
    # arc_j lies between E_j and E_{j+1}; arc_{k-1} = 1 and arc_j / arc_{j-1} = exp(s(E_j))
    n = len(shears)
    anchor = k - 1 - j_lo
    out = [None] * n
    out[anchor] = Fraction(1) if exact else 1.0
    for i in range(anchor + 1, n):
        sv = shears[i]
        out[i] = out[i - 1] * (sv.mult if exact else sv.float_mult)
    for i in range(anchor - 1, -1, -1):
        sv = shears[i + 1]
        out[i] = out[i + 1] / (sv.mult if exact else sv.float_mult)
    return out


def fan_arc_lengths(s: ShearFunction, p, k: int, j_range: tuple[int, int], base=None, *, exact=None) -> list:
    """Horocyclic arcs ``alpha_j`` for ``j`` in ``j_range`` (inclusive), normalized by ``alpha_{k-1} = 1``."""
    if exact is None:
        exact = s.is_exact
    j_lo, j_hi = j_range
    lo = min(j_lo, k - 1)
    hi = max(j_hi, k)
    arcs = _arcs(fan_shears(s, p, lo, hi, base), lo, k, exact)
    return arcs[j_lo - lo: j_hi - lo + 1]


def fan_ratio(s: ShearFunction, p, k: int, n: int, base=None, *, exact=None):
    """Right-to-left ratio of the first ``n`` arcs on either side of ``E_k``."""
    if n < 1:
        raise ValueError("n must be positive")
    arcs = fan_arc_lengths(s, p, k, (k - n, k + n - 1), base, exact=exact)
    return sum(arcs[n:]) / sum(arcs[:n])


@dataclass(frozen=True)
class FanScanParams:
    tips: tuple
    k_range: tuple[int, int]
    n_max: int

    def __post_init__(self):
        object.__setattr__(self, "tips", tuple(ExtRat.coerce(t) for t in self.tips))
        if not self.tips or self.k_range[0] > self.k_range[1] or self.n_max < 1:
            raise ValueError("empty scan")


@dataclass
class QSReport:
    max_ratio: object
    min_ratio: object
    max_witness: tuple  # (tip, k, n)
    min_witness: tuple
    bound: object
    passed: bool
    scanned: int
    note: str = "finite-window certificate: no violation found among scanned fans"

    @property
    def witness(self) -> tuple:
        """The extremal (tip, k, n) farther from 1 on a log scale."""
        if math.log(self.max_ratio) >= -math.log(self.min_ratio):
            return self.max_witness
        return self.min_witness

    def to_json(self) -> dict:
        return {
            "max_ratio": str(self.max_ratio), "min_ratio": str(self.min_ratio),
            "max_witness": _witness_json(self.max_witness),
            "min_witness": _witness_json(self.min_witness),
            "bound": str(self.bound), "pass": self.passed, "scanned": self.scanned,
            "note": self.note,
        }


def _witness_json(w):
    return None if w is None else [str(w[0])] + [int(t) for t in w[1:]]


def check_qs_certificate(s: ShearFunction, params: FanScanParams, M, *, exact=None) -> QSReport:
    """Scan ``s(k, n; p)`` over the given tips, ``k`` and ``n <= n_max``; pass iff all lie in ``[1/M, M]``."""
    if M < 1:
        raise ValueError("M must be at least 1")
    if exact is None:
        exact = s.is_exact and params.n_max * (params.k_range[1] - params.k_range[0] + 1) <= 200_000
    k_lo, k_hi = params.k_range
    nm = params.n_max
    best_max, best_min = None, None
    wmax = wmin = None
    scanned = 0
    for p in params.tips:
        lo = k_lo - nm
        sh = fan_shears(s, p, lo, k_hi + nm - 1)
        if exact:
            # beta_j = prod_{i <= j} mult_i, any anchor works for ratios
            beta = []
            cur = Fraction(1)
            for sv in sh:
                if sv.mult != 1:
                    cur = cur * sv.mult
                beta.append(cur)
            for k in range(k_lo, k_hi + 1):
                c = k - lo
                right = left = Fraction(0)
                for n in range(1, nm + 1):
                    right += beta[c + n - 1]
                    left += beta[c - n]
                    r = right / left
                    scanned += 1
                    if best_max is None or r > best_max:
                        best_max, wmax = r, (p, k, n)
                    if best_min is None or r < best_min:
                        best_min, wmin = r, (p, k, n)
        else:
            logs = np.array([sv.log for sv in sh])
            S = np.cumsum(logs)
            beta = np.exp(S - S.max())
            for k in range(k_lo, k_hi + 1):
                c = k - lo
                right = np.cumsum(beta[c:c + nm])
                left = np.cumsum(beta[c - 1::-1][:nm])
                ratios = right / left
                scanned += nm
                i_max = int(np.argmax(ratios))
                i_min = int(np.argmin(ratios))
                if best_max is None or ratios[i_max] > best_max:
                    best_max, wmax = float(ratios[i_max]), (p, k, i_max + 1)
                if best_min is None or ratios[i_min] < best_min:
                    best_min, wmin = float(ratios[i_min]), (p, k, i_min + 1)
    passed = best_max <= M and best_min * M >= 1
    return QSReport(best_max, best_min, wmax, wmin, M, passed, scanned)


@dataclass
class PSReport:
    sup_abs_partial_sum: float
    witness: Optional[tuple]  # (tip, n, m): the sum over n <= j <= m
    sup_multiplier: object = None  # exact exp(sup) when multipliers are rational
    per_tip: dict = field(default_factory=dict)
    note: str = "finite-window certificate over the scanned index range"

    def passes(self, M) -> bool:
        return self.sup_abs_partial_sum <= M

    def to_json(self) -> dict:
        return {
            "sup_abs_partial_sum": self.sup_abs_partial_sum,
            "witness": _witness_json(self.witness),
            "sup_multiplier": None if self.sup_multiplier is None else str(self.sup_multiplier),
            "per_tip": {str(k): v for k, v in self.per_tip.items()},
            "note": self.note,
        }


def check_ps_certificate(s: ShearFunction, params: FanScanParams, *, exact=None) -> PSReport:
    """``max |sum_{j=n}^{m} s(E_j)|`` over the tips and ``k_lo <= n <= m <= k_hi``.

    Runs in one pass per fan: the answer is (max prefix) - (min prefix).
    """
    if exact is None:
        exact = s.is_exact
    k_lo, k_hi = params.k_range
    best = None
    best_w = None
    best_mult = None
    per_tip = {}
    for p in params.tips:
        sh = fan_shears(s, p, k_lo, k_hi)
        # prefix index t means the sum of the first t shears
        if exact:
            cur = Fraction(1)
            hi_v = lo_v = cur
            hi_t = lo_t = 0
            for t, sv in enumerate(sh, 1):
                if sv.mult == 1:
                    continue
                cur = cur * sv.mult
                if cur > hi_v:
                    hi_v, hi_t = cur, t
                elif cur < lo_v:
                    lo_v, lo_t = cur, t
            mult = hi_v / lo_v
            val = math.log(mult)
        else:
            cur = 0.0
            hi_v = lo_v = 0.0
            hi_t = lo_t = 0
            for t, sv in enumerate(sh, 1):
                if sv.log == 0:
                    continue
                cur += sv.log
                if cur > hi_v:
                    hi_v, hi_t = cur, t
                elif cur < lo_v:
                    lo_v, lo_t = cur, t
            mult = None
            val = hi_v - lo_v
        per_tip[p] = val
        if best is None or val > best:
            best, best_mult = val, mult
            if hi_t == lo_t:
                best_w = None
            else:
                a, b = sorted((hi_t, lo_t))
                best_w = (p, k_lo + a, k_lo + b - 1)
    return PSReport(best, best_w, best_mult, per_tip)
