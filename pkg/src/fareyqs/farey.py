"""Extended rationals and the combinatorics of the Farey triangulation.

Vertices are reduced fractions ``p/q`` together with the single point at
infinity ``1/0``.  Two vertices ``a/b`` and ``c/d`` span a Farey edge exactly
when ``|ad - bc| = 1``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from math import gcd
from typing import Iterator


@total_ordering
class ExtRat:
    """A reduced extended rational ``num/den`` with ``den >= 0``.

    Infinity is ``1/0``; ``-1/0`` normalizes to it.  The total order puts
    infinity above every finite value.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: int, den: int = 1):
        num, den = int(num), int(den)
        if num == 0 and den == 0:
            raise ValueError("0/0 is undefined")
        if den < 0:
            num, den = -num, -den
        if den == 0:
            num = 1
        else:
            g = gcd(num, den)
            if g != 1:
                num //= g
                den //= g
        self.num = num
        self.den = den

    @classmethod
    def _raw(cls, num: int, den: int) -> "ExtRat":
        # caller guarantees canonical form
        obj = object.__new__(cls)
        obj.num = num
        obj.den = den
        return obj

    @classmethod
    def coerce(cls, x) -> "ExtRat":
        if isinstance(x, ExtRat):
            return x
        if isinstance(x, bool):
            raise TypeError("bool is not a vertex")
        if isinstance(x, int):
            return cls._raw(x, 1)
        if isinstance(x, Fraction):
            return cls._raw(x.numerator, x.denominator)
        if isinstance(x, str):
            return cls.parse(x)
        if isinstance(x, tuple) and len(x) == 2:
            return cls(*x)
        raise TypeError(f"cannot interpret {x!r} as an extended rational")

    @classmethod
    def parse(cls, text: str) -> "ExtRat":
        text = text.strip()
        if text in ("inf", "oo", "∞"):
            return INF
        m = re.fullmatch(r"(-?\d+)(?:/(-?\d+))?", text)
        if not m:
            raise ValueError(f"not an extended rational: {text!r}")
        return cls(int(m.group(1)), int(m.group(2) or 1))

    @property
    def is_inf(self) -> bool:
        return self.den == 0

    def to_fraction(self) -> Fraction:
        if self.den == 0:
            raise ValueError("infinity has no finite value")
        return Fraction(self.num, self.den)

    def __float__(self) -> float:
        if self.den == 0:
            return float("inf")
        return self.num / self.den

    def __eq__(self, other):
        if isinstance(other, ExtRat):
            return self.num == other.num and self.den == other.den
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __lt__(self, other):
        if not isinstance(other, ExtRat):
            return NotImplemented
        if self.den == 0:
            return False
        if other.den == 0:
            return True
        return self.num * other.den < other.num * self.den

    def __str__(self):
        return f"{self.num}/{self.den}"

    def __repr__(self):
        return f"ExtRat({self.num}, {self.den})"

    def __reduce__(self):
        return (ExtRat, (self.num, self.den))


INF = ExtRat._raw(1, 0)
ZERO = ExtRat._raw(0, 1)
ONE = ExtRat._raw(1, 1)


def reduce(num: int, den: int) -> ExtRat:
    return ExtRat(num, den)


def det(u: ExtRat, v: ExtRat) -> int:
    return u.num * v.den - u.den * v.num


class GeodesicEdge:
    """Unordered pair of distinct vertices, stored with ``lo < hi``."""

    __slots__ = ("lo", "hi")

    def __init__(self, u, v):
        u = ExtRat.coerce(u)
        v = ExtRat.coerce(v)
        if u == v:
            raise ValueError(f"degenerate edge at {u}")
        if v < u:
            u, v = v, u
        self.lo = u
        self.hi = v

    @classmethod
    def parse(cls, text: str) -> "GeodesicEdge":
        m = re.fullmatch(r"\s*(-?\d+(?:/-?\d+)?)\s*-\s*(-?\d+(?:/-?\d+)?)\s*", text)
        if not m:
            raise ValueError(f"not an edge: {text!r}")
        return cls(ExtRat.parse(m.group(1)), ExtRat.parse(m.group(2)))

    @property
    def endpoints(self) -> tuple[ExtRat, ExtRat]:
        return (self.lo, self.hi)

    def other(self, v: ExtRat) -> ExtRat:
        if v == self.lo:
            return self.hi
        if v == self.hi:
            return self.lo
        raise ValueError(f"{v} is not an endpoint of {self}")

    def __contains__(self, v) -> bool:
        return v == self.lo or v == self.hi

    def __eq__(self, other):
        if isinstance(other, GeodesicEdge):
            return self.lo == other.lo and self.hi == other.hi
        return NotImplemented

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __lt__(self, other):
        return (self.lo, self.hi) < (other.lo, other.hi)

    def __str__(self):
        return f"{self.lo}-{self.hi}"

    def __repr__(self):
        return f"GeodesicEdge({self.lo}, {self.hi})"


Edge = GeodesicEdge


@dataclass(frozen=True)
class Window:
    """Finite truncation ``{p/q : |p| <= max_num, 1 <= q <= max_den}``, plus infinity if flagged."""

    max_num: int
    max_den: int
    include_infinity: bool = True

    def __post_init__(self):
        if self.max_num < 1 or self.max_den < 1:
            raise ValueError("window bounds must be positive")

    def __contains__(self, v) -> bool:
        v = ExtRat.coerce(v)
        if v.den == 0:
            return self.include_infinity
        return abs(v.num) <= self.max_num and v.den <= self.max_den

    def contains_pair(self, num: int, den: int) -> bool:
        if den == 0:
            return self.include_infinity
        return -self.max_num <= num <= self.max_num and den <= self.max_den

    def iter_vertices(self) -> Iterator[ExtRat]:
        """Vertices grouped by denominator (not sorted)."""
        n = self.max_num
        for q in range(1, self.max_den + 1):
            for p in range(-n, n + 1):
                if gcd(p, q) == 1:
                    yield ExtRat._raw(p, q)
        if self.include_infinity:
            yield INF

    def vertices(self) -> list[ExtRat]:
        return sorted_vertices(self.iter_vertices())

    def to_json(self) -> dict:
        return {"max_num": self.max_num, "max_den": self.max_den, "infinity": self.include_infinity}

    @classmethod
    def from_json(cls, data) -> "Window":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(int(data["max_num"]), int(data["max_den"]), bool(data.get("infinity", True)))


def vertex_sort_key(v: ExtRat):
    return (1, 0) if v.den == 0 else (0, Fraction(v.num, v.den))


def sorted_vertices(vs) -> list[ExtRat]:
    vs = list(vs)
    finite = [v for v in vs if v.den]
    # floats separate p/q, r/s whenever q*s*max|p| stays well inside 2**52
    big = max((abs(v.num) * v.den for v in finite), default=0)
    maxden = max((v.den for v in finite), default=1)
    if big * maxden < 2**50:
        finite.sort(key=lambda v: v.num / v.den)
    else:
        finite.sort(key=lambda v: Fraction(v.num, v.den))
    if len(finite) < len(vs):
        finite.append(INF)
    return finite


def is_farey_neighbor(u, v) -> bool:
    u = ExtRat.coerce(u)
    v = ExtRat.coerce(v)
    if u == v:
        raise ValueError("a vertex is not its own neighbor")
    return abs(det(u, v)) == 1


def mediant(u, v) -> ExtRat:
    u = ExtRat.coerce(u)
    v = ExtRat.coerce(v)
    if not is_farey_neighbor(u, v):
        raise ValueError(f"{u} and {v} are not Farey neighbors")
    return ExtRat(u.num + v.num, u.den + v.den)


def opposite_vertices(e: GeodesicEdge) -> tuple[ExtRat, ExtRat]:
    """The two apexes of the Farey triangles on ``e``: (mediant, difference)."""
    u, v = e.lo, e.hi
    if abs(det(u, v)) != 1:
        raise ValueError(f"{e} is not a Farey edge")
    return (ExtRat(u.num + v.num, u.den + v.den), ExtRat(u.num - v.num, u.den - v.den))


def _neighbors_in_window(u: ExtRat, w: Window) -> Iterator[ExtRat]:
    a, b = u.num, u.den
    N, D = w.max_num, w.max_den
    if b == 0:
        for j in range(-N, N + 1):
            yield ExtRat._raw(j, 1)
        return
    if a == 0:
        for d in range(1, D + 1):
            yield ExtRat._raw(1, d)
            yield ExtRat._raw(-1, d)
        if w.include_infinity:
            yield INF
        return
    # a*d0 - b*c0 = 1
    if b == 1:
        d0, c0 = 0, -1
    else:
        d0 = pow(a, -1, b)
        c0 = (a * d0 - 1) // b
    for sign in (1, -1):
        cs, ds = sign * c0, sign * d0
        # d = ds + t*b must lie in [0, D]
        t_lo = -(ds // b)
        t_hi = (D - ds) // b
        for t in range(t_lo, t_hi + 1):
            d = ds + t * b
            c = cs + t * a
            if d == 0:
                if w.include_infinity:
                    yield INF
            elif -N <= c <= N:
                yield ExtRat._raw(c, d)


def farey_edges_in_window(w: Window) -> list[GeodesicEdge]:
    """All Farey edges with both endpoints in ``w``, sorted by ``(lo, hi)``."""
    out = set()
    for u in w.iter_vertices():
        for v in _neighbors_in_window(u, w):
            if u < v:
                out.add((u, v))
    edges = []
    for u, v in out:
        e = object.__new__(GeodesicEdge)
        e.lo, e.hi = u, v
        edges.append(e)
    edges.sort(key=lambda e: (vertex_sort_key(e.lo), vertex_sort_key(e.hi)))
    return edges


def strictly_between(a: ExtRat, x: ExtRat, b: ExtRat) -> bool:
    """``a < x < b`` in the total order (infinity last)."""
    return a < x < b


def circular_cross(e1: GeodesicEdge, e2: GeodesicEdge) -> bool:
    """True iff the endpoints of ``e2`` separate those of ``e1`` on the circle."""
    a, b = e1.lo, e1.hi
    c, d = e2.lo, e2.hi
    if c == a or c == b or d == a or d == b:
        return False
    return (a < c < b) != (a < d < b)


def cyclically_increasing(x, y, z) -> bool:
    """Whether ``x -> y -> z`` runs in the positive direction around the circle."""
    return (x < y < z) or (y < z < x) or (z < x < y)


def default_fan_base(p) -> ExtRat:
    """Anchor vertex for index 0 of the fan at ``p``.

    Chosen so that fan indices 0 and 1 are the two Farey parents of ``p``
    (for ``p = inf``: 0 and 1; for integers ``a >= 0``: inf and ``a - 1``;
    for integers ``a < 0``: ``a + 1`` and inf).
    """
    p = ExtRat.coerce(p)
    a, b = p.num, p.den
    if b == 0:
        return ZERO
    if b == 1:
        return INF if a >= 0 else ExtRat._raw(a + 1, 1)
    # parent u > p satisfies b*c - a*d = 1 with 0 < d < b
    d = (-pow(a, -1, b)) % b
    c = (a * d + 1) // b
    return ExtRat._raw(c, d)


def fan_matrix(p, base=None) -> tuple[int, int, int, int]:
    """Integral ``(a, b, c, d)`` of determinant 1 with ``A(inf) = p`` and ``A(0) = base``.

    The fan at ``p`` is then ``E_j = (p, A(j))``.
    """
    p = ExtRat.coerce(p)
    base = default_fan_base(p) if base is None else ExtRat.coerce(base)
    a, c = p.num, p.den
    b, d = base.num, base.den
    dt = a * d - b * c
    if dt == -1:
        b, d = -b, -d
    elif dt != 1:
        raise ValueError(f"fan base {base} is not a Farey neighbor of {p}")
    return (a, b, c, d)


def fan_vertex(p, j: int, base=None, *, matrix=None) -> ExtRat:
    a, b, c, d = matrix if matrix is not None else fan_matrix(p, base)
    return ExtRat(a * j + b, c * j + d)


def fan_edges(p, j_lo: int, j_hi: int, base=None) -> list[GeodesicEdge]:
    """Edges ``E_j`` of the fan at ``p`` for ``j_lo <= j <= j_hi`` in positive order."""
    if j_lo > j_hi:
        raise ValueError("empty index range")
    p = ExtRat.coerce(p)
    m = fan_matrix(p, base)
    return [GeodesicEdge(p, fan_vertex(p, j, matrix=m)) for j in range(j_lo, j_hi + 1)]


def fan_index(p, v, base=None) -> int:
    """Index ``j`` with ``E_j = (p, v)`` in the fan at ``p``."""
    p = ExtRat.coerce(p)
    v = ExtRat.coerce(v)
    a, b, c, d = fan_matrix(p, base)
    # A^{-1} = [[d, -b], [-c, a]]
    num = d * v.num - b * v.den
    den = -c * v.num + a * v.den
    if den == 0 or num % den:
        raise ValueError(f"{v} is not a Farey neighbor of {p}")
    if den != 1 and den != -1:
        raise ValueError(f"{v} is not a Farey neighbor of {p}")
    return num // den
