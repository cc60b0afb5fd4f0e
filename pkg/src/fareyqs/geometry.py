"""Möbius maps, shears, horocycles and lambda lengths in the upper half-plane.

Boundary points are handled projectively as pairs ``(P, Q)``; ``(1, 0)`` is
infinity.  Everything stays exact (``int``/``Fraction``/``ExtRat``) until a
square root or logarithm is unavoidable, then falls back to binary64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .farey import INF, ExtRat, GeodesicEdge


def is_exact(x) -> bool:
    return isinstance(x, (ExtRat, Rational)) and not isinstance(x, bool)


def to_proj(x):
    if isinstance(x, ExtRat):
        return (x.num, x.den)
    if isinstance(x, Fraction):
        return (x.numerator, x.denominator)
    if isinstance(x, int):
        return (x, 1)
    x = float(x)
    if math.isinf(x):
        return (1.0, 0.0)
    return (x, 1.0)


def from_proj(P, Q, exact: bool):
    if Q == 0:
        return INF if exact else math.inf
    if exact:
        f = Fraction(P) / Fraction(Q)
        return ExtRat._raw(f.numerator, f.denominator)
    return P / Q


def as_scalar(x):
    """ExtRat -> Fraction (or math.inf); other values unchanged."""
    if isinstance(x, ExtRat):
        return math.inf if x.den == 0 else Fraction(x.num, x.den)
    return x


def _is_inf(x) -> bool:
    if isinstance(x, ExtRat):
        return x.den == 0
    return isinstance(x, float) and math.isinf(x)


@dataclass(frozen=True)
class Mobius:
    """``x -> (a x + b) / (c x + d)``, compared projectively."""

    a: object
    b: object
    c: object
    d: object

    def __post_init__(self):
        if self.a * self.d - self.b * self.c == 0:
            raise ValueError("degenerate Möbius map")

    @classmethod
    def identity(cls) -> "Mobius":
        return cls(1, 0, 0, 1)

    @property
    def exact(self) -> bool:
        return all(is_exact(t) for t in (self.a, self.b, self.c, self.d))

    @property
    def determinant(self):
        return self.a * self.d - self.b * self.c

    def __call__(self, x):
        return apply(self, x)

    def __matmul__(self, other: "Mobius") -> "Mobius":
        a, b, c, d = self.a, self.b, self.c, self.d
        e, f, g, h = other.a, other.b, other.c, other.d
        return Mobius(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    def __eq__(self, other):
        if not isinstance(other, Mobius):
            return NotImplemented
        m, n = (self.a, self.b, self.c, self.d), (other.a, other.b, other.c, other.d)
        # proportional iff every 2x2 minor vanishes
        return all(m[i] * n[j] == m[j] * n[i] for i in range(4) for j in range(i + 1, 4))

    def __hash__(self):
        return 0

    def to_json(self) -> dict:
        return {k: str(getattr(self, k)) for k in "abcd"}


def apply(m: Mobius, x):
    P, Q = to_proj(x)
    exact = m.exact and is_exact(x)
    return from_proj(m.a * P + m.b * Q, m.c * P + m.d * Q, exact)


def _to_standard(z1, z2, z3) -> Mobius:
    # sends z1 -> 0, z2 -> inf, z3 -> 1
    p1, q1 = to_proj(z1)
    p2, q2 = to_proj(z2)
    p3, q3 = to_proj(z3)
    l1 = p3 * q1 - q3 * p1
    l2 = p3 * q2 - q3 * p2
    if l1 == 0 or l2 == 0 or p1 * q2 - q1 * p2 == 0:
        raise ValueError("triple has repeated points")
    return Mobius(l2 * q1, -l2 * p1, l1 * q2, -l1 * p2)


def mobius_from_triples(src, dst) -> Mobius:
    """The unique Möbius map sending ``src[i]`` to ``dst[i]``."""
    S = _to_standard(*src)
    D = _to_standard(*dst)
    m = D.inverse() @ S
    if m.exact:
        # clear denominators and common factors for a tidy integral form
        entries = [Fraction(t) for t in (m.a, m.b, m.c, m.d)]
        lcm = 1
        for t in entries:
            lcm = lcm * t.denominator // math.gcd(lcm, t.denominator)
        ints = [int(t * lcm) for t in entries]
        g = 0
        for t in ints:
            g = math.gcd(g, t)
        if ints[2] < 0 or (ints[2] == 0 and ints[3] < 0):
            g = -g
        m = Mobius(*(t // g for t in ints))
    return m


def _bracket(u, v):
    return u[0] * v[1] - u[1] * v[0]


def quad_multiplier(x, y, z, w):
    """``M(w)`` where ``M`` sends ``(x, y, z)`` to ``(0, inf, -1)``.

    Exact for exact inputs; the shear across ``(x, y)`` is its logarithm.
    """
    X, Y, Z, W = to_proj(x), to_proj(y), to_proj(z), to_proj(w)
    num = -_bracket(W, X) * _bracket(Z, Y)
    den = _bracket(W, Y) * _bracket(Z, X)
    if den == 0 or _bracket(X, Y) == 0:
        raise ValueError("points are not distinct")
    if all(is_exact(t) for t in (x, y, z, w)):
        return Fraction(num, den)
    return num / den


def shear_of_quad(x, y, z, w) -> float:
    """Shear across the diagonal ``(x, y)`` of the ideal quadrilateral ``x, w, y, z``.

    Normalized so that ``x, y, z -> 0, inf, -1``; the shear is ``log`` of the
    image of ``w``.
    """
    m = quad_multiplier(x, y, z, w)
    if m <= 0:
        raise ValueError("not a quadrilateral with diagonal (x, y)")
    return math.log(m)


def place_by_multiplier(x, y, z, mult):
    """Inverse of :func:`quad_multiplier`: the point ``w`` with ``M(w) = mult``."""
    X, Y, Z = to_proj(x), to_proj(y), to_proj(z)
    if is_exact(mult):
        mult = Fraction(mult)
        a, b = mult.numerator, mult.denominator
    else:
        a, b = mult, 1.0
    zy, zx = _bracket(Z, Y), _bracket(Z, X)
    P = b * X[0] * zy + a * Y[0] * zx
    Q = b * X[1] * zy + a * Y[1] * zx
    return from_proj(P, Q, all(is_exact(t) for t in (x, y, z, mult)))


@dataclass(frozen=True)
class Horocycle:
    """Horocycle tangent at ``base``: Euclidean diameter if finite, height if ``base`` is infinity."""

    base: object
    size: object

    def __post_init__(self):
        if not self.size > 0:
            raise ValueError("horocycle size must be positive")

    @property
    def at_infinity(self) -> bool:
        return _is_inf(self.base)

    def to_json(self) -> dict:
        return {"base": str(self.base), "size": str(self.size)}


def exact_sqrt(x):
    """Square root, exact when ``x`` is the square of a rational."""
    if is_exact(x):
        x = Fraction(x)
        n, d = x.numerator, x.denominator
        rn, rd = math.isqrt(n), math.isqrt(d)
        if rn * rn == n and rd * rd == d:
            return Fraction(rn, rd)
    return math.sqrt(x)


def _diff(x, y):
    return abs(as_scalar(x) - as_scalar(y))


def lambda_from_horocycles(h1: Horocycle, h2: Horocycle):
    """Lambda length ``exp(delta / 2)`` of the geodesic joining the two base points."""
    if h2.at_infinity:
        h1, h2 = h2, h1
    if h2.at_infinity:
        raise ValueError("horocycles share a base point")
    exact = is_exact(h1.size) and is_exact(h2.size)
    if h1.at_infinity:
        ratio = Fraction(h1.size) / Fraction(h2.size) if exact else h1.size / h2.size
        return exact_sqrt(ratio) if exact else math.sqrt(ratio)
    gap = _diff(h1.base, h2.base)
    if gap == 0:
        raise ValueError("horocycles share a base point")
    if exact and is_exact(gap):
        root = exact_sqrt(Fraction(h1.size) * Fraction(h2.size))
        if isinstance(root, Fraction):
            return Fraction(gap) / root
        return float(gap) / root
    return float(gap) / math.sqrt(h1.size * h2.size)


def _check_positive(*xs):
    for x in xs:
        if not x > 0:
            raise ValueError("lambda lengths must be positive")


def arc_length_in_triangle(lam_opp, lam_left, lam_right):
    """Horocyclic arc at vertex ``a`` of triangle ``abc`` from its three lambda lengths."""
    _check_positive(lam_opp, lam_left, lam_right)
    if all(is_exact(t) for t in (lam_opp, lam_left, lam_right)):
        return Fraction(lam_opp) / (Fraction(lam_left) * Fraction(lam_right))
    return lam_opp / (lam_left * lam_right)


def ptolemy(lam_ab, lam_bc, lam_cd, lam_da, lam_ac):
    """New diagonal ``lambda_bd`` after flipping ``ac`` in quadrilateral ``abcd``."""
    _check_positive(lam_ab, lam_bc, lam_cd, lam_da, lam_ac)
    vals = (lam_ab, lam_bc, lam_cd, lam_da, lam_ac)
    if all(is_exact(t) for t in vals):
        lam_ab, lam_bc, lam_cd, lam_da, lam_ac = map(Fraction, vals)
    return (lam_ab * lam_cd + lam_bc * lam_da) / lam_ac


def horocycle_arc(h: Horocycle, u, v):
    """Hyperbolic length of the arc of ``h`` between the geodesics ``(h.base, u)`` and ``(h.base, v)``."""
    if h.at_infinity:
        return _diff(u, v) / h.size
    X = as_scalar(h.base)
    # z -> -1/(z - X) sends the horocycle to the line Im = 1/size
    iu = 0 if _is_inf(u) else 1 / (as_scalar(u) - X)
    iv = 0 if _is_inf(v) else 1 / (as_scalar(v) - X)
    return abs(iu - iv) * h.size


def size_for_unit_arc(base, u, v):
    """Horocycle size at ``base`` whose arc between ``(base, u)`` and ``(base, v)`` has length 1."""
    return 1 / horocycle_arc(Horocycle(base, 1), u, v)


def _penetration_ratio(e, h: Horocycle):
    """Ratio (top of the edge) / (horocycle height) after sending ``h.base`` to infinity."""
    u, v = _endpoints(e)
    if h.at_infinity:
        if _is_inf(u) or _is_inf(v):
            raise ValueError("edge ends at the horocycle's base point: infinite penetration")
        return _diff(u, v) / 2 / h.size
    X = as_scalar(h.base)
    if any(not _is_inf(t) and as_scalar(t) == X for t in (u, v)):
        raise ValueError("edge ends at the horocycle's base point: infinite penetration")
    iu = 0 if _is_inf(u) else 1 / (as_scalar(u) - X)
    iv = 0 if _is_inf(v) else 1 / (as_scalar(v) - X)
    return abs(iu - iv) / 2 * h.size


def _endpoints(e):
    if isinstance(e, GeodesicEdge):
        return e.lo, e.hi
    u, v = e
    return u, v


def geodesic_length_in_horoball(e, h: Horocycle) -> float:
    """Hyperbolic length of ``e`` inside the open horoball bounded by ``h``."""
    r = _penetration_ratio(e, h)
    if r <= 1:
        return 0.0
    return 2.0 * math.acosh(r)


def penetration_depth(e, h: Horocycle) -> float:
    """How far ``e`` reaches past ``h`` toward its base (0 when disjoint or tangent)."""
    r = _penetration_ratio(e, h)
    if r <= 1:
        return 0.0
    return math.log(r)
