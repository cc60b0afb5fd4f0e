"""The quasisymmetric example with shears ``+-log 2`` at ``-+16**j`` on the fan at infinity.

Its developing map is piecewise linear: the identity on ``[-1, 1]``, slope
``2**-(k+1)`` on ``[16**k, 16**(k+1)]`` and odd.  No decoration of its image
triangulation has pinched lambda lengths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .farey import ExtRat, GeodesicEdge, det
from .geometry import is_exact
from .shear import ShearFunction, ShearValue

LOG2 = math.log(2)
_DOWN = ShearValue(-LOG2, Fraction(1, 2))
_UP = ShearValue(LOG2, 2)


def _power_of_16(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0 and (n.bit_length() - 1) % 4 == 0


def _rule(u, v):
    # only the fan at infinity carries shear
    if u[1] == 0:
        j, q = v
    elif v[1] == 0:
        j, q = u
    else:
        return None
    if q != 1:
        return None
    if j > 0 and _power_of_16(j):
        return _DOWN
    if j < 0 and _power_of_16(-j):
        return _UP
    return None


def _support(w):
    inf = ExtRat(1, 0)
    j = 1
    while j <= w.max_num:
        yield GeodesicEdge(ExtRat(j), inf)
        yield GeodesicEdge(ExtRat(-j), inf)
        j *= 16


def example_shear() -> ShearFunction:
    return ShearFunction(rule=_rule, name="paper-example", support=_support)


def example_shear_rule(e: GeodesicEdge) -> ShearValue:
    """Shear of the example on a Farey edge (log value and exact multiplier)."""
    if abs(det(e.lo, e.hi)) != 1:
        raise ValueError(f"{e} is not a Farey edge")
    val = _rule((e.lo.num, e.lo.den), (e.hi.num, e.hi.den))
    return ShearValue(0.0, 1) if val is None else val


def golden_value(k: int) -> Fraction:
    """``h(16**k) = (15 * 8**k - 1) / 14``."""
    return Fraction(15 * 8**k - 1, 14)


def _h_exact_pos(p: int, q: int) -> tuple[int, int]:
    # x = p/q >= 1; find 16**k <= x < 16**(k+1)
    k = 0
    pk = 1
    while p >= 16 * pk * q:
        pk *= 16
        k += 1
    # h = (15*8**k - 1)/14 + (x - 16**k) / 2**(k+1)
    two = 1 << (k + 1)
    num = (15 * 8**k - 1) * q * two + 14 * (p - pk * q)
    den = 14 * q * two
    g = math.gcd(num, den)
    return num // g, den // g


def example_h(x):
    """Closed-form developing map of the example; exact on rational input."""
    if isinstance(x, ExtRat):
        if x.den == 0:
            return x
        p, q = x.num, x.den
        if -q <= p <= q:
            return x
        if p > 0:
            return ExtRat._raw(*_h_exact_pos(p, q))
        n, d = _h_exact_pos(-p, q)
        return ExtRat._raw(-n, d)
    if is_exact(x):
        r = example_h(ExtRat.coerce(Fraction(x)))
        return Fraction(r.num, r.den)
    x = float(x)
    if math.isinf(x) or -1 <= x <= 1:
        return x
    sign = 1.0 if x > 0 else -1.0
    ax = abs(x)
    k = 0
    while ax >= 16.0 ** (k + 1):
        k += 1
    return sign * ((15 * 8.0**k - 1) / 14 + (ax - 16.0**k) / 2.0 ** (k + 1))


# --- quasisymmetry quotient scan -------------------------------------------

CASE_BOUNDS = {
    "case1": (Fraction(7, 2 * 8**2), Fraction(8**2)),
    "case3_near": (Fraction(1, 4), Fraction(4)),
    "case3_far": (Fraction(1, 8**3), Fraction(8**3)),
    "case2": (Fraction(1, 8**3), Fraction(8**3)),
    "local": (Fraction(1, 8**3), Fraction(8**3)),
}
GLOBAL_BOUND = (Fraction(1, 8**3), Fraction(8**3))


def _floor_log16(x) -> int:
    k = 0
    while x >= 16 ** (k + 1):
        k += 1
    return k


def classify(x, t) -> str:
    """Which case of the hand estimate a sample ``(x, t)`` falls under (for ``x >= 0``)."""
    if x < 1:
        return "case2"
    kk = _floor_log16(x + t)  # 16**kk <= x + t < 16**(kk+1)
    ll = _floor_log16(x) + 1  # 16**(ll-1) <= x < 16**ll
    if ll <= kk - 1:
        return "case1"
    if ll == kk:
        return "case3_near" if x - t >= Fraction(16) ** (kk - 2) else "case3_far"
    return "local"


def symmetric_quotient(x, t):
    """``(h(x+t) - h(x)) / (h(x) - h(x-t))`` for the example map."""
    x, t = Fraction(x), Fraction(t)
    hx = example_h(x)
    return (example_h(x + t) - hx) / (hx - example_h(x - t))


@dataclass
class QuotientScan:
    min_ratio: Fraction
    max_ratio: Fraction
    min_sample: tuple
    max_sample: tuple
    per_case: dict = field(default_factory=dict)  # case -> [min, max, count]
    violations: list = field(default_factory=list)  # (case, x, t, ratio) outside the case bound
    bound: tuple = GLOBAL_BOUND

    @property
    def passed(self) -> bool:
        lo, hi = self.bound
        return lo <= self.min_ratio and self.max_ratio <= hi

    def to_json(self) -> dict:
        return {
            "min_ratio": str(self.min_ratio), "max_ratio": str(self.max_ratio),
            "min_sample": [str(v) for v in self.min_sample],
            "max_sample": [str(v) for v in self.max_sample],
            "per_case": {k: [str(v[0]), str(v[1]), v[2]] for k, v in sorted(self.per_case.items())},
            "case_violations": [[c, str(x), str(t), str(r)] for c, x, t, r in self.violations],
            "bound": [str(b) for b in self.bound], "pass": self.passed,
        }


def qs_ratio_scan(samples) -> QuotientScan:
    """Evaluate the symmetric quotient on ``(x, t)`` samples (``t > 0``), exactly.

    Negative ``x`` is folded onto ``-x`` by oddness (the quotient inverts).
    Each sample is checked against its case bound and the global ``8**3``.
    """
    lo = hi = None
    lo_s = hi_s = None
    per_case: dict = {}
    violations = []
    for x, t in samples:
        x, t = Fraction(x), Fraction(t)
        if t <= 0:
            raise ValueError("t must be positive")
        r = symmetric_quotient(x, t)
        folded = r if x >= 0 else 1 / r
        case = classify(abs(x), t)
        c_lo, c_hi = CASE_BOUNDS[case]
        if not (c_lo <= folded <= c_hi):
            violations.append((case, x, t, folded))
        entry = per_case.setdefault(case, [folded, folded, 0])
        entry[0] = min(entry[0], folded)
        entry[1] = max(entry[1], folded)
        entry[2] += 1
        if lo is None or r < lo:
            lo, lo_s = r, (x, t)
        if hi is None or r > hi:
            hi, hi_s = r, (x, t)
    return QuotientScan(lo, hi, lo_s, hi_s, per_case, violations)


def default_scan_grid(x_max: int = 16**5, x_steps: int = 400, t_steps: int = 60):
    """Log-spaced rational ``x`` in ``[1, x_max]`` crossed with log-spaced ``t``."""
    xs = set()
    for i in range(x_steps + 1):
        xs.add(Fraction(round(x_max ** (i / x_steps) * 64), 64))
    for k in range(0, _floor_log16(x_max) + 1):
        xs.update({Fraction(16**k), Fraction(16**k) + Fraction(1, 2), Fraction(16**k) - Fraction(1, 3)})
    ts = sorted({Fraction(round((2 * x_max) ** (j / t_steps) * 64), 64) for j in range(t_steps + 1)})
    for x in sorted(xs):
        for t in ts:
            yield x, t


# --- the falsifier for pinched decorations ---------------------------------


@dataclass
class NotPinchedReport:
    k: int
    M: object
    gap: Fraction
    forced_lambda_upper_bound: object
    pinched_possible: bool

    def to_json(self) -> dict:
        return {"k": self.k, "M": str(self.M), "gap": str(self.gap),
                "forced_lambda_upper_bound": str(self.forced_lambda_upper_bound),
                "pinched_possible": self.pinched_possible}


def not_pinched_falsifier(k: int, M) -> NotPinchedReport:
    """Best lambda length achievable on the short edge ``(h(16**k), h(16**k + 1))``.

    With the horocycle at infinity at height 1, keeping both vertical edges
    pinched forces the diameters into ``[M**-2, M**2]``; the lambda length
    ``gap / sqrt(d1 d2)`` is then at most ``gap * M**2``.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if not M > 1:
        raise ValueError("M must exceed 1")
    a = example_h(ExtRat(16**k))
    b = example_h(ExtRat(16**k + 1))
    gap = b.to_fraction() - a.to_fraction()
    bound = gap * (Fraction(M) if is_exact(M) else M) ** 2
    return NotPinchedReport(k, M, gap, bound, bound * M >= 1)


def first_unpinchable_k(M) -> int:
    """Smallest ``k`` at which the forced bound drops below ``1/M``."""
    k = 1
    while not_pinched_falsifier(k, M).pinched_possible:
        k += 1
    return k
