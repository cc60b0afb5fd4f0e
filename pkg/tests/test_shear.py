import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fareyqs.example import example_shear, golden_value
from fareyqs.farey import (
    INF,
    ONE,
    ZERO,
    ExtRat,
    GeodesicEdge,
    Window,
    cyclically_increasing,
    fan_edges,
    fan_matrix,
    fan_vertex,
    farey_edges_in_window,
)
from fareyqs.geometry import Mobius, mobius_from_triples
from fareyqs.shear import (
    DegenerateDevelopmentError,
    FanScanParams,
    ShearFunction,
    ShearValue,
    VertexMap,
    check_ps_certificate,
    check_qs_certificate,
    develop,
    develop_sparse,
    fan_arc_lengths,
    fan_ratio,
    fan_shears,
    multiplier_from_vertex_map,
    quad_of_farey_edge,
    shear_from_vertex_map,
    support_edges,
)

LOG2 = math.log(2)


def random_sparse_shear(rng, w, count=6):
    edges = farey_edges_in_window(w)
    picks = rng.sample(edges, count)
    return ShearFunction.from_multipliers(
        {e: Fraction(rng.randint(1, 9), rng.randint(1, 9)) for e in picks})


def test_shear_function_lookup():
    e = GeodesicEdge(ZERO, INF)
    s = ShearFunction.from_multipliers({e: 3})
    assert s.multiplier(e) == 3 and s(e) == pytest.approx(math.log(3))
    assert s(GeodesicEdge(ONE, INF)) == 0
    assert s.is_exact
    assert not ShearFunction.from_logs({e: 0.5}).is_exact
    with pytest.raises(ValueError):
        ShearFunction({(ZERO, ExtRat(2)): 1})
    with pytest.raises(ValueError):
        s.shear(GeodesicEdge(ZERO, ExtRat(2)))
    with pytest.raises(ValueError):
        ShearValue.of_mult(0)


def test_example_shear_values():
    s = example_shear()
    assert s.multiplier(GeodesicEdge(ExtRat(16), INF)) == Fraction(1, 2)
    assert s.multiplier(GeodesicEdge(ExtRat(-256), INF)) == 2
    assert s.multiplier(GeodesicEdge(ExtRat(32), INF)) == 1
    assert s.multiplier(GeodesicEdge(ExtRat(1), INF)) == Fraction(1, 2)  # 16**0 counts
    assert s.multiplier(GeodesicEdge(ExtRat(16), ExtRat(17))) == 1


def test_fan_arc_lengths_examples():
    assert fan_arc_lengths(ShearFunction.zero(), INF, 0, (-3, 3)) == [1] * 7
    s = example_shear()
    arcs = fan_arc_lengths(s, INF, 0, (16, 20))
    assert arcs == [Fraction(1, 4)] * 5
    single = ShearFunction.from_multipliers({GeodesicEdge(ZERO, INF): 2})
    assert fan_arc_lengths(single, INF, 0, (-1, 1)) == [1, 2, 2]
    assert fan_arc_lengths(single, INF, 1, (-1, 1)) == [Fraction(1, 2), 1, 1]


def test_fan_ratio_examples():
    assert fan_ratio(ShearFunction.zero(), INF, 0, 5) == 1
    single = ShearFunction.from_multipliers({GeodesicEdge(ZERO, INF): 2})
    assert fan_ratio(single, INF, 0, 1) == 2
    # odd shear with equal sums on both sides of E_0
    assert fan_ratio(example_shear(), INF, 0, 16) == 1
    with pytest.raises(ValueError):
        fan_ratio(single, INF, 0, 0)


def test_fan_ratio_matches_widths_of_developed_fan_at_infinity():
    rng = random.Random(4)
    w = Window(30, 1)
    for _ in range(20):
        s = ShearFunction.from_multipliers(
            {(ExtRat(j), INF): Fraction(rng.randint(1, 5), rng.randint(1, 5)) for j in rng.sample(range(-20, 21), 8)})
        h = develop(s, w)
        for k in range(-8, 9):
            for n in (1, 3, 7):
                widths = (h[ExtRat(k + n)].to_fraction() - h[ExtRat(k)].to_fraction(),
                          h[ExtRat(k)].to_fraction() - h[ExtRat(k - n)].to_fraction())
                assert fan_ratio(s, INF, k, n) == widths[0] / widths[1]


@pytest.mark.parametrize("tip", [ExtRat(0), ExtRat(2), ExtRat(1, 2), ExtRat(-2, 3)])
def test_fan_ratio_matches_developed_fan_at_finite_tip(tip):
    # conjugating h(tip) to infinity turns horocyclic arcs into Euclidean widths
    rng = random.Random(hash(str(tip)) & 0xFFFF)
    a, b, c, d = fan_matrix(tip)
    n_max, k_span = 3, 3
    nbrs = [fan_vertex(tip, j) for j in range(-k_span - n_max, k_span + n_max + 1)]
    w = Window(max(abs(v.num) for v in nbrs if v.den) + 1, max(v.den for v in nbrs) + 1)
    entries = {GeodesicEdge(v, tip): Fraction(rng.randint(1, 4), rng.randint(1, 4)) for v in rng.sample(nbrs, 6)}
    s = ShearFunction.from_multipliers(entries)
    h = develop(s, w)
    ht = h[tip].to_fraction()

    def x(j):
        v = h[fan_vertex(tip, j)]
        return Fraction(0) if v.is_inf else 1 / (v.to_fraction() - ht)

    for k in range(-k_span, k_span + 1):
        for n in range(1, n_max + 1):
            ratio = (x(k + n) - x(k)) / (x(k) - x(k - n))
            assert fan_ratio(s, tip, k, n) == ratio


@given(st.integers(-30, 30), st.integers(1, 12), st.integers(1, 6))
@settings(max_examples=50)
def test_fan_ratio_ignores_anchor_index(k, n, shift):
    # the normalization alpha_{k-1} = 1 cancels in the ratio
    rng = random.Random(k * 100 + n)
    s = ShearFunction.from_multipliers(
        {(ExtRat(j), INF): Fraction(rng.randint(1, 4), rng.randint(1, 4)) for j in range(-45, 46)})
    arcs = fan_arc_lengths(s, INF, k - shift, (k - n, k + n - 1))
    assert sum(arcs[n:]) / sum(arcs[:n]) == fan_ratio(s, INF, k, n)


def test_fan_shears_follow_fan_order():
    s = ShearFunction.from_multipliers({GeodesicEdge(ExtRat(1, 2), ExtRat(1, 3)): 5})
    tip = ExtRat(1, 3)
    vals = fan_shears(s, tip, -4, 4)
    hits = [j for j, sv in zip(range(-4, 5), vals) if sv.mult == 5]
    assert len(hits) == 1 and fan_vertex(tip, hits[0]) == ExtRat(1, 2)


def test_check_qs_zero_and_linear():
    params = FanScanParams((INF, ZERO), (-10, 10), 8)
    rep = check_qs_certificate(ShearFunction.zero(), params, 1)
    assert rep.passed and rep.max_ratio == 1 and rep.min_ratio == 1
    assert rep.scanned == 2 * 21 * 8
    # growing shears log|j| make the arcs grow super-exponentially
    lin = ShearFunction.from_multipliers({(ExtRat(j), INF): abs(j) + 1 for j in range(-30, 31)})
    bad = check_qs_certificate(lin, FanScanParams((INF,), (-10, 10), 8), 100)
    assert not bad.passed
    with pytest.raises(ValueError):
        check_qs_certificate(lin, params, Fraction(1, 2))


def test_check_qs_exact_and_float_agree():
    rng = random.Random(9)
    s = ShearFunction.from_multipliers(
        {(ExtRat(j), INF): Fraction(rng.randint(1, 6), rng.randint(1, 6)) for j in range(-40, 41)})
    params = FanScanParams((INF,), (-15, 15), 20)
    ex = check_qs_certificate(s, params, 50, exact=True)
    fl = check_qs_certificate(s, params, 50, exact=False)
    assert isinstance(ex.max_ratio, Fraction)
    assert fl.max_ratio == pytest.approx(float(ex.max_ratio), rel=1e-12)
    assert fl.min_ratio == pytest.approx(float(ex.min_ratio), rel=1e-12)
    assert ex.max_witness == fl.max_witness and ex.passed == fl.passed
    brute = max(fan_ratio(s, INF, k, n) for k in range(-15, 16) for n in range(1, 21))
    assert brute == ex.max_ratio


def test_check_ps_examples():
    params = FanScanParams((INF,), (-100, 100), 1)
    assert check_ps_certificate(ShearFunction.zero(), params).sup_abs_partial_sum == 0
    single = ShearFunction.from_logs({GeodesicEdge(ZERO, INF): 5.0})
    rep = check_ps_certificate(single, params)
    assert rep.sup_abs_partial_sum == 5.0
    _, n, m = rep.witness
    assert n <= 0 <= m  # zero shears may pad the witness
    ex = check_ps_certificate(example_shear(), FanScanParams((INF,), (-16**3, 16**3), 1))
    # 1, 16, 256, 4096 on each side
    assert ex.sup_multiplier == 16
    assert ex.sup_abs_partial_sum == pytest.approx(4 * LOG2, abs=1e-12)
    assert ex.passes(4 * LOG2 + 1e-9) and not ex.passes(2.0)


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=25), st.integers(-5, 5))
def test_check_ps_matches_brute_force(exps, start):
    entries = {(ExtRat(start + i), INF): Fraction(2) ** e for i, e in enumerate(exps)}
    s = ShearFunction.from_multipliers(entries)
    lo, hi = start - 2, start + len(exps) + 1
    rep = check_ps_certificate(s, FanScanParams((INF,), (lo, hi), 1))
    logs = [math.log(s.multiplier(GeodesicEdge(ExtRat(j), INF))) for j in range(lo, hi + 1)]
    brute = max(abs(sum(logs[a:b + 1])) for a in range(len(logs)) for b in range(a, len(logs)))
    assert rep.sup_abs_partial_sum == pytest.approx(brute, abs=1e-12)
    pow2 = max(abs(sum(exps[a:b + 1])) for a in range(len(exps)) for b in range(a, len(exps)))
    assert rep.sup_multiplier == 2 ** pow2
    if rep.witness is not None:
        _, n, m = rep.witness
        assert abs(sum(logs[n - lo:m - lo + 1])) == pytest.approx(brute, abs=1e-12)


def test_develop_zero_is_identity():
    w = Window(6, 5)
    h = develop(ShearFunction.zero(), w)
    assert h.exact and len(h) == len(w.vertices())
    assert all(h[v] == v for v in w.vertices())


def test_develop_golden_values():
    h = develop(example_shear(), Window(16**3, 1))
    for k in (1, 2, 3):
        assert h[ExtRat(16**k)].to_fraction() == golden_value(k)
        assert h[ExtRat(-16**k)].to_fraction() == -golden_value(k)
    assert h[ExtRat(16)] == ExtRat(119, 14)
    assert h[ExtRat(256)] == ExtRat(959, 14)
    assert all(h[ExtRat(j)] == ExtRat(j) for j in (-1, 0, 1))


def test_develop_processing_order_is_irrelevant():
    rng = random.Random(1)
    w = Window(8, 6)
    s = random_sparse_shear(rng, w, 10)
    ref = develop(s, w).to_json()
    for seed in range(5):
        assert develop(s, w, rng=random.Random(seed)).to_json() == ref


def test_develop_normalizations_agree_for_example():
    w = Window(300, 3)
    a = develop(example_shear(), w)
    b = develop(example_shear(), w, normalization=(ExtRat(-1), ZERO, INF))
    assert a.to_json() == b.to_json()


def test_develop_normalization_is_fixed():
    rng = random.Random(2)
    w = Window(5, 5)
    s = random_sparse_shear(rng, w, 8)
    tri = (ExtRat(1, 2), ExtRat(2, 3), ONE)
    h = develop(s, w, normalization=tri)
    assert all(h[v] == v for v in tri)
    # two normalizations differ by the Mobius map fixing the images of the second triangle
    g = develop(s, w)
    src = [g[v] for v in tri]
    m = mobius_from_triples(src, list(tri))
    assert all(m(g[v]) == h[v] for v in w.vertices())


def test_develop_rejects_bad_input():
    w = Window(4, 4)
    with pytest.raises(ValueError):
        develop(ShearFunction.zero(), w, normalization=(ZERO, ExtRat(2), INF))
    with pytest.raises(ValueError):
        develop(ShearFunction.zero(), w, normalization=(ExtRat(9), ExtRat(10), INF))
    with pytest.raises(ValueError):
        develop(ShearFunction.from_logs({GeodesicEdge(ZERO, INF): 0.3}), w, exact=True)


def test_develop_float_degenerate():
    big = ShearFunction.from_logs({e: 800.0 for e in fan_edges(INF, 1, 3)})
    with pytest.raises(DegenerateDevelopmentError):
        develop(big, Window(8, 1), exact=False)
    tiny = ShearFunction.from_logs({e: -40.0 for e in fan_edges(INF, 1, 3)})
    with pytest.raises(DegenerateDevelopmentError):
        develop(tiny, Window(8, 1), exact=False)


def test_develop_float_matches_exact():
    rng = random.Random(5)
    w = Window(6, 6)
    s = random_sparse_shear(rng, w, 10)
    ex = develop(s, w)
    fl = develop(s, w, exact=False)
    for v in w.vertices():
        a, b = ex[v], fl[v]
        if a.is_inf:
            assert b == math.inf
        else:
            assert b == pytest.approx(float(a), rel=1e-12, abs=1e-12)


def test_vertex_map_order_check():
    dom = [ZERO, ONE, ExtRat(2), INF]
    good = VertexMap.from_mapping({v: w for v, w in zip(dom, [ExtRat(5), ExtRat(7), INF, ExtRat(-1)])})
    assert good.is_order_preserving()  # a rotation of the circle
    bad = VertexMap.from_mapping({v: w for v, w in zip(dom, [ZERO, ExtRat(2), ONE, INF])})
    assert not bad.is_order_preserving()
    assert VertexMap.from_mapping({ZERO: 0.25, ONE: 0.5, INF: 1.0}).is_order_preserving()
    assert not VertexMap.from_mapping({ZERO: 0.5, ONE: 0.25, INF: 1.0}).is_order_preserving()


def test_vertex_map_compose_and_inverse():
    w = Window(5, 4)
    rng = random.Random(8)
    h = develop(random_sparse_shear(rng, w), w)
    inv = h.inverse()
    back = inv.compose(h)
    assert all(back[v] == v for v in w.vertices())


def test_shear_from_vertex_map_of_mobius_images():
    w = Window(4, 4)
    ident = VertexMap.from_function(lambda v: v, w.vertices(), w)
    doubled = VertexMap.from_function(lambda v: Mobius(2, 0, 0, 1)(v), w.vertices(), w)
    for e in (GeodesicEdge(ZERO, ONE), GeodesicEdge(ONE, ExtRat(3, 2)), GeodesicEdge(ZERO, INF)):
        assert multiplier_from_vertex_map(ident, e) == 1
        assert multiplier_from_vertex_map(doubled, e) == 1
        assert shear_from_vertex_map(doubled, e) == 0
    with pytest.raises(KeyError):
        multiplier_from_vertex_map(ident, GeodesicEdge(ExtRat(4), INF))


def test_quad_of_farey_edge_orientation():
    for e in (GeodesicEdge(ZERO, INF), GeodesicEdge(ONE, ExtRat(1, 2)), GeodesicEdge(ExtRat(-3), ExtRat(-2))):
        x, y, z, w = quad_of_farey_edge(e)
        assert cyclically_increasing(x, y, z)
        assert {x, y} == set(e.endpoints)


def test_round_trip_on_example():
    w = Window(16**2 + 2, 2)
    h = develop(example_shear(), w)
    for e in farey_edges_in_window(w):
        if all(v in h for v in quad_of_farey_edge(e)):
            assert multiplier_from_vertex_map(h, e) == example_shear().multiplier(e)


@given(st.integers(0, 10**6))
@settings(max_examples=25, deadline=None)
def test_round_trip_random_sparse(seed):
    rng = random.Random(seed)
    w = Window(5, 5)
    s = random_sparse_shear(rng, w, rng.randint(1, 12))
    h = develop(s, w)
    assert h.is_order_preserving()
    for e in farey_edges_in_window(w):
        if all(v in h for v in quad_of_farey_edge(e)):
            assert multiplier_from_vertex_map(h, e) == s.multiplier(e)


@given(st.integers(0, 10**6))
@settings(max_examples=25, deadline=None)
def test_finitely_supported_shear_fixes_unseparated_vertices(seed):
    rng = random.Random(seed)
    w = Window(6, 4)
    s = random_sparse_shear(rng, w, rng.randint(1, 4))
    h = develop(s, w)
    support = list(s.entries)
    base = (ZERO, ONE, INF)

    def separated(v):
        # v lies strictly on the far side of a support edge, away from the base triangle
        for e in support:
            a, b = e.lo, e.hi
            side_v = cyclically_increasing(a, v, b) if v not in (a, b) else None
            if side_v is None:
                continue
            sides = {cyclically_increasing(a, t, b) for t in base if t not in (a, b)}
            if side_v not in sides:
                return True
        return False

    for v in w.vertices():
        if not separated(v):
            assert h[v] == v


def test_vertex_map_json():
    # quad (inf, 0, 1, w) is normalized by z -> -1/z, so w = -1 moves to -1/2
    h = develop(ShearFunction.from_multipliers({GeodesicEdge(ZERO, INF): 2}), Window(2, 1))
    assert h.to_json() == [["-2/1", "-1/1"], ["-1/1", "-1/2"], ["0/1", "0/1"],
                           ["1/1", "1/1"], ["2/1", "2/1"], ["1/0", "1/0"]]


@given(st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_sparse_development_matches_bfs(seed):
    rng = random.Random(seed)
    w = Window(7, 5)
    base = {GeodesicEdge(ZERO, ONE), GeodesicEdge(ONE, INF), GeodesicEdge(ZERO, INF)}
    edges = [e for e in farey_edges_in_window(w) if e not in base]
    s = ShearFunction.from_multipliers(
        {e: Fraction(rng.randint(1, 9), rng.randint(1, 9)) for e in rng.sample(edges, rng.randint(1, 8))})
    h = develop(s, w)
    g = develop_sparse(s, w.vertices(), w)
    assert g.to_json() == h.to_json()


def test_sparse_development_of_example():
    w = Window(16**6, 1)
    pts = [ExtRat(sign * 16**k) for k in range(1, 7) for sign in (1, -1)]
    g = develop_sparse(example_shear(), pts + [ExtRat(-1), ZERO, ONE], w)
    for k in range(1, 7):
        assert g[ExtRat(16**k)].to_fraction() == golden_value(k)
        assert g[ExtRat(-(16**k))].to_fraction() == -golden_value(k)
    assert all(g[v] == v for v in (ExtRat(-1), ZERO, ONE))
    small = Window(16**2 + 5, 2)
    assert develop_sparse(example_shear(), small.vertices(), small).to_json() == \
        develop(example_shear(), small).to_json()


def test_support_edges_and_sparse_errors():
    w = Window(300, 1)
    sup = support_edges(example_shear(), w)
    assert sup == sorted(GeodesicEdge(ExtRat(x), INF) for x in (-256, -16, -1, 1, 16, 256))
    with pytest.raises(ValueError):
        support_edges(ShearFunction.from_logs({}, default=ShearValue.of_log(0.5)), w)
    bare = ShearFunction(rule=lambda u, v: ShearValue.of_mult(1))
    with pytest.raises(ValueError):
        support_edges(bare, w)
    with pytest.raises(ValueError):
        develop_sparse(ShearFunction.from_logs({GeodesicEdge(ExtRat(2), INF): 0.5}), [ExtRat(3)], Window(4, 1))
    with pytest.raises(ValueError):
        develop_sparse(ShearFunction.zero(), [ExtRat(9)], Window(3, 1))
    with pytest.raises(ValueError):
        develop_sparse(ShearFunction.zero(), [ONE], Window(3, 1), normalization=(ZERO, ExtRat(2), INF))
