import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fareyqs.decoration import (
    Decoration,
    LambdaAssignment,
    canonical_decoration,
    decoration_arcs,
    decoration_for_vertex_map,
    decoration_from_shears,
    fan_arc_runs,
    is_pinched,
    lambda_arcs,
    lambda_lengths,
    pinched_forces_qs,
    run_ratios,
)
from fareyqs.farey import INF, ONE, ZERO, ExtRat, GeodesicEdge, Window, fan_index, fan_vertex, farey_edges_in_window
from fareyqs.geometry import Horocycle, horocycle_arc
from fareyqs.shear import FanScanParams, ShearFunction, check_ps_certificate, check_qs_certificate, develop
from fareyqs.triangulation import WindowTriangulation


def random_sparse_shear(rng, w, count):
    picks = rng.sample(farey_edges_in_window(w), count)
    return ShearFunction.from_multipliers({e: Fraction(rng.randint(1, 6), rng.randint(1, 6)) for e in picks})


def test_decoration_container():
    d = Decoration.from_sizes({ZERO: 1, INF: 2})
    assert d[ExtRat(0)].size == 1 and d[float("inf")].size == 2
    assert ONE not in d and len(d) == 2
    with pytest.raises(KeyError, match="no horocycle"):
        d[ONE]
    assert d.rescaled({ZERO: 3})[ZERO].size == 3
    assert d.to_json() == [{"vertex": "0/1", "size": "1"}, {"vertex": "1/0", "size": "2"}]


def test_canonical_decoration_gives_unit_lambdas_and_arcs():
    w = Window(5, 5)
    T = WindowTriangulation.farey(w)
    dec = canonical_decoration(w)
    lams = lambda_lengths(T, dec)
    assert set(lams.values()) == {1}
    assert set(decoration_arcs(T, dec).values()) == {1}
    assert set(lambda_arcs(T, lams).values()) == {1}


def test_height_at_infinity_scales_lambda():
    w = Window(3, 1)
    T = WindowTriangulation.farey(w)
    dec = canonical_decoration(w).rescaled({INF: 4})
    lams = lambda_lengths(T, dec)
    for j in range(-3, 4):
        assert lams[GeodesicEdge(ExtRat(j), INF)] == 2
    assert lams[GeodesicEdge(ZERO, ONE)] == 1


def test_lambda_assignment_rejects_nonpositive():
    lams = LambdaAssignment()
    with pytest.raises(ValueError):
        lams[GeodesicEdge(ZERO, INF)] = 0
    lams[GeodesicEdge(ZERO, INF)] = Fraction(1, 2)
    assert lams.to_json() == [{"edge": "0/1-1/0", "lambda": "1/2"}]


def test_is_pinched_examples():
    e1, e2 = GeodesicEdge(ZERO, INF), GeodesicEdge(ONE, INF)
    rep = is_pinched({e1: Fraction(1, 2), e2: 2}, 2)
    assert rep.passed and rep.witnesses == {"min": e1, "max": e2}
    assert not is_pinched({e1: Fraction(1, 3), e2: 2}, 2).passed
    assert not is_pinched({e1: 1, e2: Fraction(201, 100)}, 2).passed
    with pytest.raises(ValueError):
        is_pinched({e1: 1}, 1)
    with pytest.raises(ValueError):
        is_pinched({}, 2)


def test_decoration_from_zero_shear_is_canonical():
    w = Window(4, 4)
    dec = decoration_from_shears(ShearFunction.zero(), w)
    can = canonical_decoration(w)
    assert dec.to_json() == can.to_json()


def test_anchor_sector_has_unit_arc():
    rng = random.Random(3)
    w = Window(4, 3)
    h = develop(random_sparse_shear(rng, w, 8), w)
    dec = decoration_for_vertex_map(h)
    for p in w.vertices():
        u, v = fan_vertex(p, 0), fan_vertex(p, 1)
        assert horocycle_arc(dec[h[p]], h[u], h[v]) == 1


def test_lambda_arcs_match_measured_arcs():
    rng = random.Random(6)
    w = Window(4, 4)
    T = WindowTriangulation.farey(w)
    for _ in range(10):
        dec = Decoration(Horocycle(v, Fraction(rng.randint(1, 9), rng.randint(1, 9)) ** 2)
                         for v in w.vertices())
        lams = lambda_lengths(T, dec)
        direct = decoration_arcs(T, dec)
        via = lambda_arcs(T, lams)
        assert direct.keys() == via.keys()
        for k in direct:
            assert direct[k] == via[k]


def test_fan_ratios_are_invariant_under_rescaling():
    # rescaling a horocycle scales all its arcs by one factor
    rng = random.Random(2)
    w = Window(4, 3)
    T = WindowTriangulation.farey(w)
    dec = canonical_decoration(w)
    dec2 = dec.rescaled({v: Fraction(rng.randint(1, 9), rng.randint(1, 9)) for v in w.vertices()})
    r1 = fan_arc_runs(T, decoration_arcs(T, dec2))
    for p, runs in fan_arc_runs(T, decoration_arcs(T, dec)).items():
        for a, b in zip(runs, r1[p]):
            assert run_ratios(a) == run_ratios(b)


def test_fan_arc_runs_at_infinity():
    w = Window(3, 1)
    T = WindowTriangulation.farey(w)
    runs = fan_arc_runs(T, decoration_arcs(T, canonical_decoration(w)))
    assert runs[INF] == [[1] * 6]
    assert run_ratios([1, 2, 4]) == (2, 2)
    assert run_ratios([1]) == (None, None)


def test_pinched_forces_qs_uniform():
    w = Window(3, 3)
    T = WindowTriangulation.farey(w)
    lams = {e: 2 for e in T.sorted_edges()}
    rep = pinched_forces_qs(T, lams, 2)
    assert rep.passed
    assert rep.arc_min == rep.arc_max == Fraction(1, 2)
    assert rep.ratio_min == rep.ratio_max == 1


def _window_fan_span(w):
    span = 0
    for e in farey_edges_in_window(w):
        for p, q in ((e.lo, e.hi), (e.hi, e.lo)):
            span = max(span, abs(fan_index(p, q)))
    return span


@given(st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_bounded_partial_sums_bound_arcs_and_ratios(seed):
    rng = random.Random(seed)
    w = Window(3, 3)
    s = random_sparse_shear(rng, w, rng.randint(1, 6))
    R = _window_fan_span(w) + 2
    ps = check_ps_certificate(s, FanScanParams(w.vertices(), (-R, R), 1))
    mult = ps.sup_multiplier  # exact exp of the partial-sum bound
    h = develop(s, w)
    dec = decoration_for_vertex_map(h)
    T = WindowTriangulation.image_of(h)
    for a in decoration_arcs(T, dec).values():
        assert 1 / mult <= a <= mult
    qs = check_qs_certificate(s, FanScanParams(w.vertices(), (-R + 2, R - 2), 2), mult**2)
    assert qs.passed


@given(st.integers(0, 10**6), st.sampled_from([2, 5, 10]))
@settings(max_examples=30, deadline=None)
def test_pinched_lambdas_force_bounded_ratios(seed, M):
    rng = random.Random(seed)
    w = Window(3, 2)
    T = WindowTriangulation.farey(w)
    lams = {e: Fraction(rng.randint(1, M * 8), 8) for e in T.sorted_edges()}
    lams = {e: max(v, Fraction(1, M)) for e, v in lams.items()}
    assert is_pinched(lams, M).passed
    assert pinched_forces_qs(T, lams, M).passed
