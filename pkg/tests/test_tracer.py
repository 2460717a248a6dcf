import cmath
import math

import pytest

from stokesgeo import (ComplexPolynomial, EscapedToRay, HitTurningPoint,
                       build_stokes_graph, classify_complexes,
                       emanating_directions, parse_poly_text, re_xi_drift,
                       stokes_sectors, trace_stokes_line, turning_points)


def _angdiff(a, b):
    d = math.fmod(a - b, 2 * math.pi)
    if d > math.pi:
        d -= 2 * math.pi
    if d < -math.pi:
        d += 2 * math.pi
    return abs(d)


def test_emanating_directions_simple_root(osc):
    dirs = emanating_directions(osc, 1.0, 1)
    assert dirs == pytest.approx([math.pi / 3, math.pi, 5 * math.pi / 3])


def test_emanating_directions_airy():
    p = parse_poly_text("1,0")
    assert emanating_directions(p, 0.0, 1) == pytest.approx(
        [math.pi / 3, math.pi, 5 * math.pi / 3])


def test_emanating_directions_double_root():
    p = parse_poly_text("1,0,0")
    assert emanating_directions(p, 0.0, 2) == pytest.approx(
        [math.pi / 4, 3 * math.pi / 4, 5 * math.pi / 4, 7 * math.pi / 4])


def test_emanating_directions_kill_re_xi(osc):
    # along each direction Re xi vanishes to second order: launching there
    # and transporting xi must give a tiny real part
    drift, arc = re_xi_drift(osc, [1.0, 1.0 + 3e-3 * cmath.exp(1j * math.pi / 3)])
    assert drift < 1e-6


def test_trace_finite_edge(osc):
    pl, fate = trace_stokes_line(osc, 1, math.pi)
    assert isinstance(fate, HitTurningPoint) and fate.target == 0
    assert max(abs(z.imag) for z in pl) < 1e-6
    assert all(-1.0 - 1e-9 <= z.real <= 1.0 + 1e-9 for z in pl)


def test_trace_escape_lands_on_ray(osc):
    pl, fate = trace_stokes_line(osc, 1, math.pi / 3)
    assert isinstance(fate, EscapedToRay)
    sectors = stokes_sectors(osc)
    ray = sectors.ray_angles[fate.ray]
    # even degree carries a log(r)/r^2 angular tail at the escape radius
    r = abs(fate.exit_point)
    assert _angdiff(cmath.phase(fate.exit_point), ray) < 2.0 * math.log(r) / r ** 2


def test_airy_three_escapes():
    p = parse_poly_text("1,0")
    sectors = stokes_sectors(p)
    rays_hit = []
    for theta in emanating_directions(p, 0.0, 1):
        pl, fate = trace_stokes_line(p, 0, theta)
        assert isinstance(fate, EscapedToRay)
        rays_hit.append(fate.ray)
        assert _angdiff(cmath.phase(fate.exit_point),
                        sectors.ray_angles[fate.ray]) < 1e-3
    assert sorted(rays_hit) == [0, 1, 2]


def test_graph_oscillator(osc):
    g = build_stokes_graph(osc)
    kinds = sorted(e.kind for e in g.edges)
    assert kinds == ["escape"] * 4 + ["finite"]
    assert len(g.complexes) == 1 and g.complexes[0] == frozenset({0, 1})
    flags = classify_complexes(g)
    assert flags == [(frozenset({0, 1}), False)]


def test_graph_airy():
    g = build_stokes_graph(parse_poly_text("1,0"))
    assert [e.kind for e in g.edges] == ["escape"] * 3
    assert classify_complexes(g) == [(frozenset({0}), True)]


def test_graph_rotated_oscillator(osc):
    g = build_stokes_graph(osc.rotate(0.3))
    assert all(e.kind == "escape" for e in g.edges)
    assert len(g.complexes) == 2
    assert all(simple for _, simple in classify_complexes(g))


def test_graph_cubic_unity_counts(cubic_unity):
    g = build_stokes_graph(cubic_unity)
    n_finite = sum(1 for e in g.edges if e.kind == "finite")
    n_escape = sum(1 for e in g.edges if e.kind == "escape")
    # every root emits 3 half-lines; merged finite edges absorb two each
    assert 2 * n_finite + n_escape == 9
    covered = set()
    for comp in g.complexes:
        covered |= comp
    assert covered == {0, 1, 2}
    assert not g.incomplete


def test_drift_invariant_on_graph_edges(osc, cubic_unity):
    for poly in (osc, cubic_unity, osc.rotate(0.3)):
        g = build_stokes_graph(poly)
        for e in g.edges:
            drift, arc = re_xi_drift(poly, e.polyline)
            assert drift <= 1e-6 * (1.0 + arc)


def test_fate_stability_under_tiny_rotation(osc):
    base = build_stokes_graph(osc.rotate(0.3))
    pert = build_stokes_graph(osc.rotate(0.3 + 1e-7))
    sig_a = sorted((e.origin, e.kind, e.ray) for e in base.edges)
    sig_b = sorted((e.origin, e.kind, e.ray) for e in pert.edges)
    assert sig_a == sig_b


def test_edge_count_rule():
    # quartic with well-separated roots: total emitted half-lines is
    # sum over roots of (multiplicity + 2)
    p = ComplexPolynomial.from_roots(1.0, [-1.5, 0.5j, 1.5, -0.5j])
    g = build_stokes_graph(p.rotate(0.2))
    n_finite = sum(1 for e in g.edges if e.kind == "finite")
    n_escape = sum(1 for e in g.edges if e.kind == "escape")
    assert 2 * n_finite + n_escape == sum(
        m + 2 for _, m in turning_points(p).points)
