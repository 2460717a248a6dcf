import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from stokesgeo import (BranchError, ClearanceError, ComplexPolynomial,
                       alpha_contour_integrals, canonical_parameter_integral,
                       pairwise_periods, parse_poly_text, sqrt_continuation,
                       winding_number)
from stokesgeo.pathint import (build_stadium, min_clearance,
                               period_for_pair, re_xi_drift)


def circle(center, radius, n=129):
    return [center + radius * cmath.exp(2j * math.pi * k / (n - 1))
            for k in range(n)]


# --- branch continuation -------------------------------------------------------

def test_constant_potential():
    p = ComplexPolynomial((1 + 0j,))
    bp = sqrt_continuation(p, [0, 1, 1 + 1j], 1.0)
    assert all(w == 1 for _, w in bp.samples)
    assert bp.total_integral == pytest.approx(1 + 1j)


def test_square_potential_single_valued():
    p = parse_poly_text("1,0,0")
    bp = sqrt_continuation(p, circle(0, 1.0, 65), 1.0)
    assert abs(bp.samples[-1][1] - 1.0) < 1e-12


def test_sqrt_z_monodromy():
    p = parse_poly_text("1,0")
    bp = sqrt_continuation(p, circle(0, 1.0, 65), 1.0)
    assert abs(bp.samples[-1][1] + 1.0) < 1e-8


def test_seed_mismatch_rejected():
    p = parse_poly_text("1,0,0")
    with pytest.raises(BranchError):
        sqrt_continuation(p, [1.0, 2.0], 2.0)


def test_clearance_enforced():
    p = parse_poly_text("1,0,-1")
    with pytest.raises(ClearanceError):
        sqrt_continuation(p, [1.0 + 1e-9j, 1.5], cmath.sqrt(p.evaluate(1 + 1e-9j)))


def test_branch_continuity_invariant():
    p = parse_poly_text("1,0,0,-1")
    bp = sqrt_continuation(p, circle(0, 2.0, 200), cmath.sqrt(p.evaluate(2.0)))
    for (_, w1), (_, w2) in zip(bp.samples, bp.samples[1:]):
        assert w1.real * w2.real + w1.imag * w2.imag > 0  # |d arg| < pi/2


# --- canonical parameter integrals ----------------------------------------------

def test_airy_segment_closed_form():
    p = parse_poly_text("1,0")
    val = canonical_parameter_integral(p, [0.0, 1.0])
    assert val == pytest.approx(2.0 / 3.0, abs=1e-10)


def test_reversal_negates():
    p = parse_poly_text("1,0,0,-1")
    fwd = canonical_parameter_integral(p, [2.0, 2.0 + 1j],
                                       cmath.sqrt(p.evaluate(2.0)))
    w_end = sqrt_continuation(p, [2.0, 2.0 + 1j],
                              cmath.sqrt(p.evaluate(2.0))).samples[-1][1]
    back = canonical_parameter_integral(p, [2.0 + 1j, 2.0], w_end)
    assert abs(fwd + back) < 1e-12


def test_oscillator_period_closed_form(osc):
    per = pairwise_periods(osc)
    assert len(per) == 1
    assert per[0].value == pytest.approx(1j * math.pi / 2, abs=1e-12)


def test_period_sign_convention(osc, cubic_unity):
    for poly in (osc, cubic_unity, parse_poly_text("1,0,-1,0")):
        for p in pairwise_periods(poly):
            assert p.value.imag >= -1e-12 * abs(p.value)
            if abs(p.value.imag) <= 1e-12 * abs(p.value):
                assert p.value.real > 0


def test_cubic_unity_period_symmetry(cubic_unity):
    pers = pairwise_periods(cubic_unity)
    mods = [abs(p.value) for p in pers]
    assert max(mods) - min(mods) < 1e-8
    # squares are sign-free; their arguments step by 2*pi/3
    sq = [p.value ** 2 for p in pers]
    args = sorted(cmath.phase(s) for s in sq)
    for a, b in zip(args, args[1:]):
        assert abs(b - a - 2 * math.pi / 3) < 1e-8


def test_cubic_unity_period_against_unwrapped_quadrature(cubic_unity):
    # independent oracle: dense sampling with numpy phase unwrapping
    pers = [p.value for p in pairwise_periods(cubic_unity)]
    w1 = cmath.exp(2j * math.pi / 3)
    ts = np.linspace(0.0, 1.0, 400001)[1:-1]
    zs = 1.0 + (w1 - 1.0) * ts
    vals = zs ** 3 - 1.0
    phases = np.unwrap(np.angle(vals))
    sq = np.sqrt(np.abs(vals)) * np.exp(0.5j * phases)
    integral = np.trapezoid(sq, ts) * (w1 - 1.0)
    best = min(abs(integral - s * v) for v in pers for s in (1, -1))
    assert best < 1e-6


def test_odd_cubic_periods(cubic_odd):
    pers = {p.pair: p.value for p in pairwise_periods(cubic_odd)}
    # roots sorted -1, 0, 1: (0,1) is the left segment, (1,2) the right
    w_left = pers[(0, 1)]
    w_right = pers[(1, 2)]
    w_span = pers[(0, 2)]
    assert abs(w_left.imag) < 1e-10 * abs(w_left)      # real period
    assert abs(w_right.real) < 1e-10 * abs(w_right)    # imaginary period
    assert abs(w_span) > abs(w_left)
    # detour path around the middle root
    assert len([p for p in pairwise_periods(cubic_odd)
                if p.pair == (0, 2)][0].path) > 2
    # independent oracle for the segment integral
    xs = np.linspace(0.0, 1.0, 2000001)[1:-1]
    oracle = np.trapezoid(np.sqrt(xs - xs ** 3), xs)
    assert abs(w_right.imag - oracle) < 1e-6


def test_detour_clearance(cubic_odd):
    per = [p for p in pairwise_periods(cubic_odd) if p.pair == (0, 2)][0]
    # middle root must be cleared by the bent path
    assert min_clearance(list(per.path), [0.0]) > 1e-4


def test_opposite_detour_differs(cubic_odd):
    a = period_for_pair(cubic_odd, 0, 2)
    b = period_for_pair(cubic_odd, 0, 2, flip_side=True)
    # the two classes differ by the loop around the middle root
    assert abs(a.value - b.value) > 1e-3 or abs(a.value + b.value) > 1e-3


def test_rotation_covariance(osc):
    t = 0.37
    base = pairwise_periods(osc)[0].value
    rot = pairwise_periods(osc.rotate(t))[0].value
    expect = cmath.exp(1j * t) * base
    assert min(abs(rot - expect), abs(rot + expect)) < 1e-10


# --- correction densities --------------------------------------------------------

def test_alpha0_residues(osc):
    vals = alpha_contour_integrals(osc, circle(0, 2.0), 0)
    assert vals[0] == pytest.approx(-1j * math.pi, abs=1e-8)


def test_alpha_no_roots_enclosed(osc):
    vals = alpha_contour_integrals(osc, circle(3.0, 0.5), 2)
    assert all(abs(v) < 1e-9 for v in vals)


def test_alpha_deformation_invariance(osc):
    a = alpha_contour_integrals(osc, circle(0, 2.0), 3)
    b = alpha_contour_integrals(osc, circle(0, 3.0), 3)
    for x, y in zip(a, b):
        assert abs(x - y) < 1e-8


def test_alpha_big_circle_oracle(osc):
    # independent oracle: spectral trapezoid rule on a huge circle
    vals = alpha_contour_integrals(osc, circle(0, 2.5), 3)
    from stokesgeo.pathint import correction_numerators, _poly_eval
    qs = correction_numerators(osc, 3)
    n = 4096
    theta = np.linspace(0, 2 * math.pi, n, endpoint=False)
    z = 40.0 * np.exp(1j * theta)
    w = np.sqrt(z * z - 1.0)   # principal branch is fine far outside
    for j in range(4):
        integrand = _poly_eval(qs[j], z) * w ** (-(3 * j + 2))
        oracle = np.sum(integrand * 1j * z) * (2 * math.pi / n)
        assert abs(vals[j] - oracle) < 1e-8


def test_alpha_odd_multiplicity_rejected(osc):
    with pytest.raises(BranchError):
        alpha_contour_integrals(osc, circle(1.0, 0.5), 1)


def test_alpha_even_multiplicity_double_root():
    p = ComplexPolynomial.from_roots(1.0, [1.0, 1.0, -2.0])
    vals = alpha_contour_integrals(p, circle(1.0, 0.8), 0)
    assert vals[0] == pytest.approx(-1j * math.pi, abs=1e-8)


def test_winding_number():
    assert winding_number(circle(0, 1.0), 0.2) == 1
    assert winding_number(circle(0, 1.0), 2.0) == 0
    assert winding_number(circle(0, 1.0)[::-1], 0.0) == -1


def test_stadium_contour(osc):
    contour = build_stadium([-1.0, 0.0, 1.0], 0.3)
    assert abs(contour[0] - contour[-1]) < 1e-12
    assert winding_number(contour, 0.0) == 1
    assert winding_number(contour, 2.0) == 0


def test_re_xi_drift_regular_segment(osc):
    # straight segment off the Stokes set accumulates genuine drift
    drift, arc = re_xi_drift(osc, [2.0, 2.0 + 1.0j])
    assert drift > 0.1
    assert arc == pytest.approx(1.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(1.6, 4.0), st.floats(-1.0, 1.0), st.floats(0.3, 2.0))
def test_reversal_property(x, y, h):
    p = parse_poly_text("1,0,0,-1")
    a = complex(x, y)
    b = a + complex(0.1, h)
    seed = cmath.sqrt(p.evaluate(a))
    fwd = sqrt_continuation(p, [a, b], seed)
    back = canonical_parameter_integral(p, [b, a], fwd.samples[-1][1])
    assert abs(fwd.total_integral + back) < 1e-10


def test_branched_path_samples_square_to_p():
    p = parse_poly_text("1,0,0,-1")
    bp = sqrt_continuation(p, circle(0, 2.0, 80), cmath.sqrt(p.evaluate(2.0)))
    for z, w in bp.samples:
        assert abs(w * w - p.evaluate(z)) < 1e-9 * (1.0 + abs(p.evaluate(z)))


def test_period_positive_modulus(cubic_odd):
    for per in pairwise_periods(cubic_odd):
        assert abs(per.value) > 0


def test_alpha0_partial_enclosure(cubic_odd):
    # stadium-like circle enclosing two of the three roots: the log
    # residue counts the enclosed multiplicity
    contour = [complex(-0.5, 0) + 0.8 * cmath.exp(2j * math.pi * k / 128)
               for k in range(129)]
    vals = alpha_contour_integrals(cubic_odd, contour, 0)
    assert vals[0] == pytest.approx(-1j * math.pi, abs=1e-8)
