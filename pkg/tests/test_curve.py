import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reglab.curve import (
    O,
    OffCurveError,
    Point,
    SingularCurveError,
    curve_from_h,
    curve_from_k,
    function_f,
    function_g,
    function_g_sigma,
    functions_xy,
    iso_phi,
    named_points,
    phi_codomain,
    pullback,
    standard_labels,
)
from reglab import curve as cv

SQRT2 = math.sqrt(2)
H_VALUES = [0.5, 1 / SQRT2, 0.45, 1.7, 0.3 + 0.2j, -0.8]


def gap(S, T):
    if S.is_infinity or T.is_infinity:
        return 0.0 if S.is_infinity and T.is_infinity else math.inf
    return max(abs(S.X - T.X), abs(S.Y - T.Y))


def test_singular_parameters():
    for k in (0, 4, -4):
        with pytest.raises(SingularCurveError):
            curve_from_k(k)
    with pytest.raises(SingularCurveError):
        curve_from_h(0)


def test_coefficient_and_roots():
    E = curve_from_h(0.5)
    assert E.k == 5 and abs(E.a - 17 / 4) < 1e-15
    roots = sorted(E.roots(), key=lambda z: z.real)
    assert np.allclose(roots, [-4, -0.25, 0])
    assert abs(curve_from_h(1 / SQRT2).k - 3 * SQRT2) < 1e-14


@pytest.mark.parametrize("h", H_VALUES)
def test_named_points_on_curve_and_relations(h):
    E = curve_from_h(h)
    p = named_points(h)
    for S in p.values():
        assert E.contains(S)
    P, Q = p["P"], p["Q"]
    assert gap(E.mul(2, P), Point(0, 0)) < 1e-10
    assert E.mul(4, P).is_infinity
    assert gap(E.add(P, Q), Point(-1, h - 1 / h)) < 1e-10
    assert gap(E.add(E.mul(2, P), Q), Point(-h * h, 0)) < 1e-10
    assert gap(p["P+Q"], E.add(P, Q)) < 1e-10


def test_points_at_half():
    E = curve_from_h(0.5)
    p = named_points(0.5)
    P, A, B = p["P"], p["A"], p["B"]
    assert gap(E.mul(2, A), P) < 1e-10
    assert gap(E.mul(2, B), P) < 1e-10
    assert gap(E.sub(B, A), E.mul(2, P)) < 1e-10
    assert gap(E.add(A, B), -P) < 1e-10
    s5 = math.sqrt(5)
    assert gap(A, Point((-3 + s5) / 2, -1.25 + 0.75 * s5)) < 1e-14
    assert gap(B, Point((-3 - s5) / 2, -1.25 - 0.75 * s5)) < 1e-14


def test_points_at_inverse_sqrt2():
    h = 1 / SQRT2
    E = curve_from_h(h)
    p = named_points(h)
    assert gap(p["A"], E.add(E.mul(3, p["P"]), p["Q"])) < 1e-10
    assert gap(p["B"], p["Q"]) < 1e-10
    assert gap(p["A"], -p["P+Q"]) < 1e-10


def test_standard_labels_order():
    labels = standard_labels(0.5)
    assert list(labels)[:3] == ["P", "P+Q", "Q"]
    E = curve_from_h(0.5)
    assert gap(labels["Q+A"], E.add(labels["Q"], labels["A"])) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_group_axioms(seed):
    rng = np.random.default_rng(seed)
    for h in (0.5, 0.3 + 0.2j):
        E = curve_from_h(h)
        S, T, U = (E.random_point(rng) for _ in range(3))
        tol = 1e-9 * (1 + max(abs(S.X), abs(T.X), abs(U.X))) ** 3
        assert gap(E.add(E.add(S, T), U), E.add(S, E.add(T, U))) < tol
        assert gap(E.add(S, T), E.add(T, S)) < tol
        assert gap(E.add(S, O), S) == 0
        assert E.add(S, -S).is_infinity
        assert E.contains(E.add(S, T), 1e-8)


def test_doubling_two_torsion_gives_O():
    E = curve_from_h(0.5)
    for r in E.roots():
        assert E.mul(2, Point(r, 0)).is_infinity


def test_off_curve_checks():
    E = curve_from_h(0.5)
    with pytest.raises(OffCurveError):
        E.check(Point(1, 1))
    with pytest.raises(OffCurveError):
        cv.add(E, Point(1, 1), Point(1, 2.5))
    with pytest.raises(ValueError):
        Point(1, None)


def test_point_multiplication_negative():
    E = curve_from_h(0.45)
    P = named_points(0.45)["P"]
    assert gap(E.mul(-3, P), -E.mul(3, P)) < 1e-12
    assert E.mul(0, P).is_infinity


@pytest.mark.parametrize("h", [0.5, 1 / SQRT2, 1.3, 0.4 + 0.1j])
def test_xy_satisfy_family_equation(h):
    rng = np.random.default_rng(2)
    E = curve_from_h(h)
    x, y = functions_xy(E)
    for _ in range(20):
        S = E.random_point(rng)
        xv, yv = x(S), y(S)
        assert abs(xv + 1 / xv + yv + 1 / yv + E.k) < 1e-9 * (1 + abs(xv) + abs(1 / xv) + abs(yv) + abs(1 / yv))


@pytest.mark.parametrize("h", [0.5, 1 / SQRT2, 0.45])
def test_f_values(h):
    p = named_points(h)
    f = function_f(h)
    assert abs(f(p["2P"])) < 1e-12
    assert abs(f(p["P+Q"])) < 1e-12
    for name in ("P", "A", "B"):
        assert abs(f(p[name]) - 1) < 1e-12


def test_g_values():
    p = named_points(0.5)
    g, gs = function_g(), function_g_sigma()
    assert abs(g(p["A"]) - 1) < 1e-12 and abs(gs(p["B"]) - 1) < 1e-12
    assert abs(g(p["Q"])) < 1e-12 and abs(gs(p["Q"])) < 1e-12
    assert abs(g(-p["P"]) - 1) < 1e-12


@pytest.mark.parametrize("h", [0.5, 1 / SQRT2, 0.3 + 0.2j])
def test_iso_phi(h):
    rng = np.random.default_rng(4)
    E, Et = curve_from_h(h), phi_codomain(h)
    assert abs(Et.a + E.a) < 1e-12
    for _ in range(10):
        S, T = E.random_point(rng), E.random_point(rng)
        assert Et.contains(iso_phi(S, E))
        # phi is a group isomorphism
        assert gap(iso_phi(E.add(S, T)), Et.add(iso_phi(S), iso_phi(T))) < 1e-9 * (1 + abs(S.X) + abs(T.X)) ** 3


def test_pullback_composes():
    rng = np.random.default_rng(5)
    h = 0.5
    E, Et = curve_from_h(h), phi_codomain(h)
    xt, yt = functions_xy(Et)
    xp = pullback(xt)
    for _ in range(10):
        S = E.random_point(rng)
        assert abs(xp(S) - xt(iso_phi(S))) < 1e-10 * (1 + abs(xp(S)))


def test_curve_function_algebra():
    E = curve_from_h(0.5)
    rng = np.random.default_rng(6)
    f = function_f(0.5)
    g = function_g()
    fg = f.times(g, E)
    for _ in range(5):
        S = E.random_point(rng)
        assert abs(fg(S) - f(S) * g(S)) < 1e-10 * (1 + abs(f(S) * g(S)))
        assert abs(f.one_minus()(S) - (1 - f(S))) < 1e-12 * (1 + abs(f(S)))
        assert abs(f.conjugate_y()(S) - f(-S)) < 1e-12 * (1 + abs(f(S)))
    with pytest.raises(ValueError):
        cv.CurveFunction([0], [0])
