import math

import numpy as np
import pytest

from reglab.curve import (
    O,
    CurveFunction,
    Point,
    curve_from_h,
    function_f,
    function_g,
    function_g_sigma,
    functions_xy,
    named_points,
    phi_codomain,
    pullback,
    standard_labels,
)
from reglab.divisor import (
    DiamondClass,
    Divisor,
    DivisorError,
    MixedCurveError,
    canonicalize,
    class_combine,
    diamond,
    divisor_of,
    divisor_of_rational,
    parse_class_text,
)

SQRT2 = math.sqrt(2)


def cls(h, terms):
    E = curve_from_h(h)
    lab = standard_labels(h)
    return canonicalize(E, [(lab[n], c) for n, c in terms.items()])


def div(h, terms, o):
    lab = standard_labels(h)
    return Divisor(curve_from_h(h), [(lab[n], c) for n, c in terms.items()] + [(O, o)])


@pytest.mark.parametrize("h", [0.5, 1 / SQRT2, 0.45, 1.3, 0.3 + 0.2j])
def test_divisor_of_f(h):
    E = curve_from_h(h)
    f = function_f(h)
    assert divisor_of(E, f).equals(div(h, {"2P": 1, "P+Q": 2}, -3))
    assert divisor_of(E, f.one_minus()).equals(div(h, {"P": 1, "A": 1, "B": 1}, -3))


@pytest.mark.parametrize("h", [0.5, 1 / SQRT2, 0.45, 0.7, 0.3 + 0.2j])
def test_xy_diamond(h):
    E = curve_from_h(h)
    x, y = functions_xy(E)
    Dx, Dy = divisor_of_rational(E, x), divisor_of_rational(E, y)
    assert Dx.degree == 0 and Dy.degree == 0
    assert diamond(Dx, Dy).equals(cls(h, {"P": 8}), modulo_torsion=True)


@pytest.mark.parametrize("h", [0.5, 1 / SQRT2, 0.45])
def test_xy_phi_diamond(h):
    E = curve_from_h(h)
    xt, yt = functions_xy(phi_codomain(h))
    c = diamond(divisor_of_rational(E, pullback(xt)), divisor_of_rational(E, pullback(yt)))
    assert c.equals(cls(h, {"P+Q": 8}), modulo_torsion=True)


def test_f_diamond_at_inverse_sqrt2():
    h = 1 / SQRT2
    E = curve_from_h(h)
    f = function_f(h)
    c = diamond(divisor_of(E, f), divisor_of(E, f.one_minus()))
    assert c.equals(cls(h, {"P": 6, "P+Q": -10}), modulo_torsion=True)
    # the full class carries 2-torsion on top
    assert not c.torsion_part().is_zero


def _g(h, F):
    E = curve_from_h(h)
    return diamond(divisor_of(E, F), divisor_of(E, F.one_minus()))


def test_g_divisors():
    E = curve_from_h(0.5)
    g, gs = function_g(), function_g_sigma()
    lab = standard_labels(0.5)
    Q, A, B, P = lab["Q"], lab["A"], lab["B"], lab["P"]
    want_g = Divisor(E, [(Q, 1), (B, 1), (-E.add(Q, B), 1), (O, -3)])
    want_1g = Divisor(E, [(-P, 1), (A, 2), (O, -3)])
    assert divisor_of(E, g).equals(want_g)
    assert divisor_of(E, g.one_minus()).equals(want_1g)
    want_gs = Divisor(E, [(Q, 1), (A, 1), (-E.add(Q, A), 1), (O, -3)])
    assert divisor_of(E, gs).equals(want_gs)
    assert divisor_of(E, gs.one_minus()).equals(Divisor(E, [(-P, 1), (B, 2), (O, -3)]))


def test_g_diamonds_and_combination():
    cg = _g(0.5, function_g())
    cgs = _g(0.5, function_g_sigma())
    assert cg.equals(cls(0.5, {"P+Q": 3, "Q+A": -2, "B": -3, "Q+B": 4, "P": -3, "A": 5}), True)
    assert cgs.equals(cls(0.5, {"P+Q": 3, "Q+B": -2, "A": -3, "Q+A": 4, "P": -3, "B": 5}), True)
    total = class_combine(cg, cgs)
    assert total.equals(cls(0.5, {"P+Q": 6, "Q+A": 2, "Q+B": 2, "A": 2, "B": 2, "P": -6}), True)
    f = _g(0.5, function_f(0.5))
    combined = f - cg - cgs
    assert combined.equals(cls(0.5, {"P+Q": -12, "P": 10}), modulo_torsion=True)


def test_canonical_form_rules():
    h = 0.5
    E = curve_from_h(h)
    P = named_points(h)["P"]
    # (-T) ~ -(T)
    assert canonicalize(E, [(-P, 1)]).equals(canonicalize(E, [(P, -1)]))
    assert canonicalize(E, [(P, 1), (-P, 1)]).is_zero
    # O dropped, 2-torsion reduced mod 2
    T2 = Point(0, 0)
    assert canonicalize(E, [(O, 5)]).is_zero
    assert canonicalize(E, [(T2, 2)]).is_zero
    assert canonicalize(E, [(T2, 3)]).coefficient(T2) == 1
    c = canonicalize(E, [(P, 3)])
    assert c.coefficient(P) == 3 and c.coefficient(-P) == -3


def test_diamond_antisymmetric_and_bilinear():
    h = 0.45
    E = curve_from_h(h)
    x, y = functions_xy(E)
    Dx, Dy = divisor_of_rational(E, x), divisor_of_rational(E, y)
    Df = divisor_of(E, function_f(h))
    assert (diamond(Dx, Dy) + diamond(Dy, Dx)).is_zero
    assert diamond(Dx + Df, Dy).equals(diamond(Dx, Dy) + diamond(Df, Dy))
    assert diamond(2 * Dx, Dy).equals(2 * diamond(Dx, Dy))


def test_principal_divisors_have_degree_zero():
    rng = np.random.default_rng(0)
    E = curve_from_h(0.6)
    for _ in range(10):
        F = CurveFunction(rng.normal(size=3) + 1j * rng.normal(size=3), rng.normal(size=2))
        D = divisor_of(E, F)
        assert D.degree == 0
        # every finite zero is a zero
        for S, c in D.terms:
            if not S.is_infinity and c > 0:
                assert abs(F(S)) < 1e-7 * (1 + abs(S.X)) ** 3


def test_constant_function_has_empty_divisor():
    E = curve_from_h(0.5)
    assert divisor_of(E, CurveFunction([3.0], [0])).terms == ()


def test_mixed_curves_rejected():
    E1, E2 = curve_from_h(0.5), curve_from_h(0.45)
    D1 = divisor_of(E1, function_f(0.5))
    D2 = divisor_of(E2, function_f(0.45))
    with pytest.raises(MixedCurveError):
        diamond(D1, D2)
    with pytest.raises(MixedCurveError):
        class_combine(DiamondClass(E1), DiamondClass(E2))


def test_text_roundtrip():
    c = cls(0.5, {"P+Q": -12, "P": 10})
    text = c.to_text(standard_labels(0.5))
    assert text == "10*(P) + -12*(P+Q)"
    assert parse_class_text(text) == parse_class_text("-12*(Q+P) + 10*(P)") == {"P": 10, "P+Q": -12}
    js = c.to_json(standard_labels(0.5))
    assert {t["label"]: t["label_coeff"] for t in js["terms"]} == {"P": 10, "P+Q": -12}
    assert DiamondClass(curve_from_h(0.5)).to_text() == "0"
