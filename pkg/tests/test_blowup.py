import pytest
import sympy as sp

from conftest import germ, rand_tangent_map
from germ2.blowup import (
    ALL_DIRECTIONS,
    BlowupError,
    SemiSeries,
    blowup_chart1,
    blowup_chart2,
    chart_transition,
    characteristic_directions,
    compose_semi,
    direction_data,
    invert_semi,
)
from germ2.jets import MapGerm, compose
from germ2.scalar import ONE, ZERO, Poly1, RatFunc, gr
from oracles import chart_series, jet2_to_sympy, ratfunc_to_sympy, x

V = Poly1([0, 1])


def R(*cs):
    return RatFunc.poly(Poly1([gr(c) for c in cs]))


class TestChart1:
    def test_dicritic_exact(self):
        S = blowup_chart1(germ("map F(x,y) = (x + x^2, y + x*y) order 6"))
        assert S.order == 5
        assert S.a(2) == R(1) and all(not S.a(j) for j in range(3, 6))
        assert S.is_identity() is False
        assert all(not b for b in S.vcoeffs)

    def test_identity(self):
        assert blowup_chart1(MapGerm.identity(6)).is_identity()

    def test_first_order(self):
        S = blowup_chart1(germ("map F(x,y) = (x + x^2, y + y^2) order 6"))
        assert S.a(2) == R(1)
        assert S.b(1) == R(0, -1, 1)

    def test_against_sympy(self, rng):
        F = rand_tangent_map(rng, 6, maxdeg=3)
        S = blowup_chart1(F)
        X1, V1 = chart_series(jet2_to_sympy(F.fx), jet2_to_sympy(F.fy), 5)
        for j in range(1, 6):
            expected_a = sp.expand(X1).coeff(x, j) - (1 if j == 1 else 0)
            assert sp.simplify(ratfunc_to_sympy(S.a(j)) - expected_a) == 0
            assert sp.simplify(ratfunc_to_sympy(S.b(j)) - sp.expand(V1).coeff(x, j)) == 0

    def test_functorial(self, rng):
        F = rand_tangent_map(rng, 6, maxdeg=3)
        G = rand_tangent_map(rng, 6, maxdeg=3)
        lhs = blowup_chart1(compose(F, G))
        rhs = compose_semi(blowup_chart1(F), blowup_chart1(G))
        assert lhs.xcoeffs == rhs.xcoeffs and lhs.vcoeffs == rhs.vcoeffs


class TestChart2:
    def test_identity(self):
        assert blowup_chart2(MapGerm.identity(6)).is_identity()

    def test_symmetric(self):
        S = blowup_chart2(germ("map F(x,y) = (x + x^2, y + y^2) order 6"))
        assert S.a(2) == R(1)
        assert S.b(1) == R(0, -1, 1)

    def test_dicritic(self):
        S = blowup_chart2(germ("map F(x,y) = (x + x^2, y + x*y) order 6"))
        assert S.a(2) == R(0, 1)


class TestTransition:
    def test_agrees_with_chart2(self):
        F = germ("map F(x,y) = (x + x^2, y + y^2) order 5")
        T = chart_transition(blowup_chart1(F))
        S2 = blowup_chart2(F)
        assert T.xcoeffs == S2.xcoeffs and T.vcoeffs == S2.vcoeffs

    def test_identity(self):
        assert chart_transition(SemiSeries.identity(4)).is_identity()

    def test_degree_bound(self, rng):
        # polynomial germs give deg a_j <= j and deg b_j <= 2j+1 in both charts
        for _ in range(4):
            F = rand_tangent_map(rng, 6, maxdeg=4)
            for S in (blowup_chart1(F), chart_transition(blowup_chart1(F))):
                for j in range(1, S.order + 1):
                    a, b = S.a(j), S.b(j)
                    assert a.is_polynomial() and b.is_polynomial()
                    assert a.num.degree <= j and b.num.degree <= 2 * j + 1

    def test_pole_away_from_zero(self):
        S = SemiSeries([R(), R(1)], [RatFunc(Poly1([ONE]), Poly1([gr(-1), ONE]))], 2)
        with pytest.raises(BlowupError):
            chart_transition(S)


class TestSemiInverse:
    def test_roundtrip(self):
        S = blowup_chart1(germ("map F(x,y) = (x + x^2 - x*y, y + y^2 + x^2*y) order 6"))
        assert compose_semi(S, invert_semi(S)).is_identity()
        assert compose_semi(invert_semi(S), S).is_identity()


class TestDirections:
    def test_data(self):
        dd = direction_data(germ("map F(x,y) = (x + x^2, y + y^2)"))
        assert dd.k == 1 and dd.p == Poly1([ONE])
        assert dd.r == Poly1([ZERO, gr(-1), ONE])
        assert list(dd.rational_roots) == [ZERO, ONE]
        assert dd.infinity_is_characteristic

    def test_dicritic(self):
        dd = direction_data(germ("map F(x,y) = (x + x^2, y + x*y)"))
        assert dd.dicritic and dd.r.is_zero()
        assert characteristic_directions(germ("map F(x,y) = (x + x^2, y + x*y)")) is ALL_DIRECTIONS

    def test_perturbed_r(self):
        dd = direction_data(germ("map F(x,y) = (x + x^2, y + x*y + y^2)"))
        assert dd.r == Poly1([ZERO, ZERO, ONE])

    def test_three_directions(self):
        ds = characteristic_directions(germ("map F(x,y) = (x + x^2, y + y^2)"))
        assert [d.as_dict()["direction"] for d in ds] == ["(1:0)", "(1:1)", "(0:1)"]
        assert all(d.lam == ONE and not d.degenerate for d in ds)

    def test_degenerate(self):
        # leading part (xy, 2y^2): (1:0) is characteristic with lambda = 0
        ds = characteristic_directions(germ("map F(x,y) = (x + x*y, y + 2*y^2)"))
        first = ds[0]
        assert first.point == (ONE, ZERO) and first.degenerate
