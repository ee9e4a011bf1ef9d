import pytest

from conftest import germ, rand_flat_field
from germ2.jets import Flatness, Jet2, MapGerm, VFieldGerm, compose, invert, pushforward
from germ2.lie import (
    DicriticInfo,
    LieError,
    abelian_structure,
    average_linearizer,
    exp_field,
    find_resonances,
    flow_power,
    genericity_resultant,
    germ_order,
    group_commutator,
    is_dicritic,
    is_invariant_field,
    is_linear,
    lie_bracket,
    linearize_radial,
    log_diffeo,
    sla_membership,
)
from germ2.scalar import gr

PAIR = """
field f(x,y) = (x^2 + 3*x*y, 3*x*y + y^2) order 12
field g(x,y) = (3*x^3 - 5*x^2*y + x*y^2 + y^3, x^3 + x^2*y - 5*x*y^2 + 3*y^3) order 12
"""

# dicritic field whose time-one map is generic (nonzero resultant)
GENERIC = "field f(x,y) = (x^2 + x*y + x^2*y, x*y + y^2 + 2*y^3) order 10"


def pair():
    from germ2.germio import parse_germ
    d = parse_germ(PAIR).decls
    return d[0].obj, d[1].obj


class TestBracket:
    def test_commuting_pair(self):
        f, g = pair()
        assert lie_bracket(f, g).is_zero()

    def test_antisymmetry(self, rng):
        X = rand_flat_field(rng, 8)
        assert lie_bracket(X, X).is_zero()

    def test_euler(self):
        R = VFieldGerm.radial(8)
        P = germ("field P(x,y) = (x^2, 0) order 8")
        assert lie_bracket(R, P).key() == P.truncate(7).key()


class TestExpLog:
    def test_exp_zero(self):
        assert exp_field(VFieldGerm.zero(8)).is_identity()

    def test_exp_x2(self):
        E = exp_field(germ("field f(x,y) = (x^2, 0) order 9"))
        assert E.key() == germ("map E(x,y) = (x + x^2 + x^3 + x^4 + x^5 + x^6 + x^7 + x^8 + x^9, y) order 9").key()

    def test_exp_leading_part(self):
        f, _ = pair()
        F = exp_field(f)
        assert F.homogeneous(2) == f.homogeneous(2)

    def test_exp_rejects_linear(self):
        with pytest.raises(LieError, match="exp restricted to flat fields"):
            exp_field(germ("field f(x,y) = (x, y^2) order 5"))

    def test_log_identity(self):
        assert log_diffeo(MapGerm.identity(8)).is_zero()

    def test_log_geometric(self):
        X = log_diffeo(germ("map F(x,y) = (x + x^2 + x^3 + x^4 + x^5 + x^6 + x^7 + x^8, y) order 8"))
        assert X.key() == germ("field f(x,y) = (x^2, 0) order 8").key()

    def test_roundtrip(self, rng):
        X = rand_flat_field(rng, 8)
        assert log_diffeo(exp_field(X)).key() == X.key()

    def test_log_not_tangent(self):
        with pytest.raises(LieError):
            log_diffeo(germ("map F(x,y) = (2*x, y)"))


class TestFlowPower:
    def test_basic(self):
        F = germ("map F(x,y) = (x + x^2 - y^3, y + x*y) order 8")
        assert flow_power(F, 0).is_identity()
        assert flow_power(F, 1).key() == F.key()
        assert flow_power(F, 2).key() == compose(F, F).key()
        assert flow_power(F, -1).key() == invert(F).key()


class TestCommutator:
    def test_self(self, rng):
        F = exp_field(rand_flat_field(rng, 8))
        assert group_commutator(F, F).is_identity()

    def test_commuting_pair(self):
        f, g = pair()
        assert group_commutator(exp_field(f), exp_field(g)).is_identity()

    def test_leading_law(self):
        F = germ("map F(x,y) = (x + x^2, y) order 8")
        G = germ("map G(x,y) = (x, y + y^3) order 8")
        C = compose(F, G).minus_identity()
        D = compose(G, F).minus_identity()
        F2 = F.homogeneous(2)
        G3 = G.homogeneous(3)
        for i in range(2):
            lead = (C[i] - D[i]).homogeneous(4)
            expected = (F2[i].dx() * G3[0] + F2[i].dy() * G3[1]
                        - G3[i].dx() * F2[0] - G3[i].dy() * F2[1]).homogeneous(4)
            assert lead.same_terms(expected)


class TestOrder:
    def test_examples(self):
        assert germ_order(germ("map F(x,y) = (-x, -y)"), 10) == 2
        assert germ_order(germ("map F(x,y) = (i*x, -y)"), 10) == 4
        assert germ_order(germ("map F(x,y) = (x + x^2, y)"), 12) is None


class TestAveraging:
    def test_already_linear(self):
        g = average_linearizer([germ("map F(x,y) = (-x, -y) order 6")], 8)
        assert g.is_identity()

    def test_conjugated_involution(self):
        h = germ("map h(x,y) = (x + y^2, y) order 8")
        A = germ("map A(x,y) = (-x, -y) order 8")
        F = compose(invert(h), compose(A, h))
        g = average_linearizer([F], 8)
        assert is_linear(compose(g, compose(F, invert(g))))

    def test_infinite(self):
        with pytest.raises(LieError, match="group not finite within bound"):
            average_linearizer([germ("map F(x,y) = (x + x^2, y) order 6")], 10)


class TestInvariantField:
    def test_examples(self):
        R = VFieldGerm.radial(8)
        assert is_invariant_field(germ("map A(x,y) = (2*x, 3*y) order 8"), R)
        assert not is_invariant_field(germ("map F(x,y) = (x + y^2, y) order 8"), R)

    def test_flow_preserves_generator(self, rng):
        X = rand_flat_field(rng, 8)
        assert is_invariant_field(exp_field(X), X)


class TestLinearizeRadial:
    def test_radial(self):
        assert linearize_radial(VFieldGerm.radial(8)).is_identity()

    def test_shear(self):
        X = germ("field X(x,y) = (x + y^2, y) order 8")
        g = linearize_radial(X)
        assert g.key() == germ("map g(x,y) = (x - y^2, y) order 8").key()
        assert pushforward(g, X).key() == VFieldGerm.radial(7).key()

    def test_not_radial(self):
        with pytest.raises(LieError, match="linear part of the field is not radial"):
            linearize_radial(germ("field X(x,y) = (2*x, y) order 8"))


class TestDicritic:
    def test_examples(self):
        info = is_dicritic(germ("map F(x,y) = (x + x^2, y + x*y)"))
        assert isinstance(info, DicriticInfo) and info.dicritic and info.k == 1
        assert info.f.same_terms(Jet2.x(12))
        info = is_dicritic(germ("map F(x,y) = (x + x^2, y + y^2)"))
        assert not info.dicritic and info.k == 1
        assert is_dicritic(germ("map F(x,y) = (2*x, y)")) is Flatness.NOT_TANGENT

    def test_exp_homogeneous_multiple(self):
        F = exp_field(germ("field f(x,y) = (x^2 + x*y, x*y + y^2) order 8"))
        assert is_dicritic(F).dicritic

    def test_commuting_pair_field_not_dicritic(self):
        # the leading part (x^2 + 3xy, 3xy + y^2) is not a multiple of (x, y)
        f, _ = pair()
        assert not is_dicritic(exp_field(f)).dicritic


class TestAbelian:
    @pytest.mark.parametrize("t", [gr(2), gr(-1), gr(1, 1), gr(3) / 7])
    def test_recovers_t(self, t):
        F = exp_field(germ(GENERIC))
        assert genericity_resultant(F) != 0
        assert abelian_structure(F, flow_power(F, t)) == t

    def test_square(self):
        F = exp_field(germ(GENERIC))
        assert abelian_structure(F, compose(F, F)) == gr(2)

    def test_non_commuting(self):
        F = exp_field(germ(GENERIC))
        G = germ("map G(x,y) = (x + x^2 + x*y, y + x*y + y^2 + y^3) order 10")
        with pytest.raises(LieError, match="commuting hypothesis violated"):
            abelian_structure(F, G)


class TestResonance:
    def test_two_four(self):
        rep = find_resonances(2, 4, 3)
        assert ((2, 0), 2) in [(tuple(m), j) for m, j in rep.relations]

    def test_ones(self):
        rep = find_resonances(1, 1, 2)
        rel = {(tuple(m), j) for m, j in rep.relations}
        for m in [(2, 0), (1, 1), (0, 2)]:
            assert (m, 1) in rel and (m, 2) in rel

    def test_none(self):
        assert not find_resonances(2, 3, 6).relations


class TestSLA:
    def test_examples(self):
        assert sla_membership([[1, 0], [0, 1]], [gr(5), gr(7)])
        assert sla_membership([[0, 1], [1, 0]], [gr(1) / 2, gr(1) / 2])
        assert not sla_membership([[0, 1], [1, 0]], [gr(1) / 3, gr(0)])
