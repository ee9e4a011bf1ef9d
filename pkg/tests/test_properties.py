"""Randomized algebraic laws, driven by hypothesis."""
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from germ2.germio import parse_germ, render_decl
from germ2.jets import Jet1, Jet2, MapGerm, VFieldGerm, compose, invert
from germ2.lie import exp_field, flow_power, lie_bracket, log_diffeo
from germ2.normalform import residue_1d
from germ2.scalar import GaussianRational, Poly1, gr

N = 6
SETTINGS = settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])

small = st.integers(-4, 4)
scalars = st.builds(lambda a, b, d: gr(a, b) / d, small, small, st.integers(1, 3))
nonzero = scalars.filter(bool)


def jets(lo=2, hi=4, order=N):
    mono = st.tuples(st.integers(0, hi), st.integers(0, hi)).filter(lambda m: lo <= m[0] + m[1] <= hi)
    return st.dictionaries(mono, scalars, max_size=5).map(lambda cs: Jet2(cs, order))


flat_fields = st.builds(VFieldGerm, jets(), jets())
tangent_maps = st.builds(lambda a, b: MapGerm(Jet2.x(N) + a, Jet2.y(N) + b), jets(), jets())


@SETTINGS
@given(scalars, scalars, scalars)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    if b:
        assert (a / b) * b == a


@SETTINGS
@given(scalars)
def test_scalar_render_roundtrip(a):
    F = MapGerm(Jet2.x(3) + Jet2({(2, 0): a}, 3), Jet2.y(3))
    back = parse_germ(render_decl("map", "F", F)).first().obj
    assert back.key() == F.key()
    assert isinstance(back.fx[(2, 0)], GaussianRational)


@SETTINGS
@given(st.lists(scalars, max_size=4), st.lists(scalars, max_size=4), scalars)
def test_poly_evaluation_homomorphism(p, q, t):
    P, Q = Poly1(p), Poly1(q)
    assert (P * Q)(t) == P(t) * Q(t)
    assert (P + Q)(t) == P(t) + Q(t)
    assert P.compose(Q)(t) == P(Q(t))


@SETTINGS
@given(tangent_maps, tangent_maps, tangent_maps)
def test_composition_associative(F, G, H):
    assert compose(F, compose(G, H)).key() == compose(compose(F, G), H).key()


@SETTINGS
@given(tangent_maps)
def test_inverse(F):
    assert compose(F, invert(F)).is_identity()
    assert compose(invert(F), F).is_identity()


@SETTINGS
@given(flat_fields)
def test_exp_log_roundtrip(X):
    assert log_diffeo(exp_field(X)).key() == X.key()


@SETTINGS
@given(tangent_maps)
def test_log_exp_roundtrip(F):
    assert exp_field(log_diffeo(F)).key() == F.key()


@SETTINGS
@given(tangent_maps, nonzero, nonzero)
def test_flow_power_group_law(F, s, t):
    assert compose(flow_power(F, s), flow_power(F, t)).key() == flow_power(F, s + t).key()


@SETTINGS
@given(flat_fields, flat_fields)
def test_bracket_antisymmetric(X, Y):
    assert (lie_bracket(X, Y) + lie_bracket(Y, X)).is_zero()


@SETTINGS
@given(flat_fields, flat_fields, flat_fields)
def test_jacobi(X, Y, Z):
    # a bracket loses one order, so the outer argument is truncated to match
    def br(A, B, C):
        return lie_bracket(A.truncate(N - 1), lie_bracket(B, C))

    t = br(X, Y, Z) + br(Y, Z, X) + br(Z, X, Y)
    assert t.is_zero()


@SETTINGS
@given(st.sampled_from([1, 2, 3]), nonzero, st.lists(scalars, min_size=8, max_size=8),
       st.lists(scalars, min_size=5, max_size=5))
def test_residue_invariant(k, a, tail, gcs):
    h = Jet1([0, 1] + [0] * (k - 1) + [a] + tail[: 12 - k - 1], 12)
    g = Jet1([0, 1] + gcs, 12)
    conj = g.compose(h).compose(g.compositional_inverse())
    assert residue_1d(conj) == residue_1d(h)


@SETTINGS
@given(tangent_maps, nonzero, nonzero)
def test_linear_substitution_matches_evaluation(F, a, b):
    # composing with a diagonal linear map loses nothing to truncation
    G = MapGerm(Jet2.x(N) * a, Jet2.y(N) * b)
    H = compose(F, G)
    x, y = 0.13 + 0.02j, -0.07j
    for h, f in ((H.fx, F.fx), (H.fy, F.fy)):
        assert abs(h.evaluate(x, y) - f.evaluate(complex(a) * x, complex(b) * y)) < 1e-12
