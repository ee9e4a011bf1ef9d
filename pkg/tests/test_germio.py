import pytest

from conftest import germ, rand_flat_field, rand_jet1_tangent, rand_tangent_map
from germ2.blowup import blowup_chart1
from germ2.germio import (
    GermDocument,
    GermSyntaxError,
    parse_complex,
    parse_germ,
    parse_scalar,
    render_decl,
    render_document,
)
from germ2.jets import Jet1, Jet2, MapGerm, VFieldGerm
from germ2.scalar import gr


def same(a, b):
    if isinstance(a, (MapGerm, VFieldGerm)):
        return type(a) is type(b) and a.key() == b.key() and a.order == b.order
    if isinstance(a, Jet1):
        return a == b and a.order == b.order
    return a.xcoeffs == b.xcoeffs and a.vcoeffs == b.vcoeffs and a.order == b.order


def roundtrip(kind, obj):
    text = render_decl(kind, "G", obj)
    back = parse_germ(text).first().obj
    assert same(obj, back), text
    assert render_decl(kind, "G", back) == text


class TestParse:
    def test_map(self):
        F = germ("map F(x,y) = (x + x^2 + 3*x*y, y - y^2) order 12")
        assert isinstance(F, MapGerm) and F.order == 12
        assert F.fx == Jet2({(1, 0): gr(1), (2, 0): gr(1), (1, 1): gr(3)}, 12)
        assert F.fy == Jet2({(0, 1): gr(1), (0, 2): gr(-1)}, 12)

    def test_field_with_parentheses(self):
        f = germ("field f(x,y) = ((x^2+3*x*y), (3*x*y+y^2))")
        assert isinstance(f, VFieldGerm) and f.order == 12
        assert f.fx == Jet2({(2, 0): gr(1), (1, 1): gr(3)}, 12)
        assert f.fy == Jet2({(1, 1): gr(3), (0, 2): gr(1)}, 12)

    def test_gaussian_coefficients(self):
        F = germ("map F(x,y) = (x + (1/2-3*i)*x^2, y + i^3*y^2) order 4")
        assert F.fx.coeffs[(2, 0)] == gr("1/2", -3)
        assert F.fy.coeffs[(0, 2)] == gr(0, -1)

    def test_order_override(self):
        assert germ("map F(x,y) = (x + x^2, y) order 12", 5).order == 5

    def test_one_dimensional(self):
        doc = parse_germ("map h(x) = x + x^2 - 1/3*x^4 order 8")
        d = doc.first()
        assert d.kind == "map1" and d.obj == Jet1([0, 1, 1, 0, gr(-1) / 3], 8)

    def test_chart(self):
        S = germ("chart S(x,v) = (x + x^2/(1+v), v + x*v) order 6")
        assert S.order == 6
        assert S.a(2)(gr(1)) == gr(1) / 2
        assert S.b(1)(gr(3)) == gr(3)

    def test_comments_and_metadata(self):
        doc = parse_germ("# header\n@source = test\nmap F(x,y) = (x, y + x^2)  # trailing\n\n")
        assert doc.metadata == {"source": "test"}
        assert len(doc.decls) == 1 and doc.decls[0].line == 3

    def test_several_declarations(self):
        doc = parse_germ("map F(x,y) = (x, y) order 3\nfield f(x,y) = (x^2, 0) order 4")
        assert [d.kind for d in doc.decls] == ["map", "field"]
        assert doc.first("field").order == 4

    def test_missing_kind(self):
        with pytest.raises(GermSyntaxError, match="no chart"):
            GermDocument().first("chart")


class TestErrors:
    @pytest.mark.parametrize("text, msg, col", [
        ("map G(x,y) = (0.5*x, y)", "non-rational literal", 15),
        ("map G(x,y) = (2x, y)", "implicit multiplication", 16),
        ("map G(x,y) = (x + z, y)", "undeclared variable 'z'", 19),
        ("map G(x,y) = (x*y, y)", "linear part is not invertible", None),
        ("map h(x) = x^2", "zero linear part", None),
        ("field f(x,y) = (x, y) order 0", "order must be a positive integer", None),
        ("map F(x,y) = (x + x^2, y", "expected ')'", None),
        ("map F(x,y) = (x/2, y)", None, None),
        ("chart S(x,v) = (x + x^2/x, v)", "divisor must be a nonzero function of v", None),
        ("chart S(x,v) = (1 + x, v)", "first component must vanish", None),
        ("germ F(x,y) = (x, y)", "expected a 'map'", None),
        ("field f(x) = x^2", "field declarations take variables", None),
    ])
    def test_rejected(self, text, msg, col):
        with pytest.raises(GermSyntaxError) as info:
            parse_germ(text)
        err = info.value
        assert err.line == 1
        if msg:
            assert msg in err.message
        if col:
            assert err.col == col

    def test_line_numbers(self):
        with pytest.raises(GermSyntaxError) as info:
            parse_germ("map F(x,y) = (x, y)\n\nmap G(x,y) = (x, 3y)")
        assert info.value.line == 3


class TestRender:
    def test_canonical_scalar_text(self):
        F = germ("map F(x,y) = (x + (1+2*i)*x^2 - 1/2*y^2, y) order 3")
        text = render_decl("map", "F", F)
        assert "(1+2*i)*x^2" in text and "order 3" in text

    def test_document(self):
        text = "@a = 1\nmap F(x,y) = (x + x^2, y) order 3\nmap h(x) = x + x^2 order 4\n"
        assert render_document(parse_germ(text)) == text

    def test_scalars(self):
        assert parse_scalar("(1/2-2*i)") == gr("1/2", -2)
        assert parse_scalar("-3/7") == gr(-3) / 7
        assert parse_complex("0.5+1i") == 0.5 + 1j
        assert parse_complex("1/4") == 0.25


class TestRoundTrip:
    def test_maps(self, rng):
        for _ in range(5):
            roundtrip("map", rand_tangent_map(rng, 6))

    def test_fields(self, rng):
        for _ in range(5):
            roundtrip("field", rand_flat_field(rng, 6))

    def test_one_dimensional(self, rng):
        for k in (1, 2, 3):
            roundtrip("map1", rand_jet1_tangent(rng, 9, k))

    def test_charts(self, rng):
        for _ in range(3):
            roundtrip("chart", blowup_chart1(rand_tangent_map(rng, 5, maxdeg=3)))

    def test_chart_with_poles(self):
        roundtrip("chart", germ("chart S(x,v) = (x + (1/(1+v))*x^2 + (v/(2-i*v))*x^3, v + x*v) order 5"))
