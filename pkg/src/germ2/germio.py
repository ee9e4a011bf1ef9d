"""Reading and writing ``.germ`` documents.

Grammar (one declaration per line, ``#`` starts a comment)::

    @key = value
    map NAME(x,y) = (EXPR, EXPR) [order N]
    field NAME(x,y) = (EXPR, EXPR) [order N]
    map NAME(x) = EXPR [order N]
    chart NAME(x,v) = (EXPR, EXPR) [order N]

EXPR uses + - * ^ and parentheses over the declared variables, the
imaginary unit ``i`` and rational literals such as ``3`` or ``-2/5``.
Juxtaposition is not multiplication.  Division by an expression in v is
allowed only inside ``chart`` declarations.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

from .blowup import SemiSeries
from .jets import Jet1, Jet2, JetError, MapGerm, VFieldGerm, render_jet1, render_jet2
from .scalar import I, GaussianRational, Poly1, RatFunc, gr, render_ratfunc

DEFAULT_ORDER = 12


class GermSyntaxError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"line {line}, col {col}: {message}" if line else message)


# ---------------------------------------------------------------------------
# lexer

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t]+)
  | (?P<float>\d+\.\d*|\.\d+|\d+[eE][+-]?\d+)
  | (?P<rat>\d+/\d+)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),=@])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str, line: int = 1, col0: int = 1) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise GermSyntaxError(f"unexpected character {text[pos]!r}", line, col0 + pos)
        kind = m.lastgroup
        if kind == "float":
            raise GermSyntaxError(f"non-rational literal {m.group()!r}", line, col0 + pos)
        if kind != "ws":
            out.append(Token(kind, m.group(), line, col0 + pos))
        pos = m.end()
    out.append(Token("end", "", line, col0 + len(text)))
    return out


# ---------------------------------------------------------------------------
# expression trees


@dataclass(frozen=True)
class Node:
    op: str
    args: tuple = ()
    value: object = None
    line: int = 0
    col: int = 0


class _Parser:
    def __init__(self, tokens: list[Token], variables: tuple[str, ...], allow_div: bool):
        self.toks = tokens
        self.pos = 0
        self.vars = variables
        self.allow_div = allow_div

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def fail(self, msg: str, tok: Token | None = None):
        t = tok or self.tok
        raise GermSyntaxError(msg, t.line, t.col)

    def eat(self, text: str) -> Token:
        t = self.tok
        if t.text != text:
            self.fail(f"expected {text!r}, found {t.text or 'end of line'!r}")
        self.pos += 1
        return t

    def expr(self) -> Node:
        node = self.term()
        while self.tok.text in ("+", "-"):
            t = self.tok
            self.pos += 1
            rhs = self.term()
            node = Node("add" if t.text == "+" else "sub", (node, rhs), line=t.line, col=t.col)
        return node

    def term(self) -> Node:
        node = self.unary()
        while True:
            t = self.tok
            if t.text == "*":
                self.pos += 1
                node = Node("mul", (node, self.unary()), line=t.line, col=t.col)
            elif t.text == "/":
                if not self.allow_div:
                    self.fail("division is only allowed in chart declarations")
                self.pos += 1
                node = Node("div", (node, self.unary()), line=t.line, col=t.col)
            elif t.kind in ("int", "rat", "name") or t.text == "(":
                self.fail("implicit multiplication is not allowed; use '*'")
            else:
                return node

    def unary(self) -> Node:
        t = self.tok
        if t.text == "-":
            self.pos += 1
            return Node("neg", (self.unary(),), line=t.line, col=t.col)
        if t.text == "+":
            self.pos += 1
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.tok.text == "^":
            t = self.tok
            self.pos += 1
            e = self.tok
            if e.kind != "int":
                self.fail("exponent must be a nonnegative integer literal")
            self.pos += 1
            return Node("pow", (base,), value=int(e.text), line=t.line, col=t.col)
        return base

    def atom(self) -> Node:
        t = self.tok
        if t.kind in ("int", "rat"):
            self.pos += 1
            return Node("num", value=gr(t.text), line=t.line, col=t.col)
        if t.kind == "name":
            self.pos += 1
            if t.text == "i":
                return Node("num", value=I, line=t.line, col=t.col)
            if t.text not in self.vars:
                self.fail(f"undeclared variable {t.text!r}", t)
            return Node("var", value=t.text, line=t.line, col=t.col)
        if t.text == "(":
            self.pos += 1
            node = self.expr()
            self.eat(")")
            return node
        self.fail(f"unexpected {t.text or 'end of line'!r}")


# ---------------------------------------------------------------------------
# evaluation into algebras


def _eval(node: Node, leaf, const, div=None):
    op = node.op
    if op == "num":
        return const(node.value)
    if op == "var":
        return leaf(node.value)
    if op == "neg":
        return -_eval(node.args[0], leaf, const, div)
    if op == "pow":
        return _eval(node.args[0], leaf, const, div) ** node.value
    a = _eval(node.args[0], leaf, const, div)
    b = _eval(node.args[1], leaf, const, div)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return div(a, b, node)
    raise AssertionError(op)


class _ChartPoly:
    """Polynomial in x with RatFunc coefficients in v (parser-internal)."""

    def __init__(self, cs: dict[int, RatFunc], n: int):
        self.cs = {d: c for d, c in cs.items() if c and d <= n}
        self.n = n

    def _wrap(self, other):
        if isinstance(other, _ChartPoly):
            return other
        return _ChartPoly({0: RatFunc(other)}, self.n)

    def __add__(self, other):
        other = self._wrap(other)
        cs = dict(self.cs)
        for d, c in other.cs.items():
            cs[d] = cs[d] + c if d in cs else c
        return _ChartPoly(cs, self.n)

    def __neg__(self):
        return _ChartPoly({d: -c for d, c in self.cs.items()}, self.n)

    def __sub__(self, other):
        return self + (-self._wrap(other))

    def __mul__(self, other):
        other = self._wrap(other)
        cs: dict[int, RatFunc] = {}
        for d1, c1 in self.cs.items():
            for d2, c2 in other.cs.items():
                if d1 + d2 <= self.n:
                    cs[d1 + d2] = cs[d1 + d2] + c1 * c2 if d1 + d2 in cs else c1 * c2
        return _ChartPoly(cs, self.n)

    def __pow__(self, e: int):
        out = _ChartPoly({0: RatFunc(1)}, self.n)
        for _ in range(e):
            out = out * self
        return out


# ---------------------------------------------------------------------------
# documents


GermObject = Union[MapGerm, VFieldGerm, Jet1, SemiSeries]


@dataclass
class GermDecl:
    kind: str  # "map", "field", "map1", "chart"
    name: str
    variables: tuple[str, ...]
    obj: GermObject
    order: int
    line: int = 0


@dataclass
class GermDocument:
    decls: list[GermDecl] = field(default_factory=list)
    metadata: dict[str, str] = field(default_factory=dict)

    def first(self, kind: str | None = None) -> GermDecl:
        for d in self.decls:
            if kind is None or d.kind == kind:
                return d
        raise GermSyntaxError(f"no {kind or 'germ'} declaration found")


_DECL = re.compile(
    r"^\s*(?P<kind>map|field|chart)\s+(?P<name>[A-Za-z_][A-Za-z_0-9]*)\s*"
    r"\(\s*(?P<vars>[^)]*)\)\s*=\s*(?P<body>.*?)\s*(?:\border\s+(?P<order>\S+))?\s*$"
)


def parse_germ(text: str, order: int | None = None) -> GermDocument:
    """Parse a document; ``order`` overrides every declared truncation order."""
    doc = GermDocument()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped.startswith("@"):
            key, sep, value = stripped[1:].partition("=")
            if not sep or not key.strip():
                raise GermSyntaxError("metadata lines read '@key = value'", lineno, 1)
            doc.metadata[key.strip()] = value.strip()
            continue
        m = _DECL.match(line)
        if not m:
            raise GermSyntaxError("expected a 'map', 'field' or 'chart' declaration", lineno, 1)
        doc.decls.append(_parse_decl(m, lineno, order))
    return doc


def _parse_decl(m: re.Match, lineno: int, order_override: int | None) -> GermDecl:
    kind, name = m.group("kind"), m.group("name")
    variables = tuple(v.strip() for v in m.group("vars").split(",") if v.strip())
    if m.group("order") is not None:
        if not m.group("order").isdigit():
            raise GermSyntaxError("order must be a positive integer", lineno, m.start("order") + 1)
        n = int(m.group("order"))
    else:
        n = DEFAULT_ORDER
    if order_override is not None:
        n = order_override
    if n < 1:
        raise GermSyntaxError("order must be a positive integer", lineno, m.start("order") + 1)
    expected = {"map": (("x", "y"), ("x",)), "field": (("x", "y"),), "chart": (("x", "v"),)}[kind]
    if variables not in expected:
        allowed = " or ".join("(" + ",".join(e) + ")" for e in expected)
        raise GermSyntaxError(f"{kind} declarations take variables {allowed}", lineno, m.start("vars") + 1)
    body = m.group("body")
    col0 = m.start("body") + 1
    toks = tokenize(body, lineno, col0)
    parser = _Parser(toks, variables, allow_div=(kind == "chart"))
    if len(variables) == 2:
        parser.eat("(")
        e1 = parser.expr()
        parser.eat(",")
        e2 = parser.expr()
        parser.eat(")")
        comps = [e1, e2]
    else:
        comps = [parser.expr()]
    if parser.tok.kind != "end":
        parser.fail(f"unexpected {parser.tok.text!r}")
    try:
        if kind == "chart":
            obj = _build_chart(comps, n, lineno, col0)
        elif len(variables) == 1:
            obj = _build_1d(comps[0], n, lineno, col0)
            kind = "map1"
        else:
            jets = [_eval(c, lambda v: Jet2.x(n) if v == "x" else Jet2.y(n),
                          lambda c: Jet2.const(c, n)) for c in comps]
            obj = MapGerm(*jets) if kind == "map" else VFieldGerm(*jets)
    except JetError as exc:
        raise GermSyntaxError(str(exc), lineno, col0) from exc
    return GermDecl(kind, name, variables, obj, n, lineno)


def _build_1d(node: Node, n: int, lineno: int, col: int) -> Jet1:
    h = _eval(node, lambda v: Jet1.variable(n), lambda c: Jet1([c], n))
    if h[0]:
        raise GermSyntaxError("germ must vanish at the origin", lineno, col)
    if not h[1]:
        raise GermSyntaxError("zero linear part", lineno, col)
    return h


def _build_chart(comps: list[Node], n: int, lineno: int, col: int) -> SemiSeries:
    def leaf(v):
        if v == "x":
            return _ChartPoly({1: RatFunc(1)}, n)
        return _ChartPoly({0: RatFunc.poly(Poly1([0, 1]))}, n)

    def div(a, b, node):
        if set(b.cs) - {0} or not b.cs:
            raise GermSyntaxError("divisor must be a nonzero function of v alone", node.line, node.col)
        return a * _ChartPoly({0: 1 / b.cs[0]}, n)

    cx, cv = (_eval(c, leaf, lambda c: _ChartPoly({0: RatFunc(c)}, n), div) for c in comps)
    if cx.cs.get(0):
        raise GermSyntaxError("first component must vanish on x = 0", lineno, col)
    if cv.cs.get(0) != RatFunc.poly(Poly1([0, 1])):
        raise GermSyntaxError("second component must restrict to v on x = 0", lineno, col)
    a1 = cx.cs.get(1, RatFunc(0)) - 1
    xs = [a1] + [cx.cs.get(j, RatFunc(0)) for j in range(2, n + 1)]
    vs = [cv.cs.get(j, RatFunc(0)) for j in range(1, n + 1)]
    return SemiSeries(xs, vs, n)


# ---------------------------------------------------------------------------
# rendering


def render_decl(kind: str, name: str, obj: GermObject, order: int | None = None) -> str:
    if isinstance(obj, (MapGerm, VFieldGerm)):
        kw = "map" if isinstance(obj, MapGerm) else "field"
        return f"{kw} {name}(x,y) = ({render_jet2(obj.fx)}, {render_jet2(obj.fy)}) order {obj.order}"
    if isinstance(obj, Jet1):
        return f"map {name}(x) = {render_jet1(obj)} order {obj.order}"
    if isinstance(obj, SemiSeries):
        return f"chart {name}(x,v) = ({_render_chart(obj.x_series())}, {_render_chart(obj.v_delta(), lead='v')}) order {obj.order}"
    raise TypeError(f"cannot render {type(obj).__name__}")


def _render_chart(series: list, lead: str | None = None) -> str:
    parts = [lead] if lead else []
    for d, c in enumerate(series):
        if not c:
            continue
        mono = "" if d == 0 else ("x" if d == 1 else f"x^{d}")
        coef = render_ratfunc(c)
        if c == 1 and mono:
            parts.append(mono)
        else:
            if not re.fullmatch(r"[^()+\- ]+|\([^()]*\)", coef):
                coef = f"({coef})"
            body = coef + (f"*{mono}" if mono else "")
            parts.append(body)
    if not parts:
        return "0"
    return " + ".join(parts)


def render_document(doc: GermDocument) -> str:
    lines = [f"@{k} = {v}" for k, v in doc.metadata.items()]
    lines += [render_decl(d.kind, d.name, d.obj) for d in doc.decls]
    return "\n".join(lines) + "\n"


def parse_scalar(text: str) -> GaussianRational:
    """An exact scalar such as '3/7', '-1', '1+i' or '(1/2-2*i)'."""
    toks = tokenize(text.strip())
    p = _Parser(toks, (), allow_div=False)
    node = p.expr()
    if p.tok.kind != "end":
        p.fail(f"unexpected {p.tok.text!r}")
    return _eval(node, lambda v: None, lambda c: c)


def parse_complex(text: str) -> complex:
    """Exact scalar syntax or a Python float/complex literal."""
    try:
        return complex(parse_scalar(text))
    except GermSyntaxError:
        return complex(text.strip().replace("i", "j").replace(" ", ""))
