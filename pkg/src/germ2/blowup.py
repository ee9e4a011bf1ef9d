"""Blow-up of tangent-to-identity germs into chart series, and the direction
data (p, r, characteristic directions) read off the leading homogeneous part.

In chart 1 the coordinates are (x, v) with y = v x; in chart 2 they are
(y, s) with x = s y.  A chart series is a truncated series in the first
coordinate whose coefficients are functions of the second.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Sequence

from .jets import Flatness, Jet2, MapGerm, flat_order
from .scalar import ONE, ZERO, GaussianRational, Poly1, RatFunc, gr, rational_roots, squarefree_part


class BlowupError(ValueError):
    pass


# ---------------------------------------------------------------------------
# series in x over a coefficient ring (RatFunc, Jet1, ...)


def _smul(a: Sequence, b: Sequence, n: int, zero) -> list:
    out = [zero] * (n + 1)
    for i, ca in enumerate(a[: n + 1]):
        if not ca:
            continue
        for j in range(n + 1 - i):
            cb = b[j] if j < len(b) else None
            if cb:
                out[i + j] = out[i + j] + ca * cb
    return out


def _srecip(a: Sequence, n: int, zero) -> list:
    """1/a for a series with a[0] invertible in the coefficient ring."""
    inv0 = 1 / a[0] if not isinstance(a[0], GaussianRational) else a[0].inverse()
    out = [inv0]
    for d in range(1, n + 1):
        s = zero
        for j in range(1, d + 1):
            if j < len(a) and a[j]:
                s = s + a[j] * out[d - j]
        out.append(-(s * inv0))
    return out


class SemiSeries:
    """(x, v) -> (x + sum a_j(v) x^j, v + sum b_j(v) x^j), j = 1..order.

    ``xcoeffs[j-1]`` is a_j and ``vcoeffs[j-1]`` is b_j.  Coefficients are
    elements of any commutative ring offering ``derivative()``; RatFunc in
    practice, or Jet1 when working locally around a point.
    """

    __slots__ = ("order", "xcoeffs", "vcoeffs", "zero")

    def __init__(self, xcoeffs: Sequence, vcoeffs: Sequence, order: int | None = None, zero=None):
        if order is None:
            order = max(len(xcoeffs), len(vcoeffs))
        if zero is None:
            zero = RatFunc(0)
        self.zero = zero
        self.order = order
        xs = list(xcoeffs)[:order] + [zero] * (order - len(xcoeffs))
        vs = list(vcoeffs)[:order] + [zero] * (order - len(vcoeffs))
        self.xcoeffs = tuple(xs)
        self.vcoeffs = tuple(vs)

    @classmethod
    def identity(cls, order: int, zero=None) -> "SemiSeries":
        return cls([], [], order, zero)

    def a(self, j: int):
        return self.xcoeffs[j - 1] if 1 <= j <= self.order else self.zero

    def b(self, j: int):
        return self.vcoeffs[j - 1] if 1 <= j <= self.order else self.zero

    def x_series(self) -> list:
        """Coefficients of x^0..x^order in the first component."""
        out = [self.zero] + list(self.xcoeffs)
        out[1] = out[1] + 1
        return out

    def v_delta(self) -> list:
        """Coefficients of x^0..x^order in v1 - v."""
        return [self.zero] + list(self.vcoeffs)

    def truncate(self, n: int) -> "SemiSeries":
        if n > self.order:
            raise BlowupError("cannot raise the x-order of a series")
        return SemiSeries(self.xcoeffs[:n], self.vcoeffs[:n], n, self.zero)

    def map_coeffs(self, fn: Callable) -> "SemiSeries":
        return SemiSeries([fn(c) for c in self.xcoeffs], [fn(c) for c in self.vcoeffs],
                          self.order, fn(self.zero))

    def __eq__(self, other):
        if not isinstance(other, SemiSeries):
            return NotImplemented
        return (self.order == other.order and self.xcoeffs == other.xcoeffs
                and self.vcoeffs == other.vcoeffs)

    def __hash__(self):
        return hash((self.order, self.xcoeffs, self.vcoeffs))

    def valuations(self) -> tuple[int | None, int | None]:
        """First j with a_j != 0 and first j with b_j != 0."""
        va = next((j for j in range(1, self.order + 1) if self.a(j)), None)
        vb = next((j for j in range(1, self.order + 1) if self.b(j)), None)
        return va, vb

    def is_identity(self) -> bool:
        return self.valuations() == (None, None)

    def compose(self, other: "SemiSeries") -> "SemiSeries":
        return compose_semi(self, other)

    def __matmul__(self, other: "SemiSeries") -> "SemiSeries":
        return compose_semi(self, other)

    def inverse(self) -> "SemiSeries":
        return invert_semi(self)

    def poles(self) -> list[Poly1]:
        """Distinct nonconstant monic denominators of RatFunc coefficients."""
        dens = []
        for c in self.xcoeffs + self.vcoeffs:
            if isinstance(c, RatFunc) and c.den.degree > 0 and c.den not in dens:
                dens.append(c.den)
        return dens

    def pole_points(self) -> list[GaussianRational]:
        pts: list[GaussianRational] = []
        for d in self.poles():
            for z in rational_roots(d):
                if z not in pts:
                    pts.append(z)
        return sorted(pts, key=lambda c: (c.re, c.im))

    def as_dict(self) -> dict:
        return {
            "order": self.order,
            "xcoeffs": [str(c) for c in self.xcoeffs],
            "vcoeffs": [str(c) for c in self.vcoeffs],
            "poles": [str(z) for z in self.pole_points()],
        }

    def __repr__(self):
        return f"SemiSeries(order={self.order}, a={[str(c) for c in self.xcoeffs]}, b={[str(c) for c in self.vcoeffs]})"


def _taylor_at_shift(c, delta: list, n: int, zero) -> list:
    """c(v + delta(x)) as a series in x, for delta with zero constant term."""
    out = [zero] * (n + 1)
    out[0] = c
    if not c:
        return out
    power = [zero] * (n + 1)
    power[0] = zero + 1
    deriv = c
    for m in range(1, n + 1):
        power = _smul(power, delta, n, zero)
        deriv = deriv.derivative()
        if not any(power) or not deriv:
            break
        scale = gr(Fraction(1, factorial(m)))
        dm = deriv * scale
        for d in range(m, n + 1):
            if power[d]:
                out[d] = out[d] + dm * power[d]
    return out


def _apply_series(coeffs: Sequence, X: list, delta: list, n: int, zero) -> list:
    """sum_j c_j(v + delta) X^j for j = 1..len(coeffs)."""
    total = [zero] * (n + 1)
    xp = [zero] * (n + 1)
    xp[0] = zero + 1
    for j in range(1, len(coeffs) + 1):
        xp = _smul(xp, X, n, zero)
        c = coeffs[j - 1]
        if not c:
            continue
        term = _smul(_taylor_at_shift(c, delta, n, zero), xp, n, zero)
        total = [a + b for a, b in zip(total, term)]
    return total


def compose_semi(S: SemiSeries, T: SemiSeries) -> SemiSeries:
    """S o T truncated at the common x-order."""
    n = min(S.order, T.order)
    zero = S.zero
    X = T.x_series()[: n + 1]
    D = T.v_delta()[: n + 1]
    if X[0] or D[0]:
        raise BlowupError("inner series must fix the divisor x = 0")
    ax = _apply_series(S.xcoeffs[:n], X, D, n, zero)
    bv = _apply_series(S.vcoeffs[:n], X, D, n, zero)
    new_x = [X[d] + ax[d] for d in range(n + 1)]
    new_v = [D[d] + bv[d] for d in range(n + 1)]
    new_x[1] = new_x[1] - 1
    return SemiSeries(new_x[1:], new_v[1:], n, zero)


def invert_semi(S: SemiSeries) -> SemiSeries:
    """Inverse by the fixed point T = id - P o T, P = S - id; needs a_1 = 0."""
    if S.a(1):
        raise BlowupError("series is not tangent to the identity in x")
    n = S.order
    zero = S.zero
    P = S
    T = SemiSeries.identity(n, zero)
    for _ in range(n + 1):
        X = T.x_series()
        D = T.v_delta()
        ax = _apply_series(P.xcoeffs, X, D, n, zero)
        bv = _apply_series(P.vcoeffs, X, D, n, zero)
        T = SemiSeries([-c for c in ax[1:]], [-c for c in bv[1:]], n, zero)
    return T


# ---------------------------------------------------------------------------
# charts


def _require_tangent(F: MapGerm) -> int:
    fo = flat_order(F)
    if fo is Flatness.NOT_TANGENT:
        raise BlowupError("germ is not tangent to the identity")
    if fo is Flatness.IDENTITY:
        return F.order + 1
    return fo


def _line_coeffs(f: Jet2, n: int) -> list[RatFunc]:
    """f(x, v x) = sum_d c_d(v) x^d for d = 0..n."""
    rows: list[list] = [[] for _ in range(n + 1)]
    for (i, j), c in f.coeffs.items():
        d = i + j
        if d <= n:
            rows[d].append((j, c))
    out = []
    for row in rows:
        if not row:
            out.append(RatFunc(0))
            continue
        deg = max(j for j, _ in row)
        cs = [ZERO] * (deg + 1)
        for j, c in row:
            cs[j] = c
        out.append(RatFunc.poly(Poly1(cs)))
    return out


def blowup_chart1(F: MapGerm) -> SemiSeries:
    """Chart (x, v), y = v x: x1 = F_x(x, vx), v1 = F_y(x, vx) / F_x(x, vx).

    Both components are kept to x-order N - 1, the precision of v1.
    """
    _require_tangent(F)
    N = F.order
    n = N - 1
    zero = RatFunc(0)
    X1 = _line_coeffs(F.fx, N)
    Y1 = _line_coeffs(F.fy, N)
    # x1/x and y1/x as series in x up to x^(N-1)
    xq = X1[1:]
    yq = Y1[1:]
    v1 = _smul(yq, _srecip(xq, n, zero), n, zero)
    vs = list(v1)
    vs[0] = vs[0] - RatFunc.poly(Poly1([0, 1]))
    if vs[0]:
        raise BlowupError("blow-up does not fix the divisor")
    xs = list(X1[: n + 1])
    xs[1] = xs[1] - 1
    return SemiSeries(xs[1:], vs[1:], n, zero)


def swap_germ(F: MapGerm) -> MapGerm:
    """Conjugate by (x, y) -> (y, x)."""
    def sw(f: Jet2) -> Jet2:
        return Jet2._raw({(j, i): c for (i, j), c in f.coeffs.items()}, f.order)
    return MapGerm(sw(F.fy), sw(F.fx), check=False)


def blowup_chart2(F: MapGerm) -> SemiSeries:
    """Chart (y, s), x = s y; series in y with coefficients in s."""
    return blowup_chart1(swap_germ(F))


def _subst_reciprocal(f: RatFunc) -> RatFunc:
    """f(1/s) as a rational function of s."""
    dn, dd = f.num.degree, f.den.degree
    if dn < 0:
        return f
    num = f.num.reverse(dn)
    den = f.den.reverse(dd)
    shift = dd - dn
    if shift >= 0:
        num = num * Poly1.monomial(shift)
    else:
        den = den * Poly1.monomial(-shift)
    return RatFunc(num, den)


def chart_transition(S: SemiSeries) -> SemiSeries:
    """Rewrite a chart-1 series in chart 2 through (y, s) = (v x, 1/v).

    Coefficients may only have poles at v = 0 (outside the overlap).
    """
    bad = [z for z in S.pole_points() if z]
    irrational = [d for d in S.poles() if squarefree_part(d).degree > len(rational_roots(d))]
    if bad or irrational:
        report = ", ".join([str(z) for z in bad] + [f"root of {d}" for d in irrational])
        raise BlowupError(f"coefficients have poles in the chart overlap: {report}")
    n = S.order
    zero = RatFunc(0)
    s = RatFunc.poly(Poly1([0, 1]))
    spow = [RatFunc(1)]
    for _ in range(n + 1):
        spow.append(spow[-1] * s)
    # x1 = sum A_j(v) x^j with x = s y, v = 1/s
    X1 = S.x_series()
    xs = [zero] + [_subst_reciprocal(X1[j]) * spow[j] for j in range(1, n + 1)]
    # v1 = 1/s + B(y), B_j = b_j(1/s) s^j
    B = [zero] + [_subst_reciprocal(S.b(j)) * spow[j] for j in range(1, n + 1)]
    # y1 = v1 x1 = x1/s + B x1 ; s1 = s / (1 + s B)
    inv_s = RatFunc(Poly1([1]), Poly1([0, 1]))
    y1 = [c * inv_s for c in xs]
    bx = _smul(B, xs, n, zero)
    y1 = [a + b for a, b in zip(y1, bx)]
    denom = [RatFunc(1)] + [c * s for c in B[1:]]
    s1 = [c * s for c in _srecip(denom, n, zero)]
    if y1[0] or s1[0] != s:
        raise BlowupError("transition does not fix the divisor")
    y1[1] = y1[1] - 1
    s1[0] = zero
    return SemiSeries(y1[1:], s1[1:], n, zero)


# ---------------------------------------------------------------------------
# direction data


class AllDirections(enum.Enum):
    ALL = "all directions characteristic"

    def __str__(self):
        return self.value


ALL_DIRECTIONS = AllDirections.ALL


@dataclass(frozen=True)
class DirectionData:
    k: int
    p: Poly1
    r: Poly1
    rational_roots: tuple[GaussianRational, ...]
    infinity_is_characteristic: bool
    unresolved_roots: int = 0

    @property
    def dicritic(self) -> bool:
        return self.r.is_zero()

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "p": str(self.p),
            "r": str(self.r),
            "rational_roots": [str(z) for z in self.rational_roots],
            "unresolved_roots": self.unresolved_roots,
            "infinity_is_characteristic": self.infinity_is_characteristic,
        }


def _restrict_x1(h: Jet2, d: int) -> Poly1:
    """h(1, v) for h homogeneous of degree d."""
    return Poly1([h[(d - j, j)] for j in range(d + 1)])


def direction_data(F: MapGerm) -> DirectionData:
    """p(v) = P(1, v), r(v) = Q(1, v) - v P(1, v) from the leading part (P, Q)."""
    fo = flat_order(F)
    if isinstance(fo, Flatness):
        raise BlowupError(f"no leading part: {fo}")
    k = fo - 1
    P, Q = F.homogeneous(fo)
    p = _restrict_x1(P, fo)
    r = _restrict_x1(Q, fo) - Poly1([0, 1]) * p
    if r.is_zero():
        return DirectionData(k, p, r, (), True, 0)
    roots = tuple(rational_roots(r))
    missing = squarefree_part(r).degree - len(roots)
    return DirectionData(k, p, r, roots, not P[(0, fo)], missing)


@dataclass(frozen=True)
class Direction:
    """Projective direction [u0 : u1] with F_{k+1}(V) = lam V."""

    point: tuple[GaussianRational, GaussianRational]
    lam: GaussianRational

    @property
    def degenerate(self) -> bool:
        return not self.lam

    def as_dict(self) -> dict:
        return {
            "direction": f"({self.point[0]}:{self.point[1]})",
            "lambda": str(self.lam),
            "degenerate": self.degenerate,
        }


def characteristic_directions(F: MapGerm) -> list[Direction] | AllDirections:
    data = direction_data(F)
    if data.dicritic:
        return ALL_DIRECTIONS
    out = [Direction((ONE, v0), data.p(v0)) for v0 in data.rational_roots]
    if data.infinity_is_characteristic:
        d = data.k + 1
        Q = F.fy.homogeneous(d)
        out.append(Direction((ZERO, ONE), Q[(0, d)]))
    return out
