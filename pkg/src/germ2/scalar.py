"""Exact scalars: Gaussian rationals, polynomials and rational functions in v.

Everything here is exact; rational parts are ``gmpy2.mpq`` values, which are
arbitrary precision and always kept in lowest terms.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpq

_Q0 = mpq(0)
_Q1 = mpq(1)


class ScalarError(ValueError):
    """Raised on an invalid exact-arithmetic request."""


def _to_mpq(value) -> mpq:
    t = type(value)
    if t is type(_Q0):
        return value
    if t is int or t is bool:
        return mpq(value)
    if t is Fraction:
        return mpq(value.numerator, value.denominator)
    if t is str:
        return mpq(value)
    if t is float:
        raise ScalarError("non-rational literal: floats are not exact scalars")
    try:
        return mpq(value)
    except (TypeError, ValueError) as exc:
        raise ScalarError(f"cannot convert {value!r} to a rational") from exc


class GaussianRational:
    """Complex number ``re + im*i`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if type(re) is GaussianRational:
            if im:
                raise ScalarError("imaginary part given twice")
            self.re, self.im = re.re, re.im
            return
        self.re = _to_mpq(re)
        self.im = _to_mpq(im)

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if type(value) is cls:
            return value
        return cls(value)

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        if type(other) is not GaussianRational:
            try:
                other = GaussianRational(other)
            except ScalarError:
                return NotImplemented
        return _gr(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if type(other) is not GaussianRational:
            try:
                other = GaussianRational(other)
            except ScalarError:
                return NotImplemented
        return _gr(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussianRational(other) - self

    def __neg__(self):
        return _gr(-self.re, -self.im)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if type(other) is not GaussianRational:
            if type(other) is int:
                return _gr(self.re * other, self.im * other)
            try:
                other = GaussianRational(other)
            except ScalarError:
                return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return _gr(a * c, _Q0)
        return _gr(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return _gr(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if type(other) is int:
            if not other:
                raise ZeroDivisionError("division by zero Gaussian rational")
            return _gr(self.re / other, self.im / other)
        if type(other) is not GaussianRational:
            try:
                other = GaussianRational(other)
            except ScalarError:
                return NotImplemented
        if not other.im:
            if not other.re:
                raise ZeroDivisionError("division by zero Gaussian rational")
            return _gr(self.re / other.re, self.im / other.re)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return GaussianRational(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self) -> "GaussianRational":
        return _gr(self.re, -self.im)

    def norm(self) -> mpq:
        """Squared modulus re² + im²."""
        return self.re * self.re + self.im * self.im

    # comparison / conversion -----------------------------------------
    def __eq__(self, other):
        if type(other) is GaussianRational:
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)) or type(other) is type(_Q0):
            return not self.im and self.re == other
        if isinstance(other, complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self) -> bool:
        return not self.im

    def is_rational(self) -> bool:
        return not self.im

    def __repr__(self):
        return f"GaussianRational({self})"

    def __str__(self):
        return render_scalar(self)


def _gr(re, im) -> GaussianRational:
    obj = object.__new__(GaussianRational)
    obj.re = re
    obj.im = im
    return obj


ZERO = _gr(_Q0, _Q0)
ONE = _gr(_Q1, _Q0)
I = _gr(_Q0, _Q1)


def gr(value, im=0) -> GaussianRational:
    """Shorthand constructor: ``gr(1, 2)`` is 1+2i, ``gr("3/4")`` is 3/4."""
    if type(value) is GaussianRational and not im:
        return value
    return GaussianRational(value, im)


def _render_q(q: mpq) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def render_scalar(c: GaussianRational) -> str:
    """Canonical text: ``p/q``, ``r/s*i`` or ``p/q+r/s*i`` (signs in numerators)."""
    if not c.im:
        return _render_q(c.re)
    if c.im == 1:
        im = "i"
    elif c.im == -1:
        im = "-i"
    else:
        im = _render_q(c.im) + "*i"
    if not c.re:
        return im
    sep = "" if c.im < 0 else "+"
    return f"{_render_q(c.re)}{sep}{im}"


def render_term(c: GaussianRational, monomial: str, first: bool) -> str:
    """Render ``c*monomial`` as a signed summand; ``monomial`` may be empty."""
    negative = False
    if not c.im and c.re < 0:
        negative, c = True, -c
    elif not c.re and c.im < 0:
        negative, c = True, -c
    if monomial:
        if c == ONE:
            body = monomial
        elif not c.im or not c.re:
            body = f"{render_scalar(c)}*{monomial}"
        else:
            body = f"({render_scalar(c)})*{monomial}"
    else:
        body = render_scalar(c)
        if c.im and c.re:
            body = f"({body})"
    if first:
        return f"-{body}" if negative else body
    return f" - {body}" if negative else f" + {body}"


# ---------------------------------------------------------------------------
# univariate polynomials


class Poly1:
    """Dense polynomial in ``v`` with Gaussian-rational coefficients."""

    __slots__ = ("coeffs",)
    var = "v"

    def __init__(self, coeffs: Iterable = ()):
        cs = [gr(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def _raw(cls, cs: list) -> "Poly1":
        while cs and not cs[-1]:
            cs.pop()
        obj = object.__new__(cls)
        obj.coeffs = tuple(cs)
        return obj

    @classmethod
    def constant(cls, c) -> "Poly1":
        return cls([c])

    @classmethod
    def monomial(cls, degree: int, c=1) -> "Poly1":
        return cls([0] * degree + [c])

    @property
    def degree(self) -> int:
        """Index of the last nonzero coefficient; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def lead(self) -> GaussianRational:
        return self.coeffs[-1] if self.coeffs else ZERO

    def __getitem__(self, d: int) -> GaussianRational:
        return self.coeffs[d] if 0 <= d < len(self.coeffs) else ZERO

    def __eq__(self, other):
        if isinstance(other, Poly1):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, GaussianRational, Fraction)):
            return self == Poly1([other])
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        if not isinstance(other, Poly1):
            other = Poly1([other])
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        cs = list(a)
        for d, c in enumerate(b):
            cs[d] = cs[d] + c
        return Poly1._raw(cs)

    __radd__ = __add__

    def __neg__(self):
        return Poly1._raw([-c for c in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, Poly1):
            other = Poly1([other])
        return self + (-other)

    def __rsub__(self, other):
        return Poly1([other]) - self

    def __mul__(self, other):
        if not isinstance(other, Poly1):
            c = gr(other)
            if not c:
                return Poly1()
            return Poly1._raw([a * c for a in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly1()
        out = [ZERO] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if not ca:
                continue
            for j, cb in enumerate(b):
                if cb:
                    out[i + j] = out[i + j] + ca * cb
        return Poly1._raw(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ScalarError("negative power of a polynomial")
        result = Poly1([ONE])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other: "Poly1") -> tuple["Poly1", "Poly1"]:
        if not other.coeffs:
            raise ZeroDivisionError("division by zero polynomial")
        rem = list(self.coeffs)
        db = other.degree
        lead_inv = other.coeffs[-1].inverse()
        if len(rem) - 1 < db:
            return Poly1(), self
        quo = [ZERO] * (len(rem) - db)
        for d in range(len(rem) - 1, db - 1, -1):
            c = rem[d]
            if not c:
                continue
            f = c * lead_inv
            quo[d - db] = f
            for j, cb in enumerate(other.coeffs):
                rem[d - db + j] = rem[d - db + j] - f * cb
        return Poly1._raw(quo), Poly1._raw(rem[:db] if db > 0 else [])

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def exact_div(self, other: "Poly1") -> "Poly1":
        q, r = self.divmod(other)
        if r:
            raise ScalarError("polynomial division is not exact")
        return q

    def monic(self) -> "Poly1":
        if not self.coeffs:
            return self
        lead = self.coeffs[-1]
        if lead == ONE:
            return self
        inv = lead.inverse()
        return Poly1._raw([c * inv for c in self.coeffs])

    def derivative(self) -> "Poly1":
        return Poly1._raw([c * d for d, c in enumerate(self.coeffs)][1:])

    def __call__(self, point):
        """Horner evaluation; works for exact scalars and for complex floats."""
        if isinstance(point, (complex, float)):
            acc = 0j
            for c in reversed(self.coeffs):
                acc = acc * point + complex(c)
            return acc
        point = gr(point)
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * point + c
        return acc

    def taylor_shift(self, center) -> "Poly1":
        """Coefficients of ``p(center + t)`` as a polynomial in t."""
        center = gr(center)
        cs = list(self.coeffs)
        n = len(cs)
        for i in range(n):
            for j in range(n - 2, i - 1, -1):
                cs[j] = cs[j] + center * cs[j + 1]
        return Poly1._raw(cs)

    def compose(self, other: "Poly1") -> "Poly1":
        acc = Poly1()
        for c in reversed(self.coeffs):
            acc = acc * other + c
        return acc

    def reverse(self, degree: int) -> "Poly1":
        """``v^degree * p(1/v)``; requires degree >= self.degree."""
        if degree < self.degree:
            raise ScalarError("reversal degree below polynomial degree")
        cs = list(self.coeffs) + [ZERO] * (degree + 1 - len(self.coeffs))
        return Poly1(cs[::-1])

    def gcd(self, other: "Poly1") -> "Poly1":
        return poly_gcd(self, other)

    def complex_coeffs(self) -> list[complex]:
        return [complex(c) for c in self.coeffs]

    def __repr__(self):
        return f"Poly1({self})"

    def __str__(self):
        return render_poly1(self, self.var)


def render_poly1(p: Poly1, var: str = "v") -> str:
    if not p.coeffs:
        return "0"
    parts = []
    for d, c in enumerate(p.coeffs):
        if not c:
            continue
        mono = "" if d == 0 else (var if d == 1 else f"{var}^{d}")
        parts.append(render_term(c, mono, first=not parts))
    return "".join(parts)


def poly_gcd(a: Poly1, b: Poly1) -> Poly1:
    """Monic gcd by the Euclidean algorithm (gcd(0, 0) = 0)."""
    while b.coeffs:
        a, b = b, a.divmod(b)[1]
    return a.monic()


V = Poly1([0, 1])


# ---------------------------------------------------------------------------
# rational functions


class RatFunc:
    """Reduced quotient ``num/den`` of polynomials in v with monic ``den``."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if not isinstance(num, Poly1):
            num = Poly1([num])
        if den is None:
            den = _POLY_ONE
        elif not isinstance(den, Poly1):
            den = Poly1([den])
        r = normalize_ratfunc(num, den)
        self.num, self.den = r.num, r.den

    @classmethod
    def _raw(cls, num: Poly1, den: Poly1) -> "RatFunc":
        obj = object.__new__(cls)
        obj.num = num
        obj.den = den
        return obj

    @classmethod
    def poly(cls, p: Poly1) -> "RatFunc":
        return cls._raw(p, _POLY_ONE)

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def is_zero(self) -> bool:
        return not self.num.coeffs

    def __bool__(self):
        return bool(self.num.coeffs)

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        if isinstance(other, Poly1):
            return self.is_polynomial() and self.num == other
        if isinstance(other, (int, GaussianRational, Fraction)):
            return self.is_polynomial() and self.num == Poly1([other])
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        other = _as_ratfunc(other)
        if other is NotImplemented:
            return other
        if self.den.degree == 0 and other.den.degree == 0:
            return RatFunc._raw(self.num + other.num, _POLY_ONE)
        if self.den == other.den:
            return normalize_ratfunc(self.num + other.num, self.den)
        return normalize_ratfunc(self.num * other.den + other.num * self.den,
                                 self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc._raw(-self.num, self.den)

    def __sub__(self, other):
        other = _as_ratfunc(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return _as_ratfunc(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, GaussianRational)):
            c = gr(other)
            if not c:
                return RatFunc._raw(Poly1(), _POLY_ONE)
            return RatFunc._raw(self.num * c, self.den)
        other = _as_ratfunc(other)
        if other is NotImplemented:
            return other
        if self.den.degree == 0 and other.den.degree == 0:
            return RatFunc._raw(self.num * other.num, _POLY_ONE)
        return normalize_ratfunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, GaussianRational)):
            c = gr(other)
            return RatFunc._raw(self.num * c.inverse(), self.den)
        other = _as_ratfunc(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return normalize_ratfunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _as_ratfunc(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return RatFunc._raw(_POLY_ONE, _POLY_ONE) / (self ** (-n))
        return RatFunc._raw(self.num ** n, self.den ** n)

    def derivative(self) -> "RatFunc":
        if self.den.degree == 0:
            return RatFunc._raw(self.num.derivative(), _POLY_ONE)
        return normalize_ratfunc(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def __call__(self, point):
        """Evaluate at a non-pole point; poles are detected here, not stored."""
        d = self.den(point)
        if d == 0:
            raise ZeroDivisionError(f"rational function has a pole at {point}")
        return self.num(point) / d

    def __repr__(self):
        return f"RatFunc({self})"

    def __str__(self):
        return render_ratfunc(self)


_POLY_ONE = Poly1([1])


def _as_ratfunc(value):
    if isinstance(value, RatFunc):
        return value
    if isinstance(value, Poly1):
        return RatFunc._raw(value, _POLY_ONE)
    if isinstance(value, (int, GaussianRational, Fraction)):
        return RatFunc._raw(Poly1([value]), _POLY_ONE)
    return NotImplemented


def normalize_ratfunc(num: Poly1, den: Poly1) -> RatFunc:
    """Cancel the gcd and make the denominator monic."""
    if not den.coeffs:
        raise ZeroDivisionError("division by zero polynomial")
    if not num.coeffs:
        return RatFunc._raw(num, _POLY_ONE)
    if den.degree > 0:
        g = poly_gcd(num, den)
        if g.degree > 0:
            num = num.exact_div(g)
            den = den.exact_div(g)
    lead = den.coeffs[-1]
    if lead != ONE:
        inv = lead.inverse()
        num = num * inv
        den = den * inv
    return RatFunc._raw(num, den)


def render_ratfunc(f: RatFunc, var: str = "v") -> str:
    if f.den.degree == 0:
        return render_poly1(f.num, var)
    return f"({render_poly1(f.num, var)})/({render_poly1(f.den, var)})"


def lagrange_interpolate(points: Sequence[tuple]) -> Poly1:
    """Unique polynomial of degree < len(points) through the given nodes."""
    pts = [(gr(a), gr(b)) for a, b in points]
    xs = [a for a, _ in pts]
    if len(set(xs)) != len(xs):
        raise ScalarError("interpolation nodes not distinct")
    result = Poly1()
    for i, (xi, yi) in enumerate(pts):
        basis = Poly1([ONE])
        denom = ONE
        for j, xj in enumerate(xs):
            if j != i:
                basis = basis * Poly1([-xj, ONE])
                denom = denom * (xi - xj)
        result = result + basis * (yi / denom)
    return result


# ---------------------------------------------------------------------------
# exact roots in Q(i)


def squarefree_part(p: Poly1) -> Poly1:
    if p.degree <= 0:
        return p.monic()
    g = poly_gcd(p, p.derivative())
    return p.exact_div(g).monic()


def _denominator_lcm(p: Poly1) -> int:
    den = 1
    for c in p.coeffs:
        den = gmpy2.lcm(den, c.re.denominator)
        den = gmpy2.lcm(den, c.im.denominator)
    return int(den)


def rational_roots(p: Poly1) -> list[GaussianRational]:
    """All distinct roots of ``p`` that lie in Q(i), sorted deterministically.

    Candidates come from high-precision numeric roots of the square-free part,
    snapped to rationals whose denominators divide N(lead) of the integral
    form; every returned root is verified exactly.
    """
    import mpmath

    if p.degree < 1:
        return []
    sf = squarefree_part(p)
    roots: list[GaussianRational] = []
    # peel off the root 0 exactly
    while sf.degree >= 1 and not sf.coeffs[0]:
        roots.append(ZERO)
        sf = Poly1(sf.coeffs[1:])
    if sf.degree < 1:
        return _sorted_roots(roots)
    scale = _denominator_lcm(sf)
    ints = [c * scale for c in sf.coeffs]
    lead = ints[-1]
    bound = int(lead.norm())
    bits = max(64, 4 * bound.bit_length() + 8 * max(
        int(abs(c.re)).bit_length() + int(abs(c.im)).bit_length() for c in ints))
    dps = bits // 3 + 30
    with mpmath.workdps(dps):
        mp_coeffs = [mpmath.mpc(mpmath.mpf(int(c.re)), mpmath.mpf(int(c.im))) for c in reversed(ints)]
        try:
            approx = mpmath.polyroots(mp_coeffs, maxsteps=400, extraprec=2 * dps)
        except mpmath.libmp.NoConvergence:
            approx = mpmath.polyroots(mp_coeffs, maxsteps=2000, extraprec=4 * dps)
        for z in approx:
            cand = gr(_snap(z.real, bound), _snap(z.imag, bound))
            if not sf(cand) and cand not in roots:
                roots.append(cand)
    return _sorted_roots(roots)


def _snap(x, bound: int) -> Fraction:
    man, exp = x.man_exp  # man_exp drops the sign
    f = Fraction(man * 2 ** exp) if exp >= 0 else Fraction(man, 2 ** -exp)
    if x < 0:
        f = -f
    return f.limit_denominator(max(1, bound))


def _sorted_roots(roots: list[GaussianRational]) -> list[GaussianRational]:
    return sorted(roots, key=lambda c: (c.re, c.im))


class PLocal:
    """num / base^e with a fixed polynomial ``base``; e may be negative.

    Canonical when ``num`` is not divisible by ``base``.  Rational functions
    whose denominators are powers of base live here without any gcd work.
    """

    __slots__ = ("num", "e", "base")

    def __init__(self, num, e: int = 0, base: Poly1 | None = None):
        if not isinstance(num, Poly1):
            num = Poly1([num])
        if base is None or base.degree < 1:
            if base is not None and base.degree == 0 and e:
                num = num * (base.coeffs[0] ** -e)
            base = _POLY_ONE
            e = 0
        self.num, self.e, self.base = _plocal_reduce(num, e, base)

    @classmethod
    def _make(cls, num: Poly1, e: int, base: Poly1) -> "PLocal":
        obj = object.__new__(cls)
        obj.num, obj.e, obj.base = _plocal_reduce(num, e, base)
        return obj

    @classmethod
    def from_ratfunc(cls, f: RatFunc, base: Poly1) -> "PLocal":
        if f.den.degree == 0:
            return cls(f.num * f.den.coeffs[0].inverse(), 0, base)
        if base.degree < 1:
            raise ScalarError("denominator is not a power of the base")
        e = 0
        rest = f.den
        while rest.degree > 0:
            qt, rm = rest.divmod(base)
            if rm.coeffs:
                raise ScalarError("denominator is not a power of the base")
            rest = qt
            e += 1
        return cls(f.num * rest.coeffs[0].inverse(), e, base)

    def _lift(self, other) -> "PLocal":
        if isinstance(other, PLocal):
            return other
        if isinstance(other, (int, GaussianRational, Fraction)):
            return PLocal._make(Poly1([other]), 0, self.base)
        if isinstance(other, Poly1):
            return PLocal._make(other, 0, self.base)
        if isinstance(other, RatFunc):
            return PLocal.from_ratfunc(other, self.base)
        return NotImplemented

    def to_ratfunc(self) -> RatFunc:
        if self.e <= 0:
            return RatFunc.poly(self.num * self.base ** (-self.e))
        return normalize_ratfunc(self.num, self.base ** self.e)

    def __bool__(self):
        return bool(self.num.coeffs)

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.e == other.e

    def __hash__(self):
        return hash((self.num, self.e))

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if not other.num.coeffs:
            return self
        if not self.num.coeffs:
            return other
        e = max(self.e, other.e)
        a = self.num if self.e == e else self.num * self.base ** (e - self.e)
        b = other.num if other.e == e else other.num * self.base ** (e - other.e)
        return PLocal._make(a + b, e, self.base)

    __radd__ = __add__

    def __neg__(self):
        obj = object.__new__(PLocal)
        obj.num, obj.e, obj.base = -self.num, self.e, self.base
        return obj

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, GaussianRational, Fraction)):
            c = gr(other)
            obj = object.__new__(PLocal)
            obj.num, obj.e, obj.base = (self.num * c, self.e, self.base) if c else (Poly1(), 0, self.base)
            return obj
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return PLocal._make(self.num * other.num, self.e + other.e, self.base)

    __rmul__ = __mul__

    def __truediv__(self, other):
        """Division by a unit of the ring: c * base^m."""
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if other.num.degree != 0:
            raise ScalarError("division by a non-unit of the localized ring")
        return PLocal._make(self.num * other.num.coeffs[0].inverse(), self.e - other.e, self.base)

    def derivative(self) -> "PLocal":
        if self.e == 0:
            return PLocal._make(self.num.derivative(), 0, self.base)
        num = self.num.derivative() * self.base - self.num * self.base.derivative() * self.e
        return PLocal._make(num, self.e + 1, self.base)

    def __call__(self, point):
        return self.num(point) / self.base(point) ** self.e

    def __repr__(self):
        return f"PLocal({self})"

    def __str__(self):
        return str(self.to_ratfunc())


def _plocal_reduce(num: Poly1, e: int, base: Poly1):
    if not num.coeffs:
        return num, 0, base
    if base.degree < 1:
        return num, 0, base
    while num.degree >= base.degree:
        qt, rm = num.divmod(base)
        if rm.coeffs:
            break
        num = qt
        e -= 1
    return num, e, base
