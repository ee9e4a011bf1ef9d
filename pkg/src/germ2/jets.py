"""Truncated power series in one and two variables, and germs built on them.

A ``Jet2`` of order N stores the coefficients of x^i y^j with i + j <= N;
zero coefficients are never stored.  Binary operations on jets truncate at
the smaller order.  Germs (``MapGerm``/``VFieldGerm``) insist on equal orders.
"""
from __future__ import annotations

import enum
from typing import Iterable, Mapping

from .scalar import ONE, ZERO, GaussianRational, gr

Matrix2 = tuple[tuple[GaussianRational, GaussianRational], tuple[GaussianRational, GaussianRational]]


class JetError(ValueError):
    pass


class Flatness(enum.Enum):
    NOT_TANGENT = "not tangent to identity"
    IDENTITY = "identity to order N"

    def __str__(self):
        return self.value


# ---------------------------------------------------------------------------
# sparse kernels


def _by_degree(coeffs: Mapping) -> list[tuple[int, int, int, object]]:
    items = [(i + j, i, j, c) for (i, j), c in coeffs.items()]
    items.sort(key=lambda t: t[0])
    return items


def _mul(a: Mapping, b: Mapping, order: int) -> dict:
    if not a or not b:
        return {}
    la = _by_degree(a)
    lb = _by_degree(b)
    out: dict = {}
    get = out.get
    for da, ia, ja, ca in la:
        room = order - da
        if room < lb[0][0]:
            break
        for db, ib, jb, cb in lb:
            if db > room:
                break
            key = (ia + ib, ja + jb)
            prev = get(key)
            out[key] = ca * cb if prev is None else prev + ca * cb
    return {k: c for k, c in out.items() if c}


def _add(a: Mapping, b: Mapping, order: int, sign: int = 1) -> dict:
    out = {k: c for k, c in a.items() if k[0] + k[1] <= order}
    for k, c in b.items():
        if k[0] + k[1] > order:
            continue
        prev = out.get(k)
        if prev is None:
            out[k] = c if sign > 0 else -c
        else:
            s = prev + c if sign > 0 else prev - c
            if s:
                out[k] = s
            else:
                del out[k]
    return out


def _scale(a: Mapping, c) -> dict:
    if not c:
        return {}
    return {k: v * c for k, v in a.items()}


class Jet2:
    """Truncated series in x, y: coefficients keyed by exponent pairs."""

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs: Mapping | None = None, order: int = 12):
        if order < 0:
            raise JetError("truncation order must be nonnegative")
        self.order = order
        cs = {}
        for (i, j), c in (coeffs or {}).items():
            if i < 0 or j < 0:
                raise JetError("negative exponent in jet")
            if i + j > order:
                continue
            c = c if type(c) is GaussianRational else gr(c)
            if c:
                cs[(i, j)] = c
        self.coeffs = cs

    @classmethod
    def _raw(cls, coeffs: dict, order: int) -> "Jet2":
        obj = object.__new__(cls)
        obj.order = order
        obj.coeffs = coeffs
        return obj

    @classmethod
    def zero(cls, order: int) -> "Jet2":
        return cls._raw({}, order)

    @classmethod
    def const(cls, c, order: int) -> "Jet2":
        return cls({(0, 0): c}, order)

    @classmethod
    def x(cls, order: int) -> "Jet2":
        return cls._raw({(1, 0): ONE}, order)

    @classmethod
    def y(cls, order: int) -> "Jet2":
        return cls._raw({(0, 1): ONE}, order)

    def __getitem__(self, key: tuple[int, int]) -> GaussianRational:
        return self.coeffs.get(key, ZERO)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def valuation(self) -> int | None:
        """Lowest total degree present, or None for the zero jet."""
        if not self.coeffs:
            return None
        return min(i + j for i, j in self.coeffs)

    def degree(self) -> int:
        return max((i + j for i, j in self.coeffs), default=-1)

    def homogeneous(self, d: int) -> "Jet2":
        return Jet2._raw({k: c for k, c in self.coeffs.items() if k[0] + k[1] == d}, self.order)

    def truncate(self, n: int) -> "Jet2":
        return Jet2._raw({k: c for k, c in self.coeffs.items() if k[0] + k[1] <= n}, n)

    def with_order(self, n: int) -> "Jet2":
        """Reinterpret at order n (truncating if smaller)."""
        return self.truncate(n)

    def __eq__(self, other):
        if isinstance(other, Jet2):
            return self.order == other.order and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.order, frozenset(self.coeffs.items())))

    def same_terms(self, other: "Jet2") -> bool:
        """Coefficient equality up to the smaller of the two orders."""
        n = min(self.order, other.order)
        return self.truncate(n).coeffs == other.truncate(n).coeffs

    def __add__(self, other):
        if not isinstance(other, Jet2):
            other = Jet2.const(other, self.order)
        n = min(self.order, other.order)
        return Jet2._raw(_add(self.coeffs, other.coeffs, n), n)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Jet2):
            other = Jet2.const(other, self.order)
        n = min(self.order, other.order)
        return Jet2._raw(_add(self.coeffs, other.coeffs, n, -1), n)

    def __rsub__(self, other):
        return Jet2.const(other, self.order) - self

    def __neg__(self):
        return Jet2._raw({k: -c for k, c in self.coeffs.items()}, self.order)

    def __mul__(self, other):
        if isinstance(other, Jet2):
            n = min(self.order, other.order)
            return Jet2._raw(_mul(self.coeffs, other.coeffs, n), n)
        c = gr(other)
        return Jet2._raw(_scale(self.coeffs, c), self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = gr(other).inverse()
        return Jet2._raw(_scale(self.coeffs, c), self.order)

    def __pow__(self, n: int):
        result = Jet2.const(1, self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def mul_to(self, other: "Jet2", order: int) -> "Jet2":
        """Product kept to an explicit order (caller vouches for validity)."""
        return Jet2._raw(_mul(self.coeffs, other.coeffs, order), order)

    def dx(self) -> "Jet2":
        out = {(i - 1, j): c * i for (i, j), c in self.coeffs.items() if i}
        return Jet2._raw(out, max(self.order - 1, 0))

    def dy(self) -> "Jet2":
        out = {(i, j - 1): c * j for (i, j), c in self.coeffs.items() if j}
        return Jet2._raw(out, max(self.order - 1, 0))

    def divide_by_x(self) -> "Jet2 | None":
        """f/x if x divides f exactly, else None (order drops by one)."""
        if any(i == 0 for i, _ in self.coeffs):
            return None
        return Jet2._raw({(i - 1, j): c for (i, j), c in self.coeffs.items()}, max(self.order - 1, 0))

    def divide_by_y(self) -> "Jet2 | None":
        if any(j == 0 for _, j in self.coeffs):
            return None
        return Jet2._raw({(i, j - 1): c for (i, j), c in self.coeffs.items()}, max(self.order - 1, 0))

    def compose(self, gx: "Jet2", gy: "Jet2", order: int | None = None) -> "Jet2":
        """f(gx, gy) for gx, gy without constant term, truncated at ``order``."""
        n = min(self.order, gx.order, gy.order) if order is None else order
        return Jet2._raw(_compose(self.coeffs, gx.coeffs, gy.coeffs, n), n)

    def evaluate(self, x: complex, y: complex) -> complex:
        acc = 0j
        for (i, j), c in self.coeffs.items():
            acc += complex(c) * x ** i * y ** j
        return acc

    def restrict_line(self, slope_at: str = "x") -> dict[int, list]:
        """Group coefficients by total degree: {d: [(i, j, c), ...]}."""
        out: dict[int, list] = {}
        for (i, j), c in self.coeffs.items():
            out.setdefault(i + j, []).append((i, j, c))
        return out

    def __repr__(self):
        return f"Jet2({render_jet2(self)}, order={self.order})"

    def __str__(self):
        return render_jet2(self)


def _compose(f: Mapping, gx: Mapping, gy: Mapping, order: int) -> dict:
    if (0, 0) in gx or (0, 0) in gy:
        raise JetError("composition requires inner components without constant term")
    if not f:
        return {}
    rows: dict[int, dict[int, object]] = {}
    for (i, j), c in f.items():
        if i + j <= order:
            rows.setdefault(i, {})[j] = c
    if not rows:
        return {}
    max_j = max(j for r in rows.values() for j in r)
    ypow: list[dict] = [{(0, 0): ONE}]
    for j in range(1, max_j + 1):
        ypow.append(_mul(ypow[-1], gy, order - 0))
    imax = max(rows)
    acc: dict = {}
    for i in range(imax, -1, -1):
        room = order - i
        row = rows.get(i, {})
        s: dict = {}
        for j, c in row.items():
            for k, v in ypow[j].items():
                if k[0] + k[1] > room:
                    continue
                prev = s.get(k)
                s[k] = v * c if prev is None else prev + v * c
        if acc:
            acc = _mul(acc, gx, room)
            for k, v in s.items():
                prev = acc.get(k)
                acc[k] = v if prev is None else prev + v
        else:
            acc = s
        acc = {k: c for k, c in acc.items() if c}
    return acc


def _monomial(i: int, j: int) -> str:
    parts = []
    if i:
        parts.append("x" if i == 1 else f"x^{i}")
    if j:
        parts.append("y" if j == 1 else f"y^{j}")
    return "*".join(parts)


def render_jet2(f: Jet2) -> str:
    from .scalar import render_term

    if not f.coeffs:
        return "0"
    keys = sorted(f.coeffs, key=lambda k: (k[0] + k[1], -k[0]))
    out = []
    for k in keys:
        out.append(render_term(f.coeffs[k], _monomial(*k), first=not out))
    return "".join(out)


# ---------------------------------------------------------------------------
# one variable


class Jet1:
    """Truncated series in one variable, coefficients dense up to ``order``.

    Coefficients may be exact scalars or Python complex numbers; the class
    only needs ring operations from them.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs: Iterable = (), order: int = 12, exact: bool = True):
        cs = list(coeffs)[: order + 1]
        zero = ZERO if exact else 0j
        cs = [gr(c) if exact else complex(c) for c in cs]
        cs += [zero] * (order + 1 - len(cs))
        self.order = order
        self.coeffs = cs

    @classmethod
    def _raw(cls, cs: list, order: int) -> "Jet1":
        obj = object.__new__(cls)
        obj.order = order
        obj.coeffs = cs
        return obj

    @property
    def exact(self) -> bool:
        return not self.coeffs or type(self.coeffs[0]) is GaussianRational

    def _zero(self):
        return ZERO if self.exact else 0j

    def _scalar(self, c):
        return gr(c) if self.exact else complex(c)

    @classmethod
    def variable(cls, order: int) -> "Jet1":
        return cls([0, 1], order)

    def __getitem__(self, d: int):
        if 0 <= d <= self.order:
            return self.coeffs[d]
        return self._zero()

    def valuation(self) -> int | None:
        for d, c in enumerate(self.coeffs):
            if c:
                return d
        return None

    def is_zero(self) -> bool:
        return all(not c for c in self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def truncate(self, n: int) -> "Jet1":
        if n > self.order:
            raise JetError("cannot raise the order of a jet")
        return Jet1._raw(self.coeffs[: n + 1], n)

    def __eq__(self, other):
        if isinstance(other, Jet1):
            return self.order == other.order and all(a == b for a, b in zip(self.coeffs, other.coeffs))
        return NotImplemented

    def __hash__(self):
        return hash((self.order, tuple(self.coeffs)))

    def __add__(self, other):
        if not isinstance(other, Jet1):
            other = self._scalar(other)
            cs = list(self.coeffs)
            cs[0] = cs[0] + other
            return Jet1._raw(cs, self.order)
        n = min(self.order, other.order)
        return Jet1._raw([self.coeffs[d] + other.coeffs[d] for d in range(n + 1)], n)

    __radd__ = __add__

    def __neg__(self):
        return Jet1._raw([-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet1):
            other = self._scalar(other)
            return Jet1._raw([c * other for c in self.coeffs], self.order)
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        zero = self._zero()
        out = [zero] * (n + 1)
        for i in range(n + 1):
            ca = a[i]
            if not ca:
                continue
            for j in range(n + 1 - i):
                cb = b[j]
                if cb:
                    out[i + j] = out[i + j] + ca * cb
        return Jet1._raw(out, n)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet1):
            return self * other.reciprocal()
        other = self._scalar(other)
        return Jet1._raw([c / other for c in self.coeffs], self.order)

    def __pow__(self, n: int):
        result = Jet1._raw([self._zero() + 1] + [self._zero()] * self.order, self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def reciprocal(self) -> "Jet1":
        """Multiplicative inverse of a unit series."""
        a = self.coeffs
        if not a[0]:
            raise ZeroDivisionError("series with zero constant term is not a unit")
        inv0 = 1 / a[0] if not self.exact else a[0].inverse()
        out = [inv0]
        for d in range(1, self.order + 1):
            s = self._zero()
            for j in range(1, d + 1):
                if a[j]:
                    s = s + a[j] * out[d - j]
            out.append(-s * inv0)
        return Jet1._raw(out, self.order)

    def derivative(self) -> "Jet1":
        n = max(self.order - 1, 0)
        cs = [self.coeffs[d] * d for d in range(1, self.order + 1)] or [self._zero()]
        return Jet1._raw(cs[: n + 1], n)

    def shift_down(self, m: int) -> "Jet1":
        """f / t^m when the first m coefficients vanish; order drops by m."""
        if any(self.coeffs[:m]):
            raise JetError("series not divisible by the requested power")
        return Jet1._raw(self.coeffs[m:], self.order - m)

    def compose(self, g: "Jet1") -> "Jet1":
        """f(g) for g without constant term (Horner)."""
        if g.coeffs[0]:
            raise JetError("inner series must have zero constant term")
        n = min(self.order, g.order)
        acc = Jet1._raw([self._zero()] * (n + 1), n)
        for c in reversed(self.coeffs[: n + 1]):
            acc = acc * g
            acc.coeffs[0] = acc.coeffs[0] + c
        return acc

    def compositional_inverse(self) -> "Jet1":
        """g with f(g(t)) = t; requires f = a t + ... with a != 0."""
        a = self.coeffs[1] if self.order >= 1 else self._zero()
        if self.coeffs[0] or not a:
            raise JetError("compositional inverse needs f(0) = 0 and f'(0) != 0")
        n = self.order
        zero = self._zero()
        inv_a = a.inverse() if self.exact else 1 / a
        t = Jet1._raw([zero, zero + 1] + [zero] * (n - 1), n)
        # fixed point g = (t - P(g)) / a with P = f - a t; one degree per pass
        p = Jet1._raw([zero, zero] + self.coeffs[2:], n)
        g = t * inv_a
        for _ in range(n):
            g = (t - p.compose(g)) * inv_a
        return g

    def evaluate(self, t):
        acc = 0j if isinstance(t, complex) or not self.exact else ZERO
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def __repr__(self):
        return f"Jet1({render_jet1(self)}, order={self.order})"

    def __str__(self):
        return render_jet1(self)


def render_jet1(f: Jet1, var: str = "x") -> str:
    from .scalar import render_term

    if not f.exact:
        return " + ".join(f"({c})*{var}^{d}" for d, c in enumerate(f.coeffs) if c) or "0"
    out = []
    for d, c in enumerate(f.coeffs):
        if c:
            mono = "" if d == 0 else (var if d == 1 else f"{var}^{d}")
            out.append(render_term(c, mono, first=not out))
    return "".join(out) or "0"


# ---------------------------------------------------------------------------
# germs


def _det(m: Matrix2) -> GaussianRational:
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def mat_inverse(m: Matrix2) -> Matrix2:
    d = _det(m)
    if not d:
        raise JetError("singular linear part")
    inv = d.inverse()
    return ((m[1][1] * inv, -m[0][1] * inv), (-m[1][0] * inv, m[0][0] * inv))


def mat_mul(a: Matrix2, b: Matrix2) -> Matrix2:
    return tuple(
        tuple(a[r][0] * b[0][c] + a[r][1] * b[1][c] for c in range(2)) for r in range(2)
    )  # type: ignore[return-value]


class _Pair:
    """Shared plumbing for two-component germs."""

    __slots__ = ("fx", "fy")

    def __init__(self, fx: Jet2, fy: Jet2):
        if fx.order != fy.order:
            raise JetError("components must share one truncation order")
        if fx[(0, 0)] or fy[(0, 0)]:
            raise JetError("germ must vanish at the origin")
        self.fx = fx
        self.fy = fy

    @property
    def order(self) -> int:
        return self.fx.order

    @property
    def components(self) -> tuple[Jet2, Jet2]:
        return self.fx, self.fy

    def linear_part(self) -> Matrix2:
        fx, fy = self.fx, self.fy
        return ((fx[(1, 0)], fx[(0, 1)]), (fy[(1, 0)], fy[(0, 1)]))

    def homogeneous(self, d: int) -> tuple[Jet2, Jet2]:
        return self.fx.homogeneous(d), self.fy.homogeneous(d)

    def _check_order(self, other: "_Pair"):
        if self.order != other.order:
            raise JetError(f"mismatched truncation orders {self.order} and {other.order}")

    def __eq__(self, other):
        if type(other) is type(self):
            return self.fx == other.fx and self.fy == other.fy
        return NotImplemented

    def __hash__(self):
        return hash((type(self).__name__, self.fx, self.fy))

    def key(self) -> tuple:
        """Hashable canonical form (used for group enumeration)."""
        return (self.order, tuple(sorted(self.fx.coeffs.items())), tuple(sorted(self.fy.coeffs.items())))

    def evaluate(self, x: complex, y: complex) -> tuple[complex, complex]:
        return self.fx.evaluate(x, y), self.fy.evaluate(x, y)


class MapGerm(_Pair):
    """Diffeomorphism germ X -> (fx(X), fy(X)) with invertible linear part."""

    __slots__ = ()

    def __init__(self, fx: Jet2, fy: Jet2, check: bool = True):
        super().__init__(fx, fy)
        if check and not _det(self.linear_part()):
            raise JetError("linear part is not invertible")

    @classmethod
    def identity(cls, order: int) -> "MapGerm":
        return cls(Jet2.x(order), Jet2.y(order))

    @classmethod
    def linear(cls, m, order: int) -> "MapGerm":
        (a, b), (c, d) = m
        return cls(Jet2({(1, 0): a, (0, 1): b}, order), Jet2({(1, 0): c, (0, 1): d}, order))

    @classmethod
    def from_terms(cls, px: Mapping, py: Mapping, order: int) -> "MapGerm":
        return cls(Jet2(px, order), Jet2(py, order))

    def truncate(self, n: int) -> "MapGerm":
        return MapGerm(self.fx.truncate(n), self.fy.truncate(n), check=False)

    def is_identity(self) -> bool:
        return self == MapGerm.identity(self.order)

    def minus_identity(self) -> tuple[Jet2, Jet2]:
        n = self.order
        return self.fx - Jet2.x(n), self.fy - Jet2.y(n)

    def compose(self, other: "MapGerm") -> "MapGerm":
        return compose(self, other)

    def __matmul__(self, other: "MapGerm") -> "MapGerm":
        return compose(self, other)

    def inverse(self) -> "MapGerm":
        return invert(self)

    def __repr__(self):
        return f"MapGerm(({self.fx}, {self.fy}), order={self.order})"


class VFieldGerm(_Pair):
    """Vector field vx d/dx + vy d/dy vanishing at the origin."""

    __slots__ = ()

    @classmethod
    def zero(cls, order: int) -> "VFieldGerm":
        return cls(Jet2.zero(order), Jet2.zero(order))

    @classmethod
    def radial(cls, order: int) -> "VFieldGerm":
        """x d/dx + y d/dy."""
        return cls(Jet2.x(order), Jet2.y(order))

    @classmethod
    def from_terms(cls, px: Mapping, py: Mapping, order: int) -> "VFieldGerm":
        return cls(Jet2(px, order), Jet2(py, order))

    def truncate(self, n: int) -> "VFieldGerm":
        return VFieldGerm(self.fx.truncate(n), self.fy.truncate(n))

    def is_zero(self) -> bool:
        return self.fx.is_zero() and self.fy.is_zero()

    def __add__(self, other: "VFieldGerm") -> "VFieldGerm":
        self._check_order(other)
        return VFieldGerm(self.fx + other.fx, self.fy + other.fy)

    def __sub__(self, other: "VFieldGerm") -> "VFieldGerm":
        self._check_order(other)
        return VFieldGerm(self.fx - other.fx, self.fy - other.fy)

    def __neg__(self) -> "VFieldGerm":
        return VFieldGerm(-self.fx, -self.fy)

    def __mul__(self, c) -> "VFieldGerm":
        return VFieldGerm(self.fx * c, self.fy * c)

    __rmul__ = __mul__

    def valuation(self) -> int | None:
        vals = [v for v in (self.fx.valuation(), self.fy.valuation()) if v is not None]
        return min(vals) if vals else None

    def apply(self, phi: Jet2) -> Jet2:
        """Directional derivative X(phi) = vx * dphi/dx + vy * dphi/dy.

        Kept at the field's order: the derivative loses one order but the
        field has no constant term, so the product is exact to order N.
        """
        n = self.order
        return self.fx.mul_to(phi.dx(), n) + self.fy.mul_to(phi.dy(), n)

    def __repr__(self):
        return f"VFieldGerm(({self.fx}, {self.fy}), order={self.order})"


# ---------------------------------------------------------------------------
# operations


def compose(F: MapGerm, G: MapGerm) -> MapGerm:
    """F o G truncated at the common order."""
    F._check_order(G)
    n = F.order
    gx, gy = G.fx.coeffs, G.fy.coeffs
    return MapGerm(
        Jet2._raw(_compose(F.fx.coeffs, gx, gy, n), n),
        Jet2._raw(_compose(F.fy.coeffs, gx, gy, n), n),
        check=False,
    )


def _apply_matrix(m: Matrix2, u: dict, w: dict, n: int) -> tuple[dict, dict]:
    return (_add(_scale(u, m[0][0]), _scale(w, m[0][1]), n),
            _add(_scale(u, m[1][0]), _scale(w, m[1][1]), n))


def invert(F: MapGerm) -> MapGerm:
    """Compositional inverse, exact to the germ's order.

    Writing F = A X + P(X), the inverse solves G = A^{-1}(X - P(G)); each
    pass fixes one more degree, so pass d only needs order d.
    """
    n = F.order
    A = F.linear_part()
    Ainv = mat_inverse(A)
    px = {k: c for k, c in F.fx.coeffs.items() if k[0] + k[1] >= 2}
    py = {k: c for k, c in F.fy.coeffs.items() if k[0] + k[1] >= 2}
    gx = {k: c for k, c in ((((1, 0), Ainv[0][0]), ((0, 1), Ainv[0][1]))) if c}
    gy = {k: c for k, c in ((((1, 0), Ainv[1][0]), ((0, 1), Ainv[1][1]))) if c}
    if px or py:
        for d in range(2, n + 1):
            qx = _compose(px, gx, gy, d)
            qy = _compose(py, gx, gy, d)
            rx, ry = _apply_matrix(Ainv, qx, qy, d)
            lin_x = {k: c for k, c in gx.items() if k[0] + k[1] == 1}
            lin_y = {k: c for k, c in gy.items() if k[0] + k[1] == 1}
            gx = _add(lin_x, rx, d, -1)
            gy = _add(lin_y, ry, d, -1)
    return MapGerm(Jet2._raw(gx, n), Jet2._raw(gy, n))


def jacobian(F: _Pair) -> tuple[tuple[Jet2, Jet2], tuple[Jet2, Jet2]]:
    """Matrix of partial derivatives, each entry at order N-1."""
    return ((F.fx.dx(), F.fx.dy()), (F.fy.dx(), F.fy.dy()))


def pushforward(F: MapGerm, X: VFieldGerm) -> VFieldGerm:
    """(F_* X)(p) = DF(F^{-1} p) . X(F^{-1} p), truncated at N-1."""
    F._check_order(X)
    n = F.order
    m = n - 1
    Finv = invert(F)
    gx, gy = Finv.fx.coeffs, Finv.fy.coeffs
    J = jacobian(F)
    Jc = [[Jet2._raw(_compose(J[r][c].coeffs, gx, gy, m), m) for c in range(2)] for r in range(2)]
    Xx = Jet2._raw(_compose(X.fx.coeffs, gx, gy, m), m)
    Xy = Jet2._raw(_compose(X.fy.coeffs, gx, gy, m), m)
    return VFieldGerm(Jc[0][0] * Xx + Jc[0][1] * Xy, Jc[1][0] * Xx + Jc[1][1] * Xy)


def flat_order(F: MapGerm) -> int | Flatness:
    """Smallest j >= 2 with a nonzero degree-j term in F - id."""
    A = F.linear_part()
    if A != ((ONE, ZERO), (ZERO, ONE)):
        return Flatness.NOT_TANGENT
    dx, dy = F.minus_identity()
    vals = [v for v in (dx.valuation(), dy.valuation()) if v is not None]
    if not vals:
        return Flatness.IDENTITY
    return min(vals)


def field_flat_order(X: VFieldGerm) -> int | None:
    return X.valuation()
