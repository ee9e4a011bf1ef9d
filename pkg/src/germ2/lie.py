"""Exponential and logarithm of flat germs, brackets, commutators and
group-structure tests built on them."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .jets import (
    Flatness,
    Jet2,
    MapGerm,
    VFieldGerm,
    compose,
    flat_order,
    invert,
    mat_inverse,
    pushforward,
)
from .scalar import ONE, ZERO, GaussianRational, gr


class LieError(ValueError):
    pass


# ---------------------------------------------------------------------------
# brackets, exp, log


def lie_bracket(X: VFieldGerm, Y: VFieldGerm) -> VFieldGerm:
    """[X, Y] = (DY).X - (DX).Y, truncated at N-1."""
    X._check_order(Y)
    m = X.order - 1
    bx = X.apply(Y.fx) - Y.apply(X.fx)
    by = X.apply(Y.fy) - Y.apply(X.fy)
    return VFieldGerm(bx.truncate(m), by.truncate(m))


def _require_flat(X: VFieldGerm):
    for comp in X.components:
        if comp[(1, 0)] or comp[(0, 1)]:
            raise LieError("exp restricted to flat fields")


def exp_field(X: VFieldGerm) -> MapGerm:
    """Time-one flow of a field with no linear part, as a Lie series.

    Each application of X raises the valuation by at least one, so the sum
    sum_m X^m(id)/m! is finite at any truncation order.
    """
    _require_flat(X)
    n = X.order
    out = []
    for start in (Jet2.x(n), Jet2.y(n)):
        total = start
        term = start
        m = 1
        while True:
            term = X.apply(term) / m
            if term.is_zero():
                break
            total = total + term
            m += 1
        out.append(total)
    return MapGerm(out[0], out[1])


def _require_tangent(F: MapGerm) -> int | Flatness:
    fo = flat_order(F)
    if fo is Flatness.NOT_TANGENT:
        raise LieError("germ is not tangent to the identity")
    return fo


def log_diffeo(F: MapGerm) -> VFieldGerm:
    """The flat field Y with exp(Y) = F, found one degree at a time."""
    fo = _require_tangent(F)
    n = F.order
    Y = VFieldGerm.zero(n)
    if fo is Flatness.IDENTITY:
        return Y
    for d in range(fo, n + 1):
        E = exp_field(Y)
        rx = (F.fx - E.fx).homogeneous(d)
        ry = (F.fy - E.fy).homogeneous(d)
        if rx or ry:
            Y = VFieldGerm(Y.fx + rx, Y.fy + ry)
    return Y


def flow_power(F: MapGerm, t) -> MapGerm:
    """exp(t log F): the time-t map of the flow through F."""
    t = gr(t)
    return exp_field(log_diffeo(F) * t)


def group_commutator(F: MapGerm, G: MapGerm) -> MapGerm:
    """F o G o F^-1 o G^-1."""
    F._check_order(G)
    return compose(compose(F, G), compose(invert(F), invert(G)))


# ---------------------------------------------------------------------------
# finite groups and linearization


def germ_order(F: MapGerm, max_n: int) -> int | None:
    """Smallest n <= max_n with F^n = id to the truncation order, else None."""
    if max_n < 1:
        raise LieError("max_n must be at least 1")
    fo = flat_order(F)
    if fo is Flatness.IDENTITY:
        return 1
    if fo is not Flatness.NOT_TANGENT:
        # F^n = X + n F_j + ... never returns to the identity
        return None
    P = F
    for n in range(1, max_n + 1):
        if P.is_identity():
            return n
        P = compose(P, F)
    return None


def enumerate_group(generators: Sequence[MapGerm], max_group: int) -> list[MapGerm]:
    """Breadth-first closure of the generated group at the common order."""
    if not generators:
        raise LieError("no generators given")
    n = generators[0].order
    ident = MapGerm.identity(n)
    seen = {ident.key(): ident}
    queue = deque([ident])
    while queue:
        h = queue.popleft()
        for g in generators:
            prod = compose(g, h)
            key = prod.key()
            if key not in seen:
                seen[key] = prod
                if len(seen) > max_group:
                    raise LieError("group not finite within bound")
                queue.append(prod)
    return sorted(seen.values(), key=lambda m: repr(m.key()))


def average_linearizer(generators: Sequence[MapGerm], max_group: int) -> MapGerm:
    """g = (1/#H) sum_H H'(0)^-1 H over the finite group H.

    Then g o H = H'(0) g for every element, so g linearizes the group and is
    itself tangent to the identity.
    """
    group = enumerate_group(generators, max_group)
    n = group[0].order
    sx = Jet2.zero(n)
    sy = Jet2.zero(n)
    for h in group:
        a = mat_inverse(h.linear_part())
        sx = sx + h.fx * a[0][0] + h.fy * a[0][1]
        sy = sy + h.fx * a[1][0] + h.fy * a[1][1]
    w = gr(Fraction(1, len(group)))
    return MapGerm(sx * w, sy * w)


def is_linear(F: MapGerm) -> bool:
    return all(i + j == 1 for comp in F.components for (i, j) in comp.coeffs)


def is_invariant_field(F: MapGerm, X: VFieldGerm) -> bool:
    """True iff F_* X = X through order N-1."""
    return pushforward(F, X) == X.truncate(X.order - 1)


def linearize_radial(X: VFieldGerm) -> MapGerm:
    """Tangent-to-identity g with g_* X equal to the radial field.

    Uses [R, P_j] = (j-1) P_j: composing with id - P_j/(j-1) removes the
    degree-j defect without touching lower degrees.
    """
    n = X.order
    lin = ((X.fx[(1, 0)], X.fx[(0, 1)]), (X.fy[(1, 0)], X.fy[(0, 1)]))
    if lin != ((ONE, ZERO), (ZERO, ONE)):
        raise LieError("linear part of the field is not radial")
    g = MapGerm.identity(n)
    radial = VFieldGerm.radial(n).truncate(n - 1)
    for j in range(2, n):
        Y = pushforward(g, X)
        px = (Y.fx - radial.fx).homogeneous(j)
        py = (Y.fy - radial.fy).homogeneous(j)
        if not (px or py):
            continue
        c = gr(Fraction(-1, j - 1))
        step = MapGerm(Jet2.x(n) + px.with_order(n) * c, Jet2.y(n) + py.with_order(n) * c)
        g = compose(step, g)
    return g


# ---------------------------------------------------------------------------
# dicritic germs and abelian groups


@dataclass(frozen=True)
class DicriticInfo:
    dicritic: bool
    k: int
    f: Jet2 | None


def is_dicritic(F: MapGerm) -> DicriticInfo | Flatness:
    """Whether the leading part of F - id is f(X).X with f homogeneous."""
    fo = flat_order(F)
    if isinstance(fo, Flatness):
        return fo
    k = fo - 1
    P, Q = F.homogeneous(fo)
    return _dicritic_part(P, Q, k)


def _dicritic_part(P: Jet2, Q: Jet2, k: int) -> DicriticInfo:
    fp = P.divide_by_x()
    fq = Q.divide_by_y()
    if fp is None or fq is None or fp.coeffs != fq.coeffs:
        return DicriticInfo(False, k, None)
    return DicriticInfo(True, k, fp)


def _binary_form(h: Jet2, d: int) -> list[GaussianRational]:
    """Coefficients of x^(d-i) y^i, i = 0..d."""
    return [h[(d - i, i)] for i in range(d + 1)]


def det(matrix: Sequence[Sequence]) -> GaussianRational:
    """Exact determinant by Gaussian elimination."""
    m = [[gr(c) for c in row] for row in matrix]
    size = len(m)
    result = ONE
    for col in range(size):
        pivot = next((r for r in range(col, size) if m[r][col]), None)
        if pivot is None:
            return ZERO
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            result = -result
        pv = m[col][col]
        result = result * pv
        inv = pv.inverse()
        for r in range(col + 1, size):
            fac = m[r][col] * inv
            if fac:
                m[r] = [a - fac * b for a, b in zip(m[r], m[col])]
    return result


def homogeneous_resultant(a: list, b: list) -> GaussianRational:
    """Sylvester resultant of two binary forms given by coefficient lists."""
    da, db = len(a) - 1, len(b) - 1
    size = da + db
    if size == 0:
        return ONE
    rows = []
    for s in range(db):
        rows.append([ZERO] * s + list(a) + [ZERO] * (size - da - 1 - s))
    for s in range(da):
        rows.append([ZERO] * s + list(b) + [ZERO] * (size - db - 1 - s))
    return det(rows)


def genericity_resultant(F: MapGerm) -> GaussianRational:
    """Res(f, x q_{k+2} - y p_{k+2}) for the logarithm of a dicritic F."""
    info = is_dicritic(F)
    if not isinstance(info, DicriticInfo) or not info.dicritic:
        raise LieError("germ is not dicritic")
    k = info.k
    if F.order < k + 3:
        raise LieError("insufficient order for the genericity test")
    Y = log_diffeo(F)
    p2, q2 = Y.fx.homogeneous(k + 2), Y.fy.homogeneous(k + 2)
    n = F.order
    w = Jet2.x(n).mul_to(q2, n) - Jet2.y(n).mul_to(p2, n)
    return homogeneous_resultant(_binary_form(info.f, k), _binary_form(w, k + 3))


def abelian_structure(F: MapGerm, G: MapGerm) -> GaussianRational | None:
    """t with G = flow_power(F, t), or None if G commutes with F off the flow."""
    F._check_order(G)
    info = is_dicritic(F)
    if not isinstance(info, DicriticInfo) or not info.dicritic:
        raise LieError("first germ is not dicritic")
    if not genericity_resultant(F):
        raise LieError("genericity gcd condition fails")
    _require_tangent(G)
    if not group_commutator(F, G).is_identity():
        raise LieError("commuting hypothesis violated")
    if G.is_identity():
        return ZERO
    g = log_diffeo(G)
    lead = g.fx.homogeneous(info.k + 1)
    key, fc = next(iter(sorted(info.f.coeffs.items())))
    key = (key[0] + 1, key[1])
    t = lead[key] / fc
    if flow_power(F, t) != G:
        return None
    return t


# ---------------------------------------------------------------------------
# resonances and SL_A


@dataclass(frozen=True)
class ResonanceReport:
    relations: tuple[tuple[tuple[int, int], int], ...]
    search_bound: int
    eigenvalues: tuple[GaussianRational, GaussianRational] = field(default=(ONE, ONE))

    def as_dict(self) -> dict:
        return {
            "search_bound": self.search_bound,
            "eigenvalues": [str(c) for c in self.eigenvalues],
            "relations": [{"m": list(m), "j": j} for m, j in self.relations],
        }


def find_resonances(l1, l2, bound: int) -> ResonanceReport:
    """All (m, j) with 2 <= m1 + m2 <= bound and l1^m1 l2^m2 = l_j exactly."""
    l1, l2 = gr(l1), gr(l2)
    if not l1 or not l2:
        raise LieError("eigenvalues must be nonzero")
    if bound < 2:
        raise LieError("search bound must be at least 2")
    targets = (l1, l2)
    rels = []
    for total in range(2, bound + 1):
        for m1 in range(total, -1, -1):
            m2 = total - m1
            val = l1 ** m1 * l2 ** m2
            for j in (1, 2):
                if val == targets[j - 1]:
                    rels.append(((m1, m2), j))
    return ResonanceReport(tuple(rels), bound, (l1, l2))


def sla_membership(B: Sequence[Sequence[int]], lam: Sequence) -> bool:
    """Whether (B - I) lam is an integer vector, for B with det +-1."""
    n = len(B)
    if any(len(row) != n for row in B) or len(lam) != n:
        raise LieError("dimension mismatch")
    if any(not isinstance(b, int) for row in B for b in row):
        raise LieError("matrix entries must be integers")
    d = det(B)
    if d != 1 and d != -1:
        raise LieError("not in SL")
    lam = [gr(c) for c in lam]
    for r in range(n):
        s = ZERO
        for c in range(n):
            s = s + lam[c] * (B[r][c] - (r == c))
        if s.im or s.re.denominator != 1:
            return False
    return True
