"""Formal invariants from the homological equation in the blow-up chart.

A conjugation step at level l uses H = (x + x^(l+1) h1(v), v + x^l h2(v)).
For a chart series (x + x^(k+1) p + ..., v + x^k r + ...) the conjugate
H^-1 o S o H changes the coefficient of x^(k+l+1) in the first component by

    (k - l) p h1 + p' h2 - r h1'

and the coefficient of x^(k+l) in the second component by

    k r h1 + (r' - l p) h2 - r h2'.

Lower coefficients are untouched.  Every step below is followed by an exact
check that the targeted coefficients took the intended values.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .blowup import SemiSeries, blowup_chart1, compose_semi, invert_semi
from .jets import Jet1, MapGerm
from .scalar import (
    ONE,
    ZERO,
    GaussianRational,
    PLocal,
    Poly1,
    RatFunc,
    ScalarError,
    gr,
    lagrange_interpolate,
    rational_roots,
    squarefree_part,
)


class NormalFormError(ValueError):
    pass


def _rf(c) -> RatFunc:
    if isinstance(c, RatFunc):
        return c
    if isinstance(c, Poly1):
        return RatFunc.poly(c)
    return RatFunc(gr(c))


def conjugate_step(S: SemiSeries, l: int, h1, h2) -> SemiSeries:
    """H^-1 o S o H for H = (x + x^(l+1) h1, v + x^l h2)."""
    n = S.order
    zero = S.zero
    xs = [zero] * n
    vs = [zero] * n
    if l + 1 <= n:
        xs[l] = h1
    if l <= n:
        vs[l - 1] = h2
    H = SemiSeries(xs, vs, n, zero)
    return compose_semi(invert_semi(H), compose_semi(S, H))


# ---------------------------------------------------------------------------
# dicritic case


def _solve_dicritic(k: int, l: int, p, dp, phi1, phi2):
    h2 = phi2 / (p * (-l))
    h1 = (phi1 - dp * h2) / (p * (k - l))
    if p * (k - l) * h1 + dp * h2 != phi1 or p * (-l) * h2 != phi2:
        raise NormalFormError("homological residual is nonzero")
    return h1, h2


def solve_homological_dicritic(k: int, l: int, p, phi1, phi2) -> tuple[RatFunc, RatFunc]:
    """Solve (k-l) p h1 + p' h2 = phi1, -l p h2 = phi2 for (h1, h2)."""
    if l == k:
        raise NormalFormError("resonant step, use dicritic_normal_form")
    if l < 1:
        raise NormalFormError("step index must be positive")
    p = _rf(p)
    if not p:
        raise NormalFormError("p must be nonzero")
    return _solve_dicritic(k, l, p, p.derivative(), _rf(phi1), _rf(phi2))


@dataclass
class DicriticNormalForm:
    k: int
    p: Poly1
    q: RatFunc
    steps: list[tuple[int, RatFunc, RatFunc]]
    order: int
    normalized: SemiSeries | None = None

    def q_parts(self) -> tuple[Poly1, int]:
        """(s, e) with q = s / p^e and e = 2k+1."""
        e = 2 * self.k + 1
        s = self.q * RatFunc.poly(self.p) ** e
        if not s.is_polynomial():
            raise NormalFormError("denominator of q does not divide p^(2k+1)")
        return s.num, e

    def bounds_hold(self) -> bool:
        try:
            s, _ = self.q_parts()
        except NormalFormError:
            return False
        return s.degree <= 2 * self.k + 2 + 2 * self.k * self.p.degree

    def as_dict(self) -> dict:
        s, e = self.q_parts()
        return {
            "k": self.k,
            "p": str(self.p),
            "q": str(self.q),
            "s": str(s),
            "p_power": e,
            "order": self.order,
            "steps": [{"l": l, "h1": str(h1), "h2": str(h2)} for l, h1, h2 in self.steps],
        }


def _dicritic_chart(src) -> tuple[SemiSeries, int, RatFunc]:
    S = blowup_chart1(src) if isinstance(src, MapGerm) else src
    va, vb = S.valuations()
    if va is None:
        raise NormalFormError("series has no leading term")
    k = va - 1
    if k < 1:
        raise NormalFormError("series is not tangent to the identity")
    if vb is not None and vb <= k:
        raise NormalFormError("input is not dicritic")
    p = S.a(k + 1)
    if not p.is_polynomial():
        raise NormalFormError("leading coefficient must be polynomial")
    return S, k, p


def dicritic_normal_form(src, order: int | None = None, free_h1=0) -> DicriticNormalForm:
    """Reduce a dicritic germ (or chart series) to (x + x^(k+1) p + x^(2k+1) q, v).

    ``free_h1`` is the unconstrained first component at the resonant step;
    q does not depend on it.
    """
    S, k, p = _dicritic_chart(src)
    n = 2 * k + 1 if order is None else order
    if n < 2 * k + 1:
        raise NormalFormError("working x-order must be at least 2k+1")
    if S.order < n:
        raise NormalFormError(f"insufficient x-order: need {n}, have {S.order}")
    # every denominator that can arise is a power of p
    base = p.num
    try:
        S = S.truncate(n).map_coeffs(lambda c: PLocal.from_ratfunc(_rf(c), base))
    except ScalarError as exc:
        raise NormalFormError("chart coefficients must have denominators dividing a power of p") from exc
    pl = PLocal(base, 0, base)
    dp = pl.derivative()
    steps = []
    q = None
    for l in range(1, n - k + 1):
        D1 = S.a(k + l + 1)
        D2 = S.b(k + l)
        if l == k:
            h2 = D2 / (pl * k)
            h1 = PLocal.from_ratfunc(_rf(free_h1), base)
            q = D1 + dp * h2
            target = q
        else:
            h1, h2 = _solve_dicritic(k, l, pl, dp, -D1, -D2)
            if k + l + 1 > n:
                h1 = S.zero
            target = S.zero
        if h1 or h2:
            S = conjugate_step(S, l, h1, h2)
        if S.b(k + l) or (k + l + 1 <= n and S.a(k + l + 1) != target):
            raise NormalFormError(f"homological residual is nonzero at step {l}")
        steps.append((l, h1.to_ratfunc(), h2.to_ratfunc()))
    normalized = S.map_coeffs(lambda c: c.to_ratfunc())
    return DicriticNormalForm(k, base, q.to_ratfunc(), steps, n, normalized)


# ---------------------------------------------------------------------------
# non-dicritic case: local invariant at a characteristic root


def _local_jet(c, v0, order: int, exact: bool) -> Jet1:
    """Taylor expansion of a rational function at v0 in t = v - v0."""
    c = _rf(c)
    if exact:
        num = c.num.taylor_shift(v0)
        den = c.den.taylor_shift(v0)
        jn = Jet1(num.coeffs, order)
        jd = Jet1(den.coeffs, order)
    else:
        jn = Jet1(_shift_complex(c.num, v0), order, exact=False)
        jd = Jet1(_shift_complex(c.den, v0), order, exact=False)
    if jd.coeffs[0] == 0:
        raise NormalFormError("coefficient has a pole at the root")
    return jn * jd.reciprocal()


def _shift_complex(p: Poly1, v0: complex) -> list[complex]:
    cs = [complex(c) for c in p.coeffs]
    n = len(cs)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            cs[j] = cs[j] + v0 * cs[j + 1]
    return cs


@dataclass
class LocalInvariant:
    v0: object
    lam: object
    a: object
    mode: str
    k: int
    vorder: int
    root_residual: float = 0.0
    rational_distance: float | None = None
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        def fmt(z):
            if isinstance(z, GaussianRational):
                return str(z)
            z = complex(z)
            return [z.real, z.imag]
        out = {
            "mode": self.mode,
            "k": self.k,
            "v0": fmt(self.v0),
            "lambda": fmt(self.lam),
            "a": fmt(self.a),
            "vorder": self.vorder,
        }
        if self.mode == "numeric":
            out["root_residual"] = self.root_residual
            out["rational_distance"] = self.rational_distance
        return out


def _nondicritic_chart(src) -> tuple[SemiSeries, int, RatFunc, RatFunc]:
    S = blowup_chart1(src) if isinstance(src, MapGerm) else src
    va, vb = S.valuations()
    if vb is None or va is None:
        raise NormalFormError("series is dicritic or trivial; r vanishes")
    k = vb
    if va <= k:
        raise NormalFormError("first component has terms below x^(k+1)")
    return S, k, S.a(k + 1), S.b(k)


def _nearest_rational_distance(a: complex, max_den: int = 64) -> float:
    """Distance from a to the nearest rational with denominator <= max_den."""
    re = Fraction(a.real).limit_denominator(max_den)
    return abs(complex(a.real - float(re), a.imag))


def lambda_invariant(src, v0, vorder: int = 4, numeric: bool = False,
                     tolerance: float = 1e-9) -> LocalInvariant:
    """Constant left at x^(2k+1) after reducing the series near the root v0.

    Coefficients are expanded in t = v - v0.  At level l the equation for
    h = (h1, h2) is M(t) h - r(t) h' = -D(t) with
    M = [[(k-l) p, p'], [k r, r' - l p]]; degree by degree in t this is
    (j r1 - M0) h_j = D_j + sum_{i>=1} M_i h_{j-i} - sum_{i>=2} r_i (j-i+1) h_{j-i+1}.
    Its only singular instance is l = k, j = 0, where the first row fixes lambda.
    """
    S, k, p, r = _nondicritic_chart(src)
    n = 2 * k + 1
    if S.order < n:
        raise NormalFormError(f"insufficient x-order: need {n}, have {S.order}")
    S = S.truncate(n)
    if not p.is_polynomial() or not r.is_polynomial():
        raise NormalFormError("leading coefficients must be polynomial")
    exact = not numeric
    dr = r.derivative()
    if exact:
        v0 = gr(v0)
        if r(v0):
            raise NormalFormError("v0 is not a root of r")
        r1 = dr(v0)
        if not r1:
            raise NormalFormError("non-simple root")
        p0 = p(v0)
        a = p0 / r1
        if a.is_real():
            raise NormalFormError("resonant ratio, p(v0)/r'(v0) is rational")
        residual, dist = 0.0, None
    else:
        v0 = complex(v0)
        residual = abs(complex(r.num(v0)))
        r1 = complex(dr.num(v0))
        scale = 1 + max(abs(complex(c)) for c in r.num.coeffs)
        if residual > 1e-8 * scale:
            raise NormalFormError("v0 is not a root of r")
        if abs(r1) < 1e-8 * scale:
            raise NormalFormError("non-simple root")
        p0 = complex(p.num(v0))
        a = p0 / r1
        dist = _nearest_rational_distance(a)
        if dist < tolerance:
            raise NormalFormError("resonant ratio, p(v0)/r'(v0) is numerically rational")
    # each conjugation costs a bounded number of t-derivatives per coefficient
    work = vorder + 2 * k * (n + 1)
    zero = Jet1([], work, exact=exact)
    T = SemiSeries([_local_jet(c, v0, work, exact) for c in S.xcoeffs],
                   [_local_jet(c, v0, work, exact) for c in S.vcoeffs], n, zero)
    pj = _local_jet(p, v0, work, exact)
    dpj = _local_jet(p.derivative(), v0, work, exact)
    rj = _local_jet(r, v0, work, exact)
    drj = _local_jet(dr, v0, work, exact)
    lam = None
    for l in range(1, k + 1):
        D1 = T.a(k + l + 1)
        D2 = T.b(k + l)
        M = ((pj * (k - l), dpj), (rj * k, drj - pj * l))
        h1, h2, const = _solve_local(M, rj, D1, D2, k, l, exact, tolerance)
        if l == k:
            lam = const
        T = conjugate_step(T, l, h1, h2)
        _check_local(T, k, l, lam if l == k else None, exact, tolerance)
    final = T.a(2 * k + 1)
    if final.order < vorder:
        raise NormalFormError("internal precision exhausted; lower vorder")
    return LocalInvariant(v0, lam, a, "exact" if exact else "numeric", k, vorder,
                          residual, dist)


def _solve_local(M, rj: Jet1, D1: Jet1, D2: Jet1, k: int, l: int, exact: bool, tol: float):
    m = min(D1.order, D2.order, rj.order, *(e.order for row in M for e in row))
    zero = ZERO if exact else 0j
    h1 = [zero] * (m + 1)
    h2 = [zero] * (m + 1)
    r1 = rj[1]
    dp0 = M[0][1][0]
    d11 = M[0][0][0]
    d22 = M[1][1][0]
    const = None
    for j in range(m + 1):
        rhs1 = D1[j]
        rhs2 = D2[j]
        for i in range(1, j + 1):
            rhs1 = rhs1 + M[0][0][i] * h1[j - i] + M[0][1][i] * h2[j - i]
            rhs2 = rhs2 + M[1][0][i] * h1[j - i] + M[1][1][i] * h2[j - i]
        for i in range(2, j + 2):
            if rj[i]:
                rhs1 = rhs1 - rj[i] * (j - i + 1) * h1[j - i + 1]
                rhs2 = rhs2 - rj[i] * (j - i + 1) * h2[j - i + 1]
        diag2 = r1 * j - d22
        if _is_zero(diag2, exact, tol):
            raise NormalFormError(f"singular homological system at t-degree {j}")
        h2[j] = rhs2 / diag2
        diag1 = r1 * j - d11
        if l == k and j == 0:
            # row reads -p'(v0) h2_0 = D1_0 - lambda
            const = rhs1 + dp0 * h2[0]
            h1[0] = zero
            continue
        if _is_zero(diag1, exact, tol):
            raise NormalFormError(f"singular homological system at t-degree {j}")
        h1[j] = (rhs1 + dp0 * h2[j]) / diag1
    return Jet1._raw(h1, m), Jet1._raw(h2, m), const


def _is_zero(z, exact: bool, tol: float) -> bool:
    return (not z) if exact else abs(z) < tol


def _check_local(T: SemiSeries, k: int, l: int, lam, exact: bool, tol: float):
    b = T.b(k + l)
    a = T.a(k + l + 1)
    if lam is not None:
        a = a - lam
    if exact:
        bad = any(b.coeffs) or any(a.coeffs)
    else:
        bad = max((abs(c) for c in b.coeffs + a.coeffs), default=0.0) > 1e-6
    if bad:
        raise NormalFormError(f"homological residual is nonzero at step {l}")


def lagrange_LF(src, vorder: int = 4, numeric: bool = False):
    """Interpolation polynomial through (v_i, lambda_{v_i}) over the k+2 roots of r."""
    S, k, p, r = _nondicritic_chart(src)
    rp = r.num
    need = k + 2
    if squarefree_part(rp).degree != rp.degree or rp.degree < need:
        raise NormalFormError("degenerate r, L_F undefined")
    roots = rational_roots(rp)
    if len(roots) >= need and not numeric:
        pts = [(v, lambda_invariant(S, v, vorder).lam) for v in roots[:need]]
        return lagrange_interpolate(pts)
    if not numeric:
        raise NormalFormError("degenerate r, L_F undefined (roots leave Q(i); enable numeric roots)")
    from .dynamics import numeric_roots

    zs = numeric_roots(rp)
    pts = [(z, complex(lambda_invariant(S, z, vorder, numeric=True).lam)) for z in zs[:need]]
    return _lagrange_complex(pts)


def _lagrange_complex(pts: Sequence[tuple[complex, complex]]) -> list[complex]:
    import numpy as np

    xs = np.array([z for z, _ in pts], dtype=complex)
    ys = np.array([w for _, w in pts], dtype=complex)
    V = np.vander(xs, increasing=True)
    return [complex(c) for c in np.linalg.solve(V, ys)]


# ---------------------------------------------------------------------------
# one variable


def _tangent_1d(h: Jet1) -> tuple[int, GaussianRational]:
    if h[0] or h[1] != ONE:
        raise NormalFormError("germ is not tangent to the identity")
    for d in range(2, h.order + 1):
        if h[d]:
            return d - 1, h[d]
    raise NormalFormError("germ is the identity to the truncation order")


def residue_1d(h: Jet1) -> tuple[int, GaussianRational]:
    """(k, c): c is the x^-1 coefficient of 1/(h(x) - x)."""
    k, _ = _tangent_1d(h)
    if h.order < 2 * k + 1:
        raise NormalFormError("insufficient order")
    u = (h - Jet1.variable(h.order)).shift_down(k + 1)
    return k, u.reciprocal()[k]


def normal_form_1d(h: Jet1) -> tuple[int, GaussianRational, GaussianRational]:
    """(k, a, mu) with h formally conjugate to x + a x^(k+1) + mu x^(2k+1).

    Conjugating by g = x + c x^m shifts the x^(k+m) coefficient by
    a (k+1-m) c, so degrees k+2 .. 2k are removed one at a time.
    """
    k, a = _tangent_1d(h)
    N = h.order
    if N < 2 * k + 1:
        raise NormalFormError("insufficient order")
    cur = h
    for m in range(2, k + 1):
        e = cur[k + m]
        if not e:
            continue
        c = -e / (a * (k + 1 - m))
        g = Jet1.variable(N) + Jet1([0] * m + [c], N)
        cur = g.compositional_inverse().compose(cur.compose(g))
        if cur[k + m]:
            raise NormalFormError("one-dimensional reduction failed")
    return k, a, cur[2 * k + 1]
