"""Floating-point orbits of germs, in original and blow-up coordinates.

All batch iteration is vectorized over samples with numpy; a germ is
evaluated as its polynomial representative (the truncated jet).
"""
from __future__ import annotations

import cmath
import csv
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .blowup import direction_data
from .jets import MapGerm, flat_order, invert
from .lie import DicriticInfo, is_dicritic
from .scalar import Poly1, rational_roots

TINY = 1e-30


class DynamicsError(ValueError):
    pass


class GermEvaluator:
    """Vectorized evaluation of a MapGerm's polynomial representative."""

    def __init__(self, F: MapGerm):
        self.order = F.order
        terms = sorted(set(F.fx.coeffs) | set(F.fy.coeffs))
        self.i = np.array([t[0] for t in terms], dtype=int)
        self.j = np.array([t[1] for t in terms], dtype=int)
        self.cx = np.array([complex(F.fx[t]) for t in terms])
        self.cy = np.array([complex(F.fy[t]) for t in terms])

    def __call__(self, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        n = self.order
        xp = np.empty((n + 1,) + x.shape, dtype=complex)
        yp = np.empty((n + 1,) + y.shape, dtype=complex)
        xp[0] = 1
        yp[0] = 1
        for d in range(1, n + 1):
            xp[d] = xp[d - 1] * x
            yp[d] = yp[d - 1] * y
        mono = xp[self.i] * yp[self.j]
        return self.cx @ mono, self.cy @ mono


def _leading_k(F: MapGerm) -> int:
    fo = flat_order(F)
    return fo - 1 if isinstance(fo, int) else 1


def numeric_roots(p: Poly1, polish: int = 4) -> list[complex]:
    """Distinct roots of p: companion-matrix seeds refined by Newton steps."""
    cs = [complex(c) for c in p.coeffs]
    if len(cs) < 2:
        return []
    roots = np.roots(cs[::-1])
    dp = [k * c for k, c in enumerate(cs)][1:]
    out: list[complex] = []
    for z in roots:
        z = complex(z)
        for _ in range(polish):
            f = np.polyval(cs[::-1], z)
            d = np.polyval(dp[::-1], z) if dp else 0
            if d == 0:
                break
            z -= f / d
        if all(abs(z - w) > 1e-9 * (1 + abs(w)) for w in out):
            out.append(z)
    return sorted(out, key=lambda z: (round(z.real, 9), round(z.imag, 9)))


# ---------------------------------------------------------------------------
# single orbits


@dataclass
class OrbitRecord:
    points: np.ndarray
    blowup_track: np.ndarray
    stopped: str
    seq1_samples: np.ndarray
    k: int

    @property
    def steps(self) -> int:
        return len(self.points) - 1

    def rows(self, p: Poly1 | None = None):
        """CSV rows: n, Re x, Im x, Re v, Im v, |1/(n x^k) + k p(v)|."""
        pc = [complex(c) for c in p.coeffs] if p is not None else None
        for n, ((x, _), v) in enumerate(zip(self.points, self.blowup_track)):
            if n == 0 or pc is None or not np.isfinite(v):
                err = float("nan")
            else:
                err = abs(self.seq1_samples[n] + self.k * np.polyval(pc[::-1], v))
            yield [n, x.real, x.imag, v.real, v.imag, err]

    def write_csv(self, path: str, p: Poly1 | None = None) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "re_x", "im_x", "re_v", "im_v", "seq1_error"])
            for row in self.rows(p):
                w.writerow([row[0]] + [repr(float(c)) for c in row[1:]])

    def summary(self) -> dict:
        x, y = self.points[-1]
        return {
            "steps": self.steps,
            "stopped": self.stopped,
            "k": self.k,
            "last_point": [[x.real, x.imag], [y.real, y.imag]],
            "last_v": _cplx(self.blowup_track[-1]),
        }


def _cplx(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def iterate_orbit(F: MapGerm, start: Sequence[complex], n_max: int,
                  escape_radius: float = 1.0) -> OrbitRecord:
    """Iterate F from ``start`` until n_max steps, escape, or collapse to 0."""
    if n_max < 1:
        raise DynamicsError("n_max must be at least 1")
    x0, y0 = complex(start[0]), complex(start[1])
    if x0 == 0 and y0 == 0:
        raise DynamicsError("fixed point")
    k = _leading_k(F)
    ev = GermEvaluator(F)
    pts = np.empty((n_max + 1, 2), dtype=complex)
    pts[0] = (x0, y0)
    x = np.array([x0])
    y = np.array([y0])
    stopped = "max-iterations"
    last = n_max
    for n in range(1, n_max + 1):
        x, y = ev(x, y)
        pts[n] = (x[0], y[0])
        r = max(abs(x[0]), abs(y[0]))
        if not np.isfinite(r) or r > escape_radius:
            stopped, last = "escaped", n
            break
        if r < TINY:
            stopped, last = "converged", n
            break
    pts = pts[: last + 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        v = pts[:, 1] / pts[:, 0]
        ns = np.arange(len(pts))
        s1 = 1.0 / (ns * pts[:, 0] ** k)
    s1[0] = np.nan
    return OrbitRecord(pts, v, stopped, s1, k)


def _orbit_converges(orbit: OrbitRecord, tail: int = 100, v_tol: float = 1e-8) -> bool:
    if orbit.stopped == "escaped":
        return False
    if orbit.stopped == "converged":
        return True
    xs = np.abs(orbit.points[:, 0])
    if len(xs) <= tail or not xs[-1] < xs[-1 - tail]:
        return False
    v = orbit.blowup_track[-tail - 1:]
    return bool(np.all(np.isfinite(v)) and np.max(np.abs(v - v[-1])) < v_tol)


@dataclass
class Seq1Result:
    estimate: complex
    target: complex
    error: float
    raw: complex
    raw_error: float
    v_limit: complex

    def as_dict(self) -> dict:
        return {
            "estimate": _cplx(self.estimate),
            "target": _cplx(self.target),
            "error": self.error,
            "raw": _cplx(self.raw),
            "raw_error": self.raw_error,
            "v_limit": _cplx(self.v_limit),
        }


def seq1_check(F: MapGerm, start: Sequence[complex], n_max: int,
               v_tol: float = 1e-8) -> Seq1Result:
    """Compare the Cesaro mean of x_{m+1}^-k - x_m^-k with -k p(v_limit)."""
    orbit = iterate_orbit(F, start, n_max)
    if not _orbit_converges(orbit, v_tol=v_tol):
        raise DynamicsError("orbit does not converge to the origin along a direction")
    k = orbit.k
    dd = direction_data(F)
    x = orbit.points[:, 0]
    n = len(x) - 1
    est = (x[-1] ** -k - x[0] ** -k) / n
    v_lim = complex(orbit.blowup_track[-1])
    target = -k * complex(dd.p(v_lim))
    raw = complex(orbit.seq1_samples[-1])
    return Seq1Result(complex(est), target, abs(est - target), raw, abs(raw - target), v_lim)


def limit_direction_check(F: MapGerm, orbit: OrbitRecord, v_tol: float = 1e-8, tail: int = 100) -> tuple[complex, float]:
    """(v_limit, residual) for a convergent orbit.

    The residual is the larger of |r(v_limit)| and the spread of v over the
    last ``tail`` iterates; for a dicritic germ r vanishes and only the
    spread is informative.
    """
    if not _orbit_converges(orbit, v_tol=v_tol):
        raise DynamicsError("orbit does not converge to the origin along a direction")
    dd = direction_data(F)
    track = orbit.blowup_track[-tail - 1:]
    v = complex(track[-1])
    spread = float(np.max(np.abs(track - v)))
    return v, max(abs(complex(dd.r(v))) if not dd.r.is_zero() else 0.0, spread)


# ---------------------------------------------------------------------------
# sectors


@dataclass(frozen=True)
class SectorSpec:
    k: int
    p0: complex
    R: float
    r: float
    aperture: float = 2 * math.pi / 3
    branch: int = 0

    def backward(self) -> "SectorSpec":
        return SectorSpec(self.k, -self.p0, self.R, self.r, self.aperture, self.branch)

    def w_to_x(self, w):
        """x with x^-k = w on the selected sheet."""
        return np.exp(-np.log(w) / self.k) * np.exp(2j * np.pi * self.branch / self.k)


def _sheet(k: int, x: complex) -> int:
    w = x ** -k
    principal = cmath.exp(-cmath.log(w) / k)
    return int(round(k * cmath.phase(x / principal) / (2 * math.pi))) % k


def in_sector(spec: SectorSpec, point: tuple[complex, complex]) -> bool:
    """|v| < r and |arg(-w/p0 - 2R/|p0|)| < aperture, with w = x^-k on the sheet."""
    x, v = complex(point[0]), complex(point[1])
    if x == 0:
        raise DynamicsError("x = 0 lies on the divisor")
    if abs(v) >= spec.r:
        return False
    if _sheet(spec.k, x) != spec.branch % spec.k:
        return False
    w = x ** -spec.k
    z = -w / spec.p0 - 2 * spec.R / abs(spec.p0)
    return abs(cmath.phase(z)) < spec.aperture


def _sector_w(p0, R, rho_frac, theta):
    """w = -p0 (2R/|p0| + rho e^{i theta}), rho = rho_frac * 4R/|p0|."""
    a = np.abs(p0)
    return -p0 * (2 * R / a + rho_frac * 4 * R / a * np.exp(1j * theta))


# ---------------------------------------------------------------------------
# batch iteration


@dataclass
class BatchResult:
    converged: np.ndarray
    escaped: np.ndarray
    v_final: np.ndarray
    x_final: np.ndarray
    v_spread: np.ndarray


def iterate_batch(F: MapGerm, x: np.ndarray, y: np.ndarray, n_max: int,
                  escape_radius: float = 1.0, tail: int = 100, v_tol: float = 1e-8) -> BatchResult:
    ev = GermEvaluator(F)
    x = x.astype(complex).copy()
    y = y.astype(complex).copy()
    x0 = np.abs(x)
    alive = np.ones(x.shape, dtype=bool)
    escaped = np.zeros(x.shape, dtype=bool)
    tiny = np.zeros(x.shape, dtype=bool)
    buf = np.full((tail + 1,) + x.shape, np.nan, dtype=complex)
    xs_tail = np.zeros(x.shape)
    for n in range(1, n_max + 1):
        idx = np.nonzero(alive)[0]
        if idx.size == 0:
            break
        nx, ny = ev(x[idx], y[idx])
        x[idx], y[idx] = nx, ny
        mag = np.maximum(np.abs(nx), np.abs(ny))
        bad = ~np.isfinite(mag) | (mag > escape_radius)
        small = mag < TINY
        escaped[idx[bad]] = True
        tiny[idx[small]] = True
        alive[idx[bad | small]] = False
        with np.errstate(divide="ignore", invalid="ignore"):
            buf[n % (tail + 1), idx] = ny / nx
        if n == n_max - tail:
            xs_tail = np.abs(x).copy()
    with np.errstate(divide="ignore", invalid="ignore"):
        v_final = y / x
        spread = np.nanmax(np.abs(buf - v_final[None, :]), axis=0)
    decreasing = (np.abs(x) < xs_tail) & (np.abs(x) < x0)
    ok = ~escaped & (tiny | (decreasing & (spread < v_tol)))
    return BatchResult(ok, escaped, v_final, x, np.nan_to_num(spread, nan=0.0))


# ---------------------------------------------------------------------------
# flower verification


@dataclass
class FlowerReport:
    k: int
    R: float
    r: float
    samples: int
    excluded: int
    forward_converged: int
    backward_converged: int
    forward_fraction: float
    backward_fraction: float
    max_residual: float
    history: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return asdict(self)

    def write_csv(self, path: str) -> None:
        """One row per sector radius tried during calibration."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["R", "forward_fraction", "backward_fraction"])
            for h in self.history:
                w.writerow([h["R"], h["forward"], h["backward"]])


def _flower_samples(rng: np.random.Generator, n: int, p: Poly1, k: int, r: float, floor: float):
    pc = np.array([complex(c) for c in p.coeffs][::-1])
    rad = r * np.sqrt(rng.random(n))
    ang = rng.random(n) * 2 * np.pi
    v = rad * np.exp(1j * ang)
    pv = np.polyval(pc, v)
    keep = np.abs(pv) > floor
    theta = (rng.random(n) * 2 - 1) * (2 * np.pi / 3) * 0.999
    rho = rng.random(n)
    branch = rng.integers(0, k, n)
    return v, pv, keep, theta, rho, branch


def _sector_start(pv, R, rho, theta, branch, k, sign):
    w = _sector_w(sign * pv, R, rho, theta)
    x = np.exp(-np.log(w) / k) * np.exp(2j * np.pi * branch / k)
    return x


def flower_verify(F: MapGerm, samples: int = 500, n_max: int = 10_000, R="auto", r: float = 0.5,
                  p_floor: float = 0.1, seed: int = 0, R0: float = 1.0, max_doublings: int = 12,
                  v_tol: float = 1e-8) -> FlowerReport:
    """Fraction of sector samples whose orbits converge to the divisor.

    Forward samples start in V+ (sector built from p(v)) and follow F;
    backward samples start in V- (built from -p(v)) and follow F^-1.
    """
    info = is_dicritic(F)
    if not isinstance(info, DicriticInfo) or not info.dicritic:
        raise DynamicsError("flower verification needs a dicritic germ")
    k = info.k
    dd = direction_data(F)
    rng = np.random.default_rng(seed)
    v, pv, keep, theta, rho, branch = _flower_samples(rng, samples, dd.p, k, r, p_floor)
    v, pv, theta, rho, branch = v[keep], pv[keep], theta[keep], rho[keep], branch[keep]
    Finv = invert(F)
    history = []

    def run(Rv: float):
        out = []
        for sign, G in ((1, F), (-1, Finv)):
            x = _sector_start(pv, Rv, rho, theta, branch, k, sign)
            res = iterate_batch(G, x, v * x, n_max, v_tol=v_tol)
            out.append(res)
        return out

    def residual(results) -> float:
        # same quantity as limit_direction_check: max(|r(v_lim)|, tail spread of v)
        worst = 0.0
        rc = np.array([complex(c) for c in dd.r.coeffs][::-1] or [0j])
        for res in results:
            c = res.converged
            vals = np.maximum(np.abs(np.polyval(rc, res.v_final[c])), res.v_spread[c])
            if vals.size:
                worst = max(worst, float(vals.max()))
        return worst

    if R == "auto":
        Rv = R0
        prev = None
        for _ in range(max_doublings + 1):
            results = run(Rv)
            fr = tuple(float(np.mean(res.converged)) if res.converged.size else 0.0 for res in results)
            history.append({"R": Rv, "forward": fr[0], "backward": fr[1]})
            if prev is not None and fr == prev:
                break
            prev = fr
            Rv *= 2
    else:
        Rv = float(R)
        results = run(Rv)
        history.append({"R": Rv, "forward": float(np.mean(results[0].converged)),
                        "backward": float(np.mean(results[1].converged))})
    fwd, bwd = results
    m = int(keep.sum())
    return FlowerReport(
        k=k, R=Rv, r=r, samples=m, excluded=int(samples - m),
        forward_converged=int(fwd.converged.sum()), backward_converged=int(bwd.converged.sum()),
        forward_fraction=float(fwd.converged.mean()) if m else 0.0,
        backward_fraction=float(bwd.converged.mean()) if m else 0.0,
        max_residual=residual(results), history=history,
    )


# ---------------------------------------------------------------------------
# characteristic roots


@dataclass
class RootClassification:
    v0: complex
    ratio: complex
    orientation: str
    predicted: str
    forward_attracted: int
    forward_repelled: int
    backward_attracted: int
    backward_repelled: int
    probes: int
    exact: bool

    def as_dict(self) -> dict:
        d = asdict(self)
        d["v0"] = _cplx(self.v0)
        d["ratio"] = _cplx(self.ratio)
        return d


def _probe(F: MapGerm, v0: complex, p0: complex, k: int, sign: int, probes: int,
           rng: np.random.Generator, n_max: int, delta: float, R: float):
    theta = (rng.random(probes) * 2 - 1) * (np.pi / 3)
    rho = rng.random(probes)
    branch = rng.integers(0, k, probes)
    off = delta * np.exp(2j * np.pi * rng.random(probes))
    pv = np.full(probes, p0)
    x = _sector_start(pv, R, rho, theta, branch, k, sign)
    v = v0 + off
    res = iterate_batch(F, x, v * x, n_max, escape_radius=1.0, v_tol=np.inf)
    dist = np.abs(res.v_final - v0)
    attracted = (~res.escaped) & (dist < 0.5 * delta)
    repelled = res.escaped | ~np.isfinite(dist) | (dist > 2 * delta)
    return int(attracted.sum()), int(repelled.sum())


def classify_characteristic_roots(F: MapGerm, tolerance: float = 1e-6, probes: int = 50,
                                  n_max: int = 4000, seed: int = 0, delta: float = 1e-3,
                                  R: float = 50.0) -> list[RootClassification]:
    """Ratio r'(v0)/p(v0) at each simple root, with probe-based orientation.

    Orientation is read from orbits: forward orbits of F started in the
    forward sector near v0 and backward orbits of F^-1 started in the
    backward sector.  ``predicted`` is the rule attracting <=> Re(ratio) > 0.
    """
    dd = direction_data(F)
    if dd.dicritic:
        raise DynamicsError("dicritic, use flower_verify")
    k = dd.k
    exact = list(rational_roots(dd.r))
    roots: list[tuple[complex, bool]] = [(complex(z), True) for z in exact]
    for z in numeric_roots(dd.r):
        if all(abs(z - w) > 1e-7 for w, _ in roots):
            roots.append((z, False))
    rc = [complex(c) for c in dd.r.coeffs]
    drc = [j * c for j, c in enumerate(rc)][1:]
    pc = [complex(c) for c in dd.p.coeffs]
    Finv = invert(F)
    rng = np.random.default_rng(seed)
    out = []
    for v0, is_exact in sorted(roots, key=lambda t: (t[0].real, t[0].imag)):
        d = np.polyval(drc[::-1], v0) if drc else 0
        p0 = np.polyval(pc[::-1], v0) if pc else 0
        if abs(d) < 1e-12 or abs(p0) < 1e-12:
            continue
        ratio = complex(d / p0)
        predicted = "undetermined" if abs(ratio.real) < tolerance else (
            "attracting" if ratio.real > 0 else "repelling")
        fa, fr = _probe(F, v0, p0, k, 1, probes, rng, n_max, delta, R)
        ba, br = _probe(Finv, v0, p0, k, -1, probes, rng, n_max, delta, R)
        if predicted == "undetermined":
            orient = "undetermined"
        elif fa == probes and ba == probes:
            orient = "attracting"
        elif fr == probes and br == probes:
            orient = "repelling"
        else:
            orient = "undetermined"
        out.append(RootClassification(v0, ratio, orient, predicted, fa, fr, ba, br, probes, is_exact))
    return out
