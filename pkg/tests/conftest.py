import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from germ2.germio import parse_germ  # noqa: E402
from germ2.jets import Jet1, Jet2, MapGerm, VFieldGerm  # noqa: E402
from germ2.scalar import gr  # noqa: E402


def germ(text, order=None):
    return parse_germ(text, order).first().obj


def rand_scalar(rng: random.Random, size=3, gaussian=True):
    re = rng.randint(-size, size)
    im = rng.randint(-size, size) if gaussian and rng.random() < 0.3 else 0
    den = rng.choice([1, 1, 1, 2, 3])
    return gr(re) / den + gr(0, im)


def rand_homogeneous(rng, d, order, density=0.6):
    cs = {}
    for i in range(d + 1):
        if rng.random() < density:
            c = rand_scalar(rng)
            if c:
                cs[(i, d - i)] = c
    return Jet2(cs, order)


def rand_flat_pair(rng, order, lo=2, hi=None, maxdeg=None, density=0.5):
    """Two jets with terms of degree lo..hi (defaults: up to order)."""
    hi = min(hi or order, maxdeg or order)
    comps = []
    for _ in range(2):
        f = Jet2.zero(order)
        for d in range(lo, hi + 1):
            f = f + rand_homogeneous(rng, d, order, density)
        comps.append(f)
    return comps


def rand_flat_field(rng, order, lo=2, maxdeg=None):
    fx, fy = rand_flat_pair(rng, order, lo, maxdeg=maxdeg)
    return VFieldGerm(fx, fy)


def rand_tangent_map(rng, order, lo=2, maxdeg=None):
    fx, fy = rand_flat_pair(rng, order, lo, maxdeg=maxdeg)
    return MapGerm(Jet2.x(order) + fx, Jet2.y(order) + fy)


def rand_jet1_tangent(rng, order, k):
    cs = [0, 1] + [0] * (k - 1)
    a = rand_scalar(rng)
    while not a:
        a = rand_scalar(rng)
    cs.append(a)
    cs += [rand_scalar(rng) for _ in range(order - k - 1)]
    return Jet1(cs, order)


def rand_dicritic(rng, k, order, pdeg=1):
    """(x + x f + ..., y + y f + ...) with f homogeneous of degree k and p = f(1, v) of degree <= pdeg."""
    f = {}
    f[(k, 0)] = rand_scalar(rng) or gr(1)
    for j in range(1, min(pdeg, k) + 1):
        f[(k - j, j)] = rand_scalar(rng)
    fj = Jet2(f, order)
    fx, fy = rand_flat_pair(rng, order, k + 2, maxdeg=2 * k + 2, density=0.4)
    return MapGerm(Jet2.x(order) + Jet2.x(order) * fj + fx, Jet2.y(order) + Jet2.y(order) * fj + fy)


@pytest.fixture
def rng():
    return random.Random(20261018)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
