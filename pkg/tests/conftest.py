import itertools

import numpy as np
import pytest

from resonant.lattice import GrowthError, SupportSet, close_support

UNIT_SQUARE_POINTS = [(0, 0), (1, 0), (0, 1), (1, 1)]


@pytest.fixture
def square():
    return SupportSet(UNIT_SQUARE_POINTS)


def numpy_gamma0(points, include_degenerate=True):
    """Vectorized scan of all ordered 4-tuples; the enumeration oracle."""
    P = np.array(points, dtype=np.int64).reshape(len(points), -1)
    n = len(P)
    if n == 0:
        return []
    idx = np.stack(np.meshgrid(*[np.arange(n)] * 4, indexing="ij"), -1).reshape(-1, 4)
    p, q, r, s = (P[idx[:, k]] for k in range(4))
    ok = np.all(p - q + r - s == 0, axis=1)
    n2 = lambda x: (x * x).sum(1)
    ok &= n2(p) - n2(q) + n2(r) - n2(s) == 0
    if not include_degenerate:
        ok &= np.any(p != q, axis=1) & np.any(p != s, axis=1)
    pts = [tuple(int(c) for c in x) for x in P]
    return sorted(tuple(pts[i] for i in row) for row in idx[ok])


def brute_rhs(points, amps):
    """-i sum over ordered (q, r, s) with (p, q, r, s) resonant, plain loops."""
    out = {}
    for p in points:
        total = 0j
        for q, r, s in itertools.product(points, repeat=3):
            if all(a - b + c - d == 0 for a, b, c, d in zip(p, q, r, s)):
                if sum(x * x for x in p) - sum(x * x for x in q) + sum(x * x for x in r) - sum(x * x for x in s) == 0:
                    total += amps[q] * np.conj(amps[r]) * amps[s]
        out[p] = -1j * total
    return out


def random_support(rng, dim, max_size=12, box=2):
    k = int(rng.integers(1, max_size + 1))
    pts = {tuple(int(c) for c in rng.integers(-box, box + 1, dim)) for _ in range(k)}
    return SupportSet(pts, dim=dim)


def _rect(rng, box):
    a, b = (int(x) for x in rng.integers(-3, 4, 2))
    if a == 0 and b == 0:
        a = 1
    k = int(rng.integers(1, 3))
    o = np.array(rng.integers(-box, box, 2))
    u = np.array([a, b])
    w = k * np.array([-b, a])
    return [tuple(int(c) for c in x) for x in (o, o + u, o + u + w, o + w)]


def random_closed_support(rng, max_points=50, box=30):
    """A few rectangles plus scattered points, closed under rectangle completion."""
    while True:
        pts = []
        for _ in range(int(rng.integers(1, 4))):
            pts += _rect(rng, box)
        pts += [tuple(int(c) for c in x) for x in rng.integers(-box, box + 1, (int(rng.integers(5, 30)), 2))]
        try:
            return close_support(SupportSet(pts), max_points)
        except GrowthError:
            continue


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
