"""Exact integer geometry on Z^d.

Points are plain tuples of Python ints. Everything here is exact; no float
ever touches a coordinate. Norms are checked against a signed 128-bit range
so that results agree with fixed-width implementations.
"""
from __future__ import annotations

import itertools
import math
from collections import defaultdict
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence

import numpy as np

Point = tuple  # tuple[int, ...]

MAX_DIM = 8
_INT128_MAX = 2**127 - 1


class DimensionError(ValueError):
    """Points of different dimensions were mixed."""


class GrowthError(RuntimeError):
    """A support closure exceeded its growth bound."""


def as_point(coords: Iterable[int]) -> Point:
    out = []
    for c in coords:
        if isinstance(c, bool) or not isinstance(c, int):
            # numpy integers are fine, floats are not
            if hasattr(c, "__index__"):
                c = int(c.__index__())
            else:
                raise TypeError(f"lattice coordinates must be integers, got {c!r}")
        out.append(c)
    return tuple(out)


def _check128(value: int) -> int:
    if value > _INT128_MAX or value < -_INT128_MAX - 1:
        raise OverflowError("integer exceeds the signed 128-bit range")
    return value


def norm2(p: Point) -> int:
    return _check128(sum(c * c for c in p))


def dot(u: Point, v: Point) -> int:
    return _check128(sum(a * b for a, b in zip(u, v)))


def add(u: Point, v: Point) -> Point:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Point, v: Point) -> Point:
    return tuple(a - b for a, b in zip(u, v))


def _same_dim(*pts: Point) -> int:
    d = len(pts[0])
    for p in pts[1:]:
        if len(p) != d:
            raise DimensionError(f"dimension mismatch: {pts[0]} vs {p}")
    return d


class SupportSet:
    """A finite, duplicate-free set of lattice points of one dimension.

    Iteration is lexicographic; membership is a hash lookup.
    """

    __slots__ = ("dim", "points", "_lookup")

    def __init__(self, points: Iterable[Iterable[int]] = (), dim: Optional[int] = None):
        pts = sorted({as_point(p) for p in points})
        if pts:
            d = len(pts[0])
            for p in pts:
                if len(p) != d:
                    raise DimensionError(f"dimension mismatch in support: {pts[0]} vs {p}")
            if dim is not None and dim != d:
                raise DimensionError(f"declared dim {dim} but points have dim {d}")
            dim = d
        if dim is None:
            raise ValueError("an empty support needs an explicit dim")
        if not 1 <= dim <= MAX_DIM:
            raise DimensionError(f"dim must be in [1, {MAX_DIM}], got {dim}")
        for p in pts:
            norm2(p)
        self.dim = dim
        self.points = tuple(pts)
        self._lookup = {p: i for i, p in enumerate(pts)}

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    def __contains__(self, p) -> bool:
        return tuple(p) in self._lookup

    def __eq__(self, other) -> bool:
        return isinstance(other, SupportSet) and self.dim == other.dim and self.points == other.points

    def __hash__(self) -> int:
        return hash((self.dim, self.points))

    def __repr__(self) -> str:
        return f"SupportSet(dim={self.dim}, points={list(self.points)})"

    def index(self, p: Point) -> int:
        return self._lookup[tuple(p)]

    def union(self, other: "SupportSet") -> "SupportSet":
        if other.dim != self.dim:
            raise DimensionError("cannot union supports of different dimension")
        return SupportSet(self.points + other.points, dim=self.dim)

    def translate(self, v: Sequence[int]) -> "SupportSet":
        v = as_point(v)
        _same_dim(v, (0,) * self.dim)
        return SupportSet((add(p, v) for p in self.points), dim=self.dim)


class ResonantQuadruple(NamedTuple):
    p: Point
    q: Point
    r: Point
    s: Point

    @property
    def nondegenerate(self) -> bool:
        return self.p != self.q and self.p != self.s


def in_gamma0(p: Point, q: Point, r: Point, s: Point) -> bool:
    """Both resonance conditions, by direct evaluation."""
    _same_dim(p, q, r, s)
    if any(a - b + c - e for a, b, c, e in zip(p, q, r, s)):
        return False
    return norm2(p) - norm2(q) + norm2(r) - norm2(s) == 0


def enumerate_gamma0(support: SupportSet, include_degenerate: bool = True) -> list:
    """All ordered quadruples (p, q, r, s) of support points in Gamma_0.

    Ordered pairs are bucketed by (u + v, |u|^2 + |v|^2); two pairs in the
    same bucket are the diagonals of a (possibly flat) rectangle. With
    ``include_degenerate=False`` only positive-area rectangles are kept.
    """
    buckets = defaultdict(list)
    pts = support.points
    norms = [norm2(p) for p in pts]
    for i, u in enumerate(pts):
        for j, v in enumerate(pts):
            key = (add(u, v), _check128(norms[i] + norms[j]))
            buckets[key].append((u, v))
    out = []
    for pairs in buckets.values():
        for (p, r), (q, s) in itertools.product(pairs, repeat=2):
            if not include_degenerate and (p == q or p == s):
                continue
            out.append(ResonantQuadruple(p, q, r, s))
    out.sort()
    return out


def brute_force_gamma0(support: SupportSet, include_degenerate: bool = True) -> list:
    """O(n^4) reference scan of Gamma_0; used as a test oracle."""
    out = []
    for p, q, r, s in itertools.product(support.points, repeat=4):
        if in_gamma0(p, q, r, s) and (include_degenerate or (p != q and p != s)):
            out.append(ResonantQuadruple(p, q, r, s))
    out.sort()
    return out


def is_right_triangle(p: Point, q: Point, r: Point) -> bool:
    """Pairwise distinct points with a right angle at q."""
    _same_dim(p, q, r)
    if p == q or q == r or p == r:
        return False
    return dot(sub(p, q), sub(r, q)) == 0


def complete_rectangle(p0: Point, q0: Point, r0: Point) -> Optional[Point]:
    """Fourth vertex r0 + p0 - q0 if the angle at q0 is right, else None."""
    _same_dim(p0, q0, r0)
    if not is_right_triangle(p0, q0, r0):
        return None
    return tuple(a + c - b for a, b, c in zip(p0, q0, r0))


def _missing_vertices(points: set, new: Iterable[Point]) -> list:
    """Right triangles with a corner in ``new`` whose completion is not in ``points``.

    Returns ((p0, q0, r0), completion) pairs, right angle at q0, in a
    deterministic order (by apex, then by the two legs).
    """
    pts = sorted(points)
    if len(pts) < 3:
        return []
    newset = set(new)
    big = max(abs(c) for p in pts for c in p)
    # exact int64 while every dot product of differences fits
    dtype = np.int64 if 4 * len(pts[0]) * big * big < 2**62 else object
    U = np.array(pts, dtype=dtype)
    is_new = np.array([p in newset for p in pts])
    found = []
    seen = set()
    for k, apex in enumerate(pts):
        D = U - U[k]
        G = D @ D.T
        hit = G == 0
        hit[k, :] = False
        hit[:, k] = False
        np.fill_diagonal(hit, False)
        if not is_new[k]:
            hit &= is_new[:, None] | is_new[None, :]
        ii, jj = np.nonzero(np.triu(hit))
        for i, j in zip(ii.tolist(), jj.tolist()):
            c = tuple(a + b - q for a, b, q in zip(pts[i], pts[j], apex))
            if c not in points and c not in seen:
                seen.add(c)
                found.append(((pts[i], apex, pts[j]), c))
    return found


def close_support(support: SupportSet, max_growth: int) -> SupportSet:
    """Smallest superset closed under rectangle completion.

    Raises GrowthError, naming the first completion that would push the set
    past ``max_growth`` points.
    """
    points = set(support.points)
    if len(points) > max_growth:
        raise GrowthError(f"support already has {len(points)} > {max_growth} points")
    frontier = set(points)
    while frontier:
        added = _missing_vertices(points, frontier)
        frontier = set()
        for triangle, c in added:
            if c in points:
                continue
            if len(points) + 1 > max_growth:
                raise GrowthError(
                    f"completing right triangle {triangle} adds {c}, exceeding max_growth={max_growth}"
                )
            points.add(c)
            frontier.add(c)
    return SupportSet(points, dim=support.dim)


def is_closed(support: SupportSet) -> bool:
    return not _missing_vertices(set(support.points), support.points)


def primitive_direction(v: Point) -> Point:
    """v divided by the gcd of its entries, first nonzero entry positive."""
    g = math.gcd(*v)
    if g == 0:
        raise ValueError("zero vector has no direction")
    w = tuple(c // g for c in v)
    for c in w:
        if c != 0:
            return w if c > 0 else tuple(-x for x in w)
    return w


def direction_set(points: SupportSet) -> set:
    """Primitive directions of all chords and of their perpendiculars (d = 2)."""
    if points.dim != 2:
        raise DimensionError("direction_set is defined for d = 2 only")
    if len(points) < 2:
        raise ValueError("need at least two points")
    out = set()
    for u, v in itertools.combinations(points.points, 2):
        dx, dy = v[0] - u[0], v[1] - u[1]
        out.add(primitive_direction((dx, dy)))
        out.add(primitive_direction((-dy, dx)))
    return out
