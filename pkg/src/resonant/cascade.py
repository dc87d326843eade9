"""Building blocks of the norm-growth construction on Z^2.

Generation families are checked against their closure and spread
properties; components are translated so that no resonant rectangle joins
two of them, rescaled, superposed, and evolved independently.
"""
from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .dynamics import (
    DEFAULT_DT,
    ResonanceIndex,
    SpectrumState,
    flow,
    sobolev_norm,
)
from .lattice import (
    DimensionError,
    SupportSet,
    _missing_vertices,
    direction_set,
    enumerate_gamma0,
    norm2,
    primitive_direction,
)

_INT64_SAFE = 2**62


class PlacementError(RuntimeError):
    pass


class OverlapError(ValueError):
    pass


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("RESONANT_THREADS", "1")))
    except ValueError:
        return 1


def _int_array(points, extra: int = 0):
    """Integer array of points; object dtype when int64 products could overflow."""
    arr = np.array(points, dtype=object).reshape(len(points), 2) if points else np.zeros((0, 2), dtype=np.int64)
    big = max((abs(int(c)) for c in arr.ravel()), default=0) + extra
    if 8 * big * big < _INT64_SAFE:
        return arr.astype(np.int64)
    return arr


# --------------------------------------------------------------------------
# generation families


@dataclass(frozen=True)
class GenerationFamily:
    generations: tuple

    def __post_init__(self):
        gens = tuple(g if isinstance(g, SupportSet) else SupportSet(g, dim=2) for g in self.generations)
        for g in gens:
            if g.dim != 2:
                raise DimensionError("generation families live in Z^2")
        for a, b in itertools.combinations(range(len(gens)), 2):
            common = set(gens[a].points) & set(gens[b].points)
            if common:
                raise OverlapError(f"generations {a + 1} and {b + 1} share {sorted(common)[0]}")
        object.__setattr__(self, "generations", gens)

    @property
    def N(self) -> int:
        return len(self.generations)

    @property
    def union(self) -> SupportSet:
        pts = [p for g in self.generations for p in g.points]
        return SupportSet(pts, dim=2)


@dataclass(frozen=True)
class PropertyCheck:
    passed: bool
    witness: object = None
    detail: dict = field(default_factory=dict)


@dataclass(frozen=True)
class FamilyReport:
    closure_0: PropertyCheck
    ball_I: PropertyCheck
    cardinality_II: PropertyCheck
    nesting_III: PropertyCheck
    spread_IV: PropertyCheck

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks().values())

    def checks(self) -> dict:
        return {
            "closure_0": self.closure_0,
            "ball_I": self.ball_I,
            "cardinality_II": self.cardinality_II,
            "nesting_III": self.nesting_III,
            "spread_IV": self.spread_IV,
        }


def min_enclosing_disc(points) -> tuple:
    """Smallest enclosing circle (center, radius) by incremental construction."""
    pts = [tuple(map(float, p)) for p in points]
    if not pts:
        raise ValueError("no points")

    def circle2(a, b):
        c = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
        return c, math.dist(a, c)

    def circle3(a, b, c):
        ax, ay = a
        bx, by = b
        cx, cy = c
        d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
        if d == 0:
            cands = [circle2(a, b), circle2(a, c), circle2(b, c)]
            return max(cands, key=lambda t: t[1])
        ux = ((ax**2 + ay**2) * (by - cy) + (bx**2 + by**2) * (cy - ay) + (cx**2 + cy**2) * (ay - by)) / d
        uy = ((ax**2 + ay**2) * (cx - bx) + (bx**2 + by**2) * (ax - cx) + (cx**2 + cy**2) * (bx - ax)) / d
        return (ux, uy), math.dist((ux, uy), a)

    def inside(circ, p):
        return math.dist(circ[0], p) <= circ[1] * (1 + 1e-12) + 1e-12

    circ = (pts[0], 0.0)
    for i, p in enumerate(pts):
        if inside(circ, p):
            continue
        circ = (p, 0.0)
        for j in range(i):
            q = pts[j]
            if inside(circ, q):
                continue
            circ = circle2(p, q)
            for k in range(j):
                if not inside(circ, pts[k]):
                    circ = circle3(p, q, pts[k])
    return circ


def verify_family(family: GenerationFamily, radius_bound: float, growth_base: float = 2.0) -> FamilyReport:
    """Check the closure, ball, cardinality, nesting and spread properties.

    ``radius_bound`` stands in for the (astronomical) ball radius of the
    construction; ``growth_base`` is the base b in R * b^((N - 10) / 2).
    """
    if not isinstance(family, GenerationFamily):
        family = GenerationFamily(family)
    gens = family.generations
    N = family.N
    union = family.union

    missing = _missing_vertices(set(union.points), union.points)
    if missing:
        tri, c = missing[0]
        closure = PropertyCheck(False, {"triangle": tri, "missing": c})
    else:
        closure = PropertyCheck(True)

    far = max(union.points, key=norm2, default=None)
    if far is not None and norm2(far) > radius_bound**2:
        ball = PropertyCheck(False, {"point": far, "radius": math.sqrt(norm2(far))})
    else:
        ball = PropertyCheck(True, detail={"radius_bound": radius_bound})

    want = 2 ** (N - 1)
    bad = [(j + 1, len(g)) for j, g in enumerate(gens) if len(g) != want]
    card = PropertyCheck(not bad, {"generation": bad[0][0], "size": bad[0][1], "expected": want} if bad else None)

    nest = PropertyCheck(True)
    for j in range(N - 1):
        if not len(gens[j]) or not len(gens[j + 1]):
            continue
        r2 = max(norm2(p) for p in gens[j])
        far_next = max(gens[j + 1], key=norm2)
        if norm2(far_next) > 2 * r2:
            nest = PropertyCheck(False, {"generation": j + 2, "point": far_next, "inner_radius": math.sqrt(r2)})
            break

    if N < 2 or not len(gens[0]):
        spread = PropertyCheck(False, {"reason": "needs N >= 2 and a nonempty first generation"})
    else:
        center, R = min_enclosing_disc(gens[0].points)
        target = R * growth_base ** ((N - 10) / 2)
        outer = gens[N - 2]
        far_pts = [p for p in outer if math.sqrt(norm2(p)) >= target and norm2(p) > 0]
        variant = R * 2 ** ((N - 20) / 2)
        detail = {
            "R": R,
            "center": center,
            "threshold": target,
            "points_beyond": len(far_pts),
            "variant_threshold": variant,
            "variant_holds": any(math.sqrt(norm2(p)) > variant for p in outer),
        }
        ok = len(far_pts) >= 2 and R <= radius_bound
        spread = PropertyCheck(ok, None if ok else {"generation": N - 1, "points_beyond": far_pts}, detail)

    return FamilyReport(closure, ball, card, nest, spread)


def check_cascade_profile(initial: SpectrumState, final: SpectrumState, family: GenerationFamily, tol: float) -> dict:
    """Weak check of the cascade profile by generation masses.

    Generation 3 must dominate at the start and generation N-1 at the end,
    each other generation staying below ``tol`` in max modulus.
    """
    out = {}
    for name, st, hot in (("initial", initial, 2), ("final", final, family.N - 2)):
        amps = []
        for g in family.generations:
            vals = [abs(st[p]) if p in st.support else 0.0 for p in g]
            amps.append(max(vals, default=0.0))
        ok = amps[hot] > 1 - tol and all(a < tol for j, a in enumerate(amps) if j != hot)
        out[name] = {"passed": ok, "max_modulus": amps}
    return out


# --------------------------------------------------------------------------
# placement search


def mixed_triangle_scan(a: SupportSet, b: SupportSet, threads: Optional[int] = None):
    """First right triangle with vertices in both sets, or None.

    Exhaustive over the apex of the right angle. Shared points count as a
    violation. Independent of the search in :func:`find_placement`.
    """
    common = sorted(set(a.points) & set(b.points))
    if common:
        return {"overlap": common[0]}
    pts = list(a.points) + list(b.points)
    n = len(pts)
    if n < 3 or not len(a) or not len(b):
        return None
    label = np.array([0] * len(a) + [1] * len(b))
    U = _int_array(pts)

    def scan(k):
        D = U - U[k]
        G = D @ D.T
        hit = G == 0
        hit[k, :] = False
        hit[:, k] = False
        np.fill_diagonal(hit, False)
        mixed = (label[:, None] != label[None, :]) | (label[:, None] != label[k])
        ii, jj = np.nonzero(np.triu(hit & mixed))
        if len(ii):
            return (pts[ii[0]], pts[k], pts[jj[0]])
        return None

    workers = threads or _threads()
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(scan, range(n)))
    else:
        results = map(scan, range(n))
    for res in results:
        if res is not None:
            return {"triangle": res}
    return None


def _primitive_vectors():
    """Primitive 2-vectors in order of increasing norm (normalized sign, lexicographic ties)."""
    n = 1
    while True:
        r = math.isqrt(n)
        found = []
        for x in range(0, r + 1):
            y2 = n - x * x
            y = math.isqrt(y2)
            if y * y != y2:
                continue
            for v in {(x, y), (x, -y)}:
                if v != (0, 0) and math.gcd(*v) == 1 and primitive_direction(v) == v:
                    found.append(v)
        yield from sorted(set(found))
        n += 1


def _free_direction(existing: SupportSet, incoming: SupportSet) -> tuple:
    forbidden = set()
    for s in (existing, incoming):
        if len(s) >= 2:
            forbidden |= direction_set(s)
    for v in _primitive_vectors():
        if v not in forbidden:
            return v
    raise AssertionError("unreachable")


def _right_angle_coeffs(P, Q, R, w):
    """Polynomial coefficients (c0, c1, c2) in lam of the three corner dot products
    of the triangle (P, Q, R + lam w)."""
    QP = Q - P
    PQ = P - Q
    at_p = ((QP * (R - P)).sum(-1), (QP * w).sum(-1), 0)
    at_q = ((PQ * (R - Q)).sum(-1), (PQ * w).sum(-1), 0)
    PR, QR = P - R, Q - R
    at_r = ((PR * QR).sum(-1), -((PR + QR) * w).sum(-1), int((w * w).sum()))
    return at_p, at_q, at_r


def find_placement(existing: SupportSet, incoming: SupportSet, search_bound: int = 10_000) -> tuple:
    """Translation v with no right triangle shared between existing and v + incoming.

    Picks a direction w that is neither parallel nor perpendicular to any
    chord of either set, then tests lam = 0, 1, 2, ... exactly: a triangle
    (p, q, r + lam w) with p, q existing, or (p, q + lam w, r + lam w) with
    p existing, must not have a right angle, and the translate must not
    overlap. The answer is re-checked by :func:`mixed_triangle_scan`.
    """
    if existing.dim != 2 or incoming.dim != 2:
        raise DimensionError("placement is two-dimensional")
    if not len(existing) or not len(incoming):
        return (0, 0)
    w_dir = _free_direction(existing, incoming)
    reach = search_bound * max(abs(w_dir[0]), abs(w_dir[1]))
    X = _int_array(list(existing.points), reach)
    S = _int_array(list(incoming.points), reach)
    w = np.array(w_dir, dtype=X.dtype)

    def corner_table(A, B, w_sign):
        # every pair of A against every single point of B
        i, j = np.triu_indices(len(A), 1)
        P = np.repeat(A[i], len(B), axis=0)
        Q = np.repeat(A[j], len(B), axis=0)
        R = np.tile(B, (len(i), 1))
        return _right_angle_coeffs(P, Q, R, w_sign * w)

    # C1: p, q existing and r + lam w incoming
    c1 = corner_table(X, S, 1)
    # C2: p existing and q + lam w, r + lam w incoming; shifting the whole
    # triangle by -lam w turns it into (q, r, p - lam w)
    c2 = corner_table(S, X, -1)
    existing_set = set(existing.points)
    best = None
    for lam in range(search_bound + 1):
        bad = 0
        witness = None
        for coeffs, tag in ((c1, "C1"), (c2, "C2")):
            hit = np.zeros(len(coeffs[0][0]), dtype=bool)
            for c0, cl, cq in coeffs:
                hit |= (c0 + lam * cl + lam * lam * cq) == 0
            k = int(np.count_nonzero(hit))
            if k:
                bad += k
                if witness is None:
                    witness = (tag, int(np.flatnonzero(hit)[0]))
        v = (lam * w_dir[0], lam * w_dir[1])
        overlap = [p for p in incoming.points if (p[0] + v[0], p[1] + v[1]) in existing_set]
        bad += len(overlap)
        if bad == 0:
            moved = incoming.translate(v)
            res = mixed_triangle_scan(existing, moved)
            if res is not None:
                raise PlacementError(f"search accepted v={v} but the exhaustive scan found {res}")
            return v
        if best is None or bad < best[0]:
            best = (bad, v, witness or ("overlap", overlap[0]))
    raise PlacementError(
        f"no placement with lambda <= {search_bound} along {w_dir}; "
        f"least conflicted v={best[1]} still has {best[0]} conflicts (first: {best[2]})"
    )


# --------------------------------------------------------------------------
# superposition


@dataclass(frozen=True)
class ComponentPlacement:
    v: tuple
    support: SupportSet
    lam: float
    initial: SpectrumState

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        if self.support.dim != 2:
            raise DimensionError("components live in Z^2")
        for p in self.initial.support:
            if p not in self.support:
                raise ValueError(f"initial data at {p} outside the component support")
        object.__setattr__(self, "v", tuple(int(x) for x in self.v))

    @property
    def placed_support(self) -> SupportSet:
        return self.support.translate(self.v)

    def initial_on_support(self) -> SpectrumState:
        return self.initial.extend(self.support)


def default_lambda(j: int, eps: float, s: float, R_j: float) -> float:
    """(eps / j^10) 2^(-j/2) R_j^(-s)."""
    return (eps / j**10) * 2 ** (-j / 2) * R_j ** (-s)


@dataclass(frozen=True)
class DecouplingResult:
    passed: bool
    witness: object = None

    def __bool__(self) -> bool:
        return self.passed


def _union_support(placements) -> tuple:
    owner = {}
    for k, pl in enumerate(placements):
        for p in pl.placed_support:
            if p in owner:
                raise OverlapError(f"components {owner[p]} and {k} both contain {p}")
            owner[p] = k
    return SupportSet(owner.keys(), dim=2), owner


def verify_decoupling(placements: Sequence[ComponentPlacement]) -> DecouplingResult:
    """Every positive-area resonant rectangle of the union lies in one component."""
    if not placements:
        return DecouplingResult(True)
    union, owner = _union_support(placements)
    for quad in enumerate_gamma0(union, include_degenerate=False):
        if len({owner[x] for x in quad}) > 1:
            return DecouplingResult(False, quad)
    return DecouplingResult(True)


def assemble_superposition(placements: Sequence[ComponentPlacement], check: bool = True) -> SpectrumState:
    """A_k = sum_j lam_j initial_j(k - v_j) on the union of translated supports."""
    if not placements:
        return SpectrumState(SupportSet([], dim=2))
    if check:
        res = verify_decoupling(placements)
        if not res:
            raise ValueError(f"components are coupled through {res.witness}")
    union, _ = _union_support(placements)
    vals = np.zeros(len(union), dtype=complex)
    for pl in placements:
        init = pl.initial_on_support()
        for p, a in zip(init.support.points, init.values):
            vals[union.index((p[0] + pl.v[0], p[1] + pl.v[1]))] = pl.lam * a
    return SpectrumState(union, vals)


def evolve_components(placements: Sequence[ComponentPlacement], t: float, dt: float = DEFAULT_DT) -> SpectrumState:
    """Superposed state at time t from independent per-component gauge-reduced runs.

    Component j is evolved on its own support to lam_j^2 t, scaled by lam_j
    and translated by v_j.
    """
    if not placements:
        return SpectrumState(SupportSet([], dim=2))
    union, _ = _union_support(placements)
    vals = np.zeros(len(union), dtype=complex)
    for pl in placements:
        init = pl.initial_on_support()
        if t == 0:
            a = init.values
        else:
            index = ResonanceIndex(pl.support, nondegenerate=True)
            a = flow(init, "rsadj", pl.lam**2 * t, dt, index).values
        for p, x in zip(pl.support.points, a):
            vals[union.index((p[0] + pl.v[0], p[1] + pl.v[1]))] = pl.lam * x
    return SpectrumState(union, vals)


def component_mass(state: SpectrumState, subset) -> float:
    """Mass of the amplitudes on ``subset`` (points missing from the state count as 0)."""
    total = 0.0
    for p in subset:
        p = tuple(p)
        if p in state.support:
            total += abs(state[p]) ** 2
    return total


@dataclass(frozen=True)
class GrowthTable:
    times: np.ndarray
    hs_norm: np.ndarray
    masses: np.ndarray  # (times, components)
    s: float

    def rows(self) -> list:
        return [
            [float(t), float(h), *map(float, m)]
            for t, h, m in zip(self.times, self.hs_norm, self.masses)
        ]


def growth_report(placements, sample_times, s: float, dt: float = DEFAULT_DT) -> GrowthTable:
    """h^s norm and per-component masses of the superposed flow at each sample time."""
    times = np.asarray(list(sample_times), dtype=float)
    hs = np.zeros(len(times))
    masses = np.zeros((len(times), len(placements)))
    for k, t in enumerate(times):
        if not placements:
            continue
        st = evolve_components(placements, float(t), dt)
        hs[k] = sobolev_norm(st, s)
        for j, pl in enumerate(placements):
            masses[k, j] = component_mass(st, pl.placed_support)
    return GrowthTable(times, hs, masses, s)


# --------------------------------------------------------------------------
# demo data


def demo_single_rectangle() -> GenerationFamily:
    """One closed rectangle, split into its two diagonals."""
    return GenerationFamily([[(1, 0), (0, 2)], [(0, 0), (1, 2)]])


def demo_decoupled_rectangles() -> list:
    """Two unit squares, the second placed by :func:`find_placement`."""
    sq = SupportSet([(0, 0), (1, 0), (0, 1), (1, 1)])
    v = find_placement(sq, sq)
    return [sq, sq.translate(v)]
