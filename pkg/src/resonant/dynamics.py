"""The resonant cubic system on a finite support of Z^d.

    i d/dt a_p = sum_{(p,q,r,s) in Gamma_0} a_q conj(a_r) a_s

and its gauge-reduced form over positive-area rectangles. Sums run over a
precomputed :class:`ResonanceIndex` whose quadruples are sorted by target,
so every per-target reduction happens in a fixed order and results are
bitwise reproducible.

All array-level kernels accept a trailing mode axis and any number of
leading batch axes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .lattice import SupportSet, as_point, enumerate_gamma0, norm2

DEFAULT_DT = 1e-3
DEFAULT_SAMPLE_EVERY = 100
_MAX_ORACLE_GRID = 1 << 24


class SupportMismatch(ValueError):
    pass


class IntegrationError(RuntimeError):
    pass


class ImaginaryResidueError(ArithmeticError):
    """A quantity that must be real came out with a large imaginary part."""


# --------------------------------------------------------------------------
# states


class SpectrumState:
    """Complex amplitudes on a finite support. Value semantics: never mutated."""

    __slots__ = ("support", "values")

    def __init__(self, support: SupportSet, values=None):
        self.support = support
        if values is None:
            values = np.zeros(len(support), dtype=complex)
        arr = np.array(values, dtype=complex)
        if arr.shape != (len(support),):
            raise SupportMismatch(f"expected {len(support)} amplitudes, got shape {arr.shape}")
        arr.setflags(write=False)
        self.values = arr

    @property
    def dim(self) -> int:
        return self.support.dim

    @classmethod
    def from_mapping(cls, amplitudes: dict, dim: Optional[int] = None) -> "SpectrumState":
        support = SupportSet(amplitudes.keys(), dim=dim)
        vals = [amplitudes[p] if p in amplitudes else amplitudes[tuple(p)] for p in support]
        return cls(support, vals)

    def as_dict(self) -> dict:
        return dict(zip(self.support.points, self.values.tolist()))

    def __getitem__(self, p) -> complex:
        return complex(self.values[self.support.index(as_point(p))])

    def __len__(self) -> int:
        return len(self.support)

    def __repr__(self) -> str:
        return f"SpectrumState(dim={self.dim}, modes={len(self)})"

    def with_values(self, values) -> "SpectrumState":
        return SpectrumState(self.support, values)

    def scaled(self, factor: complex) -> "SpectrumState":
        return SpectrumState(self.support, factor * self.values)

    def restrict(self, support: SupportSet) -> "SpectrumState":
        idx = [self.support.index(p) for p in support]
        return SpectrumState(support, self.values[idx])

    def extend(self, support: SupportSet) -> "SpectrumState":
        """Embed into a larger support, zero elsewhere."""
        out = np.zeros(len(support), dtype=complex)
        for p, v in zip(self.support.points, self.values):
            out[support.index(p)] = v
        return SpectrumState(support, out)

    def mass(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2))


def zero_state(support: SupportSet) -> SpectrumState:
    return SpectrumState(support)


def random_state(support: SupportSet, rng, mass: Optional[float] = 1.0) -> SpectrumState:
    """Amplitudes uniform on the unit disk, rescaled to ``mass`` (None keeps raw draws).

    ``rng`` is an int seed or a numpy Generator.
    """
    rng = np.random.default_rng(rng)
    n = len(support)
    rad = np.sqrt(rng.uniform(0.0, 1.0, n))
    ang = rng.uniform(0.0, 2 * np.pi, n)
    vals = rad * np.exp(1j * ang)
    if mass is not None:
        m = np.sum(np.abs(vals) ** 2)
        if m > 0:
            vals = vals * math.sqrt(mass / m)
    return SpectrumState(support, vals)


# --------------------------------------------------------------------------
# interaction index


class _IndexArrays:
    """Shared reduction kernels over integer quadruple arrays p, q, r, s."""

    n_modes: int

    def _set_arrays(self, arr: np.ndarray) -> None:
        self.p, self.q, self.r, self.s = arr
        if arr.shape[1]:
            starts = np.concatenate(([0], np.flatnonzero(np.diff(self.p)) + 1))
        else:
            starts = np.zeros(0, dtype=np.intp)
        self._starts = starts
        self._targets = self.p[starts]

    def reduce(self, terms: np.ndarray) -> np.ndarray:
        """Sum per-quadruple terms into per-target totals (fixed order)."""
        out = np.zeros(terms.shape[:-1] + (self.n_modes,), dtype=terms.dtype)
        if len(self._starts):
            out[..., self._targets] = np.add.reduceat(terms, self._starts, axis=-1)
        return out

    def trilinear(self, a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
        """R[a, b, c]_p = sum a_q conj(b_r) c_s over this index."""
        return self.reduce(a[..., self.q] * np.conj(b[..., self.r]) * c[..., self.s])


class ResonanceIndex(_IndexArrays):
    """Gamma_0 (or Gamma'_0) over a support as integer index arrays.

    ``p, q, r, s`` hold positions into ``support.points``; rows are sorted
    lexicographically so each target's terms are contiguous.
    """

    def __init__(self, support: SupportSet, nondegenerate: bool = False):
        self.support = support
        self.n_modes = len(support)
        self.nondegenerate = nondegenerate
        quads = enumerate_gamma0(support, include_degenerate=not nondegenerate)
        self.quadruples = quads
        arr = np.empty((4, len(quads)), dtype=np.intp)
        for k, quad in enumerate(quads):
            arr[:, k] = [support.index(x) for x in quad]
        self._set_arrays(arr)
        self.coords = np.array(support.points, dtype=float).reshape(len(support), support.dim)
        self.norms2 = np.array([float(norm2(x)) for x in support.points])

    def __len__(self) -> int:
        return len(self.quadruples)

    def __repr__(self) -> str:
        kind = "Gamma0'" if self.nondegenerate else "Gamma0"
        return f"ResonanceIndex({kind}, modes={len(self.support)}, quadruples={len(self)})"

    def adjacency(self, target) -> list:
        """The (q, r, s) partners of one target point, in summation order."""
        i = self.support.index(as_point(target))
        sel = np.flatnonzero(self.p == i)
        pts = self.support.points
        return [(pts[self.q[k]], pts[self.r[k]], pts[self.s[k]]) for k in sel]


class EnsembleIndex(_IndexArrays):
    """Several independent systems stacked block-diagonally.

    Lets one RK4 run advance many small systems at once; each block sees
    exactly the terms (and summation order) of its own index.
    """

    def __init__(self, indices: Sequence[ResonanceIndex]):
        kinds = {ix.nondegenerate for ix in indices}
        if len(kinds) != 1:
            raise ValueError("cannot mix Gamma_0 and Gamma'_0 indices")
        self.nondegenerate = kinds.pop()
        self.indices = list(indices)
        sizes = [ix.n_modes for ix in indices]
        self.offsets = np.concatenate(([0], np.cumsum(sizes)))
        self.n_modes = int(self.offsets[-1])
        parts = [np.stack([ix.p, ix.q, ix.r, ix.s]) + off for ix, off in zip(indices, self.offsets)]
        self._set_arrays(np.concatenate(parts, axis=1) if parts else np.zeros((4, 0), dtype=np.intp))

    def join(self, arrays) -> np.ndarray:
        return np.concatenate([np.asarray(a, dtype=complex) for a in arrays], axis=-1)

    def split(self, values: np.ndarray) -> list:
        return [values[..., a:b] for a, b in zip(self.offsets[:-1], self.offsets[1:])]


def _check_support(state: SpectrumState, index: ResonanceIndex) -> None:
    if state.support != index.support:
        raise SupportMismatch("state and index live on different supports")


def _rs_array(index: ResonanceIndex) -> Callable:
    if index.nondegenerate:
        raise ValueError("RS needs the full Gamma_0 index (degenerate quadruples included)")

    def f(a):
        return -1j * index.trilinear(a, a, a)

    return f


def _rsadj_array(index: ResonanceIndex) -> Callable:
    if not index.nondegenerate:
        raise ValueError("RSAdj needs a Gamma'_0 index (nondegenerate=True)")

    def f(a):
        return -1j * (index.trilinear(a, a, a) - np.abs(a) ** 2 * a)

    return f


def rhs_function(index: ResonanceIndex, system: str) -> Callable:
    """Array-level right-hand side for ``system`` in {'rs', 'rsadj'}."""
    if system == "rs":
        return _rs_array(index)
    if system == "rsadj":
        return _rsadj_array(index)
    raise ValueError(f"unknown system {system!r}")


def rhs_rs(state: SpectrumState, index: ResonanceIndex) -> SpectrumState:
    _check_support(state, index)
    return state.with_values(_rs_array(index)(state.values))


def rhs_rsadj(state: SpectrumState, index: ResonanceIndex) -> SpectrumState:
    _check_support(state, index)
    return state.with_values(_rsadj_array(index)(state.values))


def trilinear_r(a: SpectrumState, b: SpectrumState, c: SpectrumState, index: ResonanceIndex) -> SpectrumState:
    for x in (a, b, c):
        _check_support(x, index)
    return a.with_values(index.trilinear(a.values, b.values, c.values))


# --------------------------------------------------------------------------
# observables


@dataclass(frozen=True)
class ObservableReport:
    mass: float
    momentum: tuple
    energy: float
    hamiltonian: float


def _hamiltonian_array(values: np.ndarray, index: ResonanceIndex) -> np.ndarray:
    a = values
    terms = np.conj(a[..., index.p]) * a[..., index.q] * np.conj(a[..., index.r]) * a[..., index.s]
    h = terms.sum(axis=-1)
    scale = np.abs(terms).sum(axis=-1)
    abs2 = np.abs(a) ** 2
    mass = abs2.sum(axis=-1)
    if index.nondegenerate:
        # degenerate part of Gamma_0 in closed form: 2 mass^2 - sum |a_p|^4
        h = h + 2 * mass**2 - (abs2**2).sum(axis=-1)
    bound = 1e-12 * np.maximum(mass**2, scale)
    if np.any(np.abs(h.imag) > bound):
        raise ImaginaryResidueError(
            f"hamiltonian imaginary part {np.max(np.abs(h.imag)):.3e} exceeds bound; index is inconsistent"
        )
    return h.real


def _observables_array(values: np.ndarray, index: ResonanceIndex):
    abs2 = np.abs(values) ** 2
    mass = abs2.sum(axis=-1)
    momentum = abs2 @ index.coords
    energy = abs2 @ index.norms2
    ham = _hamiltonian_array(values, index)
    return mass, momentum, energy, ham


def observables(state: SpectrumState, index: ResonanceIndex) -> ObservableReport:
    """Mass, momentum, energy and the Gamma_0 Hamiltonian of one state.

    With a Gamma'_0 index the degenerate contribution is added in closed
    form, so both index kinds report the same Hamiltonian.
    """
    _check_support(state, index)
    m, mom, e, h = _observables_array(state.values, index)
    return ObservableReport(float(m), tuple(float(x) for x in mom), float(e), float(h))


def hamiltonian_l4_oracle(state: SpectrumState) -> float:
    """Fourth power of the L^4 norm of the linear Schrodinger flow on T^d x [0, 2pi].

    The measure is normalized to total mass one, which makes the constant
    state a_0 = 1 return exactly 1. The field is synthesized by an inverse FFT
    on a grid fine enough that the quartic trigonometric polynomial is
    integrated exactly by the grid average.
    """
    support = state.support
    if len(support) == 0:
        return 0.0
    d = support.dim
    pts = np.array(support.points, dtype=np.int64).reshape(len(support), d)
    # Gamma_0 is translation invariant; shifting keeps the grid small
    pts = pts - pts.min(axis=0)
    ext = pts.max(axis=0)
    n2 = (pts**2).sum(axis=1)
    shape = tuple(int(4 * e + 1) for e in ext) + (int(4 * n2.max() + 1),)
    if math.prod(shape) > _MAX_ORACLE_GRID:
        raise OverflowError(f"oracle grid {shape} too large")
    coeffs = np.zeros(shape, dtype=complex)
    idx = tuple(pts[:, k] for k in range(d)) + ((-n2) % shape[-1],)
    np.add.at(coeffs, idx, state.values)
    field = np.fft.ifftn(coeffs) * coeffs.size
    return float(np.mean(np.abs(field) ** 4))


def quadratic_observable_derivative(state: SpectrumState, index: ResonanceIndex, g: Callable) -> float:
    """d/dt of sum_p g(p) |a_p|^2 under RS, via the symmetrized Gamma_0 sum."""
    _check_support(state, index)
    if index.nondegenerate:
        raise ValueError("needs the full Gamma_0 index")
    gv = np.array([float(g(p)) for p in state.support.points])
    a = state.values
    bracket = gv[index.p] + gv[index.r] - gv[index.q] - gv[index.s]
    x = np.conj(a[index.p]) * a[index.q] * np.conj(a[index.r]) * a[index.s]
    terms = bracket * x
    total = -0.5j * terms.sum()
    scale = max(float(np.abs(terms).sum()), 1.0)
    if abs(total.imag) > 1e-12 * scale:
        raise ImaginaryResidueError(f"imaginary residue {total.imag:.3e}")
    return float(total.real)


def sobolev_weights(support: SupportSet, s: float) -> np.ndarray:
    n2 = np.array([float(norm2(p)) for p in support.points])
    return (1.0 + n2) ** s


def sobolev_norm(state: SpectrumState, s: float = 1.0) -> float:
    """(sum_p (1 + |p|^2)^s |a_p|^2)^(1/2)."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    if len(state) == 0:
        return 0.0
    w = sobolev_weights(state.support, s)
    return float(np.sqrt(np.sum(w * np.abs(state.values) ** 2)))


def h1_inner(x: SpectrumState, y: SpectrumState) -> complex:
    w = sobolev_weights(x.support, 1.0)
    return complex(np.sum(w * x.values * np.conj(y.values)))


def l2_inner(x: SpectrumState, y: SpectrumState) -> complex:
    return complex(np.sum(x.values * np.conj(y.values)))


# --------------------------------------------------------------------------
# time integration


def _step_plan(t_end: float, dt: float) -> tuple:
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_end < 0:
        raise ValueError("t_end must be nonnegative")
    if t_end == 0:
        return 0, 0.0
    n = max(1, math.ceil(t_end / dt - 1e-9))
    return n, t_end / n


def rk4(f: Callable, y0: np.ndarray, t_end: float, dt: float, sample_every: int = 1):
    """Classical fixed-step RK4 for autonomous y' = f(y).

    The step is shrunk slightly, if needed, so that an integer number of
    steps lands exactly on ``t_end``. Returns (times, samples) with samples
    taken every ``sample_every`` steps, always including both endpoints.
    """
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    n, h = _step_plan(t_end, dt)
    y = np.array(y0, dtype=np.result_type(y0, float))
    times = [0.0]
    samples = [y.copy()]
    for k in range(1, n + 1):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise IntegrationError(f"non-finite amplitude at step {k}")
        if k % sample_every == 0 or k == n:
            times.append(k * h if k < n else float(t_end))
            samples.append(y.copy())
    return np.array(times), np.array(samples)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    values: np.ndarray  # (samples, modes)
    support: SupportSet
    reports: tuple
    system: str = "rs"
    drift: dict = field(default_factory=dict)

    @property
    def states(self) -> list:
        return [SpectrumState(self.support, v) for v in self.values]

    @property
    def final(self) -> SpectrumState:
        return SpectrumState(self.support, self.values[-1])

    def __len__(self) -> int:
        return len(self.times)


def _rel_drift(series: np.ndarray) -> float:
    ref = series[0]
    denom = abs(ref) if ref != 0 else 1.0
    return float(np.max(np.abs(series - ref)) / denom)


def _build_trajectory(times, values, index, system) -> Trajectory:
    m, mom, e, h = _observables_array(values, index)
    reports = tuple(
        ObservableReport(float(m[k]), tuple(float(x) for x in mom[k]), float(e[k]), float(h[k]))
        for k in range(len(times))
    )
    drift = {"mass": _rel_drift(m), "energy": _rel_drift(e), "hamiltonian": _rel_drift(h)}
    for j in range(mom.shape[1]):
        drift[f"momentum_{j + 1}"] = _rel_drift(mom[:, j])
    drift["max"] = max(drift.values())
    return Trajectory(np.asarray(times), np.asarray(values), index.support, reports, system, drift)


def build_index(support: SupportSet, system: str) -> ResonanceIndex:
    return ResonanceIndex(support, nondegenerate=(system == "rsadj"))


def integrate(
    state0: SpectrumState,
    system: str = "rs",
    t_end: float = 1.0,
    dt: float = DEFAULT_DT,
    sample_every: int = DEFAULT_SAMPLE_EVERY,
    index: Optional[ResonanceIndex] = None,
) -> Trajectory:
    """RK4 trajectory of RS or RSAdj with an observable report per sample.

    Relative drifts (absolute when the initial value is 0) of every
    conserved quantity are collected in ``Trajectory.drift``.
    """
    if index is None:
        index = build_index(state0.support, system)
    _check_support(state0, index)
    f = rhs_function(index, system)
    times, vals = rk4(f, state0.values, t_end, dt, sample_every)
    return _build_trajectory(times, vals, index, system)


def integrate_ensemble(
    states: Sequence[SpectrumState],
    system: str = "rs",
    t_end: float = 1.0,
    dt: float = DEFAULT_DT,
    sample_every: int = DEFAULT_SAMPLE_EVERY,
) -> list:
    """Integrate independent states together; one Trajectory per state."""
    indices = [build_index(st.support, system) for st in states]
    ens = EnsembleIndex(indices)
    times, vals = rk4(rhs_function(ens, system), ens.join([st.values for st in states]), t_end, dt, sample_every)
    return [_build_trajectory(times, v, ix, system) for v, ix in zip(ens.split(vals), indices)]


def flow(state0: SpectrumState, system: str, t: float, dt: float = DEFAULT_DT, index=None) -> SpectrumState:
    """Final state only."""
    if index is None:
        index = build_index(state0.support, system)
    f = rhs_function(index, system)
    _, vals = rk4(f, state0.values, t, dt, sample_every=1 << 62)
    return state0.with_values(vals[-1])


def gauge_map(traj: Trajectory, direction: str = "forward", mass_rtol: float = 1e-8) -> Trajectory:
    """a_p(t) -> a_p(t) exp(+-i G t), G = 2 mass.

    ``forward`` sends RS solutions to RSAdj solutions; ``inverse`` undoes it.
    """
    if direction not in ("forward", "inverse"):
        raise ValueError("direction must be 'forward' or 'inverse'")
    masses = np.sum(np.abs(traj.values) ** 2, axis=-1)
    m0 = masses[0]
    if np.max(np.abs(masses - m0)) > mass_rtol * max(m0, 1e-300) and m0 > 0:
        raise ValueError("mass is not constant along the trajectory")
    sign = 1.0 if direction == "forward" else -1.0
    phase = np.exp(sign * 2j * m0 * traj.times)
    system = {"forward": "rsadj", "inverse": "rs"}[direction]
    return Trajectory(traj.times, traj.values * phase[:, None], traj.support, traj.reports, system, dict(traj.drift))


def d1_explicit(state0: SpectrumState, t: float) -> SpectrumState:
    """Closed-form RS flow in d = 1: each mode rotates at b_p = 2 mass - |a_p(0)|^2.

    With i a' = b a the rotation is exp(-i b_p t); this sign is the one the
    integrator reproduces.
    """
    if state0.dim != 1:
        raise ValueError("closed form exists only in d = 1")
    a = state0.values
    b = 2 * np.sum(np.abs(a) ** 2) - np.abs(a) ** 2
    return state0.with_values(np.exp(-1j * b * t) * a)


def scaling_orbit_check(state0: SpectrumState, lam: float, t: float, dt: float = DEFAULT_DT, index=None) -> float:
    """max |lam * a(lam^2 t) - b(t)| where b starts from lam * a(0)."""
    if not 1 / 8 <= lam <= 8:
        raise ValueError("lambda outside [1/8, 8]")
    if index is None:
        index = build_index(state0.support, "rs")
    first = flow(state0, "rs", lam**2 * t, dt, index)
    second = flow(state0.scaled(lam), "rs", t, dt, index)
    return float(np.max(np.abs(lam * first.values - second.values), initial=0.0))


def evolve_xi_family(
    base: SpectrumState,
    xi: Sequence[float],
    phi: Sequence[float],
    t: float,
    dt: float = DEFAULT_DT,
    system: str = "rs",
) -> list:
    """phi(xi) * a(phi(xi)^2 t) for every tabulated xi.

    One dense run of the flow up to max phi^2 t, read off by linear
    interpolation. Returns a list of (xi, SpectrumState).
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    xi = np.asarray(xi, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if xi.shape != phi.shape or not np.all(np.isfinite(phi)):
        raise ValueError("envelope must be finite and tabulated on the xi samples")
    taus = phi**2 * t
    horizon = float(taus.max(initial=0.0))
    index = build_index(base.support, system)
    times, vals = rk4(rhs_function(index, system), base.values, horizon, dt, 1)
    out = []
    for x, ph, tau in zip(xi, phi, taus):
        if horizon == 0:
            a = vals[0]
        else:
            k = min(int(np.searchsorted(times, tau, side="right")) - 1, len(times) - 2)
            w = (tau - times[k]) / (times[k + 1] - times[k])
            a = (1 - w) * vals[k] + w * vals[k + 1]
        out.append((float(x), base.with_values(ph * a)))
    return out


# --------------------------------------------------------------------------
# diagnostics


def trilinear_ratio(a1: SpectrumState, a2: SpectrumState, a3: SpectrumState, index: ResonanceIndex):
    """||R[a1,a2,a3]||_l2 over the smallest l2*h1*h1 product, or None if that is 0."""
    num = float(np.linalg.norm(trilinear_r(a1, a2, a3, index).values))
    l2 = [float(np.linalg.norm(x.values)) for x in (a1, a2, a3)]
    h1 = [sobolev_norm(x, 1.0) for x in (a1, a2, a3)]
    # the minimum over orderings only depends on which factor carries l2
    den = min(l2[i] * h1[(i + 1) % 3] * h1[(i + 2) % 3] for i in range(3))
    if den == 0:
        return None
    return num / den


@dataclass(frozen=True)
class RatioReport:
    max_ratio: float
    mean_ratio: float
    used: int
    skipped: int


def estimate_ratio_diagnostic(samples: int, support: SupportSet, seed: int, sparsity: float = 0.0) -> RatioReport:
    """Empirical trilinear-to-Strichartz ratio over seeded random triples.

    ``sparsity`` zeroes each amplitude with that probability, which lets
    all-zero draws occur; those are skipped and counted.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    index = ResonanceIndex(support)
    ratios = []
    skipped = 0
    for _ in range(samples):
        trip = []
        for _ in range(3):
            st = random_state(support, rng, mass=None)
            if sparsity > 0:
                keep = rng.uniform(size=len(support)) >= sparsity
                st = st.with_values(st.values * keep)
            trip.append(st)
        r = trilinear_ratio(*trip, index)
        if r is None:
            skipped += 1
            continue
        if not math.isfinite(r):
            raise ArithmeticError("non-finite ratio")
        ratios.append(r)
    if not ratios:
        return RatioReport(float("nan"), float("nan"), 0, skipped)
    return RatioReport(max(ratios), float(np.mean(ratios)), len(ratios), skipped)


@dataclass(frozen=True)
class StabilityReport:
    times: np.ndarray
    distance: np.ndarray  # h1 distance per sample
    delta: float
    theta: float
    c_hat: float

    def envelope(self) -> np.ndarray:
        return self.delta * np.exp(self.c_hat * self.theta**2 * self.times)


def stability_divergence(
    a0: SpectrumState, b0: SpectrumState, t_end: float, dt: float = DEFAULT_DT, sample_every: int = 10
) -> StabilityReport:
    """h1 distance between two RS solutions and the smallest C fitting delta e^{C theta^2 t}."""
    if a0.support != b0.support:
        raise SupportMismatch("states must share a support")
    index = ResonanceIndex(a0.support)
    f = _rs_array(index)
    y0 = np.stack([a0.values, b0.values])
    times, vals = rk4(f, y0, t_end, dt, sample_every)
    w = sobolev_weights(a0.support, 1.0)
    dist = np.sqrt(np.sum(w * np.abs(vals[:, 0] - vals[:, 1]) ** 2, axis=-1))
    norms = np.sqrt(np.sum(w * np.abs(vals) ** 2, axis=-1))
    theta = float(np.max(norms.sum(axis=-1), initial=0.0))
    delta = float(dist[0])
    c_hat = 0.0
    if delta > 0 and theta > 0:
        pos = times > 0
        with np.errstate(divide="ignore"):
            rates = np.log(dist[pos] / delta) / (theta**2 * times[pos])
        if rates.size:
            c_hat = max(0.0, float(np.max(rates)))
    return StabilityReport(times, dist, delta, theta, c_hat)
