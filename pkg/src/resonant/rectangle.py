"""Four-mode rectangle subsystem and its reductions.

Ladder of models, each exact on an invariant subspace of the previous one:

    full RS on a rectangle support
      -> 4-mode system (rectangle_rhs)
      -> symmetric 2-mode system, a0 = a2 = b0, a1 = a3 = b1 (symmetric_rhs)
      -> planar (phi, r) system with conserved h (rphi_rhs)
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import SpectrumState, rk4
from .lattice import SupportSet, as_point, norm2


class RectangleError(ValueError):
    pass


@dataclass(frozen=True)
class RectangleConfig:
    """Vertices p0..p3 in cyclic order; (p0, p2) and (p1, p3) are the diagonals."""

    vertices: tuple

    def __post_init__(self):
        vs = tuple(as_point(v) for v in self.vertices)
        if len(vs) != 4:
            raise RectangleError("a rectangle has four vertices")
        if len({len(v) for v in vs}) != 1:
            raise RectangleError("vertices of mixed dimension")
        p0, p1, p2, p3 = vs
        if tuple(a + c for a, c in zip(p0, p2)) != tuple(b + d for b, d in zip(p1, p3)):
            raise RectangleError("diagonals do not share a midpoint")
        if norm2(p0) + norm2(p2) != norm2(p1) + norm2(p3):
            raise RectangleError("diagonals have different lengths")
        if p0 in (p1, p3):
            raise RectangleError("rectangle has zero area")
        object.__setattr__(self, "vertices", vs)

    @property
    def support(self) -> SupportSet:
        return SupportSet(self.vertices)

    @property
    def diagonals(self) -> tuple:
        v = self.vertices
        return (v[0], v[2]), (v[1], v[3])


UNIT_SQUARE = RectangleConfig(((0, 0), (1, 0), (1, 1), (0, 1)))

_NEXT1 = np.array([1, 2, 3, 0])
_NEXT2 = np.array([2, 3, 0, 1])
_PREV1 = np.array([3, 0, 1, 2])
_SWAP = np.array([1, 0])


def rectangle_rhs(a: np.ndarray) -> np.ndarray:
    """d/dt of the four rectangle amplitudes; the last axis has length 4."""
    a = np.asarray(a, dtype=complex)
    a1, a2, a3 = a[..., _NEXT1], a[..., _NEXT2], a[..., _PREV1]  # a_{j+1}, a_{j+2}, a_{j-1}
    ab = a.real**2 + a.imag**2
    others = ab.sum(axis=-1, keepdims=True) - ab
    return -1j * (2 * a1 * np.conj(a2) * a3 + (2 * others + ab) * a)


def symmetric_rhs(b: np.ndarray) -> np.ndarray:
    """d/dt of (b0, b1) on the subspace a0 = a2, a1 = a3."""
    b = np.asarray(b, dtype=complex)
    bn = b[..., _SWAP]
    ab = b.real**2 + b.imag**2
    return -1j * (-ab * b + 4 * b * ab.sum(axis=-1, keepdims=True) + 2 * bn * bn * np.conj(b))


def lift_to_full(config: RectangleConfig, a) -> SpectrumState:
    """State on exactly the four vertices with amplitudes a_j at p_j."""
    if not isinstance(config, RectangleConfig):
        config = RectangleConfig(config)
    a = np.asarray(a, dtype=complex)
    if a.shape != (4,):
        raise RectangleError("need four amplitudes")
    support = config.support
    vals = np.zeros(4, dtype=complex)
    for p, x in zip(config.vertices, a):
        vals[support.index(p)] = x
    return SpectrumState(support, vals)


def restrict_to_rectangle(config: RectangleConfig, state: SpectrumState) -> np.ndarray:
    return np.array([state[p] for p in config.vertices])


def symmetric_lift(b) -> np.ndarray:
    b0, b1 = b
    return np.array([b0, b1, b0, b1], dtype=complex)


# --------------------------------------------------------------------------
# planar reduction


@dataclass(frozen=True)
class PlanarPoint:
    phi: float
    r: float


@dataclass(frozen=True)
class PlanarReading:
    point: PlanarPoint
    I0: float
    I1: float
    theta0: float
    theta1: float
    mass: float
    degenerate: bool


def wrap_angle(x):
    """Reduce to (-pi, pi]."""
    y = np.mod(np.asarray(x, dtype=float) + np.pi, 2 * np.pi) - np.pi
    y = np.where(y == -np.pi, np.pi, y)
    return float(y) if np.ndim(y) == 0 else y


def to_planar(b, t: float = 0.0, mass_tol: float = 1e-9) -> PlanarReading:
    """(phi, r) = (arg b1 - arg b0, |b0|^2) for mass-normalized (b0, b1).

    The angles carry the linear drift theta_j = arg b_j + 4 m t, the sign
    for which theta_j obey the action-angle equations; it cancels in phi.
    At r in {0, 1} phi is undefined and is reported as 0 with
    ``degenerate=True``.
    """
    b0, b1 = complex(b[0]), complex(b[1])
    I0, I1 = abs(b0) ** 2, abs(b1) ** 2
    m = I0 + I1
    if m == 0:
        raise ValueError("zero state has no planar reading")
    if abs(m - 1) > mass_tol:
        raise ValueError(f"mass {m} is not normalized to 1")
    degenerate = b0 == 0 or b1 == 0
    th0 = math.atan2(b0.imag, b0.real) + 4 * m * t
    th1 = math.atan2(b1.imag, b1.real) + 4 * m * t
    phi = 0.0 if degenerate else wrap_angle(th1 - th0)
    return PlanarReading(PlanarPoint(phi, I0), I0, I1, th0, th1, m, degenerate)


def rtheta_rhs(I, theta) -> tuple:
    """Action-angle equations for the normalized symmetric system."""
    I = np.asarray(I, dtype=float)
    th = np.asarray(theta, dtype=float)
    dth = th[::-1] - th  # theta_{j+1} - theta_j
    return I - 2 * I[::-1] * np.cos(2 * dth), 4 * I * I[::-1] * np.sin(2 * dth)


def h_tilde(I, theta) -> float:
    return 0.5 * (I[0] ** 2 + I[1] ** 2) - 2 * I[0] * I[1] * math.cos(2 * (theta[0] - theta[1]))


def rphi_rhs(y) -> np.ndarray:
    """(dphi/dt, dr/dt) for y = (phi, r); extra leading axes allowed."""
    if isinstance(y, PlanarPoint):
        y = (y.phi, y.r)
    y = np.asarray(y, dtype=float)
    phi, r = y[..., 0], y[..., 1]
    return np.stack([(1 - 2 * r) * (1 + 2 * np.cos(2 * phi)), 4 * r * (1 - r) * np.sin(2 * phi)], axis=-1)


def h_energy(phi, r=None):
    """h(phi, r) = r (1 - r) (1 + 2 cos 2 phi)."""
    if isinstance(phi, PlanarPoint):
        phi, r = phi.phi, phi.r
    return r * (1 - r) * (1 + 2 * np.cos(2 * phi))


def heteroclinic_r(t, r0: float):
    """Solution of r' = 2 sqrt(3) r (1 - r) through r(0) = r0 (the h = 0 level)."""
    if not 0 < r0 < 1:
        raise ValueError("r0 must lie in (0, 1)")
    e = np.exp(2 * math.sqrt(3) * np.asarray(t, dtype=float))
    return r0 * e / (1 + r0 * (e - 1))


# --------------------------------------------------------------------------
# beating orbits


@dataclass(frozen=True)
class BeatingOrbit:
    delta: float
    halfperiod: float
    times: np.ndarray
    phi: np.ndarray
    r: np.ndarray
    h_level: float
    h_drift: float
    clamp_max: float

    @property
    def r_min(self) -> float:
        return float(self.r.min())

    @property
    def r_max(self) -> float:
        return float(self.r.max())

    def report(self) -> dict:
        return {
            "delta": self.delta,
            "halfperiod": self.halfperiod,
            "h_level": self.h_level,
            "r_min": self.r_min,
            "r_max": self.r_max,
            "drift": self.h_drift,
        }


def _rk4_step(y, h):
    k1 = rphi_rhs(y)
    k2 = rphi_rhs(y + 0.5 * h * k1)
    k3 = rphi_rhs(y + 0.5 * h * k2)
    k4 = rphi_rhs(y + h * k3)
    return y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)


def _clamp(y):
    r = min(max(y[1], 0.0), 1.0)
    return np.array([y[0], r]), abs(r - y[1])


def beating_halfperiod(delta: float, dt: float = 1e-3, t_max: float = 1e4, tol: float = 1e-10) -> float:
    """First time r reaches its minimum on the orbit through (0, 1 - delta).

    Found as the first upward crossing of phi = 0 (where dr/dt turns from
    negative to positive), refined by bisection on a partial RK4 step.
    """
    if not 0.01 < delta < 0.49:
        raise ValueError("delta must lie in (0.01, 0.49)")
    y = np.array([0.0, 1.0 - delta])
    t = 0.0
    while t < t_max:
        y_new, _ = _clamp(_rk4_step(y, dt))
        if y[0] < 0 <= y_new[0]:
            lo, hi = 0.0, dt
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if _rk4_step(y, mid)[0] < 0:
                    lo = mid
                else:
                    hi = mid
            return t + 0.5 * (lo + hi)
        y = y_new
        t += dt
    raise RuntimeError(f"no half period detected before t = {t_max}")


def planar_trajectory(y0, t_end: float, dt: float = 1e-3, sample_every: int = 1):
    """RK4 on the (phi, r) system with r clamped to [0, 1] after each step.

    Returns (times, samples, max clamp magnitude).
    """
    from .dynamics import _step_plan

    n, h = _step_plan(t_end, dt)
    y = np.asarray(y0, dtype=float)
    times, out = [0.0], [y.copy()]
    clamp_max = 0.0
    for k in range(1, n + 1):
        y, c = _clamp(_rk4_step(y, h))
        clamp_max = max(clamp_max, c)
        if k % sample_every == 0 or k == n:
            times.append(k * h if k < n else t_end)
            out.append(y.copy())
    return np.array(times), np.array(out), clamp_max


def beating_orbit(delta: float, dt: float = 1e-3) -> BeatingOrbit:
    """Periodic orbit from (phi, r) = (0, 1 - delta) over one full period 2T."""
    T = beating_halfperiod(delta, dt)
    times, ys, clamp_max = planar_trajectory([0.0, 1.0 - delta], 2 * T, dt)
    h = h_energy(ys[:, 0], ys[:, 1])
    h0 = 3 * delta * (1 - delta)
    return BeatingOrbit(
        delta=delta,
        halfperiod=T,
        times=times,
        phi=ys[:, 0],
        r=ys[:, 1],
        h_level=float(h[0]),
        h_drift=float(np.max(np.abs(h - h0))),
        clamp_max=clamp_max,
    )


def beating_initial(delta: float, config: RectangleConfig = UNIT_SQUARE) -> SpectrumState:
    """Full-lattice state whose symmetric reduction sits at (phi, r) = (0, 1 - delta).

    The diagonal (p0, p2) starts with mass fraction 1 - delta; the reduced
    mass |b0|^2 + |b1|^2 is 1, so the lattice mass is 2.
    """
    b = np.array([math.sqrt(1 - delta), math.sqrt(delta)], dtype=complex)
    return lift_to_full(config, symmetric_lift(b))


def diagonal_fractions(config: RectangleConfig, state: SpectrumState) -> tuple:
    a = restrict_to_rectangle(config, state)
    w = np.abs(a) ** 2
    tot = w.sum()
    return float((w[0] + w[2]) / tot), float((w[1] + w[3]) / tot)


def integrate_rectangle(a0, t_end: float, dt: float = 1e-3, sample_every: int = 1):
    return rk4(rectangle_rhs, np.asarray(a0, dtype=complex), t_end, dt, sample_every)


def integrate_symmetric(b0, t_end: float, dt: float = 1e-3, sample_every: int = 1):
    return rk4(symmetric_rhs, np.asarray(b0, dtype=complex), t_end, dt, sample_every)
