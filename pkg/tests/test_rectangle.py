import math

import numpy as np
import pytest

from resonant.dynamics import ResonanceIndex, integrate, rhs_rs
from resonant.lattice import SupportSet, close_support
from resonant.rectangle import (
    UNIT_SQUARE,
    PlanarPoint,
    RectangleConfig,
    RectangleError,
    beating_halfperiod,
    beating_initial,
    beating_orbit,
    diagonal_fractions,
    h_energy,
    h_tilde,
    heteroclinic_r,
    integrate_rectangle,
    integrate_symmetric,
    lift_to_full,
    planar_trajectory,
    rectangle_rhs,
    restrict_to_rectangle,
    rphi_rhs,
    rtheta_rhs,
    symmetric_lift,
    symmetric_rhs,
    to_planar,
    wrap_angle,
)
from resonant.dynamics import rk4

TILTED = RectangleConfig(((0, 0), (2, 1), (1, 3), (-1, 2)))


def rand_c(rng, n):
    return rng.normal(size=n) + 1j * rng.normal(size=n)


def test_config_validation():
    with pytest.raises(RectangleError):
        RectangleConfig(((0, 0), (1, 0), (2, 1), (0, 1)))
    with pytest.raises(RectangleError):
        RectangleConfig(((0, 0), (0, 0), (1, 1), (1, 1)))
    with pytest.raises(RectangleError):
        RectangleConfig(((0, 0), (1, 0), (1, 1)))
    assert TILTED.diagonals == (((0, 0), (1, 3)), ((2, 1), (-1, 2)))


def test_rectangle_rhs_examples():
    assert np.all(rectangle_rhs(np.zeros(4)) == 0)
    d = rectangle_rhs(np.array([1, 0, 0, 0]))
    assert d[0] == -1j and np.all(d[1:] == 0)


@pytest.mark.parametrize("config", [UNIT_SQUARE, TILTED])
@pytest.mark.parametrize("seed", range(3))
def test_rectangle_rhs_matches_lattice(config, seed):
    a = rand_c(np.random.default_rng(seed), 4)
    st = lift_to_full(config, a)
    full = restrict_to_rectangle(config, rhs_rs(st, ResonanceIndex(st.support)))
    assert np.max(np.abs(rectangle_rhs(a) - full)) <= 1e-14 * max(1, np.max(np.abs(full)))


def test_rectangle_rhs_batched():
    a = rand_c(np.random.default_rng(1), 12).reshape(3, 4)
    assert np.array_equal(rectangle_rhs(a), np.stack([rectangle_rhs(x) for x in a]))


def test_symmetric_rhs_examples():
    assert np.all(symmetric_rhs(np.zeros(2)) == 0)
    d = symmetric_rhs(np.array([1, 0]))
    assert d[0] == -3j and d[1] == 0


@pytest.mark.parametrize("seed", range(3))
def test_symmetric_subspace(seed):
    b = rand_c(np.random.default_rng(seed), 2)
    full = rectangle_rhs(symmetric_lift(b))
    assert abs(full[0] - full[2]) <= 1e-15 * np.max(np.abs(full))
    assert abs(full[1] - full[3]) <= 1e-15 * np.max(np.abs(full))
    assert np.max(np.abs(full[:2] - symmetric_rhs(b))) <= 1e-14 * np.max(np.abs(full))


def test_symmetric_subspace_along_flow():
    b = rand_c(np.random.default_rng(5), 2)
    b /= np.linalg.norm(b)
    _, ys = integrate_rectangle(symmetric_lift(b), 20.0, 1e-3, 100)
    assert np.max(np.abs(ys[:, 0] - ys[:, 2])) <= 1e-10
    assert np.max(np.abs(ys[:, 1] - ys[:, 3])) <= 1e-10


def test_lift_examples():
    z = lift_to_full(UNIT_SQUARE, np.zeros(4))
    assert np.all(z.values == 0) and z.support == UNIT_SQUARE.support
    assert lift_to_full(UNIT_SQUARE, np.ones(4)).mass() == 4
    a = rand_c(np.random.default_rng(2), 4)
    assert np.array_equal(restrict_to_rectangle(TILTED, lift_to_full(TILTED, a)), a)


def test_to_planar_examples():
    rd = to_planar([1, 0])
    assert rd.point.r == 1 and rd.point.phi == 0 and rd.degenerate
    s = math.sqrt(0.5)
    rd = to_planar([s, s])
    assert rd.point.r == pytest.approx(0.5) and rd.point.phi == 0 and not rd.degenerate
    rd = to_planar([s, 1j * s])
    assert rd.point.phi == pytest.approx(math.pi / 2)
    with pytest.raises(ValueError):
        to_planar([0, 0])
    with pytest.raises(ValueError):
        to_planar([1, 1])


def test_wrap_angle_branch():
    assert wrap_angle(math.pi) == math.pi
    assert wrap_angle(-math.pi) == math.pi
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)


def test_rphi_examples():
    assert np.allclose(rphi_rhs(PlanarPoint(0.0, 0.5)), 0)
    assert np.allclose(rphi_rhs((0.0, 0.9)), (-2.4, 0), atol=1e-15)
    assert np.allclose(rphi_rhs((math.pi / 2, 0.5)), 0, atol=1e-15)


def test_h_examples():
    assert h_energy(0.0, 0.9) == pytest.approx(0.27, abs=1e-15)
    assert h_energy(PlanarPoint(0.0, 0.5)) == pytest.approx(0.75)
    phi = math.pi / 3  # cos 2phi = -1/2
    for r in (0.1, 0.5, 0.77):
        assert abs(h_energy(phi, r)) <= 1e-15


def test_hamiltonian_identities():
    rng = np.random.default_rng(0)
    eps = 1e-6
    for _ in range(50):
        phi, r = rng.uniform(-math.pi, math.pi), rng.uniform(0, 1)
        dphi, dr = rphi_rhs((phi, r))
        dh_dr = (h_energy(phi, r + eps) - h_energy(phi, r - eps)) / (2 * eps)
        dh_dphi = (h_energy(phi + eps, r) - h_energy(phi - eps, r)) / (2 * eps)
        # exact partials for comparison at 1e-12
        ex_dr = (1 - 2 * r) * (1 + 2 * math.cos(2 * phi))
        ex_dphi = -4 * r * (1 - r) * math.sin(2 * phi)
        assert abs(ex_dr - dphi) <= 1e-12 and abs(-ex_dphi - dr) <= 1e-12
        assert abs(dh_dr - dphi) <= 1e-8 and abs(-dh_dphi - dr) <= 1e-8


def test_action_angle_against_symmetric_flow():
    # finite-difference the unwrapped angles along the symmetric flow
    b = rand_c(np.random.default_rng(3), 2)
    b /= np.linalg.norm(b)
    h = 1e-4
    _, ys = integrate_symmetric(b, 2 * h, h / 10, 10)
    rd = [to_planar(y, t) for y, t in zip(ys, (0, h, 2 * h))]
    I = np.array([rd[1].I0, rd[1].I1])
    th = np.unwrap([[x.theta0, x.theta1] for x in rd], axis=0)
    dI, dth = rtheta_rhs(I, th[1])
    fd_th = (th[2] - th[0]) / (2 * h)
    fd_I = (np.array([rd[2].I0, rd[2].I1]) - np.array([rd[0].I0, rd[0].I1])) / (2 * h)
    assert np.allclose(fd_th, dI, atol=1e-6) and np.allclose(fd_I, dth, atol=1e-6)


def test_h_tilde_conserved_by_symmetric_flow():
    b = rand_c(np.random.default_rng(4), 2)
    b /= np.linalg.norm(b)
    times, ys = integrate_symmetric(b, 5.0, 1e-3, 500)
    vals = []
    for t, y in zip(times, ys):
        rd = to_planar(y, t)
        vals.append(h_tilde((rd.I0, rd.I1), (rd.theta0, rd.theta1)))
    assert np.ptp(vals) <= 1e-10


def test_heteroclinic():
    assert heteroclinic_r(0.0, 0.3) == pytest.approx(0.3, abs=1e-16)
    r = heteroclinic_r(np.linspace(0, 20, 50), 0.5)
    assert np.all(np.diff(r) >= 0) and r[-1] == pytest.approx(1.0, abs=1e-12)
    c = 2 * math.sqrt(3)
    _, ys = rk4(lambda y: c * y * (1 - y), np.array([0.5]), 1.0, 1e-3)
    assert abs(ys[-1, 0] - heteroclinic_r(1.0, 0.5)) <= 1e-8
    t, eps = 0.7, 1e-5
    deriv = (heteroclinic_r(t + eps, 0.2) - heteroclinic_r(t - eps, 0.2)) / (2 * eps)
    rt = heteroclinic_r(t, 0.2)
    assert abs(deriv - c * rt * (1 - rt)) <= 1e-9
    with pytest.raises(ValueError):
        heteroclinic_r(1.0, 1.0)


def test_heteroclinic_lies_on_zero_level():
    # on h = 0 with cos 2phi = -1/2 and sin 2phi > 0 the planar r obeys the logistic law
    phi = math.pi / 3
    times, ys, _ = planar_trajectory([phi, 0.2], 1.0, 1e-3)
    assert np.max(np.abs(ys[:, 1] - heteroclinic_r(times, 0.2))) <= 1e-8
    assert np.max(np.abs(h_energy(ys[:, 0], ys[:, 1]))) <= 1e-9


@pytest.mark.parametrize("delta", [0.1, 0.25])
def test_beating_orbit(delta):
    orb = beating_orbit(delta, 1e-3)
    assert orb.h_level == pytest.approx(3 * delta * (1 - delta), abs=1e-15)
    assert orb.h_drift <= 1e-9
    assert abs(orb.r_min - delta) <= 1e-6
    assert abs(orb.r[-1] - (1 - delta)) <= 1e-5
    assert orb.clamp_max <= 1e-12
    t_half = np.argmin(np.abs(orb.times - orb.halfperiod))
    assert abs(orb.r[t_half] - delta) <= 1e-5


def test_beating_rejects_center():
    with pytest.raises(ValueError):
        beating_orbit(0.49)
    with pytest.raises(ValueError):
        beating_halfperiod(0.005)


def test_beating_lifted_mass_exchange():
    delta = 0.1
    T = beating_halfperiod(delta)
    st = beating_initial(delta)
    assert st.mass() == pytest.approx(2.0)
    tr = integrate(st, "rs", T, 1e-3, 10_000)
    f0 = diagonal_fractions(UNIT_SQUARE, tr.states[0])
    fT = diagonal_fractions(UNIT_SQUARE, tr.final)
    assert f0[0] == pytest.approx(0.9) and abs(fT[0] - 0.1) <= 1e-5


def test_support_invariance_in_closed_ambient():
    ambient = close_support(SupportSet(list(UNIT_SQUARE.vertices) + [(5, 7), (6, 7), (5, 9)]), 20)
    st = lift_to_full(UNIT_SQUARE, rand_c(np.random.default_rng(9), 4) / 3).extend(ambient)
    tr = integrate(st, "rs", 20.0, 1e-2, 100)
    off = [ambient.index(p) for p in ambient if p not in UNIT_SQUARE.support]
    assert np.max(np.abs(tr.values[:, off])) <= 1e-12


def test_ladder_short():
    rng = np.random.default_rng(7)
    b = rand_c(rng, 2)
    b /= np.linalg.norm(b)
    st = lift_to_full(TILTED, symmetric_lift(b))
    tr = integrate(st, "rs", 5.0, 1e-3, 100)
    _, rect = integrate_rectangle(symmetric_lift(b), 5.0, 1e-3, 100)
    _, sym = integrate_symmetric(b, 5.0, 1e-3, 100)
    full = np.array([restrict_to_rectangle(TILTED, s) for s in tr.states])
    assert np.max(np.abs(full - rect)) <= 1e-8
    assert np.max(np.abs(rect[:, :2] - sym)) <= 1e-8
    rd = to_planar(b)
    _, pl, _ = planar_trajectory([rd.point.phi, rd.point.r], 5.0, 1e-3, 100)
    r = np.abs(sym[:, 0]) ** 2
    phi = wrap_angle(np.angle(sym[:, 1]) - np.angle(sym[:, 0]))
    assert np.max(np.abs(r - pl[:, 1])) <= 1e-8
    assert np.max(np.abs(wrap_angle(phi - pl[:, 0]))) <= 1e-8
