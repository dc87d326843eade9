"""
Beating on a rectangle
======================

Start with almost all the mass on one diagonal. The planar (phi, r)
reduction predicts a periodic exchange between the diagonals; the lattice
flow reproduces it.
"""

from resonant.dynamics import flow
from resonant.rectangle import UNIT_SQUARE, beating_initial, beating_orbit, diagonal_fractions, h_energy

delta = 0.1
orbit = beating_orbit(delta, dt=1e-3)
print(f"half period T = {orbit.halfperiod:.10f}")
print(f"h level {orbit.h_level:.12f}, drift {orbit.h_drift:.1e}")
print(f"r ranges over [{orbit.r_min:.9f}, {orbit.r_max:.9f}]")

# A coarse look at one full period.
step = len(orbit.times) // 8
for t, phi, r in zip(orbit.times[::step], orbit.phi[::step], orbit.r[::step]):
    print(f"  t={t:6.3f}  phi={phi:+.4f}  r={r:.6f}  h={h_energy(phi, r):.12f}")

# Same story on the lattice itself.
state = beating_initial(delta)
for label, t in (("start", 0.0), ("T", orbit.halfperiod), ("2T", 2 * orbit.halfperiod)):
    fractions = diagonal_fractions(UNIT_SQUARE, flow(state, "rs", t))
    print(f"{label:>5}: diagonal mass fractions {fractions[0]:.6f} / {fractions[1]:.6f}")
