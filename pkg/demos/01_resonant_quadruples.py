"""
Resonant quadruples on a small lattice
======================================

Four modes interact only when they sit at the corners of a rectangle,
possibly a flat one. This script enumerates those quadruples and closes a
support under rectangle completion.
"""

from resonant.lattice import SupportSet, close_support, complete_rectangle, enumerate_gamma0

# The unit square: every ordered quadruple that resonates.
square = SupportSet([(0, 0), (1, 0), (0, 1), (1, 1)])
every = enumerate_gamma0(square)
proper = enumerate_gamma0(square, include_degenerate=False)
print(f"unit square: {len(every)} resonant quadruples, {len(proper)} with positive area")
for quad in proper[:4]:
    print("  ", quad)

# A right angle at the middle point forces a fourth corner.
print("completion of (2,0),(0,0),(0,3):", complete_rectangle((2, 0), (0, 0), (0, 3)))

# Closing an L shape adds the missing corner, and nothing else.
ell = SupportSet([(0, 0), (3, 0), (0, 2)])
closed = close_support(ell, max_growth=10)
print("closure of", list(ell), "->", list(closed))
