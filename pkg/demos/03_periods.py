"""Periods of the Weierstrass data and the structural checks.

Balanced ends have zero period.  The loop around the origin picks up the
translation (0, -pi, 0), which makes the surface singly periodic.
"""
# %%
import numpy as np

from catenoid_ends import Configuration, contour_period, legendre_config, verify_conditions

np.set_printoptions(precision=3, suppress=True)

# %%
c = legendre_config(3)
print("around 0:", contour_period(c, 0.0).coords)
for pk in c.points:
    print(f"around p={pk.real:+.4f}:", contour_period(c, pk).coords)

# %% [markdown]
# Moving one point off balance opens a period at every end.

# %%
p = c.points.copy()
p[0] *= 1.1
bad = Configuration(p, c.alphas)
for pk in bad.points:
    print(f"around p={pk.real:+.4f}:", contour_period(bad, pk).coords)

# %%
rep = verify_conditions(c)
for check in rep.checks:
    print(f"{check.name:14s} passed={check.passed} defect={check.defect:.1e}")
