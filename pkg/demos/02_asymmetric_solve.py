"""Newton continuation to an asymmetric three-end configuration.

Starting from the n = 2 symmetric points but with necksizes (1/4, 3/4, -1),
the solver lands on the closed-form solution involving sqrt(13).
"""
# %%
import numpy as np

from catenoid_ends import Configuration, legendre_config, root_set_distance, solve_balance, sqrt13_config

# %%
start = Configuration(legendre_config(2).points, [0.25, 0.75, -1.0])
sol = solve_balance(start, fixed_indices=[2])
print("iterations:", sol.iterations)
print("residual history:", ["%.1e" % r for r in sol.history])
print("solution points:", sol.config.points.real)

# %%
exact = sqrt13_config()
print("closed form:    ", exact.points.real)
print("distance:", root_set_distance(sol.config.points, exact.points))
