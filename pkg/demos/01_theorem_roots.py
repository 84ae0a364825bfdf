"""Zeros of f_n and the balanced configurations they define.

Run with ``python demos/01_theorem_roots.py``.
"""
# %%
import numpy as np

from catenoid_ends import balance_residuals, binom_sq_coeffs, legendre_config, poly_roots

# %% [markdown]
# f_n has the squared binomial coefficients as its coefficients.  Its roots are
# simple, real and negative, and they come in reciprocal pairs.

# %%
for n in (1, 2, 3, 6):
    f = binom_sq_coeffs(n)
    r = poly_roots(f).roots
    print(f"n={n}  coeffs={f.coeffs.real.astype(int).tolist()}")
    print(f"      roots={np.sort(r.real)}")

# %% [markdown]
# Placing necksize 1/n at every root and -1 at z = 1 balances all ends.

# %%
for n in range(1, 13):
    rep = balance_residuals(legendre_config(n))
    print(f"n={n:2d}  max|F_k| = {rep.max_abs:.2e}")

# %% [markdown]
# The same roots come from the Gauss-Legendre nodes x via z = (x - 1)/(x + 1).

# %%
x, _ = np.polynomial.legendre.leggauss(5)
print(np.sort((x - 1) / (x + 1)))
print(np.sort(poly_roots(binom_sq_coeffs(5)).roots.real))
