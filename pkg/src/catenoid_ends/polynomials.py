"""Dense polynomials, the squared-binomial family f_n, Legendre evaluation
and a simultaneous-iteration root finder.

Coefficients are stored lowest degree first: ``coeffs[i]`` multiplies ``z**i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, linear_sum_assignment

from .exceptions import DomainError, IterationError, SupportedRangeError

#: Largest n for which every C(n, j)**2 is an exact double.
MAX_DEGREE = 25

ROOT_TOL = 1e-12
SIMPLE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Polynomial with complex coefficients, lowest degree first.

    Trailing (highest-degree) exact zeros are stripped on construction, so
    the leading coefficient is nonzero unless the polynomial is identically
    zero, which is kept as the single coefficient ``[0]``.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex)).copy()
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficients must be a nonempty 1-d sequence")
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:1]
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, z):
        """Evaluate by Horner's scheme; ``z`` may be a scalar or an array."""
        z = np.asarray(z, dtype=complex)
        acc = np.full(z.shape, self.coeffs[-1], dtype=complex)
        for c in self.coeffs[-2::-1]:
            acc = acc * z + c
        return acc if acc.ndim else complex(acc)

    def deriv(self, m: int = 1) -> "Polynomial":
        """Exact m-th derivative by shifting and scaling coefficients."""
        c = self.coeffs
        for _ in range(m):
            if c.size == 1:
                return Polynomial([0.0])
            c = c[1:] * np.arange(1, c.size)
        return Polynomial(c)

    def abs_scale(self, z):
        """Sum of |c_i| |z|**i, the natural magnitude scale of p(z)."""
        return Polynomial(np.abs(self.coeffs))(np.abs(np.asarray(z))).real

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __repr__(self):
        return f"Polynomial({self.coeffs.tolist()!r})"


@dataclass(frozen=True)
class RootSet:
    """Roots of a polynomial together with per-root diagnostics.

    Attributes
    ----------
    roots : ndarray of complex
        All roots, repeated according to multiplicity.
    certified_simple : ndarray of bool
        ``|p'(r)|`` exceeds ``SIMPLE_TOL`` times its magnitude scale.
    residuals : ndarray of float
        ``|p(r)| / sum_i |c_i||r|**i`` at each root.
    """

    roots: np.ndarray
    certified_simple: np.ndarray
    residuals: np.ndarray

    def __len__(self):
        return self.roots.size


def _check_n(n, lo=1, hi=MAX_DEGREE):
    if int(n) != n or not lo <= n <= hi:
        raise SupportedRangeError(f"n must be an integer in [{lo}, {hi}], got {n!r}")
    return int(n)


def binom_sq_coeffs(n: int) -> Polynomial:
    """Return f_n(z) = sum_j C(n, j)**2 z**j.

    Coefficients are formed with exact integers, then converted to float,
    which is lossless for ``n <= MAX_DEGREE``.
    """
    n = _check_n(n)
    return Polynomial([float(math.comb(n, j) ** 2) for j in range(n + 1)])


def legendre_eval(n: int, x):
    """Legendre polynomial L_n at (complex) x by the three-term recurrence."""
    if int(n) != n or n < 0:
        raise SupportedRangeError(f"n must be a nonnegative integer, got {n!r}")
    x = np.asarray(x, dtype=complex)
    prev, cur = np.ones_like(x), x
    if n == 0:
        out = prev
    else:
        for k in range(1, int(n)):
            prev, cur = cur, ((2 * k + 1) * x * cur - k * prev) / (k + 1)
        out = cur
    return out if out.ndim else complex(out)


def fn_legendre_identity_defect(n: int, z) -> float:
    """|f_n(z) - (1 - z)**n L_n((1 + z)/(1 - z))|.

    Raises
    ------
    DomainError
        If ``z`` is 1, where the Moebius change of variable has its pole.
    """
    f = binom_sq_coeffs(n)
    z = complex(z)
    if abs(z - 1) <= 4 * np.finfo(float).eps:
        raise DomainError("the transform (1 + z)/(1 - z) has a pole at z = 1")
    rhs = (1 - z) ** n * legendre_eval(n, (1 + z) / (1 - z))
    return abs(f(z) - rhs)


def hypergeom_ode_residual(n: int, z):
    """z(1-z) f_n'' + (1 + (2n-1) z) f_n' - n**2 f_n evaluated at z."""
    f = binom_sq_coeffs(n)
    d1, d2 = f.deriv(), f.deriv(2)
    z = np.asarray(z, dtype=complex)
    out = z * (1 - z) * d2(z) + (1 + (2 * n - 1) * z) * d1(z) - n * n * f(z)
    return out if np.ndim(out) else complex(out)


def cauchy_bound(p: Polynomial) -> float:
    """Cauchy's root bound: the positive zero of |a_n| x^n - sum_{i<n} |a_i| x^i.

    Every root of ``p`` lies in the closed disk of this radius.
    """
    a = np.abs(p.coeffs)
    if p.degree < 1:
        raise ValueError("root bound needs degree >= 1")
    lower = a[:-1]
    if not lower.any():
        return 0.0
    n = p.degree
    idx = np.flatnonzero(lower)
    # a_n x^n >= a_i x^i at the bound, so each ratio below is a lower bracket
    lo = max((lower[i] / a[-1]) ** (1.0 / (n - i)) for i in idx)
    hi = 1.0 + lower.max() / a[-1]

    def g(x):
        return a[-1] - np.sum(lower[idx] * np.exp((idx - n) * np.log(x)))

    if g(lo) >= 0:
        return float(lo)
    return brentq(g, lo, hi, xtol=1e-14 * lo, rtol=1e-14)


def poly_roots(p: Polynomial, max_iter: int = 500, polish_steps: int = 3) -> RootSet:
    """All roots of ``p`` by Aberth-Ehrlich iteration plus Newton polishing.

    Initial guesses sit on a circle of radius ``cauchy_bound(p)``, rotated off
    the real axis so that real polynomials do not start on a symmetric set.

    Raises
    ------
    IterationError
        If the iteration does not meet the residual test within ``max_iter``
        sweeps; ``best`` holds the last iterate and ``residual`` the largest
        scaled residual.
    """
    if not isinstance(p, Polynomial):
        p = Polynomial(p)
    n = p.degree
    if n < 1:
        raise ValueError("poly_roots needs a polynomial of degree >= 1")
    c = p.coeffs
    if n == 1:
        roots = np.array([-c[0] / c[1]])
        return _rootset(p, roots)

    dp = p.deriv()
    radius = cauchy_bound(p)
    z = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    # zero roots are exact and would stall the relative stopping test
    nzero = np.flatnonzero(c)[0]
    z[:nzero] = 0.0
    active = np.arange(nzero, n)

    for _ in range(max_iter):
        za = z[active]
        pv, dv = p(za), dp(za)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = pv / dv
            diff = za[:, None] - z[None, :]
            diff[np.arange(active.size), active] = np.inf
            s = (1.0 / diff).sum(axis=1)
            step = w / (1.0 - w * s)
        step = np.where(np.isfinite(step), step, 0.0)
        z[active] = za - step
        if np.all(np.abs(step) <= 4 * np.finfo(float).eps * np.maximum(np.abs(z[active]), 1e-300)):
            break
        if np.all(np.abs(pv) <= ROOT_TOL * 1e-2 * p.abs_scale(za)):
            break

    for _ in range(polish_steps):
        za = z[active]
        dv = dp(za)
        cand = za - np.where(dv != 0, p(za) / np.where(dv != 0, dv, 1), 0)
        better = np.abs(p(cand)) <= np.abs(p(za))
        z[active] = np.where(better, cand, za)

    result = _rootset(p, z)
    if np.any(result.residuals > ROOT_TOL):
        raise IterationError(
            f"root finder did not converge in {max_iter} sweeps",
            best=z.copy(),
            residual=float(result.residuals.max()),
        )
    return result


def _rootset(p, roots):
    roots = np.asarray(roots, dtype=complex)
    dp = p.deriv()
    scale = p.abs_scale(roots)
    resid = np.abs(p(roots)) / np.where(scale > 0, scale, 1.0)
    dscale = dp.abs_scale(roots)
    simple = np.abs(dp(roots)) >= SIMPLE_TOL * np.where(dscale > 0, dscale, 1.0)
    return RootSet(roots=roots, certified_simple=np.atleast_1d(simple), residuals=np.atleast_1d(resid))


def root_set_distance(a, b) -> float:
    """Largest pairing distance under the optimal matching of two root sets."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size != b.size:
        raise ValueError("root sets differ in size")
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max()) if a.size else 0.0
