"""Balance equations for catenoidal ends, their Jacobian, and a Newton solver.

For points p_k and real necksizes alpha_k the balance residual is

    F_k = 2 sum_{j != k} alpha_j / (p_k - p_j) + alpha_k / p_k

and the residue of G dh at p_k equals p_k alpha_k F_k.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .exceptions import ConfigurationError, IterationError, RankError
from .polynomials import binom_sq_coeffs, poly_roots

ALPHA_SUM_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class Configuration:
    """Catenoidal end locations ``points`` with real necksizes ``alphas``.

    Construction checks the structural invariants (equal lengths, nonzero
    necksizes, no point at the origin, pairwise distinct points).  The
    necksize sum is *not* enforced here, so that unbalanced data can still be
    inspected; see :attr:`alpha_sum_defect` and :meth:`require_zero_sum`.
    """

    points: np.ndarray
    alphas: np.ndarray
    label: str = ""

    def __post_init__(self):
        p = np.atleast_1d(np.asarray(self.points, dtype=complex)).copy()
        a = np.atleast_1d(np.asarray(self.alphas, dtype=float)).copy()
        if p.ndim != 1 or a.ndim != 1 or p.size != a.size:
            raise ConfigurationError(
                f"points and alphas must be 1-d of equal length, got {p.shape} and {a.shape}"
            )
        if p.size == 0:
            raise ConfigurationError("configuration has no points")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(a))):
            bad = np.flatnonzero(~(np.isfinite(p) & np.isfinite(a)))
            raise ConfigurationError(f"non-finite entries at indices {bad.tolist()}", bad)
        zero_a = np.flatnonzero(a == 0)
        if zero_a.size:
            raise ConfigurationError(f"necksizes must be nonzero; zero at {zero_a.tolist()}", zero_a)
        zero_p = np.flatnonzero(p == 0)
        if zero_p.size:
            raise ConfigurationError(
                f"points must avoid the annular end at 0; offending indices {zero_p.tolist()}", zero_p
            )
        d = np.abs(p[:, None] - p[None, :])
        np.fill_diagonal(d, np.inf)
        if p.size > 1 and d.min() == 0:
            i, j = np.unravel_index(np.argmin(d), d.shape)
            pair = sorted((int(i), int(j)))
            raise ConfigurationError(f"points {pair[0]} and {pair[1]} coincide", pair)
        p.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "alphas", a)

    @property
    def m(self) -> int:
        return self.points.size

    @property
    def alpha_sum_defect(self) -> float:
        return float(abs(self.alphas.sum()))

    def require_zero_sum(self, tol=ALPHA_SUM_TOL):
        """Raise ConfigurationError unless the necksizes sum to zero."""
        scale = max(1.0, float(np.abs(self.alphas).sum()))
        if self.alpha_sum_defect > tol * scale:
            raise ConfigurationError(
                f"necksizes must sum to zero; |sum| = {self.alpha_sum_defect:.3e}",
                range(self.m),
            )

    def with_points(self, points) -> "Configuration":
        return Configuration(points, self.alphas, self.label)

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return (
            np.array_equal(self.points, other.points)
            and np.array_equal(self.alphas, other.alphas)
            and self.label == other.label
        )


@dataclass(frozen=True)
class BalanceReport:
    """Balance residuals of a configuration.

    Attributes
    ----------
    residuals : ndarray, shape (m,)
        F_1, ..., F_m.
    max_abs : float
        max_k |F_k|.
    residue_theorem_defect : complex
        sum_k p_k alpha_k F_k, which vanishes identically when the
        necksizes sum to zero.
    defect_scale : float
        Sum of the magnitudes of every term entering the defect; the
        defect is tested relative to this.
    jacobian : ndarray, shape (m, m)
        dF_k/dp_j (complex derivatives; F is holomorphic in the points).
    """

    residuals: np.ndarray
    max_abs: float
    residue_theorem_defect: complex
    defect_scale: float
    jacobian: np.ndarray


def _pair_inverse(p):
    d = p[:, None] - p[None, :]
    np.fill_diagonal(d, np.inf)
    return 1.0 / d


def residuals(points, alphas) -> np.ndarray:
    """F_k for raw arrays, without building a Configuration."""
    inv = _pair_inverse(points)
    return 2.0 * inv @ alphas + alphas / points


def balance_residuals(c: Configuration) -> BalanceReport:
    """Evaluate F, its Jacobian and the residue-theorem defect."""
    p, a = c.points, c.alphas
    inv = _pair_inverse(p)
    F = 2.0 * inv @ a + a / p

    jac = 2.0 * a[None, :] * inv**2
    np.fill_diagonal(jac, -2.0 * (inv**2 @ a) - a / p**2)

    terms = p * a
    defect = complex(np.sum(terms * F))
    scale = float(np.sum(np.abs(terms) * (2.0 * np.abs(inv) @ np.abs(a) + np.abs(a / p))))
    return BalanceReport(
        residuals=F,
        max_abs=float(np.abs(F).max()),
        residue_theorem_defect=defect,
        defect_scale=scale,
        jacobian=jac,
    )


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-12
    max_iter: int = 100
    armijo: float = 1e-4
    min_step: float = 2.0**-20
    collision_tol: float = 1e-10


@dataclass(frozen=True)
class BalanceSolution:
    """Result of :func:`solve_balance`.

    ``history`` holds max_k |F_k| before each iteration and after the last.
    """

    config: Configuration
    iterations: int
    history: list = field(default_factory=list)

    @property
    def residual(self) -> float:
        return self.history[-1]


def _too_close(p, tol):
    diam = max(np.ptp(p.real), np.ptp(p.imag), np.abs(p).max())
    d = np.abs(p[:, None] - p[None, :])
    np.fill_diagonal(d, np.inf)
    return d.min() < tol * diam or np.abs(p).min() < tol * diam


def solve_balance(
    init: Configuration,
    fixed_indices: Iterable[int],
    opts: SolverOptions | None = None,
) -> BalanceSolution:
    """Solve F_k = 0 for the points not listed in ``fixed_indices``.

    Damped Newton (Gauss-Newton when more than one point is fixed) on the
    free points.  The equation belonging to the highest fixed index is
    dropped from the linear solves, since the residue theorem makes it a
    consequence of the others, but convergence is always judged on all m
    residuals.  Necksizes are never changed.

    Raises
    ------
    ConfigurationError
        Bad index set, or necksizes that do not sum to zero.
    RankError
        The Jacobian restricted to the free points is rank deficient.
    IterationError
        No convergence within ``opts.max_iter`` iterations, or the line
        search stalled; ``best`` is the last iterate.
    """
    opts = opts or SolverOptions()
    init.require_zero_sum()
    m = init.m
    fixed = sorted({int(i) for i in fixed_indices})
    if not fixed:
        raise ConfigurationError("at least one point must be fixed to remove the scaling freedom")
    if fixed[0] < 0 or fixed[-1] >= m:
        raise ConfigurationError(f"fixed indices must lie in [0, {m - 1}]", [i for i in fixed if not 0 <= i < m])
    free = [k for k in range(m) if k not in fixed]
    eqs = [k for k in range(m) if k != fixed[-1]]

    a = init.alphas
    p = init.points.copy()
    history = []
    for it in range(opts.max_iter + 1):
        rep = balance_residuals(Configuration(p, a))
        history.append(rep.max_abs)
        if rep.max_abs <= opts.tol:
            return BalanceSolution(init.with_points(p), it, history)
        if it == opts.max_iter or not free:
            break

        J = rep.jacobian[np.ix_(eqs, free)]
        Fe = rep.residuals[eqs]
        # rank is judged against the full Jacobian so a uniformly tiny block counts as singular
        sv = np.linalg.svd(J, compute_uv=False)
        rank = int(np.sum(sv > 1e-13 * np.abs(rep.jacobian).max()))
        if rank < len(free):
            raise RankError(
                f"restricted Jacobian has rank {rank} < {len(free)} at iteration {it}"
            )
        step = np.linalg.lstsq(J, -Fe, rcond=None)[0]

        phi0 = float(np.vdot(Fe, Fe).real)
        t = 1.0
        while True:
            trial = p.copy()
            trial[free] += t * step
            if not _too_close(trial, opts.collision_tol):
                Ft = residuals(trial, a)[eqs]
                phi = float(np.vdot(Ft, Ft).real)
                if np.isfinite(phi) and phi <= (1.0 - 2.0 * opts.armijo * t) * phi0:
                    break
            t *= 0.5
            if t < opts.min_step:
                raise IterationError(
                    f"line search stalled at iteration {it} (max|F| = {rep.max_abs:.3e})",
                    best=init.with_points(p),
                    residual=rep.max_abs,
                    history=history,
                )
        p = trial

    raise IterationError(
        f"no convergence in {opts.max_iter} iterations (max|F| = {history[-1]:.3e})",
        best=init.with_points(p),
        residual=history[-1],
        history=history,
    )


def legendre_config(n: int) -> Configuration:
    """Balanced configuration with n equal necks at the roots of f_n.

    Points are the roots of f_n in increasing real part followed by the
    downward end at 1; necksizes are 1/n (n times) and -1.  Imaginary parts
    below 1e-12 relative are round-off and are set to zero.
    """
    roots = poly_roots(binom_sq_coeffs(n)).roots
    # f_n has real coefficients; drop round-off imaginary parts
    roots = np.where(np.abs(roots.imag) <= 1e-12 * np.abs(roots), roots.real, roots)
    roots = roots[np.argsort(roots.real, kind="stable")]
    points = np.append(roots, 1.0)
    alphas = np.append(np.full(n, 1.0 / n), -1.0)
    return Configuration(points, alphas, label=f"legendre n={n}")


def sqrt13_config() -> Configuration:
    """The asymmetric three-end example with necksizes (1/4, 3/4, -1)."""
    s = np.sqrt(13.0)
    return Configuration(
        [-(11.0 + 3.0 * s) / 2.0, (-7.0 + s) / 6.0, 1.0],
        [0.25, 0.75, -1.0],
        label="sqrt13 asymmetric example",
    )


def logderivative_identity_defects(n: int) -> np.ndarray:
    """Relative defect of f''(p_k) = 2 f'(p_k) sum_{j != k} 1/(p_k - p_j) at the roots of f_n."""
    f = binom_sq_coeffs(n)
    roots = poly_roots(f).roots
    inv = _pair_inverse(roots)
    d1, d2 = f.deriv()(roots), f.deriv(2)(roots)
    lhs = d2 - 2.0 * d1 * inv.sum(axis=1)
    return np.abs(lhs) / np.maximum(np.abs(d2), np.finfo(float).tiny)


def central_difference_jacobian(points: Sequence[complex], alphas, step=1e-6) -> np.ndarray:
    """dF/dp by central differences along the real axis of each point.

    Holomorphy makes the real-direction derivative equal to the complex
    derivative; :func:`central_difference_jacobian_imag` probes the
    imaginary direction.
    """
    p = np.asarray(points, dtype=complex)
    a = np.asarray(alphas, dtype=float)
    cols = []
    for j in range(p.size):
        e = np.zeros_like(p)
        e[j] = step
        cols.append((residuals(p + e, a) - residuals(p - e, a)) / (2 * step))
    return np.array(cols).T


def central_difference_jacobian_imag(points, alphas, step=1e-6) -> np.ndarray:
    p = np.asarray(points, dtype=complex)
    a = np.asarray(alphas, dtype=float)
    cols = []
    for j in range(p.size):
        e = np.zeros_like(p)
        e[j] = 1j * step
        cols.append((residuals(p + e, a) - residuals(p - e, a)) / (2j * step))
    return np.array(cols).T
