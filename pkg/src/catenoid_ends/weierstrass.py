"""Weierstrass data G(z) = z h(z), dh = h(z) dz with h(z) = sum_j alpha_j/(z - p_j),
analytic residues of G dh, and contour-integral checks of the period problem.

All contours are counterclockwise circles.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .balance import Configuration, balance_residuals
from .exceptions import GeometryError, PoleError, QuadratureError
from .polynomials import Polynomial, poly_roots

POLE_TOL = 1e-14
GEOMETRY_TOL = 1e-6


def height_coefficient(c: Configuration, z):
    """h(z) with dh = h(z) dz."""
    z = np.asarray(z, dtype=complex)
    out = np.sum(c.alphas[:, None] / (z.reshape(1, -1) - c.points[:, None]), axis=0)
    return out.reshape(z.shape) if z.ndim else complex(out[0])


def _check_poles(c, z):
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    d = np.abs(z[None, :] - c.points[:, None])
    hit = d <= POLE_TOL * np.maximum(1.0, np.abs(c.points))[:, None]
    if hit.any():
        k = int(np.argwhere(hit)[0][0])
        raise PoleError(f"evaluation at the pole p_{k} = {c.points[k]}")


def gauss_map(c: Configuration, z):
    """G(z) = z sum_j alpha_j / (z - p_j).

    Raises
    ------
    PoleError
        If ``z`` is within a relative 1e-14 of some p_k.
    """
    _check_poles(c, z)
    if np.ndim(z):
        z = np.asarray(z, dtype=complex)
        return z * height_coefficient(c, z)
    return complex(z) * height_coefficient(c, z)


def integrand(c: Configuration, z):
    """The Weierstrass one-form coefficients at z, evaluated literally.

    Returns an array of shape ``(3,) + shape(z)`` holding
    ``(1/2 (1/G - G) h, i/2 (1/G + G) h, h)``.  Undefined at the zeros of G;
    use :func:`integrand_reduced` for path integration.
    """
    z = np.asarray(z, dtype=complex)
    h = height_coefficient(c, z)
    G = z * h
    return np.array([0.5 * (1.0 / G - G) * h, 0.5j * (1.0 / G + G) * h, h])


def integrand_reduced(c: Configuration, z):
    """Same one-form with h/G replaced by 1/z, regular at the zeros of G."""
    z = np.asarray(z, dtype=complex)
    h = height_coefficient(c, z)
    gh = z * h * h
    iz = 1.0 / z
    return np.array([0.5 * (iz - gh), 0.5j * (iz + gh), h])


def gdh_residue(c: Configuration, k: int) -> complex:
    """Residue of G dh at p_k, in closed form p_k alpha_k F_k."""
    if not 0 <= k < c.m:
        raise IndexError(f"index {k} out of range for {c.m} points")
    F = balance_residuals(c).residuals
    return complex(c.points[k] * c.alphas[k] * F[k])


def h_numerator(c: Configuration, sum_tol=1e-14) -> Polynomial:
    """N(z) = sum_j alpha_j prod_{i != j} (z - p_i), so that h = N / prod (z - p_i).

    The z**(m-1) coefficient is sum(alpha); it is set to exactly zero when
    that sum vanishes to within ``sum_tol`` relative.
    """
    m = c.m
    coeffs = np.zeros(m, dtype=complex)
    for j in range(m):
        others = np.delete(c.points, j)
        coeffs += c.alphas[j] * np.poly(others)[::-1]
    if abs(c.alphas.sum()) <= sum_tol * max(1.0, np.abs(c.alphas).sum()):
        coeffs[-1] = 0.0
    return Polynomial(coeffs)


def gauss_zeros(c: Configuration) -> np.ndarray:
    """Zeros of G in C minus {0} (the zeros of h)."""
    N = h_numerator(c)
    if N.degree < 1:
        return np.empty(0, dtype=complex)
    return poly_roots(N).roots


def singularities(c: Configuration) -> np.ndarray:
    """0, the points p_k and the zeros of G: where the literal integrand fails."""
    return np.concatenate([[0.0], c.points, gauss_zeros(c)]).astype(complex)


def default_radius(c: Configuration, center: complex) -> float:
    """Half the distance from ``center`` to the nearest other singularity."""
    s = singularities(c)
    d = np.abs(s - center)
    d = d[d > GEOMETRY_TOL * max(1.0, abs(center))]
    if d.size == 0:
        return 1.0
    return 0.5 * float(d.min())


def trapezoid_contour(f, center: complex, radius: float, tol=1e-10, n0=16, nmax=2**20):
    """Integral of f(z) dz over the ccw circle, by the periodic trapezoid rule.

    The node count doubles until two successive estimates agree to ``tol``
    (absolute, per component).  ``f`` maps an array of points to an array
    whose last axis runs over those points.

    Raises
    ------
    QuadratureError
        If ``nmax`` nodes do not reach ``tol``.
    """

    def nodes_sum(n, offset):
        t = 2.0 * np.pi * (np.arange(n) + offset) / n
        w = np.exp(1j * t)
        z = center + radius * w
        return np.sum(f(z) * (1j * radius * w), axis=-1)

    n = n0
    total = nodes_sum(n, 0.0)
    est = total * (2.0 * np.pi / n)
    while n < nmax:
        # the refined rule reuses the old nodes and adds the midpoints
        total = total + nodes_sum(n, 0.5)
        n *= 2
        new = total * (2.0 * np.pi / n)
        if np.all(np.abs(new - est) < tol):
            return new
        est = new
    raise QuadratureError(f"trapezoid rule did not converge with {nmax} nodes", estimate=est)


def _check_circle(c, center, radius):
    if not radius > 0:
        raise GeometryError(f"radius must be positive, got {radius}")
    s = singularities(c)
    gap = np.abs(np.abs(s - center) - radius)
    if gap.min() < GEOMETRY_TOL * radius:
        i = int(np.argmin(gap))
        raise GeometryError(
            f"circle |z - {center}| = {radius} passes within {gap[i]:.3e} of the singularity {s[i]}"
        )


def contour_residue(c: Configuration, center: complex, radius: float | None = None) -> complex:
    """(1/2 pi i) times the integral of G h dz around the circle.

    Independent of :func:`gdh_residue`: it integrates the literal product of
    the Gauss map and the height coefficient.
    """
    radius = default_radius(c, center) if radius is None else float(radius)
    _check_circle(c, center, radius)

    def gh(z):
        h = height_coefficient(c, z)
        return z * h * h

    return complex(trapezoid_contour(gh, center, radius) / (2j * np.pi))


@dataclass(frozen=True)
class PeriodVector:
    """Real parts of the Weierstrass integrand integrated over a ccw circle."""

    coords: np.ndarray
    center: complex
    radius: float
    orientation: str = "ccw"
    enclosed: tuple = ()

    def __iter__(self):
        return iter(self.coords)


def contour_period(c: Configuration, center: complex, radius: float | None = None) -> PeriodVector:
    """Re of the integral of the Weierstrass integrand around a circle.

    Raises
    ------
    GeometryError
        If the circle passes within ``1e-6 * radius`` of 0, a pole p_k or a
        zero of G.
    QuadratureError
        If the trapezoid rule fails to converge.
    """
    center = complex(center)
    radius = default_radius(c, center) if radius is None else float(radius)
    _check_circle(c, center, radius)
    vals = trapezoid_contour(lambda z: integrand(c, z), center, radius)
    enclosed = tuple(int(k) for k in np.flatnonzero(np.abs(c.points - center) < radius))
    return PeriodVector(np.real(vals), center, radius, "ccw", enclosed)


# -- structural checks ------------------------------------------------------


def winding_number(f, center: complex, radius: float, n0=256, nmax=2**16) -> int:
    """Winding number of f(z) about 0 as z runs once ccw around the circle."""
    n = n0
    prev = None
    while n <= nmax:
        z = center + radius * np.exp(2j * np.pi * np.arange(n + 1) / n)
        v = f(z)
        dang = np.angle(v[1:] / v[:-1])
        w = int(round(dang.sum() / (2 * np.pi)))
        if np.abs(dang).max() < np.pi / 4 and w == prev:
            return w
        prev = w
        n *= 2
    return prev


@dataclass(frozen=True)
class ConditionCheck:
    name: str
    passed: bool
    defect: float
    detail: str = ""


@dataclass(frozen=True)
class ConditionsReport:
    """Outcome of :func:`verify_conditions`.

    ``order_at_zero`` and ``order_at_infinity`` are the measured vanishing
    orders of G at the annular ends.
    """

    checks: list = field(default_factory=list)
    order_at_zero: int = 0
    order_at_infinity: int = 0

    @property
    def passed(self) -> bool:
        return all(ch.passed for ch in self.checks)

    def __getitem__(self, name):
        for ch in self.checks:
            if ch.name == name:
                return ch
        raise KeyError(name)


def verify_conditions(c: Configuration, rel_tol=1e-8) -> ConditionsReport:
    """Check the regularity, end and pole conditions on (G, dh).

    Vanishing orders are measured with the argument principle on small
    circles, independently of the closed forms used elsewhere.  Checks:

    ``shared_zeros``
        every zero of h away from 0 is a zero of G of the same order.
    ``annular_ends``
        ord_0 G = ord_0 dh + 1 >= 1 and ord_inf G = ord_inf dh + 1 >= 1.
    ``simple_poles``
        G and h have simple poles at each p_k with res G / res h = p_k.
    ``alpha_sum``
        sum(alpha) = 0.
    """
    checks = []
    p = c.points
    zeros = gauss_zeros(c)
    G = lambda z: z * height_coefficient(c, z)
    h = lambda z: height_coefficient(c, z)
    special = np.concatenate([[0.0], p, zeros]).astype(complex)

    def clearance(x, exclude_radius=0.0):
        d = np.abs(special - x)
        d = d[d > max(exclude_radius, 1e-12 * max(1.0, abs(x)))]
        return float(d.min()) if d.size else 1.0

    # shared zeros; a cluster of nearby roots is one multiple zero
    worst, msgs, done = 0, [], np.zeros(zeros.size, bool)
    for i, zeta in enumerate(zeros):
        if done[i] or abs(zeta) < 1e-12:
            continue
        cluster = np.abs(zeros - zeta) < 1e-6 * max(1.0, abs(zeta))
        done |= cluster
        center = zeros[cluster].mean()
        rho = 0.25 * clearance(center, exclude_radius=1e-6 * max(1.0, abs(zeta)))
        og, oh = winding_number(G, center, rho), winding_number(h, center, rho)
        mult = int(cluster.sum())
        bad = abs(og - oh) + abs(oh - mult)
        worst = max(worst, bad)
        if bad:
            msgs.append(f"zero {center:.6g}: ord G={og}, ord dh={oh}, expected {mult}")
    checks.append(ConditionCheck("shared_zeros", worst == 0, float(worst), "; ".join(msgs)))

    # orders at 0 and infinity
    nonzero = special[np.abs(special) > 0]
    r0 = 0.5 * float(np.abs(nonzero).min())
    R = 2.0 * float(np.abs(nonzero).max())
    k = winding_number(G, 0.0, r0)
    k_dh = winding_number(h, 0.0, r0)
    j = -winding_number(G, 0.0, R)
    j_dh = -winding_number(h, 0.0, R) - 2  # dz has a double pole at infinity
    bad = abs(k - 1 - k_dh) + abs(j - 1 - j_dh) + (k < 1) + (j < 1)
    checks.append(
        ConditionCheck(
            "annular_ends",
            bad == 0,
            float(bad),
            f"ord_0 G={k}, ord_0 dh={k_dh}, ord_inf G={j}, ord_inf dh={j_dh}",
        )
    )

    # simple poles with residue ratio p_k
    worst, msgs = 0.0, []
    for idx, pk in enumerate(p):
        rho = 0.25 * clearance(pk)
        wg, wh = winding_number(G, pk, rho), winding_number(h, pk, rho)
        rg = trapezoid_contour(G, pk, rho) / (2j * np.pi)
        rh = trapezoid_contour(h, pk, rho) / (2j * np.pi)
        ratio_defect = abs(rg / rh - pk) / abs(pk) if rh != 0 else np.inf
        d = ratio_defect + (wg != -1) + (wh != -1)
        worst = max(worst, d)
        if d > rel_tol:
            msgs.append(f"p_{idx}: winding G={wg}, h={wh}, |res G/res h - p|/|p|={ratio_defect:.3e}")
    checks.append(ConditionCheck("simple_poles", bool(worst <= rel_tol), float(worst), "; ".join(msgs)))

    s = c.alpha_sum_defect
    scale = max(1.0, float(np.abs(c.alphas).sum()))
    checks.append(ConditionCheck("alpha_sum", bool(s <= 1e-14 * scale), s, f"sum(alpha) = {c.alphas.sum():.6g}"))
    return ConditionsReport(checks, order_at_zero=k, order_at_infinity=j)
