"""
Carnot-Caratheodory distance from the identity.

The critical point theta(r, z) solves

    theta - z = cosh(r) sin(theta) arch_ratio(cosh(r) cos(theta))

on (-arccos(-1/cosh r), arccos(-1/cosh r)). The right-hand side F is strictly
increasing there with slope >= 1 and runs from -inf to +inf, so
G = theta - z - F is strictly decreasing with exactly one root, and a bracketed
Newton iteration with bisection fallback always converges.

    d^2(0, z) = 2 pi |z| + z^2
    d^2(r, 0) = r^2
    d^2(r, z) = (theta - z)^2 tanh^2(r) / sin^2(theta)
"""

from dataclasses import dataclass
import logging
import math
from typing import Literal

import numpy as np

from heatkernel.constants import CASE_TOL, THETA_MAX_ITER, THETA_RESIDUAL_TOL, Z_CHART_SLACK
from heatkernel.errors import ConvergenceFailure, DomainError
from heatkernel.group import GroupElement, matrix_to_cyl
from heatkernel.special import _arch_ratio, _arch_ratio_slope

log = logging.getLogger(__name__)

CaseTag = Literal["axis_z", "axis_r", "generic"]


@dataclass(frozen=True)
class ThetaSolution:
    theta: float
    residual: float
    iterations: int
    bracket: tuple[float, float]


@dataclass(frozen=True)
class DistanceValue:
    d2: float
    case_tag: CaseTag

    @property
    def d(self) -> float:
        return math.sqrt(self.d2)


@dataclass(frozen=True)
class ThetaArrays:
    """Vectorized root-finder output; one entry per (r, z)."""

    theta: np.ndarray
    residual: np.ndarray
    iterations: np.ndarray
    lo: np.ndarray
    hi: np.ndarray


# ── The critical-point equation ───────────────────────────────────────────────

def theta_bound(r):
    """arccos(-1/cosh r): the admissible half-width for theta."""
    return np.arccos(-1.0 / np.cosh(r))


def critical_map(theta, r):
    """F(theta) = cosh(r) sin(theta) arch_ratio(cosh(r) cos(theta))."""
    ch = np.cosh(r)
    with np.errstate(invalid="ignore"):
        return ch * np.sin(theta) * _arch_ratio(ch * np.cos(theta))


def critical_map_slope(theta, r):
    """dF/dtheta; >= 1 on the admissible interval."""
    ch = np.cosh(r)
    u = ch * np.cos(theta)
    with np.errstate(invalid="ignore"):
        return u * _arch_ratio(u) - (ch * np.sin(theta)) ** 2 * _arch_ratio_slope(u)


def _residual(theta, r, z):
    return theta - z - critical_map(theta, r)


def _solve_theta_array(r, z) -> ThetaArrays:
    """Safeguarded Newton on G(theta) = theta - z - F(theta) for arrays of (r, z).

    Accepts any real z: G runs from +inf to -inf on the admissible interval for
    every z, which lets the kernel place contours for fiber images |z| > pi.
    """
    r, z = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(z, dtype=float))
    r, z = r.ravel(), z.ravel()
    bound = theta_bound(r)

    # z > 0 puts the root in (-bound, 0); z < 0 in (0, bound)
    pos = z > 0.0
    lo = np.where(pos, -bound, 0.0)
    hi = np.where(pos, 0.0, bound)

    # Pull the outer end inward while G keeps its sign there.
    outer_ok = np.zeros_like(r, dtype=bool)
    for k in range(1, 16):
        eps = bound * 10.0 ** (-k)
        cand = np.where(pos, -bound + eps, bound - eps)
        g = _residual(cand, r, z)
        ok = ~outer_ok & np.where(pos, g > 0.0, g < 0.0)
        lo = np.where(ok & pos, cand, lo)
        hi = np.where(ok & ~pos, cand, hi)
        outer_ok |= ok
        if outer_ok.all():
            break

    # Linearization at 0: F'(0) = r coth r.
    with np.errstate(divide="ignore", invalid="ignore"):
        theta = -z / (r / np.tanh(r) - 1.0)
    theta = np.where((theta > lo) & (theta < hi), theta, 0.5 * (lo + hi))
    theta = np.where(z == 0.0, 0.0, theta)

    iterations = np.zeros(r.shape, dtype=int)
    g = _residual(theta, r, z)
    for _ in range(THETA_MAX_ITER):
        active = (np.abs(g) > THETA_RESIDUAL_TOL) & (z != 0.0) & (hi - lo > 4e-16 * np.maximum(1.0, np.abs(theta)))
        if not active.any():
            break
        lo = np.where(active & (g > 0.0), theta, lo)
        hi = np.where(active & (g < 0.0), theta, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = theta - g / (1.0 - critical_map_slope(theta, r))
        safe = np.isfinite(newton) & (newton > lo) & (newton < hi)
        theta = np.where(active, np.where(safe, newton, 0.5 * (lo + hi)), theta)
        g = np.where(active, _residual(theta, r, z), g)
        iterations += active

    residual = np.where(z == 0.0, 0.0, np.abs(g))
    return ThetaArrays(theta, residual, iterations, lo, hi)


def solve_theta(r: float, z: float) -> ThetaSolution:
    """The unique root theta(r, z); theta(r, 0) = 0."""
    if not r > 0.0:
        raise DomainError(f"solve_theta needs r > 0, got {r!r}")
    _check_z(z)
    sol = _solve_theta_array(r, z)
    if sol.residual[0] > THETA_RESIDUAL_TOL:
        raise ConvergenceFailure(
            f"theta({r!r}, {z!r}): residual {sol.residual[0]:.3g} after {sol.iterations[0]} iterations"
        )
    return ThetaSolution(
        theta=float(sol.theta[0]),
        residual=float(sol.residual[0]),
        iterations=int(sol.iterations[0]),
        bracket=(float(sol.lo[0]), float(sol.hi[0])),
    )


def _check_z(z):
    if np.any(~(np.abs(np.asarray(z, dtype=float)) <= math.pi + Z_CHART_SLACK)):
        raise DomainError(f"z must lie in [-pi, pi], got {z!r}")


# ── Distance ──────────────────────────────────────────────────────────────────

def distance_squared(r: float, z: float) -> DistanceValue:
    """Squared distance from the identity to the point (r, ., z)."""
    if not r >= 0.0:
        raise DomainError(f"r must be >= 0, got {r!r}")
    _check_z(z)
    az = abs(z)
    if r < CASE_TOL:
        return DistanceValue(2.0 * math.pi * az + az * az, "axis_z")
    if az < CASE_TOL:
        return DistanceValue(r * r, "axis_r")
    sol = solve_theta(r, az)
    th = sol.theta
    return DistanceValue((th - az) ** 2 * math.tanh(r) ** 2 / math.sin(th) ** 2, "generic")


def distance_squared_array(r, z) -> np.ndarray:
    """Vectorized distance_squared (values only)."""
    r, z = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(z, dtype=float))
    shape = r.shape
    r, az = r.ravel(), np.abs(z.ravel())
    generic = (r >= CASE_TOL) & (az >= CASE_TOL)
    out = np.where(r < CASE_TOL, 2.0 * math.pi * az + az**2, r**2)
    if generic.any():
        rg, zg = r[generic], az[generic]
        sol = _solve_theta_array(rg, zg)
        bad = sol.residual > THETA_RESIDUAL_TOL
        if bad.any():
            raise ConvergenceFailure(f"{int(bad.sum())} theta solve(s) above residual tolerance")
        th = sol.theta
        out[generic] = (th - zg) ** 2 * np.tanh(rg) ** 2 / np.sin(th) ** 2
    return out.reshape(shape)


def triangle_bounds(r: float, z: float) -> tuple[float, float]:
    """Lower and upper bounds on d(r, z) from d(r, 0) = r and d(0, z)."""
    dz = math.sqrt(2.0 * math.pi * abs(z) + z * z)
    return abs(r - dz), r + dz


def distance_between(g1: GroupElement, g2: GroupElement) -> DistanceValue:
    """d(g1, g2) = d(e, g1^-1 g2) by left invariance."""
    c = matrix_to_cyl(g1.inverse() @ g2)
    return distance_squared(c.r, c.z)


def distance_bounds_check(grid) -> tuple[float, float]:
    """Extremes of d^2 / (r^2 + |z|) over a grid of (r, z), origin excluded."""
    pts = np.asarray(list(grid), dtype=float).reshape(-1, 2)
    r, z = pts[:, 0], pts[:, 1]
    if np.any((r < 0.0) | (r > 3.0)) or np.any(np.abs(z) > math.pi + Z_CHART_SLACK):
        raise DomainError("grid must lie in r in [0, 3], |z| <= pi")
    keep = (r > 0.0) | (z != 0.0)
    r, z = r[keep], z[keep]
    ratios = distance_squared_array(r, z) / (r**2 + np.abs(z))
    c_fit, C_fit = float(ratios.min()), float(ratios.max())
    log.debug("distance bounds over %d points: c=%.6g C=%.6g", len(r), c_fit, C_fit)
    return c_fit, C_fit
