"""
Small-time behaviour of p_t by the Laplace method.

On the axis the closed form is already asymptotic:

    p_t(0, z) ~ e^-t / (16 t^2) exp(-(2 pi |z| + z^2) / 4t)

Off the axis the integrand of the y-integral is dominated by the critical
point i theta(r, z) of f(y) = arccosh(cosh r cosh y)^2 - (y - iz)^2, where

    f(i theta) = d^2(r, z)
    f''(i theta) = 2 sinh^2 r (u arch_ratio(u) - 1) / (u^2 - 1),  u = cosh r cos theta

and

    p_t(r, z) ~ 1/2 (4 pi)^(-3/2) arccosh(u) / (sinh r sqrt(u arch_ratio(u) - 1)) t^(-3/2) e^(-d^2 / 4t).

For u in (-1, 1) arccosh(u)^2 = -arccos(u)^2 and u arch_ratio(u) - 1 < 0, so
the ratio under the square root stays positive and the prefactor is real.
All values are in the standard normalization.
"""

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
import logging
import math

import numpy as np
import pandas as pd

from heatkernel.constants import (
    ARCH_SERIES_RADIUS, ASYM_R_CUTOFF, CASE_TOL, LEANDRE_MAX_SPREAD,
    LEANDRE_T_GRID, Z_CHART_SLACK,
)
from heatkernel.distance import ThetaSolution, distance_squared, solve_theta
from heatkernel.errors import ContinuationAmbiguous, DomainError, ExtrapolationUnstable, SingularAtAxis
from heatkernel.kernel import STANDARD, kernel_grid, p_integral
from heatkernel.quadrature import QuadSpec
from heatkernel.special import _arch_ratio, _arch_ratio_slope, _signed_arccosh_sq

log = logging.getLogger(__name__)

_LAPLACE_CONSTANT = 0.5 * (4.0 * math.pi) ** -1.5


@dataclass(frozen=True)
class AsymptoticValue:
    """prefactor * t^power * exp(-exponent_coeff / t)."""

    prefactor: float
    exponent_coeff: float
    power: float
    u_value: float = float("nan")

    def log_evaluate(self, t):
        t = np.asarray(t, dtype=float)
        out = math.log(self.prefactor) + self.power * np.log(t) - self.exponent_coeff / t
        return float(out) if out.ndim == 0 else out

    def evaluate(self, t):
        out = np.exp(self.log_evaluate(t))
        return float(out) if np.ndim(out) == 0 else out


# ── Leading terms ─────────────────────────────────────────────────────────────

def asym_axis_z(t: float, z: float) -> float:
    """e^-t / (16 t^2) exp(-(2 pi z + z^2) / 4t) for z in (0, pi]."""
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t!r}")
    if not 0.0 < z <= math.pi + Z_CHART_SLACK:
        raise DomainError(f"asym_axis_z needs z in (0, pi], got {z!r}")
    return math.exp(-t - (2.0 * math.pi * z + z * z) / (4.0 * t)) / (16.0 * t * t)


def _r_prefactor(r: float) -> float:
    # r coth r - 1 = r^2/3 - r^4/45 + ...
    excess = r * r / 3.0 - r**4 / 45.0 if r < 1e-3 else r / math.tanh(r) - 1.0
    return _LAPLACE_CONSTANT * r / math.sinh(r) / math.sqrt(excess)


def asym_r(t: float, r: float) -> float:
    """1/2 (4 pi t)^(-3/2) (r / sinh r) (r coth r - 1)^(-1/2) exp(-r^2 / 4t)."""
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t!r}")
    if not r >= ASYM_R_CUTOFF:
        raise SingularAtAxis(f"asym_r needs r >= {ASYM_R_CUTOFF}, got {r!r}")
    return _r_prefactor(r) * t**-1.5 * math.exp(-r * r / (4.0 * t))


def saddle_curvature(r: float, u: float) -> float:
    """f''(i theta) = 2 sinh^2 r (u arch_ratio(u) - 1) / (u^2 - 1); positive for u > -1."""
    if not u > -1.0:
        raise ContinuationAmbiguous(f"saddle curvature undefined at u = {u!r}")
    return -2.0 * math.sinh(r) ** 2 * float(_arch_ratio_slope(u))


def _continued_ratio(u: float) -> float:
    """arccosh(u)^2 / (u arch_ratio(u) - 1), real on u > -1; 3 at u = 1."""
    e = u - 1.0
    if abs(e) < ARCH_SERIES_RADIUS:
        return 3.0 + 0.4 * e
    return float(_signed_arccosh_sq(u)) / (u * float(_arch_ratio(u)) - 1.0)


def asym_generic(t: float, r: float, z: float, theta_sol: ThetaSolution | None = None) -> AsymptoticValue:
    """Laplace leading term at an off-axis point.

    z = 0 gives the asym_r term. theta_sol is solved for when omitted.
    """
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t!r}")
    if not r >= ASYM_R_CUTOFF:
        raise SingularAtAxis(f"asym_generic needs r >= {ASYM_R_CUTOFF}, got {r!r}")
    if not abs(z) <= math.pi + Z_CHART_SLACK:
        raise DomainError(f"z must lie in [-pi, pi], got {z!r}")
    if abs(z) < CASE_TOL:
        return AsymptoticValue(_r_prefactor(r), r * r / 4.0, -1.5, math.cosh(r))

    theta = (theta_sol or solve_theta(r, z)).theta
    u = math.cosh(r) * math.cos(theta)
    if not u > -1.0:
        raise ContinuationAmbiguous(f"u = cosh r cos theta = {u!r} <= -1 at (r={r}, z={z})")
    prefactor = _LAPLACE_CONSTANT * math.sqrt(_continued_ratio(u)) / math.sinh(r)
    d2 = (theta - z) ** 2 * math.tanh(r) ** 2 / math.sin(theta) ** 2
    return AsymptoticValue(prefactor, d2 / 4.0, -1.5, u)


# ── Validation against the integral representation ────────────────────────────

def laplace_ratios(r: float, z: float, times: Iterable[float], q: QuadSpec | None = None) -> pd.DataFrame:
    """Kernel over its leading term at each t, from the adaptive quadrature."""
    times = list(times)
    rows = []
    asym = asym_generic(min(times), r, z) if r >= ASYM_R_CUTOFF else None
    for t in times:
        kv = p_integral(t, r, z, q)
        if asym is None:
            log_lead = math.log(asym_axis_z(t, abs(z)))
        else:
            log_lead = asym.log_evaluate(t)
        rows.append({
            "t": t, "log_kernel": kv.log_value, "log_leading": log_lead,
            "ratio": math.exp(kv.log_value - log_lead),
        })
    return pd.DataFrame(rows)


@dataclass(frozen=True)
class Extrapolation:
    """Small-time limit of -4 t ln p_t with the fit's diagnostics."""

    value: float
    residual: float
    spread: float
    t_grid: tuple[float, ...]
    samples: tuple[float, ...] = field(repr=False)

    def __float__(self) -> float:
        return self.value


def leandre_extract(r: float, z: float, t_grid: Sequence[float] = LEANDRE_T_GRID,
                    q: QuadSpec | None = None) -> Extrapolation:
    """Extrapolate y(t) = -4 t ln p_t(r, z) to t = 0.

    y(t) = d^2 + a t + b t ln t + O(t^2); the fit eliminates both correction
    terms. The estimate is compared with first-order Richardson on the two
    smallest times and rejected when they disagree by more than
    LEANDRE_MAX_SPREAD (relative to max(d^2, 1)).
    """
    times = np.asarray(t_grid, dtype=float)
    if times.size < 3:
        raise DomainError(f"leandre_extract needs at least 3 times, got {t_grid!r}")
    if np.any(times <= 0.0) or np.any(np.diff(times) >= 0.0):
        raise DomainError(f"t_grid must be positive and strictly decreasing, got {t_grid!r}")
    if not r >= 0.0 or not abs(z) <= math.pi + Z_CHART_SLACK:
        raise DomainError(f"point (r={r!r}, z={z!r}) outside the chart")

    y = np.array([-4.0 * t * p_integral(t, r, z, q).log_value for t in times])
    design = np.column_stack([np.ones_like(times), times, times * np.log(times)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    fit_residual = float(np.sqrt(np.mean((design @ coef - y) ** 2)))
    value = float(coef[0])

    t1, t2 = times[-1], times[-2]
    richardson = (t2 * y[-1] - t1 * y[-2]) / (t2 - t1)
    spread = abs(value - richardson) / max(abs(value), 1.0)
    log.debug("leandre r=%g z=%g: fit %.8g, richardson %.8g, spread %.3g", r, z, value, richardson, spread)
    if not (np.isfinite(value) and spread <= LEANDRE_MAX_SPREAD):
        raise ExtrapolationUnstable(
            f"-4t ln p_t at (r={r}, z={z}): fit {value:.6g} vs two-point {richardson:.6g}"
        )
    return Extrapolation(value, fit_residual, spread, tuple(times.tolist()), tuple(y.tolist()))


# ── Gaussian upper estimate ───────────────────────────────────────────────────

def upper_estimate_check(eps: float, times: Iterable[float], r_grid, z_grid) -> pd.DataFrame:
    """Smallest C with p_t <= C t^-2 exp(-d^2 / (4 (1 + eps) t)) on the grid, per t.

    Uses delta = 0 in the exponential-in-time factor; C should stay bounded as t -> 0.
    """
    if not eps > 0.0:
        raise DomainError(f"eps must be positive, got {eps!r}")
    rr, zz = np.meshgrid(np.asarray(r_grid, dtype=float), np.asarray(z_grid, dtype=float), indexing="ij")
    d2 = np.array([[distance_squared(r, z).d2 for z in zz[0]] for r in rr[:, 0]])
    rows = []
    for t in times:
        p, _ = kernel_grid(t, rr, zz, STANDARD)
        ok = p > 0.0
        log_c = np.log(p[ok]) + 2.0 * math.log(t) + d2[ok] / (4.0 * (1.0 + eps) * t)
        rows.append({"t": t, "eps": eps, "C": float(np.exp(log_c.max())), "points": int(ok.sum())})
    return pd.DataFrame(rows)
