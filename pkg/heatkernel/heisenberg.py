"""
The Heisenberg group as the small-scale limit of SL(2,R).

    h_t(r, z) = 1/(16 pi^2) int_R cos(lambda z / 2) (lambda / sinh(lambda t))
                exp(-(r^2 / 4) lambda coth(lambda t)) d lambda

is the heat kernel of X~^2 + Y~^2 with respect to r dr dtheta dz. Dilating
SL(2,R) by (r, z) -> (sqrt(c) r, c z) turns X, Y, Z into X^c, Y^c, Z^c, which
converge to X~, Y~, Z~ at rate 1/c, and

    t^2 p_t(sqrt(t) r, t z) -> kappa h_1(r, z),    t -> 0,

with kappa measured as the common value of the ratio at several points. It
comes out as 1/2 for the standard normalization of p_t (its mass over the
universal cover is 1/2) and 1 for the probability normalization.
"""

from collections.abc import Callable, Iterable
from dataclasses import dataclass
import logging
import math

import numpy as np
import pandas as pd

from heatkernel.constants import (
    AXIS_CUTOFF, DILATION_POINTS, DILATION_TIMES, GL_ORDER, HEISENBERG_PREFACTOR, HEISENBERG_R_MAX,
    HEISENBERG_SERIES, HEISENBERG_Z_MAX, KAPPA_CANDIDATES, TRUNCATION_LOG_TOL, Z_CHART_SLACK,
)
from heatkernel.errors import DomainError, QuadratureNoConvergence, SingularAtAxis
from heatkernel.group import TWO_PI, _coordinate_gradient
from heatkernel.kernel import STANDARD, Convention, KernelValue, p_integral
from heatkernel.quadrature import QuadSpec, composite_rule, integrate_panels

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class HeisenbergPoint:
    r: float
    theta: float
    z: float

    def __post_init__(self):
        if not (math.isfinite(self.r) and math.isfinite(self.theta) and math.isfinite(self.z)):
            raise DomainError(f"non-finite Heisenberg point {self}")
        if self.r < 0.0:
            raise DomainError(f"r must be >= 0, got {self.r!r}")
        object.__setattr__(self, "theta", self.theta % TWO_PI)

    @property
    def xyz(self) -> tuple[float, float, float]:
        return self.r * math.cos(self.theta), self.r * math.sin(self.theta), self.z


# ── Gaveau's formula ──────────────────────────────────────────────────────────

def _lambda_factors(lam, t):
    """(lambda / sinh(lambda t), lambda coth(lambda t)) for lambda >= 0, in exponential form."""
    lam = np.asarray(lam, dtype=float)
    x = lam * t
    small = x < HEISENBERG_SERIES
    with np.errstate(divide="ignore", invalid="ignore"):
        em = -np.expm1(-2.0 * x)
        ratio = np.where(small, (1.0 - x * x / 6.0) / t, 2.0 * lam * np.exp(-x) / em)
        coth = np.where(small, (1.0 + x * x / 3.0) / t, lam * (2.0 - em) / em)
    return ratio, coth


def _gaveau_integrand(lam, t, r, z):
    ratio, coth = _lambda_factors(lam, t)
    return np.cos(0.5 * lam * z) * ratio * np.exp(-0.25 * r * r * coth)


def _lambda_cutoff(t, r) -> np.ndarray:
    """Lambda beyond which lambda e^(-lambda (t + r^2/4)) is negligible, doubled."""
    rate = np.asarray(t, dtype=float) + 0.25 * np.asarray(r, dtype=float) ** 2
    return 2.0 * (-TRUNCATION_LOG_TOL + np.log1p(1.0 / rate)) / rate


def _lambda_panels(lam_max: float, z: float, t: float) -> int:
    # one panel per half oscillation of cos(lambda z / 2); width <= 2/t keeps the
    # poles of 1/sinh(lambda t) at i pi/t far from every panel
    oscillation = math.ceil(lam_max * abs(z) / (2.0 * math.pi))
    return int(oscillation + math.ceil(0.5 * lam_max * t)) + 8


def gaveau_kernel(t: float, r: float, z: float, q: QuadSpec | None = None) -> KernelValue:
    """h_t(r, z) by adaptive quadrature over lambda >= 0."""
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t!r}")
    if not r >= 0.0 or not math.isfinite(z):
        raise DomainError(f"need r >= 0 and finite z, got r={r!r}, z={z!r}")
    q = q or QuadSpec()
    lam_max = float(_lambda_cutoff(t, r))
    breaks = np.linspace(0.0, lam_max, _lambda_panels(lam_max, z, t) + 1)
    fn = lambda lam: float(_gaveau_integrand(lam, t, r, z))
    try:
        integral, err = integrate_panels(fn, breaks, q)
    except QuadratureNoConvergence as exc:
        raise QuadratureNoConvergence(f"gaveau_kernel(t={t}, r={r}, z={z}): {exc}",
                                      value=2.0 * HEISENBERG_PREFACTOR * exc.value,
                                      err_estimate=2.0 * HEISENBERG_PREFACTOR * exc.err_estimate) from exc
    value = 2.0 * HEISENBERG_PREFACTOR * integral
    log_value = math.log(value) if value > 0.0 else float("-inf")
    return KernelValue(value, 2.0 * HEISENBERG_PREFACTOR * err, t, r, z, log_value, "gaveau")


def gaveau_grid(t: float, r, z) -> np.ndarray:
    """h_t at many points by a fixed Gauss-Legendre rule; points sharing z share panels."""
    r, z = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(z, dtype=float))
    shape = r.shape
    r, z = r.ravel(), z.ravel()
    out = np.empty(r.size)
    for zv in np.unique(z):
        idx = np.flatnonzero(z == zv)
        lam_max = float(_lambda_cutoff(t, r[idx].min()))
        nodes, weights = composite_rule(np.linspace(0.0, lam_max, _lambda_panels(lam_max, zv, t) + 1), GL_ORDER)
        vals = _gaveau_integrand(nodes[None, :], t, r[idx, None], zv)
        out[idx] = 2.0 * HEISENBERG_PREFACTOR * (vals @ weights)
    return out.reshape(shape)


def heisenberg_mass(t: float = 1.0, r_max: float = HEISENBERG_R_MAX, z_max: float = HEISENBERG_Z_MAX,
                    order: int = 8) -> float:
    """int int int h_t r dr dtheta dz over r < r_max, |z| < z_max."""
    r, wr = composite_rule(np.linspace(0.0, r_max, int(math.ceil(2.0 * r_max)) + 1), order)
    z, wz = composite_rule(np.linspace(0.0, z_max, int(math.ceil(z_max)) + 1), order)
    rr, zz = np.meshgrid(r, z, indexing="ij")
    h = gaveau_grid(t, rr, zz)
    mass = 2.0 * TWO_PI * float(np.sum(h * np.outer(wr * r, wz)))
    log.debug("Heisenberg mass over r<%g |z|<%g at t=%g: %.12g", r_max, z_max, t, mass)
    return mass


# ── Dilated vector fields and sublaplacians ───────────────────────────────────

@dataclass(frozen=True)
class DilatedCoefficients:
    """Coefficients of d_rr, d_r, d_thetatheta, d_zz, d_zdtheta."""

    rr: float
    r: float
    thetatheta: float
    zz: float
    ztheta: float

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return self.rr, self.r, self.thetatheta, self.zz, self.ztheta


def dilated_sublaplacian_coeffs(c: float, r: float) -> DilatedCoefficients:
    """L^c = (X^c)^2 + (Y^c)^2 in the Heisenberg chart; c = 1 gives L."""
    if not c >= 1.0:
        raise DomainError(f"dilation factor must be >= 1, got {c!r}")
    if not r >= AXIS_CUTOFF:
        raise SingularAtAxis(f"dilated sublaplacian is singular at r = {r!r}")
    s = math.sqrt(c)
    q = r / s
    th = math.tanh(q)
    return DilatedCoefficients(
        rr=1.0,
        r=2.0 / (s * math.tanh(2.0 * q)),
        thetatheta=(1.0 / th - th) ** 2 / c,
        zz=c * th * th,
        ztheta=2.0 * (1.0 - th * th),
    )


def heisenberg_sublaplacian_coeffs(r: float) -> DilatedCoefficients:
    """X~^2 + Y~^2 = d_rr + d_r / r + d_thetatheta / r^2 + r^2 d_zz + 2 d_zdtheta."""
    if not r >= AXIS_CUTOFF:
        raise SingularAtAxis(f"Heisenberg sublaplacian is singular at r = {r!r}")
    return DilatedCoefficients(1.0, 1.0 / r, 1.0 / (r * r), r * r, 2.0)


def dilated_frame(c: float, r, theta, z) -> np.ndarray:
    """Coefficients of X^c, Y^c, Z^c (rows) on d/dr, d/dtheta, d/dz; c = inf gives X~, Y~, Z~."""
    if math.isinf(c):
        return heisenberg_frame(r, theta, z)
    if not c >= 1.0:
        raise DomainError(f"dilation factor must be >= 1, got {c!r}")
    s = math.sqrt(c)
    phi = theta + 2.0 * z / c
    th = np.tanh(r / s)
    a, b = s * th, (1.0 / th - th) / s
    co, si = np.cos(phi), np.sin(phi)
    return np.array([
        [co, -si * b, -si * a],
        [si, co * b, co * a],
        [0.0, 0.0, 1.0],
    ])


def heisenberg_frame(r, theta, z) -> np.ndarray:
    co, si = np.cos(theta), np.sin(theta)
    return np.array([
        [co, -si / r, -r * si],
        [si, co / r, r * co],
        [0.0, 0.0, 1.0],
    ])


def apply_dilated_fields(f: Callable, c: float, p: HeisenbergPoint) -> tuple[float, float, float]:
    """(X^c f, Y^c f, Z^c f) at p for f(r, theta, z)."""
    if p.r < AXIS_CUTOFF:
        raise SingularAtAxis(f"dilated fields are singular at r = {p.r!r}")
    if not math.isinf(c) and abs(p.z) > math.sqrt(c) * math.pi + Z_CHART_SLACK:
        raise DomainError(f"|z| = {abs(p.z)} outside the dilated box for c = {c}")
    grad = np.asarray(_coordinate_gradient(f, p.r, p.theta, p.z))
    xf, yf, zf = dilated_frame(c, p.r, p.theta, p.z) @ grad
    return float(xf), float(yf), float(zf)


def dilated_field_convergence(f: Callable, factors: Iterable[float],
                              points: Iterable[HeisenbergPoint]) -> pd.DataFrame:
    """max over points of |V^c f - V~ f| for V in X, Y, Z, and c times that maximum."""
    points = list(points)
    limit = np.array([apply_dilated_fields(f, math.inf, p) for p in points])
    rows = []
    for c in factors:
        diff = np.abs(np.array([apply_dilated_fields(f, c, p) for p in points]) - limit).max()
        rows.append({"c": c, "max_diff": float(diff), "scaled": float(c * diff)})
    return pd.DataFrame(rows)


# ── The small-time limit of p_t ───────────────────────────────────────────────

def dilation_limit_check(t_grid: Iterable[float], r: float, z: float,
                         convention: Convention = STANDARD, q: QuadSpec | None = None) -> pd.DataFrame:
    """Rows (t, scaled_value, h1_value, ratio) with scaled_value = t^2 p_t(sqrt(t) r, t z)."""
    if not r >= 0.0:
        raise DomainError(f"r must be >= 0, got {r!r}")
    h1 = gaveau_kernel(1.0, r, z, q).value
    rows = []
    for t in t_grid:
        if not t > 0.0 or abs(t * z) > math.pi + Z_CHART_SLACK:
            raise DomainError(f"t = {t!r} puts t z = {t * z!r} outside [-pi, pi]")
        scaled = t * t * p_integral(t, math.sqrt(t) * r, t * z, q, convention).value
        rows.append({"t": t, "scaled_value": scaled, "h1_value": h1, "ratio": scaled / h1})
    table = pd.DataFrame(rows)
    log.debug("dilation limit at (r=%g, z=%g): ratios %s", r, z, table["ratio"].round(6).tolist())
    return table
@dataclass(frozen=True)
class DilationConstant:
    """kappa read off the ratios t^2 p_t(sqrt(t) r, t z) / h_1(r, z) at the smallest t.

    table has one row per (point, t): r, z, t, scaled_value, h1_value, ratio.
    """

    table: pd.DataFrame

    def _ratios_at(self, t: float) -> np.ndarray:
        return self.table.loc[self.table["t"] == t, "ratio"].to_numpy()

    @property
    def t(self) -> float:
        return float(self.table["t"].min())

    @property
    def ratios(self) -> np.ndarray:
        return self._ratios_at(self.t)

    @property
    def kappa(self) -> float:
        return float(self.ratios.mean())

    @property
    def spread(self) -> float:
        """Largest pairwise relative gap, (max - min) / max."""
        r = self.ratios
        return float((r.max() - r.min()) / r.max())

    @property
    def drift(self) -> float:
        """max |ratio(t_min) / ratio(t_next) - 1| over the points; nan for a single t."""
        times = np.sort(self.table["t"].unique())
        if len(times) < 2:
            return math.nan
        return float(np.abs(self._ratios_at(times[0]) / self._ratios_at(times[1]) - 1.0).max())

    @property
    def identified(self) -> float:
        """The candidate in KAPPA_CANDIDATES nearest to kappa."""
        return min(KAPPA_CANDIDATES, key=lambda c: abs(self.kappa / c - 1.0))

    @property
    def mismatch(self) -> float:
        return abs(self.kappa / self.identified - 1.0)


def measure_dilation_constant(t_grid: Iterable[float] = DILATION_TIMES,
                              points: Iterable[tuple[float, float]] = DILATION_POINTS,
                              convention: Convention = STANDARD, q: QuadSpec | None = None) -> DilationConstant:
    """Dilation ratios over points x t_grid; kappa is their common value at the smallest t."""
    t_grid = list(t_grid)
    frames = [dilation_limit_check(t_grid, r, z, convention, q).assign(r=r, z=z) for r, z in points]
    if not frames:
        raise DomainError("measure_dilation_constant needs at least one point")
    table = pd.concat(frames, ignore_index=True)[["r", "z", "t", "scaled_value", "h1_value", "ratio"]]
    found = DilationConstant(table)
    log.info("dilation constant (%s): kappa = %.6g, spread %.2e, nearest %g",
             convention.normalization, found.kappa, found.spread, found.identified)
    return found
