"""
Constants of the functional inequalities satisfied by p_t, and numerical sweeps
checking the inequalities themselves.

    A(t)  = -1/4 d/dt int p_t^2 dmu = -1/4 d/dt p_2t(0, 0)       gradient bound
    A_LY  = (3a - 1)/(a - 1) + t/(2a)                           Li-Yau, a > 2
    B(t)  = 16t/a + 4(3a - 1)/(a - 1) + (3a - 1)^2 / (4(a - 2) t)
    C(t)  = 1/2 int Gamma(p_t) / p_t dmu                        reverse Poincare

Every check returns reports carrying an error budget; a report whose slack is
within the budget of zero is inconclusive rather than failed.
"""

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cache
import itertools
import logging
import math
from typing import Literal

import numpy as np
import pandas as pd
from scipy import optimize

from heatkernel.constants import (
    DENSITY_FLOOR, GRADIENT_GRID, GRADIENT_MAX_SPREAD, GRADIENT_TIMES, HARNACK_MAX_SPREAD, HARNACK_SAMPLE_BOX,
    HARNACK_SAMPLE_NODES,
)
from heatkernel.distance import distance_between, distance_squared, distance_squared_array
from heatkernel.errors import ConvergenceFailure, DegenerateDensity, DomainError
from heatkernel.group import CylCoord, cyl_to_matrix
from heatkernel.kernel import (
    PROBABILITY, STANDARD, Convention, _axis_log, kernel_jet_grid, p_integral, support_box,
)
from heatkernel.quadrature import QuadSpec, mu_rule

log = logging.getLogger(__name__)

Status = Literal["pass", "fail", "inconclusive"]

# Relative rounding floor added to every error budget.
_ROUNDING = 1e-10
_MASS_TOLERANCE = 1e-2


@dataclass(frozen=True)
class LiYauParams:
    alpha: float = 3.0

    def __post_init__(self):
        if not self.alpha > 2.0:
            raise DomainError(f"Li-Yau needs alpha > 2, got {self.alpha!r}")

    @classmethod
    def for_large_time(cls, t: float) -> "LiYauParams":
        """alpha = t, which keeps both Li-Yau coefficients bounded for large t."""
        return cls(alpha=t)


@dataclass(frozen=True)
class InequalityReport:
    t: float
    point: tuple[float, float]
    lhs: float
    rhs: float
    budget: float
    diagnostics: dict[str, float] = field(default_factory=dict)

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def status(self) -> Status:
        if self.slack >= self.budget:
            return "pass"
        if self.slack <= -self.budget:
            return "fail"
        return "inconclusive"

    @property
    def passed(self) -> bool:
        return self.slack >= -self.budget

    def to_record(self) -> dict:
        r, z = self.point
        return {"t": self.t, "r": r, "z": z, "lhs": self.lhs, "rhs": self.rhs,
                "slack": self.slack, "budget": self.budget, "status": self.status,
                **self.diagnostics}


def reports_frame(reports: Iterable[InequalityReport]) -> pd.DataFrame:
    return pd.DataFrame([rep.to_record() for rep in reports])


# ── Constants ─────────────────────────────────────────────────────────────────

def _axis_log_dt(s: float, a: float) -> float:
    """d/ds of ln p_s(0, a) in the standard normalization."""
    e = math.exp(-math.pi * a / (2.0 * s))
    return -1.0 - 2.0 / s + (2.0 * math.pi * a + a * a) / (4.0 * s * s) - math.pi * a / (s * s) * e / (1.0 + e)


def constant_A(t: float, convention: Convention = STANDARD) -> float:
    """-1/4 d/dt p_2t(0, 0); e^-2t (1 + t) / (512 t^3) in the standard normalization."""
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t!r}")
    s = 2.0 * t
    total = 0.0
    for k in convention.images(s):
        a = 2.0 * math.pi * abs(k)
        total += math.exp(float(_axis_log(s, a))) * _axis_log_dt(s, a)
    # d/dt p_2t = 2 p'_s
    return -0.5 * convention.scale * total


def constant_B(t: float, params: LiYauParams) -> float:
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t!r}")
    a = params.alpha
    return 16.0 * t / a + 4.0 * (3.0 * a - 1.0) / (a - 1.0) + (3.0 * a - 1.0) ** 2 / (4.0 * (a - 2.0) * t)


def constant_A_liyau(t: float, params: LiYauParams) -> float:
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t!r}")
    a = params.alpha
    return (3.0 * a - 1.0) / (a - 1.0) + t / (2.0 * a)


# ── Li-Yau ────────────────────────────────────────────────────────────────────

def _grid_arrays(grid) -> tuple[np.ndarray, np.ndarray]:
    pts = np.asarray(list(grid), dtype=float).reshape(-1, 2)
    return pts[:, 0], pts[:, 1]


def liyau_check(t: float, eps: float, grid, params: LiYauParams, q: QuadSpec | None = None,
                convention: Convention = PROBABILITY) -> list[InequalityReport]:
    """Li-Yau for f = p_eps, so that P_t f = p_(t+eps), at each off-axis (r, z).

    lhs = Gamma(ln P_t f) + (4t / alpha) (Z ln P_t f)^2
    rhs = A_LY(t) L P_t f / P_t f + B(t)

    The budget propagates the quadrature error estimates of p and its partials
    to first order.
    """
    if not (t > 0.0 and eps > 0.0):
        raise DomainError(f"t and eps must be positive, got t={t!r}, eps={eps!r}")
    r, z = _grid_arrays(grid)
    s = t + eps
    jet = kernel_jet_grid(s, r, z, convention)
    e = jet.err
    p = jet.value
    coth2 = 1.0 / np.tanh(2.0 * r)
    tanh2 = np.tanh(r) ** 2
    lr, lz = jet.d_r / p, jet.d_z / p
    lp = (jet.d_rr + 2.0 * coth2 * jet.d_r + tanh2 * jet.d_zz) / p
    k = 4.0 * t / params.alpha
    a_ly, b = constant_A_liyau(t, params), constant_B(t, params)
    lhs = lr**2 + (tanh2 + k) * lz**2
    rhs = a_ly * lp + b

    rel_p = e["value"] / p
    d_lr = e["d_r"] / p + np.abs(lr) * rel_p
    d_lz = e["d_z"] / p + np.abs(lz) * rel_p
    d_lp = (e["d_rr"] + 2.0 * np.abs(coth2) * e["d_r"] + tanh2 * e["d_zz"]) / p + np.abs(lp) * rel_p
    budget = (2.0 * np.abs(lr) * d_lr + 2.0 * (tanh2 + k) * np.abs(lz) * d_lz + a_ly * d_lp
              + _ROUNDING * (np.abs(lhs) + np.abs(rhs)))

    reports = []
    for i in range(r.size):
        reports.append(InequalityReport(
            t=t, point=(float(r[i]), float(z[i])), lhs=float(lhs[i]), rhs=float(rhs[i]),
            budget=float(budget[i]),
            diagnostics={"gamma": float(lr[i] ** 2 + tanh2[i] * lz[i] ** 2), "L_over_p": float(lp[i]),
                         "err_p": float(e["value"][i]), "err_r": float(e["d_r"][i]),
                         "err_z": float(e["d_z"][i]), "err_rr": float(e["d_rr"][i]),
                         "err_zz": float(e["d_zz"][i])},
        ))
    failed = sum(rep.status == "fail" for rep in reports)
    if failed:
        log.warning("Li-Yau at t=%g: %d of %d points fail", t, failed, len(reports))
    return reports


# ── Gradient bound ────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class GradientBound:
    """Best constant C with sqrt(Gamma(ln p_t)) <= C (d/t + 1/sqrt(t)), or (d/t + 1) for t > 2."""

    t: float
    form: Literal["small_time", "large_time"]
    c_hat: float
    table: pd.DataFrame = field(repr=False)


def gradient_bound_check(t: float, grid, convention: Convention = PROBABILITY) -> GradientBound:
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t!r}")
    if 1.0 <= t <= 2.0:
        raise DomainError(f"gradient bound is stated for t < 1 or t > 2, got {t!r}")
    form = "small_time" if t < 1.0 else "large_time"
    r, z = _grid_arrays(grid)
    jet = kernel_jet_grid(t, r, z, convention)
    lr, lz = jet.d_r / jet.value, jet.d_z / jet.value
    lhs = np.sqrt(lr**2 + np.tanh(r) ** 2 * lz**2)
    d = np.sqrt(distance_squared_array(r, z))
    scale = d / t + (1.0 / math.sqrt(t) if form == "small_time" else 1.0)
    ratio = lhs / scale
    table = pd.DataFrame({"r": r, "z": z, "sqrt_gamma": lhs, "d": d, "ratio": ratio})
    c_hat = float(np.max(ratio))
    if not math.isfinite(c_hat):
        raise ConvergenceFailure(f"gradient bound at t={t}: non-finite ratio")
    return GradientBound(t, form, c_hat, table)


def gradient_grid(box=GRADIENT_GRID) -> list[tuple[float, float]]:
    (r_lo, r_hi), (z_lo, z_hi), n = box
    return [(float(r), float(z)) for r, z in itertools.product(np.linspace(r_lo, r_hi, n), np.linspace(z_lo, z_hi, n))]


def relative_spread(values) -> float:
    """(max - min) / max; 0 when every value is 0."""
    values = np.asarray(values, dtype=float)
    top = values.max()
    return float((top - values.min()) / top) if top > 0.0 else 0.0


@dataclass(frozen=True)
class GradientStability:
    """C_hat at several times on one grid."""

    bounds: tuple[GradientBound, ...]

    @property
    def c_hats(self) -> np.ndarray:
        return np.array([b.c_hat for b in self.bounds])

    @property
    def spread(self) -> float:
        return relative_spread(self.c_hats)

    @property
    def stable(self) -> bool:
        return self.spread <= GRADIENT_MAX_SPREAD


def gradient_bound_stability(times: Iterable[float] = GRADIENT_TIMES, grid=None,
                             convention: Convention = PROBABILITY) -> GradientStability:
    """gradient_bound_check at each time; all times must share one form of the bound."""
    grid = gradient_grid() if grid is None else list(grid)
    bounds = tuple(gradient_bound_check(float(t), grid, convention) for t in times)
    if len({b.form for b in bounds}) > 1:
        raise DomainError("gradient_bound_stability mixes the small- and large-time forms")
    found = GradientStability(bounds)
    log.info("gradient bound: C_hat %s, spread %.3f", np.round(found.c_hats, 6).tolist(), found.spread)
    return found


# ── Reverse Poincare constant ─────────────────────────────────────────────────

def constant_C(t: float, q: QuadSpec | None = None, box: tuple[float, float] | None = None) -> float:
    """1/2 int Gamma(p_t, p_t) / p_t dmu for the probability kernel (mass 1)."""
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t!r}")
    r_max, z_max = box or support_box(t)
    r, z, w = mu_rule(t, r_max, z_max)
    jet = kernel_jet_grid(t, r, z, PROBABILITY)
    p = jet.value
    mass = float(np.sum(w * p))
    if abs(mass - 1.0) > _MASS_TOLERANCE:
        raise DegenerateDensity(f"kernel grid at t={t} carries mass {mass:.6g}, not 1")
    floor = p <= DENSITY_FLOOR
    if floor.any():
        log.warning("constant_C(t=%g): %d nodes below the density floor set to 0", t, int(floor.sum()))
    safe = np.where(floor, 1.0, p)
    fisher = np.where(floor, 0.0, (jet.d_r**2 + np.tanh(r) ** 2 * jet.d_z**2) / safe)
    value = 0.5 * float(np.sum(w * fisher))
    log.debug("constant_C(t=%g) = %.10g over %d nodes, mass %.10g", t, value, r.size, mass)
    return value


# ── Harnack ───────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class HarnackFit:
    """Smallest A1, A2 >= 0 (by A1 + A2) making every sampled pair satisfy the bound.

    small_time: ln ratio <= A1 ln(t2/t1) + A2 delta^2 / (t2 - t1)
    large_time: ln ratio <= A1 (t2 - t1) + A2 delta^2 / (t2 - t1)

    The pair (e, e), with delta = 0 and the closed-form ratio anchor, is always
    part of the fit; it bounds A1 from below.
    """

    t1: float
    t2: float
    form: Literal["small_time", "large_time"]
    a1: float
    a2: float
    anchor: float
    table: pd.DataFrame = field(repr=False)


@cache
def _distance(r: float, z: float) -> float:
    return distance_squared(r, z).d


def _delta(g1: CylCoord, g2: CylCoord, exact: bool) -> float:
    if exact:
        return distance_between(cyl_to_matrix(g1), cyl_to_matrix(g2)).d
    return _distance(g1.r, g1.z) + _distance(g2.r, g2.z)


def harnack_spot_check(t1: float, t2: float, pairs: Sequence[tuple[CylCoord, CylCoord]],
                       exact_delta: bool = False, q: QuadSpec | None = None,
                       convention: Convention = PROBABILITY) -> HarnackFit:
    """Fit the Harnack constants on sampled pairs (g1, g2).

    delta(g1, g2) defaults to the triangle bound d(g1) + d(g2); exact_delta
    computes d(g1^-1 g2) through the group law, which needs the product to
    stay inside the chart.
    """
    if not 0.0 < t1 < t2:
        raise DomainError(f"need 0 < t1 < t2, got t1={t1!r}, t2={t2!r}")
    if t2 < 1.0:
        form, a = "small_time", math.log(t2 / t1)
    elif t1 > 2.0:
        form, a = "large_time", t2 - t1
    else:
        raise DomainError(f"Harnack is stated for t1 < t2 < 1 or 2 < t1 < t2, got ({t1}, {t2})")
    if not pairs:
        raise DomainError("harnack_spot_check needs at least one pair")

    @cache
    def log_kernel(t: float, r: float, z: float) -> float:
        return p_integral(t, r, z, q, convention).log_value

    anchor = log_kernel(t1, 0.0, 0.0) - log_kernel(t2, 0.0, 0.0)
    rows = []
    for g1, g2 in pairs:
        rows.append({"r1": g1.r, "z1": g1.z, "r2": g2.r, "z2": g2.z,
                     "log_ratio": log_kernel(t1, g1.r, g1.z) - log_kernel(t2, g2.r, g2.z),
                     "delta": _delta(g1, g2, exact_delta)})
    table = pd.DataFrame(rows)
    b = table["delta"].to_numpy() ** 2 / (t2 - t1)
    lhs = np.vstack([np.column_stack([np.full(len(table), a), b]), [a, 0.0]])
    result = optimize.linprog(
        c=[1.0, 1.0],
        A_ub=-lhs,
        b_ub=-np.append(table["log_ratio"].to_numpy(), anchor),
        bounds=[(0.0, None), (0.0, None)],
        method="highs",
    )
    if not result.success:
        raise ConvergenceFailure(f"Harnack fit at ({t1}, {t2}) failed: {result.message}")
    a1, a2 = (float(v) for v in result.x)
    table["log_bound"] = a1 * a + a2 * b
    table["slack"] = table["log_bound"] - table["log_ratio"]
    log.debug("Harnack (%g, %g) %s: A1=%.6g A2=%.6g over %d pairs", t1, t2, form, a1, a2, len(table))
    return HarnackFit(t1, t2, form, a1, a2, anchor, table)


def harnack_samples(nodes: int = HARNACK_SAMPLE_NODES,
                    box=HARNACK_SAMPLE_BOX) -> tuple[list[CylCoord], list[CylCoord]]:
    """Two disjoint nodes x nodes grids interleaving over one (r, z) box."""
    (r_lo, r_hi), (z_lo, z_hi) = box
    r, z = np.linspace(r_lo, r_hi, 2 * nodes), np.linspace(z_lo, z_hi, 2 * nodes)
    return tuple(
        [CylCoord(float(rv), 0.0, float(zv)) for rv, zv in itertools.product(r[k::2], z[k::2])]
        for k in (0, 1)
    )


@dataclass(frozen=True)
class HarnackStability:
    """The same Harnack fit on two disjoint samples."""

    fits: tuple[HarnackFit, HarnackFit]

    @property
    def spread_a1(self) -> float:
        return relative_spread([f.a1 for f in self.fits])

    @property
    def spread_a2(self) -> float:
        return relative_spread([f.a2 for f in self.fits])

    @property
    def spread(self) -> float:
        return max(self.spread_a1, self.spread_a2)

    @property
    def stable(self) -> bool:
        return self.spread <= HARNACK_MAX_SPREAD


def harnack_stability(t1: float, t2: float, samples=None, exact_delta: bool = False,
                      q: QuadSpec | None = None, convention: Convention = PROBABILITY) -> HarnackStability:
    """Fit on all pairs within each of two disjoint samples and compare the constants."""
    first, second = harnack_samples() if samples is None else samples
    if {(g.r, g.theta, g.z) for g in first} & {(g.r, g.theta, g.z) for g in second}:
        raise DomainError("harnack_stability needs disjoint samples")
    fits = tuple(harnack_spot_check(t1, t2, list(itertools.product(s, s)), exact_delta, q, convention)
                 for s in (first, second))
    found = HarnackStability(fits)
    log.info("Harnack (%g, %g): A1 %.4g / %.4g, A2 %.4g / %.4g, spread %.3f", t1, t2,
             fits[0].a1, fits[1].a1, fits[0].a2, fits[1].a2, found.spread)
    return found
