"""Quadrature rules: tolerances, composite Gauss-Legendre, adaptive panels,
and tensor rules for integrals against the Haar measure."""

from dataclasses import dataclass
from functools import cache
import logging
import math

import numpy as np
from scipy import integrate

from heatkernel.constants import (
    DEFAULT_ABS_TOL, DEFAULT_MAX_LEVELS, DEFAULT_REL_TOL, GRADING_START,
    GRADING_STOP, MU_ORDER, MU_RHO_PANEL, MU_ZETA_PANEL,
)
from heatkernel.errors import DomainError, QuadratureNoConvergence
from heatkernel.group import mu_density

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadSpec:
    """Quadrature tolerances.

    max_halfwidth fixes the truncation length of the y-integral; None picks it
    from the integrand envelope. max_levels bounds the adaptive subdivision
    (50 subintervals per level on each panel).
    """

    abs_tol: float = DEFAULT_ABS_TOL
    rel_tol: float = DEFAULT_REL_TOL
    max_halfwidth: float | None = None
    max_levels: int = DEFAULT_MAX_LEVELS

    def __post_init__(self):
        if not (self.abs_tol > 0.0 and self.rel_tol > 0.0):
            raise DomainError(f"tolerances must be positive: {self}")
        if not 1 <= self.max_levels <= 40:
            raise DomainError(f"max_levels must lie in [1, 40], got {self.max_levels}")
        if self.max_halfwidth is not None and not self.max_halfwidth > 0.0:
            raise DomainError(f"max_halfwidth must be positive, got {self.max_halfwidth}")

    @property
    def subinterval_limit(self) -> int:
        return 50 * self.max_levels


@cache
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]."""
    return np.polynomial.legendre.leggauss(order)


def composite_rule(breaks, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on every panel [breaks[i], breaks[i+1]]."""
    breaks = np.asarray(breaks, dtype=float)
    x, w = gauss_legendre(order)
    mid = 0.5 * (breaks[1:] + breaks[:-1])
    half = 0.5 * (breaks[1:] - breaks[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


@cache
def graded_breaks(n_uniform: int) -> np.ndarray:
    """Panel ends on [0, 1]: geometric near 0, then n_uniform equal panels."""
    n_geometric = int(math.ceil(math.log2(GRADING_STOP / GRADING_START)))
    geometric = GRADING_START * 2.0 ** np.arange(n_geometric)
    uniform = np.linspace(GRADING_STOP, 1.0, n_uniform + 1)
    return np.concatenate(([0.0], geometric[geometric < GRADING_STOP], uniform))


def integrate_panels(fn, breaks, q: QuadSpec) -> tuple[float, float]:
    """Adaptive quadrature of a scalar function panel by panel."""
    breaks = np.asarray(breaks, dtype=float)
    n = len(breaks) - 1
    epsabs = q.abs_tol / n
    total = err = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        res = integrate.quad(fn, a, b, epsabs=epsabs, epsrel=q.rel_tol,
                             limit=q.subinterval_limit, full_output=1)
        value, e = res[0], res[1]
        if len(res) > 3 and e > max(epsabs, q.rel_tol * abs(value)):
            raise QuadratureNoConvergence(
                f"panel [{a:.6g}, {b:.6g}] did not converge: {res[3].splitlines()[0]}",
                value=total + value, err_estimate=err + e,
            )
        total += value
        err += e
    log.debug("integrated %d panels, err %.3g", n, err)
    return total, err


# ── Integrals against mu ──────────────────────────────────────────────────────

def mu_rule(t: float, r_max: float, z_max: float, order: int = MU_ORDER):
    """Tensor rule for 2 pi int_{-z_max}^{z_max} int_0^{r_max} F(r, z) sinh(2r)/2 dr dz,
    F even in z.

    Panels are laid out in the dilated variables (r / sqrt(t), z / t), where the
    kernel varies on unit scale for every t. Returns flat arrays (r, z, weight)
    over the half z >= 0; the weights carry the factor 2 for the mirror half.
    """
    s = math.sqrt(t)
    rho_max, zeta_max = r_max / s, z_max / t
    n_rho = max(2, int(math.ceil(rho_max / MU_RHO_PANEL)))
    n_zeta = max(2, int(math.ceil(zeta_max / MU_ZETA_PANEL)))
    rho, w_rho = composite_rule(np.linspace(0.0, rho_max, n_rho + 1), order)
    zeta, w_zeta = composite_rule(np.linspace(0.0, zeta_max, n_zeta + 1), order)
    r = s * rho
    z = t * zeta
    w_r = s * w_rho * mu_density(r)
    w_z = 2.0 * t * w_zeta
    rr, zz = np.meshgrid(r, z, indexing="ij")
    weights = 2.0 * math.pi * np.outer(w_r, w_z)
    return rr.ravel(), zz.ravel(), weights.ravel()


def rectangle_rule(a: float, b: float, c: float, d: float, scale: float,
                   order: int = MU_ORDER) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tensor rule on [a, b] x [c, d] with panels no wider than `scale`."""
    def axis(lo, hi):
        n = max(2, int(math.ceil((hi - lo) / scale)))
        return composite_rule(np.linspace(lo, hi, n + 1), order)

    x, wx = axis(a, b)
    y, wy = axis(c, d)
    xx, yy = np.meshgrid(x, y, indexing="ij")
    return xx.ravel(), yy.ravel(), np.outer(wx, wy).ravel()
