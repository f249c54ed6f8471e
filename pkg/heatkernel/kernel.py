"""
Subelliptic heat kernel p_t(r, z) of L = X^2 + Y^2 on SL(2,R).

    p_t(r, z) = 1/2 (4 pi t)^(-1/2) int_R Re[exp((y - iz)^2 / 4t)] s_t(cosh r cosh y) dy

with s_t(cosh rho) = e^(-t) (4 pi t)^(-3/2) (rho / sinh rho) exp(-rho^2 / 4t).

Writing A = arccosh(cosh r cosh y) and B = y - iz, the integrand is
(A / sinh A) exp((B^2 - A^2) / 4t), analytic in y on the strip
|Im y| < arccos(-1/cosh r). The integral is taken along the line
Im y = h through the saddle point i theta(r, z) (kept CONTOUR_MARGIN away from
the strip edge), where the integrand no longer oscillates with exponentially
large amplitude. h = 0 gives the real cosine-weighted integral.

Two quadrature paths share the integrand:
    p_integral      scalar, adaptive (scipy quad per panel)
    kernel_grid     vectorized composite Gauss-Legendre over many points,
                    also used for derivative jets and 2-D integrals against mu
"""

from collections.abc import Callable
from dataclasses import dataclass, field
import cmath
import logging
import math
from typing import Literal

import numpy as np
from scipy import integrate, special

from heatkernel.constants import (
    AXIS_DELEGATE_R, CONTOUR_MARGIN, GL_ORDER, GL_ORDER_LOW,
    IMAGE_RELEVANCE, KERNEL_FD_STEP, NORMALIZATION_SCALE,
    SINH_RATIO_SERIES, SUPPORT_LEVEL, SUPPORT_PAD, SUPPORT_R_MAX,
    TRUNCATION_LOG_TOL, Z_CHART_SLACK,
)
from heatkernel.distance import _solve_theta_array, distance_squared_array, theta_bound
from heatkernel.errors import DomainError, QuadratureNoConvergence
from heatkernel.group import Partials, RadialFunction
from heatkernel.quadrature import (
    QuadSpec, composite_rule, graded_breaks, integrate_panels, mu_rule, rectangle_rule,
)
from heatkernel.special import _signed_arccosh_sq, arch_ratio, log_sinh_ratio_derivatives, sinh_ratio

__all__ = [
    "Convention", "KernelJet", "KernelValue", "STANDARD", "PROBABILITY",
    "arch_ratio", "delta2_expectation", "heat_residual", "integrate_mu",
    "kernel_grid", "kernel_jet_grid", "kernel_radial_function", "l2_mass",
    "p_axis", "p_integral", "s_kernel", "support_box", "total_mass",
]

log = logging.getLogger(__name__)

# Elements of the (points x nodes) arrays processed at once.
_CHUNK_ELEMENTS = 1 << 18
_MIN_PANELS = 16


@dataclass(frozen=True)
class Convention:
    """Normalization of the kernel.

    "standard" is the displayed integral (p_t(0, 0) = e^-t / 64 t^2, mass 1/2 over
    the universal cover). "probability" doubles it; with fiber_images = K the
    images z + 2 pi k, 0 < |k| <= K, are added, which turns the cover kernel
    into the kernel of SL(2,R) itself.
    """

    normalization: Literal["standard", "probability"] = "standard"
    fiber_images: int = 0

    def __post_init__(self):
        if self.normalization not in NORMALIZATION_SCALE:
            raise DomainError(f"unknown normalization {self.normalization!r}")
        if self.fiber_images < 0:
            raise DomainError(f"fiber_images must be >= 0, got {self.fiber_images}")

    @property
    def scale(self) -> float:
        return NORMALIZATION_SCALE[self.normalization]

    def images(self, t: float) -> list[int]:
        """Fiber images that can contribute at double precision."""
        keep = [0]
        for k in range(1, self.fiber_images + 1):
            a = (2 * k - 1) * math.pi
            if -(2.0 * math.pi * a + a * a) / (4.0 * t) > math.log(IMAGE_RELEVANCE):
                keep += [k, -k]
        return keep


STANDARD = Convention()
PROBABILITY = Convention("probability", fiber_images=1)


@dataclass(frozen=True)
class KernelValue:
    value: float
    err_estimate: float
    t: float
    r: float
    z: float
    log_value: float = float("nan")
    method: str = "integral"


@dataclass(frozen=True)
class KernelJet:
    """p and its partials at a set of points, with error estimates per entry."""

    value: np.ndarray
    d_r: np.ndarray
    d_z: np.ndarray
    d_rr: np.ndarray
    d_zz: np.ndarray
    d_rz: np.ndarray
    d_t: np.ndarray
    err: dict[str, np.ndarray] = field(default_factory=dict)

    def partials(self) -> Partials:
        return Partials(self.value, self.d_r, self.d_z, self.d_rr, self.d_zz, self.d_rz)

    def log_partials(self) -> Partials:
        """Partials of ln p."""
        p = self.value
        lr, lz = self.d_r / p, self.d_z / p
        return Partials(
            np.log(p), lr, lz,
            self.d_rr / p - lr**2,
            self.d_zz / p - lz**2,
            self.d_rz / p - lr * lz,
        )


# ── Closed forms ──────────────────────────────────────────────────────────────

def s_kernel(t: float, rho):
    """Heat kernel of the 3-D hyperbolic space at hyperbolic distance rho."""
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t!r}")
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0.0):
        raise DomainError(f"rho must be >= 0, got {rho!r}")
    small = rho < SINH_RATIO_SERIES
    with np.errstate(invalid="ignore", over="ignore"):
        ratio = np.where(small, 1.0 - rho**2 / 6.0, rho / np.sinh(np.where(small, 1.0, rho)))
    out = math.exp(-t) / (4.0 * math.pi * t) ** 1.5 * ratio * np.exp(-(rho**2) / (4.0 * t))
    return float(out) if out.ndim == 0 else out


def _axis_log(t: float, z) -> np.ndarray:
    """ln of the standard-normalized axis value at any real z."""
    az = np.abs(np.asarray(z, dtype=float))
    return (
        -t - math.log(16.0 * t * t)
        - (2.0 * math.pi * az + az**2) / (4.0 * t)
        - 2.0 * np.log1p(np.exp(-math.pi * az / (2.0 * t)))
    )


def p_axis(t: float, z, convention: Convention = STANDARD):
    """p_t(0, z) = e^-t / (16 t^2) exp(-(2 pi |z| + z^2) / 4t) / (1 + exp(-pi |z| / 2t))^2."""
    _check_tz(t, z)
    z = np.asarray(z, dtype=float)
    total = sum(np.exp(_axis_log(t, z + 2.0 * math.pi * k)) for k in convention.images(t))
    out = convention.scale * total
    return float(out) if out.ndim == 0 else out


def _check_tz(t, z):
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t!r}")
    if np.any(~(np.abs(np.asarray(z, dtype=float)) <= math.pi + Z_CHART_SLACK)):
        raise DomainError(f"z must lie in [-pi, pi], got {z!r}")


def _check_trz(t, r, z):
    _check_tz(t, z)
    if np.any(~(np.asarray(r, dtype=float) >= 0.0)):
        raise DomainError(f"r must be >= 0, got {r!r}")


# ── Contour geometry ──────────────────────────────────────────────────────────

def _contour_height(r, z, contour: str = "saddle") -> np.ndarray:
    """Im y of the integration line."""
    r, z = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(z, dtype=float))
    if contour == "real":
        return np.zeros(r.size)
    theta = _solve_theta_array(r, z).theta
    limit = theta_bound(r.ravel()) - CONTOUR_MARGIN
    return np.clip(theta, -limit, limit)


def _log_scale(t, r, z, h) -> np.ndarray:
    """Re of the exponent at y = ih; the integrand is normalized by its exponential."""
    w0 = np.cosh(r) * np.cos(h)
    return (-((h - z) ** 2) - _signed_arccosh_sq(w0)) / (4.0 * t)


def _exponent(x, t, r, z, h):
    """(A, B, E) along y = x + ih; E = (B^2 - A^2) / 4t."""
    y = x + 1j * h
    a = np.arccosh(np.cosh(r) * np.cosh(y))
    b = x + 1j * (h - z)
    return a, b, (b * b - a * a) / (4.0 * t)


def _truncation(t, r, z, h, scale, max_halfwidth: float | None) -> np.ndarray:
    """Length X with |integrand| < exp(TRUNCATION_LOG_TOL) beyond it, doubled."""
    if max_halfwidth is not None:
        return np.full(np.shape(r), float(max_halfwidth))
    x = np.broadcast_to(np.minimum(1.0, 4.0 * np.sqrt(t)), np.shape(r)).astype(float)
    for _ in range(64):
        a, _, e = _exponent(x, t, r, z, h)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            mag = e.real - scale + np.log(np.abs(sinh_ratio(a)))
        open_ = ~(mag < TRUNCATION_LOG_TOL)
        if not open_.any():
            break
        x = np.where(open_, 2.0 * x, x)
    return 2.0 * x


def _panel_count(t, z, h, x_max) -> np.ndarray:
    """Uniform panels: at least two per oscillation of exp(-i x z / 2t), rounded up to a power of two."""
    cycles = x_max * np.abs(z) / (4.0 * math.pi * t)
    need = np.maximum(_MIN_PANELS, 2.0 * cycles + 8.0)
    return (2 ** np.ceil(np.log2(need))).astype(int)


# ── Scalar adaptive path ──────────────────────────────────────────────────────

def _scalar_integrand(t: float, r: float, z: float, h: float, scale: float) -> Callable[[float], float]:
    ch = math.cosh(r)

    def f(x: float) -> float:
        y = complex(x, h)
        a = cmath.acosh(ch * cmath.cosh(y))
        ratio = 1.0 - a * a / 6.0 if abs(a) < SINH_RATIO_SERIES else a / cmath.sinh(a)
        b = complex(x, h - z)
        return (ratio * cmath.exp((b * b - a * a) / (4.0 * t) - scale)).real

    return f


def _single_integral(t: float, r: float, z: float, q: QuadSpec, contour: str) -> tuple[float, float, float]:
    """(value, err, log_value) of one fiber image, standard normalization."""
    if r < AXIS_DELEGATE_R:
        lv = float(_axis_log(t, z))
        return math.exp(lv), 0.0, lv
    h = float(_contour_height(r, z, contour)[0])
    scale = float(_log_scale(t, r, z, h))
    x_max = float(_truncation(np.array([t]), np.array([r]), np.array([z]), np.array([h]),
                              np.array([scale]), q.max_halfwidth)[0])
    n_uniform = int(math.ceil(x_max * abs(z) / (2.0 * math.pi * t))) + 8
    breaks = x_max * graded_breaks(n_uniform)
    fn = _scalar_integrand(t, r, z, h, scale)
    try:
        integral, err = integrate_panels(fn, breaks, q)
    except QuadratureNoConvergence as exc:
        raise QuadratureNoConvergence(f"p_integral(t={t}, r={r}, z={z}): {exc}",
                                      value=exc.value, err_estimate=exc.err_estimate) from exc
    log_pref = -t - 2.0 * math.log(4.0 * math.pi * t) + scale
    log.debug("p_integral t=%g r=%g z=%g h=%.6g X=%.4g panels=%d", t, r, z, h, x_max, len(breaks) - 1)
    lv = log_pref + math.log(integral) if integral > 0.0 else float("-inf")
    return math.exp(log_pref) * integral, math.exp(log_pref) * err, lv


def p_integral(t: float, r: float, z: float, q: QuadSpec | None = None,
               convention: Convention = STANDARD, contour: Literal["saddle", "real"] = "saddle") -> KernelValue:
    """p_t(r, z) from the integral representation, adaptive quadrature.

    Tolerances apply to the integral normalized by exp(Re E) at the saddle, so
    they act as relative tolerances on the kernel value; log_value stays
    accurate where value underflows.
    """
    _check_trz(t, r, z)
    q = q or QuadSpec()
    value = err = 0.0
    logs = []
    for k in convention.images(t):
        v, e, lv = _single_integral(t, r, z + 2.0 * math.pi * k, q, contour)
        value += v
        err += e
        logs.append(lv)
    log_value = math.log(convention.scale) + float(special.logsumexp(logs))
    method = "axis" if r < AXIS_DELEGATE_R else "integral"
    return KernelValue(convention.scale * value, convention.scale * err, t, r, z, log_value, method)


# ── Vectorized fixed-order path ───────────────────────────────────────────────

_JET_KEYS = ("value", "r", "z", "rr", "zz", "rz", "t")


def _line_integrals(t, r, z, h, scale, x_max, n_uniform: int, order: int, jets: bool) -> dict[str, np.ndarray]:
    """Composite Gauss-Legendre integrals of Re[G e^-scale] and its parameter derivatives.

    All arguments except the rule parameters are 1-D arrays over points; t may
    vary per point. Returns integrals over x in [0, x_max].
    """
    s, ws = composite_rule(graded_breaks(n_uniform), order)
    x = x_max[:, None] * s[None, :]
    w = x_max[:, None] * ws[None, :]
    tt, rr, zz, hh = (v[:, None] for v in (t, r, z, h))
    a, b, e = _exponent(x, tt, rr, zz, hh)
    g = sinh_ratio(a) * np.exp(e - scale[:, None])
    out = {"value": np.sum((g.real) * w, axis=1)}
    if not jets:
        return out

    y = x + 1j * hh
    with np.errstate(divide="ignore", invalid="ignore"):
        sinh_a = np.sinh(a)
        a_r = np.sinh(rr) * np.cosh(y) / sinh_a
        a_rr = np.cosh(rr) * np.cosh(y) * (1.0 - a_r**2) / sinh_a
    d1, d2 = log_sinh_ratio_derivatives(a)
    phi1 = d1 - a / (2.0 * tt)
    phi2 = d2 - 1.0 / (2.0 * tt)
    zeta = -1j * b / (2.0 * tt)
    g_r = phi1 * a_r
    factors = {
        "r": g_r,
        "z": zeta,
        "rr": g_r**2 + phi2 * a_r**2 + phi1 * a_rr,
        "zz": zeta**2 - 1.0 / (2.0 * tt),
        "rz": g_r * zeta,
        "t": (a * a - b * b) / (4.0 * tt * tt),
    }
    for key, fac in factors.items():
        out[key] = np.sum(np.nan_to_num((g * fac).real) * w, axis=1)
    return out


def _assemble(t, scale, integrals: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    pref = np.exp(-t - 2.0 * np.log(4.0 * math.pi * t) + scale)
    out = {k: pref * v for k, v in integrals.items() if k != "t"}
    if "t" in integrals:
        out["t"] = pref * (integrals["t"] + (-1.0 - 2.0 / t) * integrals["value"])
    return out


def _contour_setup(t: float, r: np.ndarray, z: np.ndarray, max_halfwidth=None):
    h = _contour_height(r, z)
    scale = _log_scale(t, r, z, h)
    x_max = _truncation(np.full(r.shape, t), r, z, h, scale, max_halfwidth)
    return h, scale, x_max


def _evaluate(t: float, r: np.ndarray, z: np.ndarray, jets: bool) -> tuple[dict, dict]:
    """Vectorized single-image evaluation; returns (values, error estimates)."""
    h, scale, x_max = _contour_setup(t, r, z)
    panels = _panel_count(t, z, h, x_max)
    keys = _JET_KEYS if jets else ("value",)
    vals = {k: np.empty(r.size) for k in keys}
    errs = {k: np.empty(r.size) for k in keys}
    for n in np.unique(panels):
        idx = np.flatnonzero(panels == n)
        nodes = (9 + n) * GL_ORDER
        step = max(1, _CHUNK_ELEMENTS // nodes)
        for start in range(0, idx.size, step):
            sel = idx[start:start + step]
            args = (np.full(sel.size, t), r[sel], z[sel], h[sel], scale[sel], x_max[sel], int(n))
            hi = _assemble(t, scale[sel], _line_integrals(*args, GL_ORDER, jets))
            lo = _assemble(t, scale[sel], _line_integrals(*args, GL_ORDER_LOW, jets))
            for k in keys:
                vals[k][sel] = hi[k]
                errs[k][sel] = np.abs(hi[k] - lo[k])
    return vals, errs


def _evaluate_images(t: float, r: np.ndarray, z: np.ndarray, convention: Convention, jets: bool):
    keys = _JET_KEYS if jets else ("value",)
    vals = {k: np.zeros(r.size) for k in keys}
    errs = {k: np.zeros(r.size) for k in keys}
    for k in convention.images(t):
        zk = z + 2.0 * math.pi * k
        on_axis = r < AXIS_DELEGATE_R
        if on_axis.any():
            vals["value"][on_axis] += np.exp(_axis_log(t, zk[on_axis]))
            for key in keys[1:]:
                vals[key][on_axis] = np.nan
        off = ~on_axis
        if off.any():
            v, e = _evaluate(t, r[off], zk[off], jets)
            for key in keys:
                vals[key][off] += v[key]
                errs[key][off] += e[key]
    for key in keys:
        vals[key] *= convention.scale
        errs[key] *= convention.scale
    return vals, errs


def kernel_grid(t: float, r, z, convention: Convention = STANDARD) -> tuple[np.ndarray, np.ndarray]:
    """p_t at many points by the fixed-order rule: (values, error estimates)."""
    _check_trz(t, r, z)
    r, z = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(z, dtype=float))
    shape = r.shape
    vals, errs = _evaluate_images(t, r.ravel(), z.ravel(), convention, jets=False)
    return vals["value"].reshape(shape), errs["value"].reshape(shape)


def kernel_jet_grid(t: float, r, z, convention: Convention = STANDARD,
                    method: Literal["analytic", "finite_difference"] = "analytic") -> KernelJet:
    """p_t and its partials in r, z, t at points off the axis.

    "analytic" differentiates under the integral sign; "finite_difference"
    applies Richardson-extrapolated central differences to the fixed-order rule
    on a contour shared by the whole stencil.
    """
    _check_trz(t, r, z)
    r, z = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(z, dtype=float))
    shape = r.shape
    r, z = r.ravel(), z.ravel()
    if np.any(r < AXIS_DELEGATE_R):
        raise DomainError(f"kernel jets need r >= {AXIS_DELEGATE_R}")
    if method == "analytic":
        vals, errs = _evaluate_images(t, r, z, convention, jets=True)
    elif method == "finite_difference":
        vals, errs = _fd_jets(t, r, z, convention)
    else:
        raise DomainError(f"unknown jet method {method!r}")
    names = dict(zip(_JET_KEYS, ("value", "d_r", "d_z", "d_rr", "d_zz", "d_rz", "d_t")))
    return KernelJet(
        **{names[k]: vals[k].reshape(shape) for k in _JET_KEYS},
        err={names[k]: errs[k].reshape(shape) for k in _JET_KEYS},
    )


def _stencil_values(t: float, r: np.ndarray, z: np.ndarray, tt: np.ndarray, rr: np.ndarray,
                    zz: np.ndarray, convention: Convention) -> np.ndarray:
    """Kernel at stencil points (tt, rr, zz), shape (n, m), on the contours of the centres (t, r, z)."""
    total = np.zeros(rr.shape)
    for k in convention.images(t):
        shift = 2.0 * math.pi * k
        h, scale, x_max = _contour_setup(t, r, z + shift)
        # room for the stencil's slightly slower decay
        x_max = 1.25 * x_max
        panels = _panel_count(t, z + shift, h, x_max)
        m = rr.shape[1]
        for n in np.unique(panels):
            sel = np.flatnonzero(panels == n)
            rep = lambda v: np.repeat(v[sel], m)
            integ = _line_integrals(
                tt[sel].ravel(), rr[sel].ravel(), zz[sel].ravel() + shift,
                rep(h), rep(scale), rep(x_max), int(n), GL_ORDER, jets=False,
            )
            total[sel] += _assemble(tt[sel].ravel(), rep(scale), integ)["value"].reshape(sel.size, m)
    return convention.scale * total


def _fd_jets(t: float, r: np.ndarray, z: np.ndarray, convention: Convention):
    hr = np.minimum(KERNEL_FD_STEP, r / 4.0)
    hz = np.full(r.shape, KERNEL_FD_STEP)
    ht = np.full(r.shape, KERNEL_FD_STEP * t)
    # offsets (dt, dr, dz) in units of the steps, at full and half step
    offsets = [(0, 0, 0)]
    for s in (1.0, 0.5):
        offsets += [(s, 0, 0), (-s, 0, 0), (0, s, 0), (0, -s, 0), (0, 0, s), (0, 0, -s),
                    (0, s, s), (0, s, -s), (0, -s, s), (0, -s, -s)]
    off = np.array(offsets, dtype=float)
    tt = t + off[None, :, 0] * ht[:, None]
    rr = r[:, None] + off[None, :, 1] * hr[:, None]
    zz = z[:, None] + off[None, :, 2] * hz[:, None]
    f = _stencil_values(t, r, z, tt, rr, zz, convention)
    f0 = f[:, 0]

    def at(s, i):
        return f[:, 1 + (0 if s == 1.0 else 10) + i]

    est = {}
    for s in (1.0, 0.5):
        est[s] = {
            "t": (at(s, 0) - at(s, 1)) / (2.0 * s * ht),
            "r": (at(s, 2) - at(s, 3)) / (2.0 * s * hr),
            "z": (at(s, 4) - at(s, 5)) / (2.0 * s * hz),
            "rr": (at(s, 2) - 2.0 * f0 + at(s, 3)) / (s * hr) ** 2,
            "zz": (at(s, 4) - 2.0 * f0 + at(s, 5)) / (s * hz) ** 2,
            "rz": (at(s, 6) - at(s, 7) - at(s, 8) + at(s, 9)) / (4.0 * s * s * hr * hz),
        }
    vals = {"value": f0}
    errs = {"value": np.zeros_like(f0)}
    for key in est[1.0]:
        coarse, fine = est[1.0][key], est[0.5][key]
        vals[key] = (4.0 * fine - coarse) / 3.0
        errs[key] = np.abs(fine - coarse) / 3.0
    return vals, errs


def kernel_radial_function(t: float, convention: Convention = STANDARD, log_of: bool = False) -> RadialFunction:
    """p_t (or ln p_t) as a RadialFunction backed by analytic jets."""

    def jet(r, z):
        j = kernel_jet_grid(t, r, z, convention)
        return j.log_partials() if log_of else j.partials()

    def value(r, z):
        v, _ = kernel_grid(t, r, z, convention)
        return np.log(v) if log_of else v

    return RadialFunction(value, jet=jet, name=f"{'ln ' if log_of else ''}p_{t:g}")


def heat_residual(t: float, r, z, convention: Convention = STANDARD,
                  method: Literal["analytic", "finite_difference"] = "finite_difference") -> np.ndarray:
    """|d_t p - L p| / |d_t p| at off-axis points."""
    j = kernel_jet_grid(t, r, z, convention, method)
    r = np.asarray(r, dtype=float)
    lp = j.d_rr + 2.0 * j.d_r / np.tanh(2.0 * r) + np.tanh(r) ** 2 * j.d_zz
    return np.abs(j.d_t - lp) / np.abs(j.d_t)


# ── Integrals against mu ──────────────────────────────────────────────────────

def support_box(t: float, level: float = SUPPORT_LEVEL) -> tuple[float, float]:
    """(r_max, z_max) of a box containing {d^2 / 4t - r + t <= level}, padded.

    The mass density behaves like exp(r - d^2 / 4t), which peaks near r = 2t,
    so the box grows linearly in t.
    """
    reach = min(SUPPORT_R_MAX, 2.0 * t + 2.0 * math.sqrt(level * t))
    r = np.linspace(0.0, reach, 241)
    z = np.linspace(0.0, math.pi, 121)
    rr, zz = np.meshgrid(r, z, indexing="ij")
    inside = distance_squared_array(rr, zz) / (4.0 * t) - rr + t <= level
    r_max = min(SUPPORT_R_MAX, SUPPORT_PAD * (rr[inside].max() + r[1]))
    z_max = min(math.pi, SUPPORT_PAD * (zz[inside].max() + z[1]))
    return float(r_max), float(z_max)


def integrate_mu(fn: Callable, t: float, box: tuple[float, float] | None = None) -> float:
    """2 pi int int fn(r, z) sinh(2r)/2 dr dz over the support box of p_t; fn even in z."""
    r_max, z_max = box or support_box(t)
    r, z, w = mu_rule(t, r_max, z_max)
    return float(np.sum(w * fn(r, z)))


def total_mass(t: float, convention: Convention = PROBABILITY, box=None) -> float:
    """int p_t dmu over the chart."""
    return integrate_mu(lambda r, z: kernel_grid(t, r, z, convention)[0], t, box)


def l2_mass(t: float, convention: Convention = PROBABILITY, box=None) -> float:
    """int p_t^2 dmu; equals p_2t(0, 0) for the probability convention."""
    return integrate_mu(lambda r, z: kernel_grid(t, r, z, convention)[0] ** 2, t, box)


def delta2_expectation(t: float, f: Callable, support: tuple[float, float], q: QuadSpec | None = None) -> float:
    """1/2 int int_{r, y > 0} s_t(cosh r cosh y) f(r, y) sinh(2r) dr dy.

    f must vanish (or be negligible) outside [0, support[0]] x [0, support[1]].
    As t -> 0 this tends to HYPERBOLIC_MASS * f(0, 0).
    """
    q = q or QuadSpec()
    if not t > 0.0:
        raise DomainError(f"t must be positive, got {t!r}")
    if not (support[0] > 0.0 and support[1] > 0.0):
        raise DomainError(f"support must be positive, got {support!r}")
    # s_t is below exp(-SUPPORT_LEVEL) beyond hyperbolic distance sqrt(4 t SUPPORT_LEVEL)
    reach = SUPPORT_PAD * math.sqrt(4.0 * t * SUPPORT_LEVEL)
    r_max, y_max = min(support[0], reach), min(support[1], reach)

    def rule(width):
        r, y, w = rectangle_rule(0.0, r_max, 0.0, y_max, width)
        # cosh(rho) - 1 without cancellation near the origin
        excess = 2.0 * np.sinh(0.5 * r) ** 2 * np.cosh(y) + 2.0 * np.sinh(0.5 * y) ** 2
        rho = 2.0 * np.arcsinh(np.sqrt(0.5 * excess))
        return float(np.sum(w * s_kernel(t, rho) * f(r, y) * 0.5 * np.sinh(2.0 * r)))

    width = min(0.25 * math.sqrt(t), 0.25)
    coarse, fine = rule(2.0 * width), rule(width)
    err = abs(fine - coarse)
    if err > max(q.abs_tol, q.rel_tol * abs(fine)):
        raise QuadratureNoConvergence(f"delta2_expectation(t={t}): refinement changed the result by {err:.3g}",
                                      value=fine, err_estimate=err)
    return fine


def hyperbolic_mass_check(t: float) -> float:
    """int_1^inf s_t(u) (u^2 - 1)^(1/2) du, which equals HYPERBOLIC_MASS."""
    # s_t(cosh rho) sinh^2 rho ~ exp(rho - rho^2 / 4t) is negligible beyond rho_max
    rho_max = 2.0 * t + 2.0 * math.sqrt(4.0 * t * SUPPORT_LEVEL)
    val, _ = integrate.quad(lambda rho: s_kernel(t, rho) * math.sinh(rho) ** 2, 0.0, rho_max, limit=200)
    return val
