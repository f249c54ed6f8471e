"""
SL(2,R) in cylindric coordinates.

Matrices, the (r, theta, z) chart, the horizontal vector fields X, Y and the
vertical field Z, the Haar measure, and the carre du champ forms Gamma and
Gamma_2 restricted to radial functions.

Coordinates:
    g = exp(r cos(theta) X + r sin(theta) Y) exp(z Z),
    X = [[1, 0], [0, -1]],  Y = [[0, 1], [1, 0]],  Z = [[0, 1], [-1, 0]],
    [X, Y] = 2Z,  [X, Z] = 2Y,  [Y, Z] = -2X,
    for the matrices and for the left-invariant fields they generate.
"""

from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
import math
from typing import NamedTuple

import numpy as np

from heatkernel.constants import (
    AXIS_CUTOFF, CHART_TOL, DET_TOL, FD_STEP, FD_STEP_2, Z_CHART_SLACK,
)
from heatkernel.errors import DomainError, NonCylindric, SingularAtAxis

TWO_PI = 2.0 * math.pi


# ── Group elements and the chart ──────────────────────────────────────────────

@dataclass(frozen=True)
class GroupElement:
    """A 2x2 real matrix of determinant one."""

    a11: float
    a12: float
    a21: float
    a22: float

    def __post_init__(self):
        if not all(math.isfinite(a) for a in (self.a11, self.a12, self.a21, self.a22)):
            raise DomainError(f"non-finite matrix entries: {self}")
        if abs(self.det - 1.0) > DET_TOL:
            raise DomainError(f"det = {self.det!r} is not 1 within {DET_TOL}")

    @classmethod
    def from_matrix(cls, m, renormalize: bool = False) -> "GroupElement":
        m = np.asarray(m, dtype=float)
        if m.shape != (2, 2):
            raise DomainError(f"expected a 2x2 matrix, got shape {m.shape}")
        if renormalize:
            det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
            if not det > 0.0:
                raise DomainError(f"cannot renormalize a matrix with det = {det!r}")
            m = m / math.sqrt(det)
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]))

    @classmethod
    def identity(cls) -> "GroupElement":
        return cls(1.0, 0.0, 0.0, 1.0)

    @property
    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a21

    def to_array(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a21, self.a22]])

    def inverse(self) -> "GroupElement":
        return GroupElement(self.a22, -self.a12, -self.a21, self.a11)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement.from_matrix(self.to_array() @ other.to_array(), renormalize=True)


@dataclass(frozen=True)
class CylCoord:
    """Cylindric coordinates; theta is reduced to [0, 2pi)."""

    r: float
    theta: float
    z: float

    def __post_init__(self):
        if not (self.r >= 0.0 and math.isfinite(self.r)):
            raise DomainError(f"r must be finite and >= 0, got {self.r!r}")
        if not abs(self.z) <= math.pi + Z_CHART_SLACK:
            raise DomainError(f"z must lie in [-pi, pi], got {self.z!r}")
        object.__setattr__(self, "z", max(-math.pi, min(math.pi, self.z)))
        object.__setattr__(self, "theta", math.fmod(self.theta, TWO_PI) % TWO_PI)


def cyl_to_matrix(c: CylCoord) -> GroupElement:
    """exp(r cos(theta) X + r sin(theta) Y) exp(z Z)."""
    ch, sh = math.cosh(c.r), math.sinh(c.r)
    phi = c.theta + c.z
    return GroupElement(
        ch * math.cos(c.z) + sh * math.cos(phi),
        ch * math.sin(c.z) + sh * math.sin(phi),
        -ch * math.sin(c.z) + sh * math.sin(phi),
        ch * math.cos(c.z) - sh * math.cos(phi),
    )


def matrix_to_cyl(g: GroupElement) -> CylCoord:
    """Inverse of cyl_to_matrix on the chart; theta = 0 on the axis."""
    r, theta, z = matrices_to_cyl(g.to_array()[np.newaxis])
    return CylCoord(float(r[0]), float(theta[0]), float(z[0]))


def matrices_to_cyl(g: np.ndarray, strict: bool = True) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized matrix_to_cyl over an (n, 2, 2) stack.

    With strict=False, elements outside the chart are returned as NaN instead
    of raising NonCylindric.
    """
    g = np.asarray(g, dtype=float)
    trace = g[..., 0, 0] + g[..., 1, 1]
    skew = g[..., 0, 1] - g[..., 1, 0]
    diff = g[..., 0, 0] - g[..., 1, 1]
    sym = g[..., 0, 1] + g[..., 1, 0]

    outside = trace**2 + skew**2 < 4.0 - CHART_TOL
    if strict and np.any(outside):
        raise NonCylindric(f"{int(outside.sum())} element(s) have (a11+a22)^2 + (a12-a21)^2 < 4")

    # sinh r is read off the symmetric part; it stays accurate near the axis
    r = np.arcsinh(0.5 * np.hypot(diff, sym))
    z = np.arctan2(skew, trace)
    theta = np.where(r > 0.0, np.mod(np.arctan2(sym, diff) - z, TWO_PI), 0.0)
    theta = np.where(theta >= TWO_PI, 0.0, theta)
    if not strict:
        r, theta, z = (np.where(outside, np.nan, a) for a in (r, theta, z))
    return r, theta, z


def mu_density(r):
    """Haar measure density sinh(2r)/2 in dr dtheta dz."""
    return 0.5 * np.sinh(2.0 * np.asarray(r, dtype=float))


# ── Radial functions ──────────────────────────────────────────────────────────

class Partials(NamedTuple):
    """Value and partial derivatives of a radial function at (r, z)."""

    f: float
    r: float
    z: float
    rr: float
    zz: float
    rz: float


_PARTIAL_NAMES = ("r", "z", "rr", "zz", "rz")


@dataclass(frozen=True)
class RadialFunction:
    """A function of (r, z) with first and second partials.

    Derivatives come from, in order of preference: a `jet` callable returning
    every partial at once, a mapping of analytic partials, or central finite
    differences of `value`.
    """

    value: Callable
    derivatives: Mapping[str, Callable] | None = None
    jet: Callable | None = None
    name: str = field(default="f", compare=False)

    def __post_init__(self):
        if self.derivatives is not None:
            missing = set(_PARTIAL_NAMES) - set(self.derivatives)
            if missing:
                raise DomainError(f"analytic derivatives missing: {sorted(missing)}")

    @property
    def analytic(self) -> bool:
        return self.jet is not None or self.derivatives is not None

    def __call__(self, r, z):
        return self.value(r, z)

    def partials(self, r, z) -> Partials:
        if self.jet is not None:
            return Partials(*self.jet(r, z))
        if self.derivatives is not None:
            d = self.derivatives
            return Partials(self.value(r, z), *(d[k](r, z) for k in _PARTIAL_NAMES))
        return self.fd_partials(r, z)

    def fd_partials(self, r, z) -> Partials:
        """Central finite differences of the value."""
        f = self.value
        h1, k1 = _step(r, FD_STEP), _step(z, FD_STEP)
        h2, k2 = _step(r, FD_STEP_2), _step(z, FD_STEP_2)
        f0 = f(r, z)
        return Partials(
            f0,
            (f(r + h1, z) - f(r - h1, z)) / (2.0 * h1),
            (f(r, z + k1) - f(r, z - k1)) / (2.0 * k1),
            (f(r + h2, z) - 2.0 * f0 + f(r - h2, z)) / h2**2,
            (f(r, z + k2) - 2.0 * f0 + f(r, z - k2)) / k2**2,
            (f(r + h2, z + k2) - f(r + h2, z - k2) - f(r - h2, z + k2) + f(r - h2, z - k2))
            / (4.0 * h2 * k2),
        )

    @classmethod
    def polynomial(cls, coeffs) -> "RadialFunction":
        """sum_ij coeffs[i, j] r^i z^j with exact derivatives."""
        c = np.asarray(coeffs, dtype=float)
        c_r = np.polynomial.polynomial.polyder(c, axis=0)
        c_z = np.polynomial.polynomial.polyder(c, axis=1)
        tables = {
            "r": c_r,
            "z": c_z,
            "rr": np.polynomial.polynomial.polyder(c_r, axis=0),
            "zz": np.polynomial.polynomial.polyder(c_z, axis=1),
            "rz": np.polynomial.polynomial.polyder(c_r, axis=1),
        }

        def poly(table):
            return lambda r, z: np.polynomial.polynomial.polyval2d(r, z, table)

        return cls(poly(c), {k: poly(v) for k, v in tables.items()}, name="polynomial")


def _step(x, base: float):
    return np.maximum(base, base * np.abs(x))


def _require_off_axis(r, what: str):
    if np.any(np.asarray(r) < AXIS_CUTOFF):
        raise SingularAtAxis(f"{what} is singular at r < {AXIS_CUTOFF}, got r = {r!r}")


# ── Vector fields ─────────────────────────────────────────────────────────────

def _as_three_var(f) -> Callable:
    if isinstance(f, RadialFunction):
        return lambda r, theta, z: f.value(r, z)
    return f


def _coordinate_gradient(f: Callable, r: float, theta: float, z: float) -> tuple[float, float, float]:
    hr, ht, hz = _step(r, FD_STEP), _step(theta, FD_STEP), _step(z, FD_STEP)
    return (
        (f(r + hr, theta, z) - f(r - hr, theta, z)) / (2.0 * hr),
        (f(r, theta + ht, z) - f(r, theta - ht, z)) / (2.0 * ht),
        (f(r, theta, z + hz) - f(r, theta, z - hz)) / (2.0 * hz),
    )


def frame_coefficients(r, theta, z) -> np.ndarray:
    """Coefficients of X, Y, Z (rows) on d/dr, d/dtheta, d/dz (columns)."""
    phi = theta + 2.0 * z
    t = np.tanh(r)
    k = 1.0 / t - t
    c, s = np.cos(phi), np.sin(phi)
    return np.array([
        [c, -s * k, -s * t],
        [s, c * k, c * t],
        [0.0, 0.0, 1.0],
    ])


def apply_vector_fields(f, c: CylCoord) -> tuple[float, float, float]:
    """(Xf, Yf, Zf) at c, for a RadialFunction or a callable f(r, theta, z)."""
    _require_off_axis(c.r, "apply_vector_fields")
    if isinstance(f, RadialFunction):
        p = f.partials(c.r, c.z)
        grad = (p.r, 0.0, p.z)
    else:
        grad = _coordinate_gradient(f, c.r, c.theta, c.z)
    xf, yf, zf = frame_coefficients(c.r, c.theta, c.z) @ np.asarray(grad, dtype=float)
    return float(xf), float(yf), float(zf)


def vector_field(f, which: str) -> Callable:
    """The function Vf for V in {"X", "Y", "Z"}, as a callable (r, theta, z)."""
    index = "XYZ".index(which)
    g = _as_three_var(f)

    def vf(r, theta, z):
        grad = _coordinate_gradient(g, r, theta, z)
        return float(frame_coefficients(r, theta, z)[index] @ np.asarray(grad))

    return vf


# ── Carre du champ on radial functions ────────────────────────────────────────

def gamma_radial(f: RadialFunction, r, z):
    """Gamma(f, f) = (df/dr)^2 + tanh^2(r) (df/dz)^2."""
    if np.any(np.asarray(r) < 0.0):
        raise DomainError(f"r must be >= 0, got {r!r}")
    p = f.partials(r, z)
    return p.r**2 + np.tanh(r) ** 2 * p.z**2


def gamma2_radial(f: RadialFunction, r, z):
    """Gamma_2(f, f) for radial f as a sum of three squares.

    Below the axis cutoff 2 f_r / sinh(2r) is replaced by its limit f_rr,
    which requires f_r to vanish linearly at the axis.
    """
    p = f.partials(r, z)
    t = np.tanh(r)
    if r < AXIS_CUTOFF:
        if abs(p.r) > 10.0 * AXIS_CUTOFF * max(1.0, abs(p.rr)):
            raise SingularAtAxis(f"df/dr = {p.r!r} does not vanish at the axis (r = {r!r})")
        drift = p.rr
    else:
        drift = 2.0 * p.r / np.sinh(2.0 * r)
    return p.rr**2 + (drift - t**2 * p.zz) ** 2 + 2.0 * (p.z / np.cosh(r) ** 2 + t * p.rz) ** 2


def sublaplacian_radial(f: RadialFunction, r, z):
    """L f = f_rr + 2 coth(2r) f_r + tanh^2(r) f_zz for radial f."""
    _require_off_axis(r, "sublaplacian_radial")
    p = f.partials(r, z)
    return p.rr + 2.0 * p.r / np.tanh(2.0 * r) + np.tanh(r) ** 2 * p.zz


def casimir_radial(f: RadialFunction, r, z):
    """Casimir X^2 + Y^2 - Z^2 on radial f: f_rr + 2 coth(2r) f_r + (tanh^2(r) - 1) f_zz; L = C + Z^2."""
    _require_off_axis(r, "casimir_radial")
    p = f.partials(r, z)
    return p.rr + 2.0 * p.r / np.tanh(2.0 * r) + (np.tanh(r) ** 2 - 1.0) * p.zz


# ── General Gamma_2 through the Lie brackets (test helper) ────────────────────

def _frame_gradients(r, theta, z) -> np.ndarray:
    """d(coefficient[v, j]) / d(coordinate i), shape (3 fields, 3 coords j, 3 coords i)."""
    phi = theta + 2.0 * z
    t = math.tanh(r)
    k = 1.0 / t - t
    dt = 1.0 / math.cosh(r) ** 2
    dk = -4.0 * math.cosh(2.0 * r) / math.sinh(2.0 * r) ** 2
    c, s = math.cos(phi), math.sin(phi)
    out = np.zeros((3, 3, 3))
    # X: (c, -s k, -s t)
    out[0, 0] = (0.0, -s, -2.0 * s)
    out[0, 1] = (-s * dk, -c * k, -2.0 * c * k)
    out[0, 2] = (-s * dt, -c * t, -2.0 * c * t)
    # Y: (s, c k, c t)
    out[1, 0] = (0.0, c, 2.0 * c)
    out[1, 1] = (c * dk, -s * k, -2.0 * s * k)
    out[1, 2] = (c * dt, -s * t, -2.0 * s * t)
    return out


def _gamma2_general(grad, hess, r: float, theta: float, z: float) -> float:
    """Gamma_2 from the coordinate gradient and Hessian of f at a point.

    (X^2 f)^2 + (Y^2 f)^2 + ((XY + YX) f)^2 / 2 + 2 (Zf)^2
        - 4 Gamma(f) - 4 (Xf)(YZf) + 4 (Yf)(XZf)
    """
    if r < AXIS_CUTOFF:
        raise SingularAtAxis(f"general Gamma_2 needs r >= {AXIS_CUTOFF}, got {r!r}")
    grad = np.asarray(grad, dtype=float)
    hess = np.asarray(hess, dtype=float)
    a = frame_coefficients(r, theta, z)
    da = _frame_gradients(r, theta, z)

    def vw(v: int, w: int) -> float:
        # V(W f) = sum_i v_i d_i (sum_j w_j f_j)
        return float(a[v] @ (da[w].T @ grad) + a[v] @ hess @ a[w])

    xf, yf, zf = a @ grad
    xx, yy = vw(0, 0), vw(1, 1)
    sym = vw(0, 1) + vw(1, 0)
    return (
        xx**2 + yy**2 + 0.5 * sym**2 + 2.0 * zf**2
        - 4.0 * (xf**2 + yf**2) - 4.0 * xf * vw(1, 2) + 4.0 * yf * vw(0, 2)
    )
