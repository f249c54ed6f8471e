"""Special functions shared by the kernel, distance and asymptotic modules.

arch_ratio(x) = arccosh(x) / sqrt(x^2 - 1) is analytic on C minus (-inf, -1];
on (-1, 1) it equals arccos(x) / sqrt(1 - x^2). The complex helpers below work
with A = arccosh(w) only through functions even in A, so any branch of
arccosh gives the same result.
"""

import numpy as np

from heatkernel.constants import ARCH_SERIES_RADIUS, SINH_RATIO_SERIES
from heatkernel.errors import DomainError

# Switch to Taylor series for 1/A - coth A and 1/sinh^2 A - 1/A^2 below this |A|.
_COTH_SERIES_RADIUS = 0.1


def arch_ratio(x):
    """arccosh(x) / sqrt(x^2 - 1), continued to x in (-1, 1); 1 at x = 1."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(~(x_arr > -1.0)):
        raise DomainError(f"arch_ratio needs x > -1, got {x!r}")
    out = _arch_ratio(x_arr)
    return float(out) if np.ndim(x) == 0 else out


def _arch_ratio(x: np.ndarray) -> np.ndarray:
    """arch_ratio without the domain check; +inf at x <= -1."""
    x = np.asarray(x, dtype=float)
    e = x - 1.0
    near = np.abs(e) < ARCH_SERIES_RADIUS
    above = (x > 1.0) & ~near
    below = (x > -1.0) & (x < 1.0) & ~near
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(near, 1.0 - e / 3.0 + 2.0 * e**2 / 15.0, np.inf)
        out = np.where(above, np.arccosh(np.where(above, x, 2.0)) / np.sqrt(np.where(above, e * (x + 1.0), 3.0)), out)
        out = np.where(below, np.arccos(np.where(below, x, 0.0)) / np.sqrt(np.where(below, -e * (x + 1.0), 1.0)), out)
    return out


def _arch_ratio_slope(x: np.ndarray) -> np.ndarray:
    """d/dx arch_ratio(x) = (1 - x arch_ratio(x)) / (x^2 - 1)."""
    x = np.asarray(x, dtype=float)
    e = x - 1.0
    near = np.abs(e) < ARCH_SERIES_RADIUS
    with np.errstate(divide="ignore", invalid="ignore"):
        general = (1.0 - x * _arch_ratio(x)) / (e * (x + 1.0))
    return np.where(near, -1.0 / 3.0 + 4.0 * e / 15.0, general)


def _signed_arccosh_sq(x: np.ndarray) -> np.ndarray:
    """arccosh(x)^2 continued analytically: -arccos(x)^2 on (-1, 1)."""
    x = np.asarray(x, dtype=float)
    return np.where(
        x >= 1.0,
        np.arccosh(np.maximum(x, 1.0)) ** 2,
        -np.arccos(np.clip(x, -1.0, 1.0)) ** 2,
    )


# ── Complex helpers along the integration contour ─────────────────────────────

def sinh_ratio(a: np.ndarray) -> np.ndarray:
    """A / sinh(A) for complex A."""
    a = np.asarray(a, dtype=complex)
    small = np.abs(a) < SINH_RATIO_SERIES
    with np.errstate(divide="ignore", invalid="ignore"):
        general = a / np.sinh(a)
    return np.where(small, 1.0 - a**2 / 6.0, general)


def log_sinh_ratio_derivatives(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """First and second derivatives of ln(A / sinh A):
    1/A - coth(A) and 1/sinh(A)^2 - 1/A^2.
    """
    a = np.asarray(a, dtype=complex)
    small = np.abs(a) < _COTH_SERIES_RADIUS
    a2 = a * a
    first_series = a * (-1.0 / 3.0 + a2 * (1.0 / 45.0 + a2 * (-2.0 / 945.0 + a2 / 4725.0)))
    second_series = -1.0 / 3.0 + a2 * (1.0 / 15.0 + a2 * (-2.0 / 189.0 + a2 * 7.0 / 4725.0))
    safe = np.where(small, 1.0, a)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        first = 1.0 / safe - 1.0 / np.tanh(safe)
        second = 1.0 / np.sinh(safe) ** 2 - 1.0 / safe**2
    return np.where(small, first_series, first), np.where(small, second_series, second)
