"""
Monte Carlo oracle for p_t: Brownian motion on SL(2,R) with generator X^2 + Y^2.

Each path starts at the identity and moves by right multiplication,

    g_(k+1) = g_k E(A_k),    A_k = a X + b Y,    a, b ~ N(0, 2 dt),

where E is the matrix exponential (exponential-increment) or the Cayley map
(geometric-midpoint). Since A^2 = (a^2 + b^2) I both have closed forms. Paths
are simulated in blocks of MC_BLOCK_SIZE; block k draws from
SeedSequence(seed, spawn_key=(k,)), so the sample does not depend on the
number of worker threads.
"""

from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import logging
import math
from pathlib import Path
from typing import Literal

import numpy as np
import pandas as pd
from scipy import stats
from tqdm import tqdm

from heatkernel.constants import (
    MC_BLOCK_SIZE, MC_CONFIDENCE_Z, MC_DEFAULT_BINS, MC_MARGINAL_BINS, MC_MARGINAL_R_BINS, MC_MARGINAL_Z_BINS,
    MC_MIN_EXPECTED, MC_MIN_PATHS,
)
from heatkernel.errors import DomainError
from heatkernel.group import TWO_PI, matrices_to_cyl, mu_density
from heatkernel.kernel import PROBABILITY, kernel_grid, support_box
from heatkernel.quadrature import composite_rule

log = logging.getLogger(__name__)

Scheme = Literal["exponential-increment", "geometric-midpoint"]
SCHEMES = ("exponential-increment", "geometric-midpoint")

# Gauss-Legendre order per bin for the kernel's bin probabilities.
_BIN_ORDER = 4


@dataclass(frozen=True)
class MCConfig:
    seed: int = 0
    n_paths: int = 200_000
    n_steps: int = 400
    t_final: float = 0.5
    scheme: Scheme = "exponential-increment"
    workers: int = 1
    bins: tuple[int, int] = MC_DEFAULT_BINS

    def __post_init__(self):
        if self.n_paths < 1 or self.n_steps < 1:
            raise DomainError(f"n_paths and n_steps must be >= 1, got {self.n_paths}, {self.n_steps}")
        if not self.t_final > 0.0:
            raise DomainError(f"t_final must be positive, got {self.t_final!r}")
        if self.scheme not in SCHEMES:
            raise DomainError(f"unknown scheme {self.scheme!r}")
        if self.workers < 1:
            raise DomainError(f"workers must be >= 1, got {self.workers}")
        if not (0 <= self.seed < 2**64):
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if min(self.bins) < 1:
            raise DomainError(f"bins must be positive, got {self.bins}")

    @property
    def dt(self) -> float:
        return self.t_final / self.n_steps


@dataclass(frozen=True)
class PathSample:
    """Endpoints of the simulated paths, one row per path."""

    frame: pd.DataFrame
    max_det_error: float
    n_outside_chart: int
    config: MCConfig = field(repr=False)

    @property
    def fold_fraction(self) -> float:
        return float((self.frame["fold_count"] != 0).mean())


# ── Simulation ────────────────────────────────────────────────────────────────

def _exponential_increment(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """exp(a X + b Y) = cosh(rho) I + sinh(rho)/rho (a X + b Y), rho^2 = a^2 + b^2."""
    rho = np.hypot(a, b)
    c = np.cosh(rho)
    s = np.where(rho < 1e-8, 1.0 + rho**2 / 6.0, np.sinh(rho) / np.where(rho < 1e-8, 1.0, rho))
    return np.stack([np.stack([c + s * a, s * b], -1), np.stack([s * b, c - s * a], -1)], -2)


def _cayley_increment(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(I - A/2)^-1 (I + A/2) = ((1 + rho^2/4) I + A) / (1 - rho^2/4), for rho < 2."""
    q = 0.25 * (a * a + b * b)
    far = q >= 0.5
    if far.any():
        log.warning("%d Cayley increment(s) with rho >= sqrt(2) replaced by the exponential", int(far.sum()))
    d = np.where(far, 1.0, 1.0 - q)
    c = (1.0 + q) / d
    out = np.stack([np.stack([c + a / d, b / d], -1), np.stack([b / d, c - a / d], -1)], -2)
    if far.any():
        out[far] = _exponential_increment(a[far], b[far])
    return out


_INCREMENTS: dict[str, Callable] = {
    "exponential-increment": _exponential_increment,
    "geometric-midpoint": _cayley_increment,
}


class PathSimulator:
    """Simulate blocks of Brownian paths on SL(2,R)."""

    def __init__(self, cfg: MCConfig):
        self.cfg = cfg
        self._increment = _INCREMENTS[cfg.scheme]

    def block_sizes(self) -> list[int]:
        n, size = self.cfg.n_paths, MC_BLOCK_SIZE
        return [min(size, n - start) for start in range(0, n, size)]

    def simulate_block(self, block: int, m: int) -> tuple[np.ndarray, np.ndarray, float]:
        """(final matrices, unwrapped z, max |det - 1| before renormalization) for m paths."""
        rng = np.random.default_rng(np.random.SeedSequence(self.cfg.seed, spawn_key=(block,)))
        scale = math.sqrt(2.0 * self.cfg.dt)
        g = np.broadcast_to(np.eye(2), (m, 2, 2)).copy()
        z_prev = np.zeros(m)
        z_unwrapped = np.zeros(m)
        det_err = 0.0
        for _ in range(self.cfg.n_steps):
            xi = rng.standard_normal((2, m)) * scale
            g = g @ self._increment(xi[0], xi[1])
            det = g[:, 0, 0] * g[:, 1, 1] - g[:, 0, 1] * g[:, 1, 0]
            det_err = max(det_err, float(np.max(np.abs(det - 1.0))))
            g /= np.sqrt(det)[:, None, None]
            # z = arg(trace + i skew) is an angle on the group; follow it continuously
            z = np.arctan2(g[:, 0, 1] - g[:, 1, 0], g[:, 0, 0] + g[:, 1, 1])
            z_unwrapped += np.mod(z - z_prev + math.pi, TWO_PI) - math.pi
            z_prev = z
        return g, z_unwrapped, det_err

    def run(self, progress: bool = False) -> PathSample:
        sizes = self.block_sizes()
        blocks = list(enumerate(sizes))
        with ThreadPoolExecutor(max_workers=self.cfg.workers) as pool:
            results = list(tqdm(
                pool.map(lambda job: self.simulate_block(*job), blocks),
                total=len(blocks), desc="Simulating path blocks", disable=not progress,
            ))
        g = np.concatenate([res[0] for res in results])
        z_unwrapped = np.concatenate([res[1] for res in results])
        det_err = max(res[2] for res in results)
        r, theta, z = matrices_to_cyl(g, strict=False)
        outside = int(np.isnan(r).sum())
        if outside:
            log.warning("%d of %d paths left the cylindric chart", outside, len(r))
        fold = np.rint((z_unwrapped - z) / TWO_PI)
        frame = pd.DataFrame({
            "path_id": np.arange(len(r)),
            "r": r, "theta": theta, "z": z,
            "fold_count": np.nan_to_num(fold).astype(int),
        })
        return PathSample(frame, det_err, outside, self.cfg)


def simulate_paths(cfg: MCConfig, progress: bool = False) -> PathSample:
    """Endpoints (r, theta, z, fold_count) of cfg.n_paths paths at cfg.t_final."""
    sample = PathSimulator(cfg).run(progress)
    log.debug("simulated %d paths, %d steps, max det error %.3g",
              cfg.n_paths, cfg.n_steps, sample.max_det_error)
    return sample


def export_sample(sample: PathSample, path: str | Path) -> Path:
    """One record per path; parquet for a .parquet suffix, CSV otherwise."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix == ".parquet":
        sample.frame.to_parquet(path, index=False)
    else:
        sample.frame.to_csv(path, index=False, float_format="%.17g")
    return path


# ── Density estimate and comparison ───────────────────────────────────────────

@dataclass(frozen=True)
class DensityEstimate:
    """Histogram of (r, z) normalized against mu.

    density = counts / (n mu(bin)), half_width is the 95% normal-approximation
    half-width of density in each bin.
    """

    r_edges: np.ndarray
    z_edges: np.ndarray
    counts: np.ndarray
    n: int
    bin_measure: np.ndarray

    @property
    def density(self) -> np.ndarray:
        return self.counts / (self.n * self.bin_measure)

    @property
    def half_width(self) -> np.ndarray:
        phat = self.counts / self.n
        return MC_CONFIDENCE_Z * np.sqrt(phat * (1.0 - phat) / self.n) / self.bin_measure

    @property
    def total_mass(self) -> float:
        return float(self.counts.sum() / self.n)


def bin_measure(r_edges: np.ndarray, z_edges: np.ndarray) -> np.ndarray:
    """mu of each (r, z) bin: 2 pi dz (cosh 2r_hi - cosh 2r_lo) / 4."""
    dr = np.diff(np.cosh(2.0 * r_edges)) / 4.0
    return TWO_PI * np.outer(dr, np.diff(z_edges))


def estimate_density(sample: PathSample, bins: tuple[int, int] | None = None) -> DensityEstimate:
    frame = sample.frame.dropna(subset=["r", "z"])
    n_r, n_z = bins or sample.config.bins
    r_hi = float(np.quantile(frame["r"], 0.999)) if len(frame) > 1 else 1.0
    z_hi = min(math.pi, float(np.quantile(np.abs(frame["z"]), 0.999))) if len(frame) > 1 else math.pi
    r_edges = np.linspace(0.0, max(r_hi, 1e-6), n_r + 1)
    z_edges = np.linspace(-max(z_hi, 1e-6), max(z_hi, 1e-6), n_z + 1)
    counts, _, _ = np.histogram2d(frame["r"], frame["z"], bins=[r_edges, z_edges])
    return DensityEstimate(r_edges, z_edges, counts, len(sample.frame), bin_measure(r_edges, z_edges))


def kernel_bin_probabilities(t: float, r_edges: np.ndarray, z_edges: np.ndarray) -> np.ndarray:
    """int_bin p_t dmu for each (r, z) bin, probability normalization."""
    r, wr = composite_rule(r_edges, _BIN_ORDER)
    z, wz = composite_rule(z_edges, _BIN_ORDER)
    rr, zz = np.meshgrid(r, z, indexing="ij")
    p, _ = kernel_grid(t, rr, zz, PROBABILITY)
    weighted = p * np.outer(wr * mu_density(r), wz) * TWO_PI
    n_r, n_z = len(r_edges) - 1, len(z_edges) - 1
    return weighted.reshape(n_r, _BIN_ORDER, n_z, _BIN_ORDER).sum(axis=(1, 3))


@dataclass(frozen=True)
class DensityComparison:
    estimate: DensityEstimate
    expected: np.ndarray
    occupied: np.ndarray
    agree: np.ndarray
    symmetry_pvalue: float
    fold_fraction: float
    max_det_error: float
    insufficient: bool

    @property
    def agreement(self) -> float:
        n = int(self.occupied.sum())
        return float(self.agree[self.occupied].mean()) if n else float("nan")

    @property
    def occupied_bins(self) -> int:
        return int(self.occupied.sum())

    def to_frame(self) -> pd.DataFrame:
        est = self.estimate
        rc = 0.5 * (est.r_edges[1:] + est.r_edges[:-1])
        zc = 0.5 * (est.z_edges[1:] + est.z_edges[:-1])
        rr, zz = np.meshgrid(rc, zc, indexing="ij")
        return pd.DataFrame({
            "r": rr.ravel(), "z": zz.ravel(),
            "count": est.counts.ravel().astype(int),
            "expected_count": (est.n * self.expected).ravel(),
            "density": est.density.ravel(),
            "kernel_density": (self.expected / est.bin_measure).ravel(),
            "half_width": est.half_width.ravel(),
            "occupied": self.occupied.ravel(), "agree": self.agree.ravel(),
        })


def density_vs_kernel(cfg: MCConfig, sample: PathSample | None = None, progress: bool = False) -> DensityComparison:
    """Compare the histogram of a simulated sample with the kernel's bin probabilities.

    A bin is occupied when the kernel expects at least MC_MIN_EXPECTED paths in
    it; it agrees when the count lies within the 95% binomial band of n P.
    """
    sample = sample or simulate_paths(cfg, progress)
    est = estimate_density(sample, cfg.bins)
    expected = kernel_bin_probabilities(cfg.t_final, est.r_edges, est.z_edges)
    n = est.n
    mean = n * expected
    band = MC_CONFIDENCE_Z * np.sqrt(n * expected * np.clip(1.0 - expected, 0.0, 1.0))
    occupied = mean >= MC_MIN_EXPECTED
    agree = np.abs(est.counts - mean) <= band
    z = sample.frame["z"].dropna().to_numpy()
    symmetry = float(stats.ks_2samp(z, -z).pvalue) if z.size > 1 else float("nan")
    insufficient = n < MC_MIN_PATHS
    if insufficient:
        log.warning("density comparison with %d paths; at least %d are needed for meaningful bands",
                    n, MC_MIN_PATHS)
    return DensityComparison(est, expected, occupied, agree, symmetry, sample.fold_fraction,
                             sample.max_det_error, insufficient)


# ── Marginals and weak order ──────────────────────────────────────────────────

def kernel_z_marginal(t: float, z_edges: np.ndarray, r_bins: int = MC_MARGINAL_R_BINS) -> np.ndarray:
    """int over each z bin of int_0^inf p_t 2 pi sinh(2r) / 2 dr."""
    r_max, _ = support_box(t)
    return kernel_bin_probabilities(t, np.linspace(0.0, r_max, r_bins + 1), z_edges).sum(axis=0)


def kernel_r_marginal(t: float, r_edges: np.ndarray, z_bins: int = MC_MARGINAL_Z_BINS) -> np.ndarray:
    """Kernel probability of each r bin, z integrated over [-pi, pi]."""
    return kernel_bin_probabilities(t, r_edges, np.linspace(-math.pi, math.pi, z_bins + 1)).sum(axis=1)


@dataclass(frozen=True)
class MarginalComparison:
    """Counts of one coordinate in fixed bins against the kernel's bin probabilities."""

    coordinate: Literal["r", "z"]
    edges: np.ndarray
    counts: np.ndarray
    expected: np.ndarray
    n: int

    @property
    def frequency(self) -> np.ndarray:
        return self.counts / self.n

    @property
    def bias(self) -> np.ndarray:
        return self.frequency - self.expected

    @property
    def noise(self) -> np.ndarray:
        """Binomial standard deviation of each frequency."""
        return np.sqrt(self.expected * np.clip(1.0 - self.expected, 0.0, 1.0) / self.n)

    @property
    def occupied(self) -> np.ndarray:
        return self.n * self.expected >= MC_MIN_EXPECTED

    @property
    def agree(self) -> np.ndarray:
        return np.abs(self.bias) <= MC_CONFIDENCE_Z * self.noise

    @property
    def agreement(self) -> float:
        return float(self.agree[self.occupied].mean()) if self.occupied.any() else float("nan")

    @property
    def excess_bias(self) -> float:
        """sqrt(sum bias^2 - sum noise^2), floored at 0: the L2 bias beyond sampling noise."""
        return math.sqrt(max(float(np.sum(self.bias**2) - np.sum(self.noise**2)), 0.0))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            f"{self.coordinate}_lo": self.edges[:-1], f"{self.coordinate}_hi": self.edges[1:],
            "count": self.counts.astype(int), "expected_count": self.n * self.expected,
            "frequency": self.frequency, "probability": self.expected,
            "half_width": MC_CONFIDENCE_Z * self.noise,
            "occupied": self.occupied, "agree": self.agree,
        })


def _histogram(values: pd.Series, edges: np.ndarray) -> np.ndarray:
    counts, _ = np.histogram(values.dropna().to_numpy(), bins=edges)
    return counts


def z_marginal_vs_kernel(cfg: MCConfig, sample: PathSample | None = None, bins: int = MC_MARGINAL_BINS,
                         progress: bool = False) -> MarginalComparison:
    """Histogram of z on equal bins over [-pi, pi] against kernel_z_marginal."""
    sample = sample or simulate_paths(cfg, progress)
    edges = np.linspace(-math.pi, math.pi, bins + 1)
    return MarginalComparison("z", edges, _histogram(sample.frame["z"], edges),
                              kernel_z_marginal(cfg.t_final, edges), len(sample.frame))


def weak_order_edges(t: float, bins: int = MC_MARGINAL_BINS) -> np.ndarray:
    """Equal r bins over [0, 2t + 6 sqrt(t)]."""
    return np.linspace(0.0, 2.0 * t + 6.0 * math.sqrt(t), bins + 1)


@dataclass(frozen=True)
class WeakOrderReport:
    """The r marginal at n_steps and 2 n_steps; a weak order one scheme halves the bias."""

    coarse: MarginalComparison
    fine: MarginalComparison
    n_steps: int

    @property
    def ratio(self) -> float:
        top = self.coarse.excess_bias
        return self.fine.excess_bias / top if top > 0.0 else float("nan")

    @property
    def resolved(self) -> bool:
        """The coarse bias stands at least 3 noise norms above sampling noise."""
        return self.coarse.excess_bias >= 3.0 * float(np.sqrt(np.sum(self.coarse.noise**2)))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "r_lo": self.coarse.edges[:-1], "r_hi": self.coarse.edges[1:],
            "probability": self.coarse.expected,
            "frequency_coarse": self.coarse.frequency, "frequency_fine": self.fine.frequency,
            "bias_coarse": self.coarse.bias, "bias_fine": self.fine.bias,
            "noise": self.coarse.noise,
        })


def weak_order_bias(cfg: MCConfig, r_edges: np.ndarray | None = None, progress: bool = False) -> WeakOrderReport:
    """Simulate with cfg.n_steps and 2 cfg.n_steps (same seed) and compare both r marginals with the kernel."""
    r_edges = weak_order_edges(cfg.t_final) if r_edges is None else np.asarray(r_edges, dtype=float)
    expected = kernel_r_marginal(cfg.t_final, r_edges)
    runs = []
    for steps in (cfg.n_steps, 2 * cfg.n_steps):
        sample = simulate_paths(replace(cfg, n_steps=steps), progress)
        runs.append(MarginalComparison("r", r_edges, _histogram(sample.frame["r"], r_edges),
                                       expected, len(sample.frame)))
    report = WeakOrderReport(runs[0], runs[1], cfg.n_steps)
    log.info("weak order (%s): excess bias %.3g at %d steps, %.3g at %d, ratio %.3f", cfg.scheme,
             report.coarse.excess_bias, cfg.n_steps, report.fine.excess_bias, 2 * cfg.n_steps, report.ratio)
    return report
