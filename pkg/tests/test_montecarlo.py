import math

import numpy as np
import pandas as pd
import pytest

from heatkernel.constants import MC_BLOCK_SIZE
from heatkernel.errors import DomainError
from heatkernel.montecarlo import (
    MCConfig, MarginalComparison, PathSimulator, _cayley_increment, _exponential_increment, bin_measure,
    density_vs_kernel, estimate_density, export_sample, kernel_bin_probabilities, kernel_z_marginal,
    simulate_paths, weak_order_bias, weak_order_edges, z_marginal_vs_kernel,
)


def _det(m):
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


@pytest.mark.parametrize("increment", [_exponential_increment, _cayley_increment])
def test_increments_have_unit_determinant(increment, rng):
    a, b = rng.normal(scale=0.3, size=(2, 100))
    np.testing.assert_allclose(_det(increment(a, b)), 1.0, atol=1e-12)


def test_exponential_increment_small_and_zero():
    np.testing.assert_allclose(_exponential_increment(np.zeros(1), np.zeros(1))[0], np.eye(2))


def test_cayley_falls_back_for_large_steps():
    a, b = np.array([0.1, 3.0]), np.array([0.0, 0.0])
    out = _cayley_increment(a, b)
    np.testing.assert_allclose(out[1], _exponential_increment(a[1:], b[1:])[0])


@pytest.mark.parametrize("kwargs", [
    {"n_paths": 0}, {"t_final": 0.0}, {"scheme": "euler"}, {"workers": 0}, {"seed": -1}, {"bins": (0, 5)},
])
def test_config_validation(kwargs):
    with pytest.raises(DomainError):
        MCConfig(**kwargs)


def test_block_sizes_cover_all_paths():
    sizes = PathSimulator(MCConfig(n_paths=2 * MC_BLOCK_SIZE + 5)).block_sizes()
    assert sizes == [MC_BLOCK_SIZE, MC_BLOCK_SIZE, 5]


def test_sample_is_reproducible_across_workers():
    base = dict(seed=3, n_paths=2 * MC_BLOCK_SIZE + 11, n_steps=10, t_final=0.3)
    one = simulate_paths(MCConfig(**base, workers=1)).frame
    three = simulate_paths(MCConfig(**base, workers=3)).frame
    pd.testing.assert_frame_equal(one, three, check_exact=True)


def test_different_seeds_differ():
    a = simulate_paths(MCConfig(seed=1, n_paths=500, n_steps=5)).frame
    b = simulate_paths(MCConfig(seed=2, n_paths=500, n_steps=5)).frame
    assert not a["r"].equals(b["r"])


def test_sample_lies_in_the_chart():
    sample = simulate_paths(MCConfig(seed=0, n_paths=2000, n_steps=50, t_final=0.5))
    frame = sample.frame
    assert sample.n_outside_chart == 0
    assert (frame["r"] >= 0.0).all()
    assert (frame["z"].abs() <= math.pi).all()
    assert sample.max_det_error < 1e-10


def test_geometric_midpoint_scheme_runs():
    sample = simulate_paths(MCConfig(seed=0, n_paths=1000, n_steps=20, scheme="geometric-midpoint"))
    assert len(sample.frame) == 1000


def test_export_roundtrip(tmp_path):
    sample = simulate_paths(MCConfig(seed=0, n_paths=300, n_steps=5))
    csv = pd.read_csv(export_sample(sample, tmp_path / "paths.csv"))
    parquet = pd.read_parquet(export_sample(sample, tmp_path / "paths.parquet"))
    assert list(csv.columns) == ["path_id", "r", "theta", "z", "fold_count"]
    np.testing.assert_array_equal(csv["r"].to_numpy(), sample.frame["r"].to_numpy())
    pd.testing.assert_frame_equal(parquet, sample.frame)


def test_bin_measure_sums_to_box():
    r_edges = np.linspace(0.0, 2.0, 5)
    z_edges = np.linspace(-1.0, 1.0, 3)
    total = bin_measure(r_edges, z_edges).sum()
    assert total == pytest.approx(2.0 * math.pi * 2.0 * (math.cosh(4.0) - 1.0) / 4.0)


def test_estimate_density_counts_every_path():
    sample = simulate_paths(MCConfig(seed=0, n_paths=3000, n_steps=20))
    est = estimate_density(sample, (10, 10))
    assert est.counts.shape == (10, 10)
    assert 0.99 <= est.total_mass <= 1.0


@pytest.mark.slow
def test_kernel_bin_probabilities_sum_to_one():
    probs = kernel_bin_probabilities(0.5, np.linspace(0.0, 6.0, 31), np.linspace(-math.pi, math.pi, 31))
    assert probs.sum() == pytest.approx(1.0, abs=1e-3)


@pytest.mark.slow
def test_density_agrees_with_kernel():
    cfg = MCConfig(seed=0, n_paths=100_000, n_steps=100, t_final=0.5)
    cmp = density_vs_kernel(cfg)
    assert cmp.agreement >= 0.9
    assert cmp.symmetry_pvalue >= 0.05
    frame = cmp.to_frame()
    assert len(frame) == 400


def test_marginal_comparison_without_bias():
    cmp = MarginalComparison("z", np.linspace(-1.0, 1.0, 4), np.array([30, 50, 20]), np.array([0.3, 0.5, 0.2]), 100)
    np.testing.assert_allclose(cmp.bias, 0.0, atol=1e-15)
    assert cmp.agree.all() and cmp.agreement == 1.0
    assert cmp.excess_bias == 0.0
    assert list(cmp.to_frame().columns[:2]) == ["z_lo", "z_hi"]


def test_marginal_excess_bias_removes_the_noise_floor():
    expected = np.array([0.25, 0.25, 0.25, 0.25])
    cmp = MarginalComparison("r", np.linspace(0.0, 1.0, 5), np.array([3500, 2500, 2500, 1500]), expected, 10_000)
    noise2 = 4 * 0.25 * 0.75 / 10_000
    assert cmp.excess_bias == pytest.approx(math.sqrt(2 * 0.1**2 - noise2))
    assert not cmp.agree[0] and cmp.agree[1]


def test_weak_order_edges():
    edges = weak_order_edges(0.5)
    assert len(edges) == 21
    assert edges[0] == 0.0 and edges[-1] == pytest.approx(1.0 + 6.0 * math.sqrt(0.5))


@pytest.mark.slow
def test_kernel_z_marginal_sums_to_one():
    probs = kernel_z_marginal(0.5, np.linspace(-math.pi, math.pi, 21))
    assert probs.sum() == pytest.approx(1.0, abs=1e-3)
    np.testing.assert_allclose(probs, probs[::-1], rtol=1e-6)


@pytest.mark.slow
def test_z_marginal_agrees_with_kernel():
    cfg = MCConfig(seed=0, n_paths=100_000, n_steps=100, t_final=0.5)
    cmp = z_marginal_vs_kernel(cfg)
    assert len(cmp.counts) == 20
    assert cmp.n == cfg.n_paths
    assert cmp.agreement >= 0.9


@pytest.mark.slow
def test_r_marginal_bias_halves_when_steps_double():
    report = weak_order_bias(MCConfig(seed=0, n_paths=200_000, n_steps=8, t_final=0.5))
    assert report.resolved
    assert 0.35 <= report.ratio <= 0.7
    assert len(report.to_frame()) == 20
