"""Histogram of simulated endpoints, and their z marginal, against the kernel."""

from heatkernel.checks import CheckResult
from heatkernel.constants import MC_AGREEMENT_TARGET
from heatkernel.montecarlo import MCConfig, density_vs_kernel, simulate_paths, z_marginal_vs_kernel

SUITES = ("fast", "full")


def run(suite: str = "fast") -> CheckResult:
    if suite == "full":
        cfg = MCConfig(seed=0, n_paths=200_000, n_steps=400, t_final=0.5)
    else:
        cfg = MCConfig(seed=0, n_paths=100_000, n_steps=100, t_final=0.5)
    sample = simulate_paths(cfg)
    cmp = density_vs_kernel(cfg, sample)
    marginal = z_marginal_vs_kernel(cfg, sample)
    ok = (cmp.agreement >= MC_AGREEMENT_TARGET and cmp.symmetry_pvalue >= 0.05
          and marginal.agreement >= MC_AGREEMENT_TARGET)
    return CheckResult("monte_carlo", ok,
                       f"{cmp.agreement:.1%} of {cmp.occupied_bins} bins agree, z-symmetry p = {cmp.symmetry_pvalue:.3f}, "
                       f"z marginal {marginal.agreement:.1%} of {int(marginal.occupied.sum())} bins",
                       {"agreement": cmp.agreement, "occupied_bins": cmp.occupied_bins,
                        "symmetry_pvalue": cmp.symmetry_pvalue, "fold_fraction": cmp.fold_fraction,
                        "z_marginal_agreement": marginal.agreement})
