"""The same seed gives the same sample for any number of worker threads."""

from heatkernel.checks import CheckResult
from heatkernel.constants import MC_BLOCK_SIZE
from heatkernel.montecarlo import MCConfig, simulate_paths

SUITES = ("fast", "full")


def run(suite: str = "fast") -> CheckResult:
    base = dict(seed=12345, n_paths=3 * MC_BLOCK_SIZE + 17, n_steps=20, t_final=0.5)
    frames = [simulate_paths(MCConfig(**base, workers=w)).frame for w in (1, 3, 1)]
    same = all(frames[0].equals(f) for f in frames[1:])
    detail = "bitwise identical across runs and 1/3 workers" if same else "samples differ between runs"
    return CheckResult("determinism", same, detail, {"paths": base["n_paths"]})
