# coding: utf-8

# # What goes wrong without a fourth moment
#
# With symmetric Pareto entries (alpha = 3.5) the largest entry of an n x n
# matrix grows like n^(2/alpha), faster than sqrt(n), so the ratio
# ||A|| / (2 sqrt n) drifts upward.  Gaussian entries serve as a flat control.
# The drift is slow; the full acceptance run uses n up to 1600.

# In[1]:

from spectrallab import BFactorSpec, EntryDistribution, ExperimentConfig, run_experiment

cfg = ExperimentConfig(
    experiment="sharpness",
    dims=[(50, 50, 50), (200, 200, 200), (800, 800, 800)],
    distribution=EntryDistribution("symmetric_pareto", {"alpha": 3.5}, "unit_variance"),
    b_factor=BFactorSpec("identity", 1, 1),
    trials=5,
    base_seed=6,
    params={"control": {"kind": "gaussian", "params": {}, "normalization": "unit_variance"},
            "norm_tol": 1e-8},
)
rep = run_experiment(cfg)
print("pareto medians  :", {k: round(v, 4) for k, v in rep.summary["medians"].items()})
print("gaussian medians:", {k: round(v, 4) for k, v in rep.summary["control_medians"].items()})

# ## The harness refuses to misuse a bound
#
# Asking the main-bound experiment to run on this law is a configuration
# error, not a silent pass.

# In[2]:

from spectrallab.experiments import ConfigError

try:
    run_experiment(ExperimentConfig("main_bound", [(10, 10, 10)], cfg.distribution, cfg.b_factor, 1, 0, {}))
except ConfigError as exc:
    print("ConfigError:", exc)
