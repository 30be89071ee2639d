# coding: utf-8

# # Sparse matrices and the smallest singular value
#
# Sparse sign matrices have entries +-1 with probability p and 0 otherwise.
# Their norm is governed by sqrt(np + log 2N) up to a factor depending on p.
# For tall Gaussian matrices the smallest singular value sits near
# sqrt(m) - sqrt(n - 1).

# In[1]:

from spectrallab import BFactorSpec, EntryDistribution, ExperimentConfig, run_experiment

sparse = ExperimentConfig(
    experiment="sparse_norm",
    dims=[(300, 300, 300)],
    distribution=EntryDistribution("sparse_sign", {"p": 0.01}),
    b_factor=BFactorSpec("identity", 1, 1),
    trials=3,
    base_seed=9,
    params={"p_grid": [0.003, 0.03, 0.3]},
)
rep = run_experiment(sparse)
print({p: round(c, 4) for p, c in rep.summary["fitted_by_p"].items()},
      "uniformity factor", round(rep.summary["uniformity_factor"], 2))

# In[2]:

smin = ExperimentConfig(
    experiment="smin",
    dims=[(120, 60, 1)],
    distribution=EntryDistribution("gaussian", {}, "unit_variance"),
    b_factor=BFactorSpec("identity", 1, 1),
    trials=40,
    base_seed=10,
    params={"t": 0.1, "delta": 0.1},
)
rep = run_experiment(smin)
print("P(ratio <= 0.1) =", rep.summary["prob_ratio_le_t"])
print("quantiles:", {q: round(v, 3) for q, v in rep.summary["quantiles"].items()})
