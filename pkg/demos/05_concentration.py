# coding: utf-8

# # Tail bounds against simulation
#
# Each closed-form bound is a `TailBound`; each simulation is wrapped in an
# `EmpiricalTail`.  An audit checks bound(t) + 3 standard errors against the
# empirical exceedance at a few values of t.

# In[1]:

import numpy as np

from spectrallab.concentration import (
    CANONICAL_AUDITS,
    EmpiricalTail,
    audit_domination,
    bennett_tail,
    canonical_audit,
    tabulate_csv,
)

for name in CANONICAL_AUDITS:
    rows = canonical_audit(name, trials=20_000, seed=1)
    print(f"{name:16s}", "  ".join(f"t={r['t']:.0f}: {r['empirical']:.4f} <= {r['bound']:.4f}" for r in rows))

# ## A hand-built audit
#
# Sums of 50 centered Bernoulli(0.1) variables, checked against Bennett's
# inequality with sigma^2 = 50 * 0.1 * 0.9.

# In[2]:

rng = np.random.default_rng(4)
x = (rng.random((20_000, 50)) < 0.1).sum(axis=1) - 5.0
rows = audit_domination(bennett_tail(4.5), EmpiricalTail(x), [2.0, 4.0, 6.0])
print(tabulate_csv(rows))
