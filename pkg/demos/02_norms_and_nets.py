# coding: utf-8

# # Spectral norms three ways
#
# Power iteration is the workhorse.  A cyclic Jacobi eigensolver on the Gram
# matrix acts as an independent oracle, and for tiny dimensions an
# epsilon-net of the sphere gives a certified bracket.

# In[1]:

import numpy as np

from spectrallab import build_sphere_net, singular_values_full, spectral_norm
from spectrallab.nets import net_cardinality_bound
from spectrallab.spectral import net_norm_bounds

rng = np.random.default_rng(0)

# ## Power iteration against Jacobi

# In[2]:

for shape in [(5, 5), (40, 12), (80, 80)]:
    m = rng.standard_normal(shape)
    res = spectral_norm(m, tol=1e-12)
    oracle = singular_values_full(m)[0]
    print(shape, f"power {res.value:.12f} ({res.iterations} steps)  jacobi {oracle:.12f}")

# A matrix whose top singular value is repeated still converges in value:

# In[3]:

u, _ = np.linalg.qr(rng.standard_normal((6, 6)))
m = u @ np.diag([3.0, 3.0, 1.0, 0.5, 0.2, 0.1]) @ u.T
print(spectral_norm(m).value)

# ## Net certification
#
# Greedy farthest-point nets of the sphere in R^n have at most (1 + 2/eps)^n
# points.  With eps = 1/2 the true norm lies between the net maximum and twice
# that value.

# In[4]:

for n in (2, 4, 6):
    net = build_sphere_net(n, 0.5, seed=n)
    m = rng.standard_normal((3, n))
    lo, hi = net_norm_bounds(m, 0.5, net.points)
    print(f"n={n}: |net|={len(net)} <= {net_cardinality_bound(n, 0.5):.0f};"
          f" {lo:.4f} <= {singular_values_full(m)[0]:.4f} <= {hi:.4f}")
