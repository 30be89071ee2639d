# coding: utf-8

# # Truncation, dyadic levels and vector classes
#
# The proof machinery splits a matrix by entry size and a vector by coordinate
# size.  Both splits are exact: summing the pieces returns the input bit for
# bit.

# In[1]:

import math

import numpy as np

from spectrallab import EntryDistribution, dyadic_decompose, sample_matrix
from spectrallab.nets import classify_vector, enumerate_level_net
from spectrallab.pipeline import implied_m_scale

a = sample_matrix(EntryDistribution("student_t", {"nu": 4.0}, "unit_moment:2.5"), 200, 200, seed=12)
eps = 0.5
# implied_m_scale works with the exponent 2 + eps/4; passing 4 eps gives 2 + eps
M = max(1.0, implied_m_scale(a, 4 * eps) * 1.001)
d = dyadic_decompose(a, M, eps)
print("top level k0 =", d.k0, " exact:", np.array_equal(d.reconstruct(), a))
print(d.summary_csv())

# ## Splitting a vector
#
# Coordinates above M / sqrt(n) go to the peaky part y, the rest to the flat
# part z.  At most n / M^2 coordinates can be peaky.

# In[2]:

x = np.random.default_rng(1).standard_normal(64)
x[:3] *= 8
x /= np.linalg.norm(x) * (1 + 1e-15)
y, z = classify_vector(x, 2.0)
print("peaky coords:", np.count_nonzero(y), "<=", 64 / 4, " exact:", np.array_equal(y + z, x))

# ## Level nets
#
# Vectors whose nonzero coordinates all equal +-h form a finite set; at level
# k in dimension n there are sum_j C(n, j) 2^j of them with support up to m.

# In[3]:

net = enumerate_level_net(8, 1, M=2.0)
print(f"h = {net.h:.4f}, support <= {net.m}, {len(net.points)} points,"
      f" log|net| / (m log 4) = {net.cardinality_constant:.3f}")
print("check:", len(net.points) == sum(math.comb(8, j) * 2**j for j in range(1, net.m + 1)))
