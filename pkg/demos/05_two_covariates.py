# coding: utf-8

# # Two inputs
#
# The estimator works for d-dimensional covariates with a radial kernel. The
# data-driven bandwidth rule is one-dimensional, so here h is set by hand.

# In[1]:

import numpy as np

import powerfrontier as pf

rng = np.random.default_rng(5)
X = rng.uniform(0, 1, size=(4000, 2))
frontier = 1 + X[:, 0] * X[:, 1]
Y = frontier * rng.uniform(0, 1, 4000)
sample = pf.Sample(X, Y)


# In[2]:

kernel = pf.make_kernel("cosine2", dimension=2)
cfg = pf.EstimatorConfig(p=40.0, h=0.2, kernel=kernel)
points = np.array([[0.3, 0.3], [0.5, 0.5], [0.7, 0.7]])
est = pf.estimate_frontier_grid(sample, cfg, points)
for pt, v in zip(points, est.values):
    print(pt, round(float(v), 4), "truth", 1 + pt[0] * pt[1])
