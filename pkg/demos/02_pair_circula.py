"""Pair circulas: a binding density links two circular-uniform angles."""
import math

import numpy as np

from circula import PairCirculaSpec, h_given_first, h_inverse_given_first, pc_density
from circula.pair import pc_sample

TWO_PI = 2 * math.pi

# rho = 0 is the independence circula, constant (2 pi)^-2.
print("independence:", pc_density(PairCirculaSpec(0.0), 1.0, 4.0), TWO_PI**-2)

# A concentrated binding density ties the second angle to the first.
strong = PairCirculaSpec(binding_rho=0.9, q=1)
print("on / off the diagonal:", pc_density(strong, 1.0, 1.0), pc_density(strong, 1.0, 1.0 + math.pi))

# Both marginals stay uniform: integrate out one argument on a grid.
g = np.linspace(0, TWO_PI, 512, endpoint=False)
X, Y = np.meshgrid(g, g, indexing="ij")
c = pc_density(strong, X, Y)
print("marginal range:", c.sum(axis=1).min() * TWO_PI / 512, c.sum(axis=1).max() * TWO_PI / 512)

# h-functions are conditional CDFs; their inverses draw conditionally.
p = h_given_first(strong, 1.3, 1.0)
print("h(1.3 | 1.0) =", p, "; inverse ->", h_inverse_given_first(strong, p, 1.0))

# q = -1 binds y + x instead of y - x.
flip = PairCirculaSpec(0.7, q=-1)
x, y = pc_sample(flip, 50_000, random_state=1)
print("resultant of y + x:", abs(np.mean(np.exp(1j * (y + x)))), "(binding rho 0.7)")
