"""The wrapped Cauchy distribution: density, closed-form CDF, quantile, sampling."""
import math

import numpy as np

from circula import WrappedCauchy, resultant_length, wc_cdf0

w = WrappedCauchy(mu=2.9, rho=0.83)  # roughly the Brookings marginal

# The density peaks at the location and is symmetric about it.
print("density at mu, mu + pi:", w.pdf(w.mu), w.pdf(w.mu + math.pi))

# The distribution function has origin 0, so F(0) = 0 and F(2pi-) = 1.
theta = np.linspace(0, 2 * math.pi, 9)[:-1]
print("F on a coarse grid:", np.round(w.cdf(theta), 4))

# The standardized CDF G0 is measured from the location; G0(pi) = 1/2 always.
print("G0(pi/2; 0.5) =", wc_cdf0(math.pi / 2, 0.5), "=", math.acos(-0.8) / (2 * math.pi))

# Quantiles invert the CDF exactly.
p = np.array([0.05, 0.5, 0.95])
print("quantiles:", np.round(w.ppf(p), 4), "-> CDF:", w.cdf(w.ppf(p)))

# The mean resultant length of wC(mu, rho) is rho.
x = w.rvs(100_000, random_state=0)
print("sample resultant length:", round(resultant_length(x), 4), "vs rho =", w.rho)
