"""Fit the three-station, order-2 model by MCMC to data simulated from known parameters.

Real USBR data can be used the same way through ``circula.io.load_csv`` or the
``circula fit`` command.
"""
from pathlib import Path

from circula import McmcConfig, ModelSpec, WrappedCauchy, fit, simulate
from circula.cli import rose_table
from circula.io import load_csv

truth = ModelSpec(
    3, 2,
    [WrappedCauchy(3.5, 0.14), WrappedCauchy(3.8, 0.19), WrappedCauchy(2.9, 0.83)],
    cross={(2, 1): 0.55, (3, 1): 0.01, (3, 2): 0.04},
    serial={(3, 3, 1): 0.86, (1, 2, 1): 0.26, (2, 3, 2): 0.26},
)
data = simulate(truth, T=192, seed=2015, names=("pine_grove", "hood_river", "brookings"))

summary = fit(data.data, McmcConfig(chains=3, iterations=3000, warmup=100, seed=1), p=2)
print(summary.table())

mean = dict(zip(summary.names, summary.mean))
for name in ("rho_12,0", "rho_13,0", "rho_23,0", "rho_33,1"):
    print(f"{name}: posterior mean {mean[name]:.3f}")

# Rose-diagram counts plus the fitted marginal density for station 3.
fitted = summary.point_model().marginals[2]
for start, end, count, freq, dens in rose_table(data.data[:, 2], 8, fitted.pdf):
    print(f"[{start:.3f}, {end:.3f})  {count:4d}  {freq:.3f}  {dens:.3f}")

# The bundled excerpt of the hourly table loads the same way.
excerpt = load_csv(Path(__file__).resolve().parents[1] / "data" / "hourly_excerpt.csv")
print("excerpt:", excerpt.T, "rows,", excerpt.names)
