# %% [markdown]
# # Berwald connection over the unit sphere
#
# Time is one-dimensional with h = exp(2 t1); space is the unit sphere.
# For the Berwald connection only two torsion families survive, and the
# spatial one is the sphere curvature contracted with the velocities.

# %%
import numpy as np

from jetcalc import Metric, Point, berwald, metric_curvature, torsion_set, curvature_set
from jetcalc.expr import evaluate_batch

dims = (1, 2)
h = Metric.from_strings("temporal", [["exp(2*t1)"]], dims)
phi = Metric.from_strings("spatial", [["1", "0"], ["0", "sin(x1)^2"]], dims)
conn, nc = berwald(h, phi)

rng = np.random.default_rng(0)
points = [Point(rng.uniform(-1, 1, 1), rng.uniform([0.3, -3], [2.8, 3]), rng.uniform(-1, 1, (2, 1))) for _ in range(50)]

# %% which torsion families are nonzero?
tor = torsion_set(conn)
for name, fam in tor.families().items():
    print(f"{name:5s} max |.| = {np.abs(fam.evaluate(points)).max():.3e}")

# %% R_xx against r^m_{lij} x^l_mu
r = evaluate_batch(metric_curvature(phi), points)
v = np.stack([q.v for q in points])
expected = np.einsum("zmlij,zlu->zmuij", r, v)
print("R_xx - r.x residual:", np.abs(tor.R_xx.evaluate(points) - expected).max())

# %% curvature: only the metric curvature survives
cur = curvature_set(conn)
for name, fam in cur.primary().items():
    print(f"{name:5s} max |.| = {np.abs(fam.evaluate(points)).max():.3e}")
x1 = np.array([q.x[0] for q in points])
print("r^1_212 + sin^2 x1:", np.abs(r[:, 0, 1, 0, 1] + np.sin(x1) ** 2).max())
