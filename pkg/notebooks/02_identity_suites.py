# %% [markdown]
# # Ricci, deflection and Bianchi identities for a random connection
#
# A random Cartan-type h-normal connection over a random nonlinear
# connection, with curved temporal and spatial metrics.  Every identity is
# checked numerically at sample points; the residual is normalized by the
# largest term so it reads as a relative error.

# %%
import time

import numpy as np

from jetcalc import Metric, NonlinearConnection, Point, bianchi_suite, build_hnormal, deflection_suite, ricci_suite
from jetcalc.geometry import random_cartan_spec, random_polynomial
from jetcalc.identities import random_dvector

dims = p, n = (2, 3)
rng = np.random.default_rng(42)
h = Metric.from_strings("temporal", [["exp(t1)", "0.3"], ["0.3", "1 + t2^2"]], dims)
phi = Metric.from_strings("spatial", [["1", "0", "0"], ["0", "sin(x1)^2", "0"], ["0", "0", "1 + x2^2"]], dims)

M = np.array([random_polynomial(rng, dims, 2) for _ in range(n * p * p)], dtype=object).reshape(n, p, p)
N = np.array([random_polynomial(rng, dims, 2) for _ in range(n * p * n)], dtype=object).reshape(n, p, n)
nc = NonlinearConnection(M, N, dims)
conn = build_hnormal(random_cartan_spec(h, rng), nc, h)

points = [Point(rng.uniform(-1, 1, p), rng.uniform(0.3, 2.8, n), rng.uniform(-1, 1, (n, p))) for _ in range(20)]

# %%
start = time.perf_counter()
report = ricci_suite(conn, nc, random_dvector(dims, rng), points)
report = report + deflection_suite(conn, nc, points)
report = report + bianchi_suite(conn, nc, points, tolerance=1e-7)
print(f"{len(report)} identities in {time.perf_counter() - start:.1f}s, all pass: {report.all_pass}")

# %%
print(f"{'identity':14s} {'residual':>10s} {'max|term|':>10s}")
for e in report.entries:
    print(f"{e.identity_id:14s} {e.max_residual:10.2e} {e.scale:10.2e}")
