"""Shared builders for the test-suite."""

from __future__ import annotations

import numpy as np

from jetcalc.dtensor import expr_array
from jetcalc.expr import Point, const, cos, exp, log, sin, sqrt, t, v, x
from jetcalc.geometry import (
    HNormalSpec,
    Metric,
    NonlinearConnection,
    berwald,
    build_hnormal,
    canonical_nonlinear,
    christoffel,
    random_cartan_spec,
    random_polynomial,
)

TEMPORAL_ROWS = [["exp(t1)", "0.3", "0"], ["0.3", "1 + t2^2", "0"], ["0", "0", "2"]]
SPATIAL_ROWS = [["1", "0", "0"], ["0", "sin(x1)^2", "0"], ["0", "0", "1 + x2^2"]]


def curved_metrics(dims):
    """A t-dependent temporal metric and a curved spatial metric of the given sizes."""
    p, n = dims
    h = Metric.from_strings("temporal", [r[:p] for r in TEMPORAL_ROWS[:p]], dims)
    phi = Metric.from_strings("spatial", [r[:n] for r in SPATIAL_ROWS[:n]], dims)
    return h, phi


def flat_metrics(dims):
    return Metric.identity("temporal", dims), Metric.identity("spatial", dims)


def sphere_metrics(temporal="1"):
    dims = (1, 2)
    h = Metric.from_strings("temporal", [[temporal]], dims)
    phi = Metric.from_strings("spatial", [["1", "0"], ["0", "sin(x1)^2"]], dims)
    return h, phi


def sample(dims, rng, count, x_range=(0.3, 2.8)):
    """Points with t, v in [-1, 1] and x inside ``x_range`` (keeps sin(x1) away from 0)."""
    p, n = dims
    return [
        Point(rng.uniform(-1, 1, p), rng.uniform(*x_range, n), rng.uniform(-1, 1, (n, p)))
        for _ in range(count)
    ]


def random_nonlinear(dims, rng, degree=2):
    p, n = dims
    M = np.empty((n, p, p), dtype=object)
    N = np.empty((n, p, n), dtype=object)
    for idx in np.ndindex(M.shape):
        M[idx] = random_polynomial(rng, dims, degree)
    for idx in np.ndindex(N.shape):
        N[idx] = random_polynomial(rng, dims, degree)
    return NonlinearConnection(M, N, dims)


def random_cartan(dims, rng, degree=2, random_nc=False, metrics=None):
    """A random Cartan-type h-normal connection over a curved or random nonlinear connection."""
    h, phi = metrics if metrics is not None else curved_metrics(dims)
    nc = random_nonlinear(dims, rng, degree) if random_nc else canonical_nonlinear(h, phi)
    conn = build_hnormal(random_cartan_spec(h, rng, degree), nc, h)
    return conn, nc


def random_hnormal(dims, rng, degree=2):
    """A random h-normal connection with no symmetry imposed on L or C."""
    p, n = dims
    h, phi = curved_metrics(dims)
    nc = canonical_nonlinear(h, phi)
    grids = {}
    for name, shape in {"G": (n, n, p), "L": (n, n, n), "C": (n, n, n, p)}.items():
        arr = expr_array(shape)
        for idx in np.ndindex(shape):
            arr[idx] = random_polynomial(rng, dims, degree)
        grids[name] = arr
    spec = HNormalSpec(H=christoffel(h), dims=dims, **grids)
    return build_hnormal(spec, nc, h), nc


def curved_berwald(dims):
    h, phi = curved_metrics(dims)
    return berwald(h, phi)


def random_expression(rng, dims, depth=3):
    """Random expression built from smooth operations that stay finite on [-1, 1]-ish boxes."""
    p, n = dims
    leaves = [t(a + 1) for a in range(p)] + [x(i + 1) for i in range(n)]
    leaves += [v(i + 1, a + 1) for i in range(n) for a in range(p)]

    def build(d):
        if d == 0 or rng.random() < 0.2:
            if rng.random() < 0.25:
                return const(float(np.round(rng.uniform(-2, 2), 3)))
            return leaves[rng.integers(len(leaves))]
        op = rng.integers(9)
        a = build(d - 1)
        if op == 0:
            return a + build(d - 1)
        if op == 1:
            return a - build(d - 1)
        if op == 2:
            return a * build(d - 1)
        if op == 3:
            return a / (2 + cos(build(d - 1)))
        if op == 4:
            return sin(a)
        if op == 5:
            return cos(a) * build(d - 1)
        if op == 6:
            return exp(sin(a))
        if op == 7:
            return log(1 + a * a)
        return sqrt(2 + sin(a)) ** int(rng.integers(1, 4))

    return build(depth)
