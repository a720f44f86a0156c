import numpy as np
import pytest

from helpers import curved_metrics, flat_metrics, random_cartan, sample, sphere_metrics
from oracles import fd_christoffel, fd_curvature
from jetcalc.dtensor import expr_array
from jetcalc.expr import ZERO, Coord, Point, differentiate, evaluate_batch, parse, sin, t, v, x
from jetcalc.geometry import (
    HNormalSpec,
    Metric,
    NonlinearConnection,
    SingularMetricError,
    adapted_derivative,
    berwald,
    build_hnormal,
    canonical_nonlinear,
    christoffel,
    is_cartan_type,
    metric_curvature,
    random_cartan_spec,
)


def all_zero(arr):
    return all(e is ZERO for e in np.asarray(arr).flat)


def test_metric_validation():
    dims = (1, 2)
    with pytest.raises(ValueError):
        Metric.from_strings("spatial", [["1", "x1"], ["0", "1"]], dims)
    with pytest.raises(ValueError):
        Metric.from_strings("temporal", [["x1"]], dims)
    with pytest.raises(ValueError):
        Metric.from_strings("spatial", [["1"]], dims)
    with pytest.raises(ValueError):
        Metric.identity("spatial", (1, 5))


def test_singular_metric_detected():
    dims = (1, 2)
    phi = Metric.from_strings("spatial", [["1", "0"], ["0", "sin(x1)^2"]], dims)
    with pytest.raises(SingularMetricError):
        phi.check([Point([0.0], [0.0, 1.0], np.zeros((2, 1)))])
    phi.check([Point([0.0], [1.0, 1.0], np.zeros((2, 1)))])


def test_indefinite_metric_accepted():
    dims = (2, 1)
    h = Metric.from_strings("temporal", [["1", "0"], ["0", "-1"]], dims)
    h.check([Point([0.3, 0.1], [0.0], np.zeros((1, 2)))])


def test_christoffel_examples():
    h, phi = flat_metrics((2, 3))
    assert all_zero(christoffel(h)) and all_zero(christoffel(phi))
    h = Metric.from_strings("temporal", [["exp(2*t1)"]], (1, 1))
    pts = sample((1, 1), np.random.default_rng(0), 10)
    assert np.allclose(evaluate_batch(christoffel(h), pts), 1.0, atol=1e-15)


def test_christoffel_symmetric_and_fd():
    rng = np.random.default_rng(1)
    _, phi = curved_metrics((1, 3))
    H = christoffel(phi)
    assert all(H[c, a, b] is H[c, b, a] for c in range(3) for a in range(3) for b in range(3))

    def g(q):
        return np.diag([1.0, np.sin(q[0]) ** 2, 1 + q[1] ** 2])

    for _ in range(5):
        xq = rng.uniform(0.4, 2.7, 3)
        val = evaluate_batch(H, [Point([0.0], xq, np.zeros((3, 1)))])[0]
        assert np.allclose(val, fd_christoffel(g, xq), atol=1e-8)


def test_sphere_curvature():
    _, phi = sphere_metrics()
    R = metric_curvature(phi)
    rng = np.random.default_rng(2)
    pts = sample((1, 2), rng, 20)
    vals = evaluate_batch(R, pts)
    x1 = np.array([q.x[0] for q in pts])
    # the derivative-last convention makes r^1_{212} = -sin^2 x1
    assert np.allclose(vals[:, 0, 1, 0, 1], -np.sin(x1) ** 2, atol=1e-14)
    assert np.abs(vals + np.swapaxes(vals, 3, 4)).max() < 1e-12

    def g(q):
        return np.array([[1.0, 0.0], [0.0, np.sin(q[0]) ** 2]])

    for q in pts[:5]:
        fd = fd_curvature(g, q.x)
        assert np.abs(vals[pts.index(q)] - fd).max() < 1e-6 * max(1.0, np.abs(fd).max())


def test_one_dimensional_curvature_vanishes():
    h = Metric.from_strings("temporal", [["exp(2*t1)"]], (1, 2))
    assert all_zero(metric_curvature(h))
    h, _ = flat_metrics((3, 1))
    assert all_zero(metric_curvature(h))


def test_canonical_nonlinear():
    h, phi = flat_metrics((2, 2))
    nc = canonical_nonlinear(h, phi)
    assert all_zero(nc.M) and all_zero(nc.N)
    dims = (1, 1)
    h = Metric.from_strings("temporal", [["exp(2*t1)"]], dims)
    phi = Metric.identity("spatial", dims)
    nc = canonical_nonlinear(h, phi)
    pts = sample(dims, np.random.default_rng(7), 10)
    vals = evaluate_batch(nc.M, pts)[:, 0, 0, 0]
    assert np.allclose(vals, [-q.v[0, 0] for q in pts], atol=1e-14)
    assert nc.N[0, 0, 0] is ZERO


def test_adapted_derivative():
    dims = (1, 1)
    h = Metric.from_strings("temporal", [["exp(2*t1)"]], dims)
    nc = canonical_nonlinear(h, Metric.identity("spatial", dims))
    T1 = Coord("temporal", a=1)
    rng = np.random.default_rng(3)
    pts = sample(dims, rng, 10)
    got = evaluate_batch([adapted_derivative(nc, v(1, 1), T1)], pts)[:, 0]
    assert np.allclose(got, [q.v[0, 0] for q in pts], atol=1e-14)
    e = sin(t(1)) * x(1)
    assert adapted_derivative(nc, e, T1) is differentiate(e, T1)
    M = np.array([[[parse("x1*v1_1", dims)]]], dtype=object)
    N = np.array([[[parse("t1", dims)]]], dtype=object)
    nc = NonlinearConnection(M, N, dims)
    e = v(1, 1) ** 2
    pts = sample(dims, rng, 5)
    got = evaluate_batch([adapted_derivative(nc, e, Coord("spatial", i=1))], pts)[:, 0]
    expect = np.array([-q.t[0] * 2 * q.v[0, 0] for q in pts])
    assert np.allclose(got, expect, atol=1e-14)


def test_nonlinear_connection_shapes():
    with pytest.raises(ValueError):
        NonlinearConnection(expr_array((2, 1, 1)), expr_array((2, 1, 1)), (1, 2))


def test_build_hnormal_flat_zero_and_dims():
    dims = (2, 2)
    h, phi = flat_metrics(dims)
    p, n = dims
    spec = HNormalSpec(christoffel(h), expr_array((n, n, p)), expr_array((n, n, n)), expr_array((n, n, n, p)), dims)
    conn = build_hnormal(spec, canonical_nonlinear(h, phi), h)
    for name in ("Gbar", "G", "GB", "Lbar", "L", "LB", "Cbar", "C", "CB"):
        assert all_zero(getattr(conn, name)), name
    other = canonical_nonlinear(*flat_metrics((1, 2)))
    with pytest.raises(ValueError):
        build_hnormal(spec, other, h)


def test_cartan_type_detection():
    dims = (1, 2)
    h, phi = sphere_metrics()
    conn, _ = berwald(h, phi)
    pts = sample(dims, np.random.default_rng(4), 10)
    assert is_cartan_type(conn.spec, pts)
    L = expr_array((2, 2, 2))
    L[0, 0, 1] = x(1)
    spec = HNormalSpec(christoffel(h), expr_array((2, 2, 1)), L, expr_array((2, 2, 2, 1)), dims)
    assert not is_cartan_type(spec, pts)
    spec = random_cartan_spec(h, np.random.default_rng(5))
    assert is_cartan_type(spec, pts)


def test_berwald_families():
    h, phi = curved_metrics((2, 2))
    conn, nc = berwald(h, phi)
    assert conn.nc is nc and conn.name == "berwald"
    assert all_zero(conn.G) and all_zero(conn.C) and all_zero(conn.Lbar) and all_zero(conn.Cbar)
    gam = christoffel(phi)
    assert all(conn.L[idx] is gam[idx] for idx in np.ndindex(gam.shape))


def test_random_cartan_is_reproducible():
    a, _ = random_cartan((2, 2), np.random.default_rng(6))
    b, _ = random_cartan((2, 2), np.random.default_rng(6))
    assert all(a.L[idx] is b.L[idx] for idx in np.ndindex(a.L.shape))
