import numpy as np
import pytest

from helpers import curved_berwald, flat_metrics, random_cartan, random_hnormal, sample
from jetcalc.covderiv import (
    cd_spatial,
    cd_temporal,
    cd_vertical,
    covariant_derivative,
    covariant_derivative_values,
)
from jetcalc.dtensor import DTensor, Signature, SlotKind, liouville, normalization_tensor
from jetcalc.expr import ZERO, Coord, const, differentiate, evaluate_batch, t, x
from jetcalc.geometry import adapted_derivative, berwald, random_polynomial

TU, TL, SU, SL, FU, FC = SlotKind.TU, SlotKind.TL, SlotKind.SU, SlotKind.SL, SlotKind.FU, SlotKind.FC
DIMS = (2, 3)


@pytest.fixture(scope="module")
def setup():
    rng = np.random.default_rng(0)
    conn, nc = random_cartan(DIMS, rng, random_nc=True)
    pts = sample(DIMS, rng, 50)
    return conn, nc, pts, rng


def rand_tensor(rng, slots, dims=DIMS):
    sig = Signature(slots, dims)
    comps = np.empty(sig.shape, dtype=object)
    for idx in np.ndindex(sig.shape):
        comps[idx] = random_polynomial(rng, dims, 2)
    return DTensor(sig, comps)


def adapted(nc, arr, coord):
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        out[idx] = adapted_derivative(nc, arr[idx], coord)
    return out


def test_scalar_reduces_to_adapted_derivatives(setup):
    conn, nc, pts, rng = setup
    f = rand_tensor(rng, [])
    p, n = DIMS
    for direction, coords in [
        ("t", [Coord("temporal", a=a + 1) for a in range(p)]),
        ("x", [Coord("spatial", i=i + 1) for i in range(n)]),
    ]:
        got = covariant_derivative(f, conn, direction).evaluate(pts)
        expect = np.stack(
            [evaluate_batch([adapted_derivative(nc, f.components[()], c)], pts)[:, 0] for c in coords], axis=1
        )
        assert np.allclose(got, expect, atol=1e-12)
    got = covariant_derivative(f, conn, "v").evaluate(pts)
    for i in range(n):
        for a in range(p):
            d = differentiate(f.components[()], Coord("fiber", i=i + 1, a=a + 1))
            assert np.allclose(got[:, i, a], evaluate_batch([d], pts)[:, 0], atol=1e-12)


def test_temporal_vector_specialization(setup):
    conn, nc, pts, rng = setup
    X = rand_tensor(rng, [TU])
    got = cd_temporal(X, conn).evaluate(pts)
    p = DIMS[0]
    dX = np.stack([evaluate_batch(adapted(nc, X.components, Coord("temporal", a=e + 1)), pts) for e in range(p)], -1)
    Xv = X.evaluate(pts)
    Gb = evaluate_batch(conn.Gbar, pts)
    assert np.abs(got - (dX + np.einsum("zm,zame->zae", Xv, Gb))).max() < 1e-10
    # h-normal: the spatial derivative of a temporal vector is the plain adapted derivative
    got = cd_spatial(X, conn).evaluate(pts)
    dX = np.stack([evaluate_batch(adapted(nc, X.components, Coord("spatial", i=k + 1)), pts) for k in range(DIMS[1])], -1)
    assert np.abs(got - dX).max() < 1e-10


def test_spatial_vector_specialization(setup):
    conn, nc, pts, rng = setup
    X = rand_tensor(rng, [SU])
    got = cd_spatial(X, conn).evaluate(pts)
    n = DIMS[1]
    dX = np.stack([evaluate_batch(adapted(nc, X.components, Coord("spatial", i=k + 1)), pts) for k in range(n)], -1)
    L = evaluate_batch(conn.L, pts)
    assert np.abs(got - (dX + np.einsum("zm,zimk->zik", X.evaluate(pts), L))).max() < 1e-10


def test_fibre_vector_specialization(setup):
    conn, nc, pts, rng = setup
    X = rand_tensor(rng, [FU])
    got = cd_vertical(X, conn).evaluate(pts)
    p, n = DIMS
    dX = np.empty(got.shape)
    for k in range(n):
        for e in range(p):
            c = Coord("fiber", i=k + 1, a=e + 1)
            dX[..., k, e] = evaluate_batch(np.vectorize(lambda f: differentiate(f, c), otypes=[object])(X.components), pts)
    CB = evaluate_batch(conn.CB, pts)
    assert np.abs(got - (dX + np.einsum("zmu,ziamukc->ziakc", X.evaluate(pts), CB))).max() < 1e-10


def test_lower_slots_enter_with_minus_sign(setup):
    conn, nc, pts, rng = setup
    w = rand_tensor(rng, [TL])
    got = cd_temporal(w, conn).evaluate(pts)
    p = DIMS[0]
    dw = np.stack([evaluate_batch(adapted(nc, w.components, Coord("temporal", a=e + 1)), pts) for e in range(p)], -1)
    Gb = evaluate_batch(conn.Gbar, pts)
    assert np.abs(got - (dw - np.einsum("zm,zmae->zae", w.evaluate(pts), Gb))).max() < 1e-10


def test_flat_berwald_constant_tensor():
    dims = (2, 2)
    conn, _ = berwald(*flat_metrics(dims))
    sig = Signature([FU, TL, SU, FC], dims)
    comps = np.empty(sig.shape, dtype=object)
    for k, idx in enumerate(np.ndindex(sig.shape)):
        comps[idx] = const(k + 1)
    D = DTensor(sig, comps)
    for direction in "txv":
        assert all(e is ZERO for e in covariant_derivative(D, conn, direction).components.flat)


def test_berwald_vertical_of_fibre_independent_tensor():
    dims = (2, 2)
    conn, _ = curved_berwald(dims)
    rng = np.random.default_rng(1)
    base = [t(1), t(2), x(1), x(2)]
    sig = Signature([SU, TL, FU], dims)
    comps = np.empty(sig.shape, dtype=object)
    for idx in np.ndindex(sig.shape):
        comps[idx] = random_polynomial(rng, dims, 2, variables=base)
    pts = sample(dims, rng, 10)
    assert np.abs(cd_vertical(DTensor(sig, comps), conn).evaluate(pts)).max() == 0.0


def test_normalization_tensor_is_parallel():
    rng = np.random.default_rng(3)
    for dims in [(1, 2), (2, 2), (3, 2)]:
        conn, _ = random_hnormal(dims, rng)
        J = normalization_tensor(conn.h)
        pts = sample(dims, rng, 10)
        for direction in "txv":
            assert np.abs(covariant_derivative(J, conn, direction).evaluate(pts)).max() < 1e-9


def test_numeric_values_match_symbolic(setup):
    conn, nc, pts, rng = setup
    pts = pts[:10]
    for slots in ([FU, TL], [SU, SL, FC], [TU, FU]):
        D = rand_tensor(rng, slots)
        for direction in "txv":
            sym = covariant_derivative(D, conn, direction).evaluate(pts)
            num = covariant_derivative_values(D, conn, direction, pts)
            assert np.abs(sym - num).max() <= 1e-11 * max(1.0, np.abs(sym).max())


def test_signature_grows_by_one_slot(setup):
    conn, _, _, rng = setup
    D = liouville(DIMS)
    assert cd_temporal(D, conn).slots == (FU, TL)
    assert cd_spatial(D, conn).slots == (FU, SL)
    assert cd_vertical(D, conn).slots == (FU, FC)


def test_dimension_mismatch(setup):
    conn = setup[0]
    with pytest.raises(ValueError):
        cd_temporal(liouville((1, 1)), conn)
    with pytest.raises(ValueError):
        covariant_derivative(liouville(DIMS), conn, "q")
