import json

import numpy as np
import pytest

from helpers import curved_berwald, curved_metrics, flat_metrics, random_cartan, random_hnormal, sample
from jetcalc.expr import const
from jetcalc.geometry import Metric, berwald
from jetcalc.identities import (
    BIANCHI_IDS,
    BIANCHI_NOTES,
    DEFLECTION_IDS,
    RICCI_IDS,
    DVectorField,
    NotCartanError,
    bianchi_suite,
    deflection_suite,
    random_dvector,
    ricci_suite,
)

LITERAL_SLIPS = {
    "bianchi.2.3", "bianchi.3.1", "bianchi.6.2", "bianchi.8.4", "bianchi.8.5", "bianchi.8.6",
    "bianchi.8.7", "bianchi.9.1", "bianchi.9.2", "bianchi.9.3", "bianchi.10.1", "bianchi.10.2",
}


def constant_dvector(dims):
    p, n = dims
    fill = lambda shape: np.full(shape, const(1.5), dtype=object)  # noqa: E731
    return DVectorField(fill((p,)), fill((n,)), fill((n, p)), dims)


def test_identity_counts():
    assert len(RICCI_IDS) == 18 and len(set(RICCI_IDS)) == 18
    assert len(DEFLECTION_IDS) == 6
    assert len(BIANCHI_IDS) == 30 and len(set(BIANCHI_IDS)) == 30


def test_flat_berwald_constant_field_exact():
    dims = (2, 2)
    conn, nc = berwald(*flat_metrics(dims))
    pts = sample(dims, np.random.default_rng(0), 5)
    rep = ricci_suite(conn, nc, constant_dvector(dims), pts) + deflection_suite(conn, nc, pts)
    rep = rep + bianchi_suite(conn, nc, pts)
    assert len(rep) == 54
    assert all(e.raw_residual == 0.0 and e.scale == 0.0 for e in rep.entries)


@pytest.mark.parametrize("dims", [(2, 2), (3, 3)])
def test_berwald_curved_all_suites(dims):
    conn, nc = curved_berwald(dims)
    rng = np.random.default_rng(1)
    pts = sample(dims, rng, 10)
    rep = ricci_suite(conn, nc, random_dvector(dims, rng), pts) + deflection_suite(conn, nc, pts)
    rep = rep + bianchi_suite(conn, nc, pts, 1e-7)
    assert rep.all_pass, [(e.identity_id, e.max_residual) for e in rep.failures()]
    # the curved metrics make the identities non-trivial
    assert sum(e.scale > 1e-3 for e in rep.entries) > 20


@pytest.mark.parametrize("dims, random_nc", [((2, 2), True), ((2, 3), False), ((3, 2), True)])
def test_random_cartan_all_suites(dims, random_nc):
    rng = np.random.default_rng(sum(dims) + random_nc)
    conn, nc = random_cartan(dims, rng, random_nc=random_nc)
    pts = sample(dims, rng, 10)
    rep = ricci_suite(conn, nc, random_dvector(dims, rng), pts) + deflection_suite(conn, nc, pts)
    rep = rep + bianchi_suite(conn, nc, pts, 1e-7)
    assert rep.all_pass, [(e.identity_id, e.max_residual) for e in rep.failures()]
    assert max(e.scale for e in rep.entries) > 1e-2


def test_lagrange_case_has_no_temporal_curvature_terms():
    dims = (1, 3)
    rng = np.random.default_rng(2)
    h = Metric.identity("temporal", dims)
    conn, nc = random_cartan(dims, rng, metrics=(h, curved_metrics(dims)[1]), degree=1)
    assert all(e.is_number(0.0) for e in conn.Gbar.flat)
    pts = sample(dims, rng, 8)
    rep = ricci_suite(conn, nc, random_dvector(dims, rng), pts) + bianchi_suite(conn, nc, pts, 1e-7)
    assert rep.all_pass


def test_literal_table_fails_exactly_the_noted_entries():
    dims = (3, 3)
    rng = np.random.default_rng(3)
    conn, nc = random_cartan(dims, rng, degree=1)
    pts = sample(dims, rng, 6)
    literal = bianchi_suite(conn, nc, pts, 1e-7, variant="literal")
    derived = bianchi_suite(conn, nc, pts, 1e-7)
    assert {e.identity_id for e in literal.failures()} == LITERAL_SLIPS
    assert set(BIANCHI_NOTES) >= LITERAL_SLIPS
    assert derived.all_pass
    assert [e.identity_id for e in literal.entries] == [e.identity_id for e in derived.entries] == BIANCHI_IDS


def test_unknown_variant():
    conn, nc = curved_berwald((1, 2))
    with pytest.raises(ValueError):
        bianchi_suite(conn, nc, sample((1, 2), np.random.default_rng(0), 2), variant="other")


def test_non_cartan_rejected():
    rng = np.random.default_rng(4)
    conn, nc = random_hnormal((2, 2), rng)
    pts = sample((2, 2), rng, 4)
    for suite in (
        lambda: ricci_suite(conn, nc, random_dvector((2, 2), rng), pts),
        lambda: deflection_suite(conn, nc, pts),
        lambda: bianchi_suite(conn, nc, pts),
    ):
        with pytest.raises(NotCartanError, match="Cartan"):
            suite()


def test_dimension_and_connection_mismatch():
    conn, nc = curved_berwald((2, 2))
    rng = np.random.default_rng(5)
    with pytest.raises(ValueError):
        deflection_suite(conn, nc, sample((1, 2), rng, 3))
    with pytest.raises(ValueError):
        ricci_suite(conn, nc, random_dvector((1, 2), rng), sample((2, 2), rng, 3))
    _, other = berwald(*flat_metrics((2, 2)))
    with pytest.raises(ValueError):
        deflection_suite(conn, other, sample((2, 2), rng, 3))


def test_residual_scales_with_field():
    dims = (2, 2)
    rng = np.random.default_rng(6)
    conn, nc = random_cartan(dims, rng)
    pts = sample(dims, rng, 6)
    X = random_dvector(dims, rng)
    base = ricci_suite(conn, nc, X, pts)
    big = ricci_suite(conn, nc, X.scaled(1e3), pts)
    assert big.all_pass
    for a, b in zip(base.entries, big.entries):
        # Ricci identities are linear in X: term sizes grow by 1e3, the
        # normalized residual stays at rounding level
        assert b.scale == pytest.approx(1e3 * a.scale, rel=1e-9)
        assert b.raw_residual < 1e-12 * (1 + b.scale)


def test_report_serialization():
    dims = (1, 2)
    conn, nc = curved_berwald(dims)
    pts = sample(dims, np.random.default_rng(7), 4)
    rep = deflection_suite(conn, nc, pts)
    data = json.loads(json.dumps(rep.to_dict()))
    assert data["points_used"] == 4 and data["all_pass"] is True
    entry = data["entries"][0]
    assert set(entry) >= {"identity_id", "max_residual", "worst_point", "worst_indices", "pass"}
    assert set(entry["worst_point"]) == {"t", "x", "v"}
    assert rep["deflection.3"].identity_id == "deflection.3"


def test_worst_indices_are_one_based_and_pair_fibres():
    dims = (2, 2)
    rng = np.random.default_rng(8)
    conn, nc = random_cartan(dims, rng)
    rep = bianchi_suite(conn, nc, sample(dims, rng, 4), 1e-7)
    idx = rep["bianchi.11.1"].worst_indices
    assert len(idx) == 5 and all(isinstance(k, int) and k >= 1 for k in idx[:2])
    assert all(isinstance(k, tuple) and len(k) == 2 and min(k) >= 1 for k in idx[2:])
    entry = rep["bianchi.1.1"]
    assert all(isinstance(k, int) and k >= 1 for k in entry.worst_indices)
