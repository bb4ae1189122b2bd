"""Connection and curvature: oracles, symmetries, and fixture anchors."""

import numpy as np
import pytest

from circgeo.core import MetricAtPoint, metric_at, q_apply
from circgeo.tensor import (
    DegeneratePlaneError,
    christoffel_at,
    christoffel_from_metric,
    metric_compatibility_residual,
    nabla_q,
    riemann_at,
    riemann_from_christoffel,
    sectional_curvature,
)
from circgeo.verify import sample_q_basis_vectors

from conftest import interior_points
from oracles import fd_christoffel, fd_dgamma


def geometry_at(spec, p):
    m = metric_at(spec, p)
    ch = christoffel_from_metric(m)
    return m, ch, riemann_from_christoffel(m, ch)


# ---------------------------------------------------------------------------
# Christoffel symbols
# ---------------------------------------------------------------------------


def test_constant_metric_connection_vanishes(const_spec):
    ch = christoffel_at(const_spec, [0.3, 0.1, -0.2, 0.5])
    assert np.array_equal(ch.gamma, np.zeros((4, 4, 4)))
    assert np.array_equal(ch.dgamma, np.zeros((4, 4, 4, 4)))


def test_flat_par_gamma_at_origin(flat_par):
    ch = christoffel_at(flat_par, [0, 0, 0, 0])
    assert np.max(np.abs(ch.gamma - 1.0 / 16.0)) <= 1e-12


def test_flat_par_gamma_closed_form(flat_par):
    # All 64 components coincide: common derivative over 2(A + 2B + C).
    rng = np.random.default_rng(1)
    for p in interior_points(flat_par, rng, 10):
        m = metric_at(flat_par, p)
        ch = christoffel_from_metric(m)
        expected = 1.0 / (2.0 * (m.a + 2.0 * m.b + m.c))
        assert np.max(np.abs(ch.gamma - expected)) <= 1e-12


def test_gamma_symmetric_and_matches_unsymmetrized(all_fixture_specs):
    rng = np.random.default_rng(2)
    from circgeo.core import inverse_metric

    for spec in all_fixture_specs:
        for p in interior_points(spec, rng, 5):
            m = metric_at(spec, p)
            ch = christoffel_from_metric(m)
            assert np.array_equal(ch.gamma, np.swapaxes(ch.gamma, 1, 2))
            ginv = inverse_metric(m).matrix
            dg = m.d1
            raw = 0.5 * np.einsum(
                "as,aij->sij",
                ginv,
                np.einsum("iaj->aij", dg) + np.einsum("jai->aij", dg) - dg,
            )
            assert np.max(np.abs(ch.gamma - raw)) <= 1e-12


def test_gamma_matches_finite_differences(nonpar, curved_par):
    for spec, p in [
        (nonpar, [1.0, 0.0, 0.0, 0.0]),
        (nonpar, [0.5, 0.2, -0.3, 0.8]),
        (curved_par, [0.3, -0.2, 0.1, 0.4]),
    ]:
        ch = christoffel_at(spec, p)
        assert np.max(np.abs(ch.gamma - fd_christoffel(spec, p))) <= 1e-6


def test_dgamma_matches_finite_differences(all_fixture_specs):
    rng = np.random.default_rng(3)
    for spec in all_fixture_specs:
        for p in interior_points(spec, rng, 3, margin=0.02):
            ch = christoffel_at(spec, p)
            fd = fd_dgamma(spec, p, h=1e-4)
            scale = max(1.0, float(np.max(np.abs(ch.dgamma))))
            assert np.max(np.abs(ch.dgamma - fd)) <= 1e-5 * scale


def test_metric_compatibility(all_fixture_specs):
    rng = np.random.default_rng(4)
    for spec in all_fixture_specs:
        for p in interior_points(spec, rng, 25):
            m = metric_at(spec, p)
            ch = christoffel_from_metric(m)
            scale = max(1.0, float(np.max(np.abs(m.d1))))
            assert metric_compatibility_residual(m, ch) <= 1e-9 * scale


# ---------------------------------------------------------------------------
# Riemann tensor
# ---------------------------------------------------------------------------


def test_constant_metric_is_flat(const_spec):
    r = riemann_at(const_spec, [0.2, -0.4, 0.1, 0.9])
    assert np.array_equal(r.r_low, np.zeros((4, 4, 4, 4)))


def test_flat_par_family_is_flat(flat_par):
    rng = np.random.default_rng(5)
    for p in interior_points(flat_par, rng, 25):
        assert riemann_at(flat_par, p).norm_inf <= 1e-9


def test_curved_par_is_curved_at_origin(curved_par):
    r = riemann_at(curved_par, [0, 0, 0, 0])
    assert r.norm_inf > 1e-4
    # Regression anchors, measured once and frozen.
    assert abs(r.r_low[0, 1, 0, 1] - (-0.2)) <= 1e-12
    assert abs(r.norm_inf - 0.2) <= 1e-12


def test_riemann_symmetries_and_bianchi(all_fixture_specs):
    rng = np.random.default_rng(6)
    for spec in all_fixture_specs:
        for p in interior_points(spec, rng, 25):
            r = riemann_at(spec, p)
            low = r.r_low
            scale = max(1.0, r.norm_inf)
            assert np.max(np.abs(low + np.einsum("ijkl->jikl", low))) <= 1e-9 * scale
            assert np.max(np.abs(low + np.einsum("ijkl->ijlk", low))) <= 1e-9 * scale
            assert np.max(np.abs(low - np.einsum("ijkl->klij", low))) <= 1e-9 * scale
            bianchi = low + np.einsum("jkil->ijkl", low) + np.einsum("kijl->ijkl", low)
            assert np.max(np.abs(bianchi)) <= 1e-9 * scale


# ---------------------------------------------------------------------------
# Sectional curvature
# ---------------------------------------------------------------------------


def test_sectional_zero_on_flat_fixtures(const_spec, flat_par):
    for spec, p in [(const_spec, [0, 0, 0, 0]), (flat_par, [0.1, 0.2, 0.3, 0.4])]:
        m, _, r = geometry_at(spec, p)
        rng = np.random.default_rng(7)
        for _ in range(10):
            x, y = rng.uniform(-1, 1, 4), rng.uniform(-1, 1, 4)
            assert abs(sectional_curvature(r, m, x, y)) <= 1e-9


def test_sectional_diagonal_plane_vanishes(curved_par):
    m, _, r = geometry_at(curved_par, [0, 0, 0, 0])
    rng = np.random.default_rng(8)
    for x in sample_q_basis_vectors(rng, 20):
        assert abs(sectional_curvature(r, m, x, q_apply(x, 2))) <= 1e-9


def test_sectional_symmetric_in_arguments(curved_par):
    m, _, r = geometry_at(curved_par, [0.4, 0.1, -0.3, 0.2])
    rng = np.random.default_rng(9)
    for _ in range(20):
        x, y = rng.uniform(-1, 1, 4), rng.uniform(-1, 1, 4)
        mu_xy = sectional_curvature(r, m, x, y)
        mu_yx = sectional_curvature(r, m, y, x)
        assert abs(mu_xy - mu_yx) <= 1e-12 * max(1.0, abs(mu_xy))


def test_sectional_rejects_degenerate_plane(curved_par):
    m, _, r = geometry_at(curved_par, [0, 0, 0, 0])
    with pytest.raises(DegeneratePlaneError):
        sectional_curvature(r, m, [1, 2, 0, 1], [2, 4, 0, 2])


# ---------------------------------------------------------------------------
# Covariant derivative of the shift
# ---------------------------------------------------------------------------


def test_nabla_q_vanishes_for_constants(const_spec):
    ch = christoffel_at(const_spec, [0, 0, 0, 0])
    assert nabla_q(ch).max_abs == 0.0


def test_nabla_q_vanishes_on_curved_par(curved_par):
    rng = np.random.default_rng(10)
    for p in interior_points(curved_par, rng, 25):
        ch = christoffel_at(curved_par, p)
        assert nabla_q(ch).max_abs <= 1e-9


def test_nabla_q_vanishes_on_flat_par(flat_par):
    rng = np.random.default_rng(11)
    for p in interior_points(flat_par, rng, 25):
        ch = christoffel_at(flat_par, p)
        assert nabla_q(ch).max_abs <= 1e-9


def test_nabla_q_nonzero_on_nonpar(nonpar):
    ch = christoffel_at(nonpar, [1, 0, 0, 0])
    assert nabla_q(ch).max_abs > 1e-2


def test_nabla_q_formula_shape():
    m = MetricAtPoint.from_constants(5, 1, 3)
    ch = christoffel_from_metric(m)
    assert nabla_q(ch).components.shape == (4, 4, 4)
