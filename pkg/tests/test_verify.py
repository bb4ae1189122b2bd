"""Residual checks: positive cases, negative controls, gating and determinism."""

from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circgeo.core import (
    MetricAtPoint,
    circulant_matrix,
    cos_angle,
    find_orthogonal_q_basis,
    metric_at,
    q_apply,
)
from circgeo.tensor import christoffel_from_metric, riemann_from_christoffel
from circgeo.verify import (
    KNOWN_CHECKS,
    QBasisCoefficients,
    check_curvature_q_identity,
    check_integrability,
    check_isometry,
    check_mu_law,
    check_parallel_condition,
    check_parallel_equivalence,
    check_sectional_relations,
    coeff_angles,
    report_to_json,
    run_suite,
)

ORIGIN = [0.0, 0.0, 0.0, 0.0]


def riemann_of(spec, p):
    m = metric_at(spec, p)
    return m, riemann_from_christoffel(m, christoffel_from_metric(m))


# ---------------------------------------------------------------------------
# Isometry
# ---------------------------------------------------------------------------


def test_isometry_passes_on_circulant_metrics():
    rng = np.random.default_rng(0)
    for _ in range(10):
        b = rng.uniform(0.1, 2)
        c = b + rng.uniform(0.1, 2)
        a = c + rng.uniform(0.1, 2)
        rep = check_isometry(MetricAtPoint.from_constants(a, b, c), samples=1000, seed=1)
        assert rep.status == "pass"


def test_isometry_negative_control():
    bad = circulant_matrix(4.0, 1.0, 2.0)
    bad[0, 1] = 3.0  # break the circulant pattern
    bad[1, 0] = 3.0
    fake = SimpleNamespace(matrix=bad, point=None)
    rep = check_isometry(fake, samples=200, seed=0)
    assert rep.status == "fail"


# ---------------------------------------------------------------------------
# Parallel condition
# ---------------------------------------------------------------------------


def test_parallel_condition_curved_par(curved_par):
    rep = check_parallel_condition(curved_par, [0.3, -0.2, 0.1, 0.4])
    assert rep.status == "pass"
    assert max(rep.residuals.values()) <= 1e-15


def test_parallel_condition_constants(const_spec):
    rep = check_parallel_condition(const_spec, ORIGIN)
    assert rep.status == "pass"
    assert all(v == 0.0 for v in rep.residuals.values())


def test_parallel_condition_nonpar_residual(nonpar):
    rep = check_parallel_condition(nonpar, [1, 0, 0, 0])
    assert rep.status == "fail"
    assert abs(rep.residuals["A1-C3"] - 2.0) <= 1e-12


# ---------------------------------------------------------------------------
# Parallel equivalence over grids
# ---------------------------------------------------------------------------


def test_equivalence_curved_par_grid(curved_par):
    rep = check_parallel_equivalence(curved_par, curved_par.domain.grid(3))
    assert rep.status == "pass"
    rows = rep.payload["points"]
    assert all(r["gradient_holds"] and r["parallel_holds"] for r in rows)
    assert max(r["nabla_q_residual"] for r in rows) <= 1e-9


def test_equivalence_flat_par_grid(flat_par):
    rep = check_parallel_equivalence(flat_par, flat_par.domain.grid(3))
    assert rep.status == "pass"
    assert all(
        r["gradient_holds"] and r["parallel_holds"] for r in rep.payload["points"]
    )


def test_equivalence_nonpar_grid(nonpar):
    rep = check_parallel_equivalence(nonpar, nonpar.domain.grid(3))
    # Both predicates are false wherever x1 != 0, so they never disagree.
    assert rep.status == "pass"
    for row in rep.payload["points"]:
        if abs(row["point"][0]) > 0:
            assert not row["gradient_holds"] and not row["parallel_holds"]
        else:
            assert row["gradient_holds"] and row["parallel_holds"]


# ---------------------------------------------------------------------------
# Curvature identity and integrability
# ---------------------------------------------------------------------------


def test_curvature_identity_flat(const_spec):
    _, r = riemann_of(const_spec, ORIGIN)
    rep = check_curvature_q_identity(r)
    assert rep.status == "pass" and rep.residuals["max"] == 0.0


def test_curvature_identity_curved_par(curved_par):
    _, r = riemann_of(curved_par, ORIGIN)
    assert check_curvature_q_identity(r).status == "pass"


def test_curvature_identity_fails_on_nonpar(nonpar):
    _, r = riemann_of(nonpar, [1, 0, 0, 0])
    rep = check_curvature_q_identity(r)
    assert rep.status == "fail"
    assert rep.residuals["max"] > 1e-3


def test_integrability_curved_par(curved_par):
    _, r = riemann_of(curved_par, ORIGIN)
    rep = check_integrability(r)
    assert rep.status == "pass"
    assert rep.payload["alternate_raising_residual"] <= 1e-9


def test_integrability_residual_reported_on_nonpar(nonpar):
    _, r = riemann_of(nonpar, [1, 0, 0, 0])
    rep = check_integrability(r)
    assert "primary" in rep.residuals  # recorded either way


# ---------------------------------------------------------------------------
# Sectional relations
# ---------------------------------------------------------------------------


def test_sectional_relations_curved_par(curved_par):
    rng = np.random.default_rng(12)
    from circgeo.verify import sample_q_basis_vectors

    for x in sample_q_basis_vectors(rng, 10):
        rep = check_sectional_relations(curved_par, ORIGIN, x)
        assert rep.status == "pass"


def test_sectional_relations_flat(flat_par):
    rep = check_sectional_relations(flat_par, [0.1, 0.1, 0.1, 0.1], [1, 2, 3, 4])
    assert rep.status == "pass"


# ---------------------------------------------------------------------------
# Coefficient angles and the mu law
# ---------------------------------------------------------------------------


def test_coeff_angles_pinned():
    plain = coeff_angles(QBasisCoefficients(1, 0, 0, 0))
    assert (plain.cos_phi, plain.cos_theta) == (0.0, 0.0)
    degenerate = coeff_angles(QBasisCoefficients(0.5, 0.5, 0.5, 0.5))
    assert (degenerate.cos_phi, degenerate.cos_theta) == (1.0, 1.0)
    mixed = coeff_angles(QBasisCoefficients(0.8, 0.6, 0, 0))
    assert abs(mixed.cos_phi - 0.48) <= 1e-15
    assert mixed.cos_theta == 0.0


def test_coeff_angles_requires_unit_norm():
    with pytest.raises(ValueError):
        coeff_angles(QBasisCoefficients(1, 1, 0, 0))


def test_coeff_angles_cross_checked_against_metric_angle():
    m = MetricAtPoint.from_constants(4, 1, 2)
    x = find_orthogonal_q_basis(m, seed=2)
    u = 0.8 * x + 0.6 * q_apply(x, 1)
    assert abs(cos_angle(m, u, q_apply(u, 1)) - 0.48) <= 1e-12


@settings(max_examples=300, deadline=None)
@given(st.tuples(*[st.floats(-1, 1) for _ in range(4)]))
def test_expansion_bracket_equals_angle_factor(raw):
    # The quartic coefficient bracket collapses to (1 - cos theta)^2 at unit
    # norm: pure algebra, no geometry involved.
    v = np.asarray(raw)
    norm = float(np.linalg.norm(v))
    if norm < 1e-3:
        return
    a, b, g, d = (v / norm).tolist()
    bracket = (
        (a * a + g * g - 2 * b * d) ** 2
        + (b * b + d * d - 2 * g * a) ** 2
        + 2 * (a * a + g * g - 2 * b * d) * (b * b + d * d - 2 * g * a)
    )
    cos_theta = 2 * a * g + 2 * b * d
    assert abs(bracket - (1 - cos_theta) ** 2) <= 1e-12


def test_mu_law_identity_coefficients(curved_par):
    rep = check_mu_law(curved_par, ORIGIN, QBasisCoefficients(1, 0, 0, 0), seed=3)
    case = rep.payload["case"]
    assert rep.status == "pass"
    assert case["direct"] == pytest.approx(case["expansion_prediction"], abs=1e-15)
    assert case["direct"] == pytest.approx(case["angle_law_prediction"], abs=1e-15)


def test_mu_law_cos_theta_zero(curved_par):
    rep = check_mu_law(curved_par, ORIGIN, QBasisCoefficients(0.8, 0.6, 0, 0), seed=3)
    case = rep.payload["case"]
    assert rep.status == "pass"
    # cos theta = 0: the expansion predicts exactly the base plane value.
    assert case["cos_theta"] == 0.0
    assert case["expansion_prediction"] == pytest.approx(case["angle_law_prediction"], rel=1e-12)


def test_mu_law_adjudication_case(curved_par):
    # cos theta = 0.96 separates the two predictions by (1 - cos theta)^2;
    # the direct contraction sides with the coefficient expansion.
    rep = check_mu_law(curved_par, ORIGIN, QBasisCoefficients(0.8, 0, 0.6, 0), seed=3)
    case = rep.payload["case"]
    assert rep.status == "pass"
    assert abs(case["cos_theta"] - 0.96) <= 1e-12
    assert case["expansion_prediction"] == pytest.approx(
        0.0016 * case["angle_law_prediction"], rel=1e-9
    )
    assert case["direct"] == pytest.approx(case["expansion_prediction"], abs=1e-12)
    assert abs(case["ratio_direct_to_angle_law"] - (1 - 0.96) ** 2) <= 1e-9


# ---------------------------------------------------------------------------
# Suite assembly, gating, determinism
# ---------------------------------------------------------------------------


def test_suite_schema_and_gating_nonpar(nonpar):
    report = run_suite(nonpar, [[1, 0, 0, 0]], seed=5, mu_samples=5, sectional_samples=5)
    assert set(report.keys()) == {"spec", "convention", "checks"}
    by_name = {c["name"]: c for c in report["checks"]}
    assert set(by_name) == set(KNOWN_CHECKS)
    for entry in report["checks"]:
        assert set(entry.keys()) == {
            "name",
            "point",
            "residuals",
            "tolerance",
            "status",
            "payload",
        }
    assert by_name["isometry"]["status"] == "pass"
    assert by_name["parallel-condition"]["status"] == "fail"
    assert by_name["curvature-identity"]["status"] == "fail"
    assert by_name["integrability"]["status"] == "skipped"
    assert "primary" in by_name["integrability"]["residuals"]
    assert by_name["sectional-relations"]["status"] == "skipped"
    assert by_name["mu-law"]["status"] == "skipped"
    assert by_name["parallel-equivalence"]["status"] == "pass"


def test_suite_all_pass_on_curved_par(curved_par):
    report = run_suite(
        curved_par, [ORIGIN], seed=5, mu_samples=20, sectional_samples=10
    )
    statuses = {c["name"]: c["status"] for c in report["checks"]}
    assert all(s == "pass" for s in statuses.values()), statuses


def test_suite_deterministic(curved_par):
    kwargs = dict(seed=11, mu_samples=10, sectional_samples=5)
    a = report_to_json(run_suite(curved_par, [ORIGIN], **kwargs))
    b = report_to_json(run_suite(curved_par, [ORIGIN], **kwargs))
    assert a == b


def test_suite_tolerance_override(nonpar):
    report = run_suite(
        nonpar,
        [[1, 0, 0, 0]],
        checks=["parallel-condition"],
        tolerances={"parallel-condition": 10.0},
    )
    assert report["checks"][0]["status"] == "pass"


def test_suite_rejects_unknown_names(curved_par):
    with pytest.raises(ValueError):
        run_suite(curved_par, [ORIGIN], checks=["nope"])
    with pytest.raises(ValueError):
        run_suite(curved_par, [ORIGIN], tolerances={"nope": 1.0})


def test_checks_selection_subset(curved_par):
    report = run_suite(curved_par, [ORIGIN], checks=["isometry", "parallel-condition"])
    names = [c["name"] for c in report["checks"]]
    assert names == ["isometry", "parallel-condition"]


def test_parallel_grid_implies_identity_everywhere(const_spec, flat_par, curved_par):
    # Suite-level chain: wherever the gradient conditions hold across a grid,
    # the curvature shift identity must hold at every grid point.
    for spec in (const_spec, flat_par, curved_par):
        report = run_suite(
            spec,
            spec.domain.grid(3),
            checks=["parallel-condition", "curvature-identity"],
        )
        by_name = {}
        for check in report["checks"]:
            by_name.setdefault(check["name"], []).append(check["status"])
        assert all(s == "pass" for s in by_name["parallel-condition"])
        assert all(s == "pass" for s in by_name["curvature-identity"])


def test_expansion_bracket_identity_bulk():
    rng = np.random.default_rng(555)
    for _ in range(1000):
        v = rng.uniform(-1, 1, 4)
        norm = float(np.linalg.norm(v))
        if norm < 1e-3:
            continue
        a, b, g, d = (v / norm).tolist()
        first = a * a + g * g - 2 * b * d
        second = b * b + d * d - 2 * g * a
        bracket = first**2 + second**2 + 2 * first * second
        cos_theta = 2 * a * g + 2 * b * d
        assert abs(bracket - (1 - cos_theta) ** 2) <= 1e-12
