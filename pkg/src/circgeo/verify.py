"""Quantified residual checks for circulant-metric manifolds.

Every theorem about the class is expressed here as a named check that
produces scaled residuals, a tolerance and a pass/fail/skipped verdict.
Residuals are reported as absolute values together with the scale used, and
the verdict compares residual/scale against the tolerance, with the scale
floored at 1 so that near-zero quantities do not inflate into false alarms.

Check names (also the names accepted by tolerance overrides):

  isometry              g(qx, qy) = g(x, y) on random vector pairs
  parallel-condition    the gradient conditions coupling grad A, grad B, grad C
  parallel-equivalence  gradient conditions hold iff nabla q = 0, per point
  curvature-identity    R(x, y, qz, qu) = R(x, y, z, u) on the coordinate basis
  integrability         q commutes with the mixed curvature contraction
  sectional-relations   equal ring curvatures, vanishing diagonal curvatures
  mu-law                R(u, qu, u, qu) against its closed-form predictions

Checks that presuppose the curvature identity are skipped, not failed, at
points where the identity itself does not hold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .core import (
    BasisAngles,
    ManifoldSpec,
    MetricAtPoint,
    Q,
    _clamp_cosine,
    find_orthogonal_q_basis,
    induces_q_basis,
    inverse_metric,
    metric_at,
    q_apply,
)
from .tensor import (
    RiemannAtPoint,
    christoffel_from_metric,
    nabla_q,
    riemann_from_christoffel,
    sectional_curvature,
)

__all__ = [
    "CheckReport",
    "DEFAULT_TOLERANCES",
    "KNOWN_CHECKS",
    "QBasisCoefficients",
    "check_curvature_q_identity",
    "check_integrability",
    "check_isometry",
    "check_mu_law",
    "check_parallel_condition",
    "check_parallel_equivalence",
    "check_sectional_relations",
    "coeff_angles",
    "convention_text",
    "report_to_json",
    "run_suite",
    "sample_q_basis_vectors",
]

KNOWN_CHECKS = (
    "isometry",
    "parallel-condition",
    "parallel-equivalence",
    "curvature-identity",
    "integrability",
    "sectional-relations",
    "mu-law",
)

DEFAULT_TOLERANCES = {
    "isometry": 1e-14,
    "parallel-condition": 1e-10,
    "parallel-equivalence": 0.0,
    "curvature-identity": 1e-9,
    "integrability": 1e-9,
    "sectional-relations": 1e-9,
    "mu-law": 1e-9,
    "nabla-q": 1e-9,
}


def convention_text() -> str:
    return (
        "R(x,y)z = nabla_x nabla_y z - nabla_y nabla_x z - nabla_[x,y] z; "
        "R(x,y,z,u) = g(R(x,y)z, u); lowering into the last slot: "
        "R_ijkl = g_al R^a_ijk; scaled residual = abs residual / max(1, scale)"
    )


@dataclass
class CheckReport:
    """One named check: absolute residuals, scales, tolerance and verdict."""

    name: str
    point: list | None
    residuals: dict[str, float]
    tolerance: float
    status: str
    payload: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "point": self.point,
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "tolerance": float(self.tolerance),
            "status": self.status,
            "payload": _jsonable(self.payload),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.bool_, bool)):  # before int: bool is an int subclass
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    return obj


def _verdict(entries: dict[str, tuple[float, float]], tolerance: float) -> str:
    for absval, scale in entries.values():
        if absval / max(1.0, scale) > tolerance:
            return "fail"
    return "pass"


def _make_report(
    name: str,
    point,
    entries: dict[str, tuple[float, float]],
    tolerance: float,
    payload: dict | None = None,
) -> CheckReport:
    payload = dict(payload or {})
    payload["scales"] = {k: float(s) for k, (_, s) in entries.items()}
    return CheckReport(
        name=name,
        point=None if point is None else [float(v) for v in np.asarray(point).ravel()],
        residuals={k: float(a) for k, (a, _) in entries.items()},
        tolerance=tolerance,
        status=_verdict(entries, tolerance),
        payload=payload,
    )


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_q_basis_vectors(rng: np.random.Generator, n: int) -> np.ndarray:
    """Vectors with components uniform in [-1, 1] that induce a q-basis."""
    out = np.empty((n, 4))
    count = 0
    while count < n:
        x = rng.uniform(-1.0, 1.0, size=4)
        if induces_q_basis(x)[0]:
            out[count] = x
            count += 1
    return out


@dataclass(frozen=True)
class QBasisCoefficients:
    """Components of a vector in an orthonormal q-basis; must be unit norm."""

    alpha: float
    beta: float
    gamma: float
    delta: float

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha, self.beta, self.gamma, self.delta])

    @classmethod
    def random_unit(cls, rng: np.random.Generator) -> "QBasisCoefficients":
        while True:
            v = rng.uniform(-1.0, 1.0, size=4)
            norm = float(np.linalg.norm(v))
            if norm > 1e-3:
                v = v / norm
                return cls(*[float(c) for c in v])


def coeff_angles(c: QBasisCoefficients) -> BasisAngles:
    """Basis angles of u = alpha x + beta qx + gamma q^2 x + delta q^3 x.

    Valid when {x, qx, q^2 x, q^3 x} is orthonormal:
    cos(phi) = alpha beta + alpha delta + beta gamma + delta gamma and
    cos(theta) = 2 alpha gamma + 2 beta delta.
    """
    v = c.as_array()
    norm2 = float(v @ v)
    if abs(norm2 - 1.0) > 1e-12:
        raise ValueError(f"coefficients must be unit norm, got |u|^2 = {norm2}")
    a, b, g, d = c.alpha, c.beta, c.gamma, c.delta
    cos_phi = a * b + a * d + b * g + d * g
    cos_theta = 2.0 * a * g + 2.0 * b * d
    return BasisAngles(_clamp_cosine(cos_phi), _clamp_cosine(cos_theta))


# ---------------------------------------------------------------------------
# Individual checks
# ---------------------------------------------------------------------------


def check_isometry(m: MetricAtPoint, samples: int = 1000, seed=0) -> CheckReport:
    """g(q^k x, q^k y) = g(x, y) for k = 1, 2, 3 over random vector pairs."""
    rng = _rng(seed)
    xs = rng.uniform(-1.0, 1.0, size=(samples, 4))
    ys = rng.uniform(-1.0, 1.0, size=(samples, 4))
    g = m.matrix
    base = np.einsum("ni,ij,nj->n", xs, g, ys)
    scale = max(1.0, float(np.max(np.abs(base))))
    entries = {}
    for k in (1, 2, 3):
        shifted = np.einsum(
            "ni,ij,nj->n", np.roll(xs, -k, axis=1), g, np.roll(ys, -k, axis=1)
        )
        entries[f"q{k}"] = (float(np.max(np.abs(shifted - base))), scale)
    return _make_report(
        "isometry",
        m.point,
        entries,
        DEFAULT_TOLERANCES["isometry"],
        {"samples": samples},
    )


_PARALLEL_LABELS = (
    "A1-C3",
    "A2-C4",
    "A3-C1",
    "A4-C2",
    "B1-B3",
    "B2-B4",
    "2B1-C2-C4",
    "2B2-C1-C3",
)


def _parallel_residuals(m: MetricAtPoint) -> tuple[dict[str, float], float]:
    ga, gb, gc = m.jet_a.grad, m.jet_b.grad, m.jet_c.grad
    values = (
        ga[0] - gc[2],
        ga[1] - gc[3],
        ga[2] - gc[0],
        ga[3] - gc[1],
        gb[0] - gb[2],
        gb[1] - gb[3],
        2.0 * gb[0] - gc[1] - gc[3],
        2.0 * gb[1] - gc[0] - gc[2],
    )
    scale = max(
        1.0,
        float(np.max(np.abs(ga))),
        float(np.max(np.abs(gb))),
        float(np.max(np.abs(gc))),
    )
    return dict(zip(_PARALLEL_LABELS, (abs(float(v)) for v in values))), scale


def check_parallel_condition(spec: ManifoldSpec, p, tolerance: float | None = None) -> CheckReport:
    """Gradient conditions tying grad A and grad B to shifted grad C.

    Componentwise: A_i = C_(i-2), B_1 = B_3, B_2 = B_4 and
    2 B_i = C_(i-1) + C_(i+1), indices cyclic.
    """
    m = metric_at(spec, p)
    residuals, scale = _parallel_residuals(m)
    entries = {k: (v, scale) for k, v in residuals.items()}
    return _make_report(
        "parallel-condition",
        m.point,
        entries,
        DEFAULT_TOLERANCES["parallel-condition"] if tolerance is None else tolerance,
        {
            "grad_A": m.jet_a.grad.tolist(),
            "grad_B": m.jet_b.grad.tolist(),
            "grad_C": m.jet_c.grad.tolist(),
        },
    )


def check_parallel_equivalence(
    spec: ManifoldSpec,
    points,
    f4_tol: float | None = None,
    nq_tol: float | None = None,
) -> CheckReport:
    """Per point: the gradient conditions hold iff nabla q vanishes.

    Both predicates are evaluated independently at every point; the check
    fails only if they ever disagree.  Points where both are false are
    consistent (the equivalence is two-sided).
    """
    f4_tol = DEFAULT_TOLERANCES["parallel-condition"] if f4_tol is None else f4_tol
    nq_tol = DEFAULT_TOLERANCES["nabla-q"] if nq_tol is None else nq_tol
    rows = []
    disagreements = 0
    for p in points:
        m = metric_at(spec, p)
        residuals, scale = _parallel_residuals(m)
        f4_scaled = max(residuals.values()) / max(1.0, scale)
        ch = christoffel_from_metric(m)
        nq = nabla_q(ch)
        nq_scaled = nq.max_abs / max(1.0, ch.max_abs)
        gradient_holds = f4_scaled <= f4_tol
        parallel_holds = nq_scaled <= nq_tol
        disagreements += int(gradient_holds != parallel_holds)
        rows.append(
            {
                "point": [float(v) for v in np.asarray(p).ravel()],
                "gradient_residual": float(max(residuals.values())),
                "gradient_residual_scaled": float(f4_scaled),
                "nabla_q_residual": float(nq.max_abs),
                "nabla_q_residual_scaled": float(nq_scaled),
                "gradient_holds": gradient_holds,
                "parallel_holds": parallel_holds,
            }
        )
    entries = {"disagreements": (float(disagreements), 1.0)}
    return _make_report(
        "parallel-equivalence",
        None,
        entries,
        DEFAULT_TOLERANCES["parallel-equivalence"],
        {"gradient_tolerance": f4_tol, "nabla_q_tolerance": nq_tol, "points": rows},
    )


def check_curvature_q_identity(r: RiemannAtPoint, tolerance: float | None = None) -> CheckReport:
    """R(e_i, e_j, q e_k, q e_l) = R(e_i, e_j, e_k, e_l), all 256 combinations.

    Multilinearity makes the coordinate basis sufficient.
    """
    shifted = np.einsum("ijab,ak,bl->ijkl", r.r_low, Q, Q)
    resid = float(np.max(np.abs(shifted - r.r_low)))
    entries = {"max": (resid, r.norm_inf)}
    return _make_report(
        "curvature-identity",
        r.metric.point,
        entries,
        DEFAULT_TOLERANCES["curvature-identity"] if tolerance is None else tolerance,
        {"riemann_norm_inf": r.norm_inf},
    )


def check_integrability(r: RiemannAtPoint, tolerance: float | None = None) -> CheckReport:
    """Shift/curvature commutation: q on the output slot equals q on the argument.

    Primary residual uses this package's (1,3) tensor, R^l_ijk with plane
    slots first.  Because the raised-slot placement is ambiguous in classical
    component notation, the alternate raising (first slot of the covariant
    tensor, plane slots last) is evaluated too and reported in the payload
    rather than silently chosen.
    """
    rm = r.r_mixed
    lhs = np.einsum("aijk,sa->sijk", rm, Q)
    rhs = np.einsum("sija,ak->sijk", rm, Q)
    scale = max(1.0, float(np.max(np.abs(rm))))
    resid = float(np.max(np.abs(lhs - rhs)))

    # Alternate raising: classical component order puts the plane slots last,
    # so lift the first slot of R_(ajkl) = r_low[k, l, a, j].
    ginv = inverse_metric(r.metric).matrix
    alt = np.einsum("ab,klbj->ajkl", ginv, r.r_low)
    lhs_alt = np.einsum("ajkl,sa->sjkl", alt, Q)
    rhs_alt = np.einsum("sakl,aj->sjkl", alt, Q)
    resid_alt = float(np.max(np.abs(lhs_alt - rhs_alt)))

    entries = {"primary": (resid, scale)}
    return _make_report(
        "integrability",
        r.metric.point,
        entries,
        DEFAULT_TOLERANCES["integrability"] if tolerance is None else tolerance,
        {"alternate_raising_residual": resid_alt},
    )


def _sectional_entries(
    m: MetricAtPoint, r: RiemannAtPoint, xs
) -> tuple[dict[str, tuple[float, float]], dict]:
    ring_spread = 0.0
    ring_scale = 1.0
    diag_a = 0.0
    diag_b = 0.0
    sample = None
    for x in xs:
        shifts = [q_apply(x, k) for k in range(4)]
        ring = [
            sectional_curvature(r, m, shifts[0], shifts[1]),
            sectional_curvature(r, m, shifts[1], shifts[2]),
            sectional_curvature(r, m, shifts[2], shifts[3]),
            sectional_curvature(r, m, shifts[3], shifts[0]),
        ]
        diag = [
            sectional_curvature(r, m, shifts[0], shifts[2]),
            sectional_curvature(r, m, shifts[1], shifts[3]),
        ]
        ring_spread = max(ring_spread, max(ring) - min(ring))
        ring_scale = max(ring_scale, max(abs(v) for v in ring))
        diag_a = max(diag_a, abs(diag[0]))
        diag_b = max(diag_b, abs(diag[1]))
        if sample is None:
            sample = {"ring": ring, "diagonal": diag}
    entries = {
        "ring_spread": (ring_spread, ring_scale),
        "mu_x_q2x": (diag_a, r.norm_inf),
        "mu_qx_q3x": (diag_b, r.norm_inf),
    }
    return entries, {"vectors": len(list(xs)), "first_vector_values": sample}


def check_sectional_relations(
    spec: ManifoldSpec, p, x, tolerance: float | None = None
) -> CheckReport:
    """Ring planes share one curvature; diagonal planes are flat.

    Presupposes the curvature identity at p (callers gate on it) and that x
    induces a q-basis.
    """
    m = metric_at(spec, p)
    r = riemann_from_christoffel(m, christoffel_from_metric(m))
    entries, payload = _sectional_entries(m, r, [np.asarray(x, float)])
    return _make_report(
        "sectional-relations",
        m.point,
        entries,
        DEFAULT_TOLERANCES["sectional-relations"] if tolerance is None else tolerance,
        payload,
    )


def _mu_law_case(
    m: MetricAtPoint, r: RiemannAtPoint, basis: np.ndarray, c: QBasisCoefficients
) -> dict:
    shifts = [q_apply(basis, k) for k in range(4)]
    u = (
        c.alpha * shifts[0]
        + c.beta * shifts[1]
        + c.gamma * shifts[2]
        + c.delta * shifts[3]
    )
    qu = q_apply(u, 1)
    direct = float(np.einsum("ijkl,i,j,k,l->", r.r_low, u, qu, u, qu))
    rho = float(np.einsum("ijkl,i,j,k,l->", r.r_low, shifts[0], shifts[1], shifts[0], shifts[1]))
    angles = coeff_angles(c)
    expansion = (1.0 - angles.cos_theta) ** 2 * rho
    angle_law = rho  # curvature of the u-plane rescaled by its own Gram factor
    return {
        "coefficients": [c.alpha, c.beta, c.gamma, c.delta],
        "cos_phi": angles.cos_phi,
        "cos_theta": angles.cos_theta,
        "direct": direct,
        "expansion_prediction": expansion,
        "angle_law_prediction": angle_law,
        "ratio_direct_to_angle_law": direct / angle_law if angle_law != 0.0 else math.nan,
        "q_basis": bool(induces_q_basis(u)[0]),
    }


def check_mu_law(
    spec: ManifoldSpec,
    p,
    c: QBasisCoefficients,
    basis: np.ndarray | None = None,
    seed=0,
    tolerance: float | None = None,
) -> CheckReport:
    """Compare R(u, qu, u, qu) against its two closed-form predictions.

    (i) the direct tensor contraction is ground truth; (ii) the coefficient
    expansion predicts (1 - cos theta)^2 R(x, qx, x, qx); (iii) the angle law
    mu(phi) = mu(pi/2) / (1 - cos^2 phi) predicts plain R(x, qx, x, qx) for
    the same contraction.  Pass/fail compares (i) with (ii) only; (iii) and
    the measured ratio are recorded as data because the two printed forms
    disagree whenever cos theta is nonzero, and the contraction adjudicates.
    """
    tolerance = DEFAULT_TOLERANCES["mu-law"] if tolerance is None else tolerance
    m = metric_at(spec, p)
    r = riemann_from_christoffel(m, christoffel_from_metric(m))
    if basis is None:
        basis = find_orthogonal_q_basis(m, seed=seed)
    case = _mu_law_case(m, r, basis, c)
    if not case["q_basis"]:
        report = _make_report("mu-law", m.point, {}, tolerance, {"case": case})
        report.status = "skipped"
        report.payload["reason"] = "u does not induce a q-basis"
        return report
    resid = abs(case["direct"] - case["expansion_prediction"])
    entries = {"expansion": (resid, r.norm_inf)}
    return _make_report(
        "mu-law", m.point, entries, tolerance, {"case": case, "basis": basis.tolist()}
    )


# ---------------------------------------------------------------------------
# Suite
# ---------------------------------------------------------------------------


def _skipped(name: str, point, tolerance: float, reason: str) -> CheckReport:
    return CheckReport(
        name=name,
        point=None if point is None else [float(v) for v in np.asarray(point).ravel()],
        residuals={},
        tolerance=tolerance,
        status="skipped",
        payload={"reason": reason},
    )


def run_suite(
    spec: ManifoldSpec,
    points,
    checks=None,
    seed: int = 0,
    tolerances: dict[str, float] | None = None,
    isometry_samples: int = 1000,
    sectional_samples: int = 50,
    mu_samples: int = 100,
) -> dict:
    """Run the selected checks over the given points and assemble a report.

    The report is a plain dict matching the JSON schema: spec name, the
    convention header, and one entry per (check, point) in canonical order.
    Identical spec, points and seed always produce an identical report.
    """
    selected = list(KNOWN_CHECKS) if checks is None else list(checks)
    for name in selected:
        if name not in KNOWN_CHECKS:
            raise ValueError(f"unknown check {name!r}; known: {', '.join(KNOWN_CHECKS)}")
    tols = dict(DEFAULT_TOLERANCES)
    for name, value in (tolerances or {}).items():
        if name not in tols:
            raise ValueError(f"unknown tolerance name {name!r}")
        tols[name] = float(value)

    reports: list[CheckReport] = []
    point_list = [np.asarray(p, float) for p in points]
    for idx, p in enumerate(point_list):
        m = metric_at(spec, p)
        ch = christoffel_from_metric(m)
        r = riemann_from_christoffel(m, ch)
        residuals, scale = _parallel_residuals(m)
        parallel_holds = (
            max(residuals.values()) / max(1.0, scale) <= tols["parallel-condition"]
            and nabla_q(ch).max_abs / max(1.0, ch.max_abs) <= tols["nabla-q"]
        )

        if "isometry" in selected:
            rep = check_isometry(m, samples=isometry_samples, seed=[seed, idx, 0])
            rep.tolerance = tols["isometry"]
            rep.status = _verdict(
                {k: (v, rep.payload["scales"][k]) for k, v in rep.residuals.items()},
                rep.tolerance,
            )
            reports.append(rep)

        if "parallel-condition" in selected:
            reports.append(check_parallel_condition(spec, p, tolerance=tols["parallel-condition"]))

        identity_rep = check_curvature_q_identity(r, tolerance=tols["curvature-identity"])
        identity_holds = identity_rep.passed
        if "curvature-identity" in selected:
            reports.append(identity_rep)

        if "integrability" in selected:
            rep = check_integrability(r, tolerance=tols["integrability"])
            if not parallel_holds:
                rep.payload["reason"] = (
                    "nabla q does not vanish here; residual recorded without a pass expectation"
                )
                rep.status = "skipped"
            reports.append(rep)

        if "sectional-relations" in selected:
            if identity_holds:
                rng = _rng([seed, idx, 1])
                xs = sample_q_basis_vectors(rng, sectional_samples)
                entries, payload = _sectional_entries(m, r, xs)
                reports.append(
                    _make_report(
                        "sectional-relations",
                        m.point,
                        entries,
                        tols["sectional-relations"],
                        payload,
                    )
                )
            else:
                reports.append(
                    _skipped(
                        "sectional-relations",
                        m.point,
                        tols["sectional-relations"],
                        "curvature identity does not hold at this point",
                    )
                )

        if "mu-law" in selected:
            if identity_holds:
                basis = find_orthogonal_q_basis(m, seed=[seed, idx, 2])
                rng = _rng([seed, idx, 3])
                cases = []
                worst = 0.0
                for _ in range(mu_samples):
                    c = QBasisCoefficients.random_unit(rng)
                    case = _mu_law_case(m, r, basis, c)
                    cases.append(case)
                    if case["q_basis"]:
                        worst = max(
                            worst, abs(case["direct"] - case["expansion_prediction"])
                        )
                entries = {"expansion_max": (worst, r.norm_inf)}
                reports.append(
                    _make_report(
                        "mu-law",
                        m.point,
                        entries,
                        tols["mu-law"],
                        {"basis": basis.tolist(), "cases": cases},
                    )
                )
            else:
                reports.append(
                    _skipped(
                        "mu-law",
                        m.point,
                        tols["mu-law"],
                        "curvature identity does not hold at this point",
                    )
                )

    if "parallel-equivalence" in selected and point_list:
        reports.append(
            check_parallel_equivalence(
                spec,
                point_list,
                f4_tol=tols["parallel-condition"],
                nq_tol=tols["nabla-q"],
            )
        )

    return {
        "spec": spec.name,
        "convention": convention_text(),
        "checks": [rep.to_dict() for rep in reports],
    }


def report_to_json(report: dict) -> str:
    import json

    return json.dumps(report, indent=2, sort_keys=True) + "\n"
