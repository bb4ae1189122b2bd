"""Circulant 4x4 metrics with the cyclic-shift structure.

The metric at a point is the circulant symmetric matrix built from three
scalar fields A, B, C in the pattern (A B C B / B A B C / C B A B / B C B A),
admissible when 0 < B < C < A.  The companion structure q is the constant
cyclic coordinate shift, which satisfies q^4 = id and is an isometry of every
metric of this shape.  This module builds metrics from a manifold spec,
tests admissibility, evaluates the closed-form inverse, measures inner
products and angles, classifies q-bases and finds orthogonal ones.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from pathlib import Path

import numpy as np

from .expr import FieldJet, ScalarField, as_point, parse

__all__ = [
    "AdmissibilityError",
    "BasisAngles",
    "Box",
    "InverseMetricAtPoint",
    "ManifoldSpec",
    "MetricAtPoint",
    "OutsideDomainError",
    "Q",
    "QBasisError",
    "SingularMetricError",
    "SolverError",
    "ZeroVectorError",
    "admissibility",
    "basis_angles",
    "circulant_matrix",
    "cos_angle",
    "find_orthogonal_q_basis",
    "induces_q_basis",
    "inner",
    "inverse_metric",
    "load_spec",
    "metric_at",
    "q_apply",
]


class AdmissibilityError(ValueError):
    """The ordering 0 < B < C < A fails at the requested point."""


class SingularMetricError(ValueError):
    """The closed-form inverse is undefined (determinant factor vanishes)."""


class OutsideDomainError(ValueError):
    """Point lies outside the spec's domain box."""


class ZeroVectorError(ValueError):
    """Angle of a vector with non-positive squared length."""


class QBasisError(ValueError):
    """Vector does not induce a q-basis."""


class SolverError(RuntimeError):
    """Orthogonal q-basis search exhausted its restarts."""

    def __init__(self, message: str, best_residual: float):
        super().__init__(message)
        self.best_residual = best_residual


# Entry pattern of the circulant metric: entry (i, j) depends on (j - i) mod 4.
_SHIFT = (np.arange(4)[None, :] - np.arange(4)[:, None]) % 4
MASK_A = (_SHIFT == 0).astype(float)
MASK_B = ((_SHIFT == 1) | (_SHIFT == 3)).astype(float)
MASK_C = (_SHIFT == 2).astype(float)
for _m in (MASK_A, MASK_B, MASK_C):
    _m.setflags(write=False)

# The cyclic shift: (q x)^s = x^(s+1 mod 4).
Q = np.roll(np.eye(4), 1, axis=1)
Q.setflags(write=False)


def circulant_matrix(a: float, b: float, c: float) -> np.ndarray:
    """Symmetric circulant matrix with first row (a, b, c, b)."""
    return a * MASK_A + b * MASK_B + c * MASK_C


def q_apply(x, k: int = 1) -> np.ndarray:
    """Apply the cyclic shift k times: (1,2,3,4) -> (2,3,4,1) for k=1."""
    return np.roll(np.asarray(x, dtype=float), -(k % 4))


# ---------------------------------------------------------------------------
# Manifold specs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Box:
    """Axis-aligned domain box in R^4."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = as_point(self.lo)
        hi = as_point(self.hi)
        if np.any(lo > hi):
            raise ValueError("box min exceeds max")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def contains(self, p, slack: float = 1e-12) -> bool:
        x = as_point(p)
        return bool(np.all(x >= self.lo - slack) and np.all(x <= self.hi + slack))

    def center(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    def grid(self, n: int) -> np.ndarray:
        """Cartesian product of n equispaced samples per axis, endpoints included."""
        if n < 1:
            raise ValueError("grid resolution must be >= 1")
        axes = [np.linspace(self.lo[i], self.hi[i], n) for i in range(4)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack(mesh, axis=-1).reshape(-1, 4)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size=(n, 4))


@dataclass(frozen=True)
class ManifoldSpec:
    """Named triple of scalar fields (A, B, C) plus a domain box."""

    name: str
    A: ScalarField
    B: ScalarField
    C: ScalarField
    domain: Box

    @classmethod
    def from_dict(cls, data: dict) -> "ManifoldSpec":
        try:
            name = str(data["name"])
            fields = {key: parse(str(data[key])) for key in ("A", "B", "C")}
            dom = data["domain"]
            box = Box(np.asarray(dom["min"], float), np.asarray(dom["max"], float))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed manifold spec: {exc}") from exc
        return cls(name, fields["A"], fields["B"], fields["C"], box)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "A": self.A.source,
            "B": self.B.source,
            "C": self.C.source,
            "domain": {"min": self.domain.lo.tolist(), "max": self.domain.hi.tolist()},
        }


def load_spec(path) -> ManifoldSpec:
    """Load a manifold spec from a JSON file."""
    return ManifoldSpec.from_dict(json.loads(Path(path).read_text()))


# ---------------------------------------------------------------------------
# Metric at a point
# ---------------------------------------------------------------------------


def admissibility(a: float, b: float, c: float) -> tuple[bool, tuple[float, float, float, float]]:
    """Ordering test 0 < b < c < a plus the four closed-form leading minors."""
    ordered = 0.0 < b < c < a
    minors = (
        a,
        (a - b) * (a + b),
        (a - c) * (a * (c + a) - 2.0 * b * b),
        (a - c) ** 2 * ((a + c) ** 2 - 4.0 * b * b),
    )
    return ordered, minors


@dataclass(frozen=True)
class MetricAtPoint:
    """Circulant metric realized at one point, with entry-wise jets.

    `d1[k, i, j]` holds the first partial of entry (i, j) along coordinate k,
    `d2[l, k, i, j]` the second partial along (l, k); both are assembled from
    the jets of A, B, C through the circulant entry pattern.
    """

    a: float
    b: float
    c: float
    jet_a: FieldJet
    jet_b: FieldJet
    jet_c: FieldJet
    point: np.ndarray | None = None

    @classmethod
    def from_constants(cls, a: float, b: float, c: float, check: bool = True) -> "MetricAtPoint":
        if check:
            ordered, _ = admissibility(a, b, c)
            if not ordered:
                raise AdmissibilityError(f"0 < B < C < A fails for ({a}, {b}, {c})")
        zero4, zero10 = np.zeros(4), np.zeros(10)
        return cls(
            float(a),
            float(b),
            float(c),
            FieldJet(float(a), zero4, zero10),
            FieldJet(float(b), zero4, zero10),
            FieldJet(float(c), zero4, zero10),
        )

    @cached_property
    def matrix(self) -> np.ndarray:
        return circulant_matrix(self.a, self.b, self.c)

    @cached_property
    def d1(self) -> np.ndarray:
        return (
            np.einsum("k,ij->kij", self.jet_a.grad, MASK_A)
            + np.einsum("k,ij->kij", self.jet_b.grad, MASK_B)
            + np.einsum("k,ij->kij", self.jet_c.grad, MASK_C)
        )

    @cached_property
    def d2(self) -> np.ndarray:
        return (
            np.einsum("lk,ij->lkij", self.jet_a.hess, MASK_A)
            + np.einsum("lk,ij->lkij", self.jet_b.hess, MASK_B)
            + np.einsum("lk,ij->lkij", self.jet_c.hess, MASK_C)
        )


def metric_at(spec: ManifoldSpec, p, check_domain: bool = True) -> MetricAtPoint:
    """Evaluate the circulant metric of a spec at a point.

    Raises OutsideDomainError when p leaves the domain box and
    AdmissibilityError when the ordering 0 < B < C < A fails there.
    """
    x = as_point(p)
    if check_domain and not spec.domain.contains(x):
        raise OutsideDomainError(
            f"point {x.tolist()} outside the domain box of spec '{spec.name}'"
        )
    ja, jb, jc = spec.A.jet(x), spec.B.jet(x), spec.C.jet(x)
    ordered, _ = admissibility(ja.value, jb.value, jc.value)
    if not ordered:
        raise AdmissibilityError(
            f"0 < B < C < A fails at {x.tolist()}: "
            f"A={ja.value}, B={jb.value}, C={jc.value}"
        )
    return MetricAtPoint(ja.value, jb.value, jc.value, ja, jb, jc, point=x)


@dataclass(frozen=True)
class InverseMetricAtPoint:
    """Closed-form inverse of a circulant metric.

    The inverse is circulant again, with first row (a_bar, b_bar, c_bar,
    b_bar) / d where a_bar = A(A+C) - 2B^2, b_bar = B(C-A),
    c_bar = 2B^2 - C(A+C) and d = (A-C)((A+C)^2 - 4B^2).
    """

    a_bar: float
    b_bar: float
    c_bar: float
    d: float

    @cached_property
    def matrix(self) -> np.ndarray:
        return circulant_matrix(self.a_bar, self.b_bar, self.c_bar) / self.d


def inverse_metric(m: MetricAtPoint) -> InverseMetricAtPoint:
    a, b, c = m.a, m.b, m.c
    d = (a - c) * ((a + c) ** 2 - 4.0 * b * b)
    if d == 0.0:
        raise SingularMetricError(
            f"inverse undefined for (A, B, C) = ({a}, {b}, {c}): determinant factor is zero"
        )
    return InverseMetricAtPoint(
        a * (a + c) - 2.0 * b * b,
        b * (c - a),
        2.0 * b * b - c * (a + c),
        d,
    )


# ---------------------------------------------------------------------------
# Inner products, angles, q-bases
# ---------------------------------------------------------------------------


def inner(m: MetricAtPoint, x, y) -> float:
    """Bilinear contraction g_ij x^i y^j."""
    return float(np.asarray(x, float) @ m.matrix @ np.asarray(y, float))


def _clamp_cosine(value: float) -> float:
    if abs(value) > 1.0:
        if abs(value) > 1.0 + 1e-12:
            raise ValueError(f"cosine {value} out of [-1, 1] beyond rounding")
        return math.copysign(1.0, value)
    return value


def cos_angle(m: MetricAtPoint, x, y) -> float:
    gxx = inner(m, x, x)
    gyy = inner(m, y, y)
    if gxx <= 0.0 or gyy <= 0.0:
        raise ZeroVectorError(
            f"cannot measure an angle with squared lengths {gxx}, {gyy}"
        )
    return _clamp_cosine(inner(m, x, y) / (math.sqrt(gxx) * math.sqrt(gyy)))


def induces_q_basis(x) -> tuple[bool, float]:
    """Whether {x, qx, q^2 x, q^3 x} spans, and the closed-form criterion value.

    The value equals det[x, qx, q^2 x, q^3 x]; the flag applies a scaled
    cutoff |value| > 1e-12 * |x|^4 since an exact float zero test is
    meaningless off the measure-zero degenerate set.
    """
    v = np.asarray(x, dtype=float)
    x1, x2, x3, x4 = v
    value = ((x1 - x3) ** 2 + (x2 - x4) ** 2) * ((x1 + x3) ** 2 - (x2 + x4) ** 2)
    norm4 = float(v @ v) ** 2
    return bool(abs(value) > 1e-12 * norm4), float(value)


@dataclass(frozen=True)
class BasisAngles:
    """Cosines of the two independent angles inside a q-basis."""

    cos_phi: float  # angle(x, qx)
    cos_theta: float  # angle(x, q^2 x)


_EQUAL_ANGLE_TOL = 1e-12


def basis_angles(m: MetricAtPoint, x) -> BasisAngles:
    """Angles of a q-basis; also enforces the angle symmetries of the shift.

    For any q-basis the four neighbour angles agree and the two diagonal
    angles agree (the shift is an isometry); additionally
    4 cos(phi) - cos(theta) < 3 must hold.  Violations beyond rounding raise.
    """
    flag, value = induces_q_basis(x)
    if not flag:
        raise QBasisError(f"{np.asarray(x).tolist()} does not induce a q-basis (criterion {value})")
    shifts = [q_apply(x, k) for k in range(4)]
    cosines = {
        (i, j): cos_angle(m, shifts[i], shifts[j])
        for i, j in combinations(range(4), 2)
    }
    ring = [cosines[0, 1], cosines[1, 2], cosines[2, 3], cosines[0, 3]]
    diag = [cosines[0, 2], cosines[1, 3]]
    if max(ring) - min(ring) > _EQUAL_ANGLE_TOL or abs(diag[0] - diag[1]) > _EQUAL_ANGLE_TOL:
        raise ValueError(
            f"q-basis angle symmetry violated beyond rounding: ring={ring}, diag={diag}"
        )
    cos_phi, cos_theta = ring[0], diag[0]
    if not 4.0 * cos_phi - cos_theta < 3.0:
        raise ValueError(
            f"q-basis angle inequality violated: 4*{cos_phi} - {cos_theta} >= 3"
        )
    return BasisAngles(cos_phi, cos_theta)


# ---------------------------------------------------------------------------
# Orthogonal q-basis search
# ---------------------------------------------------------------------------


def find_orthogonal_q_basis(
    m: MetricAtPoint,
    seed: int | np.random.Generator = 0,
    restarts: int = 32,
    tol: float = 1e-10,
) -> np.ndarray:
    """Find a unit vector x with g(x, qx) = g(x, q^2 x) = 0.

    Solves the three equations (unit norm plus the two orthogonality
    conditions) in four unknowns by damped Newton with least-squares steps,
    restarting from fresh random iterates up to `restarts` times.  On success
    all six pairwise inner products of {x, qx, q^2 x, q^3 x} are below `tol`
    and every shift has unit length.  Raises SolverError with the best
    residual seen if no restart converges.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    g = m.matrix
    gq = g @ Q
    gq2 = g @ (Q @ Q)
    sym0 = 2.0 * g
    sym1 = gq + gq.T
    sym2 = gq2 + gq2.T

    def residual_vec(x: np.ndarray) -> np.ndarray:
        return np.array([x @ g @ x - 1.0, x @ gq @ x, x @ gq2 @ x])

    best = math.inf
    for _ in range(restarts):
        x = rng.uniform(-1.0, 1.0, size=4)
        norm2 = x @ g @ x
        if norm2 <= 0.0:
            continue
        x = x / math.sqrt(norm2)
        for _ in range(80):
            f = residual_vec(x)
            fnorm = float(np.linalg.norm(f))
            if fnorm < 1e-14:
                break
            jac = np.vstack((sym0 @ x, sym1 @ x, sym2 @ x))
            step, *_ = np.linalg.lstsq(jac, -f, rcond=None)
            t = 1.0
            moved = False
            while t > 1e-6:
                candidate = x + t * step
                if np.linalg.norm(residual_vec(candidate)) < fnorm:
                    x = candidate
                    moved = True
                    break
                t *= 0.5
            if not moved:
                break
        norm2 = x @ g @ x
        if norm2 <= 0.0:
            continue
        x = x / math.sqrt(norm2)
        shifts = [q_apply(x, k) for k in range(4)]
        products = [
            abs(inner(m, shifts[i], shifts[j])) for i, j in combinations(range(4), 2)
        ]
        norm_err = max(abs(inner(m, s, s) - 1.0) for s in shifts)
        resid = max(products)
        best = min(best, resid)
        if induces_q_basis(x)[0] and resid <= tol and norm_err <= tol:
            return x
    raise SolverError(
        f"no orthogonal q-basis found in {restarts} restarts (best residual {best:.3e})",
        best,
    )
