"""Connection and curvature of a circulant metric, computed from jets.

All derivatives come analytically from the second-order jets of A, B, C;
finite differences are never used here (they live in the test suite as an
independent oracle).

Conventions, fixed once for the whole package:

  * Christoffel symbols: 2 Gamma^s_ij = g^{as} (d_i g_aj + d_j g_ai - d_a g_ij).
  * Curvature sign: R(x, y) z = nabla_x nabla_y z - nabla_y nabla_x z
    - nabla_[x,y] z, so in coordinates
    R^l_ijk = d_i Gamma^l_jk - d_j Gamma^l_ik
              + Gamma^l_ia Gamma^a_jk - Gamma^l_ja Gamma^a_ik.
  * Index lowering uses the last slot: R_ijkl = g_al R^a_ijk, which makes
    R_ijkl = g(R(e_i, e_j) e_k, e_l).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import ManifoldSpec, MetricAtPoint, Q, inner, inverse_metric, metric_at

__all__ = [
    "ChristoffelAtPoint",
    "DegeneratePlaneError",
    "NablaQ",
    "RiemannAtPoint",
    "christoffel_at",
    "christoffel_from_metric",
    "metric_compatibility_residual",
    "nabla_q",
    "riemann_at",
    "riemann_from_christoffel",
    "sectional_curvature",
]


class DegeneratePlaneError(ValueError):
    """The two vectors do not span a 2-plane."""


@dataclass(frozen=True)
class ChristoffelAtPoint:
    """Gamma^s_ij (symmetric in i, j) and its analytic derivatives.

    `gamma[s, i, j]` is Gamma^s_ij; `dgamma[l, s, i, j]` is d_l Gamma^s_ij,
    computed with d_l g^{as} = -g^{ab} (d_l g_bc) g^{cs} and the entry
    Hessians, never by differencing.
    """

    gamma: np.ndarray
    dgamma: np.ndarray

    @cached_property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.gamma)))


def christoffel_from_metric(m: MetricAtPoint) -> ChristoffelAtPoint:
    ginv = inverse_metric(m).matrix
    dg = m.d1
    ddg = m.d2
    # T[a, i, j] = d_i g_aj + d_j g_ai - d_a g_ij  (symmetric in i, j)
    t = np.einsum("iaj->aij", dg) + np.einsum("jai->aij", dg) - dg
    gamma = 0.5 * np.einsum("as,aij->sij", ginv, t)
    dginv = -np.einsum("ab,lbc,cs->las", ginv, dg, ginv)
    dt = np.einsum("liaj->laij", ddg) + np.einsum("ljai->laij", ddg) - ddg
    dgamma = 0.5 * (
        np.einsum("las,aij->lsij", dginv, t) + np.einsum("as,laij->lsij", ginv, dt)
    )
    return ChristoffelAtPoint(gamma, dgamma)


def christoffel_at(spec: ManifoldSpec, p) -> ChristoffelAtPoint:
    """Christoffel symbols of the spec's metric at a point."""
    return christoffel_from_metric(metric_at(spec, p))


@dataclass(frozen=True)
class RiemannAtPoint:
    """Curvature tensors at a point, in (1,3) and (0,4) form.

    `r_mixed[l, i, j, k]` is R^l_ijk with (i, j) the plane slots and k the
    argument; `r_low[i, j, k, l]` is the fully covariant tensor with the
    upper index lowered into the last slot.
    """

    r_mixed: np.ndarray
    r_low: np.ndarray
    metric: MetricAtPoint

    @cached_property
    def norm_inf(self) -> float:
        return float(np.max(np.abs(self.r_low)))


def riemann_from_christoffel(m: MetricAtPoint, ch: ChristoffelAtPoint) -> RiemannAtPoint:
    gamma, dgamma = ch.gamma, ch.dgamma
    r_mixed = (
        np.einsum("iljk->lijk", dgamma)
        - np.einsum("jlik->lijk", dgamma)
        + np.einsum("lia,ajk->lijk", gamma, gamma)
        - np.einsum("lja,aik->lijk", gamma, gamma)
    )
    r_low = np.einsum("al,aijk->ijkl", m.matrix, r_mixed)
    return RiemannAtPoint(r_mixed, r_low, m)


def riemann_at(spec: ManifoldSpec, p) -> RiemannAtPoint:
    """Riemann curvature of the spec's metric at a point."""
    m = metric_at(spec, p)
    return riemann_from_christoffel(m, christoffel_from_metric(m))


def sectional_curvature(r: RiemannAtPoint, m: MetricAtPoint, x, y) -> float:
    """Sectional curvature R(x,y,x,y) / (g(x,x) g(y,y) - g(x,y)^2)."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    gram = inner(m, x, x) * inner(m, y, y) - inner(m, x, y) ** 2
    scale = float(x @ x) * float(y @ y)
    if gram <= 1e-12 * scale:
        raise DegeneratePlaneError(
            f"vectors span no 2-plane (Gram determinant {gram:.3e})"
        )
    numerator = float(np.einsum("ijkl,i,j,k,l->", r.r_low, x, y, x, y))
    return numerator / gram


@dataclass(frozen=True)
class NablaQ:
    """Covariant derivative of the shift structure.

    `components[i, s, j]` holds Gamma^s_ik q^k_j - Gamma^k_ij q^s_k (the
    partial-derivative term drops since q is constant).  Its vanishing is a
    check on the metric, not an invariant of the type.
    """

    components: np.ndarray

    @cached_property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.components)))


def nabla_q(ch: ChristoffelAtPoint) -> NablaQ:
    comp = np.einsum("sik,kj->isj", ch.gamma, Q) - np.einsum(
        "kij,sk->isj", ch.gamma, Q
    )
    return NablaQ(comp)


def metric_compatibility_residual(m: MetricAtPoint, ch: ChristoffelAtPoint) -> float:
    """Max abs entry of d_k g_ij - Gamma^a_ki g_aj - Gamma^a_kj g_ia."""
    g = m.matrix
    resid = (
        m.d1
        - np.einsum("aki,aj->kij", ch.gamma, g)
        - np.einsum("akj,ia->kij", ch.gamma, g)
    )
    return float(np.max(np.abs(resid)))
