"""Independent numerical oracles used by the test suite.

These deliberately avoid the analytic-jet code paths they are used to check:
derivatives come from central finite differences of plain field values, and
linear algebra facts come from numpy's generic routines.
"""

from __future__ import annotations

import numpy as np

from circgeo.core import MASK_A, MASK_B, MASK_C


def fd_jet(f, p, h_grad: float = 1e-5, h_hess: float = 1e-5):
    """Finite-difference gradient and Hessian of a scalar function on R^4."""
    p = np.asarray(p, float)
    grad = np.zeros(4)
    hess = np.zeros((4, 4))
    f0 = f(p)
    for i in range(4):
        e = np.zeros(4)
        e[i] = h_grad
        grad[i] = (f(p + e) - f(p - e)) / (2.0 * h_grad)
    for i in range(4):
        e = np.zeros(4)
        e[i] = h_hess
        hess[i, i] = (f(p + e) - 2.0 * f0 + f(p - e)) / h_hess**2
        for j in range(i + 1, 4):
            ei = np.zeros(4)
            ei[i] = h_hess
            ej = np.zeros(4)
            ej[j] = h_hess
            hess[i, j] = hess[j, i] = (
                f(p + ei + ej) - f(p + ei - ej) - f(p - ei + ej) + f(p - ei - ej)
            ) / (4.0 * h_hess**2)
    return grad, hess


def metric_values(spec, p) -> np.ndarray:
    """Assemble the metric matrix from plain field values (no jets)."""
    p = np.asarray(p, float)
    return (
        spec.A(p) * MASK_A + spec.B(p) * MASK_B + spec.C(p) * MASK_C
    )


def fd_christoffel(spec, p, h: float = 1e-5) -> np.ndarray:
    """Christoffel symbols from finite differences of the metric entries.

    Returns gamma[s, i, j]; uses numpy's generic inverse, so the whole path
    is independent of the closed-form inverse and of the jet machinery.
    """
    p = np.asarray(p, float)
    g = metric_values(spec, p)
    ginv = np.linalg.inv(g)
    dg = np.zeros((4, 4, 4))
    for k in range(4):
        e = np.zeros(4)
        e[k] = h
        dg[k] = (metric_values(spec, p + e) - metric_values(spec, p - e)) / (2.0 * h)
    t = np.einsum("iaj->aij", dg) + np.einsum("jai->aij", dg) - dg
    return 0.5 * np.einsum("as,aij->sij", ginv, t)


def fd_dgamma(spec, p, h: float = 1e-4) -> np.ndarray:
    """Finite differences of the analytic Christoffel symbols: dgamma[l, s, i, j]."""
    from circgeo.tensor import christoffel_at

    p = np.asarray(p, float)
    out = np.zeros((4, 4, 4, 4))
    for l in range(4):
        e = np.zeros(4)
        e[l] = h
        plus = christoffel_at(spec, p + e).gamma
        minus = christoffel_at(spec, p - e).gamma
        out[l] = (plus - minus) / (2.0 * h)
    return out


def leading_minors(matrix: np.ndarray) -> list[float]:
    """Leading principal minors via numpy's generic determinant."""
    return [float(np.linalg.det(matrix[: k + 1, : k + 1])) for k in range(4)]


def stacked_shift_det(x) -> float:
    """det of the matrix whose rows are x, qx, q^2 x, q^3 x (generic oracle)."""
    x = np.asarray(x, float)
    rows = np.array([np.roll(x, -k) for k in range(4)])
    return float(np.linalg.det(rows))
