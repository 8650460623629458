"""Small dense linear algebra with explicit sup-norm bounds.

The equilibrium theory leans on two elementary matrix facts: a Neumann
perturbation bound for the inverse, and the classical bound
||M^{-1}||_inf <= 1/eps for strictly diagonally dominant M with
positive diagonal and row gap eps.  They are exposed here as testable
utilities alongside a pivot-checked linear solve.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import SingularJacobianError

PIVOT_RTOL = 1e-13
SOLVE_RESIDUAL_RTOL = 1e-10


def inf_op_norm(mat) -> float:
    """Operator norm induced by the sup-norm: max row 1-norm."""
    mat = np.asarray(mat, dtype=float)
    return float(np.abs(mat).sum(axis=-1).max())


def solve_linear(mat, b):
    """Solve mat @ x = b by LU with partial pivoting.

    Raises :class:`SingularJacobianError` when a pivot is below
    ``PIVOT_RTOL`` relative to the largest entry of the matrix.
    """
    mat = np.asarray(mat, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = np.abs(mat).max()
    if scale == 0.0:
        raise SingularJacobianError("zero matrix")
    lu, piv = lu_factor(mat)
    pivots = np.abs(np.diag(lu))
    if pivots.min() <= PIVOT_RTOL * scale:
        raise SingularJacobianError(
            "matrix numerically singular (pivot ratio %g)" % (pivots.min() / scale)
        )
    x = lu_solve((lu, piv), b)
    resid = np.abs(mat @ x - b).max()
    if resid > SOLVE_RESIDUAL_RTOL * (1.0 + np.abs(b).max()):
        raise SingularJacobianError("linear solve residual %g too large" % resid)
    return x


def perturbed_inverse_bound(s_mat, t_mat, eps: float):
    """Neumann-series stability of the inverse.

    If ||S - T|| <= eps * ||S^{-1}||^{-1} with eps in (0, 1), then T is
    invertible and ||S^{-1} - T^{-1}|| <= eps/(1-eps) * ||S^{-1}||.
    Returns ``(holds, bound)``: ``holds`` is False when the hypothesis
    fails, otherwise the inequality is verified numerically and the
    bound returned.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    s_mat = np.asarray(s_mat, dtype=float)
    t_mat = np.asarray(t_mat, dtype=float)
    s_inv = np.linalg.inv(s_mat)
    norm_s_inv = inf_op_norm(s_inv)
    if inf_op_norm(s_mat - t_mat) > eps / norm_s_inv:
        return False, np.nan
    bound = eps / (1.0 - eps) * norm_s_inv
    t_inv = np.linalg.inv(t_mat)
    diff = inf_op_norm(s_inv - t_inv)
    if diff > bound * (1.0 + 1e-12):
        raise AssertionError(
            "perturbation bound violated: %g > %g (this is a theorem; "
            "a violation is a bug)" % (diff, bound)
        )
    return True, float(bound)


def diag_dominant_inverse_bound(mat, eps: float):
    """Inverse bound for strict diagonal dominance.

    If m_ii - sum_{j != i} |m_ij| >= eps > 0 and m_ii > 0 for all i,
    then M is invertible with ||M^{-1}||_inf <= 1/eps.  Returns whether
    the hypothesis holds; when it does, the conclusion is verified
    numerically.
    """
    if not eps > 0.0:
        raise ValueError("eps must be positive")
    mat = np.asarray(mat, dtype=float)
    diag = np.diag(mat)
    off = np.abs(mat).sum(axis=1) - np.abs(diag)
    if np.any(diag <= 0.0) or np.any(diag - off < eps * (1.0 - 1e-15)):
        return False
    inv_norm = inf_op_norm(np.linalg.inv(mat))
    if inv_norm > (1.0 / eps) * (1.0 + 1e-12):
        raise AssertionError(
            "diagonal dominance bound violated: %g > %g (this is a "
            "theorem; a violation is a bug)" % (inv_norm, 1.0 / eps)
        )
    return True
