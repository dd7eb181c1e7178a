"""Dense numerical kernel: rank decisions, range bases, point-to-subspace
distance, and the matrix exponential.

Everything downstream (feasibility tests, solvers, set functions) reduces to
these four primitives.  All rank and membership decisions are relative to a
:class:`Tolerance`, so callers control numerical strictness in one place.
Functions never modify their inputs and hold no state; concurrent use is safe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

# ||A @ A|| below this fraction of max(1, ||A||^2) counts as "squares to zero",
# switching mat_exp to the exact two-term form I + A t.
NILPOTENT_REL_TOL = 1e-12


@dataclass(frozen=True)
class Tolerance:
    """Relative thresholds for rank and membership decisions.

    rank_rel
        Singular values below ``rank_rel * sigma_max`` count as zero when
        computing numerical rank.  Relative thresholding keeps decisions
        invariant under rescaling of the data.
    feas_rel
        Residual threshold for subspace-membership tests: a vector ``w`` is
        accepted as a member when its squared distance to the subspace is at
        most ``feas_rel**2 * max(1, ||w||^2)``.
    """

    rank_rel: float = 1e-9
    feas_rel: float = 1e-9

    def __post_init__(self) -> None:
        for name in ("rank_rel", "feas_rel"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie strictly in (0, 1), got {value!r}")


DEFAULT_TOL = Tolerance()


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-d float array, rejecting NaN/Inf entries."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains non-finite entries")
    return M


def as_vector(v, name: str = "vector") -> np.ndarray:
    """Coerce to a 1-d float array, rejecting NaN/Inf entries."""
    v = np.asarray(v, dtype=float).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite entries")
    return v


def numerical_rank(M, tol: Tolerance = DEFAULT_TOL) -> int:
    """Number of singular values at or above ``rank_rel * sigma_max``."""
    M = as_matrix(M)
    if min(M.shape) == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] <= 0.0:
        return 0
    return int(np.sum(s >= tol.rank_rel * s[0]))


def range_basis(M, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis for the numerical column space of ``M``.

    Returns a matrix ``Q`` whose columns are orthonormal and span the columns
    of ``M`` up to the rank threshold.  A matrix with no columns, or with all
    entries zero, yields a basis with zero columns, representing the subspace
    ``{0}``.
    """
    M = as_matrix(M)
    rows = M.shape[0]
    if M.shape[1] == 0:
        return np.zeros((rows, 0))
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        return np.zeros((rows, 0))
    rank = int(np.sum(s >= tol.rank_rel * s[0]))
    return U[:, :rank]


def dist_sq_to_range(v, M, tol: Tolerance = DEFAULT_TOL) -> float:
    """Squared Euclidean distance from ``v`` to the column space of ``M``.

    Computed as ``||v - Q Q^T v||^2`` with ``Q = range_basis(M)``.  For a
    zero-column ``M`` the subspace is ``{0}`` and the result is ``||v||^2``.
    """
    v = as_vector(v)
    M = as_matrix(M)
    if M.shape[0] != v.shape[0]:
        raise ValueError(
            f"vector length {v.shape[0]} does not match matrix rows {M.shape[0]}"
        )
    Q = range_basis(M, tol)
    if Q.shape[1] == 0:
        return float(v @ v)
    r = v - Q @ (Q.T @ v)
    return float(r @ r)


def mat_exp(A, t: float = 1.0) -> np.ndarray:
    """Matrix exponential ``exp(A t)``.

    When ``A @ A`` vanishes (relative to ``max(1, ||A||^2)``) the power series
    truncates and ``I + A t`` is returned exactly; this removes quadrature and
    feasibility noise for the corner-stacked instances, which all square to
    zero.  Otherwise the computation is delegated to :func:`scipy.linalg.expm`
    (scaling and squaring).
    """
    A = as_matrix(A, name="A")
    n, m = A.shape
    if n != m:
        raise ValueError(f"matrix exponential needs a square matrix, got {A.shape}")
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    norm = float(np.linalg.norm(A))
    norm_sq_of_square = float(np.linalg.norm(A @ A))
    if norm_sq_of_square <= NILPOTENT_REL_TOL * max(1.0, norm * norm):
        return np.eye(n) + A * t
    return scipy.linalg.expm(A * t)
