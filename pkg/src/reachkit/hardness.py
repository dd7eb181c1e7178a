"""Reduction machinery between sparse variable selection and minimal
reachability.

A variable-selection instance ``(U, z = all-ones, delta)`` maps to a
reachability instance whose dynamics matrix carries ``d`` vertically stacked
copies of ``U`` in its top-right corner and is zero elsewhere.  Sizing the
matrix as ``n = max(m, l) * (d + 1)`` makes it square to zero exactly, so the
reachable set of any node choice stabilizes after the first power.

Solutions translate both ways:

* forward: a sparse ``y`` with ``U y = 1`` becomes the node set obtained by
  shifting its support into the last ``l`` coordinates
  (:func:`forward_map`), feasible with the same cardinality;
* backward: from any feasible node set ``S`` with fewer than ``d`` members
  among the stacked rows, a pigeonhole argument yields a full block of ``m``
  consecutive target rows untouched by ``S``
  (:func:`find_disjoint_block`), and a least-squares fit of those rows over
  the actuated columns of ``U`` recovers a variable-selection solution no
  denser than ``S`` (:func:`extract_solution`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import ReductionIntegrityError
from .linalg import DEFAULT_TOL, Tolerance, as_matrix, as_vector
from .solvers import VarSelInstance
from .system import LinearSystem, check_node_set, is_feasible


@dataclass(frozen=True)
class ReductionDims:
    """Bookkeeping for one generated instance: source shape ``m x l``, stack
    count ``d``, system size ``n = max(m, l) * (d + 1)``."""

    m: int
    l: int
    d: int
    n: int


@dataclass(frozen=True)
class HardInstance:
    """A generated reachability instance bundled with its source
    variable-selection instance and index bookkeeping."""

    sys: LinearSystem
    source: VarSelInstance
    dims: ReductionDims


@dataclass(frozen=True)
class BlockSelection:
    """A length-``m`` run of target rows disjoint from the actuated set:
    rows ``block_index * m + 1 .. block_index * m + m``."""

    block_index: int
    indices: tuple[int, ...]


def stacked_corner(M, n: int, d: int) -> np.ndarray:
    """n x n matrix with ``d`` vertical copies of ``M`` in the top-right
    corner and zeros elsewhere.

    Requires ``n >= max(m, l) * d`` so the copies fit; once
    ``n >= max(m, l) * (d + 1)`` the result squares to zero exactly (the
    nonzero rows and nonzero columns no longer overlap).
    """
    M = as_matrix(M, name="M")
    m, l = M.shape
    n = int(n)
    d = int(d)
    if d < 1:
        raise ValueError(f"stack count d must be at least 1, got {d}")
    if n < max(m, l) * d:
        raise ValueError(
            f"n={n} is too small to stack a {m}x{l} block {d} times "
            f"(need n >= {max(m, l) * d})"
        )
    out = np.zeros((n, n))
    for j in range(d):
        out[j * m : (j + 1) * m, n - l :] = M
    return out


def generate(U, d: int, delta: float = 0.0) -> HardInstance:
    """Build the reachability instance encoding variable selection on ``U``.

    The system is ``n = max(m, l) * (d + 1)`` dimensional with the stacked
    matrix as dynamics, identity input matrix, zero start state, and a target
    of ``m * d`` ones followed by zeros.  Times are fixed at ``t0=0, t1=1``:
    the start state is the origin, so the drift term vanishes and the times
    never matter.  ``d`` is a free parameter; choosing it above the expected
    optimal sparsity keeps solution extraction in the pigeonhole regime.
    """
    U = as_matrix(U, name="U")
    d = int(d)
    if d < 1:
        raise ValueError(f"stack count d must be at least 1, got {d}")
    m, l = U.shape
    n = max(m, l) * (d + 1)
    A = stacked_corner(U, n, d)
    x1 = np.zeros(n)
    x1[: m * d] = 1.0
    sys = LinearSystem(A=A, B=np.eye(n), t0=0.0, t1=1.0, x0=np.zeros(n), x1=x1)
    source = VarSelInstance(U=U, z=np.ones(m), delta=float(delta))
    return HardInstance(sys=sys, source=source, dims=ReductionDims(m=m, l=l, d=d, n=n))


def forward_map(
    inst: HardInstance,
    y,
    support: Iterable[int] | None = None,
    tol: Tolerance = DEFAULT_TOL,
) -> tuple[int, ...]:
    """Map a variable-selection solution to an actuated node set.

    ``y`` must satisfy ``U y = all-ones`` up to the feasibility tolerance;
    its support (1-based column indices, derived from ``y`` when not given)
    shifts by ``n - l`` into node indices.  The resulting set is feasible
    with cardinality ``||y||_0`` by construction, and that is asserted here:
    a failure raises :class:`ReductionIntegrityError` because it means the
    kernel, not the caller, is wrong.
    """
    m, l, _, n = inst.dims.m, inst.dims.l, inst.dims.d, inst.dims.n
    y = as_vector(y, name="y")
    if y.shape[0] != l:
        raise ValueError(f"y must have length {l}, got {y.shape[0]}")
    nonzero = tuple(int(k) + 1 for k in np.nonzero(y)[0])
    if support is None:
        support = nonzero
    else:
        support = tuple(sorted({int(k) for k in support}))
        if support != nonzero:
            raise ValueError(
                f"declared support {support} does not match the nonzero "
                f"entries of y {nonzero}"
            )
    fit = float(np.linalg.norm(inst.source.U @ y - inst.source.z))
    if fit > tol.feas_rel * max(1.0, np.sqrt(m)):
        raise ValueError(
            f"y does not solve the source system: ||U y - z|| = {fit:.3e}"
        )
    nodes = tuple(k + n - l for k in support)
    verdict = is_feasible(inst.sys, nodes, tol)
    if not verdict.feasible:
        raise ReductionIntegrityError(
            "forward-mapped node set is infeasible "
            f"(residual_sq={verdict.residual_sq:.3e}); this indicates a kernel bug"
        )
    return nodes


def find_disjoint_block(S: Iterable[int], m: int, d: int) -> BlockSelection:
    """Smallest-index length-``m`` block of ``{1..m*d}`` disjoint from ``S``.

    The blocks partition the first ``m*d`` indices into ``d`` runs, so a
    disjoint one is guaranteed whenever ``S`` hits fewer than ``d`` of them
    (in particular whenever ``|S| < d``).
    """
    m = int(m)
    d = int(d)
    if m < 1 or d < 1:
        raise ValueError("block width m and block count d must be positive")
    hit = {int(i) for i in S}
    for kappa in range(d):
        block = tuple(range(kappa * m + 1, kappa * m + m + 1))
        if hit.isdisjoint(block):
            return BlockSelection(block_index=kappa, indices=block)
    raise ValueError(
        f"every length-{m} block of 1..{m * d} intersects the actuated set; "
        f"need fewer than {d} actuated nodes among the stacked rows"
    )


@dataclass(frozen=True)
class ExtractionResult:
    """Recovered variable-selection solution and its least-squares residual
    against the extracted target rows."""

    y: np.ndarray
    residual_sq: float


def extract_solution(
    inst: HardInstance,
    S: Iterable[int],
    xhat1,
    tol: Tolerance = DEFAULT_TOL,
) -> ExtractionResult:
    """Recover a variable-selection solution from a feasible node set.

    Picks a block of ``m`` consecutive target rows disjoint from ``S``,
    extracts those rows of the (approximately) reached state ``xhat1``, and
    least-squares fits them over the columns of ``U`` whose shifted indices
    appear in ``S``.  Members of ``S`` outside the last ``l`` coordinates
    contribute nothing to those rows and are ignored.  The recovered ``y``
    has at most ``|S|`` nonzeros; when ``xhat1`` is reachable under ``S`` the
    fit is exact up to float noise, so its residual against the all-ones
    vector is bounded by how far ``xhat1`` strays from the true target.  If
    ``S`` actuates no columns of ``U``, the fit is over the empty span and
    the full target norm is reported as residual rather than raising.
    """
    m, l, d, n = inst.dims.m, inst.dims.l, inst.dims.d, inst.dims.n
    nodes = check_node_set(S, n)
    xhat1 = as_vector(xhat1, name="xhat1")
    if xhat1.shape[0] != n:
        raise ValueError(f"xhat1 must have length {n}, got {xhat1.shape[0]}")
    block = find_disjoint_block(nodes, m, d)
    target = xhat1[[i - 1 for i in block.indices]]
    col_ids = [s - (n - l) for s in nodes if s > n - l]
    y = np.zeros(l)
    if col_ids:
        cols = inst.source.U[:, [k - 1 for k in col_ids]]
        coef, *_ = np.linalg.lstsq(cols, target, rcond=None)
        for k, c in zip(col_ids, coef):
            y[k - 1] = c
    residual = inst.source.U @ y - target
    return ExtractionResult(y=y, residual_sq=float(residual @ residual))
