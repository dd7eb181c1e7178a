"""Exact and greedy actuator-selection solvers, plus the brute-force sparse
variable-selection solver they reduce to.

The exact solver enumerates node subsets by increasing cardinality and
returns the lexicographically first feasible set, so its answer has provably
minimal size.  The greedy solver adds one node at a time, always the node
whose addition shrinks the residual most; because the underlying
distance-to-subspace objective is not supermodular, greedy can stall or
overshoot the optimum, and its result is reported honestly (it may be
infeasible, and its ``optimal`` flag is always False).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import CapacityError, InfeasibleError
from .linalg import DEFAULT_TOL, Tolerance, as_matrix, as_vector, dist_sq_to_range
from .system import LinearSystem, reachability_matrix, transfer_offset

# Exact enumeration beyond this many nodes needs an explicit cardinality budget.
DEFAULT_EXACT_CAP = 20

# Default support-enumeration cap for the variable-selection solver.
DEFAULT_VARSEL_CAP = 20

# A greedy step must shrink the residual by more than this to count as progress.
GREEDY_IMPROVEMENT_EPS = 1e-12


@dataclass(frozen=True)
class SolveResult:
    """Outcome of a solver run.

    ``nodes`` is the selected actuated node set (1-based, sorted).
    ``optimal`` is True only for the exact solver, whose enumeration order
    proves minimal cardinality.  ``feasible`` records whether the returned set
    actually achieves the transfer; the greedy solver may terminate without
    reaching feasibility.  ``nodes_explored`` counts candidate evaluations.
    """

    nodes: tuple[int, ...]
    cardinality: int
    residual_sq: float
    feasible: bool
    optimal: bool
    nodes_explored: int


@dataclass(frozen=True)
class VarSelInstance:
    """Sparse variable selection data: minimize ``||y||_0`` subject to
    ``||U y - z|| <= delta``."""

    U: np.ndarray
    z: np.ndarray
    delta: float

    def __post_init__(self) -> None:
        U = as_matrix(self.U, name="U")
        z = as_vector(self.z, name="z")
        if U.shape[0] != z.shape[0]:
            raise ValueError(f"U has {U.shape[0]} rows but z has length {z.shape[0]}")
        delta = float(self.delta)
        if not (np.isfinite(delta) and delta >= 0.0):
            raise ValueError(f"delta must be a nonnegative real, got {self.delta!r}")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "delta", delta)


@dataclass(frozen=True)
class VarSelResult:
    y: np.ndarray
    support: tuple[int, ...]
    norm0: int
    residual: float


def _residual_sq(sys: LinearSystem, S, w: np.ndarray, tol: Tolerance) -> float:
    R = reachability_matrix(sys, S, tol=tol)
    return dist_sq_to_range(w, R, tol)


def exact_min_reach(
    sys: LinearSystem,
    tol: Tolerance = DEFAULT_TOL,
    budget: int | None = None,
    cap: int = DEFAULT_EXACT_CAP,
) -> SolveResult:
    """Minimum-cardinality actuated node set by cardinality-ordered
    enumeration.

    Subsets are scanned by increasing size and lexicographically within each
    size, so the first feasible set found has minimal cardinality and is the
    lexicographically least witness of it.  Systems with more than ``cap``
    nodes are refused unless ``budget`` bounds the cardinality to search;
    exhausting the budget raises :class:`InfeasibleError`.
    """
    n = sys.n
    if budget is None and n > cap:
        raise CapacityError(
            f"exact enumeration over {n} nodes exceeds the cap of {cap}; "
            "pass a cardinality budget to proceed"
        )
    kmax = n if budget is None else min(int(budget), n)
    if kmax < 0:
        raise ValueError("budget must be nonnegative")
    w = transfer_offset(sys)
    bound = tol.feas_rel**2 * max(1.0, float(w @ w))
    explored = 0
    for k in range(kmax + 1):
        for S in combinations(range(1, n + 1), k):
            explored += 1
            r = _residual_sq(sys, S, w, tol)
            if r <= bound:
                return SolveResult(
                    nodes=S,
                    cardinality=k,
                    residual_sq=r,
                    feasible=True,
                    optimal=True,
                    nodes_explored=explored,
                )
    if budget is not None and kmax < n:
        raise InfeasibleError(
            f"no feasible actuated set of cardinality <= {kmax} (budget exhausted)"
        )
    raise InfeasibleError("transfer is infeasible even with every node actuated")


def greedy_min_reach(
    sys: LinearSystem,
    tol: Tolerance = DEFAULT_TOL,
    max_iters: int | None = None,
) -> SolveResult:
    """Greedy marginal-decrease heuristic for the same problem.

    Starting from the empty set, repeatedly add the node whose inclusion
    minimizes the residual (ties broken toward the smallest index).  Stops on
    feasibility, on a stall (no addition shrinks the residual by more than
    ``1e-12``), or after ``max_iters`` additions.  A stall returns the current
    set with ``feasible=False`` rather than raising: stalls are expected
    behavior for a non-supermodular objective and worth observing.
    """
    n = sys.n
    iters = n if max_iters is None else min(int(max_iters), n)
    w = transfer_offset(sys)
    bound = tol.feas_rel**2 * max(1.0, float(w @ w))
    selected: list[int] = []
    current = _residual_sq(sys, selected, w, tol)
    explored = 0
    while current > bound and len(selected) < iters:
        best_node = None
        best_r = None
        for i in range(1, n + 1):
            if i in selected:
                continue
            explored += 1
            r = _residual_sq(sys, selected + [i], w, tol)
            if best_r is None or r < best_r:
                best_node, best_r = i, r
        if best_node is None or current - best_r <= GREEDY_IMPROVEMENT_EPS:
            break
        selected.append(best_node)
        current = best_r
    return SolveResult(
        nodes=tuple(sorted(selected)),
        cardinality=len(selected),
        residual_sq=current,
        feasible=current <= bound,
        optimal=False,
        nodes_explored=explored,
    )


def varsel_exact(
    inst: VarSelInstance,
    cap: int = DEFAULT_VARSEL_CAP,
    tol: Tolerance = DEFAULT_TOL,
) -> VarSelResult:
    """Exact sparse variable selection by support enumeration.

    Supports are scanned by increasing size and lexicographically within each
    size; each candidate support gets a least-squares fit of ``z`` over the
    selected columns, and the first support whose residual meets the budget
    wins.  The budget comparison carries a small relative slack so exact fits
    survive float noise when ``delta = 0``.
    """
    m, l = inst.U.shape
    if l > cap:
        raise CapacityError(
            f"support enumeration over {l} columns exceeds the cap of {cap}"
        )
    z_norm = float(np.linalg.norm(inst.z))
    slack = tol.feas_rel * max(1.0, z_norm)
    for k in range(l + 1):
        for support in combinations(range(1, l + 1), k):
            if k == 0:
                residual = z_norm
                coef = np.zeros(0)
            else:
                cols = inst.U[:, [j - 1 for j in support]]
                coef, *_ = np.linalg.lstsq(cols, inst.z, rcond=None)
                residual = float(np.linalg.norm(cols @ coef - inst.z))
            if residual <= inst.delta + slack:
                y = np.zeros(l)
                for j, c in zip(support, coef):
                    y[j - 1] = c
                return VarSelResult(
                    y=y, support=support, norm0=k, residual=residual
                )
    raise InfeasibleError(
        f"no support of size <= {l} meets the residual budget {inst.delta}"
    )
