"""Distance-to-subspace set functions and brute-force structure checks.

Given a target vector ``v`` and a column dictionary ``M``, the set function
maps a column subset ``S`` to ``dist(v, Range(M(S)))**c`` where ``M(S)`` keeps
only the selected columns.  The function is always non-increasing (adding a
column can only shrink the distance), but it is *not* supermodular: marginal
decreases can grow as the base set grows, and :func:`check_supermodular`
hunts for an explicit witness of that by exhaustive enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import numpy as np

from .errors import CapacityError
from .linalg import DEFAULT_TOL, Tolerance, as_matrix, as_vector, dist_sq_to_range

# Ground sets larger than this make the 3^n subset-pair scan unreasonable.
DEFAULT_BRUTE_FORCE_CAP = 12

# A reported violation must beat float noise by this absolute margin.
VIOLATION_SLACK = 1e-9


@dataclass(frozen=True)
class ColumnSelectionFunction:
    """Set function ``S -> dist(v, Range(M(S)))**c`` over columns of ``M``.

    ``c`` defaults to 2 (squared distance); any positive exponent is allowed
    and none of them restores supermodularity.
    """

    v: np.ndarray
    M: np.ndarray
    c: float = 2.0

    def __post_init__(self) -> None:
        v = as_vector(self.v, name="v")
        M = as_matrix(self.M, name="M")
        if M.shape[0] != v.shape[0]:
            raise ValueError(
                f"v has length {v.shape[0]} but M has {M.shape[0]} rows"
            )
        if not float(self.c) > 0.0:
            raise ValueError(f"exponent c must be positive, got {self.c!r}")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "c", float(self.c))

    @property
    def ground_size(self) -> int:
        return self.M.shape[1]


@dataclass(frozen=True)
class Violation:
    """A witnessed failure of the diminishing-decrease inequality.

    ``lhs = f(subset) - f(subset + element)`` fell strictly below
    ``rhs = f(superset) - f(superset + element)`` although
    ``subset <= superset`` and ``element`` lies outside ``superset``.
    """

    subset: tuple[int, ...]
    superset: tuple[int, ...]
    element: int
    lhs: float
    rhs: float


@dataclass(frozen=True)
class SetFunctionReport:
    monotone_nonincreasing: bool
    supermodular: bool
    violation: Violation | None


def evaluate(
    fn: ColumnSelectionFunction, S: Iterable[int], tol: Tolerance = DEFAULT_TOL
) -> float:
    """Value of the set function on column subset ``S`` (1-based indices).

    The empty selection denotes the subspace ``{0}``, so ``f({}) = ||v||**c``.
    """
    cols = sorted({int(k) for k in S})
    if cols and (cols[0] < 1 or cols[-1] > fn.ground_size):
        raise ValueError(
            f"column indices must lie in 1..{fn.ground_size}, got {cols}"
        )
    sub = fn.M[:, [k - 1 for k in cols]]
    d_sq = dist_sq_to_range(fn.v, sub, tol)
    return float(d_sq ** (fn.c / 2.0))


def _check_cap(fn: ColumnSelectionFunction, cap: int) -> None:
    if fn.ground_size > cap:
        raise CapacityError(
            f"ground set of size {fn.ground_size} is too large for brute force "
            f"(cap {cap})"
        )


def _all_values(
    fn: ColumnSelectionFunction, tol: Tolerance
) -> dict[frozenset[int], float]:
    ground = range(1, fn.ground_size + 1)
    values: dict[frozenset[int], float] = {}
    for size in range(fn.ground_size + 1):
        for subset in combinations(ground, size):
            values[frozenset(subset)] = evaluate(fn, subset, tol)
    return values


def _monotone_from_values(values: dict[frozenset[int], float], ground_size: int) -> bool:
    ground = range(1, ground_size + 1)
    for subset, f_sub in values.items():
        for x in ground:
            if x in subset:
                continue
            if values[subset | {x}] > f_sub + VIOLATION_SLACK:
                return False
    return True


def check_monotone(
    fn: ColumnSelectionFunction,
    cap: int = DEFAULT_BRUTE_FORCE_CAP,
    tol: Tolerance = DEFAULT_TOL,
) -> bool:
    """True iff the function never increases when a column is added.

    Checks every single-column extension, which is equivalent to checking all
    nested pairs.  A failure here indicates a kernel bug: projection geometry
    guarantees monotonicity for every column-selection function.
    """
    _check_cap(fn, cap)
    return _monotone_from_values(_all_values(fn, tol), fn.ground_size)


def check_supermodular(
    fn: ColumnSelectionFunction,
    cap: int = DEFAULT_BRUTE_FORCE_CAP,
    tol: Tolerance = DEFAULT_TOL,
) -> SetFunctionReport:
    """Exhaustively test the diminishing-decrease property and report the
    first violation found.

    Supermodularity requires ``f(A) - f(A + x) >= f(A') - f(A' + x)`` for
    every nested pair ``A <= A'`` and element ``x`` outside ``A'``.  The scan
    enumerates base sets from largest to smallest cardinality (lexicographic
    within a size), supersets by growing extension (size, then lexicographic),
    and candidate elements in ascending order; the witness is the first
    violating triple in that fixed order, so reports are reproducible.
    Comparisons carry an absolute slack of ``1e-9`` so a reported violation
    always exceeds float noise.
    """
    _check_cap(fn, cap)
    values = _all_values(fn, tol)
    monotone = _monotone_from_values(values, fn.ground_size)
    ground = tuple(range(1, fn.ground_size + 1))
    for size_a in range(fn.ground_size, -1, -1):
        for A in combinations(ground, size_a):
            a_set = frozenset(A)
            rest = tuple(k for k in ground if k not in a_set)
            for extra_size in range(len(rest) + 1):
                for extra in combinations(rest, extra_size):
                    sup_set = a_set | set(extra)
                    for x in ground:
                        if x in sup_set:
                            continue
                        lhs = values[a_set] - values[a_set | {x}]
                        rhs = values[sup_set] - values[sup_set | {x}]
                        if lhs < rhs - VIOLATION_SLACK:
                            witness = Violation(
                                subset=tuple(sorted(a_set)),
                                superset=tuple(sorted(sup_set)),
                                element=x,
                                lhs=lhs,
                                rhs=rhs,
                            )
                            return SetFunctionReport(
                                monotone_nonincreasing=monotone,
                                supermodular=False,
                                violation=witness,
                            )
    return SetFunctionReport(
        monotone_nonincreasing=monotone, supermodular=True, violation=None
    )
