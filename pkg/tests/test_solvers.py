from itertools import combinations
from pathlib import Path

import numpy as np
import pytest

from reachkit.errors import CapacityError, InfeasibleError
from reachkit.hardness import generate
from reachkit.instance_io import load_instance
from reachkit.linalg import mat_exp
from reachkit.solvers import (
    VarSelInstance,
    exact_min_reach,
    greedy_min_reach,
    varsel_exact,
)
from reachkit.system import LinearSystem, is_feasible, star_system

FIXTURES = Path(__file__).parent / "fixtures"

COUNTEREXAMPLE_M = np.array([[1.0, 0.0, 1.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])


def brute_force_optimum(sys):
    """Independent referee: scan all 2^n subsets, return minimal feasible size."""
    best = None
    for mask in range(2 ** sys.n):
        S = [i + 1 for i in range(sys.n) if mask >> i & 1]
        if is_feasible(sys, S).feasible:
            if best is None or len(S) < best:
                best = len(S)
    return best


class TestExactMinReach:
    def test_star_needs_one_node(self):
        for n in (3, 5, 10):
            result = exact_min_reach(star_system(n))
            assert result.nodes == (1,)
            assert result.cardinality == 1
            assert result.feasible and result.optimal

    def test_drift_only_transfer_needs_nothing(self):
        rng = np.random.default_rng(61)
        A = rng.normal(size=(4, 4))
        x0 = rng.normal(size=4)
        sys = LinearSystem(A=A, B=np.eye(4), t0=0.0, t1=1.5, x0=x0, x1=mat_exp(A, 1.5) @ x0)
        result = exact_min_reach(sys)
        assert result.nodes == ()
        assert result.cardinality == 0

    def test_generated_identity_instance_needs_both_columns(self):
        inst = generate(np.eye(2), d=2)
        assert brute_force_optimum(inst.sys) == 2
        result = exact_min_reach(inst.sys)
        assert result.cardinality == 2
        assert result.nodes == (5, 6)

    def test_optimality_matches_brute_force(self):
        rng = np.random.default_rng(67)
        for _ in range(15):
            n = int(rng.integers(3, 6))
            A = rng.normal(size=(n, n)) * (rng.random(size=(n, n)) < 0.4)
            x1 = rng.integers(0, 2, size=n).astype(float)
            sys = LinearSystem(A=A, B=np.eye(n), t0=0.0, t1=1.0, x0=np.zeros(n), x1=x1)
            assert exact_min_reach(sys).cardinality == brute_force_optimum(sys)

    def test_lexicographically_least_witness(self):
        # both {1} and {2} are feasible for the star target; {1} wins
        result = exact_min_reach(star_system(4))
        assert result.nodes == (1,)
        assert is_feasible(star_system(4), [2]).feasible

    def test_cap_requires_budget(self):
        sys = star_system(25)
        with pytest.raises(CapacityError):
            exact_min_reach(sys)
        assert exact_min_reach(sys, budget=2).nodes == (1,)

    def test_budget_exhaustion_is_explicit(self):
        # the all-ones target needs every node of a driftless system
        n = 5
        sys = LinearSystem(
            A=np.zeros((n, n)), B=np.eye(n), t0=0.0, t1=1.0, x0=np.zeros(n), x1=np.ones(n)
        )
        with pytest.raises(InfeasibleError):
            exact_min_reach(sys, budget=3)
        assert exact_min_reach(sys).cardinality == n

    def test_globally_infeasible_is_explicit(self):
        # input only enters node 1, target needs node 2 of a driftless system
        sys = LinearSystem(
            A=np.zeros((2, 2)),
            B=np.array([[1.0], [0.0]]),
            t0=0.0,
            t1=1.0,
            x0=np.zeros(2),
            x1=np.array([0.0, 1.0]),
        )
        with pytest.raises(InfeasibleError):
            exact_min_reach(sys)


class TestGreedyMinReach:
    def test_star_zeroes_residual_immediately(self):
        result = greedy_min_reach(star_system(5))
        assert result.nodes == (1,)
        assert result.feasible
        assert not result.optimal

    def test_full_set_instance(self):
        n = 4
        sys = LinearSystem(
            A=np.zeros((n, n)), B=np.eye(n), t0=0.0, t1=1.0, x0=np.zeros(n), x1=np.ones(n)
        )
        exact = exact_min_reach(sys)
        greedy = greedy_min_reach(sys)
        assert exact.cardinality == n
        assert greedy.cardinality == n
        assert greedy.feasible

    def test_gap_fixture_beats_greedy(self):
        # persisted instance found by seeded random search with the exact
        # solver as referee: greedy needs strictly more nodes
        doc = load_instance(FIXTURES / "greedy_gap.json")
        exact = exact_min_reach(doc.system)
        greedy = greedy_min_reach(doc.system)
        assert greedy.feasible
        assert greedy.cardinality > exact.cardinality

    def test_never_beats_exact(self):
        rng = np.random.default_rng(71)
        for _ in range(20):
            n = int(rng.integers(3, 6))
            A = rng.normal(size=(n, n)) * (rng.random(size=(n, n)) < 0.4)
            x1 = rng.integers(0, 2, size=n).astype(float)
            sys = LinearSystem(A=A, B=np.eye(n), t0=0.0, t1=1.0, x0=np.zeros(n), x1=x1)
            exact = exact_min_reach(sys)
            greedy = greedy_min_reach(sys)
            assert greedy.cardinality >= exact.cardinality

    def test_residual_non_increasing_across_iterations(self):
        # greedy is deterministic, so truncated runs are prefixes of longer ones
        doc = load_instance(FIXTURES / "greedy_gap.json")
        residuals = [
            greedy_min_reach(doc.system, max_iters=k).residual_sq for k in range(5)
        ]
        for before, after in zip(residuals, residuals[1:]):
            assert after <= before + 1e-12

    def test_max_iters_caps_additions(self):
        doc = load_instance(FIXTURES / "greedy_gap.json")
        result = greedy_min_reach(doc.system, max_iters=1)
        assert result.cardinality == 1
        assert not result.feasible

    def test_stall_reports_infeasible_instead_of_raising(self):
        # input only reaches node 1 but the target lives on node 2, so no
        # addition ever improves the residual and greedy stops empty-handed
        sys = LinearSystem(
            A=np.zeros((3, 3)),
            B=np.array([[1.0], [0.0], [0.0]]),
            t0=0.0,
            t1=1.0,
            x0=np.zeros(3),
            x1=np.array([0.0, 1.0, 0.0]),
        )
        result = greedy_min_reach(sys)
        assert not result.feasible
        assert result.nodes == ()
        assert result.residual_sq == pytest.approx(1.0, abs=1e-12)


class TestVarselExact:
    def test_identity_single_support(self):
        inst = VarSelInstance(U=np.eye(3), z=np.array([1.0, 0.0, 0.0]), delta=0.0)
        result = varsel_exact(inst)
        assert result.support == (1,)
        assert result.norm0 == 1

    def test_counterexample_dictionary_exact_fit_needs_all(self):
        inst = VarSelInstance(U=COUNTEREXAMPLE_M, z=np.array([-1.0, 1.0, 1.0]), delta=0.0)
        result = varsel_exact(inst)
        assert result.support == (1, 2, 3)
        assert result.norm0 == 3

    def test_counterexample_dictionary_with_unit_budget(self):
        z = np.array([-1.0, 1.0, 1.0])
        # independent oracle: enumerate every support of size <= 2 and check
        # the least-squares residual against the budget
        feasible_small = []
        for k in (0, 1, 2):
            for support in combinations(range(3), k):
                cols = COUNTEREXAMPLE_M[:, list(support)]
                if k == 0:
                    resid = float(np.linalg.norm(z))
                else:
                    coef, *_ = np.linalg.lstsq(cols, z, rcond=None)
                    resid = float(np.linalg.norm(cols @ coef - z))
                if resid <= 1.0 + 1e-9:
                    feasible_small.append(tuple(j + 1 for j in support))
        assert feasible_small == [(1, 2)]
        inst = VarSelInstance(U=COUNTEREXAMPLE_M, z=z, delta=1.0)
        result = varsel_exact(inst)
        assert result.support == (1, 2)
        assert result.residual == pytest.approx(1.0, abs=1e-9)

    def test_zero_vector_budget_met_by_empty_support(self):
        inst = VarSelInstance(U=np.eye(2), z=np.zeros(2), delta=0.0)
        result = varsel_exact(inst)
        assert result.support == ()
        assert result.norm0 == 0

    def test_infeasible_budget_is_explicit(self):
        inst = VarSelInstance(
            U=np.array([[1.0], [1.0]]), z=np.array([1.0, -1.0]), delta=0.1
        )
        with pytest.raises(InfeasibleError):
            varsel_exact(inst)

    def test_cap_enforced(self):
        inst = VarSelInstance(U=np.zeros((2, 21)), z=np.zeros(2), delta=1.0)
        with pytest.raises(CapacityError):
            varsel_exact(inst)

    def test_rejects_negative_delta(self):
        with pytest.raises(ValueError):
            VarSelInstance(U=np.eye(2), z=np.zeros(2), delta=-1.0)
