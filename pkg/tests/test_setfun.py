from itertools import combinations

import numpy as np
import pytest

from reachkit.errors import CapacityError
from reachkit.setfun import (
    ColumnSelectionFunction,
    check_monotone,
    check_supermodular,
    evaluate,
)

# Target orthogonal to columns 1 and 3; columns 1 and 2 span the plane x3 = 0.
V = np.array([-1.0, 1.0, 1.0])
M = np.array([[1.0, 0.0, 1.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])


def counterexample(c=2.0):
    return ColumnSelectionFunction(v=V, M=M, c=c)


def brute_verdicts(fn):
    """Second, independent enumeration of the definitions in plain ascending
    order; returns (monotone_nonincreasing, supermodular) verdicts only."""
    ground = list(range(1, fn.ground_size + 1))
    values = {}
    for size in range(len(ground) + 1):
        for sub in combinations(ground, size):
            values[frozenset(sub)] = evaluate(fn, sub)
    monotone = True
    supermodular = True
    for a in values:
        for b in values:
            if not a <= b:
                continue
            if values[frozenset(b)] > values[frozenset(a)] + 1e-9:
                monotone = False
            for x in ground:
                if x in b:
                    continue
                lhs = values[a] - values[a | {x}]
                rhs = values[b] - values[b | {x}]
                if lhs < rhs - 1e-9:
                    supermodular = False
    return monotone, supermodular


class TestEvaluate:
    @pytest.mark.parametrize(
        "subset,expected",
        [
            ((1,), 3.0),
            ((1, 3), 3.0),
            ((1, 2), 1.0),
            ((1, 2, 3), 0.0),
            ((), 3.0),
            ((2,), 2.0),
        ],
    )
    def test_counterexample_values(self, subset, expected):
        assert evaluate(counterexample(), subset) == pytest.approx(expected, abs=1e-9)

    def test_exponent_one_takes_square_root(self):
        fn = counterexample(c=1.0)
        assert evaluate(fn, (1,)) == pytest.approx(np.sqrt(3.0), abs=1e-12)
        assert evaluate(fn, (1, 2)) == pytest.approx(1.0, abs=1e-12)

    def test_out_of_range_subset_rejected(self):
        with pytest.raises(ValueError):
            evaluate(counterexample(), (4,))

    def test_zero_target_is_identically_zero(self):
        fn = ColumnSelectionFunction(v=np.zeros(3), M=M)
        for size in range(4):
            for sub in combinations(range(1, 4), size):
                assert evaluate(fn, sub) == pytest.approx(0.0, abs=1e-18)


class TestCheckSupermodular:
    def test_counterexample_witness(self):
        report = check_supermodular(counterexample())
        assert not report.supermodular
        assert report.monotone_nonincreasing
        v = report.violation
        assert v is not None
        assert v.subset == (1,)
        assert v.superset == (1, 2)
        assert v.element == 3
        assert v.lhs == pytest.approx(0.0, abs=1e-9)
        assert v.rhs == pytest.approx(1.0, abs=1e-9)
        assert v.lhs < v.rhs - 1e-9

    @pytest.mark.parametrize("c", [1.0, 2.0, 3.0])
    def test_no_exponent_restores_supermodularity(self, c):
        assert not check_supermodular(counterexample(c)).supermodular

    def test_identity_dictionary_is_supermodular(self):
        # discarding coordinates makes the function additive, hence supermodular
        rng = np.random.default_rng(47)
        for _ in range(5):
            fn = ColumnSelectionFunction(v=rng.normal(size=4), M=np.eye(4))
            report = check_supermodular(fn)
            assert report.supermodular
            assert report.violation is None

    def test_single_column_is_supermodular(self):
        fn = ColumnSelectionFunction(v=np.array([1.0, 2.0]), M=np.array([[1.0], [1.0]]))
        assert check_supermodular(fn).supermodular

    def test_verdicts_match_independent_enumeration(self):
        rng = np.random.default_rng(53)
        for _ in range(25):
            rows = int(rng.integers(2, 5))
            cols = int(rng.integers(1, 5))
            fn = ColumnSelectionFunction(
                v=rng.normal(size=rows), M=rng.normal(size=(rows, cols))
            )
            report = check_supermodular(fn)
            monotone, supermodular = brute_verdicts(fn)
            assert report.supermodular == supermodular
            assert report.monotone_nonincreasing == monotone

    def test_witness_is_deterministic(self):
        a = check_supermodular(counterexample()).violation
        b = check_supermodular(counterexample()).violation
        assert a == b

    def test_cap_enforced(self):
        fn = ColumnSelectionFunction(v=np.zeros(2), M=np.zeros((2, 13)))
        with pytest.raises(CapacityError):
            check_supermodular(fn)


class TestCheckMonotone:
    def test_counterexample_monotone(self):
        assert check_monotone(counterexample())

    def test_random_functions_always_monotone(self):
        rng = np.random.default_rng(59)
        for _ in range(30):
            rows = int(rng.integers(2, 6))
            cols = int(rng.integers(1, 7))
            fn = ColumnSelectionFunction(
                v=rng.normal(size=rows), M=rng.normal(size=(rows, cols))
            )
            assert check_monotone(fn)

    def test_cap_enforced(self):
        fn = ColumnSelectionFunction(v=np.zeros(2), M=np.zeros((2, 13)))
        with pytest.raises(CapacityError):
            check_monotone(fn)


class TestValidation:
    def test_rejects_nonpositive_exponent(self):
        with pytest.raises(ValueError):
            ColumnSelectionFunction(v=V, M=M, c=0.0)

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(ValueError):
            ColumnSelectionFunction(v=np.ones(2), M=M)
