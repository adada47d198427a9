import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oneclass_rkm.data_io import (
    Dataset,
    SplitSpec,
    StandardizerState,
    apply_standardizer,
    fit_standardizer,
    invert_standardizer,
    load_csv,
    make_folds,
    read_feature_csv,
    split_train_test,
    target_only,
)
from oneclass_rkm.errors import (
    DimensionMismatch,
    EmptyFile,
    MalformedRow,
    NoTargetSamples,
    NonNumericFeature,
    TooFewSamples,
    UnknownTargetLabel,
)


@pytest.fixture
def write(tmp_path):
    def _write(text, name="d.csv"):
        p = tmp_path / name
        p.write_text(text)
        return p

    return _write


class TestLoadCsv:
    def test_majority_class_is_target(self, write):
        d = load_csv(write("1,2,a\n3,4,a\n5,6,b\n"))
        assert d.y.tolist() == [1, 1, -1]
        assert d.target_label == "a"
        assert d.X.shape == (3, 2)
        assert d.name == "d"

    def test_tie_goes_to_smaller_label(self, write):
        d = load_csv(write("1,b\n2,a\n"))
        assert d.target_label == "a"
        assert d.y.tolist() == [-1, 1]

    def test_explicit_target(self, write):
        d = load_csv(write("1,a\n2,a\n3,b\n"), target_label="b")
        assert d.y.tolist() == [-1, -1, 1]

    def test_unknown_target(self, write):
        with pytest.raises(UnknownTargetLabel):
            load_csv(write("1,a\n"), target_label="z")

    def test_non_numeric_feature(self, write):
        with pytest.raises(NonNumericFeature):
            load_csv(write("1,2,a\nabc,4,b\n"))

    def test_ragged(self, write):
        with pytest.raises(MalformedRow):
            load_csv(write("1,2,a\n3,b\n"))

    def test_empty(self, write):
        with pytest.raises(EmptyFile):
            load_csv(write(""))

    def test_missing_value_is_an_error(self, write):
        with pytest.raises(NonNumericFeature):
            load_csv(write("1,,a\n2,3,b\n"))

    def test_header_with_numeric_labels(self, write):
        d = load_csv(write("f1,f2,class\n1,2,0\n3,4,1\n5,6,1\n"))
        assert d.X.tolist() == [[1, 2], [3, 4], [5, 6]]
        assert d.target_label == "1"

    def test_header_with_string_labels(self, write):
        d = load_csv(write("f1,f2,class\n1,2,x\n3,4,y\n5,6,y\n"))
        assert d.n_samples == 3
        assert d.target_label == "y"


def test_dataset_rejects_bad_labels():
    with pytest.raises(ValueError):
        Dataset(np.zeros((2, 1)), [1, 0])
    with pytest.raises(DimensionMismatch):
        Dataset(np.zeros((2, 1)), [1])


def test_read_feature_csv(write):
    assert read_feature_csv(write("")).shape == (0, 0)
    assert read_feature_csv(write("a,b\n")).shape == (0, 0)
    X = read_feature_csv(write("a,b\n1,2\n3,4\n"))
    assert X.tolist() == [[1, 2], [3, 4]]
    X = read_feature_csv(write("1,2,x\n3,4,y\n"), drop_last=True)
    assert X.tolist() == [[1, 2], [3, 4]]


class TestStandardizer:
    def test_two_points(self):
        s = fit_standardizer([[0.0], [2.0]])
        assert s.mean.tolist() == [1.0] and s.std.tolist() == [1.0]

    def test_constant(self):
        s = fit_standardizer([[5.0], [5.0]])
        assert s.mean.tolist() == [5.0] and s.std.tolist() == [0.0]

    def test_population_std(self):
        s = fit_standardizer([[1, 2], [3, 4], [5, 6]])
        np.testing.assert_allclose(s.mean, [3, 4])
        np.testing.assert_allclose(s.std, [math.sqrt(8 / 3)] * 2, rtol=1e-15)

    def test_apply(self):
        s = StandardizerState(np.array([1.0]), np.array([1.0]))
        assert apply_standardizer(s, [[0.0], [2.0]]).tolist() == [[-1.0], [1.0]]

    def test_zero_variance_maps_to_zero(self):
        s = StandardizerState(np.array([5.0]), np.array([0.0]))
        assert apply_standardizer(s, [[7.0]]).tolist() == [[0.0]]

    def test_dimension_mismatch(self):
        s = StandardizerState.identity(2)
        with pytest.raises(DimensionMismatch):
            apply_standardizer(s, np.zeros((1, 3)))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 30), st.integers(1, 6), st.integers(0, 2**32 - 1))
    def test_round_trip(self, n, m, seed):
        X = np.random.default_rng(seed).normal(3.0, 2.0, (n, m))
        s = fit_standardizer(X)
        Z = apply_standardizer(s, X)
        np.testing.assert_allclose(Z.mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(Z.std(axis=0), 1.0, rtol=1e-12)
        np.testing.assert_allclose(invert_standardizer(s, Z), X, rtol=1e-12, atol=1e-12)


def _labels(n_pos, n_neg):
    y = np.array([1] * n_pos + [-1] * n_neg)
    return Dataset(np.arange(len(y), dtype=float).reshape(-1, 1), y)


class TestSplit:
    def test_too_few_negatives_for_test(self):
        with pytest.raises(TooFewSamples):
            split_train_test(_labels(7, 3), SplitSpec(0.7, seed=1))

    def test_balanced(self):
        tr, te = split_train_test(_labels(5, 5), SplitSpec(0.7, seed=1))
        assert (tr.y == 1).sum() == 4 and (tr.y == -1).sum() == 4
        assert (te.y == 1).sum() == 1 and (te.y == -1).sum() == 1

    def test_ceil_is_not_fooled_by_rounding(self):
        # 0.7 * 10 is 7.000000000000001 in floating point.
        tr, te = split_train_test(_labels(10, 10), SplitSpec(0.7, seed=0))
        assert (tr.y == 1).sum() == 7

    @pytest.mark.parametrize("n_neg", [1, 2, 3])
    def test_small_class_has_no_test_rows(self, n_neg):
        # ceil(0.7 * n) == n for n <= 3.
        with pytest.raises(TooFewSamples):
            split_train_test(_labels(10, n_neg), SplitSpec(0.7, seed=0))

    def test_deterministic(self):
        d = _labels(20, 10)
        a = split_train_test(d, SplitSpec(seed=5))
        b = split_train_test(d, SplitSpec(seed=5))
        assert np.array_equal(a[0].X, b[0].X) and np.array_equal(a[1].X, b[1].X)

    @settings(max_examples=50, deadline=None)
    @given(
        st.integers(4, 60),
        st.integers(0, 40).filter(lambda n: n == 0 or n >= 4),
        st.integers(0, 2**32 - 1),
    )
    def test_partition(self, n_pos, n_neg, seed):
        d = _labels(n_pos, n_neg)
        tr, te = split_train_test(d, SplitSpec(seed=seed))
        ids = np.concatenate([tr.X.ravel(), te.X.ravel()])
        assert sorted(ids.tolist()) == list(range(d.n_samples))


class TestTargetOnly:
    def test_keeps_targets_in_order(self):
        d = Dataset([[1.0], [2.0], [3.0]], [1, -1, 1])
        assert target_only(d).X.ravel().tolist() == [1.0, 3.0]

    def test_no_targets(self):
        with pytest.raises(NoTargetSamples):
            target_only(Dataset([[1.0], [2.0]], [-1, -1]))

    def test_identity(self):
        d = Dataset([[1.0], [2.0]], [1, 1])
        assert np.array_equal(target_only(d).X, d.X)


class TestFolds:
    def test_even(self):
        assert [len(f) for f in make_folds(10, 5, 0)] == [2] * 5

    def test_remainder(self):
        assert sorted(len(f) for f in make_folds(7, 5, 0)) == [1, 1, 1, 2, 2]

    def test_too_few(self):
        with pytest.raises(TooFewSamples):
            make_folds(3, 5, 0)
        with pytest.raises(TooFewSamples):
            make_folds(3, 1, 0)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(2, 200), st.integers(2, 10), st.integers(0, 2**32 - 1))
    def test_partition_property(self, n, k, seed):
        if n < k:
            return
        folds = make_folds(n, k, seed)
        sizes = [len(f) for f in folds]
        assert max(sizes) - min(sizes) <= 1
        assert sorted(np.concatenate(folds).tolist()) == list(range(n))
        again = make_folds(n, k, seed)
        assert all(np.array_equal(a, b) for a, b in zip(folds, again))

