import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oneclass_rkm import ocrkm
from oneclass_rkm.data_io import Dataset, fit_standardizer
from oneclass_rkm.errors import DimensionMismatch, EmptyTestSet, SingularSystem, VersionMismatch
from oneclass_rkm.kernel import KernelSpec, gram
from oneclass_rkm._base import accuracy_score, sign_labels

from conftest import gaussian_gram_loop, inverse_oracle

Hp = ocrkm.OcrkmHyperparams


def random_model(seed, n=None, m=None):
    rng = np.random.default_rng(seed)
    n = n or int(rng.integers(1, 40))
    m = m or int(rng.integers(1, 6))
    gamma, eta = 10 ** rng.uniform(-2, 2, 2)
    X = rng.normal(size=(n, m))
    return ocrkm.train(X, Hp(gamma, eta), KernelSpec.gaussian(2 ** rng.uniform(-2, 2))), X


class TestMicroCases:
    def test_single_point(self):
        model = ocrkm.train([[0.3, -1.0]], Hp(1.0, 1.0), KernelSpec.gaussian(1.0))
        assert model.H.tolist() == [1.0]
        assert model.rho == 2.0
        assert model.decision_scores([[0.3, -1.0]]).tolist() == [-1.0]
        assert model.predict([[0.3, -1.0]]).tolist() == [-1]

    @pytest.mark.parametrize("gamma,eta", [(1.0, 1.0), (0.5, 3.0), (100.0, 0.01)])
    def test_single_point_closed_form(self, gamma, eta):
        model = ocrkm.train([[1.0]], Hp(gamma, eta), KernelSpec.gaussian(0.5))
        assert model.H[0] == pytest.approx(1.0, abs=1e-12)
        assert model.rho == pytest.approx(1.0 / gamma + eta, rel=1e-12)

    def test_two_identical_points(self):
        model = ocrkm.train([[2.0], [2.0]], Hp(1.0, 0.5), KernelSpec.gaussian(1.0))
        np.testing.assert_allclose(model.H, [0.5, 0.5], rtol=1e-12)
        assert model.rho == pytest.approx(1.25, rel=1e-12)

    def test_three_points_against_inverse(self):
        X = np.array([[0.0], [1.0], [2.0]])
        model = ocrkm.train(X, Hp(1.0, 0.1), KernelSpec.gaussian(1.0))
        K = gaussian_gram_loop(X, X, 1.0)
        H, rho = inverse_oracle(K + 0.1 * np.eye(3), -1.0)
        np.testing.assert_allclose(model.H, H, rtol=1e-10)
        assert model.rho == pytest.approx(rho, rel=1e-10)
        # Frozen from the oracle above.
        np.testing.assert_allclose(model.H, [0.48896468, 0.02207063, 0.48896468], rtol=1e-6)
        assert model.rho == pytest.approx(0.6174218413567714, rel=1e-10)


class TestScoring:
    def test_far_query_scores_minus_rho(self):
        model, _ = random_model(3, n=10, m=2)
        assert model.decision_scores([[1e3, 1e3]])[0] == pytest.approx(-model.rho, rel=1e-15)

    def test_training_scores(self):
        model, X = random_model(4, n=25, m=3)
        np.testing.assert_allclose(model.decision_scores(X), -model.hyper.eta * model.H, rtol=1e-8)

    def test_scores_match_expanded_sum(self):
        model, X = random_model(5, n=6, m=2)
        Q = np.random.default_rng(0).normal(size=(4, 2))
        Kq = gaussian_gram_loop(X, Q, model.spec.sigma)
        expected = [sum(model.H[i] * Kq[i, q] for i in range(6)) / model.hyper.gamma - model.rho for q in range(4)]
        np.testing.assert_allclose(model.decision_scores(Q), expected, rtol=1e-10, atol=1e-12)

    def test_dimension_mismatch(self):
        model, _ = random_model(6, n=5, m=2)
        with pytest.raises(DimensionMismatch):
            model.decision_scores(np.zeros((1, 3)))

    def test_standardizer_is_applied_to_queries(self):
        rng = np.random.default_rng(7)
        X = rng.normal(5.0, 3.0, size=(12, 2))
        state = fit_standardizer(X)
        model = ocrkm.train(X, Hp(2.0, 0.3), KernelSpec.gaussian(1.0), state)
        np.testing.assert_allclose(model.X_train.mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(model.decision_scores(X), -0.3 * model.H, rtol=1e-8)


class TestPredict:
    def test_sign_rule(self):
        assert sign_labels([0.3, -0.2]).tolist() == [1, -1]
        assert sign_labels([0.0]).tolist() == [1]
        assert sign_labels([-0.0]).tolist() == [1]

    def test_accuracy(self):
        assert accuracy_score([1, -1], [1, -1]) == 1.0
        assert accuracy_score([-1, -1], [1, -1]) == 0.5
        with pytest.raises(EmptyTestSet):
            accuracy_score([], [])

    def test_accuracy_matches_count(self):
        model, _ = random_model(8, n=15, m=2)
        rng = np.random.default_rng(9)
        Q = rng.normal(size=(40, 2)) * 2
        y = rng.choice([1, -1], size=40)
        pred = model.predict(Q)
        hits = sum(1 for a, b in zip(pred, y) if a == b)
        assert ocrkm.accuracy(model, Dataset(Q, y)) == hits / 40


def test_singular_system_detected():
    X = np.random.default_rng(0).normal(size=(5, 2))
    with pytest.raises(SingularSystem):
        ocrkm.train(X, Hp(1e20, 1e-20), KernelSpec.gaussian(1.0))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_stationarity_properties(seed):
    model, X = random_model(seed)
    K = gram(model.X_train, model.spec).K
    g, e = model.hyper.gamma, model.hyper.eta
    assert abs(model.H.sum() - 1.0) <= 1e-8
    residual = np.abs(K @ model.H / g + e * model.H - model.rho).max()
    assert residual <= 1e-8 * max(1.0, abs(model.rho))
    np.testing.assert_allclose(
        model.decision_scores(X), -e * model.H, rtol=1e-8, atol=1e-14 * max(1.0, abs(model.rho))
    )


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_oracle_equivalence(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 21))
    model, X = random_model(seed, n=n)
    K = gaussian_gram_loop(X, X, model.spec.sigma)
    H, rho = inverse_oracle(K / model.hyper.gamma + model.hyper.eta * np.eye(n), -1.0)
    np.testing.assert_allclose(model.H, H, rtol=1e-10, atol=1e-10 * np.abs(H).max())
    assert model.rho == pytest.approx(rho, rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_permutation_equivariance(seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(int(rng.integers(2, 25)), 3))
    perm = rng.permutation(len(X))
    hyper, spec = Hp(*(10 ** rng.uniform(-2, 2, 2))), KernelSpec.gaussian(1.5)
    a = ocrkm.train(X, hyper, spec)
    b = ocrkm.train(X[perm], hyper, spec)
    np.testing.assert_allclose(b.H, a.H[perm], rtol=1e-10, atol=1e-12)
    assert b.rho == pytest.approx(a.rho, rel=1e-10)
    Q = rng.normal(size=(5, 3))
    np.testing.assert_allclose(b.decision_scores(Q), a.decision_scores(Q), rtol=1e-10, atol=1e-10 * abs(a.rho))


def test_duplicates_share_hidden_features():
    rng = np.random.default_rng(11)
    X = rng.normal(size=(8, 2))
    X = np.vstack([X, X[2], X[5], X[2]])
    model = ocrkm.train(X, Hp(0.7, 0.2), KernelSpec.gaussian(1.0))
    assert model.H[8] == pytest.approx(model.H[2], rel=1e-10)
    assert model.H[10] == pytest.approx(model.H[2], rel=1e-10)
    assert model.H[9] == pytest.approx(model.H[5], rel=1e-10)


class TestPersistence:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(12)
        X = rng.normal(2.0, 4.0, size=(20, 3))
        model = ocrkm.train(X, Hp(3.0, 0.05), KernelSpec.gaussian(0.8), fit_standardizer(X))
        path = tmp_path / "m.json"
        model.save(path)
        loaded = ocrkm.load_model(path)
        Q = rng.normal(size=(30, 3)) * 3
        np.testing.assert_array_equal(loaded.decision_scores(Q), model.decision_scores(Q))
        doc = json.loads(path.read_text())
        assert {"format_version", "kernel", "gamma", "eta", "rho", "H", "X_train", "standardizer"} <= doc.keys()
        assert doc["X_train"]["shape"] == [20, 3]

    def test_unknown_version(self, tmp_path):
        model, _ = random_model(13, n=3, m=1)
        doc = model.to_dict()
        doc["format_version"] = 99
        with pytest.raises(VersionMismatch):
            ocrkm.OcrkmModel.from_dict(doc)


def test_hyperparams_validated():
    with pytest.raises(ValueError):
        Hp(0.0, 1.0)
    with pytest.raises(ValueError):
        Hp(1.0, -1.0)
