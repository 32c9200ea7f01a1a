import numpy as np
import pytest

from libsquant.classical.trees import (ForestModel, GbrModel, TreeNode,
                                       fit_forest, fit_gbr, fit_tree)
from libsquant.numerics import make_rng


def exhaustive_best_split(X, y, min_leaf=1):
    """Brute-force split enumeration used as the oracle."""
    best = None
    n, p = X.shape
    for f in range(p):
        values = np.unique(X[:, f])
        for lo, hi in zip(values[:-1], values[1:]):
            thr = 0.5 * (lo + hi)
            left = X[:, f] <= thr
            if left.sum() < min_leaf or (~left).sum() < min_leaf:
                continue
            sse = (np.sum((y[left] - y[left].mean()) ** 2)
                   + np.sum((y[~left] - y[~left].mean()) ** 2))
            if best is None or sse < best[0] - 1e-12:
                best = (sse, f, thr)
    return best


class TestCart:
    def test_constant_target_single_leaf(self):
        X = np.arange(8.0).reshape(-1, 1)
        tree = fit_tree(X, np.full(8, 3.0))
        assert tree.is_leaf and tree.value == 3.0

    def test_step_data_root_split(self):
        X = np.array([[1.0], [2.0], [3.0], [4.0]])
        y = np.array([0.0, 0.0, 1.0, 1.0])
        tree = fit_tree(X, y)
        assert not tree.is_leaf
        assert tree.feature == 0 and tree.threshold == 2.5
        np.testing.assert_array_equal(tree.predict(X), y)

    def test_max_depth_zero_predicts_mean(self):
        X = np.arange(6.0).reshape(-1, 1)
        y = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
        tree = fit_tree(X, y, max_depth=0)
        assert tree.is_leaf and tree.value == pytest.approx(3.5)

    @pytest.mark.parametrize("seed", range(8))
    def test_root_split_matches_exhaustive_enumeration(self, seed):
        rng = make_rng(seed)
        X = rng.normal(size=(25, 3))
        y = rng.normal(size=25)
        tree = fit_tree(X, y, max_depth=1)
        oracle = exhaustive_best_split(X, y)
        assert not tree.is_leaf
        assert (tree.feature, tree.threshold) == (oracle[1], oracle[2])

    def test_tie_breaks_to_lowest_feature_then_threshold(self):
        # duplicated feature: identical best score on features 0 and 1
        x = np.array([1.0, 2.0, 3.0, 4.0])
        X = np.column_stack([x, x])
        y = np.array([0.0, 0.0, 1.0, 1.0])
        tree = fit_tree(X, y, max_depth=1)
        assert tree.feature == 0 and tree.threshold == 2.5

    def test_min_leaf_respected(self):
        X = np.arange(10.0).reshape(-1, 1)
        y = (X[:, 0] >= 1.0).astype(float)  # best unconstrained cut at 0.5
        tree = fit_tree(X, y, max_depth=1, min_leaf=3)
        assert not tree.is_leaf
        left = X[:, 0] <= tree.threshold
        assert left.sum() >= 3 and (~left).sum() >= 3

    def test_predictions_stay_within_target_range(self):
        rng = make_rng(5)
        X = rng.normal(size=(30, 4))
        y = rng.normal(size=30)
        tree = fit_tree(X, y, max_depth=4)
        pred = tree.predict(X)
        assert pred.min() >= y.min() - 1e-12
        assert pred.max() <= y.max() + 1e-12

    def test_too_few_rows_rejected(self):
        with pytest.raises(ValueError):
            fit_tree(np.ones((1, 2)), np.ones(1), min_leaf=2)


class TestForest:
    def test_reduces_to_single_tree(self):
        rng = make_rng(1)
        X = rng.normal(size=(20, 3))
        y = rng.normal(size=20)
        forest = fit_forest(X, y, n_trees=1, max_depth=3, seed=0,
                            bootstrap=False, feature_subset=False)
        tree = fit_tree(X, y, max_depth=3)
        np.testing.assert_array_equal(forest.predict(X), tree.predict(X))

    def test_constant_target_any_seed(self):
        X = make_rng(2).normal(size=(15, 2))
        y = np.full(15, 1.25)
        for seed in (0, 1, 99):
            forest = fit_forest(X, y, n_trees=5, seed=seed)
            np.testing.assert_allclose(forest.predict(X), 1.25, atol=1e-12)

    def test_deterministic_given_seed(self):
        rng = make_rng(3)
        X = rng.normal(size=(25, 4))
        y = rng.normal(size=25)
        a = fit_forest(X, y, n_trees=10, max_depth=4, seed=7)
        b = fit_forest(X, y, n_trees=10, max_depth=4, seed=7)
        np.testing.assert_array_equal(a.predict(X), b.predict(X))

    def test_predictions_within_target_range(self):
        rng = make_rng(4)
        X = rng.normal(size=(30, 3))
        y = rng.normal(size=30)
        forest = fit_forest(X, y, n_trees=12, max_depth=5, seed=1)
        pred = forest.predict(X)
        assert pred.min() >= y.min() - 1e-12 and pred.max() <= y.max() + 1e-12

    def test_needs_at_least_one_tree(self):
        with pytest.raises(ValueError):
            fit_forest(np.ones((4, 1)), np.ones(4), n_trees=0)


class TestGbr:
    def test_single_stump_stage_predicts_mean(self):
        X = np.arange(6.0).reshape(-1, 1)
        y = np.array([0.0, 1.0, 2.0, 3.0, 4.0, 5.0])
        model = fit_gbr(X, y, n_stages=1, learning_rate=1.0, max_depth=0)
        np.testing.assert_allclose(model.predict(X), 2.5, atol=1e-12)

    def test_training_mse_non_increasing(self):
        rng = make_rng(6)
        X = rng.normal(size=(30, 3))
        y = rng.normal(size=30)
        model = fit_gbr(X, y, n_stages=40, learning_rate=0.3, max_depth=2)
        pred = np.full(len(y), model.init)
        losses = [np.mean((y - pred) ** 2)]
        for tree in model.trees:
            pred = pred + model.learning_rate * tree.predict(X)
            losses.append(np.mean((y - pred) ** 2))
        diffs = np.diff(losses)
        assert np.all(diffs <= 1e-12)

    def test_step_data_five_stages_interpolates(self):
        X = np.array([[1.0], [2.0], [3.0], [4.0]])
        y = np.array([0.0, 0.0, 1.0, 1.0])
        model = fit_gbr(X, y, n_stages=5, learning_rate=1.0, max_depth=1)
        assert np.mean((model.predict(X) - y) ** 2) < 1e-6

    def test_rejects_bad_rate(self):
        with pytest.raises(ValueError):
            fit_gbr(np.ones((4, 1)), np.ones(4), learning_rate=0.0)

    def test_predictions_within_target_range(self):
        rng = make_rng(7)
        X = rng.normal(size=(30, 2))
        y = rng.normal(size=30)
        model = fit_gbr(X, y, n_stages=30, learning_rate=0.2, max_depth=2)
        pred = model.predict(X)
        assert pred.min() >= y.min() - 1e-9 and pred.max() <= y.max() + 1e-9


class TestTreeSerialization:
    def test_tree_round_trip(self):
        rng = make_rng(8)
        X = rng.normal(size=(20, 3))
        y = rng.normal(size=20)
        tree = fit_tree(X, y, max_depth=4)
        again = TreeNode.from_dict(tree.to_dict())
        np.testing.assert_array_equal(tree.predict(X), again.predict(X))

    def test_ensemble_round_trips(self):
        rng = make_rng(9)
        X = rng.normal(size=(20, 3))
        y = rng.normal(size=20)
        forest = fit_forest(X, y, n_trees=4, max_depth=3, seed=2)
        np.testing.assert_array_equal(
            ForestModel.from_dict(forest.to_dict()).predict(X), forest.predict(X))
        gbr = fit_gbr(X, y, n_stages=5, learning_rate=0.5, max_depth=2)
        np.testing.assert_array_equal(
            GbrModel.from_dict(gbr.to_dict()).predict(X), gbr.predict(X))
