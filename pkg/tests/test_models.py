import json

import numpy as np
import pytest

from libsquant.dataset import Scaler, fit_scaler, load_embedded, split
from libsquant.models import (CLASSICAL_NAMES, MODEL_NAMES, NEURAL_NAMES,
                              TrainedModel, UnknownModelError, model_from_dict,
                              model_to_dict, resolve_hyperparams, train_model)

FAST_NEURAL = {"epochs": 15}


@pytest.fixture(scope="module")
def fitted_split():
    ds = load_embedded()
    train_ds, test_ds = split(ds, 0.2, 42)
    return train_ds, test_ds, fit_scaler(train_ds)


class TestRegistry:
    def test_thirteen_models(self):
        assert len(MODEL_NAMES) == 13
        assert len(NEURAL_NAMES) == 7 and len(CLASSICAL_NAMES) == 6

    def test_unknown_model_rejected(self):
        with pytest.raises(UnknownModelError):
            resolve_hyperparams("boosted-ferns")

    def test_unknown_hyperparameter_rejected(self):
        with pytest.raises(ValueError, match="no hyperparameter"):
            resolve_hyperparams("knn", {"bandwidth": 3})

    def test_override_applies(self):
        params = resolve_hyperparams("knn", {"k": 7})
        assert params["k"] == 7


class TestTrainPredict:
    @pytest.mark.parametrize("name", MODEL_NAMES)
    def test_every_model_trains_and_predicts(self, name, fitted_split):
        train_ds, test_ds, scaler = fitted_split
        overrides = FAST_NEURAL if name in NEURAL_NAMES else None
        model = train_model(name, train_ds, scaler, seed=42, overrides=overrides)
        preds = model.predict_many(test_ds.records)
        assert preds.shape == (len(test_ds),)
        assert np.all(np.isfinite(preds))
        single = model.predict(test_ds[0])
        # batch-1 and batch-8 matmuls may take different BLAS paths
        assert single == pytest.approx(preds[0], rel=1e-9)

    def test_prediction_independent_of_batch_order(self, fitted_split):
        train_ds, test_ds, scaler = fitted_split
        model = train_model("knn", train_ds, scaler, seed=42)
        forward = model.predict_many(test_ds.records)
        backward = model.predict_many(test_ds.records[::-1])
        np.testing.assert_array_equal(forward, backward[::-1])

    def test_same_seed_same_model(self, fitted_split):
        train_ds, _, scaler = fitted_split
        a = train_model("simplernn", train_ds, scaler, seed=42, overrides=FAST_NEURAL)
        b = train_model("simplernn", train_ds, scaler, seed=42, overrides=FAST_NEURAL)
        assert model_to_dict(a) == model_to_dict(b)


class TestInverseTransform:
    class ConstantPredictor:
        def __init__(self, value):
            self.value = value

        def predict(self, X):
            return np.full(len(X), self.value)

    def test_constant_half_maps_to_midrange(self, fitted_split):
        train_ds, test_ds, scaler = fitted_split
        tm = TrainedModel("knn", scaler, self.ConstantPredictor(0.5), {}, "flat")
        got = tm.predict(test_ds[0])
        expected = scaler.target_min + 0.5 * (scaler.target_max - scaler.target_min)
        assert got == pytest.approx(expected, abs=1e-12)

    def test_identity_scaler_round_trip(self, fitted_split):
        _, test_ds, scaler = fitted_split
        ident = Scaler(scaler.means, scaler.stds, 0.0, 1.0)
        tm = TrainedModel("knn", ident, self.ConstantPredictor(0.37), {}, "flat")
        assert tm.predict(test_ds[0]) == pytest.approx(0.37, abs=1e-15)


class TestModelSerialization:
    @pytest.mark.parametrize("name", MODEL_NAMES)
    def test_json_round_trip_exact(self, name, fitted_split):
        train_ds, test_ds, scaler = fitted_split
        overrides = FAST_NEURAL if name in NEURAL_NAMES else None
        model = train_model(name, train_ds, scaler, seed=1, overrides=overrides)
        blob = json.dumps(model_to_dict(model), sort_keys=True)
        again = model_from_dict(json.loads(blob))
        np.testing.assert_array_equal(again.predict_many(test_ds.records),
                                      model.predict_many(test_ds.records))
        assert again.hyperparams == model.hyperparams

    def test_rejects_foreign_documents(self):
        with pytest.raises(ValueError):
            model_from_dict({"format": "something-else", "version": 1})
        with pytest.raises(ValueError):
            model_from_dict({"format": "libsquant-model", "version": 99})
