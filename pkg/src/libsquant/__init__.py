"""LIBS quantification of aluminum alloys.

Predicts elemental concentrations from spectral-line intensities with six
recurrent / convolutional-recurrent architectures and seven classical
regressors, all implemented from first principles, plus a reproducible
benchmark harness comparing them.
"""

from .dataset import (ELEMENTS, Dataset, DatasetError, EncodedSequence,
                      Scaler, SpectralRecord, encode, encode_flat, fit_scaler,
                      load_embedded, parse_csv, split, write_csv)
from .evaluation import (EvaluationReport, MetricSet, correlation_slope, mae,
                         mape, mse, run_benchmark, summary_csv)
from .models import (CLASSICAL_NAMES, MODEL_NAMES, NEURAL_NAMES, TrainedModel,
                     UnknownModelError, model_from_dict, model_to_dict,
                     train_model)

__version__ = "0.1.0"

__all__ = [
    "ELEMENTS", "Dataset", "DatasetError", "EncodedSequence", "Scaler",
    "SpectralRecord", "encode", "encode_flat", "fit_scaler", "load_embedded",
    "parse_csv", "split", "write_csv",
    "EvaluationReport", "MetricSet", "correlation_slope", "mae", "mape",
    "mse", "run_benchmark", "summary_csv",
    "CLASSICAL_NAMES", "MODEL_NAMES", "NEURAL_NAMES", "TrainedModel",
    "UnknownModelError", "model_from_dict", "model_to_dict", "train_model",
    "__version__",
]
