"""Data model for the aluminum-alloy LIBS dataset.

A record is one certified concentration, the ten averaged spectral-line
intensities measured for it, and the element symbol. The embedded copy of
the 42-row intensity table is the canonical dataset; CSV files with the
same columns can be loaded as well.
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .alloy_data import ALLOY_ROWS
from .numerics import make_rng

# Fixed one-hot order; changing it would silently re-wire every trained model.
ELEMENTS = ("Si", "Fe", "Cu", "Zn", "Mn", "Mg")
ELEMENT_INDEX = {sym: i for i, sym in enumerate(ELEMENTS)}

N_INTENSITIES = 10
CSV_HEADER = ["concentration"] + [f"i{k}" for k in range(1, 11)] + ["element"]


class DatasetError(ValueError):
    """Malformed records, files, or split parameters."""


def canonical_element(symbol):
    """Case-insensitive element lookup; raises DatasetError on unknowns."""
    sym = str(symbol).strip().capitalize()
    if sym not in ELEMENT_INDEX:
        raise DatasetError(f"unknown element {symbol!r}; expected one of {ELEMENTS}")
    return sym


@dataclass(frozen=True)
class SpectralRecord:
    """One row: target concentration (wt%), 10 intensities, element label."""

    concentration: float
    intensities: tuple
    element: str

    def __post_init__(self):
        object.__setattr__(self, "concentration", float(self.concentration))
        object.__setattr__(self, "intensities", tuple(float(v) for v in self.intensities))
        if len(self.intensities) != N_INTENSITIES:
            raise DatasetError(
                f"expected {N_INTENSITIES} intensities, got {len(self.intensities)}")
        if not self.concentration > 0:
            raise DatasetError(f"concentration must be positive, got {self.concentration}")
        if any(not v > 0 for v in self.intensities):
            raise DatasetError("intensities must be positive")
        object.__setattr__(self, "element", canonical_element(self.element))


@dataclass(frozen=True)
class Dataset:
    """Ordered, immutable collection of records plus their provenance."""

    records: tuple
    provenance: str = "embedded"

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def concentrations(self):
        return np.array([r.concentration for r in self.records])

    def intensity_matrix(self):
        return np.array([r.intensities for r in self.records])

    def element_counts(self):
        counts = {sym: 0 for sym in ELEMENTS}
        for r in self.records:
            counts[r.element] += 1
        return counts


def load_embedded():
    """The canonical 42-record dataset (7 alloys x 6 elements)."""
    records = tuple(SpectralRecord(c, tuple(ints), e) for c, ints, e in ALLOY_ROWS)
    return Dataset(records, provenance="embedded")


def parse_csv(path):
    """Load records from a CSV with header concentration,i1,...,i10,element.

    Any malformed row raises DatasetError naming the offending row number
    (1-based, counting the header as row 1).
    """
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise DatasetError(f"cannot open {path}: {exc}") from exc
    with fh:
        return _parse_csv_stream(fh, str(path))


def _parse_csv_stream(fh, name):
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise DatasetError(f"{name}: empty file, expected header {','.join(CSV_HEADER)}")
    if [h.strip() for h in header] != CSV_HEADER:
        raise DatasetError(
            f"{name}: row 1: bad header {header!r}, expected {','.join(CSV_HEADER)}")
    records = []
    for rownum, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(CSV_HEADER):
            raise DatasetError(
                f"{name}: row {rownum}: expected {len(CSV_HEADER)} columns, got {len(row)}")
        try:
            conc = float(row[0])
            intensities = tuple(float(v) for v in row[1:11])
        except ValueError as exc:
            raise DatasetError(f"{name}: row {rownum}: {exc}") from exc
        try:
            records.append(SpectralRecord(conc, intensities, row[11]))
        except DatasetError as exc:
            raise DatasetError(f"{name}: row {rownum}: {exc}") from exc
    if not records:
        raise DatasetError(f"{name}: no data rows")
    return Dataset(tuple(records), provenance=name)


def write_csv(dataset, path):
    """Write a dataset in the same CSV schema parse_csv reads."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in dataset:
            writer.writerow([repr(r.concentration)]
                            + [repr(v) for v in r.intensities]
                            + [r.element])


def dataset_to_csv_string(dataset):
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(CSV_HEADER)
    for r in dataset:
        writer.writerow([repr(r.concentration)] + [repr(v) for v in r.intensities]
                        + [r.element])
    return buf.getvalue()


def _round_half_away(x):
    # round(8.5) -> 8 under banker's rounding; the split rule wants 9.
    return int(np.floor(x + 0.5))


def split(dataset, test_fraction, seed):
    """Deterministic shuffled partition into (train, test).

    Test size is round-half-away-from-zero(test_fraction * n); the shuffle
    is driven entirely by the seed, so the same seed always reproduces the
    same partition.
    """
    n = len(dataset)
    if n == 0:
        raise DatasetError("cannot split an empty dataset")
    if not 0 <= test_fraction < 1:
        raise DatasetError(f"test_fraction must be in [0, 1), got {test_fraction}")
    n_test = _round_half_away(test_fraction * n)
    rng = make_rng(seed)
    perm = rng.permutation(n)
    test_records = tuple(dataset.records[i] for i in perm[:n_test])
    train_records = tuple(dataset.records[i] for i in perm[n_test:])
    return (Dataset(train_records, provenance=dataset.provenance),
            Dataset(test_records, provenance=dataset.provenance))


@dataclass(frozen=True)
class Scaler:
    """Feature standardization and target normalization, fitted on train only.

    Intensities are standardized per column by training mean/std (a constant
    column gets divisor 1 so nothing blows up); the target is mapped onto
    [0, 1] by the training min/max. Both directions are exact inverses.
    """

    means: np.ndarray
    stds: np.ndarray
    target_min: float
    target_max: float

    @property
    def target_range(self):
        r = self.target_max - self.target_min
        return r if r > 0 else 1.0

    def transform_intensities(self, intensities):
        return (np.asarray(intensities, dtype=np.float64) - self.means) / self.stds

    def inverse_intensities(self, scaled):
        return np.asarray(scaled, dtype=np.float64) * self.stds + self.means

    def normalize_target(self, y):
        return (np.asarray(y, dtype=np.float64) - self.target_min) / self.target_range

    def denormalize_target(self, y_norm):
        return np.asarray(y_norm, dtype=np.float64) * self.target_range + self.target_min

    def to_dict(self):
        return {
            "means": list(self.means),
            "stds": list(self.stds),
            "target_min": self.target_min,
            "target_max": self.target_max,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(np.array(d["means"], dtype=np.float64),
                   np.array(d["stds"], dtype=np.float64),
                   float(d["target_min"]), float(d["target_max"]))


def fit_scaler(train):
    """Fit the per-column standardizer and target [0,1] map on a training set."""
    if len(train) == 0:
        raise DatasetError("cannot fit a scaler on an empty training set")
    intensities = train.intensity_matrix()
    means = intensities.mean(axis=0)
    stds = intensities.std(axis=0)
    stds = np.where(stds > 0, stds, 1.0)
    targets = train.concentrations()
    return Scaler(means, stds, float(targets.min()), float(targets.max()))


@dataclass(frozen=True)
class EncodedSequence:
    """A record as a 10-step sequence: (scaled intensity, element one-hot)."""

    steps: np.ndarray  # (10, 1 + len(ELEMENTS))
    target: float      # normalized concentration

    def __post_init__(self):
        if self.steps.shape != (N_INTENSITIES, 1 + len(ELEMENTS)):
            raise DatasetError(f"bad sequence shape {self.steps.shape}")


def one_hot(element):
    vec = np.zeros(len(ELEMENTS))
    vec[ELEMENT_INDEX[canonical_element(element)]] = 1.0
    return vec


def encode(record, scaler):
    """Record -> length-10 sequence; the one-hot block repeats at every step
    so the element identity is visible to a recurrent cell throughout."""
    scaled = scaler.transform_intensities(record.intensities)
    hot = one_hot(record.element)
    steps = np.empty((N_INTENSITIES, 1 + len(ELEMENTS)))
    steps[:, 0] = scaled
    steps[:, 1:] = hot
    return EncodedSequence(steps, float(scaler.normalize_target(record.concentration)))


def encode_flat(record, scaler):
    """Record -> flat 16-feature vector (10 scaled intensities, one-hot)."""
    scaled = scaler.transform_intensities(record.intensities)
    return np.concatenate([scaled, one_hot(record.element)])


def sequence_arrays(dataset, scaler):
    """Encode a dataset as (X, y) with X of shape (n, 10, 7)."""
    seqs = [encode(r, scaler) for r in dataset]
    X = np.stack([s.steps for s in seqs]) if seqs else np.zeros((0, N_INTENSITIES, 7))
    y = np.array([s.target for s in seqs])
    return X, y


def flat_arrays(dataset, scaler):
    """Encode a dataset as (X, y) with X of shape (n, 16)."""
    X = (np.stack([encode_flat(r, scaler) for r in dataset])
         if len(dataset) else np.zeros((0, N_INTENSITIES + len(ELEMENTS))))
    y = scaler.normalize_target(np.array([r.concentration for r in dataset]))
    return X, y


FLAT_FEATURE_NAMES = tuple(f"i{k}" for k in range(1, 11)) + ELEMENTS
