"""Parameter models: genotype values as functions of the capacity factor.

A ParameterModel maps every (feature set, knapsack type, parameter) cell to
a one-variable curve over the capacity factor C. Curves are linear fits,
piecewise-linear tables over C = 1..10 or evolved expressions. The
pipeline fits a model from meta-EA genotypes; the packaged default model
is written by `ttp-forge build-model` (see harness.model_build).

Example usage:
    from ttp_forge.parameter_model import load_default_model, predict_genotype

    model = load_default_model()
    genotype = predict_genotype(model, FeatureSet.T6, KpType.UNCORR, 4)
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
import csv
from dataclasses import dataclass, field
import io
import logging
from pathlib import Path

import numpy as np

from ttp_forge.config import (
    ANOMALY_GRID_POINTS,
    ANOMALY_RESIDUAL_FACTOR,
    CAPACITY_FACTORS,
    DEFAULT_MODEL_PATH,
    MODEL_FORMAT_VERSION,
    SR_RUNS,
)
from ttp_forge.enums import FeatureSet, KpType, SrTask
from ttp_forge.errors import DegenerateGenotypeError, ModelError, ParseError
from ttp_forge.evolution import Genotype, normalize_weights
from ttp_forge.seeding import make_rng, spawn_seeds
from ttp_forge.sr.engine import SrConfig, independent_runs
from ttp_forge.sr.expr import ExprTree, parse_prefix
from ttp_forge.sr.fitness import SrDataset

logger = logging.getLogger(__name__)

MODEL_HEADER = f"# ttp-forge parameter model v{MODEL_FORMAT_VERSION}"
CURVE_KINDS = ("linear", "pwl", "expr")
FIT_METHODS = ("sr", "linear", "pwl")
PERCENT = "percent"

CellKey = tuple[FeatureSet, KpType, str]


@dataclass(frozen=True)
class ParameterCurve:
    """A real function of the capacity factor.

    Attributes:
        kind: "linear" (intercept, slope), "pwl" (values at C = 1..10) or "expr"
        coeffs: Numeric coefficients for linear and pwl curves
        expr: Expression over x0 = C for expr curves
    """

    kind: str
    coeffs: tuple[float, ...] = ()
    expr: ExprTree | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.kind not in CURVE_KINDS:
            raise ModelError(f"Unknown curve kind: {self.kind}. Valid options: {', '.join(CURVE_KINDS)}")
        if self.kind == "linear" and len(self.coeffs) != 2:
            raise ModelError(f"Linear curve needs 2 coefficients (got {len(self.coeffs)})")
        if self.kind == "pwl" and len(self.coeffs) != len(CAPACITY_FACTORS):
            raise ModelError(f"Piecewise-linear curve needs {len(CAPACITY_FACTORS)} values (got {len(self.coeffs)})")
        if self.kind == "expr" and self.expr is None:
            raise ModelError("Expression curve is missing its expression")

    @classmethod
    def linear(cls, intercept: float, slope: float) -> ParameterCurve:
        return cls("linear", (float(intercept), float(slope)))

    @classmethod
    def piecewise(cls, values: Sequence[float]) -> ParameterCurve:
        return cls("pwl", tuple(float(v) for v in values))

    @classmethod
    def expression(cls, expr: ExprTree) -> ParameterCurve:
        return cls("expr", (), expr)

    def __call__(self, capacity_factor: float | np.ndarray) -> float | np.ndarray:
        c = np.asarray(capacity_factor, dtype=np.float64)
        if self.kind == "linear":
            intercept, slope = self.coeffs
            values = intercept + slope * c
        elif self.kind == "pwl":
            values = np.interp(c, CAPACITY_FACTORS, self.coeffs)
        else:
            assert self.expr is not None
            values = self.expr.execute(np.atleast_1d(c).reshape(-1, 1))
            if c.ndim == 0:
                values = values[0]
        return float(values) if np.ndim(values) == 0 else values

    def fields(self) -> list[str]:
        """Trailing CSV fields of this curve."""
        if self.kind == "expr":
            assert self.expr is not None
            return [self.expr.to_prefix()]
        return [repr(value) for value in self.coeffs]


@dataclass
class ParameterModel:
    """Curves keyed by (feature set, knapsack type, parameter name)."""

    curves: dict[CellKey, ParameterCurve] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.curves)

    def set(self, feature_set: FeatureSet, kp_type: KpType, param: str, curve: ParameterCurve) -> None:
        if param not in feature_set.parameter_names:
            raise ModelError(
                f"{feature_set.name} has no parameter '{param}'. Valid options: {', '.join(feature_set.parameter_names)}"
            )
        self.curves[(feature_set, kp_type, param)] = curve

    def curve(self, feature_set: FeatureSet, kp_type: KpType, param: str) -> ParameterCurve:
        try:
            return self.curves[(feature_set, kp_type, param)]
        except KeyError:
            raise ModelError(f"Model has no curve for {feature_set.name}/{kp_type.slug}/{param}") from None

    def covers(self, feature_set: FeatureSet, kp_type: KpType) -> bool:
        return all((feature_set, kp_type, param) in self.curves for param in feature_set.parameter_names)


def predict_genotype(
    model: ParameterModel, feature_set: FeatureSet, kp_type: KpType | None, capacity_factor: float
) -> Genotype:
    """Evaluate every parameter curve at C, normalize weights and clamp the percent.

    Raises:
        ModelError: If a curve is missing, the knapsack type is unknown or
            the predicted weights are all zero
        ValueError: If C lies outside [1, 10]
    """
    if kp_type is None:
        raise ModelError("Instance has no knapsack type; cannot select model curves")
    if not CAPACITY_FACTORS[0] <= capacity_factor <= CAPACITY_FACTORS[-1]:
        raise ValueError(f"Capacity factor must lie in [1, 10] (got {capacity_factor})")
    weights = []
    for param in feature_set.parameter_names[:-1]:
        value = float(model.curve(feature_set, kp_type, param)(capacity_factor))
        weights.append(value if np.isfinite(value) else 0.0)
    percent = float(model.curve(feature_set, kp_type, PERCENT)(capacity_factor))
    percent = float(np.clip(percent, 0.0, 1.0)) if np.isfinite(percent) else 0.0
    try:
        return normalize_weights(Genotype(tuple(weights), percent, feature_set))
    except DegenerateGenotypeError as e:
        raise ModelError(f"{feature_set.name}/{kp_type.slug} predicts all-zero weights at C={capacity_factor}") from e


# Serialization


def serialize_model(model: ParameterModel, comments: Sequence[str] = ()) -> str:
    """Render a model in the versioned CSV layout.

    Each comment becomes a "# " line between the version header and the
    column row; parse_model skips them.
    """
    buffer = io.StringIO()
    buffer.write(MODEL_HEADER + "\n")
    for comment in comments:
        buffer.write(f"# {comment}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["feature_set", "kp_type", "param", "kind", "coeffs"])
    order = {fs: i for i, fs in enumerate(FeatureSet)}
    kp_order = {kp: i for i, kp in enumerate(KpType)}

    def key(cell: CellKey) -> tuple:
        feature_set, kp_type, param = cell
        return (order[feature_set], kp_order[kp_type], feature_set.parameter_names.index(param))

    for cell in sorted(model.curves, key=key):
        feature_set, kp_type, param = cell
        curve = model.curves[cell]
        writer.writerow([feature_set.name, kp_type.slug, param, curve.kind, *curve.fields()])
    return buffer.getvalue()


def parse_model(text: str) -> ParameterModel:
    """Parse the versioned CSV layout.

    Raises:
        ModelError: On a missing or unsupported version header, or malformed rows
    """
    lines = text.splitlines()
    if not lines or lines[0].strip() != MODEL_HEADER:
        found = lines[0].strip() if lines else "empty file"
        raise ModelError(f"Expected header '{MODEL_HEADER}', found '{found}'")
    model = ParameterModel()
    reader = csv.reader(lines[1:])
    for line_number, row in enumerate(reader, start=2):
        if not row or row[0].startswith("#"):
            continue
        if row[0] == "feature_set":
            continue
        if len(row) < 5:
            raise ModelError(f"line {line_number}: expected feature_set,kp_type,param,kind,coeffs...")
        try:
            feature_set = FeatureSet.from_string(row[0])
            kp_type = KpType.from_string(row[1])
            param, kind = row[2].strip(), row[3].strip()
            if kind == "expr":
                curve = ParameterCurve.expression(parse_prefix(row[4], n_features=1))
            elif kind in CURVE_KINDS:
                curve = ParameterCurve(kind, tuple(float(value) for value in row[4:]))
            else:
                raise ModelError(f"Unknown curve kind: {kind}. Valid options: {', '.join(CURVE_KINDS)}")
            model.set(feature_set, kp_type, param, curve)
        except (ValueError, ParseError, ModelError) as e:
            raise ModelError(f"line {line_number}: {e}") from e
    return model


def default_model_path() -> Path:
    """Where `ttp-forge build-model` writes the packaged model."""
    return Path(__file__).parent / DEFAULT_MODEL_PATH


def save_model(model: ParameterModel, path: str | Path, comments: Sequence[str] = ()) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_model(model, comments))


def load_model(path: str | Path) -> ParameterModel:
    return parse_model(Path(path).read_text())


def load_default_model() -> ParameterModel:
    """Load the packaged model.

    Raises:
        ModelError: If the packaged model has not been built
    """
    path = default_model_path()
    if not path.exists():
        raise ModelError(f"No packaged parameter model at {path}; run 'ttp-forge build-model' or pass --model")
    return load_model(path)


# Fitting


@dataclass(frozen=True)
class GenotypeRecord:
    """A best meta-EA genotype for one instance and feature set."""

    instance: str
    kp_type: KpType
    capacity_factor: int
    item_factor: float
    feature_set: FeatureSet
    values: tuple[float, ...]
    objective: float

    def value(self, param: str) -> float:
        return self.values[self.feature_set.parameter_names.index(param)]


def _median_table(c: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    levels = np.unique(c)
    return levels, np.array([np.median(y[c == level]) for level in levels])


def fit_piecewise(c: np.ndarray, y: np.ndarray) -> ParameterCurve:
    """Per-C medians, interpolated (and held constant past the ends) over C = 1..10."""
    levels, medians = _median_table(c, y)
    return ParameterCurve.piecewise(np.interp(CAPACITY_FACTORS, levels, medians))


def fit_linear(c: np.ndarray, y: np.ndarray) -> ParameterCurve:
    """Least-squares line; piecewise-linear when fewer than two distinct C values exist."""
    if np.unique(c).size < 2:
        return fit_piecewise(c, y)
    slope, intercept = np.polyfit(c, y, 1)
    return ParameterCurve.linear(intercept, slope)


def is_anomalous(curve: ParameterCurve, c: np.ndarray, y: np.ndarray) -> bool:
    """Whether a fitted curve strays from the per-C medians.

    A curve is anomalous when it is non-finite anywhere on the C grid, or
    when its largest deviation from the interpolated medians exceeds
    ANOMALY_RESIDUAL_FACTOR times the median residual of the data.
    """
    levels, medians = _median_table(c, y)
    grid = np.linspace(CAPACITY_FACTORS[0], CAPACITY_FACTORS[-1], ANOMALY_GRID_POINTS)
    with np.errstate(all="ignore"):
        predicted = np.asarray(curve(grid), dtype=np.float64)
    if not np.isfinite(predicted).all():
        return True
    reference = np.interp(grid, levels, medians)
    data_residual = float(np.median(np.abs(y - np.interp(c, levels, medians))))
    return float(np.max(np.abs(predicted - reference))) > ANOMALY_RESIDUAL_FACTOR * data_residual + 1e-9


def fit_sr(c: np.ndarray, y: np.ndarray, config: SrConfig, runs: int = SR_RUNS, seed: int = 0) -> ParameterCurve:
    """Lowest-MAE expression over independent SR runs, with anomaly substitution."""
    if np.unique(c).size < 2:
        return fit_piecewise(c, y)
    dataset = SrDataset(inputs=c.reshape(-1, 1), targets=y, task=SrTask.REGRESSION_MAE, variable_names=("C",))
    results = independent_runs(dataset, config, spawn_seeds(seed, runs), track_front=False)
    best = min(results, key=lambda result: result.best_loss)
    curve = ParameterCurve.expression(best.best)
    if is_anomalous(curve, c, y):
        logger.warning("Anomalous SR curve %s replaced by a linear fit", best.best.to_prefix())
        return fit_linear(c, y)
    return curve


def fit_parameter_model(
    records: Iterable[GenotypeRecord],
    method: str = "linear",
    sr_config: SrConfig | None = None,
    runs: int = SR_RUNS,
    seed: int = 0,
) -> ParameterModel:
    """Fit one curve per (feature set, knapsack type, parameter) against C.

    Args:
        records: Best meta-EA genotypes
        method: "sr", "linear" or "pwl"
        sr_config: GP settings for the "sr" method
        runs: Independent SR runs per cell
        seed: Root seed for SR runs

    Returns:
        A model covering every cell present in the records

    Raises:
        ValueError: If method is unknown
    """
    if method not in FIT_METHODS:
        raise ValueError(f"Unknown fit method: {method}. Valid options: {', '.join(FIT_METHODS)}")
    grouped: dict[tuple[FeatureSet, KpType], list[GenotypeRecord]] = {}
    for record in records:
        grouped.setdefault((record.feature_set, record.kp_type), []).append(record)

    model = ParameterModel()
    for cell_index, ((feature_set, kp_type), cell_records) in enumerate(sorted(
        grouped.items(), key=lambda item: (list(FeatureSet).index(item[0][0]), list(KpType).index(item[0][1]))
    )):
        c = np.array([record.capacity_factor for record in cell_records], dtype=np.float64)
        for param_index, param in enumerate(feature_set.parameter_names):
            y = np.array([record.value(param) for record in cell_records], dtype=np.float64)
            if method == "pwl":
                curve = fit_piecewise(c, y)
            elif method == "linear":
                curve = fit_linear(c, y)
            else:
                curve = fit_sr(c, y, sr_config or SrConfig(), runs, seed + 1000 * cell_index + param_index)
            model.set(feature_set, kp_type, param, curve)
        logger.info("Fitted %s/%s from %d genotypes", feature_set.name, kp_type.slug, len(cell_records))
    return model


# Validation


def split_records(
    records: Sequence[GenotypeRecord], holdout: float, seed: int | None = None
) -> tuple[list[GenotypeRecord], list[GenotypeRecord]]:
    """Shuffle records into (training, held-out) lists.

    The held-out share is rounded to whole records and both lists are
    non-empty.

    Raises:
        ValueError: If holdout lies outside (0, 1) or fewer than 2 records are given
    """
    if not 0.0 < holdout < 1.0:
        raise ValueError(f"Holdout fraction must lie in (0, 1) (got {holdout})")
    if len(records) < 2:
        raise ValueError(f"Need at least 2 records to split (got {len(records)})")
    order = make_rng(seed).permutation(len(records))
    held = min(max(1, round(holdout * len(records))), len(records) - 1)
    return [records[i] for i in order[held:]], [records[i] for i in order[:held]]


def prediction_errors(model: ParameterModel, records: Iterable[GenotypeRecord]) -> dict[tuple[FeatureSet, str], float]:
    """Mean |predicted - recorded| per feature set and parameter.

    Predictions go through predict_genotype, so weights are compared on the
    unit sphere. Records with all-zero weights (the meta EA never improved)
    carry no direction and are skipped.

    Raises:
        ModelError: If the model lacks a record's cell
    """
    totals: dict[tuple[FeatureSet, str], list[float]] = {}
    skipped = 0
    for record in records:
        feature_set = record.feature_set
        if not any(record.values[: feature_set.arity]):
            skipped += 1
            continue
        predicted = predict_genotype(model, feature_set, record.kp_type, record.capacity_factor)
        for param, value in zip(feature_set.parameter_names, (*predicted.weights, predicted.percent)):
            totals.setdefault((feature_set, param), []).append(abs(value - record.value(param)))
    if skipped:
        logger.debug("Skipped %d zero-weight records", skipped)
    return {key: float(np.mean(errors)) for key, errors in totals.items()}
