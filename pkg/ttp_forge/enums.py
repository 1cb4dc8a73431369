"""Enumerations for ttp-forge.

This module defines enum types used throughout the toolkit for
type safety and consistent value handling.

Enums:
    KpType: Knapsack categories of the benchmark suite
    EdgeWeightKind: Rounding rule applied to Euclidean distances
    FeatureSet: Monomial bases over (ipr_std, rdist_std) for score functions
    SrTask: Loss family of a symbolic-regression dataset
    PipelineStage: Stages of the analysis pipeline

Example usage:
    from ttp_forge.enums import FeatureSet, KpType

    kp_type = KpType.from_string("uncorr")
    for exponents in FeatureSet.T4.terms:
        print(exponents)
"""

from __future__ import annotations

from enum import Enum


class KpType(Enum):
    """Knapsack categories, valued by their label in instance files."""

    BOUNDED_STRONGLY_CORR = "bounded strongly corr"
    UNCORR_SIMILAR_WEIGHTS = "uncorrelated, similar weights"
    UNCORR = "uncorrelated"

    @property
    def slug(self) -> str:
        """Short hyphenated name used in instance names, CSVs and the CLI."""
        return _KP_SLUGS[self]

    @classmethod
    def from_string(cls, text: str) -> KpType:
        """Resolve a file label or slug (case-insensitive).

        Raises:
            ValueError: If text names no knapsack type
        """
        key = text.strip().lower()
        for kp_type in cls:
            if key in (kp_type.value, kp_type.slug, kp_type.name.lower()):
                return kp_type
        raise ValueError(
            f"Unknown knapsack type: {text}. "
            f"Valid options: {', '.join(kp_type.slug for kp_type in cls)}"
        )


_KP_SLUGS = {
    KpType.BOUNDED_STRONGLY_CORR: "bounded-strongly-corr",
    KpType.UNCORR_SIMILAR_WEIGHTS: "uncorr-similar-weights",
    KpType.UNCORR: "uncorr",
}


class EdgeWeightKind(Enum):
    """Distance rounding rules for 2-D coordinates."""

    CEIL_2D = "CEIL_2D"  # Benchmark convention: round up
    EUC_2D = "EUC_2D"  # TSPLIB nearest-integer rounding


class FeatureSet(Enum):
    """Score-function bases over x0 = ipr_std and x1 = rdist_std.

    The two five-term sets differ in their squared term: T5A adds x0^2,
    T5B adds x1^2 (named 5T1 / 5T2 in some write-ups).
    """

    T3 = "3T"
    T4 = "4T"
    T5A = "5TA"
    T5B = "5TB"
    T6 = "6T"

    @property
    def terms(self) -> tuple[tuple[int, int], ...]:
        """Exponent pairs (power of x0, power of x1) of each basis term."""
        return _FEATURE_TERMS[self]

    @property
    def arity(self) -> int:
        return len(self.terms)

    @property
    def parameter_names(self) -> tuple[str, ...]:
        """Names of the genotype entries: w0..wk then percent."""
        return tuple(f"w{i}" for i in range(self.arity)) + ("percent",)

    @classmethod
    def from_string(cls, text: str) -> FeatureSet:
        """Resolve "6T", "T6" or the enum name (case-insensitive).

        Raises:
            ValueError: If text names no feature set
        """
        key = text.strip().upper()
        for feature_set in cls:
            if key in (feature_set.value, feature_set.name):
                return feature_set
        raise ValueError(
            f"Unknown feature set: {text}. "
            f"Valid options: {', '.join(feature_set.name for feature_set in cls)}"
        )


_FEATURE_TERMS = {
    FeatureSet.T3: ((1, 0), (0, 1)),
    FeatureSet.T4: ((1, 0), (0, 1), (1, 1)),
    FeatureSet.T5A: ((1, 0), (0, 1), (1, 1), (2, 0)),
    FeatureSet.T5B: ((1, 0), (0, 1), (1, 1), (0, 2)),
    FeatureSet.T6: ((1, 0), (0, 1), (1, 1), (2, 0), (0, 2)),
}


class SrTask(Enum):
    """Loss family of a symbolic-regression dataset."""

    BINARY_BCE = "bce"
    REGRESSION_MAE = "mae"


class PipelineStage(Enum):
    """Analysis pipeline stages, in execution order."""

    EA_DATA = "ea-data"
    NLBC = "nlbc"
    META_DATA = "meta-data"
    FIT_MODEL = "fit-model"
