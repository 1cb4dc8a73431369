"""Item features for a fixed tour.

Each item is described by its profitability ratio (IPR = p / w) and by the
distance still to travel after picking it up (rDist). Both are robustly
standardized per instance to zero median and unit median absolute
deviation, which keeps a few very profitable items from dominating.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
import hashlib

import numpy as np

from ttp_forge.config import ANALYSIS_MASK_BOUND
from ttp_forge.enums import FeatureSet
from ttp_forge.instance import TtpInstance
from ttp_forge.objective import PackingPlan, TourProfile
from ttp_forge.tour import Tour


def tour_tag(tour: Tour) -> str:
    """Short provenance tag identifying a tour."""
    digest = hashlib.sha1(",".join(map(str, tour.order)).encode("ascii")).hexdigest()
    return digest[:12]


def robust_standardize(values: Sequence[float] | np.ndarray) -> np.ndarray:
    """Shift to zero median and scale to unit median absolute deviation.

    A zero MAD yields all zeros.

    Raises:
        ValueError: If values is empty
    """
    array = np.asarray(values, dtype=np.float64)
    if array.size == 0:
        raise ValueError("Cannot standardize an empty list")
    median = np.median(array)
    mad = np.median(np.abs(array - median))
    if mad == 0:
        return np.zeros_like(array)
    return (array - median) / mad


@dataclass(frozen=True)
class ItemFeatureTable:
    """Raw and standardized features, indexed by item position.

    Attributes:
        ipr_raw: p / w per item
        rdist_raw: Remaining tour distance from the item's city
        ipr_std: Robustly standardized IPR
        rdist_std: Robustly standardized rDist
        tour_id: Tag of the tour the features were computed on
    """

    ipr_raw: np.ndarray = field(repr=False)
    rdist_raw: np.ndarray = field(repr=False)
    ipr_std: np.ndarray = field(repr=False)
    rdist_std: np.ndarray = field(repr=False)
    tour_id: str = ""

    def __len__(self) -> int:
        return int(self.ipr_raw.size)


def compute_features(instance: TtpInstance, tour: Tour, profile: TourProfile | None = None) -> ItemFeatureTable:
    """Compute IPR and rDist for every item along `tour`."""
    if profile is None:
        profile = TourProfile.build(instance, tour)
    ipr = instance.profits / instance.weights
    rdist = profile.rdist.astype(np.float64)
    if instance.m_total == 0:
        empty = np.zeros(0)
        return ItemFeatureTable(empty, empty, empty, empty, tour_tag(tour))
    return ItemFeatureTable(
        ipr_raw=ipr,
        rdist_raw=rdist,
        ipr_std=robust_standardize(ipr),
        rdist_std=robust_standardize(rdist),
        tour_id=tour_tag(tour),
    )


def analysis_mask(table: ItemFeatureTable, bound: float = ANALYSIS_MASK_BOUND) -> np.ndarray:
    """Items whose standardized features both lie in the closed interval [-bound, bound]."""
    return (np.abs(table.ipr_std) <= bound) & (np.abs(table.rdist_std) <= bound)


def feature_matrix(table: ItemFeatureTable, feature_set: FeatureSet) -> np.ndarray:
    """Basis terms of `feature_set` evaluated per item, shape (m, arity)."""
    x0, x1 = table.ipr_std, table.rdist_std
    columns = [x0**a * x1**b for a, b in feature_set.terms]
    return np.column_stack(columns) if columns else np.zeros((len(table), 0))


def export_rows(table: ItemFeatureTable, plan: PackingPlan) -> list[tuple[int, float, float, int]]:
    """Rows (item_id, ipr_std, rdist_std, packed) for the plan dataset."""
    return [
        (index + 1, float(table.ipr_std[index]), float(table.rdist_std[index]), int(plan.bits[index]))
        for index in range(len(table))
    ]
