"""Benchmark-suite generation.

A suite is the full factorial of knapsack types, item factors and capacity
factors over one coordinate set: 3 x 3 x 10 = 90 instances by default.
Coordinates come from a TSPLIB file or a built-in synthetic generator. All
instances share the reference tour of the coordinate set, and every
instance's items are drawn from a seed derived from the suite seed and its
factorial cell, so regeneration is byte-identical.

CSV Structure (manifest.csv):
    file,name,kp_type,capacity_factor,item_factor,seed
"""

from __future__ import annotations

from dataclasses import dataclass, field
import logging
from pathlib import Path

import numpy as np

from ttp_forge.config import (
    CAPACITY_FACTORS,
    ITEM_FACTORS,
    SUITE_ITEM_FACTORS,
    SYNTHETIC_CLUSTER_COUNT,
    SYNTHETIC_CLUSTER_SPREAD,
    SYNTHETIC_COORD_RANGE,
)
from ttp_forge.enums import EdgeWeightKind, KpType
from ttp_forge.errors import StageError
from ttp_forge.harness.records import read_table, write_table
from ttp_forge.instance import TtpInstance
from ttp_forge.instance_generation import generate_instance
from ttp_forge.instance_io import read_tsp_coords, read_ttp, write_ttp
from ttp_forge.seeding import derive_seed, make_rng
from ttp_forge.tour import reference_tour

logger = logging.getLogger(__name__)

SYNTHETIC_KINDS = ("uniform", "clustered")
MANIFEST_NAME = "manifest.csv"
MANIFEST_COLUMNS = ("file", "name", "kp_type", "capacity_factor", "item_factor", "seed")


def uniform_coords(rng: np.random.Generator, cities: int) -> list[tuple[float, float]]:
    """Integer points drawn uniformly from the square [0, SYNTHETIC_COORD_RANGE]^2."""
    points = rng.integers(0, int(SYNTHETIC_COORD_RANGE), size=(cities, 2), endpoint=True)
    return [(float(x), float(y)) for x, y in points]


def clustered_coords(rng: np.random.Generator, cities: int) -> list[tuple[float, float]]:
    """Integer points scattered normally around a few uniform cluster centers."""
    centers = rng.uniform(0.0, SYNTHETIC_COORD_RANGE, size=(SYNTHETIC_CLUSTER_COUNT, 2))
    membership = rng.integers(0, SYNTHETIC_CLUSTER_COUNT, size=cities)
    points = centers[membership] + rng.normal(0.0, SYNTHETIC_CLUSTER_SPREAD, size=(cities, 2))
    points = np.clip(np.rint(points), 0.0, SYNTHETIC_COORD_RANGE)
    return [(float(x), float(y)) for x, y in points]


@dataclass(frozen=True)
class SuiteSpec:
    """What to generate.

    Attributes:
        coords_path: TSPLIB coordinate file; None selects a synthetic set
        synthetic: Synthetic generator, "uniform" or "clustered"
        cities: City count of a synthetic set
        item_factors: Item factors F of the factorial
        capacity_factors: Capacity factors C of the factorial
        kp_types: Knapsack types of the factorial
        seed: Suite seed
        base_name: Name prefix; defaults to the TSPLIB name or the generator
    """

    coords_path: Path | None = None
    synthetic: str = "uniform"
    cities: int = 51
    item_factors: tuple[int, ...] = SUITE_ITEM_FACTORS
    capacity_factors: tuple[int, ...] = CAPACITY_FACTORS
    kp_types: tuple[KpType, ...] = field(default_factory=lambda: tuple(KpType))
    seed: int = 0
    base_name: str | None = None

    def __post_init__(self) -> None:
        if self.coords_path is None:
            if self.synthetic not in SYNTHETIC_KINDS:
                raise ValueError(f"Unknown synthetic set: {self.synthetic}. Valid options: {', '.join(SYNTHETIC_KINDS)}")
            if self.cities < 2:
                raise ValueError(f"A synthetic set needs at least 2 cities (got {self.cities})")
        bad_f = [f for f in self.item_factors if f not in ITEM_FACTORS]
        if bad_f or not self.item_factors:
            raise ValueError(f"Invalid item factors: {bad_f}. Valid options: {', '.join(map(str, ITEM_FACTORS))}")
        bad_c = [c for c in self.capacity_factors if c not in CAPACITY_FACTORS]
        if bad_c or not self.capacity_factors:
            raise ValueError(f"Invalid capacity factors: {bad_c}. Valid options: 1..{CAPACITY_FACTORS[-1]}")
        if not self.kp_types:
            raise ValueError("At least one knapsack type is required")

    @property
    def size(self) -> int:
        return len(self.kp_types) * len(self.item_factors) * len(self.capacity_factors)


@dataclass(frozen=True)
class SuiteEntry:
    """One manifest row."""

    file: str
    name: str
    kp_type: KpType
    capacity_factor: int
    item_factor: int
    seed: int

    def to_row(self) -> tuple:
        return (self.file, self.name, self.kp_type.slug, self.capacity_factor, self.item_factor, self.seed)


def load_coordinates(spec: SuiteSpec) -> tuple[str, list[tuple[float, float]], EdgeWeightKind]:
    """Coordinates of the suite as (base name, points, edge rounding)."""
    if spec.coords_path is not None:
        tsp = read_tsp_coords(spec.coords_path)
        return spec.base_name or tsp.name, list(tsp.coords), tsp.edge_weight_kind
    rng = make_rng(derive_seed(spec.seed, 0))
    generator = uniform_coords if spec.synthetic == "uniform" else clustered_coords
    base = spec.base_name or f"{spec.synthetic}{spec.cities}"
    return base, generator(rng, spec.cities), EdgeWeightKind.CEIL_2D


def generate_suite(spec: SuiteSpec, out_dir: str | Path) -> list[SuiteEntry]:
    """Write every instance of the factorial and a manifest.

    Args:
        spec: Suite description
        out_dir: Output directory, created if missing

    Returns:
        The manifest entries in write order
    """
    out_dir = Path(out_dir)
    base, coords, edge_kind = load_coordinates(spec)
    tour = reference_tour(TtpInstance.from_coordinates(base, coords, edge_kind))
    logger.info("Generating %d instances of %s (%d cities, tour length %d)", spec.size, base, len(coords), tour.total_length)

    entries = []
    for kp_type in spec.kp_types:
        for item_factor in spec.item_factors:
            for capacity_factor in spec.capacity_factors:
                seed = derive_seed(spec.seed, list(KpType).index(kp_type), item_factor, capacity_factor)
                instance = generate_instance(
                    coords,
                    item_factor,
                    kp_type,
                    capacity_factor,
                    tour=tour,
                    seed=seed,
                    base_name=base,
                    edge_weight_kind=edge_kind,
                )
                file_name = f"{instance.name}.ttp"
                write_ttp(out_dir / file_name, instance)
                entries.append(SuiteEntry(file_name, instance.name, kp_type, capacity_factor, item_factor, seed))
                logger.debug("Wrote %s (R=%.6g)", file_name, instance.renting_ratio)

    write_table(out_dir / MANIFEST_NAME, MANIFEST_COLUMNS, (entry.to_row() for entry in entries))
    return entries


def read_manifest(path: str | Path) -> list[SuiteEntry]:
    return [
        SuiteEntry(
            file=row["file"],
            name=row["name"],
            kp_type=KpType.from_string(row["kp_type"]),
            capacity_factor=int(row["capacity_factor"]),
            item_factor=int(row["item_factor"]),
            seed=int(row["seed"]),
        )
        for row in read_table(path, MANIFEST_COLUMNS)
    ]


def instance_paths(sources: list[str | Path]) -> list[Path]:
    """Resolve instance files from files and suite directories.

    A directory contributes the files of its manifest in manifest order, or
    its *.ttp files sorted by name when it has no manifest.

    Raises:
        StageError: If a source does not exist or yields no instances
    """
    paths: list[Path] = []
    for source in sources:
        source = Path(source)
        if source.is_dir():
            manifest = source / MANIFEST_NAME
            if manifest.exists():
                paths.extend(source / entry.file for entry in read_manifest(manifest))
            else:
                paths.extend(sorted(source.glob("*.ttp")))
        elif source.is_file():
            paths.append(source)
        else:
            raise StageError(f"Instance source not found: {source}")
    if not paths:
        raise StageError(f"No instances found in {', '.join(str(s) for s in sources)}")
    return paths


def load_instances(sources: list[str | Path]) -> list[TtpInstance]:
    return [read_ttp(path) for path in instance_paths(sources)]
