"""SVG charts of pipeline and comparison results.

Charts are rendered with matplotlib's Agg backend. The SVG hash salt is
fixed and the date metadata dropped so identical data gives identical files.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ttp_forge.config import CAPACITY_FACTORS  # noqa: E402

logger = logging.getLogger(__name__)

SVG_HASH_SALT = "ttp-forge"


def _save(figure: plt.Figure, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context({"svg.hashsalt": SVG_HASH_SALT}):
        figure.savefig(path, format="svg", metadata={"Date": None})
    plt.close(figure)
    logger.debug("Wrote chart %s", path)
    return path


def rank_frequency_chart(frequencies: Mapping[str, Sequence[int]], title: str, path: str | Path) -> Path:
    """Grouped bars: how often each heuristic attains each rank.

    Args:
        frequencies: Rank counts per heuristic, index 0 holding rank 1
        title: Chart title
        path: Output SVG path
    """
    names = list(frequencies)
    size = len(names)
    figure, axes = plt.subplots(figsize=(1.2 + 1.1 * max(size, 1), 3.6))
    width = 0.8 / max(size, 1)
    positions = np.arange(1, size + 1)
    for index, name in enumerate(names):
        offset = (index - (size - 1) / 2) * width
        axes.bar(positions + offset, frequencies[name], width=width, label=name)
    axes.set_xticks(positions)
    axes.set_xlabel("rank")
    axes.set_ylabel("count")
    axes.set_title(title)
    if names:
        axes.legend(fontsize="small")
    figure.tight_layout()
    return _save(figure, path)


def feature_scatter(ipr_std: np.ndarray, rdist_std: np.ndarray, packed: np.ndarray, title: str, path: str | Path) -> Path:
    """Packed and unpacked items in standardized feature space."""
    packed = np.asarray(packed, dtype=bool)
    figure, axes = plt.subplots(figsize=(4.5, 4.5))
    axes.scatter(ipr_std[~packed], rdist_std[~packed], s=6, c="tab:gray", label="unpacked")
    axes.scatter(ipr_std[packed], rdist_std[packed], s=6, c="tab:red", label="packed")
    axes.set_xlabel("ipr_std")
    axes.set_ylabel("rdist_std")
    axes.set_title(title)
    axes.legend(fontsize="small")
    figure.tight_layout()
    return _save(figure, path)


def parameter_curves_chart(
    samples: Mapping[str, tuple[np.ndarray, np.ndarray]],
    curves: Mapping[str, np.ndarray],
    title: str,
    path: str | Path,
) -> Path:
    """Genotype values against capacity factor with the fitted curves.

    Args:
        samples: Per parameter, (capacity factors, values) of the genotypes
        curves: Per parameter, the fitted curve on CAPACITY_FACTORS
        title: Chart title
        path: Output SVG path
    """
    figure, axes = plt.subplots(figsize=(5.5, 4.0))
    for param, (c, values) in samples.items():
        points = axes.scatter(c, values, s=10, alpha=0.6, label=param)
        if param in curves:
            axes.plot(CAPACITY_FACTORS, curves[param], color=points.get_facecolor()[0])
    axes.set_xlabel("capacity factor")
    axes.set_ylabel("value")
    axes.set_title(title)
    axes.legend(fontsize="small", ncol=2)
    figure.tight_layout()
    return _save(figure, path)
