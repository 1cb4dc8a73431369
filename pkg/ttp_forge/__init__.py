"""ttp-forge - Learned packing heuristics for the Traveling Thief Problem.

Generates benchmark-style instances, evaluates packing plans along fixed
tours, learns score-function heuristics from evolved packings and compares
them with human-designed initializers.
"""

__version__ = "0.1.0"

# Expose key classes for easy imports
from ttp_forge.baselines import insertion, pack_iterative
from ttp_forge.enums import FeatureSet, KpType
from ttp_forge.heuristics import run_heuristic
from ttp_forge.instance import Item, TtpInstance
from ttp_forge.objective import EvalCounter, PackingPlan, evaluate
from ttp_forge.parameter_model import ParameterModel, load_default_model
from ttp_forge.tour import Tour, reference_tour

__all__ = [
    "EvalCounter",
    "FeatureSet",
    "Item",
    "KpType",
    "PackingPlan",
    "ParameterModel",
    "Tour",
    "TtpInstance",
    "evaluate",
    "insertion",
    "load_default_model",
    "pack_iterative",
    "reference_tour",
    "run_heuristic",
]
