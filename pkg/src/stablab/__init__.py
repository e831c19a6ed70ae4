"""stab-lab: stability conditions (central charge plus slicing) on finite triangulated-category models."""

from .gaussian import QI
from .model import CategoryModel, Heart, ObjectExpr, Ref, fixture, load_model, validate_model
from .stability import (
    CentralCharge,
    StabilityCondition,
    charge_of,
    check_stability_axioms,
    hn_filtration,
    is_semistable,
    phase_data,
    stability,
)
from .gtilde import GroupElement, dG, delta, g_act, quotient_distance_G
from .limits import StabilitySequence, length_bound, limit_hn, limit_stability, limiting_phase
from .metric import c_act, distance, quotient_distance_stab
from .tilting import enumerate_torsion_pairs, left_tilt, right_tilt, tilt_decompose_pair, torsion_pair

__version__ = "0.1.0"

__all__ = [
    "GroupElement",
    "QI",
    "StabilitySequence",
    "c_act",
    "dG",
    "delta",
    "distance",
    "enumerate_torsion_pairs",
    "g_act",
    "left_tilt",
    "length_bound",
    "limit_hn",
    "limit_stability",
    "limiting_phase",
    "quotient_distance_G",
    "quotient_distance_stab",
    "right_tilt",
    "tilt_decompose_pair",
    "torsion_pair",
    "CategoryModel",
    "CentralCharge",
    "Heart",
    "ObjectExpr",
    "Ref",
    "StabilityCondition",
    "charge_of",
    "check_stability_axioms",
    "fixture",
    "hn_filtration",
    "is_semistable",
    "load_model",
    "phase_data",
    "stability",
    "validate_model",
]
