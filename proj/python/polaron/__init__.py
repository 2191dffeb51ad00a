"""Pekar-Tomasevich N-polaron toolbox (native core)."""

from ._polaron import (
    BallLayout,
    BindingReport,
    BindingSplit,
    BlockMode,
    BlockModeSet,
    ClusterGroup,
    ClusterLayout,
    EnergyReport,
    ErrorBudget,
    ErrorTermCheck,
    FieldSpec,
    Grid3D,
    HartreeState,
    McEstimate,
    PolaronParams,
    SolveResult,
    SubadditivityGap,
    binding_margin,
    block_modes,
    f1_check,
    f2_check,
    gradient_check,
    hardy_lower_bound,
    make_field,
    minimize,
    pekar_energy,
    region_membership,
    regroup_balls,
    scaling_identity_check,
    subadditivity_gap,
    theorem1_budget,
)

__all__ = [
    "BallLayout",
    "BindingReport",
    "BindingSplit",
    "BlockMode",
    "BlockModeSet",
    "ClusterGroup",
    "ClusterLayout",
    "EnergyReport",
    "ErrorBudget",
    "ErrorTermCheck",
    "FieldSpec",
    "Grid3D",
    "HartreeState",
    "McEstimate",
    "PolaronParams",
    "SolveResult",
    "SubadditivityGap",
    "binding_margin",
    "block_modes",
    "f1_check",
    "f2_check",
    "gradient_check",
    "hardy_lower_bound",
    "make_field",
    "minimize",
    "pekar_energy",
    "region_membership",
    "regroup_balls",
    "scaling_identity_check",
    "subadditivity_gap",
    "theorem1_budget",
]

__version__ = "0.1.0"
