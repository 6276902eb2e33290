"""Simulator and analysis toolkit for two-source path-identity interferometers.

Evolves multi-particle path states through alignment, attenuation, and
beam-splitter stages, and checks the resulting interference patterns and
entangled states against their closed-form predictions.
"""

from .analysis import (
    EntanglementReport,
    PatternCurve,
    concurrence,
    fidelity,
    one_to_rest_concurrence,
    pure_state_from_density,
    sweep_pattern,
    three_tangle,
    visibility,
)
from .closed_form import (
    DickeIndex,
    EntangledClass,
    EntangledClassId,
    bell_phi_minus,
    bell_psi_plus,
    dicke_state,
    entangled_class_state,
    ghz_class_three,
    predicted_output_state,
    predicted_probability,
    xi_for_class,
)
from .errors import (
    ConfigError,
    EmptyStateError,
    NormalizationError,
    PathIdentityError,
    ScenarioParseError,
    StageOrderError,
    StructureError,
    ValidationError,
    VisibilityUndefinedError,
)
from .interferometer import (
    MAX_PARTICLES,
    DetectionOutcome,
    SchemeConfig,
    apply_beam_splitter,
    apply_path_identity,
    build_two_source_state,
    conditional_detected_state,
    detected_particles,
    detection_table,
    joint_probability,
    loss_probability,
    run_scheme,
)
from .states import (
    AMPLITUDE_EPSILON,
    DensityMatrix,
    LabelKind,
    Outcome,
    PathLabel,
    PureState,
    aligned_beam,
    density_from_mixture,
    detector,
    detector_outcome,
    inner_product,
    loss,
    partial_trace,
    primed_detector,
    primed_source_beam,
    pure_state_from_terms,
    source_beam,
    state_fidelity,
    to_density,
)

__version__ = "0.1.0"

__all__ = [
    "AMPLITUDE_EPSILON",
    "ConfigError",
    "DensityMatrix",
    "DetectionOutcome",
    "DickeIndex",
    "EmptyStateError",
    "EntangledClass",
    "EntangledClassId",
    "EntanglementReport",
    "LabelKind",
    "MAX_PARTICLES",
    "NormalizationError",
    "Outcome",
    "PathIdentityError",
    "PathLabel",
    "PatternCurve",
    "PureState",
    "ScenarioParseError",
    "SchemeConfig",
    "StageOrderError",
    "StructureError",
    "ValidationError",
    "VisibilityUndefinedError",
    "aligned_beam",
    "apply_beam_splitter",
    "apply_path_identity",
    "bell_phi_minus",
    "bell_psi_plus",
    "build_two_source_state",
    "concurrence",
    "conditional_detected_state",
    "density_from_mixture",
    "detected_particles",
    "detection_table",
    "detector",
    "detector_outcome",
    "dicke_state",
    "entangled_class_state",
    "fidelity",
    "ghz_class_three",
    "inner_product",
    "joint_probability",
    "loss",
    "loss_probability",
    "one_to_rest_concurrence",
    "partial_trace",
    "predicted_output_state",
    "predicted_probability",
    "primed_detector",
    "primed_source_beam",
    "pure_state_from_density",
    "pure_state_from_terms",
    "run_scheme",
    "source_beam",
    "state_fidelity",
    "sweep_pattern",
    "three_tangle",
    "to_density",
    "visibility",
    "xi_for_class",
]
