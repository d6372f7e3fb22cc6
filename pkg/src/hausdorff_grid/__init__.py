"""Hausdorff distances of implicit sets, approximated on uniform grids.

The package computes the node-sampled lower bound of the Hausdorff distance
between two closed sets given by (signed) distance fields, together with
certified upper bounds on the approximation error, and ships the experiment
harness used to study how that error decays under grid refinement.
"""

from .grid import Grid
from .shapes import (
    Ball,
    Box,
    Complement,
    Difference,
    Intersection,
    Shape,
    Union,
    ring_with_inner_ball,
    sample_boundary,
    sample_volume,
)
from .redistance import (
    ScalarField,
    fast_march,
    negative_part,
    positive_part,
    read_field_binary,
    sample_exact_sd,
    sample_levelset,
    write_field_binary,
    write_field_csv,
)
from .hausdorff import (
    HausdorffReport,
    OracleResult,
    dh_approx,
    dh_complementary_oracle,
    dh_oracle,
    md_oracle,
    sd_supnorm,
)
from .bounds import (
    DeltaConstant,
    ExternalCert,
    MaximalErrorScene,
    build_maximal_error_scene,
    cell_upper_bound_sampled,
    certify_external,
    check_suitable,
    compute_delta,
    delta_closed_form,
    external_additive_term,
    external_bound,
    lipschitz_t,
    suitable_bound,
    worst_case_bound,
)
from .stochastic import (
    Histogram,
    IterateAnalysis,
    SegmentProbe,
    analyze_iterates,
    expected_min_distance,
    probe_segment,
    simulate_min_distance,
    uniformity_histogram,
)

__version__ = "0.1.0"

__all__ = [
    "Grid",
    "Shape",
    "Ball",
    "Box",
    "Union",
    "Intersection",
    "Complement",
    "Difference",
    "ring_with_inner_ball",
    "sample_volume",
    "sample_boundary",
    "ScalarField",
    "sample_exact_sd",
    "sample_levelset",
    "fast_march",
    "positive_part",
    "negative_part",
    "write_field_csv",
    "write_field_binary",
    "read_field_binary",
    "HausdorffReport",
    "OracleResult",
    "dh_approx",
    "dh_oracle",
    "dh_complementary_oracle",
    "sd_supnorm",
    "md_oracle",
    "DeltaConstant",
    "ExternalCert",
    "MaximalErrorScene",
    "delta_closed_form",
    "compute_delta",
    "lipschitz_t",
    "cell_upper_bound_sampled",
    "worst_case_bound",
    "suitable_bound",
    "check_suitable",
    "build_maximal_error_scene",
    "certify_external",
    "external_additive_term",
    "external_bound",
    "Histogram",
    "SegmentProbe",
    "IterateAnalysis",
    "probe_segment",
    "analyze_iterates",
    "expected_min_distance",
    "simulate_min_distance",
    "uniformity_histogram",
    "__version__",
]
