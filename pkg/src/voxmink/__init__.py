"""Local estimation of intrinsic volume densities from voxel images.

The package builds, from first principles, the machinery behind local
counting estimators of the specific intrinsic volumes (volume, surface
area, integral of mean curvature, Euler characteristic, all per unit
volume) of a stationary Boolean model with ball grains observed on a
cubic lattice:

* the 22 motion equivalence classes of 2x2x2 vertex configurations and
  their multiplicities (:mod:`voxmink.configs`),
* exact intrinsic volumes of the small polytopes spanned by
  configuration points (:mod:`voxmink.geometry`),
* the expansion of configuration probabilities in the lattice spacing
  and the linear conditions that make weighted counts converge to the
  target density (:mod:`voxmink.expansion`),
* minimum-norm weight solving plus packaged reference weight sets
  (:mod:`voxmink.weights`),
* exact simulation and Monte Carlo probes of the model
  (:mod:`voxmink.sim`),
* a bit-parallel configuration counting engine and the replicated
  estimation experiment (:mod:`voxmink.engine`),
* a command line front end (:mod:`voxmink.cli`).
"""

__version__ = "0.1.0"

from .configs import (
    N_CLASSES,
    XI,
    ClassTable,
    build_class_table,
    cube_symmetry_group,
    default_class_table,
    full_foreground_inclusion_row,
    inclusion_exclusion_matrix,
    mask_orbits,
    points_of_mask,
    transform_mask,
)
from .geometry import (
    Polytope,
    QuadratureError,
    convex_hull,
    intrinsic_power_volume,
    intrinsic_volumes,
    support_deficit_integral,
    support_function,
)
from .model import (
    BallModelParams,
    ConstantRadius,
    RadiusLaw,
    UniformRadius,
    parse_radius_law,
)
from .expansion import (
    ExpansionRangeError,
    basis_vector,
    curvature_constants,
    estimator_row,
    expansion_matrix,
    full_foreground_expansion_row,
    geometry_matrix,
    predicted_class_probability,
    predicted_estimator_mean,
    specific_intrinsic_volumes,
    target_row,
)
from .weights import (
    InfeasibleWeightsError,
    SolveResult,
    WeightFileError,
    WeightVector,
    load_weights,
    reference_weights,
    save_weights,
    solve_weights,
    volume_weights,
    wdq_row,
    weight_residual,
)
from .sim import (
    MCEstimate,
    Realization,
    configuration_probability_mc,
    contains,
    miss_probability_mc,
    sample_realization,
)
from .engine import (
    ConfigHistogram,
    ExperimentReport,
    ExperimentRow,
    VoxelGrid,
    count_configurations,
    count_configurations_reference,
    digitize,
    estimate,
    point_count_estimate,
    run_experiment,
)

__all__ = [
    "__version__",
    "N_CLASSES",
    "XI",
    "ClassTable",
    "build_class_table",
    "cube_symmetry_group",
    "default_class_table",
    "full_foreground_inclusion_row",
    "inclusion_exclusion_matrix",
    "mask_orbits",
    "points_of_mask",
    "transform_mask",
    "Polytope",
    "QuadratureError",
    "convex_hull",
    "intrinsic_power_volume",
    "intrinsic_volumes",
    "support_deficit_integral",
    "support_function",
    "BallModelParams",
    "ConstantRadius",
    "RadiusLaw",
    "UniformRadius",
    "parse_radius_law",
    "ExpansionRangeError",
    "basis_vector",
    "curvature_constants",
    "estimator_row",
    "expansion_matrix",
    "full_foreground_expansion_row",
    "geometry_matrix",
    "predicted_class_probability",
    "predicted_estimator_mean",
    "specific_intrinsic_volumes",
    "target_row",
    "InfeasibleWeightsError",
    "SolveResult",
    "WeightFileError",
    "WeightVector",
    "load_weights",
    "reference_weights",
    "save_weights",
    "solve_weights",
    "volume_weights",
    "wdq_row",
    "weight_residual",
    "MCEstimate",
    "Realization",
    "configuration_probability_mc",
    "contains",
    "miss_probability_mc",
    "sample_realization",
    "ConfigHistogram",
    "ExperimentReport",
    "ExperimentRow",
    "VoxelGrid",
    "count_configurations",
    "count_configurations_reference",
    "digitize",
    "estimate",
    "point_count_estimate",
    "run_experiment",
]
