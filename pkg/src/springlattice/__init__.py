"""Cross-spring lattice mechanics with learned edge-energy surrogates.

The package builds rectangular lattices of rigid crosses joined by
nonlinear springs, regresses each spring's elastic energy over a
rigid-motion-invariant feature triple (analytic oracle, Gaussian
process, or MLP), assembles total energy and generalized forces by
summing over edges, and integrates the resulting dynamics with a
leap-frog scheme.
"""

__version__ = "0.1.0"

from . import contour, serialize
from .assembly import (
    EnergyGraph,
    GeneralizedForces,
    assemble_energy,
    assemble_forces_and_energy,
    assemble_generalized_forces,
    calibrate_reference,
    edge_feature_table,
    reference_residual,
)
from .bench import BenchReport, SizeTiming, bench_scaling
from .data import (
    DataSplit,
    Dataset,
    label_with_model,
    sample_features,
    sampling_cube,
    smse,
    split_dataset,
    training_bounds,
)
from .dynamics import (
    Damping,
    LoadProtocol,
    NodeLoad,
    Prescription,
    RelaxResult,
    SimConfig,
    SimulationDivergedError,
    SystemState,
    Trajectory,
    WaveSpeedResult,
    critical_damping,
    estimate_stable_dt,
    free_protocol,
    kinetic_energy,
    leapfrog_init,
    leapfrog_step,
    make_protocol,
    measure_wave_speed,
    quasi_static_relax,
    simulate,
    time_reversed,
)
from .features import (
    DegenerateEdgeError,
    EdgeFeatures,
    NodeState,
    edge_feature_jacobian,
    edge_feature_jacobian_arrays,
    edge_features,
    edge_features_arrays,
    rotation_matrix,
    wrap_angle,
)
from .geometry import (
    DefectPattern,
    EdgeListDefects,
    Lattice,
    LatticeSpec,
    PeriodicDefects,
    PoreShape,
    ShapeReport,
    apply_defects,
    base_radius,
    build_lattice,
    grid_edge_count,
    pore_radius,
    validate_pore_shape,
)
from .render import RenderOptions, render_svg
from .models import (
    STANDARD_ARCHITECTURES,
    AnalyticOracle,
    ConditioningError,
    EdgeEnergyModel,
    GprHyperparams,
    GprModel,
    MlpArchitecture,
    MlpModel,
    TrainingDivergedError,
    TrainingHistory,
    finite_difference_gradient,
    fit_gpr,
    hessian_at_origin,
    init_mlp,
    log_marginal_likelihood,
    optimize_hyperparams,
    se_kernel,
    train_gpr,
    train_mlp,
)
