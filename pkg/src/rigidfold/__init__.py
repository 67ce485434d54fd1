"""Rigid-origami folding engine.

Simulates sequential folding of multi-DOF crease patterns with exactly
controlled fold angles, finds elastic equilibria of crease-mounted rotational
springs, and reconstructs valid 3D folded forms at every step.
"""

from .elastic import (
    RelaxResult,
    RelaxSettings,
    SpringConfig,
    kkt_step,
    projection_step_uniform,
    relax,
    spring_energy,
    spring_gradient,
    waterbomb_symmetric_oracle,
)
from .embedding import (
    Embedding3D,
    SpanningTree,
    build_spanning_tree,
    dihedral_angles,
    embed,
    measure_dimensions,
    poisson_ratio,
    rodrigues,
    waterbomb_theta,
)
from .generators import (
    crane_schedule,
    generate_crane,
    generate_miura,
    generate_waterbomb_base,
    generate_waterbomb_tessellation,
)
from .kinematics import (
    GlobalConstraint,
    assemble_global,
    crease_transform,
    dof,
    loop_closure,
    vertex_jacobian,
    vertex_residual,
)
from .numerics import min_norm_solve, pseudoinverse, rank
from .pattern import (
    Crease,
    CreasePattern,
    PatternError,
    ValidationReport,
    VertexFan,
    build_vertex_fans,
    parse_pattern,
    serialize_pattern,
    validate_pattern,
)
from .sequential import (
    ConvergenceError,
    FoldDirective,
    FoldSchedule,
    FoldTrajectory,
    Stage,
    controlled_step,
    flat_state_seed,
    run_schedule,
    tachi_projection_step,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
