"""Paths of projections and idempotents with fixed diagonal, and tight-frame connectivity."""

from .diagonal import (
    BlockPartition,
    DiagonalProjection,
    block_trace_profile,
    embed,
    expectation,
    minimal_block_decomposition,
    relative_commutant_dimension,
)
from .errors import FixdiagError, InvalidInput, MathematicalObstruction, NumericalFailure
from .frames import (
    Frame,
    connect_frames,
    frame_from_projection,
    gram_projection,
    harmonic_frame,
    verify_funtf,
)
from .idempotent_paths import (
    ReductionTrace,
    connect_idempotents,
    connect_irreducible,
    grassmann_path_in_omega,
    reduce_to_irreducible,
)
from .idempotents import (
    FeasibilityReport,
    GammaBound,
    Reason,
    construct_idempotent_with_diagonal,
    diagonal_feasible,
    expectation_compression_matrix,
    gamma_bound,
    idempotent_with_range_and_diagonal,
    range_diagonal_feasible,
    range_projection,
    rigidity_check,
)
from .linalg import DEFAULT_TOL, ToleranceConfig, jacobi_eigh, unitary_path
from .pathio import ValidationReport, deserialize, residual_csv, serialize, validate_path
from .paths import IDEMPOTENT, PROJECTION, AffineSegment, OperatorPath, Sampled
from .projection_paths import (
    EightNull,
    FourNull,
    Full,
    amplified_path_to_canonical,
    bridge_projection,
    connect_half_projections,
    half_diagonal_path_to_canonical,
    m4_family,
    m4_real_extreme_path,
)

__version__ = "0.1.0"
