"""Robust MVDR adaptive beamforming via optimal steering-vector estimation.

The package estimates the signal-of-interest steering vector by solving small
non-convex quadratic programs through SDP relaxation plus constructive
Hermitian rank-one decomposition, builds MVDR weights from the estimates, and
reproduces the reference simulation scenarios as seeded Monte Carlo sweeps.
"""

from .array_model import (
    ScenarioConfig,
    SnapshotBlock,
    apply_phase_distortion,
    generate_snapshots,
    interference_plus_noise_cov,
    sample_covariance,
    steering_vector,
)
from .beamformer import (
    BeamformerOutput,
    evaluate_beamformer,
    mvdr_weights,
    output_power,
    output_sinr,
)
from .estimators import (
    Certificate,
    EstimateResult,
    EstimationError,
    InfeasibleProblemError,
    solve_alg1,
    solve_alg2,
    solve_alg3,
    solve_alg4,
    solve_kvh,
    solve_kvh_variant,
)
from .rank_one import (
    ConstructionFailedError,
    DecompositionResult,
    RankTooLowError,
    decompose_d1,
    decompose_d2,
    extend_span_rank2,
    phase_rotate,
)
from .sdp import (
    SdpConstraint,
    SdpProblem,
    SdpSolution,
    SdpStatus,
    hermitize,
    numerical_rank,
    psd_factorize,
    solve_sdp,
)
from .sectors import (
    SectorModel,
    UncertaintyModel,
    build_ellipsoid_model,
    build_sector_model,
    build_similarity_model,
)

__version__ = "0.1.0"
