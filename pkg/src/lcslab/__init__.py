"""Numerical laboratory for longest common subsequences of hidden-Markov
pair emissions: exact laws, mixing and coupling constants, mean-convergence
rate brackets, and the Monte Carlo checks that exercise them.
"""

__version__ = "0.1.0"

from .errors import (
    AlphabetTooLarge,
    ConfigInvalid,
    DimensionMismatch,
    EnumerationCapExceeded,
    InvalidPartition,
    IterationCap,
    LabError,
    LengthMismatch,
    NoPositivePower,
    NotIrreducible,
    NotMixing,
    PreconditionViolated,
)
from .markov import (
    ChainSpec,
    DoeblinConstants,
    MixingReport,
    check_irreducible_aperiodic,
    dbar,
    doeblin_constants,
    matrix_power,
    mixing_profile,
    mixing_time,
    stationary_distribution,
    tau_min,
    tv_distance,
)
from .hmm import (
    PairHMM,
    SamplePath,
    TwoChainHMM,
    coupled_sample,
    coupled_taus,
    doeblin_for,
    exact_law,
    joint_law_tensor,
    match_probability,
    p_mismatch,
    product_chain,
    sample_batch,
    sample_path,
    two_hmm_as_pair,
    validate,
)
from .lcs import (
    LcsResult,
    Word,
    diagonal_match_count,
    lcs_detail,
    lcs_length,
    lcs_length_batch,
    lcs_partitioned,
    lcs_restricted,
)
from .partitions import (
    CountBoundReport,
    PartitionMaxReport,
    RPartition,
    count_bound_check,
    count_partitions,
    enumerate_partitions,
    partition_max_identity,
    r_range,
)
from .mixing import (
    AsymmetryReport,
    BetaReport,
    BetaStarEstimate,
    beta_star_estimate,
    beta_xy_exact,
    beta_zx_y_exact,
    h_n,
    mismatch_prefix,
)
from .estimators import (
    CouplingCheckReport,
    GammaStarEstimate,
    MeanLcEstimate,
    RateBoundReport,
    SandwichReport,
    StrictMatchReport,
    TailCheckReport,
    coupling_decay_check,
    exact_mean_lc,
    gamma_star_estimate,
    hoeffding_tail_check,
    mc_mean_lc,
    rate_bound_evaluate,
    sandwich_check,
    strict_match_check,
)
from .config import chain_from_config, config_digest, load_json, model_from_config
