"""Secret-key encryption over polar codes on the binary erasure channel.

The package splits into code construction and decoding (:mod:`.polar`),
key material with block-circulant compression (:mod:`.keys`), the block
cipher itself (:mod:`.cipher`), design/security accounting
(:mod:`.analysis`), and a toy-scale chosen-plaintext attack harness
(:mod:`.attacks`).  ``polarsec --help`` exposes the same surface on the
command line.
"""
from .analysis import (
    ComplexityReport,
    ErrorBoundReport,
    KeySizeReport,
    SCALING_EXPONENT_BEC,
    SecurityReport,
    SimulationReport,
    TablesReport,
    WeightStats,
    complexity_report,
    default_pool,
    error_bounds,
    index_pool_size,
    key_size_report,
    perturbation_weight_stats,
    rate_threshold,
    reproduce_tables,
    security_report,
    simulate_round_trip,
)
from .attacks import (
    AttackInfeasibleError,
    AttackResult,
    CostPoint,
    EncryptionOracle,
    ErrorSpace,
    PartialErrorSpaceWarning,
    ToyInstance,
    attack_cost_curve,
    attack_decrypt,
    build_toy_instance,
    collect_error_space,
    rn_attack,
)
from .cipher import (
    CipherContext,
    CiphertextBlock,
    CiphertextError,
    frame_plaintext,
    pack_ciphertext,
    unframe_plaintext,
    unpack_ciphertext,
)
from .gf2 import GF2Matrix, SingularMatrixError
from .keys import (
    CompressedKey,
    KeyFormatError,
    KeyGenerationError,
    KeyParams,
    SecretKey,
    compress_key,
    decompress_key,
    deserialize_key,
    generate_key,
    reference_params,
    serialize_key,
    validate_key,
)
from .lfsr import Lfsr, is_primitive, lfsr_period, taps_for_degree
from .polar import (
    ERASED,
    FrozenPlan,
    ReliabilityTable,
    bec_transmit,
    bhattacharyya,
    block_error_rate,
    exhaustive_ambiguity,
    generator_submatrix,
    kernel_power,
    polar_transform,
    sc_decode,
    sc_decode_batch,
    top_indices,
)
from .rng import derive_rng, parse_seed

__version__ = "0.1.0"

__all__ = [
    "AttackInfeasibleError",
    "AttackResult",
    "CipherContext",
    "CiphertextBlock",
    "CiphertextError",
    "ComplexityReport",
    "CompressedKey",
    "CostPoint",
    "ERASED",
    "EncryptionOracle",
    "ErrorBoundReport",
    "ErrorSpace",
    "FrozenPlan",
    "GF2Matrix",
    "KeyFormatError",
    "KeyGenerationError",
    "KeyParams",
    "KeySizeReport",
    "Lfsr",
    "PartialErrorSpaceWarning",
    "ReliabilityTable",
    "SCALING_EXPONENT_BEC",
    "SecretKey",
    "SecurityReport",
    "SimulationReport",
    "SingularMatrixError",
    "TablesReport",
    "ToyInstance",
    "WeightStats",
    "attack_cost_curve",
    "attack_decrypt",
    "bec_transmit",
    "bhattacharyya",
    "block_error_rate",
    "build_toy_instance",
    "collect_error_space",
    "complexity_report",
    "compress_key",
    "decompress_key",
    "default_pool",
    "derive_rng",
    "deserialize_key",
    "error_bounds",
    "exhaustive_ambiguity",
    "generate_key",
    "generator_submatrix",
    "index_pool_size",
    "is_primitive",
    "kernel_power",
    "key_size_report",
    "lfsr_period",
    "pack_ciphertext",
    "parse_seed",
    "perturbation_weight_stats",
    "polar_transform",
    "rate_threshold",
    "reference_params",
    "reproduce_tables",
    "rn_attack",
    "sc_decode",
    "sc_decode_batch",
    "security_report",
    "serialize_key",
    "simulate_round_trip",
    "taps_for_degree",
    "top_indices",
    "unframe_plaintext",
    "unpack_ciphertext",
    "validate_key",
    "frame_plaintext",
]
