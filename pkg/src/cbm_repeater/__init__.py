"""Concatenated Bell measurement (CBM) repeater models.

Closed-form success, failure and logical-error probabilities of the
concatenated Bell measurement on parity-encoded photonic qubits, an
event-level Monte Carlo oracle, repeater-chain metrics and a photon-cost
optimizer.
"""

from cbm_repeater.cbm_core import (
    BlockOutcomeProbs,
    ChannelPoint,
    EncodingParams,
    best_over_j,
    block_failure_prob,
    block_failure_prob_alt,
    block_outcome_probs,
    block_success_prob,
    cbm_success_prob,
    linear_optics_bound,
    lossless_success_prob,
    success_from_block,
)
from cbm_repeater.noise import (
    BlockErrorRates,
    DarkCountModel,
    FlipRates,
    PairErrorRates,
    PauliPartition,
    block_error_rates,
    block_probs_with_dark,
    cbm_success_prob_with_dark,
    depolarizing_to_flips,
    pair_error_rates,
    pauli_partition,
    sign_only_carriers,
)
from cbm_repeater.repeater import (
    ChainMetrics,
    HardwareParams,
    binary_entropy,
    chain_metrics,
    direct_transmission,
    link_success,
    prep_time,
    repeater_loss,
    single_photon_transmission,
)
from cbm_repeater.optimizer import (
    Constraints,
    InfeasibleSearchError,
    OptResult,
    SearchSpace,
    optimize,
    rank,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "BlockErrorRates",
    "BlockOutcomeProbs",
    "ChainMetrics",
    "ChannelPoint",
    "Constraints",
    "DarkCountModel",
    "EncodingParams",
    "FlipRates",
    "HardwareParams",
    "InfeasibleSearchError",
    "OptResult",
    "PairErrorRates",
    "PauliPartition",
    "SearchSpace",
    "best_over_j",
    "binary_entropy",
    "block_error_rates",
    "block_failure_prob",
    "block_failure_prob_alt",
    "block_outcome_probs",
    "block_probs_with_dark",
    "block_success_prob",
    "cbm_success_prob",
    "cbm_success_prob_with_dark",
    "chain_metrics",
    "depolarizing_to_flips",
    "direct_transmission",
    "linear_optics_bound",
    "link_success",
    "lossless_success_prob",
    "optimize",
    "pair_error_rates",
    "pauli_partition",
    "prep_time",
    "rank",
    "repeater_loss",
    "sign_only_carriers",
    "single_photon_transmission",
    "success_from_block",
    "sweep",
]
