"""Event-level Monte Carlo of the CBM protocol.

Trials sample a parity-consistent decomposition of the logical Bell state,
apply photon loss and pair-level flips, and run every pair measurement at
detector-click granularity.  This is the independent check on the closed
forms in :mod:`cbm_repeater.cbm_core` and :mod:`cbm_repeater.noise`.
"""

from cbm_repeater.mc.oracle import (
    B0Kind,
    B0Result,
    B0Type,
    B1Kind,
    B1Result,
    InjectMode,
    LogicalInput,
    PairState,
    RngStream,
    Sign,
    Symbol,
    TallyEstimate,
    TrialConfig,
    TrialRecord,
    estimate,
    raw_tallies,
    run_b0,
    run_b1,
    run_cbm,
    sample_decomposition,
)

__all__ = [
    "B0Kind",
    "B0Result",
    "B0Type",
    "B1Kind",
    "B1Result",
    "InjectMode",
    "LogicalInput",
    "PairState",
    "RngStream",
    "Sign",
    "Symbol",
    "TallyEstimate",
    "TrialConfig",
    "TrialRecord",
    "estimate",
    "raw_tallies",
    "run_b0",
    "run_b1",
    "run_cbm",
    "sample_decomposition",
]
