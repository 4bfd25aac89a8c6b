"""Python-facing wrappers around the numba kernels."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum, IntEnum

import numba
import numpy as np

from cbm_repeater.cbm_core import ChannelPoint, EncodingParams
from cbm_repeater.mc import kernels as K
from cbm_repeater.mc.rng import trial_key
from cbm_repeater.noise import DarkCountModel, PairErrorRates

MIN_TRIALS = 1000
CHUNK = 4096


class Symbol(IntEnum):
    PHI = 0
    PSI = 1


class Sign(IntEnum):
    PLUS = 0
    MINUS = 1


class B0Type(IntEnum):
    B_PSI = K.B_PSI
    B_PLUS = K.B_PLUS
    B_MINUS = K.B_MINUS


class B0Kind(IntEnum):
    SUCCESS = K.B0_SUCCESS
    FAILURE = K.B0_FAILURE
    LOSS = K.B0_LOSS


class B1Kind(IntEnum):
    SUCCESS = K.B1_SUCCESS
    SIGN_ONLY = K.B1_SIGN_ONLY
    FAILURE = K.B1_FAILURE


class InjectMode(IntEnum):
    """Where pair-level flips act.

    ``RECORD`` flips the recorded outcome of every pair measurement that
    reports a symbol or sign, leaving the feedforward untouched.  ``PAIR``
    toggles the pair state before it is measured, so a flipped sign can also
    steer the B_+/- choice.
    """

    RECORD = K.INJECT_RECORD
    PAIR = K.INJECT_PAIR


class LogicalInput(Enum):
    PHI_PLUS = ("Phi+", Symbol.PHI, Sign.PLUS)
    PHI_MINUS = ("Phi-", Symbol.PHI, Sign.MINUS)
    PSI_PLUS = ("Psi+", Symbol.PSI, Sign.PLUS)
    PSI_MINUS = ("Psi-", Symbol.PSI, Sign.MINUS)

    def __init__(self, label: str, symbol: Symbol, sign: Sign) -> None:
        self.label = label
        self.symbol = symbol
        self.sign = sign

    @classmethod
    def parse(cls, text: str) -> LogicalInput:
        norm = text.strip().replace("−", "-").lower()
        for member in cls:
            if member.label.lower() == norm or member.name.lower() == norm:
                return member
        raise ValueError(f"unknown logical input {text!r}; expected one of Phi+, Phi-, Psi+, Psi-")


@dataclass(frozen=True)
class PairState:
    symbol: Symbol
    sign: Sign

    def __str__(self) -> str:
        return ("phi" if self.symbol == Symbol.PHI else "psi") + ("+" if self.sign == Sign.PLUS else "-")


@dataclass(frozen=True)
class B0Result:
    kind: B0Kind
    identified: PairState | None = None
    sign_hint: Sign | None = None


@dataclass(frozen=True)
class B1Result:
    kind: B1Kind
    symbol: Symbol | None = None
    sign: Sign | None = None


@dataclass(frozen=True)
class RngStream:
    """Keyed stream: every draw is a function of (seed, trial, site)."""

    seed: int
    trial: int = 0

    def __post_init__(self) -> None:
        _check_u64("seed", self.seed)
        _check_u64("trial", self.trial)

    @property
    def key(self) -> np.uint64:
        # Wrap the result: a bare Python int above 2**63 would be retyped as
        # int64 on its way back into a jitted function.
        return np.uint64(trial_key(np.uint64(self.seed), np.uint64(self.trial)))


def _check_u64(name: str, v: int) -> None:
    if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or not 0 <= int(v) < 2**64:
        raise ValueError(f"{name} must be an integer in [0, 2**64), got {v!r}")


@dataclass(frozen=True)
class TrialConfig:
    enc: EncodingParams
    ch: ChannelPoint
    per: PairErrorRates = field(default_factory=lambda: PairErrorRates(0.0, 0.0))
    dc: DarkCountModel = field(default_factory=DarkCountModel)
    logical_input: LogicalInput = LogicalInput.PHI_PLUS
    seed: int = 0
    trials: int = 1_000_000
    mode: InjectMode = InjectMode.RECORD

    def __post_init__(self) -> None:
        _check_u64("seed", self.seed)
        if isinstance(self.trials, bool) or not isinstance(self.trials, int) or self.trials < 1:
            raise ValueError(f"trials must be a positive integer, got {self.trials!r}")
        if self.enc.m > K.MAX_PAIRS:
            raise ValueError(f"m must be <= {K.MAX_PAIRS} for the Monte Carlo")

    def _kernel_args(self) -> tuple:
        return (
            self.enc.n,
            self.enc.m,
            self.enc.j,
            float(self.ch.eta),
            float(self.ch.eta_prime),
            float(self.per.e0_x),
            float(self.per.e0_z),
            float(self.dc.lam),
            int(self.logical_input.symbol),
            int(self.logical_input.sign),
            int(self.mode),
            np.uint64(self.seed),
        )


@dataclass(frozen=True)
class TallyEstimate:
    p_hat: float
    stderr: float
    trials: int
    count: int = 0

    @classmethod
    def from_count(cls, count: int, trials: int) -> TallyEstimate:
        if trials <= 0:
            return cls(math.nan, math.nan, 0, 0)
        p = count / trials
        return cls(p, math.sqrt(p * (1.0 - p) / trials), trials, count)

    def z_score(self, expected: float) -> float:
        """Distance from ``expected`` in null-hypothesis standard errors.

        The binomial spread is taken at ``expected`` rather than ``p_hat`` so
        rare events observed zero or few times still score sensibly.  An
        expected value of exactly 0 or 1 scores 0 on a hit and inf otherwise.
        """
        diff = self.p_hat - expected
        se = math.sqrt(max(expected * (1.0 - expected), 0.0) / self.trials)
        if se == 0.0:
            return 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
        return diff / se


@dataclass(frozen=True)
class TrialRecord:
    kind: str  # "success", "sign_only", "failure"
    symbol: Symbol
    sign: Sign
    x_error: bool
    z_error: bool


def sample_decomposition(
    logical_input: LogicalInput, enc: EncodingParams, stream: RngStream
) -> list[list[PairState]]:
    """Pair states of every block for one trial.

    Block signs carry the logical sign as their minus-parity; pair symbols
    carry the block symbol as their psi-count parity.
    """
    key = stream.key
    n, m = enc.n, enc.m
    signs = np.empty(n, dtype=np.int64)
    K.sample_block_signs(key, n, int(logical_input.sign), signs)
    out = []
    symbols = np.empty(m, dtype=np.int64)
    for b in range(n):
        K.sample_pair_symbols(key, b, m, int(logical_input.symbol), symbols)
        out.append([PairState(Symbol(int(s)), Sign(int(signs[b]))) for s in symbols])
    minus = sum(blk[0].sign for blk in out) % 2
    assert minus == logical_input.sign, "block sign parity violated"
    for blk in out:
        assert sum(p.symbol for p in blk) % 2 == logical_input.symbol, "pair symbol parity violated"
    return out


def run_b0(
    b0_type: B0Type,
    pair: PairState,
    lost: tuple[bool, bool] = (False, False),
    dc: DarkCountModel | None = None,
    stream: RngStream | None = None,
    *,
    block: int = 0,
    index: int = 0,
) -> B0Result:
    stream = stream or RngStream(0)
    lam = dc.lam if dc is not None else 0.0
    kind, sym, sign, hint = K.run_b0(
        int(b0_type), int(pair.symbol), int(pair.sign), bool(lost[0]), bool(lost[1]), lam, stream.key, block, index
    )
    kind = B0Kind(kind)
    if kind == B0Kind.SUCCESS:
        return B0Result(kind, identified=PairState(Symbol(sym), Sign(sign)))
    if kind == B0Kind.FAILURE:
        return B0Result(kind, sign_hint=None if hint < 0 else Sign(hint))
    return B0Result(kind)


def run_b1(
    pairs: list[PairState],
    j: int,
    *,
    lost: list[tuple[bool, bool]] | None = None,
    flips: list[tuple[bool, bool]] | None = None,
    dc: DarkCountModel | None = None,
    stream: RngStream | None = None,
    block: int = 0,
    mode: InjectMode = InjectMode.RECORD,
) -> B1Result:
    """One block measurement; ``flips`` holds (symbol, sign) flip flags per pair.

    A tied sign vote resolves to the wrong sign, taken relative to the sign
    of the first pair (all pairs of a block share their sign).
    """
    m = len(pairs)
    if m == 0:
        raise ValueError("block must contain at least one pair")
    if not 0 <= j <= m - 1:
        raise ValueError(f"need 0 <= j <= m-1, got j={j}, m={m}")
    stream = stream or RngStream(0)
    lost = lost or [(False, False)] * m
    flips = flips or [(False, False)] * m
    if len(lost) != m or len(flips) != m:
        raise ValueError("lost and flips must have one entry per pair")
    symbols = np.array([int(p.symbol) for p in pairs], dtype=np.int64)
    signs = np.array([int(p.sign) for p in pairs], dtype=np.int64)
    fx = np.array([f[0] for f in flips], dtype=np.bool_)
    fz = np.array([f[1] for f in flips], dtype=np.bool_)
    true_sign = int(signs[0])
    if mode == InjectMode.PAIR:
        symbols ^= fx
        signs ^= fz
    kind, sym, sign = K.run_b1(
        symbols,
        signs,
        np.array([l[0] for l in lost], dtype=np.bool_),
        np.array([l[1] for l in lost], dtype=np.bool_),
        fx,
        fz,
        j,
        dc.lam if dc is not None else 0.0,
        stream.key,
        block,
        true_sign,
        int(mode),
    )
    kind = B1Kind(kind)
    return B1Result(
        kind,
        symbol=Symbol(sym) if sym >= 0 else None,
        sign=Sign(sign) if sign >= 0 else None,
    )


def run_cbm(cfg: TrialConfig, trial: int = 0) -> TrialRecord:
    """Outcome of a single trial ``trial`` under ``cfg``'s seed."""
    tally = np.zeros(K.N_TALLIES, dtype=np.int64)
    n, m, j, eta, eta_p, e0x, e0z, lam, lsym, lsign, mode, seed = cfg._kernel_args()
    K.run_trial(n, m, j, eta, eta_p, e0x, e0z, lam, lsym, lsign, mode, seed, trial, tally)
    if tally[K.T_PARITY_VIOLATIONS]:
        raise AssertionError("sampled decomposition violates the parity constraints")
    if tally[K.T_FAILURE]:
        kind = "failure"
    elif tally[K.T_SIGN_ONLY_ALL]:
        kind = "sign_only"
    else:
        kind = "success"
    x_err = bool(tally[K.T_P_X] or tally[K.T_P_Z])
    z_err = bool(tally[K.T_P_Y] or tally[K.T_P_Z])
    li = cfg.logical_input
    return TrialRecord(
        kind,
        Symbol(li.symbol ^ x_err) if kind == "success" else li.symbol,
        Sign(li.sign ^ z_err) if kind == "success" else li.sign,
        x_err,
        z_err,
    )


def raw_tallies(cfg: TrialConfig, workers: int = 1) -> np.ndarray:
    """Integer tally vector (see ``kernels.T_*``); identical for any ``workers``."""
    if workers < 1:
        raise ValueError("workers must be >= 1")
    prev = numba.get_num_threads()
    numba.set_num_threads(min(workers, numba.config.NUMBA_NUM_THREADS))
    try:
        tally = K.run_trials(*cfg._kernel_args(), cfg.trials, CHUNK)
    finally:
        numba.set_num_threads(prev)
    if tally[K.T_PARITY_VIOLATIONS]:
        raise AssertionError("sampled decomposition violates the parity constraints")
    return tally


def estimate(cfg: TrialConfig, workers: int = 1, *, allow_small: bool = False) -> dict[str, TallyEstimate]:
    """Binomial estimates of every outcome class.

    Logical classes are per trial; ``x_error|success`` and ``z_error|success``
    condition on logical success.  ``p_i`` .. ``p_z`` split the success
    probability with the source labels (``p_x`` symbol only, ``p_y`` sign only,
    ``p_z`` both).  ``block_*`` entries are per block, the error ones
    conditional on the block outcome they name.  Fewer than ``MIN_TRIALS``
    trials are refused unless ``allow_small`` is set.
    """
    if cfg.trials < MIN_TRIALS and not allow_small:
        raise ValueError(f"estimate needs at least {MIN_TRIALS} trials, got {cfg.trials}")
    t = raw_tallies(cfg, workers)
    N = cfg.trials
    succ = int(t[K.T_SUCCESS])
    blocks = int(t[K.T_BLOCKS])
    bs = int(t[K.T_BLOCK_SUCCESS])
    bso = int(t[K.T_BLOCK_SIGN_ONLY])
    f = TallyEstimate.from_count
    return {
        "success": f(succ, N),
        "sign_only_all": f(int(t[K.T_SIGN_ONLY_ALL]), N),
        "failure": f(int(t[K.T_FAILURE]), N),
        "x_error|success": f(int(t[K.T_P_X] + t[K.T_P_Z]), succ),
        "z_error|success": f(int(t[K.T_P_Y] + t[K.T_P_Z]), succ),
        "p_i": f(int(t[K.T_P_I]), N),
        "p_x": f(int(t[K.T_P_X]), N),
        "p_y": f(int(t[K.T_P_Y]), N),
        "p_z": f(int(t[K.T_P_Z]), N),
        "block_success": f(bs, blocks),
        "block_failure": f(int(t[K.T_BLOCK_FAILURE]), blocks),
        "block_sign_only": f(bso, blocks),
        "block_x_error|success": f(int(t[K.T_BLOCK_X_ERR_SUCCESS]), bs),
        "block_z_error|success": f(int(t[K.T_BLOCK_Z_ERR_SUCCESS]), bs),
        "block_z_error|sign_only": f(int(t[K.T_BLOCK_Z_ERR_SIGN_ONLY]), bso),
    }
