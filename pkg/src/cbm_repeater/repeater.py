"""Link- and chain-level metrics of a CBM repeater line.

Units: lengths in km, times in seconds, the speed of light in m/s (converted
to km once, in :func:`repeater_loss`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from cbm_repeater.cbm_core import ChannelPoint, EncodingParams, cbm_success_prob, success_from_block
from cbm_repeater.noise import (
    DarkCountModel,
    PauliPartition,
    block_error_rates,
    block_probs_with_dark,
    depolarizing_to_flips,
    pair_error_rates,
    pauli_partition,
)

UNDERFLOW = 1e-300


@dataclass(frozen=True)
class HardwareParams:
    eps_s: float = 1.0
    eps_d: float = 1.0
    tau: float = 150e-9
    c: float = 2e8
    L_att: float = 22.0
    t0: float = 10e-6
    lam: float = 0.0

    def __post_init__(self) -> None:
        for name in ("eps_s", "eps_d", "lam"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")
        if self.tau < 0.0:
            raise ValueError(f"tau must be non-negative, got {self.tau!r}")
        for name in ("c", "L_att", "t0"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")

    @property
    def efficiency(self) -> float:
        return self.eps_s * self.eps_d


@dataclass(frozen=True)
class ChainMetrics:
    """End-to-end figures of merit for one (encoding, spacing) choice.

    ``key_rate_per_t0`` is dimensionless; divide by ``t0`` for Hz.
    """

    rt0: float
    q_cost: float
    q_x: float
    q_z: float
    fidelity: float
    key_rate_per_t0: float
    eta0: float = field(default=1.0)
    link_p: float = field(default=1.0)
    underflow: bool = field(default=False)

    def rate_hz(self, t0: float) -> float:
        return self.rt0 / t0

    def key_rate_hz(self, t0: float) -> float:
        return self.key_rate_per_t0 / t0


def _ceil_log2(k: int) -> int:
    return (k - 1).bit_length()


def prep_time(n: int, m: int, tau: float) -> float:
    """Time to fuse a logical Bell pair from photon pairs (tournament order)."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    return (_ceil_log2(m) + _ceil_log2(n) + 2) * tau


def repeater_loss(enc: EncodingParams, hw: HardwareParams) -> float:
    """Photon survival ``eta0`` inside one repeater node."""
    dwell = prep_time(enc.n, enc.m, hw.tau) + hw.tau
    dwell_km = hw.c * dwell / 1000.0
    return hw.efficiency * math.exp(-dwell_km / hw.L_att)


def single_photon_transmission(L: float, hw: HardwareParams) -> float:
    if L < 0:
        raise ValueError(f"L must be non-negative, got {L!r}")
    return math.exp(-L / hw.L_att)


def direct_transmission(n: int, m: int, L: float, hw: HardwareParams, eta0: float = 1.0) -> float:
    """Parity qubit sent straight over ``L``: every block keeps a photon and
    at least one block keeps all of them."""
    eta = eta0 * single_photon_transmission(L, hw)
    none_lost = eta**m
    some_left = 1.0 - (1.0 - eta) ** m
    return max(some_left**n - (some_left - none_lost) ** n, 0.0)


def binary_entropy(q: float) -> float:
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q!r}")
    if q == 0.0 or q == 1.0:
        return 0.0
    return -q * math.log2(q) - (1.0 - q) * math.log2(1.0 - q)


def _link_channel(hw: HardwareParams, eta0: float, L0: float) -> ChannelPoint:
    return ChannelPoint(eta0 * math.exp(-L0 / hw.L_att), eta0)


def link_success(
    enc: EncodingParams,
    hw: HardwareParams,
    L0: float,
    *,
    e_d: float = 0.0,
    dark: bool = False,
    eta0: float | None = None,
    sign_only: str = "printed",
) -> tuple[float, PauliPartition]:
    """Success probability and Pauli partition of one building block.

    The one-way design (travelling qubit over ``L0`` against a stationary
    one) and the symmetric design (both qubits over ``L0/2``) see the same
    loss product, so they give the same probability.  ``eta0`` overrides the
    node survival rate derived from ``hw``; ``sign_only`` selects the
    sign-only error model of :func:`block_error_rates`.
    """
    if L0 <= 0:
        raise ValueError(f"L0 must be positive, got {L0!r}")
    if eta0 is None:
        eta0 = repeater_loss(enc, hw)
    ch = _link_channel(hw, eta0, L0)
    block = None
    if dark:
        block = block_probs_with_dark(enc, ch, DarkCountModel(hw.lam))
        p = success_from_block(enc.n, block.p_success, block.p_failure)
    else:
        p = cbm_success_prob(enc, ch)
        half = eta0 * math.exp(-L0 / (2.0 * hw.L_att))
        p_sym = cbm_success_prob(enc, ChannelPoint(half, half))
        assert abs(p - p_sym) <= 1e-12, (p, p_sym)
    per = pair_error_rates(depolarizing_to_flips(e_d))
    part = pauli_partition(enc, ch, block_error_rates(enc, ch, per, sign_only=sign_only), block=block)
    return p, part


def _flip_rate(char: float, total: float, exponent: float) -> float:
    if total <= 0.0:
        return 0.5
    ratio = char / total
    if ratio <= 0.0:
        return 0.5
    return min(max(0.5 * (1.0 - ratio**exponent), 0.0), 0.5)


def chain_metrics(
    enc: EncodingParams,
    hw: HardwareParams,
    L: float,
    L0: float,
    e_d: float = 0.0,
    *,
    dark: bool = False,
    eta0: float | None = None,
    sign_only: str = "printed",
) -> ChainMetrics:
    """Chain of ``L / L0`` links (real-valued exponent).

    A receiver error needs an odd number of erroneous links, so each flip
    rate follows from the signed partition ratio raised to ``L / L0``.
    """
    if L0 <= 0 or L0 > L:
        raise ValueError(f"need 0 < L0 <= L, got L0={L0!r}, L={L!r}")
    if eta0 is None:
        eta0 = repeater_loss(enc, hw)
    p, part = link_success(enc, hw, L0, e_d=e_d, dark=dark, eta0=eta0, sign_only=sign_only)
    links = L / L0
    rt0 = p**links
    underflow = rt0 < UNDERFLOW
    q_cost = 2.0 * enc.n * enc.m * links / rt0 if rt0 > 0.0 else math.inf

    total = part.total
    # p_x: symbol only, p_y: sign only, p_z: both.
    char_x = part.p_i - part.p_x + part.p_y - part.p_z
    char_z = part.p_i + part.p_x - part.p_y - part.p_z
    q_x = _flip_rate(char_x, total, links)
    q_z = _flip_rate(char_z, total, links)
    fidelity = (1.0 - q_x) * (1.0 - q_z)
    q_bar = 0.5 * (q_x + q_z)
    key = max(rt0 * (1.0 - 2.0 * binary_entropy(q_bar)), 0.0)
    return ChainMetrics(
        rt0=rt0,
        q_cost=q_cost,
        q_x=q_x,
        q_z=q_z,
        fidelity=fidelity,
        key_rate_per_t0=key,
        eta0=eta0,
        link_p=p,
        underflow=underflow,
    )
