"""Pauli error propagation through the CBM and the dark-count model.

Pair-level (0th level) flips come from independent bit and sign flips on
each photon.  A block's symbol is the parity of its pair symbols, so bit
flips propagate by parity; its sign is a majority vote over every pair
outcome that carries one, with a tied vote counted as an error.  At the
logical level the symbol is a majority vote over succeeding blocks and the
sign is the parity of all block signs.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil

from scipy.optimize import brentq

from cbm_repeater._binom import binom, binom_pmf, parity_mass, upper_tail
from cbm_repeater.cbm_core import (
    BlockOutcomeProbs,
    ChannelPoint,
    EncodingParams,
    block_failure_prob,
    block_success_prob,
    success_from_block,
)

DARK_COUNT_CAP = 1e-3
DEGENERATE_EPS = 1e-15


@dataclass(frozen=True)
class FlipRates:
    """Independent bit (``e_x``) and sign (``e_z``) flip rates per photon."""

    e_x: float
    e_z: float

    def __post_init__(self) -> None:
        for name in ("e_x", "e_z"):
            v = getattr(self, name)
            if not 0.0 <= v <= 0.5:
                raise ValueError(f"{name} must lie in [0, 1/2], got {v!r}")


@dataclass(frozen=True)
class PairErrorRates:
    """Symbol and sign flip rates of one photon-pair measurement outcome."""

    e0_x: float
    e0_z: float

    def __post_init__(self) -> None:
        for name in ("e0_x", "e0_z"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")


@dataclass(frozen=True)
class BlockErrorRates:
    e1_x_success: float
    e1_z_success: float
    e1_z_sign_only: float
    degenerate: bool = False


@dataclass(frozen=True)
class PauliPartition:
    """Split of the logical success probability by the error it carries.

    Labels follow the source analysis: ``p_x`` carries a symbol error only,
    ``p_y`` a sign error only and ``p_z`` both.
    """

    p_i: float
    p_x: float
    p_y: float
    p_z: float

    @property
    def total(self) -> float:
        return self.p_i + self.p_x + self.p_y + self.p_z


@dataclass(frozen=True)
class DarkCountModel:
    """Per-detector dark-count probability ``lam`` (four detectors per pair)."""

    lam: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.lam <= DARK_COUNT_CAP:
            raise ValueError(
                f"dark-count rate must lie in [0, {DARK_COUNT_CAP}] for the "
                f"single-click approximation, got {self.lam!r}"
            )

    @property
    def gamma(self) -> float:
        """Probability that exactly one of the four detectors fires spuriously."""
        return 4.0 * self.lam * (1.0 - self.lam) ** 3

    @classmethod
    def from_gamma(cls, gamma: float) -> DarkCountModel:
        if gamma == 0.0:
            return cls(0.0)
        cap = 4.0 * DARK_COUNT_CAP * (1.0 - DARK_COUNT_CAP) ** 3
        if not 0.0 < gamma <= cap:
            raise ValueError(f"gamma must lie in [0, {cap:.6g}], got {gamma!r}")
        lam = brentq(lambda v: 4.0 * v * (1.0 - v) ** 3 - gamma, 0.0, DARK_COUNT_CAP, xtol=1e-300, rtol=1e-15)
        return cls(lam)


def depolarizing_to_flips(e_d: float) -> FlipRates:
    if not 0.0 <= e_d <= 1.0:
        raise ValueError(f"depolarizing rate must lie in [0, 1], got {e_d!r}")
    return FlipRates(e_d / 2.0, e_d / 2.0)


def pair_error_rates(fr: FlipRates) -> PairErrorRates:
    # Either photon of the pair flipping, but not both, flips the outcome.
    return PairErrorRates(2.0 * fr.e_x * (1.0 - fr.e_x), 2.0 * fr.e_z * (1.0 - fr.e_z))


def _vote_error(carriers: int, e: float) -> float:
    return upper_tail(carriers, ceil(carriers / 2), e)


def sign_only_carriers(enc: EncodingParams, ch: ChannelPoint) -> dict[int, float]:
    """Joint probability of a sign-only block outcome with ``c`` sign carriers.

    Every loss pattern is counted, so summing the values gives exactly
    ``1 - p_s - p_f``.
    """
    m, j = enc.m, enc.j
    x = ch.product
    out: dict[int, float] = {}

    def add(c: int, w: float) -> None:
        if w:
            out[c] = out.get(c, 0.0) + w

    for q in range(j):
        # B_psi succeeds at step q; the matching B_+/- then sees r pairs.
        r = m - q - 1
        w = (x / 2.0) ** (q + 1)
        for lost in range(1, r + 1):
            add(1 + r - lost, w * binom_pmf(r, lost, 1.0 - x))
        # B_psi loses a photon at step q; either B_+/- choice reports every
        # surviving pair's sign.
        w = (x / 2.0) ** q * (1.0 - x)
        for lost in range(r):
            add(r - lost, w * binom_pmf(r, lost, 1.0 - x))
    r = m - j
    w = (x / 2.0) ** j
    for lost in range(r):
        pmf = binom_pmf(r, lost, 1.0 - x)
        # The right choice is sign-only only when something was lost; the
        # wrong one never yields a symbol.
        add(r - lost, w * pmf * (0.5 if lost else 0.0) + w * pmf * 0.5)
    return out


def block_error_rates(
    enc: EncodingParams,
    ch: ChannelPoint,
    per: PairErrorRates,
    *,
    sign_only: str = "printed",
) -> BlockErrorRates:
    """Conditional block error rates given success or sign-only discrimination.

    ``e1_z_success`` conditions on the B_psi stopping index ``q``: the block
    then holds ``m - q`` sign-carrying outcomes.  With ``sign_only="printed"``
    the sign-only rate weighs its events as first-order in loss (the carrier
    count assumes a single lost pair), which undercounts errors once several
    pairs of a block are lost.  ``sign_only="exact"`` averages the vote error
    over the full carrier distribution of :func:`sign_only_carriers`.
    """
    if sign_only not in ("printed", "exact"):
        raise ValueError(f"sign_only must be 'printed' or 'exact', got {sign_only!r}")
    m, j = enc.m, enc.j
    x = ch.product
    e0x, e0z = per.e0_x, per.e0_z

    ex_s = parity_mass(m, e0x, odd=True)

    ez_s = sum(0.5 ** (q + 1) * _vote_error(m - q, e0z) for q in range(j + 1))
    ez_s /= 1.0 - 0.5 ** (j + 1)

    ps = block_success_prob(enc, ch)
    pf = block_failure_prob(enc, ch)
    sign_only_mass = 1.0 - ps - pf
    if sign_only_mass < DEGENERATE_EPS:
        return BlockErrorRates(ex_s, ez_s, 0.0, degenerate=True)

    if sign_only == "exact":
        dist = sign_only_carriers(enc, ch)
        acc = sum(w * _vote_error(c, e0z) for c, w in dist.items())
        return BlockErrorRates(ex_s, ez_s, min(max(acc / sign_only_mass, 0.0), 1.0))

    acc = 0.0
    for q in range(j):
        weight = (x / 2.0) ** q * (1.0 - x / 2.0 - x ** (m - q) / 2.0 - (1.0 - x) ** (m - q))
        acc += weight * _vote_error(m - 1 - q, e0z)
    weight = (x / 2.0) ** j * (1.0 - x ** (m - j) / 2.0 - (1.0 - x) ** (m - j))
    acc += weight * _vote_error(m - j, e0z)
    return BlockErrorRates(ex_s, ez_s, min(max(acc / sign_only_mass, 0.0), 1.0))


def _zr_literal(n: int, k: int, ez_s: float, ez_pm: float) -> float:
    # Summation limits exactly as printed: the sign-only count starts at 2
    # (even) or 1 (odd), and likewise for succeeding blocks.
    odd_s = sum(binom_pmf(k, p, ez_s) for p in range(1, k + 1, 2))
    even_s = sum(binom_pmf(k, p, ez_s) for p in range(2, k + 1, 2))
    odd_pm = sum(binom_pmf(n - k, q, ez_pm) for q in range(1, n - k + 1, 2))
    even_pm = sum(binom_pmf(n - k, q, ez_pm) for q in range(2, n - k + 1, 2))
    return odd_s * even_pm + even_s * odd_pm


def _zr_parity(n: int, k: int, ez_s: float, ez_pm: float) -> float:
    odd_s = parity_mass(k, ez_s, odd=True)
    odd_pm = parity_mass(n - k, ez_pm, odd=True)
    return odd_s * (1.0 - odd_pm) + (1.0 - odd_s) * odd_pm


def pauli_partition(
    enc: EncodingParams,
    ch: ChannelPoint,
    ber: BlockErrorRates,
    *,
    block: BlockOutcomeProbs | None = None,
    literal_zr: bool = False,
) -> PauliPartition:
    """Partition the logical success probability over ``k`` succeeding blocks.

    A logical sign error needs an odd number of erroneous block signs in
    total.  ``literal_zr=True`` reproduces the printed summation limits,
    which omit the zero-count terms and so drop every single-block sign
    error; it is kept for comparison only.  ``block`` overrides the
    loss-only block probabilities (e.g. with dark counts).
    """
    n = enc.n
    if block is None:
        ps = block_success_prob(enc, ch)
        pf = block_failure_prob(enc, ch)
    else:
        ps, pf = block.p_success, block.p_failure
    so = 1.0 - ps - pf
    zr = _zr_literal if literal_zr else _zr_parity

    p_i = p_x = p_y = p_z = 0.0
    for k in range(1, n + 1):
        w = binom(n, k) * ps**k * so ** (n - k)
        if w == 0.0:
            continue
        xr = upper_tail(k, ceil(k / 2), ber.e1_x_success)
        z = zr(n, k, ber.e1_z_success, ber.e1_z_sign_only)
        p_i += w * (1.0 - xr) * (1.0 - z)
        p_x += w * xr * (1.0 - z)
        p_y += w * (1.0 - xr) * z
        p_z += w * xr * z
    return PauliPartition(p_i, p_x, p_y, p_z)


def block_probs_with_dark(enc: EncodingParams, ch: ChannelPoint, dc: DarkCountModel) -> BlockOutcomeProbs:
    """Block outcome probabilities with one-click dark counts at rate gamma.

    A dark count shifts each pair measurement's success/failure split from
    1/2 : 1/2 to (1/2 - gamma/8) : (1/2 + gamma/8) and can spoil a B_+/- pair
    that would otherwise succeed.
    """
    m, j = enc.m, enc.j
    x = ch.product
    g = dc.gamma
    fail0 = 0.5 + g / 8.0
    r = m - j
    spoiled = sum(0.5**k * binom(r, k) * g**k * (1.0 - g) ** (r - k) for k in range(1, r + 1))
    ps = (1.0 - fail0**j * (0.5 + 0.5 * spoiled)) * x**m
    pf = sum((fail0 * x) ** (m - l) * (1.0 - x) ** l for l in range(m - j, m + 1))
    return BlockOutcomeProbs(ps, pf, max(1.0 - ps - pf, 0.0))


def cbm_success_prob_with_dark(enc: EncodingParams, ch: ChannelPoint, dc: DarkCountModel) -> float:
    b = block_probs_with_dark(enc, ch, dc)
    return success_from_block(enc.n, b.p_success, b.p_failure)
