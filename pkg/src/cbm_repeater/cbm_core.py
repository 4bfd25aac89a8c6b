"""Loss-only probability model of the concatenated Bell measurement.

A logical qubit holds ``n`` blocks of ``m`` photons.  Each block-level
measurement runs up to ``j`` consecutive B_psi attempts on photon pairs and
then switches to B_+ or B_- on every remaining pair.  All probabilities below
depend on the two photon survival rates only through their product.
"""

from __future__ import annotations

from dataclasses import dataclass

from cbm_repeater._binom import binom


def _check_prob(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class EncodingParams:
    """Parity-code encoding ``(n, m)`` and B_psi retry depth ``j``."""

    n: int
    m: int
    j: int

    def __post_init__(self) -> None:
        for name in ("n", "m", "j"):
            if not isinstance(getattr(self, name), int) or isinstance(getattr(self, name), bool):
                raise TypeError(f"{name} must be an int")
        if self.n < 1 or self.m < 1:
            raise ValueError(f"n and m must be >= 1, got n={self.n}, m={self.m}")
        if not 0 <= self.j <= self.m - 1:
            raise ValueError(f"j must lie in [0, m-1] = [0, {self.m - 1}], got {self.j}")

    @property
    def photons(self) -> int:
        """Photons per logical qubit, ``n * m``."""
        return self.n * self.m


@dataclass(frozen=True)
class ChannelPoint:
    """Photon survival rates of the two qubits entering the measurement."""

    eta: float
    eta_prime: float = 1.0

    def __post_init__(self) -> None:
        _check_prob("eta", self.eta)
        _check_prob("eta_prime", self.eta_prime)

    @property
    def product(self) -> float:
        return self.eta * self.eta_prime


@dataclass(frozen=True)
class BlockOutcomeProbs:
    p_success: float
    p_failure: float
    p_sign_only: float


def block_success_prob(enc: EncodingParams, ch: ChannelPoint) -> float:
    """Full discrimination of one block: ``(1 - 2^-(j+1)) (eta eta')^m``."""
    return (1.0 - 0.5 ** (enc.j + 1)) * ch.product**enc.m


def block_failure_prob(enc: EncodingParams, ch: ChannelPoint) -> float:
    """Neither symbol nor sign of the block survives.

    Every intact pair before the first loss must be a failed B_psi and every
    pair from the first loss onward must be lost; ``l`` counts lost pairs.
    """
    x = ch.product
    m = enc.m
    return sum((x / 2.0) ** (m - l) * (1.0 - x) ** l for l in range(m - enc.j, m + 1))


def _failure_pattern_weight(m: int, j: int, l1: int, l2: int) -> float:
    # Fraction of (l1, l2) loss placements that end in failure.  l lost pairs
    # must sit at the tail; l_d of them lose both photons.
    total = 0.0
    for l in range(max(m - j, l1, l2), min(l1 + l2, m) + 1):
        ld = l1 + l2 - l
        total += 0.5 ** (m - l) * binom(l, ld) * binom(l - ld, l1 - ld)
    return total / (binom(m, l1) * binom(m, l2))


def block_failure_prob_alt(enc: EncodingParams, ch: ChannelPoint) -> float:
    """Failure probability summed over per-qubit loss counts ``(l1, l2)``.

    Independent route to :func:`block_failure_prob`; the two agree to
    rounding for every valid input.
    """
    m, j = enc.m, enc.j
    eta, etap = ch.eta, ch.eta_prime
    total = 0.0
    for l1 in range(m + 1):
        w1 = binom(m, l1) * eta ** (m - l1) * (1.0 - eta) ** l1
        if w1 == 0.0:
            continue
        for l2 in range(m + 1):
            if l1 + l2 < m - j:
                continue
            w2 = binom(m, l2) * etap ** (m - l2) * (1.0 - etap) ** l2
            if w2 == 0.0:
                continue
            total += _failure_pattern_weight(m, j, l1, l2) * w1 * w2
    return total


def block_outcome_probs(enc: EncodingParams, ch: ChannelPoint) -> BlockOutcomeProbs:
    ps = block_success_prob(enc, ch)
    pf = block_failure_prob(enc, ch)
    return BlockOutcomeProbs(ps, pf, max(1.0 - ps - pf, 0.0))


def success_from_block(n: int, p_success: float, p_failure: float) -> float:
    """Logical success: no block fails and at least one block fully succeeds."""
    value = (1.0 - p_failure) ** n - (1.0 - p_success - p_failure) ** n
    return max(value, 0.0)


def cbm_success_prob(enc: EncodingParams, ch: ChannelPoint) -> float:
    return success_from_block(enc.n, block_success_prob(enc, ch), block_failure_prob(enc, ch))


def lossless_success_prob(enc: EncodingParams) -> float:
    return 1.0 - 0.5 ** ((enc.j + 1) * enc.n)


def linear_optics_bound(N: int) -> float:
    """Largest Bell-measurement success with ``N`` photons per qubit."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    return 1.0 - 0.5**N


def best_over_j(n: int, m: int, ch: ChannelPoint) -> tuple[int, float]:
    """Exhaustive scan of ``j`` in ``[0, m-1]``; ties go to the smaller ``j``."""
    best_j, best_p = 0, -1.0
    for j in range(m):
        p = cbm_success_prob(EncodingParams(n, m, j), ch)
        if p > best_p:
            best_j, best_p = j, p
    return best_j, best_p
