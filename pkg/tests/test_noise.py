import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cbm_repeater import (
    ChannelPoint,
    DarkCountModel,
    EncodingParams,
    FlipRates,
    PairErrorRates,
    block_error_rates,
    block_failure_prob,
    block_outcome_probs,
    block_probs_with_dark,
    block_success_prob,
    cbm_success_prob,
    cbm_success_prob_with_dark,
    depolarizing_to_flips,
    pair_error_rates,
    pauli_partition,
    sign_only_carriers,
)
from oracles import exact_block


@st.composite
def encodings(draw, n_max=12, m_max=8):
    m = draw(st.integers(1, m_max))
    return EncodingParams(draw(st.integers(1, n_max)), m, draw(st.integers(0, m - 1)))


small_rate = st.floats(0.0, 0.1)


# ------------------------------------------------------------------ flips


@pytest.mark.parametrize("e_d, want", [(0.0, 0.0), (5.6e-5, 2.8e-5), (0.01, 0.005)])
def test_depolarizing_to_flips(e_d, want):
    fr = depolarizing_to_flips(e_d)
    assert fr.e_x == pytest.approx(want, rel=1e-15)
    assert fr.e_z == pytest.approx(want, rel=1e-15)


@pytest.mark.parametrize("bad", [-1e-9, 1.5])
def test_depolarizing_rejects_out_of_range(bad):
    with pytest.raises(ValueError):
        depolarizing_to_flips(bad)


def test_flip_rates_domain():
    with pytest.raises(ValueError):
        FlipRates(0.6, 0.0)


def test_pair_error_rates_examples():
    assert pair_error_rates(FlipRates(0.0, 0.0)) == PairErrorRates(0.0, 0.0)
    per = pair_error_rates(depolarizing_to_flips(5.6e-5))
    assert per.e0_x == pytest.approx(5.6e-5 * (1 - 5.6e-5 / 2), rel=1e-14)
    assert per.e0_x == pytest.approx(5.59984e-5, rel=1e-6)
    assert pair_error_rates(FlipRates(0.5, 0.5)) == PairErrorRates(0.5, 0.5)


@given(st.floats(0.0, 0.5), st.floats(0.0, 0.5))
def test_pair_error_rates_formula(ex, ez):
    per = pair_error_rates(FlipRates(ex, ez))
    assert per.e0_x == pytest.approx(2 * ex * (1 - ex), abs=1e-16)
    assert per.e0_z == pytest.approx(2 * ez * (1 - ez), abs=1e-16)


# ------------------------------------------------------------------ block error rates


def test_block_error_rates_zero_without_errors():
    ber = block_error_rates(EncodingParams(3, 4, 2), ChannelPoint(0.9, 1.0), PairErrorRates(0.0, 0.0))
    assert (ber.e1_x_success, ber.e1_z_success, ber.e1_z_sign_only) == (0.0, 0.0, 0.0)


def _brute_sign_error_success(m, j, e):
    """Enumerate sign-flip patterns and B_psi stopping positions (lossless)."""
    num = den = 0.0
    for q in range(j + 1):
        w = 0.5 ** (q + 1)
        for pat in itertools.product((0, 1), repeat=m):
            pw = math.prod(e if b else 1 - e for b in pat)
            carriers = pat[q:]
            wrong = 2 * sum(carriers) >= len(carriers)
            num += w * pw * wrong
            den += w * pw
    return num / den


def test_sign_error_given_success_matches_enumeration():
    ber = block_error_rates(EncodingParams(1, 3, 2), ChannelPoint(1.0, 1.0), PairErrorRates(0.0, 0.1))
    assert ber.e1_z_success == pytest.approx(_brute_sign_error_success(3, 2, 0.1), rel=1e-13)
    # frozen from the enumeration: 0.0846 = 0.296 / 3.5
    assert ber.e1_z_success == pytest.approx(0.296 / 3.5, rel=1e-13)


def test_symbol_error_is_odd_parity():
    ber = block_error_rates(EncodingParams(1, 2, 1), ChannelPoint(0.9, 1.0), PairErrorRates(0.01, 0.0))
    assert ber.e1_x_success == pytest.approx(0.0198, rel=1e-13)


def test_degenerate_sign_only_denominator():
    ber = block_error_rates(EncodingParams(2, 1, 0), ChannelPoint(0.0, 1.0), PairErrorRates(0.1, 0.1))
    assert ber.degenerate
    assert ber.e1_z_sign_only == 0.0


def test_unknown_sign_only_model_rejected():
    with pytest.raises(ValueError):
        block_error_rates(EncodingParams(1, 2, 1), ChannelPoint(0.9, 1.0), PairErrorRates(0, 0), sign_only="other")


@pytest.mark.parametrize(
    "m, j, x",
    [(1, 0, 0.9), (2, 1, 0.95), (3, 1, 0.9), (3, 2, 0.75), (4, 2, 0.9), (5, 2, 0.9), (5, 4, 0.95)],
)
@pytest.mark.parametrize("e0x, e0z", [(0.01, 0.02), (0.1, 0.05)])
def test_block_error_rates_against_exact_tree(m, j, x, e0x, e0z):
    enc, ch = EncodingParams(1, m, j), ChannelPoint(x, 1.0)
    ex = exact_block(m, j, x, 1.0, 0.0, e0x, e0z)
    ber = block_error_rates(enc, ch, PairErrorRates(e0x, e0z), sign_only="exact")
    assert ber.e1_x_success == pytest.approx(ex.x_err_success / ex.p_success, rel=1e-12)
    assert ber.e1_z_success == pytest.approx(ex.z_err_success / ex.p_success, rel=1e-12)
    assert ber.e1_z_sign_only == pytest.approx(ex.z_err_sign_only / ex.p_sign_only, rel=1e-12)


@pytest.mark.parametrize("m, j", [(3, 1), (4, 3), (5, 2)])
def test_printed_sign_only_rate_exact_without_loss(m, j):
    enc, ch, per = EncodingParams(1, m, j), ChannelPoint(1.0, 1.0), PairErrorRates(0.0, 0.02)
    printed = block_error_rates(enc, ch, per).e1_z_sign_only
    exact = block_error_rates(enc, ch, per, sign_only="exact").e1_z_sign_only
    assert printed == pytest.approx(exact, rel=1e-13)


def test_printed_sign_only_rate_undercounts_multi_loss_blocks():
    # Blocks that lose several pairs keep few sign carriers; the printed
    # weights assume one lost pair, so the gap widens with loss.
    enc, per = EncodingParams(1, 5, 2), PairErrorRates(0.0, 0.02)
    gaps = []
    for x in (0.999, 0.9, 0.75):
        ch = ChannelPoint(x, 1.0)
        printed = block_error_rates(enc, ch, per).e1_z_sign_only
        exact = block_error_rates(enc, ch, per, sign_only="exact").e1_z_sign_only
        gaps.append(exact / printed)
    assert all(g >= 1.0 for g in gaps)
    assert gaps == sorted(gaps)
    assert gaps[-1] > 5.0


@given(encodings(), st.floats(0.05, 1.0))
def test_sign_only_carriers_mass(enc, x):
    ch = ChannelPoint(x, 1.0)
    dist = sign_only_carriers(enc, ch)
    assert all(c >= 1 for c in dist)
    ps, pf = block_success_prob(enc, ch), block_failure_prob(enc, ch)
    assert sum(dist.values()) == pytest.approx(1.0 - ps - pf, abs=1e-12)


@given(encodings(), st.floats(0.05, 1.0), small_rate, small_rate, st.sampled_from(["printed", "exact"]))
def test_block_error_rates_are_probabilities(enc, x, ex, ez, model):
    ber = block_error_rates(enc, ChannelPoint(x, 1.0), PairErrorRates(ex, ez), sign_only=model)
    for v in (ber.e1_x_success, ber.e1_z_success, ber.e1_z_sign_only):
        assert 0.0 <= v <= 1.0


# ------------------------------------------------------------------ partition


@given(encodings(n_max=40), st.floats(0.0, 1.0), small_rate, small_rate, st.booleans())
def test_partition_sums_to_success(enc, x, ex, ez, literal):
    ch = ChannelPoint(x, 1.0)
    part = pauli_partition(enc, ch, block_error_rates(enc, ch, PairErrorRates(ex, ez)), literal_zr=literal)
    assert abs(part.total - cbm_success_prob(enc, ch)) <= 1e-12
    for v in (part.p_i, part.p_x, part.p_y, part.p_z):
        assert v >= -1e-15


@given(encodings(n_max=40), st.floats(0.0, 1.0))
def test_error_free_partition(enc, x):
    ch = ChannelPoint(x, 1.0)
    part = pauli_partition(enc, ch, block_error_rates(enc, ch, pair_error_rates(depolarizing_to_flips(0.0))))
    assert part.p_x == part.p_y == part.p_z == 0.0
    assert part.p_i == pytest.approx(cbm_success_prob(enc, ch), abs=1e-12)


def test_literal_sign_sums_miss_single_block_errors():
    # With one block the printed limits never count a sign error.
    enc, ch = EncodingParams(1, 3, 2), ChannelPoint(1.0, 1.0)
    ber = block_error_rates(enc, ch, PairErrorRates(0.0, 0.1))
    lit = pauli_partition(enc, ch, ber, literal_zr=True)
    par = pauli_partition(enc, ch, ber)
    assert lit.p_y == 0.0
    assert par.p_y == pytest.approx(cbm_success_prob(enc, ch) * ber.e1_z_success, rel=1e-12)


def _error_fractions(n, m, j, x, e_d):
    per = pair_error_rates(depolarizing_to_flips(e_d))
    enc, ch = EncodingParams(n, m, j), ChannelPoint(x, 1.0)
    part = pauli_partition(enc, ch, block_error_rates(enc, ch, per))
    return (part.p_x + part.p_z) / part.total, (part.p_y + part.p_z) / part.total


@pytest.mark.parametrize("x", [0.9, 0.95, 0.99])
@pytest.mark.parametrize("m, j", [(3, 1), (4, 2), (5, 2)])
def test_majority_vote_suppresses_symbol_errors_with_n(x, m, j):
    sym = [_error_fractions(n, m, j, x, 1e-3)[0] for n in range(3, 16, 2)]
    assert all(b < a for a, b in zip(sym, sym[1:]))


@pytest.mark.parametrize("x", [0.9, 0.99])
@pytest.mark.parametrize("m, j", [(3, 1), (5, 2)])
def test_sign_errors_accumulate_with_n(x, m, j):
    # The logical sign is a parity over every block, so adding blocks adds
    # sign errors; the total error fraction is therefore not monotone in n.
    sign = [_error_fractions(n, m, j, x, 1e-3)[1] for n in range(1, 16, 2)]
    assert all(b > a for a, b in zip(sign, sign[1:]))


# ------------------------------------------------------------------ dark counts


def test_dark_count_gamma():
    dc = DarkCountModel(1e-4)
    assert dc.gamma == pytest.approx(4e-4 * (1 - 1e-4) ** 3, rel=1e-15)
    assert DarkCountModel.from_gamma(dc.gamma).lam == pytest.approx(1e-4, rel=1e-12)
    assert DarkCountModel.from_gamma(0.0).lam == 0.0


def test_dark_count_cap():
    with pytest.raises(ValueError):
        DarkCountModel(2e-3)
    with pytest.raises(ValueError):
        DarkCountModel.from_gamma(0.1)


@given(encodings(n_max=20), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_dark_counts_off_reproduce_loss_only(enc, eta, eta_p):
    ch = ChannelPoint(eta, eta_p)
    assert block_probs_with_dark(enc, ch, DarkCountModel(0.0)) == block_outcome_probs(enc, ch)
    assert cbm_success_prob_with_dark(enc, ch, DarkCountModel(0.0)) == cbm_success_prob(enc, ch)


def test_dark_counts_lower_block_success():
    enc, ch = EncodingParams(1, 2, 1), ChannelPoint(1.0, 1.0)
    dc = DarkCountModel.from_gamma(1e-3)
    assert block_probs_with_dark(enc, ch, dc).p_success < 0.75


@given(encodings(n_max=20), st.floats(0.3, 1.0), st.floats(0.0, 1e-3), st.floats(0.0, 1e-3))
def test_block_success_decreasing_in_dark_rate(enc, x, a, b):
    lo, hi = sorted((a, b))
    ch = ChannelPoint(x, 1.0)
    p_lo = block_probs_with_dark(enc, ch, DarkCountModel(lo))
    p_hi = block_probs_with_dark(enc, ch, DarkCountModel(hi))
    assert p_hi.p_success <= p_lo.p_success + 1e-15
    assert p_hi.p_failure >= p_lo.p_failure - 1e-15


def test_dark_count_insensitivity():
    enc, ch = EncodingParams(10, 3, 2), ChannelPoint(0.9, 1.0)
    clean = cbm_success_prob(enc, ch)
    dark = cbm_success_prob_with_dark(enc, ch, DarkCountModel(1e-4))
    assert abs(clean - dark) < 1e-2


@pytest.mark.parametrize("m, j, x", [(2, 1, 1.0), (3, 2, 0.95), (4, 3, 0.95), (4, 1, 0.9)])
@pytest.mark.parametrize("lam", [1e-5, 1e-4])
def test_dark_count_closed_form_within_first_order_of_exact(m, j, x, lam):
    # The closed form omits dark clicks that spoil B_+/- pairs after a
    # B_psi success, a term of order gamma.  Its gap to the exact tree is
    # bounded by m * gamma and shrinks linearly with lam.
    dc = DarkCountModel(lam)
    ex = exact_block(m, j, x, 1.0, lam)
    cf = block_probs_with_dark(EncodingParams(1, m, j), ChannelPoint(x, 1.0), dc)
    assert abs(cf.p_success - ex.p_success) <= m * dc.gamma
    assert abs(cf.p_failure - ex.p_failure) <= m * dc.gamma
