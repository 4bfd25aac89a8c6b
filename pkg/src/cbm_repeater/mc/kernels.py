"""Event-level CBM protocol kernels (numba).

Encodings used inside the kernels:

* pair symbol: 0 = phi, 1 = psi; sign: 0 = plus, 1 = minus
* B0 type: 0 = B_psi, 1 = B_plus, 2 = B_minus
* B0 kind: 0 = success, 1 = failure, 2 = loss
* B1 kind: 0 = success, 1 = sign only, 2 = failure
* detectors: 0 = upper H, 1 = upper V, 2 = lower H, 3 = lower V
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange, uint64

from cbm_repeater.mc.rng import trial_key, uniform

B_PSI, B_PLUS, B_MINUS = 0, 1, 2
B0_SUCCESS, B0_FAILURE, B0_LOSS = 0, 1, 2
B1_SUCCESS, B1_SIGN_ONLY, B1_FAILURE = 0, 1, 2
NO_HINT = -1

# Error injection modes.
INJECT_RECORD, INJECT_PAIR = 0, 1

# Draw slots per pair site.
D_SYMBOL = 0
D_LOSS1 = 1
D_LOSS2 = 2
D_FLIP_X = 3
D_FLIP_Z = 4
D_PATTERN = 5
D_HALF = 6
D_DARK = 7  # 7..10, one per detector
D_ANY_DARK = 11
N_DRAWS = 16
# Block-level draws live at pair slot MAX_PAIRS.
MAX_PAIRS = 4096
D_BLOCK_SIGN = 0
D_ARBITRARY = 1

# Tally layout.
T_SUCCESS = 0
T_FAILURE = 1
T_SIGN_ONLY_ALL = 2
T_P_I = 3
T_P_X = 4  # symbol error only
T_P_Y = 5  # sign error only
T_P_Z = 6  # both
T_BLOCKS = 7
T_BLOCK_SUCCESS = 8
T_BLOCK_FAILURE = 9
T_BLOCK_SIGN_ONLY = 10
T_BLOCK_X_ERR_SUCCESS = 11
T_BLOCK_Z_ERR_SUCCESS = 12
T_BLOCK_Z_ERR_SIGN_ONLY = 13
T_PARITY_VIOLATIONS = 14
N_TALLIES = 15


@njit(cache=True, inline="always")
def site(block, pair, slot):
    return uint64((block * (MAX_PAIRS + 1) + pair) * N_DRAWS + slot)


@njit(cache=True, inline="always")
def sample_block_signs(key, n, logical_sign, out):
    """Block signs with minus-parity equal to the logical sign."""
    parity = 0
    for b in range(n - 1):
        s = 1 if uniform(key, site(b, MAX_PAIRS, D_BLOCK_SIGN)) < 0.5 else 0
        out[b] = s
        parity ^= s
    out[n - 1] = parity ^ logical_sign


@njit(cache=True, inline="always")
def sample_pair_symbols(key, block, m, block_symbol, out):
    """Pair symbols whose psi-count parity equals the block symbol."""
    parity = 0
    for k in range(m - 1):
        s = 1 if uniform(key, site(block, k, D_SYMBOL)) < 0.5 else 0
        out[k] = s
        parity ^= s
    out[m - 1] = parity ^ block_symbol


@njit(cache=True, inline="always")
def discriminable(b0_type, symbol, sign):
    if b0_type == B_PSI:
        return symbol == 1
    if b0_type == B_PLUS:
        return sign == 0
    return sign == 1


@njit(cache=True, inline="always")
def _click(d, c0, c1, c2, c3):
    if d == 0:
        c0 += 1
    elif d == 1:
        c1 += 1
    elif d == 2:
        c2 += 1
    else:
        c3 += 1
    return c0, c1, c2, c3


@njit(cache=True, inline="always")
def run_b0(b0_type, symbol, sign, lost1, lost2, lam, key, block, pair):
    """One photon-pair measurement at detector level.

    Returns (kind, symbol, sign, hint).  ``symbol``/``sign`` are the decoded
    values on success (-1 otherwise); ``hint`` is the sign implied by a
    B_+/B_- failure (-1 when absent).
    """
    if lam == 0.0:
        # Without dark counts the click pattern always decodes to the ideal
        # outcome, so skip the detector-level draws.
        if lost1 or lost2:
            return B0_LOSS, -1, -1, NO_HINT
        if discriminable(b0_type, symbol, sign):
            return B0_SUCCESS, symbol, sign, NO_HINT
        if b0_type == B_PSI:
            return B0_FAILURE, -1, -1, NO_HINT
        return B0_FAILURE, -1, -1, 1 if b0_type == B_PLUS else 0
    pattern = uniform(key, site(block, pair, D_PATTERN))
    if discriminable(b0_type, symbol, sign):
        # One photon per half; equal polarisations mark the first state of
        # the discriminated pair (psi+ for B_psi, phi+/phi- for B_+/B_-).
        if b0_type == B_PSI:
            same = sign == 0
        else:
            same = symbol == 0
        a = 0 if pattern < 0.5 else 1
        b = a if same else 1 - a
        d1 = a
        d2 = 2 + b
    else:
        base = 0 if uniform(key, site(block, pair, D_HALF)) < 0.5 else 2
        if pattern < 0.5:
            d1, d2 = base, base + 1
        elif pattern < 0.75:
            d1, d2 = base, base
        else:
            d1, d2 = base + 1, base + 1
    c0 = 0
    c1 = 0
    c2 = 0
    c3 = 0
    if not lost1:
        c0, c1, c2, c3 = _click(d1, c0, c1, c2, c3)
    if not lost2:
        c0, c1, c2, c3 = _click(d2, c0, c1, c2, c3)
    # Dark clicks: one draw decides whether any detector fires; the subset
    # is then drawn conditionally, so each detector still fires
    # independently with probability lam.
    if uniform(key, site(block, pair, D_ANY_DARK)) < 1.0 - (1.0 - lam) ** 4:
        fired = False
        for d in range(4):
            if fired:
                p = lam
            else:
                p = lam / (1.0 - (1.0 - lam) ** (4 - d))
            if uniform(key, site(block, pair, D_DARK + d)) < p:
                fired = True
                c0, c1, c2, c3 = _click(d, c0, c1, c2, c3)
    # Photon-number resolution saturates at two.
    total = min(c0, 2) + min(c1, 2) + min(c2, 2) + min(c3, 2)
    if total < 2:
        return B0_LOSS, -1, -1, NO_HINT
    upper = (1 if c0 > 0 else 0) + (1 if c1 > 0 else 0)
    lower = (1 if c2 > 0 else 0) + (1 if c3 > 0 else 0)
    if upper == 1 and lower == 1:
        same_out = (c0 > 0) == (c2 > 0)
        if b0_type == B_PSI:
            return B0_SUCCESS, 1, 0 if same_out else 1, NO_HINT
        type_sign = 0 if b0_type == B_PLUS else 1
        return B0_SUCCESS, 0 if same_out else 1, type_sign, NO_HINT
    if b0_type == B_PSI:
        return B0_FAILURE, -1, -1, NO_HINT
    return B0_FAILURE, -1, -1, 1 if b0_type == B_PLUS else 0


@njit(cache=True, inline="always")
def run_b1(
    symbols, signs, lost1, lost2, flip_x, flip_z, j, lam, key, block, true_sign, inject_mode
):
    """Block measurement with B_psi feedforward.

    Returns (kind, decoded symbol, decoded sign).  In record mode the pair
    flips corrupt only the recorded outcomes; in pair mode they were already
    applied to ``symbols``/``signs`` by the caller.  A tied sign vote is
    decoded as the wrong sign.
    """
    m = symbols.shape[0]
    in_psi = True
    fails = 0
    chosen = B_PLUS
    plus_votes = 0
    minus_votes = 0
    sym_parity = 0
    sym_complete = True
    for k in range(m):
        if in_psi and fails == j:
            in_psi = False
            chosen = B_PLUS if uniform(key, site(block, MAX_PAIRS, D_ARBITRARY)) < 0.5 else B_MINUS
        b0_type = B_PSI if in_psi else chosen
        kind, dsym, dsign, hint = run_b0(b0_type, symbols[k], signs[k], lost1[k], lost2[k], lam, key, block, k)
        rec_sym = -1
        rec_sign = -1
        if in_psi:
            if kind == B0_SUCCESS:
                in_psi = False
                chosen = B_PLUS if dsign == 0 else B_MINUS
                rec_sym = dsym
                rec_sign = dsign
            elif kind == B0_FAILURE:
                fails += 1
                rec_sym = 0
            else:
                in_psi = False
                chosen = B_PLUS if uniform(key, site(block, MAX_PAIRS, D_ARBITRARY)) < 0.5 else B_MINUS
        else:
            if kind == B0_SUCCESS:
                rec_sym = dsym
                rec_sign = dsign
            elif kind == B0_FAILURE:
                rec_sign = hint
        if inject_mode == INJECT_RECORD:
            if rec_sym >= 0 and flip_x[k]:
                rec_sym ^= 1
            if rec_sign >= 0 and flip_z[k]:
                rec_sign ^= 1
        if rec_sym >= 0:
            sym_parity ^= rec_sym
        else:
            sym_complete = False
        if rec_sign == 0:
            plus_votes += 1
        elif rec_sign == 1:
            minus_votes += 1
    if plus_votes + minus_votes == 0:
        return B1_FAILURE, -1, -1
    if plus_votes > minus_votes:
        sign = 0
    elif minus_votes > plus_votes:
        sign = 1
    else:
        sign = 1 - true_sign
    if sym_complete:
        return B1_SUCCESS, sym_parity, sign
    return B1_SIGN_ONLY, -1, sign


@njit(cache=True)
def run_trial(
    n, m, j, eta, eta_p, e0x, e0z, lam, logical_symbol, logical_sign, inject_mode, seed, trial, tally
):
    """One logical Bell measurement; adds its outcome into ``tally``."""
    _trial(
        n, m, j, eta, eta_p, e0x, e0z, lam, logical_symbol, logical_sign, inject_mode, seed, trial, tally,
        np.empty(n, dtype=np.int64), np.empty(m, dtype=np.int64), np.empty(m, dtype=np.int64),
        np.empty(m, dtype=np.bool_), np.empty(m, dtype=np.bool_), np.empty(m, dtype=np.bool_),
        np.empty(m, dtype=np.bool_),
    )


@njit(cache=True)
def _trial(
    n, m, j, eta, eta_p, e0x, e0z, lam, logical_symbol, logical_sign, inject_mode, seed, trial, tally,
    block_signs, symbols, signs, lost1, lost2, flip_x, flip_z,
):
    key = trial_key(uint64(seed), uint64(trial))
    sample_block_signs(key, n, logical_sign, block_signs)

    parity_check = 0
    n_success = 0
    n_failure = 0
    sym_votes_psi = 0
    sign_parity = 0
    for b in range(n):
        sample_pair_symbols(key, b, m, logical_symbol, symbols)
        psi_count = 0
        for k in range(m):
            signs[k] = block_signs[b]
            psi_count += symbols[k]
            lost1[k] = uniform(key, site(b, k, D_LOSS1)) >= eta
            lost2[k] = uniform(key, site(b, k, D_LOSS2)) >= eta_p
            flip_x[k] = e0x > 0.0 and uniform(key, site(b, k, D_FLIP_X)) < e0x
            flip_z[k] = e0z > 0.0 and uniform(key, site(b, k, D_FLIP_Z)) < e0z
        if psi_count % 2 != logical_symbol:
            tally[T_PARITY_VIOLATIONS] += 1
        parity_check ^= block_signs[b]
        if inject_mode == INJECT_PAIR:
            for k in range(m):
                if flip_x[k]:
                    symbols[k] ^= 1
                if flip_z[k]:
                    signs[k] ^= 1
        kind, bsym, bsign = run_b1(
            symbols, signs, lost1, lost2, flip_x, flip_z, j, lam, key, b, block_signs[b], inject_mode
        )
        tally[T_BLOCKS] += 1
        if kind == B1_SUCCESS:
            n_success += 1
            tally[T_BLOCK_SUCCESS] += 1
            if bsym != logical_symbol:
                tally[T_BLOCK_X_ERR_SUCCESS] += 1
            if bsign != block_signs[b]:
                tally[T_BLOCK_Z_ERR_SUCCESS] += 1
            sym_votes_psi += bsym
            sign_parity ^= bsign
        elif kind == B1_SIGN_ONLY:
            tally[T_BLOCK_SIGN_ONLY] += 1
            if bsign != block_signs[b]:
                tally[T_BLOCK_Z_ERR_SIGN_ONLY] += 1
            sign_parity ^= bsign
        else:
            n_failure += 1
            tally[T_BLOCK_FAILURE] += 1
    if parity_check != logical_sign:
        tally[T_PARITY_VIOLATIONS] += 1

    if n_failure > 0:
        tally[T_FAILURE] += 1
        return
    if n_success == 0:
        tally[T_SIGN_ONLY_ALL] += 1
        return
    tally[T_SUCCESS] += 1
    sym_votes_phi = n_success - sym_votes_psi
    if sym_votes_psi > sym_votes_phi:
        symbol = 1
    elif sym_votes_phi > sym_votes_psi:
        symbol = 0
    else:
        symbol = 1 - logical_symbol
    x_err = symbol != logical_symbol
    z_err = sign_parity != logical_sign
    if x_err and z_err:
        tally[T_P_Z] += 1
    elif x_err:
        tally[T_P_X] += 1
    elif z_err:
        tally[T_P_Y] += 1
    else:
        tally[T_P_I] += 1


@njit(cache=True, parallel=True)
def run_trials(
    n, m, j, eta, eta_p, e0x, e0z, lam, logical_symbol, logical_sign, inject_mode, seed, trials, chunk
):
    """Tally ``trials`` independent trials; chunk sums are order-independent."""
    n_chunks = (trials + chunk - 1) // chunk
    partial = np.zeros((n_chunks, N_TALLIES), dtype=np.int64)
    for c in prange(n_chunks):
        start = c * chunk
        stop = min(start + chunk, trials)
        row = partial[c]
        block_signs = np.empty(n, dtype=np.int64)
        symbols = np.empty(m, dtype=np.int64)
        signs = np.empty(m, dtype=np.int64)
        lost1 = np.empty(m, dtype=np.bool_)
        lost2 = np.empty(m, dtype=np.bool_)
        flip_x = np.empty(m, dtype=np.bool_)
        flip_z = np.empty(m, dtype=np.bool_)
        for t in range(start, stop):
            _trial(
                n, m, j, eta, eta_p, e0x, e0z, lam, logical_symbol, logical_sign, inject_mode, seed, t, row,
                block_signs, symbols, signs, lost1, lost2, flip_x, flip_z,
            )
    return partial.sum(axis=0)
