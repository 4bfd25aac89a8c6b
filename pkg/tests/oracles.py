"""Exact probability-tree oracles for one block measurement.

Written independently of the numba kernels: the pair measurement is
enumerated over photon losses, click patterns and every subset of dark
clicks, then the block protocol is walked over all branches.  Exact for the
modelled physics, so it can adjudicate between the closed forms and the
Monte Carlo for small ``m``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

PSI, PLUS, MINUS = "psi", "plus", "minus"


def _clicks_to_result(b0, counts):
    total = sum(min(c, 2) for c in counts)
    if total < 2:
        return ("loss", None, None, None)
    upper = sum(1 for c in counts[:2] if c)
    lower = sum(1 for c in counts[2:] if c)
    if upper == 1 and lower == 1:
        same = bool(counts[0]) == bool(counts[2])
        if b0 == PSI:
            return ("success", 1, 0 if same else 1, None)
        return ("success", 0 if same else 1, 0 if b0 == PLUS else 1, None)
    if b0 == PSI:
        return ("failure", None, None, None)
    return ("failure", None, None, 1 if b0 == PLUS else 0)


def b0_distribution(b0, symbol, sign, eta, eta_p, lam):
    """Outcome distribution {(kind, symbol, sign, hint): prob} of one pair."""
    if b0 == PSI:
        disc = symbol == 1
        same = sign == 0
    else:
        disc = sign == (0 if b0 == PLUS else 1)
        same = symbol == 0
    if disc:
        placements = [((a, 2 + (a if same else 1 - a)), 0.5) for a in (0, 1)]
    else:
        placements = []
        for base in (0, 2):
            placements += [((base, base + 1), 0.25), ((base, base), 0.125), ((base + 1, base + 1), 0.125)]
    out: dict = {}
    for (d1, d2), pp in placements:
        for l1, l2 in itertools.product((False, True), repeat=2):
            pl = (1 - eta if l1 else eta) * (1 - eta_p if l2 else eta_p)
            for dark in itertools.product((0, 1), repeat=4):
                k = sum(dark)
                pd = lam**k * (1 - lam) ** (4 - k)
                w = pp * pl * pd
                if w == 0.0:
                    continue
                counts = list(dark)
                if not l1:
                    counts[d1] += 1
                if not l2:
                    counts[d2] += 1
                key = _clicks_to_result(b0, counts)
                out[key] = out.get(key, 0.0) + w
    return out


@dataclass
class BlockExact:
    p_success: float = 0.0
    p_sign_only: float = 0.0
    p_failure: float = 0.0
    x_err_success: float = 0.0  # joint with success
    z_err_success: float = 0.0
    z_err_sign_only: float = 0.0


def _odd(count, e):
    return 0.5 * (1.0 - (1.0 - 2.0 * e) ** count)


def _vote_wrong(plus, minus, true_sign, e):
    """P(majority after independent flips is wrong; tie counts as wrong)."""
    total = 0.0
    for a in range(plus + 1):  # plus records flipped to minus
        pa = comb(plus, a) * e**a * (1 - e) ** (plus - a)
        for b in range(minus + 1):  # minus records flipped to plus
            pb = comb(minus, b) * e**b * (1 - e) ** (minus - b)
            p_votes = plus - a + b
            m_votes = minus - b + a
            if p_votes == m_votes:
                wrong = True
            else:
                wrong = (0 if p_votes > m_votes else 1) != true_sign
            if wrong:
                total += pa * pb
    return total


def exact_block(m, j, eta, eta_p=1.0, lam=0.0, e0x=0.0, e0z=0.0, block_symbol=0, block_sign=0):
    """Exact block outcome and error probabilities, averaged over the
    parity-consistent pair symbols and the uniform arbitrary B_+/- choice."""
    res = BlockExact()
    strings = [s for s in itertools.product((0, 1), repeat=m) if sum(s) % 2 == block_symbol]
    w_string = 1.0 / len(strings)
    cache: dict = {}

    def dist(b0, sym):
        key = (b0, sym)
        if key not in cache:
            cache[key] = b0_distribution(b0, sym, block_sign, eta, eta_p, lam)
        return cache[key]

    def finish(prob, plus, minus, n_sym, sym_par, complete):
        if plus + minus == 0:
            res.p_failure += prob
            return
        z = _vote_wrong(plus, minus, block_sign, e0z)
        if complete:
            res.p_success += prob
            res.z_err_success += prob * z
            # recorded parity differs from the truth after an odd number of flips
            p_odd = _odd(n_sym, e0x)
            res.x_err_success += prob * (p_odd if sym_par == block_symbol else 1.0 - p_odd)
        else:
            res.p_sign_only += prob
            res.z_err_sign_only += prob * z

    def walk(syms, k, prob, mode, fails, plus, minus, n_sym, sym_par, complete):
        if k == len(syms):
            finish(prob, plus, minus, n_sym, sym_par, complete)
            return
        if mode == PSI and fails == j:
            for choice in (PLUS, MINUS):
                walk(syms, k, prob * 0.5, choice, fails, plus, minus, n_sym, sym_par, complete)
            return
        for (kind, dsym, dsign, hint), p in dist(mode, syms[k]).items():
            pr = prob * p
            if mode == PSI:
                if kind == "success":
                    nxt = PLUS if dsign == 0 else MINUS
                    walk(syms, k + 1, pr, nxt, fails, plus + (dsign == 0), minus + (dsign == 1),
                         n_sym + 1, sym_par ^ dsym, complete)
                elif kind == "failure":
                    walk(syms, k + 1, pr, PSI, fails + 1, plus, minus, n_sym + 1, sym_par, complete)
                else:
                    for choice in (PLUS, MINUS):
                        walk(syms, k + 1, pr * 0.5, choice, fails, plus, minus, n_sym, sym_par, False)
            else:
                if kind == "success":
                    walk(syms, k + 1, pr, mode, fails, plus + (dsign == 0), minus + (dsign == 1),
                         n_sym + 1, sym_par ^ dsym, complete)
                elif kind == "failure":
                    walk(syms, k + 1, pr, mode, fails, plus + (hint == 0), minus + (hint == 1),
                         n_sym, sym_par, False)
                else:
                    walk(syms, k + 1, pr, mode, fails, plus, minus, n_sym, sym_par, False)

    for s in strings:
        walk(s, 0, w_string, PSI, 0, 0, 0, 0, 0, True)
    return res
