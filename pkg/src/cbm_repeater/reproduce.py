"""Regenerate the published tables and plot data with reference deltas.

Each builder returns ``(columns, rows)``; every row carries a ``pass``
column so the CLI can signal tolerance failures through its exit status.
Figures have no printed numbers, so their ``pass`` column checks the
structural statement the figure makes.
"""

from __future__ import annotations

import math
from typing import Callable

from scipy.optimize import brentq

from cbm_repeater import reference as ref
from cbm_repeater.cbm_core import ChannelPoint, EncodingParams, best_over_j, cbm_success_prob, linear_optics_bound
from cbm_repeater.optimizer import SearchSpace, optimize, sweep
from cbm_repeater.repeater import (
    HardwareParams,
    chain_metrics,
    direct_transmission,
    prep_time,
    single_photon_transmission,
)

Table = tuple[tuple[str, ...], list[dict]]

TABLE_A1_COLUMNS = (
    "n", "m", "eta", "best_j", "P_s", "P_s_pct", "P_s_pct_2dp", "ref_pct", "comparison_ref_pct", "delta_pp", "pass",
)


def table_a1() -> Table:
    rows = []
    for (n, m), values in ref.TABLE_A1_CBM.items():
        for eta, want in zip(ref.TABLE_A1_ETAS, values):
            j, p = best_over_j(n, m, ChannelPoint(eta, 1.0))
            pct = 100.0 * p
            delta = pct - want
            rows.append(
                {
                    "n": n,
                    "m": m,
                    "eta": eta,
                    "best_j": j,
                    "P_s": p,
                    "P_s_pct": pct,
                    "P_s_pct_2dp": f"{pct:.2f}",
                    "ref_pct": want,
                    "comparison_ref_pct": ref.TABLE_A1_COMPARISON[(n, m)][ref.TABLE_A1_ETAS.index(eta)],
                    "delta_pp": delta,
                    # Printed values are rounded to 2 decimals; half a unit of
                    # that rounding sits inside the tolerance.
                    "pass": abs(delta) <= ref.TABLE_A1_TOL_PP + 1e-9,
                }
            )
    return TABLE_A1_COLUMNS, rows


TABLE_I_COLUMNS = (
    "L", "eps", "n", "m", "j", "L0", "tau_p_us", "eta0", "Q", "rt0", "F",
    "ref_n", "ref_m", "ref_j", "ref_L0", "ref_eta0", "ref_Q", "ref_rt0", "ref_F",
    "Q_rel_delta", "rt0_delta", "F_delta", "ref_tuple_Q", "ref_tuple_Q_rel_delta",
    "pass_Q", "pass_rt0", "pass_F", "pass_tuple", "pass",
)


def table_1_row(row: ref.TableIRow, space: SearchSpace | None = None, *, workers: int = 1, sign_only: str = "printed") -> dict:
    hw = HardwareParams(eps_s=row.eps)
    best = optimize(hw, row.L, ref.E_D_TABLE_I, space, workers=workers, sign_only=sign_only)
    met = best.metrics
    paper_enc = EncodingParams(row.n, row.m, row.j)
    paper_q = chain_metrics(paper_enc, hw, row.L, row.L0, ref.E_D_TABLE_I, sign_only=sign_only).q_cost
    q_rel = met.q_cost / row.q_min - 1.0
    tuple_rel = paper_q / row.q_min - 1.0
    out = {
        "L": row.L,
        "eps": row.eps,
        "n": best.enc.n,
        "m": best.enc.m,
        "j": best.enc.j,
        "L0": best.L0,
        "tau_p_us": prep_time(best.enc.n, best.enc.m, hw.tau) * 1e6,
        "eta0": met.eta0,
        "Q": met.q_cost,
        "rt0": met.rt0,
        "F": met.fidelity,
        "ref_n": row.n,
        "ref_m": row.m,
        "ref_j": row.j,
        "ref_L0": row.L0,
        "ref_eta0": row.eta0,
        "ref_Q": row.q_min,
        "ref_rt0": row.rt0_table,
        "ref_F": row.fidelity,
        "Q_rel_delta": q_rel,
        "rt0_delta": met.rt0 - row.rt0_table,
        "F_delta": met.fidelity - row.fidelity,
        "ref_tuple_Q": paper_q,
        "ref_tuple_Q_rel_delta": tuple_rel,
        "pass_Q": abs(q_rel) <= ref.TABLE_I_Q_REL_TOL,
        "pass_rt0": abs(met.rt0 - row.rt0_table) <= ref.TABLE_I_RT0_TOL,
        "pass_F": abs(met.fidelity - row.fidelity) <= ref.TABLE_I_F_TOL,
        "pass_tuple": abs(tuple_rel) <= ref.TABLE_I_Q_REL_TOL,
    }
    out["pass"] = out["pass_Q"] and out["pass_rt0"] and out["pass_F"] and out["pass_tuple"]
    return out


def table_1(*, workers: int = 1, sign_only: str = "printed") -> Table:
    return TABLE_I_COLUMNS, [table_1_row(r, workers=workers, sign_only=sign_only) for r in ref.TABLE_I]


FIG2_COLUMNS = ("eta_product", "N", "n", "m", "best_j", "P_s", "bound", "pass")


def fig_2(max_photons: int = 40) -> Table:
    """Best P_s over every (n, m) with n*m = N, for N = 1..max_photons."""
    rows = []
    for eta in ref.FIG2_ETAS:
        ch = ChannelPoint(eta, 1.0)
        for N in range(1, max_photons + 1):
            best = None
            for m in range(1, N + 1):
                if N % m:
                    continue
                n = N // m
                j, p = best_over_j(n, m, ch)
                if best is None or p > best[3]:
                    best = (n, m, j, p)
            n, m, j, p = best
            bound = linear_optics_bound(N)
            rows.append(
                {"eta_product": eta, "N": N, "n": n, "m": m, "best_j": j, "P_s": p, "bound": bound, "pass": p <= bound + 1e-12}
            )
    return FIG2_COLUMNS, rows


FIG4_COLUMNS = ("L", "L0", "eta0", "n", "m", "best_j", "rt0", "Q", "is_min_Q", "ref_n", "ref_m", "pass")


def fig_4(n_max: int = 40, m_max: int = 12) -> Table:
    """Rt0 surface over (n, m) at fixed spacing and eta0; the cheapest cell
    must be the marked optimum."""
    rows = []
    hw = HardwareParams()
    for L, L0, rn, rm in ref.FIG4_CASES:
        space = SearchSpace(n_range=(1, n_max), m_range=(1, m_max), L0_grid=(L0,))
        cells = sweep(hw, L, 0.0, space, output_axes=("n", "m"), eta0=ref.FIG4_ETA0, with_fidelity=False)
        cheapest = min(cells, key=lambda c: (c["Q"], c["n"] * c["m"], c["n"]))
        ok = cheapest["n"] == rn and cheapest["m"] == rm
        for c in cells:
            rows.append(
                {
                    "L": L,
                    "L0": L0,
                    "eta0": ref.FIG4_ETA0,
                    "n": c["n"],
                    "m": c["m"],
                    "best_j": c["best_j"],
                    "rt0": c["rt0"],
                    "Q": c["Q"],
                    "is_min_Q": c is cheapest,
                    "ref_n": rn,
                    "ref_m": rm,
                    "pass": ok,
                }
            )
    return FIG4_COLUMNS, rows


FIGA4_ENCODINGS: tuple[tuple[int, int], ...] = ((1, 1), (2, 2), (3, 3), (4, 4), (5, 5), (3, 8))
FIGA4_COLUMNS = ("L", "n", "m", "P_direct", "P_single", "advantage", "reach_km", "pass")


def fig_a4(L_max: float = 150.0, step: float = 5.0, max_photons: int = 25) -> Table:
    """Direct transmission of parity-encoded qubits against one photon.

    ``reach_km`` is the largest distance (0.1 km resolution) at which some
    encoding with n*m <= ``max_photons`` still beats a single photon;
    ``pass`` states that such a distance range exists.  Both are the same on
    every row.
    """
    hw = HardwareParams()
    reach = crossover_reach(max_photons, hw)
    rows = []
    steps = int(round(L_max / step))
    for i in range(steps + 1):
        L = i * step
        single = single_photon_transmission(L, hw)
        for n, m in FIGA4_ENCODINGS:
            p = direct_transmission(n, m, L, hw)
            rows.append(
                {
                    "L": L,
                    "n": n,
                    "m": m,
                    "P_direct": p,
                    "P_single": single,
                    "advantage": p - single,
                    "reach_km": reach,
                    "pass": reach > 0.0,
                }
            )
    return FIGA4_COLUMNS, rows


def _encodings(max_photons: int):
    for n in range(1, max_photons + 1):
        for m in range(1, max_photons // n + 1):
            yield n, m


def crossover_exists(L: float, max_photons: int, hw: HardwareParams | None = None) -> bool:
    """Whether some encoding with n*m <= max_photons beats one photon at L."""
    hw = hw or HardwareParams()
    single = single_photon_transmission(L, hw)
    return any(direct_transmission(n, m, L, hw) > single for n, m in _encodings(max_photons))


def crossover_reach(max_photons: int, hw: HardwareParams | None = None, step: float = 0.1, L_max: float = 200.0) -> float:
    """Largest grid distance at which :func:`crossover_exists` holds (0 if none)."""
    hw = hw or HardwareParams()
    reach = 0.0
    for i in range(1, int(round(L_max / step)) + 1):
        L = round(i * step, 10)
        if crossover_exists(L, max_photons, hw):
            reach = L
    return reach


FIGA5_COLUMNS = ("photons", "nodes", "n", "m", "j", "max_distance_km", "max_P_22km", "pass")


def _photon_cost(n: int, m: int, nodes: int) -> int:
    # The travelling qubit plus one logical Bell pair per intermediate node.
    return n * m * (1 + 2 * nodes)


def _transmission(n: int, m: int, j: int, nodes: int, L: float, hw: HardwareParams) -> float:
    if nodes == 0:
        return direct_transmission(n, m, L, hw)
    L0 = L / (nodes + 1)
    ch = ChannelPoint(math.exp(-L0 / hw.L_att), 1.0)
    return cbm_success_prob(EncodingParams(n, m, j), ch) ** (nodes + 1)


def _max_distance(f: Callable[[float], float], target: float, hi: float = 2000.0) -> float:
    if f(0.0) < target:
        return 0.0
    if f(hi) >= target:
        return hi
    return brentq(lambda L: f(L) - target, 0.0, hi, xtol=1e-9)


def fig_a5(max_photons: int = 120, target: float = 0.9, distance: float = 22.0) -> Table:
    """Reach at success probability ``target`` and success probability at
    ``distance`` against the photon budget, for 0, 1 and 2 intermediate
    nodes (eta0 = 1).  ``pass`` is the same on every row: at the full budget
    both node-assisted settings reach further than direct transmission."""
    hw = HardwareParams()
    best: dict[tuple[int, int], dict] = {}
    for nodes in (0, 1, 2):
        cands = []
        for n in range(1, max_photons + 1):
            for m in range(1, max_photons // n + 1):
                cost = _photon_cost(n, m, nodes)
                if cost > max_photons:
                    break
                for j in (range(m) if nodes else (0,)):
                    d = _max_distance(lambda L: _transmission(n, m, j, nodes, L, hw), target)
                    p = _transmission(n, m, j, nodes, distance, hw)
                    cands.append((cost, n, m, j, d, p))
        cands.sort()
        top_d = (0.0, None)
        top_p = 0.0
        k = 0
        for budget in range(1, max_photons + 1):
            while k < len(cands) and cands[k][0] <= budget:
                cost, n, m, j, d, p = cands[k]
                if d > top_d[0]:
                    top_d = (d, (n, m, j))
                top_p = max(top_p, p)
                k += 1
            enc = top_d[1] or (0, 0, 0)
            best[(budget, nodes)] = {
                "photons": budget,
                "nodes": nodes,
                "n": enc[0],
                "m": enc[1],
                "j": enc[2],
                "max_distance_km": top_d[0],
                "max_P_22km": top_p,
            }
    # The figure's claim: with the full budget, node assistance reaches
    # further than direct transmission.
    direct_reach = best[(max_photons, 0)]["max_distance_km"]
    ok = all(best[(max_photons, k)]["max_distance_km"] > direct_reach for k in (1, 2))
    rows = []
    for budget in range(1, max_photons + 1):
        for nodes in (0, 1, 2):
            r = dict(best[(budget, nodes)])
            r["pass"] = ok
            rows.append(r)
    return FIGA5_COLUMNS, rows


BUILDERS: dict[str, Callable[..., Table]] = {
    "table1": table_1,
    "tableA1": table_a1,
    "fig2": fig_2,
    "fig4": fig_4,
    "figA4": fig_a4,
    "figA5": fig_a5,
}


def build(table_id: str, **kwargs) -> Table:
    try:
        fn = BUILDERS[table_id]
    except KeyError:
        raise ValueError(f"unknown table id {table_id!r}; choose from {sorted(BUILDERS)}") from None
    return fn(**kwargs)


__all__ = ["BUILDERS", "build", "crossover_exists", "crossover_reach"]
