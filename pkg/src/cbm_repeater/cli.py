"""Command-line front end.

Every subcommand reads an optional JSON config (sections ``encoding``,
``channel``, ``hardware``, ``noise``, ``search``, ``run``), overlays the
command-line flags, and writes CSV or JSON lines.  The effective
configuration is echoed first: as a ``# config:`` comment line in CSV, or as
a ``{"config": ...}`` line in JSON.

Exit codes: 0 success, 1 domain error (well-formed values outside a model's
range), 2 configuration error (bad JSON, unknown keys, wrong types, bad
flags), 3 infeasible search, 4 reproduction outside tolerance.  Nothing is
written to the output on error.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import sys
from typing import Any, Iterable, Sequence

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_REPRODUCE = 4

MAX_TRIALS = 10**9
LOW_TRIALS = 1000
SIG_DIGITS = 12

DEFAULTS: dict[str, dict[str, Any]] = {
    "encoding": {"n": 2, "m": 2, "j": None},
    "channel": {"eta": 1.0, "eta_prime": 1.0, "L": 1000.0, "L0": 1.7},
    "hardware": {"eps_s": 1.0, "eps_d": 1.0, "tau": 150e-9, "c": 2e8, "L_att": 22.0, "t0": 10e-6, "lam": 0.0},
    "noise": {"e_d": 0.0, "sign_only": "printed", "mode": "record", "dark": False},
    "search": {
        "n_min": 1,
        "n_max": 120,
        "m_min": 1,
        "m_max": 12,
        "j_policy": "exhaustive",
        "L0_min": 0.5,
        "L0_max": 3.0,
        "L0_step": 0.1,
        "top_k": 10,
        "min_rt0": None,
        "min_fidelity": None,
        "axes": "n,m,L0",
        "eta0": None,
        "source_hz": 1e10,
    },
    "run": {
        "seed": 0,
        "trials": 1_000_000,
        "workers": 1,
        "format": "csv",
        "output": "-",
        "logical_input": "Phi+",
        "allow_huge": False,
    },
}


class ConfigError(ValueError):
    """Bad configuration file, flag value or combination."""


# ----------------------------------------------------------------- config


def load_config(path: str | None) -> dict[str, dict[str, Any]]:
    cfg = copy.deepcopy(DEFAULTS)
    if path is None:
        return cfg
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid JSON: {exc}") from exc
    return merge_config(cfg, raw)


def merge_config(cfg: dict[str, dict[str, Any]], raw: Any) -> dict[str, dict[str, Any]]:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be an object")
    for section, values in raw.items():
        if section not in DEFAULTS:
            raise ConfigError(f"unknown config section {section!r}")
        if not isinstance(values, dict):
            raise ConfigError(f"config section {section!r} must be an object")
        for key, value in values.items():
            if key not in DEFAULTS[section]:
                raise ConfigError(f"unknown key {section}.{key}")
            cfg[section][key] = _coerce(section, key, value)
    return cfg


def _coerce(section: str, key: str, value: Any) -> Any:
    default = DEFAULTS[section][key]
    if value is None:
        return None
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{section}.{key} must be true or false")
        return value
    if isinstance(default, int) and not isinstance(default, bool):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{section}.{key} must be an integer")
        return value
    if isinstance(default, float) or default is None and key not in ("j",):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{section}.{key} must be a number")
        return float(value)
    if key == "j":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError("encoding.j must be an integer")
        return value
    if key == "j_policy" and isinstance(value, int) and not isinstance(value, bool):
        return str(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{section}.{key} must be a string")
        return value
    return value


# Flag destination -> (section, key).  Flags default to None so that only
# flags actually given override the config file.
FLAG_MAP: dict[str, tuple[str, str]] = {
    "n": ("encoding", "n"),
    "m": ("encoding", "m"),
    "j": ("encoding", "j"),
    "eta": ("channel", "eta"),
    "eta_prime": ("channel", "eta_prime"),
    "L": ("channel", "L"),
    "L0": ("channel", "L0"),
    "eps_s": ("hardware", "eps_s"),
    "eps_d": ("hardware", "eps_d"),
    "tau": ("hardware", "tau"),
    "c": ("hardware", "c"),
    "L_att": ("hardware", "L_att"),
    "t0": ("hardware", "t0"),
    "lam": ("hardware", "lam"),
    "ed": ("noise", "e_d"),
    "sign_only": ("noise", "sign_only"),
    "mode": ("noise", "mode"),
    "dark": ("noise", "dark"),
    "n_min": ("search", "n_min"),
    "n_max": ("search", "n_max"),
    "m_min": ("search", "m_min"),
    "m_max": ("search", "m_max"),
    "j_policy": ("search", "j_policy"),
    "L0_min": ("search", "L0_min"),
    "L0_max": ("search", "L0_max"),
    "L0_step": ("search", "L0_step"),
    "top_k": ("search", "top_k"),
    "min_rt0": ("search", "min_rt0"),
    "min_fidelity": ("search", "min_fidelity"),
    "axes": ("search", "axes"),
    "eta0": ("search", "eta0"),
    "source_hz": ("search", "source_hz"),
    "seed": ("run", "seed"),
    "trials": ("run", "trials"),
    "workers": ("run", "workers"),
    "format": ("run", "format"),
    "output": ("run", "output"),
    "logical_input": ("run", "logical_input"),
    "allow_huge": ("run", "allow_huge"),
}


def effective_config(args: argparse.Namespace) -> dict[str, dict[str, Any]]:
    cfg = load_config(getattr(args, "config", None))
    for dest, (section, key) in FLAG_MAP.items():
        value = getattr(args, dest, None)
        if value is not None:
            cfg[section][key] = value
    # --eps sets the combined source-detector efficiency.
    eps = getattr(args, "eps", None)
    if eps is not None:
        cfg["hardware"]["eps_s"] = eps
        cfg["hardware"]["eps_d"] = 1.0
    if cfg["run"]["format"] not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {cfg['run']['format']!r}")
    if cfg["run"]["workers"] < 1:
        raise ConfigError("workers must be >= 1")
    return cfg


# ----------------------------------------------------------------- output


def _fmt_value(v: Any) -> Any:
    if isinstance(v, bool) or v is None or isinstance(v, (str, int)):
        return v
    if isinstance(v, float):
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return float(f"{v:.{SIG_DIGITS}g}")
    if hasattr(v, "item"):  # numpy scalars
        return _fmt_value(v.item())
    return str(v)


def _csv_cell(v: Any) -> str:
    v = _fmt_value(v)
    if v is None:
        return "nan"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.{SIG_DIGITS}g}"
    return str(v)


def render(columns: Sequence[str], rows: Iterable[dict], cfg: dict, fmt: str) -> str:
    buf = io.StringIO()
    if fmt == "csv":
        buf.write("# config: " + json.dumps(cfg, sort_keys=True) + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for r in rows:
            writer.writerow([_csv_cell(r.get(c)) for c in columns])
    else:
        buf.write(json.dumps({"config": cfg}, sort_keys=True) + "\n")
        for r in rows:
            buf.write(json.dumps({c: _fmt_value(r.get(c)) for c in columns}) + "\n")
    return buf.getvalue()


def emit(text: str, output: str) -> None:
    if output == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


# ----------------------------------------------------------------- builders


def _encoding(cfg):
    from cbm_repeater.cbm_core import ChannelPoint, EncodingParams, best_over_j

    e = cfg["encoding"]
    ch = ChannelPoint(cfg["channel"]["eta"], cfg["channel"]["eta_prime"])
    j = e["j"]
    if j is None:
        j, _ = best_over_j(e["n"], e["m"], ch)
    return EncodingParams(e["n"], e["m"], j), ch


def _hardware(cfg):
    from cbm_repeater.repeater import HardwareParams

    return HardwareParams(**cfg["hardware"])


def _space(cfg):
    from cbm_repeater.optimizer import SearchSpace

    s = cfg["search"]
    if s["L0_step"] <= 0 or s["L0_max"] < s["L0_min"]:
        raise ConfigError("L0 grid needs L0_step > 0 and L0_max >= L0_min")
    count = int(math.floor((s["L0_max"] - s["L0_min"]) / s["L0_step"] + 1e-9)) + 1
    grid = tuple(round(s["L0_min"] + i * s["L0_step"], 10) for i in range(count))
    policy = s["j_policy"]
    if policy not in ("exhaustive", "max"):
        try:
            policy = int(policy)
        except ValueError:
            raise ConfigError(f"j_policy must be exhaustive, max or an integer, got {policy!r}") from None
    return SearchSpace((s["n_min"], s["n_max"]), (s["m_min"], s["m_max"]), policy, grid)


EVAL_COLUMNS = (
    "n", "m", "j", "eta", "eta_prime", "e_d", "lam",
    "p_s", "p_f", "p_sign_only", "P_s", "p_i", "p_x", "p_y", "p_z", "degenerate",
)


def cmd_eval(cfg) -> tuple[Sequence[str], list[dict]]:
    from cbm_repeater.cbm_core import block_outcome_probs, success_from_block
    from cbm_repeater.noise import (
        DarkCountModel,
        block_error_rates,
        block_probs_with_dark,
        depolarizing_to_flips,
        pair_error_rates,
        pauli_partition,
    )

    enc, ch = _encoding(cfg)
    lam = cfg["hardware"]["lam"]
    if lam > 0:
        blk = block_probs_with_dark(enc, ch, DarkCountModel(lam))
    else:
        blk = block_outcome_probs(enc, ch)
    P = success_from_block(enc.n, blk.p_success, blk.p_failure)
    e_d = cfg["noise"]["e_d"]
    ber = block_error_rates(enc, ch, pair_error_rates(depolarizing_to_flips(e_d)), sign_only=cfg["noise"]["sign_only"])
    part = pauli_partition(enc, ch, ber, block=blk if lam > 0 else None)
    row = {
        "n": enc.n,
        "m": enc.m,
        "j": enc.j,
        "eta": ch.eta,
        "eta_prime": ch.eta_prime,
        "e_d": e_d,
        "lam": lam,
        "p_s": blk.p_success,
        "p_f": blk.p_failure,
        "p_sign_only": blk.p_sign_only,
        "P_s": P,
        "p_i": part.p_i,
        "p_x": part.p_x,
        "p_y": part.p_y,
        "p_z": part.p_z,
        "degenerate": ber.degenerate,
    }
    return EVAL_COLUMNS, [row]


MC_COLUMNS = ("quantity", "count", "trials", "p_hat", "stderr", "analytic", "z")


def cmd_mc(cfg) -> tuple[Sequence[str], list[dict]]:
    from cbm_repeater.cbm_core import block_outcome_probs, success_from_block
    from cbm_repeater.mc import InjectMode, LogicalInput, TrialConfig, estimate
    from cbm_repeater.noise import (
        DarkCountModel,
        block_error_rates,
        block_probs_with_dark,
        depolarizing_to_flips,
        pair_error_rates,
        pauli_partition,
    )

    run = cfg["run"]
    trials = run["trials"]
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    if trials > MAX_TRIALS and not run["allow_huge"]:
        raise ConfigError(f"trials > {MAX_TRIALS:.0e} needs --allow-huge")
    if trials < LOW_TRIALS:
        warn(f"only {trials} trials: standard errors and z-scores have little statistical power")
    try:
        li = LogicalInput.parse(run["logical_input"])
        mode = InjectMode[cfg["noise"]["mode"].upper()]
    except (ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from None
    enc, ch = _encoding(cfg)
    lam = cfg["hardware"]["lam"]
    dc = DarkCountModel(lam)
    per = pair_error_rates(depolarizing_to_flips(cfg["noise"]["e_d"]))
    tc = TrialConfig(enc, ch, per, dc, li, run["seed"], trials, mode)
    est = estimate(tc, run["workers"], allow_small=True)

    blk = block_probs_with_dark(enc, ch, dc) if lam > 0 else block_outcome_probs(enc, ch)
    P = success_from_block(enc.n, blk.p_success, blk.p_failure)
    pf = 1.0 - (1.0 - blk.p_failure) ** enc.n
    ber = block_error_rates(enc, ch, per, sign_only=cfg["noise"]["sign_only"])
    part = pauli_partition(enc, ch, ber, block=blk if lam > 0 else None)
    analytic = {
        "success": P,
        "failure": pf,
        "sign_only_all": max(1.0 - pf - P, 0.0),
        "x_error|success": (part.p_x + part.p_z) / P if P > 0 else math.nan,
        "z_error|success": (part.p_y + part.p_z) / P if P > 0 else math.nan,
        "p_i": part.p_i,
        "p_x": part.p_x,
        "p_y": part.p_y,
        "p_z": part.p_z,
        "block_success": blk.p_success,
        "block_failure": blk.p_failure,
        "block_sign_only": blk.p_sign_only,
        "block_x_error|success": ber.e1_x_success,
        "block_z_error|success": ber.e1_z_success,
        "block_z_error|sign_only": ber.e1_z_sign_only,
    }
    rows = []
    for name, t in est.items():
        a = analytic.get(name, math.nan)
        z = t.z_score(a) if t.trials > 0 and not math.isnan(a) else math.nan
        rows.append(
            {"quantity": name, "count": t.count, "trials": t.trials, "p_hat": t.p_hat, "stderr": t.stderr, "analytic": a, "z": z}
        )
    return MC_COLUMNS, rows


OPT_COLUMNS = (
    "rank", "n", "m", "j", "L0", "Q", "rt0", "F", "q_x", "q_z", "eta0", "tau_p_us", "rate_hz", "key_rate_hz",
)


def _opt_rows(results, hw) -> list[dict]:
    from cbm_repeater.repeater import prep_time

    rows = []
    for i, r in enumerate(results, 1):
        met = r.metrics
        rows.append(
            {
                "rank": i,
                "n": r.enc.n,
                "m": r.enc.m,
                "j": r.enc.j,
                "L0": r.L0,
                "Q": met.q_cost,
                "rt0": met.rt0,
                "F": met.fidelity,
                "q_x": met.q_x,
                "q_z": met.q_z,
                "eta0": met.eta0,
                "tau_p_us": prep_time(r.enc.n, r.enc.m, hw.tau) * 1e6,
                "rate_hz": met.rate_hz(hw.t0),
                "key_rate_hz": met.key_rate_hz(hw.t0),
            }
        )
    return rows


def cmd_optimize(cfg) -> tuple[Sequence[str], list[dict]]:
    from cbm_repeater.optimizer import Constraints, rank

    hw = _hardware(cfg)
    s = cfg["search"]
    results = rank(
        hw,
        cfg["channel"]["L"],
        cfg["noise"]["e_d"],
        _space(cfg),
        Constraints(s["min_rt0"], s["min_fidelity"]),
        k=s["top_k"],
        workers=cfg["run"]["workers"],
        eta0=s["eta0"],
        sign_only=cfg["noise"]["sign_only"],
    )
    return OPT_COLUMNS, _opt_rows(results, hw)


def cmd_sweep(cfg) -> tuple[Sequence[str], list[dict]]:
    from cbm_repeater.optimizer import SWEEP_COLUMNS, sweep

    axes = tuple(a.strip() for a in cfg["search"]["axes"].split(",") if a.strip())
    try:
        rows = sweep(
            _hardware(cfg),
            cfg["channel"]["L"],
            cfg["noise"]["e_d"],
            _space(cfg),
            axes,
            eta0=cfg["search"]["eta0"],
            sign_only=cfg["noise"]["sign_only"],
        )
    except ValueError as exc:
        if "axes" in str(exc):
            raise ConfigError(str(exc)) from None
        raise
    return SWEEP_COLUMNS, rows


COMPARE_COLUMNS = ("method", "L", "n", "m", "j", "L0", "probability", "rate_hz")


def cmd_compare(cfg) -> tuple[Sequence[str], list[dict]]:
    """Single photon, direct parity-encoded transmission and the CBM chain at
    one distance.  Source-limited rates use ``search.source_hz``; the chain
    rate is Rt0 / t0."""
    from cbm_repeater.repeater import chain_metrics, direct_transmission, single_photon_transmission

    hw = _hardware(cfg)
    enc, _ = _encoding(cfg)
    L, L0 = cfg["channel"]["L"], cfg["channel"]["L0"]
    src = cfg["search"]["source_hz"]
    single = single_photon_transmission(L, hw)
    direct = direct_transmission(enc.n, enc.m, L, hw)
    met = chain_metrics(enc, hw, L, L0, cfg["noise"]["e_d"], dark=cfg["noise"]["dark"], sign_only=cfg["noise"]["sign_only"])
    nan = math.nan
    return COMPARE_COLUMNS, [
        {"method": "single_photon", "L": L, "n": 1, "m": 1, "j": 0, "L0": nan, "probability": single, "rate_hz": src * single},
        {"method": "direct", "L": L, "n": enc.n, "m": enc.m, "j": enc.j, "L0": nan, "probability": direct, "rate_hz": src * direct},
        {"method": "cbm_chain", "L": L, "n": enc.n, "m": enc.m, "j": enc.j, "L0": L0, "probability": met.rt0, "rate_hz": met.rate_hz(hw.t0)},
    ]


# ----------------------------------------------------------------- parser


def _add_common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("run")
    g.add_argument("--config", help="JSON config file (sections encoding, channel, hardware, noise, search, run)")
    g.add_argument("--output", "-o", help="output path, '-' for stdout (default: -)")
    g.add_argument("--format", choices=("csv", "json"), help="output format (default: csv)")
    g.add_argument("--seed", type=int, help="random seed (default: 0)")
    g.add_argument("--workers", type=int, help="worker threads (default: 1)")


def _add_encoding(p, with_j=True) -> None:
    g = p.add_argument_group("encoding")
    g.add_argument("--n", type=int, help="blocks per logical qubit (default: 2)")
    g.add_argument("--m", type=int, help="photons per block (default: 2)")
    if with_j:
        g.add_argument("--j", type=int, help="max B_psi failures before B_+/- (default: best for the channel)")


def _add_channel(p) -> None:
    g = p.add_argument_group("channel")
    g.add_argument("--eta", type=float, help="survival of the first qubit's photons (default: 1.0)")
    g.add_argument("--eta-prime", dest="eta_prime", type=float, help="survival of the second qubit's photons (default: 1.0)")


def _add_hardware(p) -> None:
    g = p.add_argument_group("hardware")
    g.add_argument("--eps", type=float, help="combined source-detector efficiency (sets eps_s, eps_d=1)")
    g.add_argument("--eps-s", dest="eps_s", type=float, help="source efficiency (default: 1.0)")
    g.add_argument("--eps-d", dest="eps_d", type=float, help="detector efficiency (default: 1.0)")
    g.add_argument("--tau", type=float, help="measurement/feedforward time in s (default: 1.5e-7)")
    g.add_argument("--c", type=float, help="speed of light in fibre, m/s (default: 2e8)")
    g.add_argument("--L-att", dest="L_att", type=float, help="attenuation length in km (default: 22)")
    g.add_argument("--t0", type=float, help="repeater processing time in s (default: 1e-5)")


def _add_noise(p, with_lam=True) -> None:
    g = p.add_argument_group("noise")
    g.add_argument("--ed", type=float, help="depolarizing rate per photon (default: 0)")
    g.add_argument(
        "--sign-only",
        dest="sign_only",
        choices=("printed", "exact"),
        help="sign-only block error model (default: printed)",
    )
    if with_lam:
        g.add_argument("--lam", type=float, help="dark-count probability per detector (default: 0)")


def _add_chain(p) -> None:
    g = p.add_argument_group("chain")
    g.add_argument("--L", type=float, help="total distance in km (default: 1000)")


def _add_search(p) -> None:
    g = p.add_argument_group("search")
    g.add_argument("--n-min", dest="n_min", type=int, help="(default: 1)")
    g.add_argument("--n-max", dest="n_max", type=int, help="(default: 120)")
    g.add_argument("--m-min", dest="m_min", type=int, help="(default: 1)")
    g.add_argument("--m-max", dest="m_max", type=int, help="(default: 12)")
    g.add_argument("--j-policy", dest="j_policy", help="exhaustive, max or a fixed integer (default: exhaustive)")
    g.add_argument("--L0-min", dest="L0_min", type=float, help="spacing grid start in km (default: 0.5)")
    g.add_argument("--L0-max", dest="L0_max", type=float, help="spacing grid end in km (default: 3.0)")
    g.add_argument("--L0-step", dest="L0_step", type=float, help="spacing grid step in km (default: 0.1)")
    g.add_argument("--eta0", type=float, help="fixed node survival instead of the derived one (default: derived)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cbm-repeater",
        description="Concatenated Bell measurement models, Monte Carlo checks and repeater-chain optimisation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="closed-form block and logical probabilities")
    _add_encoding(p)
    _add_channel(p)
    _add_noise(p)
    _add_common(p)

    p = sub.add_parser("mc", help="Monte Carlo tallies next to the closed forms")
    _add_encoding(p)
    _add_channel(p)
    _add_noise(p)
    p.add_argument("--mode", choices=("record", "pair"), help="where pair flips act (default: record)")
    p.add_argument("--trials", type=int, help="number of trials (default: 1000000)")
    p.add_argument("--input", dest="logical_input", help="logical Bell state: Phi+, Phi-, Psi+, Psi- (default: Phi+)")
    p.add_argument("--allow-huge", dest="allow_huge", action="store_const", const=True, help="permit more than 1e9 trials")
    _add_common(p)

    p = sub.add_parser("optimize", help="minimum photon cost over (n, m, j, L0)")
    _add_chain(p)
    _add_hardware(p)
    _add_noise(p, with_lam=False)
    _add_search(p)
    p.add_argument("--top-k", dest="top_k", type=int, help="candidates to list (default: 10)")
    p.add_argument("--min-rt0", dest="min_rt0", type=float, help="reject candidates below this Rt0")
    p.add_argument("--min-fidelity", dest="min_fidelity", type=float, help="reject candidates below this fidelity")
    _add_common(p)

    p = sub.add_parser("sweep", help="grid dump for plotting")
    _add_chain(p)
    _add_hardware(p)
    _add_noise(p, with_lam=False)
    _add_search(p)
    p.add_argument("--axes", help="comma-separated subset of n,m,L0 to keep (default: n,m,L0)")
    _add_common(p)

    p = sub.add_parser("compare", help="single photon vs direct vs CBM chain at one distance")
    _add_encoding(p)
    _add_chain(p)
    p.add_argument("--L0", type=float, help="repeater spacing in km (default: 1.7)")
    _add_hardware(p)
    _add_noise(p)
    p.add_argument("--dark", action="store_const", const=True, help="include dark counts in the link")
    p.add_argument("--source-hz", dest="source_hz", type=float, help="photon source rate (default: 1e10)")
    _add_common(p)

    p = sub.add_parser("reproduce", help="regenerate a published table or figure with deltas")
    p.add_argument("table_id", choices=("table1", "tableA1", "fig2", "fig4", "figA4", "figA5"))
    p.add_argument(
        "--sign-only",
        dest="sign_only",
        choices=("printed", "exact"),
        help="sign-only block error model for table1 (default: printed)",
    )
    _add_common(p)
    return parser


def _reproduce(args, cfg) -> tuple[Sequence[str], list[dict]]:
    from cbm_repeater.reproduce import build

    kwargs = {}
    if args.table_id == "table1":
        kwargs = {"workers": cfg["run"]["workers"], "sign_only": cfg["noise"]["sign_only"]}
    return build(args.table_id, **kwargs)


COMMANDS = {
    "eval": cmd_eval,
    "mc": cmd_mc,
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with status 2
        return int(exc.code or 0)

    from cbm_repeater.optimizer import InfeasibleSearchError

    try:
        cfg = effective_config(args)
        if args.command == "reproduce":
            columns, rows = _reproduce(args, cfg)
        else:
            columns, rows = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleSearchError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, TypeError) as exc:
        # Well-formed values outside a model's domain (eta > 1, L0 > L, ...).
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN

    emit(render(columns, rows, cfg, cfg["run"]["format"]), cfg["run"]["output"])
    if args.command == "reproduce" and not all(r.get("pass", True) for r in rows):
        failed = sum(1 for r in rows if not r.get("pass", True))
        print(f"reproduction: {failed} of {len(rows)} rows outside tolerance", file=sys.stderr)
        return EXIT_REPRODUCE
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
