"""Exhaustive grid search over ``(n, m, j, L0)`` minimising photon cost.

The whole grid is screened with a vectorised evaluation of the cost; the
cheapest candidates are then re-evaluated with :func:`chain_metrics` and
ranked under a total order, so the returned metrics are exactly what a
fresh ``chain_metrics`` call produces.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from cbm_repeater.cbm_core import ChannelPoint, EncodingParams, cbm_success_prob
from cbm_repeater.repeater import (
    UNDERFLOW,
    ChainMetrics,
    HardwareParams,
    chain_metrics,
    prep_time,
    repeater_loss,
)

SCREEN_SIZE = 64


class InfeasibleSearchError(RuntimeError):
    """No grid point satisfies the constraints."""


def default_l0_grid() -> tuple[float, ...]:
    return tuple(round(0.5 + 0.1 * i, 10) for i in range(26))


@dataclass(frozen=True)
class SearchSpace:
    """Inclusive integer ranges for ``n`` and ``m`` plus an ``L0`` grid in km.

    ``j_policy`` is ``"exhaustive"`` (all ``j`` in ``[0, m-1]``), ``"max"``
    (``j = m - 1`` only) or an int (that ``j``; values of ``m`` that cannot
    host it are skipped).
    """

    n_range: tuple[int, int] = (1, 120)
    m_range: tuple[int, int] = (1, 12)
    j_policy: str | int = "exhaustive"
    L0_grid: tuple[float, ...] = field(default_factory=default_l0_grid)

    def __post_init__(self) -> None:
        for name in ("n_range", "m_range"):
            lo, hi = getattr(self, name)
            if lo < 1 or hi < lo:
                raise ValueError(f"{name} must be a non-empty range of positive ints, got {(lo, hi)}")
        if not self.L0_grid:
            raise ValueError("L0_grid is empty")
        if any(v <= 0 for v in self.L0_grid):
            raise ValueError("L0 values must be positive")
        if isinstance(self.j_policy, str):
            if self.j_policy not in ("exhaustive", "max"):
                raise ValueError(f"unknown j_policy {self.j_policy!r}")
        elif self.j_policy < 0:
            raise ValueError("fixed j must be >= 0")
        if not any(True for _ in self.mj_pairs()):
            raise ValueError("search space contains no valid (m, j) pair")

    def j_values(self, m: int) -> range:
        if self.j_policy == "exhaustive":
            return range(m)
        if self.j_policy == "max":
            return range(m - 1, m)
        j = int(self.j_policy)
        return range(j, j + 1) if j <= m - 1 else range(0)

    def mj_pairs(self):
        for m in range(self.m_range[0], self.m_range[1] + 1):
            for j in self.j_values(m):
                yield m, j

    @property
    def n_values(self) -> np.ndarray:
        return np.arange(self.n_range[0], self.n_range[1] + 1)

    def size(self) -> int:
        return len(self.n_values) * len(self.L0_grid) * sum(1 for _ in self.mj_pairs())


@dataclass(frozen=True)
class OptResult:
    enc: EncodingParams
    L0: float
    metrics: ChainMetrics

    def sort_key(self) -> tuple:
        return (self.metrics.q_cost, self.enc.n * self.enc.m, self.enc.n, self.L0, self.enc.j)


@dataclass(frozen=True)
class Constraints:
    min_rt0: float | None = None
    min_fidelity: float | None = None

    def admits(self, metrics: ChainMetrics) -> bool:
        if self.min_rt0 is not None and metrics.rt0 < self.min_rt0:
            return False
        if self.min_fidelity is not None and metrics.fidelity < self.min_fidelity:
            return False
        return True


def _screen_mj(
    m: int,
    j: int,
    hw: HardwareParams,
    L: float,
    n: np.ndarray,
    L0: np.ndarray,
    eta0_override: float | None,
) -> np.ndarray:
    """Approximate log-cost on the (n, L0) grid for one (m, j); inf if infeasible."""
    if eta0_override is None:
        tau_p = np.array([prep_time(int(k), m, hw.tau) for k in n])
        eta0 = hw.efficiency * np.exp(-(hw.c * (tau_p + hw.tau) / 1000.0) / hw.L_att)
    else:
        eta0 = np.full(len(n), eta0_override)
    x = (eta0**2)[:, None] * np.exp(-L0 / hw.L_att)[None, :]
    ps = (1.0 - 0.5 ** (j + 1)) * x**m
    pf = np.zeros_like(x)
    for l in range(m - j, m + 1):
        pf += (x / 2.0) ** (m - l) * (1.0 - x) ** l
    nn = n[:, None].astype(float)
    p = np.clip((1.0 - pf) ** nn - np.clip(1.0 - ps - pf, 0.0, None) ** nn, 0.0, None)
    links = L / L0[None, :]
    with np.errstate(divide="ignore"):
        log_rt0 = links * np.log(p)
    return np.log(2.0 * nn * m * links) - log_rt0


def _evaluate(
    n: int,
    m: int,
    j: int,
    L0: float,
    hw: HardwareParams,
    L: float,
    e_d: float,
    eta0: float | None,
    sign_only: str = "printed",
) -> OptResult:
    enc = EncodingParams(n, m, j)
    return OptResult(enc, L0, chain_metrics(enc, hw, L, L0, e_d, eta0=eta0, sign_only=sign_only))


def _screen(
    hw: HardwareParams,
    L: float,
    space: SearchSpace,
    workers: int,
    eta0: float | None,
) -> list[tuple[float, int, int, int, float]]:
    """All grid points as (approx log-cost, n, m, j, L0), unsorted."""
    n = space.n_values
    L0 = np.array([v for v in space.L0_grid if v <= L])
    if L0.size == 0:
        return []
    pairs = list(space.mj_pairs())

    def run(mj: tuple[int, int]):
        m, j = mj
        cost = _screen_mj(m, j, hw, L, n, L0, eta0)
        return [(float(cost[a, b]), int(n[a]), m, j, float(L0[b])) for a in range(len(n)) for b in range(len(L0))]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(run, pairs))
    else:
        chunks = [run(mj) for mj in pairs]
    return [row for chunk in chunks for row in chunk]


def rank(
    hw: HardwareParams,
    L: float,
    e_d: float,
    space: SearchSpace,
    constraints: Constraints | None = None,
    *,
    k: int = 10,
    workers: int = 1,
    eta0: float | None = None,
    sign_only: str = "printed",
) -> list[OptResult]:
    """The ``k`` cheapest feasible candidates, best first.

    Raises :class:`InfeasibleSearchError` when nothing is feasible.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    constraints = constraints or Constraints()
    rows = [r for r in _screen(hw, L, space, workers, eta0) if math.isfinite(r[0])]
    rows.sort(key=lambda r: (r[0], r[1] * r[2], r[1], r[4], r[3]))

    found: list[OptResult] = []
    start = 0
    batch = max(SCREEN_SIZE, 4 * k)
    while start < len(rows):
        # Extend the batch past near-ties so screening rounding cannot
        # reorder candidates across the batch boundary.
        stop = min(start + batch, len(rows))
        edge = rows[stop - 1][0]
        while stop < len(rows) and rows[stop][0] <= edge + 1e-9:
            stop += 1
        for cost, n, m, j, L0 in rows[start:stop]:
            res = _evaluate(n, m, j, L0, hw, L, e_d, eta0, sign_only)
            if not res.metrics.underflow and constraints.admits(res.metrics):
                found.append(res)
        start = stop
        if len(found) >= k:
            # Everything left screens strictly worse than this batch.
            break
    if not found:
        raise InfeasibleSearchError(
            f"no feasible point among {space.size()} candidates (constraints: {constraints})"
        )
    found.sort(key=OptResult.sort_key)
    return found[:k]


def optimize(
    hw: HardwareParams,
    L: float,
    e_d: float,
    space: SearchSpace | None = None,
    constraints: Constraints | None = None,
    *,
    workers: int = 1,
    eta0: float | None = None,
    sign_only: str = "printed",
) -> OptResult:
    """Minimum-cost point; ties go to smaller n*m, then n, then L0."""
    return rank(
        hw, L, e_d, space or SearchSpace(), constraints, k=1, workers=workers, eta0=eta0, sign_only=sign_only
    )[0]


SWEEP_COLUMNS = ("n", "m", "best_j", "L0", "rt0", "Q", "F")


def sweep(
    hw: HardwareParams,
    L: float,
    e_d: float,
    space: SearchSpace | None = None,
    output_axes: tuple[str, ...] = ("n", "m", "L0"),
    *,
    eta0: float | None = None,
    with_fidelity: bool = True,
    sign_only: str = "printed",
) -> list[dict]:
    """Grid dump for plotting.

    Axes of ``("n", "m", "L0")`` missing from ``output_axes`` are reduced by
    taking the cheapest point; ``j`` is always reduced that way.  At fixed
    ``L0`` the cheapest point is also the one with the largest ``rt0``.
    """
    space = space or SearchSpace()
    unknown = set(output_axes) - {"n", "m", "L0"}
    if unknown:
        raise ValueError(f"unknown sweep axes {sorted(unknown)}")
    best: dict[tuple, OptResult] = {}
    for n in space.n_values:
        for m, j in space.mj_pairs():
            for L0 in space.L0_grid:
                if L0 > L:
                    continue
                enc = EncodingParams(int(n), m, j)
                if with_fidelity:
                    met = chain_metrics(enc, hw, L, L0, e_d, eta0=eta0, sign_only=sign_only)
                else:
                    met = _loss_only_metrics(enc, hw, L, L0, eta0)
                res = OptResult(enc, L0, met)
                coords = {"n": int(n), "m": m, "L0": L0}
                key = tuple(coords[a] for a in output_axes)
                cur = best.get(key)
                if cur is None or res.sort_key() < cur.sort_key():
                    best[key] = res
    rows = []
    for key in sorted(best):
        r = best[key]
        rows.append(
            {
                "n": r.enc.n,
                "m": r.enc.m,
                "best_j": r.enc.j,
                "L0": r.L0,
                "rt0": r.metrics.rt0,
                "Q": r.metrics.q_cost,
                "F": r.metrics.fidelity if with_fidelity else math.nan,
            }
        )
    return rows


def _loss_only_metrics(enc: EncodingParams, hw: HardwareParams, L: float, L0: float, eta0: float | None) -> ChainMetrics:
    e0 = repeater_loss(enc, hw) if eta0 is None else eta0
    p = cbm_success_prob(enc, ChannelPoint(e0 * math.exp(-L0 / hw.L_att), e0))
    links = L / L0
    rt0 = p**links
    q = 2.0 * enc.n * enc.m * links / rt0 if rt0 > 0 else math.inf
    return ChainMetrics(rt0, q, 0.0, 0.0, math.nan, math.nan, eta0=e0, link_p=p, underflow=rt0 < UNDERFLOW)
