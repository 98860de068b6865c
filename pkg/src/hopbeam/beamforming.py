"""Max-min beamforming and time-share optimization.

Outer alternation per activation-group schedule: (1) bisection on the common
rate target, where each probe solves one SINR-constrained power minimization
per active group through the uplink-downlink duality kernel; (2) linear
programming over the group time shares with the slot rates held fixed. The
incumbent best schedule is kept, so the reported objective never regresses.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .grouping import GroupCover
from .solver_backend import STATUS_OK, duality_power_min

log = logging.getLogger(__name__)

T_FLOOR = 1e-3          # groups below this share are inactive for a round
DIVERGENCE_CAP = 1e6    # uplink power beyond cap * P_T means infeasible
DEFAULT_BISECT_TOL = 1e-4
DEFAULT_RATE_TOL = 1e-5
DEFAULT_MAX_OUTER = 20


class DegenerateChannelError(ValueError):
    pass


@dataclass
class PowerMinResult:
    feasible: bool
    total_power: float
    beams: dict[int, np.ndarray] | None
    uplink_power: float
    iterations: int


@dataclass
class Counters:
    outer_iterations: int = 0
    bisection_probes: int = 0
    fixed_point_iterations: int = 0

    def merged(self, other: "Counters") -> "Counters":
        return Counters(self.outer_iterations + other.outer_iterations,
                        self.bisection_probes + other.bisection_probes,
                        self.fixed_point_iterations + other.fixed_point_iterations)


@dataclass
class BisectionResult:
    gamma_star: float
    group_beams: list[dict[int, np.ndarray] | None]
    bracket: tuple[float, float]
    upper_at_cap: bool
    counters: Counters = field(default_factory=Counters)


@dataclass
class RateReport:
    slot_sinr: dict[tuple[int, int], float]   # (group, user) -> SINR
    slot_rate: dict[tuple[int, int], float]   # (group, user) -> bits/s/Hz
    user_rate: dict[int, float]               # equivalent rate C_k
    objective: float                          # min_k C_k
    gamma_star: float                         # bisection target at the optimum
    counters: Counters


@dataclass
class Solution:
    schedule: np.ndarray
    group_beams: list[dict[int, np.ndarray] | None]
    report: RateReport
    objective_history: list[float]


def sinr(user: int, members: list[int], beams: dict[int, np.ndarray],
         row: np.ndarray, sigma2: float) -> float:
    """SINR of `user` inside one activation group."""
    signal = abs(row @ beams[user]) ** 2
    interference = sum(abs(row @ beams[u]) ** 2 for u in members if u != user)
    return float(signal / (interference + sigma2))


def power_min_feasibility(members: list[int], targets: dict[int, float],
                          rows: dict[int, np.ndarray], sigma2: float,
                          power_budget: float,
                          max_iter: int = 5000) -> PowerMinResult:
    """Minimal-power beamformers for one group, or infeasible-at-budget."""
    mat = np.array([rows[k] for k in members])
    if np.any(np.linalg.norm(mat, axis=1) < 1e-300):
        raise DegenerateChannelError("zero channel row in group")
    gammas = np.array([targets[k] for k in members], dtype=float)
    if np.any(gammas <= 0) or not np.all(np.isfinite(gammas)):
        raise ValueError("SINR targets must be positive and finite")
    status, beams, total_dl, total_ul, iters = duality_power_min(
        mat, gammas, sigma2, DIVERGENCE_CAP * power_budget, max_iter)
    if status != STATUS_OK:
        return PowerMinResult(False, float("inf"), None, total_ul, iters)
    beam_map = {k: beams[i] for i, k in enumerate(members)}
    feasible = total_dl <= power_budget
    return PowerMinResult(feasible, total_dl, beam_map, total_ul, iters)


def _active_groups(cover: GroupCover, t: np.ndarray) -> list[int]:
    return [q for q in range(cover.count) if t[q] >= T_FLOOR]


def bisect_maxmin(cover: GroupCover, t: np.ndarray,
                  rows: dict[int, np.ndarray], power_budget: float,
                  sigma2: float,
                  tol: float = DEFAULT_BISECT_TOL) -> BisectionResult:
    """Largest common rate target feasible under the per-group power budget."""
    counters = Counters()
    active = _active_groups(cover, t)
    covered = sorted({k for g in cover.groups for k in g})
    v_active = {k: sum(1 for q in active if k in cover.groups[q]) for k in covered}
    empty = [None] * cover.count
    if not covered or any(v_active[k] == 0 for k in covered):
        return BisectionResult(0.0, empty, (0.0, 0.0), False, counters)

    gain_max = max(float(np.vdot(rows[k], rows[k]).real) for k in covered)
    hi0 = math.log2(1.0 + power_budget * gain_max / sigma2)
    lo, hi = 0.0, hi0
    best_beams: list[dict[int, np.ndarray] | None] = list(empty)

    def probe(level: float):
        beams: list[dict[int, np.ndarray] | None] = list(empty)
        for q in active:
            members = cover.groups[q]
            targets = {k: 2.0 ** (level / (v_active[k] * t[q])) - 1.0
                       for k in members}
            res = power_min_feasibility(members, targets, rows, sigma2,
                                        power_budget)
            counters.fixed_point_iterations += res.iterations
            if not res.feasible:
                return None
            beams[q] = res.beams
        return beams

    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        counters.bisection_probes += 1
        beams = probe(mid)
        if beams is not None:
            lo, best_beams = mid, beams
        else:
            hi = mid
    return BisectionResult(lo, best_beams, (lo, hi), hi == hi0, counters)


def fill_power(group_beams, power_budget: float):
    """Scale each group's beams so the slot uses the whole power budget.

    The duality kernel returns minimum-power beams; the unused headroom is a
    uniform amplitude scaling that raises every member's SINR and lets the
    time-share LP see which slots can carry extra load.
    """
    filled = []
    for beams in group_beams:
        if not beams:
            filled.append(beams)
            continue
        total = sum(float(np.vdot(w, w).real) for w in beams.values())
        if total <= 0.0:
            filled.append(beams)
            continue
        scale = math.sqrt(power_budget / total)
        filled.append({k: scale * w for k, w in beams.items()})
    return filled


def slot_rates(cover: GroupCover, group_beams, rows: dict[int, np.ndarray],
               sigma2: float):
    """Per-(group, user) SINR and rate for the given beams (zero if inactive)."""
    sinr_map: dict[tuple[int, int], float] = {}
    rate_map: dict[tuple[int, int], float] = {}
    for q, members in enumerate(cover.groups):
        beams = group_beams[q]
        for k in members:
            g = sinr(k, members, beams, rows[k], sigma2) if beams else 0.0
            sinr_map[(q, k)] = g
            rate_map[(q, k)] = math.log2(1.0 + g)
    return sinr_map, rate_map


def user_rates(cover: GroupCover, t: np.ndarray,
               rate_map: dict[tuple[int, int], float]) -> dict[int, float]:
    covered = sorted({k for g in cover.groups for k in g})
    return {k: sum(t[q] * rate_map[(q, k)] for q in cover.groups_of(k))
            for k in covered}


def lp_time_allocation(cover: GroupCover,
                       rate_map: dict[tuple[int, int], float]) -> np.ndarray:
    """Time shares maximizing the minimum equivalent rate (epigraph LP)."""
    n_groups = cover.count
    if n_groups == 1:
        return np.array([1.0])
    covered = sorted({k for g in cover.groups for k in g})
    # Users with zero rate everywhere cannot constrain the LP meaningfully.
    users = [k for k in covered
             if any(rate_map[(q, k)] > 0 for q in cover.groups_of(k))]
    if not users:
        return np.full(n_groups, 1.0 / n_groups)
    a_ub = np.zeros((len(users), n_groups + 1))
    for i, k in enumerate(users):
        for q in cover.groups_of(k):
            a_ub[i, q] = -rate_map[(q, k)]
        a_ub[i, -1] = 1.0
    a_eq = np.zeros((1, n_groups + 1))
    a_eq[0, :n_groups] = 1.0
    c = np.zeros(n_groups + 1)
    c[-1] = -1.0
    bounds = [(0.0, 1.0)] * n_groups + [(0.0, None)]
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(len(users)), A_eq=a_eq,
                  b_eq=[1.0], bounds=bounds, method="highs")
    if not res.success:  # cannot happen: uniform t is always feasible
        raise RuntimeError(f"time-allocation LP failed: {res.message}")
    return res.x[:n_groups]


def extract_beamformer(matrix: np.ndarray, rank_tol: float = 1e-8) -> np.ndarray:
    """Principal component of a PSD matrix, scaled to carry its full power."""
    matrix = np.asarray(matrix, dtype=np.complex128)
    if not np.allclose(matrix, matrix.conj().T, atol=1e-9):
        raise ValueError("matrix must be Hermitian")
    vals, vecs = np.linalg.eigh(matrix)
    if vals[0] < -1e-9 * max(vals[-1], 1.0):
        raise ValueError("matrix must be positive semidefinite")
    if matrix.shape[0] > 1 and vals[-2] > rank_tol * vals[-1]:
        log.warning("beamformer matrix is not rank one (eigenvalue ratio %.3e); "
                    "keeping the principal eigenpair", vals[-2] / vals[-1])
    return np.sqrt(max(vals[-1], 0.0)) * vecs[:, -1]


def alternate(cover: GroupCover, rows: dict[int, np.ndarray],
              power_budget: float, sigma2: float,
              bisect_tol: float = DEFAULT_BISECT_TOL,
              rate_tol: float = DEFAULT_RATE_TOL,
              max_outer: int = DEFAULT_MAX_OUTER) -> Solution:
    """Alternate max-min beamforming and LP time allocation."""
    n_groups = cover.count
    if n_groups == 0:
        report = RateReport({}, {}, {}, 0.0, 0.0, Counters())
        return Solution(np.array([]), [], report, [])
    t = np.full(n_groups, 1.0 / n_groups)
    counters = Counters()
    incumbent = None
    history: list[float] = []

    for outer in range(1, max_outer + 1):
        counters.outer_iterations = outer
        bis = bisect_maxmin(cover, t, rows, power_budget, sigma2, bisect_tol)
        counters.bisection_probes += bis.counters.bisection_probes
        counters.fixed_point_iterations += bis.counters.fixed_point_iterations
        beams = fill_power(bis.group_beams, power_budget)
        sinr_map, rate_map = slot_rates(cover, beams, rows, sigma2)

        t_new = lp_time_allocation(cover, rate_map)
        candidates = [(t, bis), (t_new, bis)]
        best_local = None
        for cand_t, cand_bis in candidates:
            rates = user_rates(cover, cand_t, rate_map)
            obj = min(rates.values()) if rates else 0.0
            if best_local is None or obj > best_local[0]:
                best_local = (obj, cand_t, cand_bis, beams, sinr_map, rate_map,
                              rates)
        if incumbent is None or best_local[0] > incumbent[0]:
            incumbent = best_local
        history.append(incumbent[0])
        if len(history) > 1 and history[-1] - history[-2] < rate_tol:
            break
        if np.allclose(t_new, t, atol=1e-12):
            break  # fixed point of the alternation, nothing left to improve
        t = t_new

    obj, t_best, bis_best, beams_best, sinr_map, rate_map, rates = incumbent
    report = RateReport(sinr_map, rate_map, rates, obj,
                        bis_best.gamma_star, counters)
    return Solution(np.asarray(t_best, dtype=float), beams_best,
                    report, history)
