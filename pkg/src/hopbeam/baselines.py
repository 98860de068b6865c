"""Reference schemes: single-reflection, non-RIS direct, and plain MRT."""

from __future__ import annotations

import numpy as np

from . import beamforming as bf
from . import channel as ch
from .grouping import GroupCover
from .pathsel import ReflectionPath, closed_form_gain_seq
from .scenario import Scenario


def single_reflection_paths(scenario: Scenario) -> dict[int, ReflectionPath | None]:
    """Best one-hop path per user (highest equivalent gain), or None."""
    paths: dict[int, ReflectionPath | None] = {}
    ris = scenario.ris_indices()
    for k in range(1, scenario.num_users + 1):
        u = scenario.user_node_index(k)
        best = None
        for j in ris:
            if not (ch.visibility(0, j, scenario) and ch.visibility(j, u, scenario)):
                continue
            gain = closed_form_gain_seq((j,), k, scenario)
            if best is None or gain > best[0]:
                best = (gain, j)
        if best is None:
            paths[k] = None
        else:
            from .pathsel import link_weight
            gain, j = best
            weight = link_weight(0, j, scenario) + link_weight(j, u, scenario)
            paths[k] = ReflectionPath(k, (j,), weight, gain)
    return paths


def non_ris_channels(scenario: Scenario) -> dict[int, np.ndarray]:
    """Direct BS->user LoS rows; blockage is ignored for this benchmark."""
    rows = {}
    amp = np.sqrt(scenario.ref_gain)
    for k in range(1, scenario.num_users + 1):
        u = scenario.user_node_index(k)
        d = scenario.distance(0, u)
        resp = ch.bs_array_response(
            ch.bs_departure_angle(scenario, scenario.node(u).position), scenario)
        rows[k] = (amp / d) * resp.conj()
    return rows


def non_ris_cover(scenario: Scenario) -> GroupCover:
    """All users share the single slot: no RIS scattering to separate."""
    return GroupCover([list(range(1, scenario.num_users + 1))])


def mrt_beams(cover: GroupCover, rows: dict[int, np.ndarray],
              power_budget: float) -> list[dict[int, np.ndarray]]:
    """Equal-power matched-filter beams per group, no interference nulling."""
    group_beams = []
    for members in cover.groups:
        share = power_budget / len(members)
        beams = {}
        for k in members:
            h = rows[k]
            beams[k] = np.sqrt(share) * h.conj() / np.linalg.norm(h)
        group_beams.append(beams)
    return group_beams


def mrt_solution(cover: GroupCover, rows: dict[int, np.ndarray],
                 power_budget: float, sigma2: float) -> bf.Solution:
    """MRT with the same grouping; only the time shares are optimized."""
    group_beams = mrt_beams(cover, rows, power_budget)
    sinr_map, rate_map = bf.slot_rates(cover, group_beams, rows, sigma2)
    t = bf.lp_time_allocation(cover, rate_map)
    rates = bf.user_rates(cover, t, rate_map)
    objective = min(rates.values()) if rates else 0.0
    report = bf.RateReport(sinr_map, rate_map, rates, objective, 0.0,
                           bf.Counters(outer_iterations=1))
    return bf.Solution(t, group_beams, report, [objective])
