"""Reflection path selection.

Builds the weighted connection graph over BS -> RIS -> ... -> user links,
finds the minimum-weight (maximum-gain) path per user with Dijkstra, and
computes the per-hop RIS phase configurations and the resulting end-to-end
channel row.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from . import channel as ch
from .scenario import RIS, Scenario

CONTINUOUS = "continuous"


@dataclass(frozen=True)
class ReflectionPath:
    user: int                      # 1-based user numbering
    ris_sequence: tuple[int, ...]  # ordered RIS node indices
    total_weight: float
    predicted_gain: float

    @property
    def hops(self) -> int:
        return len(self.ris_sequence)

    def nodes(self, scenario: Scenario) -> tuple[int, ...]:
        """Full vertex sequence BS, RISs..., user node index."""
        return (0, *self.ris_sequence, scenario.user_node_index(self.user))


@dataclass(frozen=True)
class PhaseConfig:
    ris: int
    phases: np.ndarray  # radians in [0, 2*pi)
    mode: str           # CONTINUOUS or "discrete:<bits>"

    @property
    def coefficients(self) -> np.ndarray:
        return np.exp(1j * self.phases)


@dataclass(frozen=True)
class EffectiveChannel:
    user: int
    row: np.ndarray  # 1 x M0 as a flat length-M0 vector

    @property
    def gain(self) -> float:
        return float(np.vdot(self.row, self.row).real)


class ConnectionGraph:
    """Directed weighted LoS graph over all nodes."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.adjacency: dict[int, list[tuple[int, float]]] = {}

    def add_edge(self, i: int, j: int, weight: float):
        self.adjacency.setdefault(i, []).append((j, weight))

    def edges(self):
        for i, out in self.adjacency.items():
            for j, w in out:
                yield i, j, w

    def successors(self, i: int):
        return self.adjacency.get(i, ())


def link_weight(i: int, j: int, scenario: Scenario) -> float:
    """Positive edge weight; smaller weight means larger per-hop gain."""
    if not ch.visibility(i, j, scenario):
        raise ValueError(f"nodes {i} and {j} are not visible to each other")
    nj = scenario.node(j)
    d2 = scenario.distance(i, j) ** 2
    if nj.kind == RIS:
        return math.log1p(d2 / (scenario.ref_gain * nj.elements ** 2))
    return math.log1p(d2 / scenario.ref_gain)


def build_connection_graph(scenario: Scenario) -> ConnectionGraph:
    g = ConnectionGraph(scenario)
    ris = scenario.ris_indices()
    users = scenario.user_indices()
    for j in ris:
        if ch.visibility(0, j, scenario):
            g.add_edge(0, j, link_weight(0, j, scenario))
    for i in ris:
        for j in ris:
            if i != j and ch.visibility(i, j, scenario):
                g.add_edge(i, j, link_weight(i, j, scenario))
        for u in users:
            if ch.visibility(i, u, scenario):
                g.add_edge(i, u, link_weight(i, u, scenario))
    return g


def best_path(user: int, graph: ConnectionGraph,
              hop_cap: int | None = None) -> ReflectionPath | None:
    """Minimum-weight path BS -> user k, or None when unreachable.

    Ties on total weight break toward the lexicographically smallest vertex
    sequence; the heap priority (weight, vertex sequence) enforces that.
    """
    scenario = graph.scenario
    target = scenario.user_node_index(user)
    heap: list[tuple[float, tuple[int, ...]]] = [(0.0, (0,))]
    done: set = set()
    while heap:
        weight, path = heapq.heappop(heap)
        tail = path[-1]
        # With a hop cap the search state is (vertex, depth) so that deeper
        # but cheaper continuations are not pruned away.
        key = tail if hop_cap is None else (tail, len(path))
        if key in done:
            continue
        done.add(key)
        if tail == target:
            seq = path[1:-1]
            return ReflectionPath(user, seq, weight,
                                  closed_form_gain_seq(seq, user, scenario))
        for succ, w in graph.successors(tail):
            succ_key = succ if hop_cap is None else (succ, len(path) + 1)
            if succ_key in done:
                continue
            if (hop_cap is not None and succ <= scenario.num_ris
                    and len(path) >= hop_cap + 1):
                continue  # adding another RIS would exceed the cap
            heapq.heappush(heap, (weight + w, path + (succ,)))
    return None


def all_best_paths(graph: ConnectionGraph,
                   hop_cap: int | None = None) -> dict[int, ReflectionPath | None]:
    scenario = graph.scenario
    return {k: best_path(k, graph, hop_cap)
            for k in range(1, scenario.num_users + 1)}


def _hop_responses(path: ReflectionPath, n: int, scenario: Scenario):
    """Receive/transmit responses at the n-th RIS of the path (1-based n)."""
    nodes = path.nodes(scenario)
    panel = scenario.node(nodes[n])
    prev_node = scenario.node(nodes[n - 1])
    next_node = scenario.node(nodes[n + 1])
    if not ch.visibility(nodes[n - 1], nodes[n], scenario):
        raise ValueError(f"missing LoS link {nodes[n-1]}->{nodes[n]}")
    if not ch.visibility(nodes[n], nodes[n + 1], scenario):
        raise ValueError(f"missing LoS link {nodes[n]}->{nodes[n+1]}")
    incoming = ch.ris_response_toward(panel, prev_node.position, scenario)
    outgoing = ch.ris_response_toward(panel, next_node.position, scenario)
    return panel, incoming, outgoing


def alignment_targets(path: ReflectionPath, n: int, scenario: Scenario) -> np.ndarray:
    """Per-element phases that co-phase the hop's element-wise products."""
    panel, incoming, outgoing = _hop_responses(path, n, scenario)
    rho = outgoing.conj() * incoming
    return np.mod(-np.angle(rho), 2.0 * np.pi)


def optimal_phase_continuous(path: ReflectionPath, n: int,
                             scenario: Scenario) -> PhaseConfig:
    return PhaseConfig(path.ris_sequence[n - 1],
                       alignment_targets(path, n, scenario), CONTINUOUS)


def quantize_phase(theta: np.ndarray, bits: int) -> np.ndarray:
    """Nearest codebook angle; equidistant ties go to the smaller angle."""
    if bits < 1:
        raise ValueError("quantization bits must be >= 1")
    levels = 1 << bits
    step = 2.0 * np.pi / levels
    theta = np.mod(theta, 2.0 * np.pi)
    k0 = np.floor(theta / step)
    d0 = theta - k0 * step
    d1 = (k0 + 1) * step - theta
    k = np.where(d0 <= d1, k0, k0 + 1) % levels
    return k * step


def optimal_phase_discrete(path: ReflectionPath, n: int, bits: int,
                           scenario: Scenario,
                           rotation_scan: int = 0) -> PhaseConfig:
    """Per-element nearest-codebook quantization of the aligned phases.

    With rotation_scan > 0 a common offset is scanned over that many values
    in one codebook step and the offset maximizing the co-phased sum is kept.
    """
    if bits < 1:
        raise ValueError("quantization bits must be >= 1")
    panel, incoming, outgoing = _hop_responses(path, n, scenario)
    rho = outgoing.conj() * incoming
    target = np.mod(-np.angle(rho), 2.0 * np.pi)
    if rotation_scan <= 0:
        phases = quantize_phase(target, bits)
    else:
        step = 2.0 * np.pi / (1 << bits)
        best_score, phases = -1.0, None
        for offset in np.arange(rotation_scan) * (step / rotation_scan):
            cand = quantize_phase(target + offset, bits)
            score = abs(np.sum(np.exp(1j * cand) * rho))
            if score > best_score:
                best_score, phases = score, cand
    return PhaseConfig(path.ris_sequence[n - 1], phases, f"discrete:{bits}")


def path_phase_configs(path: ReflectionPath, scenario: Scenario,
                       bits: int | None = None,
                       rotation_scan: int = 0) -> list[PhaseConfig]:
    if bits is None:
        return [optimal_phase_continuous(path, n, scenario)
                for n in range(1, path.hops + 1)]
    return [optimal_phase_discrete(path, n, bits, scenario, rotation_scan)
            for n in range(1, path.hops + 1)]


def cascade_channel(path: ReflectionPath, scenario: Scenario,
                    bits: int | None = None,
                    rotation_scan: int = 0) -> EffectiveChannel:
    """End-to-end 1 x M0 channel row for a path with per-hop phase configs."""
    configs = path_phase_configs(path, scenario, bits, rotation_scan)
    nodes = path.nodes(scenario)
    mat = ch.los_channel(0, nodes[1], scenario)  # M_a1 x M0
    for n in range(1, path.hops):
        mat = configs[n - 1].coefficients[:, None] * mat
        mat = ch.los_channel(nodes[n], nodes[n + 1], scenario) @ mat
    mat = configs[-1].coefficients[:, None] * mat
    row = ch.los_channel(nodes[-2], nodes[-1], scenario) @ mat
    return EffectiveChannel(path.user, row[0])


def closed_form_gain_seq(seq: tuple[int, ...], user: int,
                         scenario: Scenario) -> float:
    """Squared norm of the cascade under continuous optimal phases."""
    beta = scenario.ref_gain
    nodes = (0, *seq, scenario.user_node_index(user))
    gain = scenario.bs_antennas * beta / scenario.distance(nodes[-2], nodes[-1]) ** 2
    for n in range(1, len(seq) + 1):
        m = scenario.node(nodes[n]).elements
        gain *= beta * m * m / scenario.distance(nodes[n - 1], nodes[n]) ** 2
    return gain


def closed_form_gain(path: ReflectionPath, scenario: Scenario) -> float:
    return closed_form_gain_seq(path.ris_sequence, path.user, scenario)


def enumerate_simple_paths(graph: ConnectionGraph, user: int,
                           hop_cap: int | None = None):
    """All simple BS -> user paths (brute-force oracle for tiny graphs)."""
    scenario = graph.scenario
    target = scenario.user_node_index(user)
    results = []

    def walk(path, weight):
        tail = path[-1]
        if tail == target:
            results.append((weight, tuple(path)))
            return
        for succ, w in graph.successors(tail):
            if succ in path:
                continue
            if (hop_cap is not None and succ <= scenario.num_ris
                    and len(path) >= hop_cap + 1):
                continue
            path.append(succ)
            walk(path, weight + w)
            path.pop()

    walk([0], 0.0)
    return results
