"""Activation group construction.

Paths conflict when they share a RIS or when any pair of their non-BS nodes
has a LoS link (scattered interference). Users are covered by maximal
independent sets of the conflict graph; each set is one activation group.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import channel as ch
from .pathsel import ReflectionPath
from .scenario import Scenario


@dataclass
class ConflictGraph:
    users: list[int]                                  # vertices, 1-based user ids
    edges: set[frozenset[int]] = field(default_factory=set)

    def add_edge(self, a: int, b: int):
        if a != b:
            self.edges.add(frozenset((a, b)))

    def adjacent(self, a: int, b: int) -> bool:
        return frozenset((a, b)) in self.edges

    def degree(self, a: int) -> int:
        return sum(1 for e in self.edges if a in e)


@dataclass
class GroupCover:
    groups: list[list[int]]          # each group: sorted member user ids

    @property
    def count(self) -> int:
        return len(self.groups)

    def membership_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for group in self.groups:
            for k in group:
                counts[k] = counts.get(k, 0) + 1
        return counts

    def groups_of(self, user: int) -> list[int]:
        return [q for q, group in enumerate(self.groups) if user in group]


def paths_conflict(pa: ReflectionPath, pb: ReflectionPath,
                   scenario: Scenario) -> bool:
    if set(pa.ris_sequence) & set(pb.ris_sequence):
        return True
    nodes_a = list(pa.ris_sequence) + [scenario.user_node_index(pa.user)]
    nodes_b = list(pb.ris_sequence) + [scenario.user_node_index(pb.user)]
    for i in nodes_a:
        for j in nodes_b:
            if i != j and ch.visibility(i, j, scenario):
                return True
    return False


def build_conflict_graph(paths: dict[int, ReflectionPath],
                         scenario: Scenario) -> ConflictGraph:
    users = sorted(k for k, p in paths.items() if p is not None)
    g = ConflictGraph(users)
    for a_pos, a in enumerate(users):
        for b in users[a_pos + 1:]:
            if paths_conflict(paths[a], paths[b], scenario):
                g.add_edge(a, b)
    return g


def scheduling_index_order(graph: ConflictGraph) -> list[int]:
    """Users sorted by ascending conflict degree, ties by ascending user id."""
    return sorted(graph.users, key=lambda k: (graph.degree(k), k))


def cover_with_mis(order: list[int], graph: ConflictGraph) -> GroupCover:
    """Cover all paths with maximal independent sets.

    Stage one grows an independent set from each anchor (highest remaining
    priority) by a single greedy scan of the full priority list; stage two
    re-checks maximality. Already-covered paths may join later sets, which is
    what gives some users membership in several groups.
    """
    if not order:
        return GroupCover([])
    to_cover = list(order)
    groups: list[list[int]] = []
    while to_cover:
        anchor = to_cover[0]
        members = [anchor]
        for cand in order:
            if cand == anchor:
                continue
            if all(not graph.adjacent(cand, m) for m in members):
                members.append(cand)
        groups.append(members)
        to_cover = [k for k in to_cover if k not in members]
    # Stage two: extend every set to maximality (normally a no-op since the
    # stage-one scan already considered every vertex).
    for members in groups:
        for cand in order:
            if cand in members:
                continue
            if all(not graph.adjacent(cand, m) for m in members):
                members.append(cand)
    return GroupCover([sorted(g) for g in groups])


def build_groups(paths: dict[int, ReflectionPath],
                 scenario: Scenario) -> tuple[ConflictGraph, GroupCover]:
    graph = build_conflict_graph(paths, scenario)
    cover = cover_with_mis(scheduling_index_order(graph), graph)
    return graph, cover


def is_independent(members: list[int], graph: ConflictGraph) -> bool:
    return all(not graph.adjacent(a, b)
               for i, a in enumerate(members) for b in members[i + 1:])


def is_maximal(members: list[int], graph: ConflictGraph) -> bool:
    inside = set(members)
    for cand in graph.users:
        if cand in inside:
            continue
        if all(not graph.adjacent(cand, m) for m in members):
            return False
    return True
