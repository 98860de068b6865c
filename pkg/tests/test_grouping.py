"""Conflict graphs and maximal-independent-set activation covers."""

import itertools

import numpy as np
import pytest

from hopbeam import grouping as gr
from hopbeam.pathsel import ReflectionPath
from hopbeam.scenario import Node, BS, RIS, USER

from conftest import make_scenario


def random_conflict_graph(rng, k, edge_prob=0.3):
    g = gr.ConflictGraph(list(range(1, k + 1)))
    for a in range(1, k + 1):
        for b in range(a + 1, k + 1):
            if rng.random() < edge_prob:
                g.add_edge(a, b)
    return g


def all_maximal_independent_sets(graph):
    users = graph.users
    result = []
    for r in range(1, len(users) + 1):
        for subset in itertools.combinations(users, r):
            members = list(subset)
            if gr.is_independent(members, graph) and gr.is_maximal(members, graph):
                result.append(sorted(members))
    return result


def test_conflict_graph_basics():
    g = gr.ConflictGraph([1, 2, 3])
    g.add_edge(1, 2)
    g.add_edge(2, 2)  # self loops ignored
    assert g.adjacent(1, 2) and g.adjacent(2, 1)
    assert not g.adjacent(1, 3)
    assert g.degree(2) == 1 and g.degree(3) == 0


def test_scheduling_order_degree_then_id():
    g = gr.ConflictGraph([1, 2, 3, 4])
    g.add_edge(1, 2)
    g.add_edge(1, 3)
    g.add_edge(2, 3)
    assert gr.scheduling_index_order(g) == [4, 1, 2, 3]


def test_cover_properties_random():
    rng = np.random.default_rng(11)
    for _ in range(30):
        k = int(rng.integers(2, 15))
        g = random_conflict_graph(rng, k)
        cover = gr.cover_with_mis(gr.scheduling_index_order(g), g)
        covered = set()
        for members in cover.groups:
            assert gr.is_independent(members, g)
            assert gr.is_maximal(members, g)
            covered.update(members)
        assert covered == set(g.users)
        assert cover.count <= k


def test_cover_groups_are_enumerated_mis():
    rng = np.random.default_rng(12)
    for _ in range(20):
        k = int(rng.integers(2, 9))
        g = random_conflict_graph(rng, k, edge_prob=0.4)
        cover = gr.cover_with_mis(gr.scheduling_index_order(g), g)
        mis_list = all_maximal_independent_sets(g)
        for members in cover.groups:
            assert sorted(members) in mis_list


def test_cover_deterministic():
    rng = np.random.default_rng(13)
    g = random_conflict_graph(rng, 12)
    order = gr.scheduling_index_order(g)
    c1 = gr.cover_with_mis(order, g)
    c2 = gr.cover_with_mis(list(order), g)
    assert c1.groups == c2.groups


def test_empty_and_edgeless():
    assert gr.cover_with_mis([], gr.ConflictGraph([])).groups == []
    g = gr.ConflictGraph([1, 2, 3])
    cover = gr.cover_with_mis(gr.scheduling_index_order(g), g)
    assert cover.groups == [[1, 2, 3]]  # no conflicts: one group with everyone


def test_membership_counts_and_groups_of():
    cover = gr.GroupCover([[1, 2], [2, 3]])
    assert cover.membership_counts() == {1: 1, 2: 2, 3: 1}
    assert cover.groups_of(2) == [0, 1]
    assert cover.groups_of(3) == [1]


def conflict_scenario():
    """Two panels with LoS between panel 2 and user 1 (cross-interference)."""
    nodes = [Node(0, BS, np.zeros(3)),
             Node(1, RIS, np.array([4.0, 2.0, 0.0]), 2, 2,
                  np.array([-1.0, 0.0, 0.0])),
             Node(2, RIS, np.array([4.0, -2.0, 0.0]), 2, 2,
                  np.array([-1.0, 0.0, 0.0])),
             Node(3, USER, np.array([6.0, 2.0, 0.0])),
             Node(4, USER, np.array([6.0, -2.0, 0.0]))]
    return make_scenario(nodes, [(0, 1), (0, 2), (1, 3), (2, 4), (2, 3)])


def test_paths_conflict_rules():
    scn = conflict_scenario()
    p1 = ReflectionPath(1, (1,), 1.0, 1.0)
    p2 = ReflectionPath(2, (2,), 1.0, 1.0)
    # Panel 2 sees user 1, so the paths interfere.
    assert gr.paths_conflict(p1, p2, scn)
    # A path always conflicts with one sharing a panel.
    assert gr.paths_conflict(p1, ReflectionPath(2, (1,), 1.0, 1.0), scn)


def test_build_groups_end_to_end():
    scn = conflict_scenario()
    paths = {1: ReflectionPath(1, (1,), 1.0, 1.0),
             2: ReflectionPath(2, (2,), 1.0, 1.0)}
    graph, cover = gr.build_groups(paths, scn)
    assert graph.adjacent(1, 2)
    assert cover.groups == [[1], [2]]


def test_shared_panel_membership_shape(demo_scenario):
    """The shipped scenario reproduces the expected sharing pattern: two
    users served by one panel never co-scheduled, one of them riding in
    several other groups."""
    from hopbeam.pathsel import all_best_paths, build_connection_graph
    graph = build_connection_graph(demo_scenario)
    paths = all_best_paths(graph)
    assert paths[13].ris_sequence == paths[14].ris_sequence == (11,)
    conf, cover = gr.build_groups(paths, demo_scenario)
    assert conf.adjacent(13, 14)
    for members in cover.groups:
        assert not {13, 14} <= set(members)
    counts = cover.membership_counts()
    assert counts[13] == 3 and counts[14] == 1
