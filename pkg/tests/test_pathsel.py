"""Path search, phase alignment and cascade channels."""

import math

import numpy as np
import pytest

from hopbeam import channel as ch
from hopbeam import pathsel as ps
from hopbeam.scenario import Node, BS, RIS, USER

from conftest import make_scenario, random_chain_scenario, random_mesh_scenario


def test_link_weight_formula():
    rng = np.random.default_rng(1)
    scn = random_chain_scenario(rng, 2)
    d01 = scn.distance(0, 1)
    m1 = scn.node(1).elements
    assert ps.link_weight(0, 1, scn) == pytest.approx(
        math.log1p(d01 ** 2 / (scn.ref_gain * m1 ** 2)))
    user_node = scn.user_node_index(1)
    d2u = scn.distance(2, user_node)
    assert ps.link_weight(2, user_node, scn) == pytest.approx(
        math.log1p(d2u ** 2 / scn.ref_gain))
    with pytest.raises(ValueError, match="not visible"):
        ps.link_weight(0, 2, scn)


def test_connection_graph_structure():
    rng = np.random.default_rng(2)
    scn = random_mesh_scenario(rng, 5, 2)
    g = ps.build_connection_graph(scn)
    for i, j, w in g.edges():
        assert w > 0
        assert ch.visibility(i, j, scn) == 1
        # No edges back into the BS, none out of users.
        assert j != 0 and i <= scn.num_ris


def test_best_path_matches_enumeration_small():
    rng = np.random.default_rng(3)
    scn = random_mesh_scenario(rng, 5, 3)
    g = ps.build_connection_graph(scn)
    for k in range(1, scn.num_users + 1):
        found = ps.best_path(k, g)
        brute = ps.enumerate_simple_paths(g, k)
        if not brute:
            assert found is None
            continue
        assert found is not None
        assert found.total_weight == pytest.approx(min(w for w, _ in brute))


def test_best_path_deterministic_tie_break():
    # Two symmetric panels, identical weights: the smaller index must win.
    nodes = [Node(0, BS, np.zeros(3)),
             Node(1, RIS, np.array([3.0, 4.0, 0.0]), 2, 2,
                  np.array([0.0, -1.0, 0.0])),
             Node(2, RIS, np.array([3.0, -4.0, 0.0]), 2, 2,
                  np.array([0.0, 1.0, 0.0])),
             Node(3, USER, np.array([6.0, 0.0, 0.0]))]
    scn = make_scenario(nodes, [(0, 1), (0, 2), (1, 3), (2, 3)])
    g = ps.build_connection_graph(scn)
    path = ps.best_path(1, g)
    assert path.ris_sequence == (1,)


def test_hop_cap_limits_reflections():
    # Chain of 2 panels to the user plus an expensive direct panel: capping
    # at one hop must fall back to the single-reflection route.
    nodes = [Node(0, BS, np.zeros(3)),
             Node(1, RIS, np.array([2.0, 0.0, 0.0]), 4, 4,
                  np.array([-1.0, 0.0, 0.0])),
             Node(2, RIS, np.array([4.0, 0.0, 0.0]), 4, 4,
                  np.array([-1.0, 0.0, 0.0])),
             Node(3, RIS, np.array([0.0, 30.0, 0.0]), 4, 4,
                  np.array([0.0, -1.0, 0.0])),
             Node(4, USER, np.array([4.0, 1.0, 0.0]))]
    scn = make_scenario(nodes, [(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)])
    g = ps.build_connection_graph(scn)
    assert ps.best_path(1, g).ris_sequence == (1, 2)
    capped = ps.best_path(1, g, hop_cap=1)
    assert capped.ris_sequence == (3,)
    brute = ps.enumerate_simple_paths(g, 1, hop_cap=1)
    assert capped.total_weight == pytest.approx(min(w for w, _ in brute))


def test_unreachable_user():
    nodes = [Node(0, BS, np.zeros(3)),
             Node(1, RIS, np.array([2.0, 0.0, 0.0]), 2, 2,
                  np.array([-1.0, 0.0, 0.0])),
             Node(2, USER, np.array([9.0, 9.0, 0.0]))]
    scn = make_scenario(nodes, [(0, 1)])
    g = ps.build_connection_graph(scn)
    assert ps.best_path(1, g) is None
    assert ps.all_best_paths(g) == {1: None}


def test_quantize_phase_properties():
    rng = np.random.default_rng(4)
    theta = rng.uniform(-10, 10, 256)
    for bits in (1, 2, 3, 4):
        levels = 1 << bits
        step = 2 * np.pi / levels
        quant = ps.quantize_phase(theta, bits)
        # On-grid and within half a step of the target (circularly).
        codes = np.round(quant / step)
        assert np.allclose(quant, codes * step, atol=1e-9)
        assert np.all((codes >= 0) & (codes < levels))
        err = np.abs(np.angle(np.exp(1j * (quant - theta))))
        assert np.all(err <= step / 2 + 1e-12)
        # Idempotent.
        assert np.allclose(ps.quantize_phase(quant, bits), quant)
    # Equidistant tie goes to the smaller codebook angle.
    assert ps.quantize_phase(np.array([np.pi / 2]), 1)[0] == 0.0
    with pytest.raises(ValueError):
        ps.quantize_phase(theta, 0)


def test_alignment_cophases_products():
    rng = np.random.default_rng(5)
    scn = random_chain_scenario(rng, 2)
    path = ps.ReflectionPath(1, (1, 2), 0.0, 0.0)
    for n in (1, 2):
        phases = ps.alignment_targets(path, n, scn)
        panel, incoming, outgoing = ps._hop_responses(path, n, scn)
        rho = outgoing.conj() * incoming * np.exp(1j * phases)
        angles = np.angle(rho)
        assert np.allclose(np.angle(np.exp(1j * angles)), 0.0, atol=1e-9)


def test_cascade_gain_matches_closed_form():
    rng = np.random.default_rng(6)
    for _ in range(25):
        hops = int(rng.integers(1, 5))
        scn = random_chain_scenario(rng, hops)
        path = ps.ReflectionPath(1, tuple(range(1, hops + 1)), 0.0, 0.0)
        eff = ps.cascade_channel(path, scn)
        assert eff.gain == pytest.approx(ps.closed_form_gain(path, scn),
                                         rel=1e-9)


def test_discrete_cascade_le_continuous():
    rng = np.random.default_rng(7)
    scn = random_chain_scenario(rng, 3)
    path = ps.ReflectionPath(1, (1, 2, 3), 0.0, 0.0)
    cont = ps.cascade_channel(path, scn).gain
    prev = 0.0
    for bits in (1, 2, 4, 8):
        g = ps.cascade_channel(path, scn, bits=bits).gain
        assert g <= cont * (1 + 1e-12)
        assert g >= prev * 0.98  # coarse monotone trend with bit depth
        prev = g
    assert ps.cascade_channel(path, scn, bits=8).gain == pytest.approx(
        cont, rel=1e-3)


def test_rotation_scan_not_worse():
    rng = np.random.default_rng(8)
    scn = random_chain_scenario(rng, 2)
    path = ps.ReflectionPath(1, (1, 2), 0.0, 0.0)
    plain = ps.cascade_channel(path, scn, bits=1).gain
    scanned = ps.cascade_channel(path, scn, bits=1, rotation_scan=16).gain
    assert scanned >= plain - 1e-12


def test_phase_config_modes():
    rng = np.random.default_rng(9)
    scn = random_chain_scenario(rng, 2)
    path = ps.ReflectionPath(1, (1, 2), 0.0, 0.0)
    cont = ps.path_phase_configs(path, scn)
    disc = ps.path_phase_configs(path, scn, bits=3)
    assert [c.ris for c in cont] == [1, 2]
    assert all(c.mode == ps.CONTINUOUS for c in cont)
    assert all(c.mode == "discrete:3" for c in disc)
    for c in cont + disc:
        assert np.all((c.phases >= 0) & (c.phases < 2 * np.pi))
        assert np.allclose(np.abs(c.coefficients), 1.0)
