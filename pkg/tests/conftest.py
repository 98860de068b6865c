"""Shared fixtures and scenario builders for the test suite."""

import importlib.resources

import numpy as np
import pytest

from hopbeam.scenario import Node, Scenario, VisibilityRule, BS, RIS, USER


@pytest.fixture(scope="session")
def demo_path():
    return str(importlib.resources.files("hopbeam") / "data" / "paper16.json")


@pytest.fixture(scope="session")
def demo_scenario(demo_path):
    from hopbeam import load_scenario
    return load_scenario(demo_path)


def make_scenario(nodes, overrides, *, bs_antennas=8, tx_power=10.0,
                  noise_power=1e-11, ref_gain=10 ** (-46.4 / 10),
                  wavelength=0.06, seed=0):
    """Scenario with explicit LoS links only (max_range 0 + override list)."""
    rule = VisibilityRule(max_range=0.0, obstacles=[],
                          overrides={(min(a, b), max(a, b)): 1
                                     for a, b in overrides})
    return Scenario(
        nodes=nodes,
        bs_antennas=bs_antennas,
        antenna_spacing=wavelength / 2,
        element_spacing=wavelength / 2,
        wavelength=wavelength,
        ref_gain=ref_gain,
        noise_power=noise_power,
        tx_power=tx_power,
        visibility=rule,
        rng_seed=seed,
    ).validate()


def random_positions(rng, count, *, low=0.0, high=20.0, min_sep=0.5):
    """Mutually separated random points in a cube."""
    points = []
    while len(points) < count:
        p = rng.uniform(low, high, 3)
        if all(np.linalg.norm(p - q) >= min_sep for q in points):
            points.append(p)
    return points


def random_unit(rng):
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def random_chain_scenario(rng, hops):
    """BS -> `hops` RIS panels -> one user, links along the chain only."""
    pts = random_positions(rng, hops + 2)
    nodes = [Node(0, BS, pts[0])]
    for j in range(1, hops + 1):
        ex, ey = int(rng.integers(1, 7)), int(rng.integers(1, 7))
        nodes.append(Node(j, RIS, pts[j], ex, ey, random_unit(rng)))
    nodes.append(Node(hops + 1, USER, pts[-1]))
    chain = list(range(hops + 2))
    overrides = list(zip(chain[:-1], chain[1:]))
    return make_scenario(nodes, overrides,
                         bs_antennas=int(rng.integers(2, 17)))


def random_mesh_scenario(rng, num_ris, num_users, link_prob=0.45):
    """Random geometry with random LoS links (for path-search oracles)."""
    pts = random_positions(rng, 1 + num_ris + num_users)
    nodes = [Node(0, BS, pts[0])]
    for j in range(1, num_ris + 1):
        nodes.append(Node(j, RIS, pts[j], int(rng.integers(1, 5)),
                          int(rng.integers(1, 5)), random_unit(rng)))
    for k in range(num_users):
        nodes.append(Node(num_ris + 1 + k, USER, pts[num_ris + 1 + k]))
    overrides = []
    for j in range(1, num_ris + 1):
        if rng.random() < link_prob:
            overrides.append((0, j))
    for i in range(1, num_ris + 1):
        for j in range(i + 1, num_ris + 1):
            if rng.random() < link_prob:
                overrides.append((i, j))
        for u in range(num_ris + 1, num_ris + num_users + 1):
            if rng.random() < link_prob:
                overrides.append((i, u))
    return make_scenario(nodes, overrides)
