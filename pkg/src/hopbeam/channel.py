"""LoS channel synthesis from geometry.

All channels are rank-one outer products of transmit/receive array responses
scaled by free-space path loss sqrt(ref_gain)/d. Angles are measured in local
frames built from each panel's facing normal (RIS) or the BS boresight, with
a fixed global up vector (0, 0, 1).
"""

from __future__ import annotations

import numpy as np

from .scenario import BS, RIS, USER, UP, Node, Scenario


class GeometryError(ValueError):
    pass


def steering_vector(delta: float, n: int) -> np.ndarray:
    """Uniform linear array response with phase slope `delta` per element."""
    if n < 1:
        raise ValueError("element count must be >= 1")
    return np.exp(-1j * np.pi * delta * np.arange(n))


def bs_array_response(theta: float, scenario: Scenario) -> np.ndarray:
    """BS ULA response at departure angle `theta` from boresight."""
    slope = scenario.antenna_spacing / scenario.wavelength * np.sin(theta)
    return steering_vector(slope, scenario.bs_antennas)


def ris_array_response(theta_a: float, theta_e: float, panel: Node,
                       scenario: Scenario) -> np.ndarray:
    """URA response of a RIS panel.

    `theta_a` is the angle off the panel normal, `theta_e` the rotation in
    the panel plane; the result is the Kronecker product of the horizontal
    (left factor) and vertical steering vectors.
    """
    if panel.kind != RIS:
        raise ValueError(f"node {panel.index} is not a RIS panel")
    ratio = scenario.element_spacing / scenario.wavelength
    sx = ratio * np.sin(theta_a) * np.cos(theta_e)
    sy = ratio * np.sin(theta_a) * np.sin(theta_e)
    return np.kron(steering_vector(sx, panel.elements_x),
                   steering_vector(sy, panel.elements_y))


def panel_frame(panel: Node) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Orthonormal (horizontal, vertical, normal) triad for a RIS panel."""
    n = panel.facing_normal
    ex = np.cross(UP, n)
    nrm = np.linalg.norm(ex)
    if nrm < 1e-12:
        # Panel faces straight up/down; pick an arbitrary horizontal axis.
        ex = np.array([1.0, 0.0, 0.0])
    else:
        ex = ex / nrm
    ey = np.cross(n, ex)
    return ex, ey, n


def panel_angles(panel: Node, other_position: np.ndarray) -> tuple[float, float]:
    """Angles (off-normal, in-plane) of the ray from `panel` to a position."""
    d = other_position - panel.position
    nrm = np.linalg.norm(d)
    if nrm < 1e-12:
        raise GeometryError(
            f"coincident nodes: zero distance from RIS {panel.index}")
    d = d / nrm
    ex, ey, n = panel_frame(panel)
    u, v, w = float(d @ ex), float(d @ ey), float(d @ n)
    return float(np.arctan2(np.hypot(u, v), w)), float(np.arctan2(v, u))


def bs_departure_angle(scenario: Scenario, other_position: np.ndarray) -> float:
    """AoD from the BS boresight toward a position, as seen by the ULA axis."""
    d = other_position - scenario.bs.position
    nrm = np.linalg.norm(d)
    if nrm < 1e-12:
        raise GeometryError("coincident nodes: zero distance from BS")
    d = d / nrm
    axis = np.cross(UP, scenario.bs_boresight)
    axis_nrm = np.linalg.norm(axis)
    if axis_nrm < 1e-12:
        axis = np.array([1.0, 0.0, 0.0])
    else:
        axis = axis / axis_nrm
    return float(np.arcsin(np.clip(d @ axis, -1.0, 1.0)))


def visibility(i: int, j: int, scenario: Scenario) -> int:
    """Binary LoS indicator between nodes i and j (symmetric, zero diagonal)."""
    ni, nj = scenario.node(i), scenario.node(j)
    if i == j:
        return 0
    ov = scenario.visibility.override_for(i, j)
    if ov is not None:
        return int(ov)
    rule = scenario.visibility
    d = scenario.distance(i, j)
    if rule.max_range is not None and d > rule.max_range:
        return 0
    for box in rule.obstacles:
        if box.intersects_segment(ni.position, nj.position):
            return 0
    for a, b in ((ni, nj), (nj, ni)):
        if a.kind == RIS:
            if float(a.facing_normal @ (b.position - a.position)) <= 0.0:
                return 0
    return 1


def ris_response_toward(panel: Node, other_position: np.ndarray,
                        scenario: Scenario) -> np.ndarray:
    ta, te = panel_angles(panel, other_position)
    return ris_array_response(ta, te, panel, scenario)


def los_channel(i: int, j: int, scenario: Scenario) -> np.ndarray:
    """Rank-one LoS channel matrix from node i (BS/RIS) to node j (RIS/user).

    Rows index receiver elements, columns transmitter elements. Requires
    visibility(i, j) == 1.
    """
    ni, nj = scenario.node(i), scenario.node(j)
    if ni.kind not in (BS, RIS) or nj.kind not in (RIS, USER):
        raise ValueError(f"unsupported link direction {ni.kind}->{nj.kind}")
    if not visibility(i, j, scenario):
        raise ValueError(f"nodes {i} and {j} are not visible to each other")
    d = scenario.distance(i, j)
    if d < 1e-12:
        raise GeometryError(f"singular geometry: nodes {i} and {j} coincide")
    amp = np.sqrt(scenario.ref_gain) / d

    if ni.kind == BS:
        tx = bs_array_response(bs_departure_angle(scenario, nj.position), scenario)
    else:
        tx = ris_response_toward(ni, nj.position, scenario)
    if nj.kind == RIS:
        rx = ris_response_toward(nj, ni.position, scenario)
        return amp * np.outer(rx, tx.conj())
    # RIS -> user: single-antenna receiver, 1 x M_i row.
    return amp * tx.conj()[np.newaxis, :]
