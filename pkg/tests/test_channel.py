"""Array responses, visibility rules and LoS channel synthesis."""

import numpy as np
import pytest

from hopbeam import channel as ch
from hopbeam.scenario import Box, Node, BS, RIS, USER

from conftest import make_scenario, random_chain_scenario


def simple_scenario(**kw):
    nodes = [Node(0, BS, np.array([0.0, 0.0, 3.0])),
             Node(1, RIS, np.array([5.0, 5.0, 2.5]), 5, 4,
                  np.array([-1.0, 0.0, 0.0])),
             Node(2, USER, np.array([4.0, 2.0, 1.5]))]
    return make_scenario(nodes, [(0, 1), (1, 2)], **kw)


def test_steering_vector_basic():
    v = ch.steering_vector(0.5, 4)
    assert v.shape == (4,)
    assert np.allclose(np.abs(v), 1.0)
    assert np.allclose(v, np.exp(-1j * np.pi * 0.5 * np.arange(4)))
    with pytest.raises(ValueError):
        ch.steering_vector(0.1, 0)


def test_bs_array_response_phase_slope():
    scn = simple_scenario()
    theta = 0.3
    v = ch.bs_array_response(theta, scn)
    slope = scn.antenna_spacing / scn.wavelength * np.sin(theta)
    assert np.allclose(v, np.exp(-1j * np.pi * slope * np.arange(scn.bs_antennas)))


def test_ula_correlation_null_spacing():
    """Half-wavelength ULA responses decorrelate at direction-cosine
    multiples of 2/(N * spacing/wavelength) = 0.2 for N = 20."""
    scn = simple_scenario(bs_antennas=20)
    n = 20
    base = 0.1

    def resp(cosine):
        return ch.bs_array_response(np.arcsin(cosine), scn)

    for k in (1, 2, 3):
        rho = abs(np.vdot(resp(base), resp(base + 0.2 * k))) / n
        assert rho < 1e-10
    # In between the nulls correlation is high.
    rho_close = abs(np.vdot(resp(base), resp(base + 0.06))) / n
    assert 0.8 < rho_close < 0.95


def test_ris_array_response_kronecker():
    scn = simple_scenario()
    panel = scn.node(1)
    ta, te = 0.7, 1.1
    v = ch.ris_array_response(ta, te, panel, scn)
    ratio = scn.element_spacing / scn.wavelength
    hx = ch.steering_vector(ratio * np.sin(ta) * np.cos(te), panel.elements_x)
    hy = ch.steering_vector(ratio * np.sin(ta) * np.sin(te), panel.elements_y)
    assert v.shape == (panel.elements,)
    assert np.allclose(v, np.kron(hx, hy))
    with pytest.raises(ValueError):
        ch.ris_array_response(ta, te, scn.node(2), scn)


def test_panel_frame_orthonormal():
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = rng.standard_normal(3)
        n /= np.linalg.norm(n)
        panel = Node(1, RIS, np.zeros(3), 2, 2, n)
        ex, ey, nn = ch.panel_frame(panel)
        triad = np.stack([ex, ey, nn])
        assert np.allclose(triad @ triad.T, np.eye(3), atol=1e-12)
    # Degenerate: panel facing straight up still yields a valid frame.
    up_panel = Node(1, RIS, np.zeros(3), 2, 2, np.array([0.0, 0.0, 1.0]))
    ex, ey, nn = ch.panel_frame(up_panel)
    assert np.allclose(np.cross(ex, ey), nn, atol=1e-12)


def test_panel_angles_known_geometry():
    panel = Node(1, RIS, np.zeros(3), 2, 2, np.array([1.0, 0.0, 0.0]))
    # Straight along the normal: zero off-normal angle.
    ta, _ = ch.panel_angles(panel, np.array([2.0, 0.0, 0.0]))
    assert ta == pytest.approx(0.0)
    # In the horizontal plane, 45 degrees off-normal.
    ta, te = ch.panel_angles(panel, np.array([1.0, -1.0, 0.0]))
    assert ta == pytest.approx(np.pi / 4)
    with pytest.raises(ch.GeometryError):
        ch.panel_angles(panel, np.zeros(3))


def test_bs_departure_angle_sign():
    scn = simple_scenario()
    # Array axis is cross(up, boresight=+x) = +y; positive angle along +y.
    assert ch.bs_departure_angle(scn, np.array([0.0, 5.0, 3.0])) > 0
    assert ch.bs_departure_angle(scn, np.array([0.0, -5.0, 3.0])) < 0
    assert ch.bs_departure_angle(scn, np.array([9.0, 0.0, 3.0])) == pytest.approx(0.0)


def test_visibility_overrides_win():
    scn = simple_scenario()
    assert ch.visibility(0, 1, scn) == 1
    assert ch.visibility(1, 0, scn) == 1     # symmetric
    assert ch.visibility(0, 2, scn) == 0     # not in the override list
    assert ch.visibility(1, 1, scn) == 0     # diagonal


def test_visibility_max_range_and_obstacles():
    nodes = [Node(0, BS, np.zeros(3)),
             Node(1, RIS, np.array([5.0, 0.0, 0.0]), 2, 2,
                  np.array([-1.0, 0.0, 0.0])),
             Node(2, USER, np.array([30.0, 0.0, 0.0]))]
    scn = make_scenario(nodes, [])
    scn.visibility.max_range = 20.0
    assert ch.visibility(0, 1, scn) == 1
    assert ch.visibility(0, 2, scn) == 0  # beyond range
    scn.visibility.obstacles.append(
        Box(np.array([2.0, -1.0, -1.0]), np.array([3.0, 1.0, 1.0])))
    assert ch.visibility(0, 1, scn) == 0  # blocked


def test_visibility_half_space():
    nodes = [Node(0, BS, np.zeros(3)),
             Node(1, RIS, np.array([5.0, 0.0, 0.0]), 2, 2,
                  np.array([1.0, 0.0, 0.0])),  # faces away from the BS
             Node(2, USER, np.array([8.0, 0.0, 0.0]))]
    scn = make_scenario(nodes, [])
    scn.visibility.max_range = 100.0
    assert ch.visibility(0, 1, scn) == 0  # behind the panel
    assert ch.visibility(1, 2, scn) == 1  # in front


def test_los_channel_rank_and_norm():
    scn = simple_scenario()
    mat = ch.los_channel(0, 1, scn)
    panel = scn.node(1)
    assert mat.shape == (panel.elements, scn.bs_antennas)
    s = np.linalg.svd(mat, compute_uv=False)
    assert s[1] < 1e-12 * s[0]  # rank one
    d = scn.distance(0, 1)
    expected = scn.ref_gain / d ** 2 * panel.elements * scn.bs_antennas
    assert np.sum(np.abs(mat) ** 2) == pytest.approx(expected, rel=1e-12)


def test_los_channel_to_user_row():
    scn = simple_scenario()
    row = ch.los_channel(1, 2, scn)
    panel = scn.node(1)
    assert row.shape == (1, panel.elements)
    d = scn.distance(1, 2)
    assert np.sum(np.abs(row) ** 2) == pytest.approx(
        scn.ref_gain / d ** 2 * panel.elements, rel=1e-12)


def test_los_channel_requires_visibility():
    scn = simple_scenario()
    with pytest.raises(ValueError, match="not visible"):
        ch.los_channel(0, 2, scn)  # user channel without a link
    with pytest.raises(ValueError, match="unsupported"):
        ch.los_channel(2, 1, scn)  # user cannot transmit


def test_chain_scenario_channels_consistent():
    rng = np.random.default_rng(3)
    scn = random_chain_scenario(rng, 3)
    for i, j in ((0, 1), (1, 2), (2, 3), (3, 4)):
        mat = ch.los_channel(i, j, scn)
        assert np.all(np.isfinite(mat))
        assert np.linalg.matrix_rank(np.atleast_2d(mat), tol=1e-9) == 1
