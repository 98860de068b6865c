#!/usr/bin/env python3
"""Builds the shipped 16-RIS / 14-user demo scenario.

Geometry: a 20 m x 20 m area with the BS at the west edge. Twelve users have
a dedicated nearby serving panel; two "pocket" users (9 and 10) sit behind
clutter, so their best route is a two-reflection chain sharing a head panel
near the BS, with only a distant panel offering a much weaker
single-reflection alternative. Users 13 and 14 share one serving panel and
sit exactly collinear as seen from the BS line array, which caps the
direct-transmission baseline. LoS links ship as explicit prior indicators
(override list), the way a site survey would provide them.

Serving panels are placed on prescribed direction cosines relative to the BS
array axis so co-scheduled users stay nearly orthogonal; panels 1 and 2 are
deliberately close in angle to expose the matched-filter baseline's
interference bottleneck.
"""

import json
import math
import sys

import numpy as np

BS = np.array([0.5, 10.0, 3.0])


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def panel_at(x, cosine, z=2.5):
    """Position with the given x whose BS direction cosine along +y is
    `cosine` (the BS array axis), at panel height z."""
    planar = math.hypot(x - BS[0], z - BS[2])
    dist = planar / math.sqrt(1.0 - cosine * cosine)
    return (x, BS[1] + cosine * dist, z)


def build():
    # --- panels -----------------------------------------------------------
    # (x, direction cosine) per panel. The 20-element half-wavelength BS
    # array has steering nulls at direction-cosine spacings that are
    # multiples of 0.2, so panels whose users can be scheduled together are
    # kept >= 0.2 apart in cosine; the 1-2 pair sits at 0.06 (correlation
    # ~0.86) on purpose.
    ris_pos = {
        1: panel_at(6.0, 0.36),    # serves user 1 (angle-paired with 2)
        2: panel_at(7.5, 0.30),    # serves user 2
        3: panel_at(6.0, 0.10),    # serves user 3
        4: panel_at(7.0, 0.50),    # serves user 4
        5: panel_at(4.6, 0.25),    # serves user 5
        6: panel_at(3.0, -0.15),   # serves user 6
        7: panel_at(4.5, 0.65),    # serves user 7
        8: panel_at(3.2, -0.75),   # serves user 8
        9: panel_at(2.2, -0.10),   # shared chain head for users 9 and 10
        10: (3.6, 11.3, 2.0),      # chain tail toward user 9
        11: panel_at(10.0, -0.55), # serves users 13 and 14
        12: (3.6, 8.35, 2.0),      # chain tail toward user 10
        13: panel_at(8.0, 0.70),   # serves user 11
        14: panel_at(6.5, -0.30),  # serves user 12
        15: panel_at(3.95, -0.90), # distant fallback for user 9
        16: panel_at(3.95, 0.90),  # distant fallback for user 10
    }
    user_pos = {
        1: (6.3, 13.3, 1.5),
        2: (7.9, 13.2, 1.5),
        3: (6.3, 11.8, 1.5),
        4: (7.4, 14.9, 1.5),
        5: (4.4, 12.2, 1.5),
        6: (2.8, 8.5, 1.5),
        7: (4.8, 14.6, 1.5),
        8: (3.0, 5.8, 1.5),
        9: (3.7, 11.35, 1.5),
        10: (3.7, 8.3, 1.5),
        11: (8.3, 16.2, 1.5),
        12: (6.0, 7.0, 1.5),
        13: (11.5, 3.0, 1.5),
        14: None,                  # placed below, angle-matched with user 13
    }

    # User 14 shares user 13's exact departure-direction cosine as seen by
    # the BS line array (axis +y), so the two direct channels are parallel.
    p13 = np.array(user_pos[13])
    d13 = np.linalg.norm(p13 - BS)
    cos13 = (p13[1] - BS[1]) / d13
    x14, z14 = 9.2, 1.5
    planar = (x14 - BS[0]) ** 2 + (z14 - BS[2]) ** 2
    d14 = math.sqrt(planar / (1.0 - cos13 ** 2))
    user_pos[14] = (x14, BS[1] + cos13 * d14, z14)

    # --- LoS link list (prior indicators) ---------------------------------
    serving = {1: 1, 2: 2, 3: 3, 4: 4, 5: 5, 6: 6, 7: 7, 8: 8,
               11: 13, 12: 14, 13: 11, 14: 11}
    links = set()

    def link(a, b):
        links.add((min(a, b), max(a, b)))

    def user_node(k):
        return 16 + k

    # BS-facing panels (the chain tails 10 and 12 face away from the BS).
    for j in [1, 2, 3, 4, 5, 6, 7, 8, 9, 11, 13, 14, 15, 16]:
        link(0, j)
    # Serving links.
    for k, j in serving.items():
        link(j, user_node(k))
    # Two-reflection chains: 9 -> 10 -> user 9, 9 -> 12 -> user 10.
    link(9, 10)
    link(10, user_node(9))
    link(9, 12)
    link(12, user_node(10))
    # Weak single-reflection fallbacks for the pocket users.
    link(15, user_node(9))
    link(16, user_node(10))

    # Cross-interference structure: complete 3-partite core over the plain
    # users; the pocket users' conflicts ride on their chain tails (active
    # on the multi-reflection route) and mirrored on the fallback panels
    # (active on the single-reflection route), so both schemes see the same
    # conflict graph.
    parts = [[1, 2, 11], [3, 4, 12], [5, 6, 7, 8]]
    for i, pa in enumerate(parts):
        for pb in parts[i + 1:]:
            for a in pa:
                for b in pb:
                    link(user_node(a), user_node(b))
    # Pocket user 9 interferes with parts B and C; user 10 with A and C.
    for b in parts[1] + parts[2]:
        link(10, user_node(b))
        link(15, user_node(b))
    for a in parts[0] + parts[2]:
        link(12, user_node(a))
        link(16, user_node(a))
    # The two pocket routes interfere with each other.
    link(10, 12)
    link(15, 16)

    # --- assemble ----------------------------------------------------------
    def node_position(idx):
        if idx == 0:
            return BS
        if idx <= 16:
            return np.array(ris_pos[idx])
        return np.array(user_pos[idx - 16])

    def facing(j):
        """Panel normal: mean direction toward its link partners."""
        p = np.array(ris_pos[j])
        acc = np.zeros(3)
        for a, b in links:
            other = None
            if a == j:
                other = b
            elif b == j:
                other = a
            if other is not None:
                acc += unit(node_position(other) - p)
        if np.linalg.norm(acc) < 1e-9:
            acc = np.array([1.0, 0.0, 0.0])
        return unit(acc)

    nodes = [{"index": 0, "kind": "bs", "position_m": [float(x) for x in BS]}]
    for j in range(1, 17):
        nodes.append({
            "index": j, "kind": "ris",
            "position_m": [round(float(x), 6) for x in ris_pos[j]],
            "elements_x": 5, "elements_y": 4,
            "facing_normal": [round(float(x), 6) for x in facing(j)],
        })
    for k in range(1, 15):
        nodes.append({
            "index": 16 + k, "kind": "user",
            "position_m": [round(float(x), 9) for x in user_pos[k]],
        })

    overrides = [[a, b, 1] for a, b in sorted(links)]
    return {
        "bs_antennas": 20,
        "bs_boresight": [1.0, 0.0, 0.0],
        "antenna_spacing_m": 0.03,
        "element_spacing_m": 0.03,
        "wavelength_m": 0.06,
        "ref_gain_dB": -46.4,
        "noise_power_dBw": -110.0,
        "tx_power_dBw": 10.0,
        "rng_seed": 20,
        "visibility": {
            "max_range_m": 0.0,
            "obstacles": [],
            "overrides": overrides,
        },
        "nodes": nodes,
    }


if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "src/hopbeam/data/paper16.json"
    doc = build()
    with open(out, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    print(f"wrote {out} ({len(doc['nodes'])} nodes, "
          f"{len(doc['visibility']['overrides'])} links)")
