"""Scenario description: nodes, geometry, radio constants and visibility rules.

A scenario is loaded from a self-describing JSON document (units encoded in
field names, dB variants accepted and converted to linear on load).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

BS = "bs"
RIS = "ris"
USER = "user"

UP = np.array([0.0, 0.0, 1.0])


class ScenarioError(ValueError):
    """Raised when a scenario file cannot be parsed or violates an invariant."""

    def __init__(self, message, field_path=None):
        if field_path:
            message = f"{field_path}: {message}"
        super().__init__(message)
        self.field_path = field_path


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class Node:
    index: int
    kind: str
    position: np.ndarray
    elements_x: int = 0
    elements_y: int = 0
    facing_normal: np.ndarray | None = None

    @property
    def elements(self) -> int:
        return self.elements_x * self.elements_y

    def validate(self):
        where = f"nodes[{self.index}]"
        if self.kind not in (BS, RIS, USER):
            raise ScenarioError(f"unknown kind {self.kind!r}", where)
        if self.position.shape != (3,) or not np.all(np.isfinite(self.position)):
            raise ScenarioError("position must be a finite 3-vector", where)
        if self.kind == RIS:
            if self.elements_x < 1 or self.elements_y < 1:
                raise ScenarioError("RIS element counts must be >= 1", where)
            if self.facing_normal is None:
                raise ScenarioError("RIS node needs a facing_normal", where)
            n = float(np.linalg.norm(self.facing_normal))
            if abs(n - 1.0) > 1e-6:
                raise ScenarioError("facing_normal must have unit norm", where)


@dataclass(frozen=True)
class Box:
    """Axis-aligned obstacle box."""

    lo: np.ndarray
    hi: np.ndarray

    def intersects_segment(self, a: np.ndarray, b: np.ndarray) -> bool:
        # Slab test on the parametric segment a + t (b - a), t in (0, 1).
        d = b - a
        tmin, tmax = 0.0, 1.0
        for ax in range(3):
            if abs(d[ax]) < 1e-15:
                if a[ax] < self.lo[ax] or a[ax] > self.hi[ax]:
                    return False
            else:
                t1 = (self.lo[ax] - a[ax]) / d[ax]
                t2 = (self.hi[ax] - a[ax]) / d[ax]
                if t1 > t2:
                    t1, t2 = t2, t1
                tmin = max(tmin, t1)
                tmax = min(tmax, t2)
                if tmin > tmax:
                    return False
        return tmax > tmin


@dataclass
class VisibilityRule:
    max_range: float | None = None
    obstacles: list[Box] = field(default_factory=list)
    overrides: dict[tuple[int, int], int] = field(default_factory=dict)

    def override_for(self, i: int, j: int) -> int | None:
        v = self.overrides.get((i, j))
        if v is None:
            v = self.overrides.get((j, i))
        return v


@dataclass
class Scenario:
    nodes: list[Node]
    bs_antennas: int
    antenna_spacing: float
    element_spacing: float
    wavelength: float
    ref_gain: float
    noise_power: float
    tx_power: float
    visibility: VisibilityRule
    rng_seed: int = 0
    bs_boresight: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0]))

    def __post_init__(self):
        self._by_index = {n.index: n for n in self.nodes}

    @property
    def num_ris(self) -> int:
        return sum(1 for n in self.nodes if n.kind == RIS)

    @property
    def num_users(self) -> int:
        return sum(1 for n in self.nodes if n.kind == USER)

    @property
    def bs(self) -> Node:
        return self._by_index[0]

    def node(self, index: int) -> Node:
        try:
            return self._by_index[index]
        except KeyError:
            raise ScenarioError(f"no node with index {index}") from None

    def ris_indices(self) -> list[int]:
        return [n.index for n in self.nodes if n.kind == RIS]

    def user_indices(self) -> list[int]:
        return [n.index for n in self.nodes if n.kind == USER]

    def user_node_index(self, k: int) -> int:
        """Node index of user k (1-based user numbering)."""
        return self.num_ris + k

    def distance(self, i: int, j: int) -> float:
        return float(np.linalg.norm(self.node(i).position - self.node(j).position))

    def validate(self):
        if self.bs_antennas < 1:
            raise ScenarioError("bs_antennas must be >= 1", "bs_antennas")
        for name in ("antenna_spacing", "element_spacing", "wavelength",
                     "ref_gain", "noise_power", "tx_power"):
            if getattr(self, name) <= 0:
                raise ScenarioError("must be > 0", name)
        kinds = [n.kind for n in self.nodes]
        if kinds.count(BS) != 1:
            raise ScenarioError("exactly one BS node required", "nodes")
        for n in self.nodes:
            n.validate()
        j, k = self.num_ris, self.num_users
        expected = [0] + list(range(1, j + 1)) + list(range(j + 1, j + k + 1))
        got = sorted(n.index for n in self.nodes)
        if got != expected:
            raise ScenarioError(
                "node indices must be BS=0, RISs 1..J, users J+1..J+K", "nodes")
        for n in self.nodes:
            want = BS if n.index == 0 else (RIS if n.index <= j else USER)
            if n.kind != want:
                raise ScenarioError(
                    f"index {n.index} must be kind {want!r}", f"nodes[{n.index}]")
        if abs(np.linalg.norm(self.bs_boresight) - 1.0) > 1e-6:
            raise ScenarioError("bs_boresight must have unit norm", "bs_boresight")
        return self

    def replaced(self, **kwargs) -> "Scenario":
        """Copy with selected top-level fields replaced (sweep support)."""
        data = dict(
            nodes=self.nodes,
            bs_antennas=self.bs_antennas,
            antenna_spacing=self.antenna_spacing,
            element_spacing=self.element_spacing,
            wavelength=self.wavelength,
            ref_gain=self.ref_gain,
            noise_power=self.noise_power,
            tx_power=self.tx_power,
            visibility=self.visibility,
            rng_seed=self.rng_seed,
            bs_boresight=self.bs_boresight,
        )
        data.update(kwargs)
        return Scenario(**data).validate()

    def with_ris_elements(self, total: int) -> "Scenario":
        """Copy with every RIS panel resized to `total` elements."""
        ex, ey = factor_elements(total)
        nodes = []
        for n in self.nodes:
            if n.kind == RIS:
                nodes.append(Node(n.index, n.kind, n.position, ex, ey,
                                  n.facing_normal))
            else:
                nodes.append(n)
        return self.replaced(nodes=nodes)


def factor_elements(total: int) -> tuple[int, int]:
    """Split a panel size into (horizontal, vertical) counts, near-square."""
    if total < 1:
        raise ScenarioError("element count must be >= 1")
    ex = int(math.isqrt(total))
    while total % ex:
        ex -= 1
    return max(ex, total // ex), min(ex, total // ex)


def _scalar(doc, base, unit, db_unit=None, required=True, default=None,
            db_is_power=True):
    """Pull a scalar that may be given in linear or dB form."""
    lin_key = f"{base}_{unit}" if unit else base
    db_key = f"{base}_{db_unit}" if db_unit else None
    if lin_key in doc:
        return float(doc[lin_key])
    if db_key and db_key in doc:
        v = db_to_linear(float(doc[db_key]))
        return v if db_is_power else v
    if required:
        raise ScenarioError("missing", lin_key)
    return default


def scenario_from_dict(doc: dict) -> Scenario:
    try:
        nodes_doc = doc["nodes"]
    except KeyError:
        raise ScenarioError("missing", "nodes") from None
    nodes = []
    for idx, nd in enumerate(nodes_doc):
        where = f"nodes[{idx}]"
        try:
            kind = str(nd["kind"]).lower()
            index = int(nd["index"])
            pos = np.asarray(nd["position_m"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"bad node entry ({exc})", where) from None
        if kind == RIS:
            normal = np.asarray(nd.get("facing_normal", [1.0, 0.0, 0.0]), dtype=float)
            nrm = np.linalg.norm(normal)
            if nrm > 0:
                normal = normal / nrm
            nodes.append(Node(index, RIS, pos,
                              int(nd.get("elements_x", 1)),
                              int(nd.get("elements_y", 1)), normal))
        else:
            nodes.append(Node(index, kind, pos))

    vis_doc = doc.get("visibility", {})
    rule = VisibilityRule()
    if "max_range_m" in vis_doc and vis_doc["max_range_m"] is not None:
        rule.max_range = float(vis_doc["max_range_m"])
    for ob in vis_doc.get("obstacles", []):
        rule.obstacles.append(Box(np.asarray(ob["min_m"], dtype=float),
                                  np.asarray(ob["max_m"], dtype=float)))
    for entry in vis_doc.get("overrides", []):
        i, j, v = int(entry[0]), int(entry[1]), int(entry[2])
        rule.overrides[(i, j)] = v

    boresight = np.asarray(doc.get("bs_boresight", [1.0, 0.0, 0.0]), dtype=float)
    boresight = boresight / np.linalg.norm(boresight)

    scn = Scenario(
        nodes=nodes,
        bs_antennas=int(doc.get("bs_antennas", 1)),
        antenna_spacing=_scalar(doc, "antenna_spacing", "m"),
        element_spacing=_scalar(doc, "element_spacing", "m"),
        wavelength=_scalar(doc, "wavelength", "m"),
        ref_gain=_scalar(doc, "ref_gain", "", "dB"),
        noise_power=_scalar(doc, "noise_power", "w", "dBw"),
        tx_power=_scalar(doc, "tx_power", "w", "dBw"),
        visibility=rule,
        rng_seed=int(doc.get("rng_seed", 0)),
        bs_boresight=boresight,
    )
    return scn.validate()


def load_scenario(path) -> Scenario:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file: {exc}")
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc}")
    return scenario_from_dict(doc)
