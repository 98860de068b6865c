"""End-to-end runs: scheme dispatch, sweeps and serializable results."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import baselines, beamforming as bf
from .grouping import GroupCover, build_groups
from .pathsel import ReflectionPath, all_best_paths, build_connection_graph, \
    cascade_channel
from .scenario import Scenario

SCHEMES = ("multi", "single", "non_ris", "mrt")
SWEEP_VARIABLES = ("tx_power_dB", "elements_per_ris", "bs_antennas",
                   "quantization_bits")


@dataclass
class RunOptions:
    bits: int | None = None          # None means continuous phases
    seed: int | None = None          # overrides the scenario seed when set
    hop_cap: int | None = None
    rotation_scan: int = 0
    bisect_tol: float = bf.DEFAULT_BISECT_TOL
    rate_tol: float = bf.DEFAULT_RATE_TOL
    max_outer: int = bf.DEFAULT_MAX_OUTER


@dataclass
class PipelineResult:
    scheme: str
    paths: dict[int, ReflectionPath | None]
    cover: GroupCover
    schedule: np.ndarray
    group_beams: list
    report: bf.RateReport
    unreachable: list[int]
    objective_history: list[float]
    wall_ms: float = 0.0

    @property
    def user_rates(self) -> dict[int, float]:
        rates = dict(self.report.user_rate)
        for k in self.unreachable:
            rates[k] = 0.0
        return rates

    @property
    def objective(self) -> float:
        rates = self.user_rates
        return min(rates.values()) if rates else 0.0


def _effective_rows(paths, scenario: Scenario, options: RunOptions):
    rows = {}
    for k, path in paths.items():
        if path is None:
            continue
        eff = cascade_channel(path, scenario, options.bits, options.rotation_scan)
        rows[k] = eff.row
    return rows


def run_pipeline(scenario: Scenario, scheme: str = "multi",
                 options: RunOptions | None = None) -> PipelineResult:
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    options = options or RunOptions()
    start = time.perf_counter()

    if scheme == "non_ris":
        paths: dict[int, ReflectionPath | None] = {
            k: None for k in range(1, scenario.num_users + 1)}
        rows = baselines.non_ris_channels(scenario)
        cover = baselines.non_ris_cover(scenario)
        unreachable: list[int] = []
    else:
        if scheme == "single":
            paths = baselines.single_reflection_paths(scenario)
        else:
            graph = build_connection_graph(scenario)
            paths = all_best_paths(graph, options.hop_cap)
        unreachable = sorted(k for k, p in paths.items() if p is None)
        rows = _effective_rows(paths, scenario, options)
        _, cover = build_groups(paths, scenario)

    if scheme == "mrt":
        solution = baselines.mrt_solution(cover, rows, scenario.tx_power,
                                          scenario.noise_power)
    else:
        solution = bf.alternate(cover, rows, scenario.tx_power,
                                scenario.noise_power, options.bisect_tol,
                                options.rate_tol, options.max_outer)

    wall_ms = (time.perf_counter() - start) * 1e3
    return PipelineResult(scheme, paths, cover, solution.schedule,
                          solution.group_beams, solution.report, unreachable,
                          solution.objective_history, wall_ms)


@dataclass
class SweepSpec:
    variable: str
    values: list            # floats, or math.inf meaning continuous bits
    schemes: list[str] = field(default_factory=lambda: ["multi"])

    def validate(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(f"unknown sweep variable {self.variable!r}")
        if not self.values:
            raise ValueError("sweep needs at least one value")
        if list(self.values) != sorted(self.values) or \
                len(set(self.values)) != len(self.values):
            raise ValueError("sweep values must be strictly increasing")
        if not self.schemes:
            raise ValueError("sweep needs at least one scheme")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ValueError(f"unknown scheme {s!r}")
        return self


@dataclass
class ResultRow:
    scheme: str
    variable: str
    value: float
    objective: float | None          # min equivalent rate, bits/s/Hz
    gamma_star: float | None
    groups: int | None
    outer_iterations: int | None
    bisection_probes: int | None
    fixed_point_iterations: int | None
    user_rates: dict[int, float] | None
    wall_ms: float | None
    error: str | None = None


def apply_sweep_value(scenario: Scenario, options: RunOptions, variable: str,
                      value) -> tuple[Scenario, RunOptions]:
    opts = RunOptions(**vars(options))
    if variable == "tx_power_dB":
        return scenario.replaced(tx_power=10.0 ** (value / 10.0)), opts
    if variable == "elements_per_ris":
        return scenario.with_ris_elements(int(value)), opts
    if variable == "bs_antennas":
        return scenario.replaced(bs_antennas=int(value)), opts
    if variable == "quantization_bits":
        opts.bits = None if math.isinf(value) else int(value)
        return scenario, opts
    raise ValueError(f"unknown sweep variable {variable!r}")


def run_sweep(scenario: Scenario, spec: SweepSpec,
              options: RunOptions | None = None) -> list[ResultRow]:
    spec.validate()
    options = options or RunOptions()
    rows = []
    for scheme in spec.schemes:
        for value in spec.values:
            try:
                scn, opts = apply_sweep_value(scenario, options,
                                              spec.variable, value)
                result = run_pipeline(scn, scheme, opts)
                rows.append(ResultRow(
                    scheme, spec.variable, value,
                    result.objective, result.report.gamma_star,
                    result.cover.count,
                    result.report.counters.outer_iterations,
                    result.report.counters.bisection_probes,
                    result.report.counters.fixed_point_iterations,
                    result.user_rates, result.wall_ms))
            except Exception as exc:  # record and continue with the sweep
                rows.append(ResultRow(scheme, spec.variable, value, None, None,
                                      None, None, None, None, None, None,
                                      f"{type(exc).__name__}: {exc}"))
    return rows
