"""Deterministic discrete-time simulation and effect detection.

Semantics per tick t (synchronous, outputs depend on current state only):

    y[t] = C @ x[t]
    u[t] = sum(gain * coupled outputs) + sum(active action intensities)
    x[t+1] = clamp(A @ x[t] + B @ u[t] + c + eps[t], 0, 100)

Noise eps is Gaussian, streamed from a generator keyed by
(seed, instance, var) and indexed by tick, so a plan run and its baseline
share identical noise realizations and deltas are attributable to the plan.
Identical (graph, plan, config) inputs yield bit-identical trajectories.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .model import (
    LEVEL_MAX,
    LEVEL_MIN,
    ModelGraph,
    SituationHypothesis,
    effective_params,
    validate_graph,
)
from .plan import Plan, empty_plan, validate_plan

RESULT_SCHEMA_VERSION = 1
RESULT_DECIMALS = 6

DEFAULT_THETA = 5.0
DEFAULT_PERSISTENCE = 4


class SimulationError(RuntimeError):
    """Structural failure during simulation; must be precluded by validation."""


@dataclass(frozen=True)
class RunConfig:
    horizon_ticks: int
    seed: int = 0
    noise_enabled: bool = False

    def __post_init__(self):
        if self.horizon_ticks < 1:
            raise ValueError("horizonTicks must be >= 1")

    def key(self) -> tuple:
        return (self.horizon_ticks, self.seed, self.noise_enabled)


@dataclass
class Trajectory:
    """Per-variable level series plus derived national aggregates.

    ``values`` has shape (n_columns, horizon + 1); row i is the series for
    ``columns[i]`` = (instance_id, var_name), t=0 included.
    """

    columns: list[tuple[str, str]]
    values: np.ndarray
    polarity: dict[tuple[str, str], str]
    national: dict[str, np.ndarray] = field(default_factory=dict)
    national_polarity: dict[str, str] = field(default_factory=dict)

    @property
    def horizon_ticks(self) -> int:
        return self.values.shape[1] - 1

    def series(self, instance_id: str, var_name: str) -> np.ndarray:
        idx = self.columns.index((instance_id, var_name))
        return self.values[idx]

    def frame(self, tick: int) -> dict[tuple[str, str], float]:
        return {col: float(self.values[i, tick]) for i, col in enumerate(self.columns)}

    def same_shape(self, other: "Trajectory") -> bool:
        return (
            self.columns == other.columns
            and self.values.shape == other.values.shape
            and sorted(self.national) == sorted(other.national)
        )


@dataclass(frozen=True)
class EffectRecord:
    """A significant, sustained deviation from baseline.

    Window is half-open [t1, t2): |plan - baseline| >= theta at every tick in
    it, and t2 - t1 >= the persistence parameter.
    """

    instance_id: str
    var_name: str
    t1: int
    t2: int
    mean_delta: float
    favorable: bool


class _Compiled:
    """Model graph lowered to one global affine update x' = clamp(Mx + Bu + c)."""

    def __init__(self, graph: ModelGraph):
        self.graph = graph
        self.state_index: dict[tuple[str, str], int] = {}
        self.input_index: dict[tuple[str, str], int] = {}
        self.polarity: dict[tuple[str, str], str] = {}
        x0_parts, c_parts, noise_parts = [], [], []
        a_blocks, b_blocks, c_maps = [], [], []
        out_index: dict[tuple[str, str], int] = {}

        n_state = n_in = n_out = 0
        for inst in graph.instances:
            tpl = graph.templates.get(inst.template_id)
            if tpl is None:
                raise SimulationError(f"unknown template {inst.template_id}")
            params = effective_params(tpl, inst)
            for var in tpl.state_vars:
                self.state_index[(inst.id, var.name)] = n_state
                self.polarity[(inst.id, var.name)] = var.polarity
                n_state += 1
            for port in tpl.input_ports:
                self.input_index[(inst.id, port)] = n_in
                n_in += 1
            for port in tpl.output_ports:
                out_index[(inst.id, port)] = n_out
                n_out += 1
            x0_parts.extend(params["x0"])
            c_parts.extend(params["c"])
            noise_parts.extend(params["noiseStd"])
            a_blocks.append(np.array(params["A"], dtype=float).reshape(tpl.k, tpl.k))
            b_blocks.append(
                np.array(params["B"], dtype=float).reshape(tpl.k, len(tpl.input_ports))
            )
            c_maps.append(
                np.array(tpl.output_map, dtype=float).reshape(
                    len(tpl.output_ports), tpl.k
                )
            )

        self.n_state, self.n_in = n_state, n_in
        self.x0 = np.array(x0_parts, dtype=float)
        self.c = np.array(c_parts, dtype=float)
        self.noise_std = np.array(noise_parts, dtype=float)

        a_blk = np.zeros((n_state, n_state))
        b_blk = np.zeros((n_state, n_in))
        c_blk = np.zeros((n_out, n_state))
        rs = ri = ro = 0
        for a, b, cm in zip(a_blocks, b_blocks, c_maps):
            k, m = b.shape
            p = cm.shape[0]
            a_blk[rs:rs + k, rs:rs + k] = a
            b_blk[rs:rs + k, ri:ri + m] = b
            c_blk[ro:ro + p, rs:rs + k] = cm
            rs += k
            ri += m
            ro += p

        gains = np.zeros((n_in, n_out))
        for cpl in graph.couplings:
            try:
                src = out_index[(cpl.from_instance, cpl.output_port)]
                dst = self.input_index[(cpl.to_instance, cpl.input_port)]
            except KeyError as exc:
                raise SimulationError(f"dangling coupling endpoint: {exc}") from exc
            gains[dst, src] += cpl.gain

        # x' = clamp(A x + B (G C x + u_ext) + c) = clamp(M x + B u_ext + c)
        self.m = a_blk + b_blk @ gains @ c_blk
        self.b = b_blk

    def injections(self, plan: Plan, horizon: int) -> np.ndarray:
        """External input u_ext as an (n_in, horizon) array of summed
        action intensities."""
        u = np.zeros((self.n_in, horizon))
        for act in plan.actions:
            key = (act.target_instance, act.target_port)
            if key not in self.input_index:
                raise SimulationError(f"unresolvable action target {key}")
            lo = max(0, act.start_tick)
            hi = min(horizon, act.end_tick)
            if lo < hi:
                u[self.input_index[key], lo:hi] += act.intensity
        return u

    def noise(self, cfg: RunConfig) -> np.ndarray | None:
        if not cfg.noise_enabled:
            return None
        eps = np.zeros((self.n_state, cfg.horizon_ticks))
        for (inst_id, var_name), idx in self.state_index.items():
            std = self.noise_std[idx]
            if std == 0.0:
                continue
            digest = hashlib.blake2b(
                f"{inst_id}\x00{var_name}".encode(), digest_size=8
            ).digest()
            stream = np.random.default_rng(
                [cfg.seed & 0xFFFFFFFFFFFFFFFF, int.from_bytes(digest, "big")]
            )
            eps[idx] = std * stream.standard_normal(cfg.horizon_ticks)
        return eps


def simulate(graph: ModelGraph, plan: Plan, cfg: RunConfig) -> Trajectory:
    """Run the coupled model under the plan's injections.

    Callers are expected to have passed validate_graph / validate_plan; a
    structural inconsistency here raises SimulationError.
    """
    compiled = _Compiled(graph)
    horizon = cfg.horizon_ticks
    u_ext = compiled.injections(plan, horizon)
    eps = compiled.noise(cfg)

    values = np.empty((compiled.n_state, horizon + 1))
    x = compiled.x0.copy()
    values[:, 0] = x
    for t in range(horizon):
        x = compiled.m @ x + compiled.b @ u_ext[:, t] + compiled.c
        if eps is not None:
            x = x + eps[:, t]
        np.clip(x, LEVEL_MIN, LEVEL_MAX, out=x)
        values[:, t + 1] = x

    columns = sorted(compiled.state_index, key=compiled.state_index.get)
    traj = Trajectory(
        columns=columns,
        values=values,
        polarity=dict(compiled.polarity),
    )
    for agg in graph.aggregations:
        series = np.zeros(horizon + 1)
        pol = "favorable-high"
        for i, term in enumerate(agg.terms):
            idx = compiled.state_index.get((term.instance_id, term.var_name))
            if idx is None:
                raise SimulationError(
                    f"aggregation {agg.national_var!r} references missing var"
                )
            series += term.weight * values[idx]
            if i == 0:
                pol = compiled.polarity[(term.instance_id, term.var_name)]
        traj.national[agg.national_var] = series
        traj.national_polarity[agg.national_var] = pol
    return traj


def baseline(graph: ModelGraph, cfg: RunConfig) -> Trajectory:
    """Simulated future with no plan actions applied."""
    return simulate(graph, empty_plan(horizon_ticks=cfg.horizon_ticks), cfg)


def _windows(mask: np.ndarray, min_len: int):
    """Maximal runs of True in mask, as half-open (start, end) pairs of
    length >= min_len."""
    out = []
    start = None
    for t, hit in enumerate(mask):
        if hit and start is None:
            start = t
        elif not hit and start is not None:
            if t - start >= min_len:
                out.append((start, t))
            start = None
    if start is not None and len(mask) - start >= min_len:
        out.append((start, len(mask)))
    return out


def detect_effects(
    baseline_traj: Trajectory,
    plan_traj: Trajectory,
    theta: float = DEFAULT_THETA,
    persistence: int = DEFAULT_PERSISTENCE,
) -> list[EffectRecord]:
    """Maximal windows of |plan - baseline| >= theta lasting >= persistence
    ticks, over every instance variable and national aggregate."""
    if theta <= 0:
        raise ValueError("theta must be > 0")
    if persistence < 1:
        raise ValueError("persistence must be >= 1")
    if not baseline_traj.same_shape(plan_traj):
        raise ValueError("trajectory shapes differ")

    records: list[EffectRecord] = []

    def scan(instance_id, var_name, base, run, polarity):
        delta = run - base
        for t1, t2 in _windows(np.abs(delta) >= theta, persistence):
            mean_delta = float(np.mean(delta[t1:t2]))
            favorable = (mean_delta > 0) != (polarity == "favorable-low")
            records.append(
                EffectRecord(instance_id, var_name, t1, t2, mean_delta, favorable)
            )

    for i, (inst_id, var_name) in enumerate(baseline_traj.columns):
        scan(
            inst_id,
            var_name,
            baseline_traj.values[i],
            plan_traj.values[i],
            baseline_traj.polarity[(inst_id, var_name)],
        )
    for name in sorted(baseline_traj.national):
        scan(
            "national",
            name,
            baseline_traj.national[name],
            plan_traj.national[name],
            baseline_traj.national_polarity[name],
        )
    return records


@dataclass
class BatchCell:
    hypothesis: str
    plan_id: str
    cfg: RunConfig
    ok: bool
    trajectory: Trajectory | None = None
    error: str | None = None


def batch_simulate(
    hypotheses: list[SituationHypothesis],
    plans: list[Plan],
    cfgs: list[RunConfig],
) -> dict[tuple[str, str, tuple], BatchCell]:
    """Independent simulate calls over the full cross product.

    A cell that fails validation is recorded as failed; the others proceed.
    Cells are independent, so execution order cannot affect results.
    """
    results: dict[tuple[str, str, tuple], BatchCell] = {}
    for hyp in hypotheses:
        graph_report = validate_graph(hyp.graph)
        for plan in plans:
            plan_report = validate_plan(plan, hyp.graph)
            for cfg in cfgs:
                key = (hyp.name, plan.id, cfg.key())
                problems = graph_report.errors() + plan_report.errors()
                if problems:
                    results[key] = BatchCell(
                        hyp.name, plan.id, cfg, ok=False,
                        error="; ".join(f.message for f in problems),
                    )
                    continue
                try:
                    traj = simulate(hyp.graph, plan, cfg)
                except SimulationError as exc:
                    results[key] = BatchCell(
                        hyp.name, plan.id, cfg, ok=False, error=str(exc)
                    )
                else:
                    results[key] = BatchCell(
                        hyp.name, plan.id, cfg, ok=True, trajectory=traj
                    )
    return results


# ---------------------------------------------------------------------------
# Run result files (fixed decimal precision, provenance hashes)


def content_hash(payload: dict) -> str:
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def _round_series(series: np.ndarray) -> list[float]:
    return [round(float(v), RESULT_DECIMALS) for v in series]


def trajectory_to_dict(traj: Trajectory) -> dict:
    return {
        "series": [
            {
                "instance": inst_id,
                "var": var_name,
                "polarity": traj.polarity[(inst_id, var_name)],
                "values": _round_series(traj.values[i]),
            }
            for i, (inst_id, var_name) in enumerate(traj.columns)
        ],
        "national": [
            {
                "var": name,
                "polarity": traj.national_polarity[name],
                "values": _round_series(traj.national[name]),
            }
            for name in sorted(traj.national)
        ],
    }


def trajectory_from_dict(d: dict) -> Trajectory:
    columns = [(s["instance"], s["var"]) for s in d["series"]]
    values = np.array([s["values"] for s in d["series"]], dtype=float)
    if values.size == 0:
        values = values.reshape(0, 0)
    traj = Trajectory(
        columns=columns,
        values=values,
        polarity={(s["instance"], s["var"]): s["polarity"] for s in d["series"]},
    )
    for nat in d.get("national", []):
        traj.national[nat["var"]] = np.array(nat["values"], dtype=float)
        traj.national_polarity[nat["var"]] = nat["polarity"]
    return traj


def effect_to_dict(rec: EffectRecord) -> dict:
    return {
        "instance": rec.instance_id,
        "var": rec.var_name,
        "window": [rec.t1, rec.t2],
        "meanDelta": round(rec.mean_delta, RESULT_DECIMALS),
        "favorable": rec.favorable,
    }


def run_result_to_dict(
    baseline_traj: Trajectory,
    plan_traj: Trajectory,
    effects: list[EffectRecord],
    cfg: RunConfig,
    *,
    scenario_hash: str = "",
    plan_hash: str = "",
    hypothesis: str = "",
    theta: float = DEFAULT_THETA,
    persistence: int = DEFAULT_PERSISTENCE,
) -> dict:
    return {
        "schemaVersion": RESULT_SCHEMA_VERSION,
        "config": {
            "horizonTicks": cfg.horizon_ticks,
            "seed": cfg.seed,
            "noiseEnabled": cfg.noise_enabled,
            "theta": theta,
            "persistence": persistence,
        },
        "provenance": {
            "scenarioHash": scenario_hash,
            "planHash": plan_hash,
            "hypothesis": hypothesis,
        },
        "baseline": trajectory_to_dict(baseline_traj),
        "plan": trajectory_to_dict(plan_traj),
        "effects": [effect_to_dict(e) for e in effects],
    }
