"""Multi-agency campaign plans.

A plan is a set of DIME actions on lines of effort with timing, intensity,
resources and finish-before-start dependencies.  Plans render as a
synchronization matrix (lines of effort x time buckets) and as per-pool
cumulative resource profiles.  All operations here are pure functions over
plan values.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace

from .model import Finding, ModelGraph, ValidationReport

INSTRUMENTS = ("diplomatic", "information", "military", "economic")
POOL_KINDS = ("financial", "personnel")

PLAN_SCHEMA_VERSION = 1


class PlanError(ValueError):
    """Raised for structurally invalid plan definitions."""


@dataclass(frozen=True)
class Action:
    id: str
    name: str
    instrument: str
    line_of_effort: str
    target_instance: str
    target_port: str
    start_tick: int
    duration_ticks: int
    intensity: float
    pool_id: str
    rate_per_tick: float
    dependencies: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "dependencies", frozenset(self.dependencies))
        if self.instrument not in INSTRUMENTS:
            raise PlanError(f"action {self.id}: unknown instrument {self.instrument!r}")
        if self.start_tick < 0:
            raise PlanError(f"action {self.id}: startTick must be >= 0")
        if self.duration_ticks < 1:
            raise PlanError(f"action {self.id}: durationTicks must be >= 1")
        if self.rate_per_tick < 0:
            raise PlanError(f"action {self.id}: ratePerTick must be >= 0")

    @property
    def end_tick(self) -> int:
        """Exclusive end of the active window [start, start + duration)."""
        return self.start_tick + self.duration_ticks

    def active_at(self, tick: int) -> bool:
        return self.start_tick <= tick < self.end_tick


@dataclass(frozen=True)
class LineOfEffort:
    name: str
    description: str = ""


@dataclass(frozen=True)
class ResourcePool:
    pool_id: str
    agency: str
    budget: float
    kind: str = "financial"

    def __post_init__(self):
        if self.budget < 0:
            raise PlanError(f"pool {self.pool_id}: budget must be >= 0")
        if self.kind not in POOL_KINDS:
            raise PlanError(f"pool {self.pool_id}: unknown kind {self.kind!r}")


@dataclass(frozen=True)
class Plan:
    id: str
    actions: tuple[Action, ...]
    lines_of_effort: tuple[LineOfEffort, ...]
    pools: tuple[ResourcePool, ...]
    horizon_ticks: int
    version: int = 1

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))
        object.__setattr__(self, "lines_of_effort", tuple(self.lines_of_effort))
        object.__setattr__(self, "pools", tuple(self.pools))
        action_ids = [a.id for a in self.actions]
        if len(set(action_ids)) != len(action_ids):
            raise PlanError(f"plan {self.id}: duplicate action ids")
        loe_names = [l.name for l in self.lines_of_effort]
        if len(set(loe_names)) != len(loe_names):
            raise PlanError(f"plan {self.id}: duplicate line-of-effort names")
        pool_ids = [p.pool_id for p in self.pools]
        if len(set(pool_ids)) != len(pool_ids):
            raise PlanError(f"plan {self.id}: duplicate pool ids")

    def action(self, action_id: str) -> Action:
        for a in self.actions:
            if a.id == action_id:
                return a
        raise KeyError(action_id)

    def pool(self, pool_id: str) -> ResourcePool:
        for p in self.pools:
            if p.pool_id == pool_id:
                return p
        raise KeyError(pool_id)


def empty_plan(plan_id: str = "empty", horizon_ticks: int = 52) -> Plan:
    return Plan(plan_id, (), (), (), horizon_ticks)


def _dependency_cycles(plan: Plan) -> list[list[str]]:
    """Find dependency cycles by iterative DFS; returns one cycle per SCC hit."""
    graph = {a.id: sorted(a.dependencies) for a in plan.actions}
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {aid: WHITE for aid in graph}
    cycles: list[list[str]] = []

    for root in graph:
        if color[root] != WHITE:
            continue
        stack = [(root, iter(graph[root]))]
        path = [root]
        color[root] = GRAY
        while stack:
            node, it = stack[-1]
            advanced = False
            for dep in it:
                if dep not in graph:
                    continue
                if color[dep] == GRAY:
                    cycles.append(path[path.index(dep):] + [dep])
                elif color[dep] == WHITE:
                    color[dep] = GRAY
                    stack.append((dep, iter(graph[dep])))
                    path.append(dep)
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                stack.pop()
                path.pop()
    return cycles


def validate_plan(plan: Plan, graph: ModelGraph | None = None) -> ValidationReport:
    """Check dependency cycles and ordering, resource overdrafts, horizon
    violations, and (when a graph is given) target resolvability.
    """
    report = ValidationReport()
    by_id = {a.id: a for a in plan.actions}
    loe_names = {l.name for l in plan.lines_of_effort}
    pool_ids = {p.pool_id for p in plan.pools}

    for cyc in _dependency_cycles(plan):
        report.add_error(
            "dependency-cycle", "dependency cycle: " + " -> ".join(cyc)
        )

    for act in plan.actions:
        if act.line_of_effort not in loe_names:
            report.add_error(
                "unknown-loe",
                f"action {act.id} references unknown line of effort "
                f"{act.line_of_effort!r}",
            )
        if act.pool_id not in pool_ids:
            report.add_error(
                "unknown-pool",
                f"action {act.id} references unknown resource pool {act.pool_id!r}",
            )
        if act.end_tick > plan.horizon_ticks:
            report.add_error(
                "horizon-exceeded",
                f"action {act.id} ends at tick {act.end_tick}, past horizon "
                f"{plan.horizon_ticks}",
            )
        for dep_id in sorted(act.dependencies):
            dep = by_id.get(dep_id)
            if dep is None:
                report.add_error(
                    "unknown-dependency",
                    f"action {act.id} depends on unknown action {dep_id!r}",
                )
            elif act.start_tick < dep.end_tick:
                report.add_error(
                    "dependency-order",
                    f"action {act.id} starts at {act.start_tick} before its "
                    f"dependency {dep_id} finishes at {dep.end_tick}",
                )
        if graph is not None:
            try:
                inst = graph.instance(act.target_instance)
            except KeyError:
                report.add_error(
                    "unresolvable-target",
                    f"action {act.id} targets unknown instance "
                    f"{act.target_instance!r}",
                )
            else:
                tpl = graph.templates.get(inst.template_id)
                if tpl is not None and act.target_port not in tpl.input_ports:
                    report.add_error(
                        "unresolvable-target",
                        f"action {act.id} targets missing input port "
                        f"{act.target_instance}.{act.target_port}",
                    )

    for pool in plan.pools:
        spend = sum(
            a.rate_per_tick * a.duration_ticks
            for a in plan.actions
            if a.pool_id == pool.pool_id
        )
        if spend > pool.budget:
            report.add_error(
                "resource-overdraft",
                f"pool {pool.pool_id} overdrawn by {spend - pool.budget:g} "
                f"units (spend {spend:g} vs budget {pool.budget:g})",
            )
    return report


@dataclass(frozen=True)
class DuplicatePair:
    """Two actions hitting the same target port in overlapping windows."""

    first_id: str
    second_id: str
    target_instance: str
    target_port: str
    overlap_start: int
    overlap_end: int


def merge_plans(
    plans: list[Plan], merged_id: str = "merged"
) -> tuple[Plan, list[DuplicatePair]]:
    """Combine component plans into one.

    Actions get fresh ids only when they would collide; pools and lines of
    effort are unioned by name.  Colliding pool ids with different budgets
    are an error.  Duplicate detection is advisory: pairs with identical
    target port and overlapping active windows are reported, not removed.
    """
    pools: dict[str, ResourcePool] = {}
    loes: dict[str, LineOfEffort] = {}
    actions: list[Action] = []
    used_ids: set[str] = set()
    horizon = 0

    for plan in plans:
        horizon = max(horizon, plan.horizon_ticks)
        for pool in plan.pools:
            existing = pools.get(pool.pool_id)
            if existing is not None and existing.budget != pool.budget:
                raise PlanError(
                    f"pool {pool.pool_id!r} defined with conflicting budgets "
                    f"{existing.budget} and {pool.budget}"
                )
            pools.setdefault(pool.pool_id, pool)
        for loe in plan.lines_of_effort:
            loes.setdefault(loe.name, loe)
        for act in plan.actions:
            new_id = act.id
            n = 1
            while new_id in used_ids:
                n += 1
                new_id = f"{act.id}~{n}"
            used_ids.add(new_id)
            actions.append(act if new_id == act.id else replace(act, id=new_id))

    duplicates: list[DuplicatePair] = []
    for i, a in enumerate(actions):
        for b in actions[i + 1:]:
            if (a.target_instance, a.target_port) != (b.target_instance, b.target_port):
                continue
            lo = max(a.start_tick, b.start_tick)
            hi = min(a.end_tick, b.end_tick)
            if lo < hi:
                duplicates.append(
                    DuplicatePair(a.id, b.id, a.target_instance, a.target_port, lo, hi)
                )

    merged = Plan(
        id=merged_id,
        actions=tuple(actions),
        lines_of_effort=tuple(loes.values()),
        pools=tuple(pools.values()),
        horizon_ticks=horizon,
        version=1,
    )
    return merged, duplicates


@dataclass(frozen=True)
class SyncMatrix:
    """Rows = lines of effort in declaration order, cols = time buckets."""

    loe_names: tuple[str, ...]
    bucket_ticks: int
    cells: tuple[tuple[tuple[str, ...], ...], ...]  # [row][col] -> action ids

    @property
    def n_buckets(self) -> int:
        return len(self.cells[0]) if self.cells else 0


def sync_matrix(plan: Plan, bucket_ticks: int) -> SyncMatrix:
    """An action appears in every bucket intersecting [start, start+duration)."""
    if bucket_ticks < 1:
        raise PlanError("bucketTicks must be >= 1")
    n_buckets = max(1, math.ceil(plan.horizon_ticks / bucket_ticks))
    loe_names = tuple(l.name for l in plan.lines_of_effort)
    rows: list[tuple[tuple[str, ...], ...]] = []
    for loe in loe_names:
        row = []
        for b in range(n_buckets):
            b_start, b_end = b * bucket_ticks, (b + 1) * bucket_ticks
            ids = tuple(
                a.id
                for a in sorted(plan.actions, key=lambda a: (a.start_tick, a.id))
                if a.line_of_effort == loe
                and a.start_tick < b_end
                and a.end_tick > b_start
            )
            row.append(ids)
        rows.append(tuple(row))
    return SyncMatrix(loe_names, bucket_ticks, tuple(rows))


def sync_matrix_csv(matrix: SyncMatrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["lineOfEffort"] + [
        f"t{b * matrix.bucket_ticks}-{(b + 1) * matrix.bucket_ticks}"
        for b in range(matrix.n_buckets)
    ]
    writer.writerow(header)
    for loe, row in zip(matrix.loe_names, matrix.cells):
        writer.writerow([loe] + ["; ".join(cell) for cell in row])
    return buf.getvalue()


def resource_profile(plan: Plan) -> dict[str, list[float]]:
    """Per-pool cumulative spend series of length horizon + 1.

    Entry t is the total spent during ticks <= t; nondecreasing, and the
    final entry equals sum(rate * duration) over the pool's actions.
    """
    series = {p.pool_id: [0.0] * (plan.horizon_ticks + 1) for p in plan.pools}
    for act in plan.actions:
        per_tick = series.setdefault(
            act.pool_id, [0.0] * (plan.horizon_ticks + 1)
        )
        for t in range(act.start_tick, min(act.end_tick, plan.horizon_ticks + 1)):
            if t <= plan.horizon_ticks:
                per_tick[t] += act.rate_per_tick
    profile: dict[str, list[float]] = {}
    for pool_id, per_tick in series.items():
        cum = []
        total = 0.0
        for t in range(plan.horizon_ticks + 1):
            total += per_tick[t]
            cum.append(total)
        profile[pool_id] = cum
    return profile


def total_spend(plan: Plan) -> dict[str, float]:
    spend = {p.pool_id: 0.0 for p in plan.pools}
    for act in plan.actions:
        spend[act.pool_id] = spend.get(act.pool_id, 0.0) + (
            act.rate_per_tick * act.duration_ticks
        )
    return spend


# ---------------------------------------------------------------------------
# Serialization (stable action ordering by (startTick, id))


def action_to_dict(act: Action) -> dict:
    return {
        "id": act.id,
        "name": act.name,
        "instrument": act.instrument,
        "lineOfEffort": act.line_of_effort,
        "target": {"instance": act.target_instance, "inputPort": act.target_port},
        "startTick": act.start_tick,
        "durationTicks": act.duration_ticks,
        "intensity": act.intensity,
        "resource": {"pool": act.pool_id, "ratePerTick": act.rate_per_tick},
        "dependencies": sorted(act.dependencies),
    }


def action_from_dict(d: dict) -> Action:
    return Action(
        id=d["id"],
        name=d.get("name", d["id"]),
        instrument=d["instrument"],
        line_of_effort=d["lineOfEffort"],
        target_instance=d["target"]["instance"],
        target_port=d["target"]["inputPort"],
        start_tick=int(d["startTick"]),
        duration_ticks=int(d["durationTicks"]),
        intensity=float(d["intensity"]),
        pool_id=d["resource"]["pool"],
        rate_per_tick=float(d["resource"]["ratePerTick"]),
        dependencies=frozenset(d.get("dependencies", [])),
    )


def plan_to_dict(plan: Plan) -> dict:
    return {
        "schemaVersion": PLAN_SCHEMA_VERSION,
        "id": plan.id,
        "version": plan.version,
        "horizonTicks": plan.horizon_ticks,
        "linesOfEffort": [
            {"name": l.name, "description": l.description}
            for l in plan.lines_of_effort
        ],
        "pools": [
            {
                "poolId": p.pool_id,
                "agency": p.agency,
                "budget": p.budget,
                "kind": p.kind,
            }
            for p in plan.pools
        ],
        "actions": [
            action_to_dict(a)
            for a in sorted(plan.actions, key=lambda a: (a.start_tick, a.id))
        ],
    }


def plan_from_dict(d: dict) -> Plan:
    version = d.get("schemaVersion")
    if version != PLAN_SCHEMA_VERSION:
        raise PlanError(f"unsupported plan schemaVersion {version!r}")
    return Plan(
        id=d["id"],
        actions=tuple(action_from_dict(a) for a in d.get("actions", [])),
        lines_of_effort=tuple(
            LineOfEffort(l["name"], l.get("description", ""))
            for l in d.get("linesOfEffort", [])
        ),
        pools=tuple(
            ResourcePool(
                p["poolId"], p.get("agency", ""), p["budget"], p.get("kind", "financial")
            )
            for p in d.get("pools", [])
        ),
        horizon_ticks=int(d["horizonTicks"]),
        version=int(d.get("version", 1)),
    )


def plan_to_json(plan: Plan) -> str:
    from .model import dumps_canonical

    return dumps_canonical(plan_to_dict(plan))


def plan_from_json(text: str) -> Plan:
    return plan_from_dict(json.loads(text))
