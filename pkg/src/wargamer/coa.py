"""Course-of-action evaluation, comparison and robustness.

A desired effect is achieved when the target variable reaches its threshold
in the stated direction at some tick up to the deadline and stays on the
satisfied side through the deadline; transient crossings do not count.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .engine import (
    DEFAULT_PERSISTENCE,
    DEFAULT_THETA,
    RunConfig,
    Trajectory,
    baseline,
    detect_effects,
    simulate,
)
from .model import SituationHypothesis, validate_graph
from .plan import Plan, total_spend, validate_plan

DEFAULT_TRACK_THETA = 10.0


@dataclass(frozen=True)
class DesiredEffect:
    """Target-effect spec; ``instance_id`` None means a national aggregate."""

    id: str
    var_name: str
    direction: str  # "increase" | "decrease"
    threshold_level: float
    deadline_tick: int
    instance_id: str | None = None

    def __post_init__(self):
        if self.direction not in ("increase", "decrease"):
            raise ValueError(f"effect {self.id}: unknown direction {self.direction!r}")
        if not (0.0 <= self.threshold_level <= 100.0):
            raise ValueError(f"effect {self.id}: threshold outside [0, 100]")
        if self.deadline_tick < 0:
            raise ValueError(f"effect {self.id}: deadline must be >= 0")


@dataclass(frozen=True)
class EffectOutcome:
    effect_id: str
    achieved: bool
    first_achieved_tick: int | None


@dataclass
class CoaScore:
    plan_id: str
    hypothesis_name: str
    achieved_ids: frozenset[str]
    unfavorable_effect_count: int
    total_spend: dict[str, float]
    effect_ids: frozenset[str]  # the DesiredEffect set scored against

    @property
    def achieved_count(self) -> int:
        return len(self.achieved_ids)

    @property
    def spend_sum(self) -> float:
        return sum(self.total_spend.values())


def _target_series(traj: Trajectory, eff: DesiredEffect) -> np.ndarray:
    if eff.instance_id is None:
        if eff.var_name not in traj.national:
            raise KeyError(f"no national aggregate {eff.var_name!r}")
        return traj.national[eff.var_name]
    return traj.series(eff.instance_id, eff.var_name)


def evaluate_coa(
    traj: Trajectory, effects: list[DesiredEffect]
) -> dict[str, EffectOutcome]:
    """Per-effect achievement with the earliest tick from which the target
    stays satisfied through the deadline."""
    outcomes: dict[str, EffectOutcome] = {}
    for eff in effects:
        series = _target_series(traj, eff)
        deadline = min(eff.deadline_tick, len(series) - 1)
        window = series[: deadline + 1]
        if eff.direction == "increase":
            ok = window >= eff.threshold_level
        else:
            ok = window <= eff.threshold_level
        # earliest t such that ok holds for every tick in [t, deadline]
        first: int | None = None
        if bool(ok[deadline]):
            t = deadline
            while t > 0 and bool(ok[t - 1]):
                t -= 1
            first = t
        outcomes[eff.id] = EffectOutcome(eff.id, first is not None, first)
    return outcomes


def score_coa(
    plan: Plan,
    hypothesis: SituationHypothesis,
    effects: list[DesiredEffect],
    cfg: RunConfig,
    theta: float = DEFAULT_THETA,
    persistence: int = DEFAULT_PERSISTENCE,
) -> CoaScore:
    """Simulate baseline and plan under one hypothesis and score the plan."""
    base = baseline(hypothesis.graph, cfg)
    run = simulate(hypothesis.graph, plan, cfg)
    outcomes = evaluate_coa(run, effects)
    achieved = frozenset(
        eid for eid, out in outcomes.items() if out.achieved
    )
    unfavorable = sum(
        1 for rec in detect_effects(base, run, theta, persistence) if not rec.favorable
    )
    return CoaScore(
        plan_id=plan.id,
        hypothesis_name=hypothesis.name,
        achieved_ids=achieved,
        unfavorable_effect_count=unfavorable,
        total_spend=total_spend(plan),
        effect_ids=frozenset(e.id for e in effects),
    )


def compare_coas(scores: list[CoaScore]) -> list[CoaScore]:
    """Rank: achieved desc, unfavorable asc, spend asc; planId breaks ties."""
    effect_sets = {s.effect_ids for s in scores}
    if len(effect_sets) > 1:
        raise ValueError("scores were computed against different effect sets")
    return sorted(
        scores,
        key=lambda s: (
            -s.achieved_count,
            s.unfavorable_effect_count,
            s.spend_sum,
            s.plan_id,
            s.hypothesis_name,
        ),
    )


@dataclass
class RobustnessResult:
    per_hypothesis: dict[str, int]
    failures: dict[str, str]
    min_achieved: int
    worst_hypothesis: str | None


def robustness(
    plan: Plan,
    hypotheses: list[SituationHypothesis],
    effects: list[DesiredEffect],
    cfg: RunConfig,
) -> RobustnessResult:
    """Achievement counts under every competing hypothesis; the minimum is
    the plan's robustness floor."""
    per: dict[str, int] = {}
    failures: dict[str, str] = {}
    for hyp in hypotheses:
        problems = validate_graph(hyp.graph).errors() + validate_plan(
            plan, hyp.graph
        ).errors()
        if problems:
            failures[hyp.name] = "; ".join(f.message for f in problems)
            continue
        run = simulate(hyp.graph, plan, cfg)
        outcomes = evaluate_coa(run, effects)
        per[hyp.name] = sum(1 for out in outcomes.values() if out.achieved)
    if per:
        worst = min(sorted(per), key=lambda name: per[name])
        min_achieved = per[worst]
    else:
        worst, min_achieved = None, 0
    return RobustnessResult(per, failures, min_achieved, worst)


@dataclass(frozen=True)
class DivergencePoint:
    tick: int
    instance_id: str | None
    var_name: str
    expected: float
    observed: float
    divergence: float
    flagged: bool


def track_progress(
    expected: Trajectory,
    observations: list[tuple[int, str | None, str, float]],
    theta_track: float = DEFAULT_TRACK_THETA,
) -> list[DivergencePoint]:
    """Compare ground observations to the plan's expected trajectory.

    ``observations`` are (tick, instance_id or None for national, var, value).
    Flags where |observed - expected| >= theta_track, sorted by tick.
    """
    points: list[DivergencePoint] = []
    for tick, inst_id, var_name, value in observations:
        eff = DesiredEffect(
            id="_probe", var_name=var_name, direction="increase",
            threshold_level=0.0, deadline_tick=0, instance_id=inst_id,
        )
        series = _target_series(expected, eff)
        if not (0 <= tick < len(series)):
            raise KeyError(f"tick {tick} outside trajectory")
        exp = float(series[tick])
        div = value - exp
        points.append(
            DivergencePoint(
                tick, inst_id, var_name, exp, value, div,
                flagged=abs(div) >= theta_track,
            )
        )
    points.sort(key=lambda p: (p.tick, p.instance_id or "", p.var_name))
    return points


def comparison_csv(
    ranking: list[CoaScore], robustness_by_plan: dict[str, RobustnessResult] | None = None
) -> str:
    """One row per (plan, hypothesis), in ranked order."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        [
            "rank",
            "planId",
            "hypothesis",
            "achievedCount",
            "achievedIds",
            "unfavorableEffects",
            "totalSpend",
            "minAchievedAcrossHypotheses",
            "worstHypothesis",
        ]
    )
    for rank, score in enumerate(ranking, start=1):
        rob = (robustness_by_plan or {}).get(score.plan_id)
        writer.writerow(
            [
                rank,
                score.plan_id,
                score.hypothesis_name,
                score.achieved_count,
                "; ".join(sorted(score.achieved_ids)),
                score.unfavorable_effect_count,
                f"{score.spend_sum:g}",
                rob.min_achieved if rob else "",
                (rob.worst_hypothesis or "") if rob else "",
            ]
        )
    return buf.getvalue()


def effects_from_dicts(items: list[dict]) -> list[DesiredEffect]:
    return [
        DesiredEffect(
            id=d["id"],
            var_name=d["var"],
            direction=d["direction"],
            threshold_level=float(d["thresholdLevel"]),
            deadline_tick=int(d["deadlineTick"]),
            instance_id=d.get("instance"),
        )
        for d in items
    ]


def effects_to_dicts(effects: list[DesiredEffect]) -> list[dict]:
    out = []
    for e in effects:
        d = {
            "id": e.id,
            "var": e.var_name,
            "direction": e.direction,
            "thresholdLevel": e.threshold_level,
            "deadlineTick": e.deadline_tick,
        }
        if e.instance_id is not None:
            d["instance"] = e.instance_id
        out.append(d)
    return out
