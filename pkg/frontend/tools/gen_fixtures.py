"""Record API fixtures for the frontend contract tests.

Runs the backend directly and snapshots its outputs so the UI tests can
verify that the grid, effect shading and dashboard agree with the server
without a live service. Regenerate with:

    python3 frontend/tools/gen_fixtures.py
"""

import json
from pathlib import Path

import numpy as np

from wargamer import coa, engine
from wargamer.demo import (
    demo_desired_effects,
    demo_empty_plan,
    demo_integrated_plan,
    demo_scenario,
    demo_weak_plan,
)
from wargamer.plan import (
    Action,
    LineOfEffort,
    Plan,
    ResourcePool,
    plan_to_dict,
    sync_matrix,
)

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def random_plan(plan_id: str, seed: int) -> Plan:
    rng = np.random.default_rng(seed)
    loes = tuple(LineOfEffort(n) for n in ("recon", "gov", "sec", "info"))
    horizon = int(rng.integers(20, 120))
    actions = []
    for i in range(int(rng.integers(0, 15))):
        start = int(rng.integers(0, horizon))
        actions.append(
            Action(
                id=f"{plan_id}-a{i}",
                name=f"action {i}",
                instrument="economic",
                line_of_effort=loes[int(rng.integers(len(loes)))].name,
                target_instance=f"inst-{i % 3}",
                target_port="investment",
                start_tick=start,
                duration_ticks=int(rng.integers(1, horizon - start + 1)),
                intensity=float(rng.uniform(0.1, 1.0)),
                pool_id="cash",
                rate_per_tick=float(rng.uniform(0, 5)),
            )
        )
    pools = (ResourcePool("cash", "agency", 1e9),)
    return Plan(plan_id, tuple(actions), loes, pools, horizon)


def matrix_to_dict(m) -> dict:
    return {
        "loeNames": list(m.loe_names),
        "bucketTicks": m.bucket_ticks,
        "nBuckets": m.n_buckets,
        "cells": [[list(cell) for cell in row] for row in m.cells],
    }


def build_plans() -> list[dict]:
    plans = [demo_empty_plan(), demo_integrated_plan(), demo_weak_plan()]
    plans += [random_plan(f"random-{k}", seed=1000 + k) for k in range(7)]
    buckets = [4, 13, 1, 8, 5, 3, 10, 7, 2, 6]
    out = []
    for plan, bucket in zip(plans, buckets):
        out.append(
            {
                "name": plan.id,
                "bucketTicks": bucket,
                "plan": plan_to_dict(plan),
                "expected": matrix_to_dict(sync_matrix(plan, bucket)),
            }
        )
    return out


def build_runs() -> list[dict]:
    scn = demo_scenario()
    cases = [
        ("integrated-h0", demo_integrated_plan(), 0, False, 0),
        ("integrated-h1", demo_integrated_plan(), 1, False, 0),
        ("weak-h0", demo_weak_plan(), 0, False, 0),
        ("empty-h0", demo_empty_plan(), 0, False, 0),
        ("integrated-noise", demo_integrated_plan(), 0, True, 42),
    ]
    out = []
    for name, plan, hyp_idx, noise, seed in cases:
        hyp = scn.hypotheses[hyp_idx]
        cfg = engine.RunConfig(plan.horizon_ticks, seed, noise)
        base = engine.baseline(hyp.graph, cfg)
        traj = engine.simulate(hyp.graph, plan, cfg)
        effects = engine.detect_effects(base, traj)
        out.append(
            {
                "name": name,
                "result": engine.run_result_to_dict(
                    base, traj, effects, cfg, hypothesis=hyp.name
                ),
            }
        )
    return out


def build_comparison() -> list[dict]:
    scn = demo_scenario()
    effects = demo_desired_effects()
    scores = []
    for plan in (demo_integrated_plan(), demo_weak_plan(), demo_empty_plan()):
        cfg = engine.RunConfig(plan.horizon_ticks, seed=0)
        for hyp in scn.hypotheses:
            scores.append(coa.score_coa(plan, hyp, effects, cfg))
    ranking = coa.compare_coas(scores)
    rows = [
        {
            "rank": i + 1,
            "planId": s.plan_id,
            "hypothesis": s.hypothesis_name,
            "achievedCount": s.achieved_count,
            "achievedIds": sorted(s.achieved_ids),
            "unfavorableEffects": s.unfavorable_effect_count,
            "totalSpend": s.spend_sum,
        }
        for i, s in enumerate(ranking)
    ]
    # one synthetic failed cell so the dashboard's failed state is covered
    rows.append(
        {
            "rank": len(rows) + 1,
            "planId": "broken-plan",
            "hypothesis": scn.hypotheses[0].name,
            "achievedCount": 0,
            "achievedIds": [],
            "unfavorableEffects": 0,
            "totalSpend": 0.0,
            "failed": True,
            "failureReason": "plan failed validation on this hypothesis",
        }
    )
    return rows


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "plans.json").write_text(json.dumps(build_plans(), indent=2))
    (OUT / "runs.json").write_text(json.dumps(build_runs(), indent=2))
    (OUT / "comparison.json").write_text(json.dumps(build_comparison(), indent=2))
    print(f"fixtures written to {OUT}")


if __name__ == "__main__":
    main()
