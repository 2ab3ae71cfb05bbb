"""Headless entry point.

Exit codes: 0 success, 1 validation findings, 2 usage or parse error.
Flags mirror the run configuration one-to-one so headless and server runs
stay equivalent.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click

from . import analytics, coa, engine
from .model import (
    Scenario,
    dumps_canonical,
    scenario_from_json,
    validate_graph,
)
from .plan import (
    Plan,
    plan_from_json,
    sync_matrix,
    sync_matrix_csv,
    validate_plan,
)

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2


def _load_scenario(path: str) -> Scenario:
    try:
        return scenario_from_json(Path(path).read_text())
    except (OSError, ValueError, KeyError) as exc:
        click.echo(f"error: cannot load scenario {path}: {exc}", err=True)
        sys.exit(EXIT_USAGE)


def _load_plan(path: str) -> Plan:
    try:
        return plan_from_json(Path(path).read_text())
    except (OSError, ValueError, KeyError) as exc:
        click.echo(f"error: cannot load plan {path}: {exc}", err=True)
        sys.exit(EXIT_USAGE)


def _print_findings(report) -> None:
    for finding in report.findings:
        click.echo(f"{finding.level}: [{finding.code}] {finding.message}")


def _check(scenario: Scenario, plan: Plan, hypothesis: str | None):
    hyp = scenario.hypothesis(hypothesis)
    report = validate_graph(hyp.graph)
    report.extend(validate_plan(plan, hyp.graph))
    if report.errors():
        _print_findings(report)
        sys.exit(EXIT_FINDINGS)
    return hyp


@click.group()
def main():
    """Campaign wargaming: simulate plans, compare COAs, run analytics."""


@main.command("run")
@click.argument("scenario_path", type=click.Path())
@click.argument("plan_path", type=click.Path())
@click.option("--hypothesis", default=None, help="Hypothesis name (default: first).")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--horizon", default=None, type=int,
              help="Horizon in ticks (default: plan horizon).")
@click.option("--noise/--no-noise", default=False, show_default=True)
@click.option("--theta", default=engine.DEFAULT_THETA, show_default=True, type=float,
              help="Effect-significance threshold in level units.")
@click.option("--persistence", default=engine.DEFAULT_PERSISTENCE, show_default=True,
              type=int, help="Minimum effect window length in ticks.")
@click.option("-o", "--output", default="run-result.json", show_default=True)
def cmd_run(scenario_path, plan_path, hypothesis, seed, horizon, noise, theta,
            persistence, output):
    """Simulate PLAN against SCENARIO and write a run result file."""
    scenario = _load_scenario(scenario_path)
    plan = _load_plan(plan_path)
    hyp = _check(scenario, plan, hypothesis)
    cfg = engine.RunConfig(horizon or plan.horizon_ticks, seed, noise)
    base = engine.baseline(hyp.graph, cfg)
    traj = engine.simulate(hyp.graph, plan, cfg)
    effects = engine.detect_effects(base, traj, theta, persistence)
    result = engine.run_result_to_dict(
        base, traj, effects, cfg,
        scenario_hash=engine.content_hash(json.loads(Path(scenario_path).read_text())),
        plan_hash=engine.content_hash(json.loads(Path(plan_path).read_text())),
        hypothesis=hyp.name,
        theta=theta,
        persistence=persistence,
    )
    Path(output).write_text(dumps_canonical(result))
    favorable = sum(1 for e in effects if e.favorable)
    click.echo(
        f"{len(effects)} significant effects "
        f"({favorable} favorable, {len(effects) - favorable} unfavorable) "
        f"over {cfg.horizon_ticks} ticks -> {output}"
    )


@main.command("compare")
@click.argument("scenario_path", type=click.Path())
@click.argument("plan_paths", type=click.Path(), nargs=-1, required=True)
@click.option("--effects", "effects_path", required=True, type=click.Path(),
              help="Desired-effects JSON file.")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--horizon", default=None, type=int)
@click.option("--noise/--no-noise", default=False, show_default=True)
@click.option("--theta", default=engine.DEFAULT_THETA, show_default=True, type=float)
@click.option("--persistence", default=engine.DEFAULT_PERSISTENCE, show_default=True,
              type=int)
@click.option("-o", "--output", default="coa-comparison.csv", show_default=True)
def cmd_compare(scenario_path, plan_paths, effects_path, seed, horizon, noise,
                theta, persistence, output):
    """Rank plans against desired effects across every hypothesis."""
    scenario = _load_scenario(scenario_path)
    plans = [_load_plan(p) for p in plan_paths]
    try:
        effects = coa.effects_from_dicts(json.loads(Path(effects_path).read_text()))
    except (OSError, ValueError, KeyError) as exc:
        click.echo(f"error: cannot load effects {effects_path}: {exc}", err=True)
        sys.exit(EXIT_USAGE)

    scores = []
    robustness_by_plan = {}
    failures = []
    for plan in plans:
        cfg = engine.RunConfig(horizon or plan.horizon_ticks, seed, noise)
        per_plan_scores = []
        for hyp in scenario.hypotheses:
            problems = validate_graph(hyp.graph).errors() + validate_plan(
                plan, hyp.graph
            ).errors()
            if problems:
                failures.append(
                    (plan.id, hyp.name, "; ".join(f.message for f in problems))
                )
                continue
            per_plan_scores.append(
                coa.score_coa(plan, hyp, effects, cfg, theta, persistence)
            )
        scores.extend(per_plan_scores)
        robustness_by_plan[plan.id] = coa.robustness(
            plan, list(scenario.hypotheses), effects, cfg
        )

    ranking = coa.compare_coas(scores)
    Path(output).write_text(coa.comparison_csv(ranking, robustness_by_plan))
    for plan_id, hyp_name, msg in failures:
        click.echo(f"failed: plan {plan_id} on hypothesis {hyp_name}: {msg}")
    click.echo(f"{len(ranking)} (plan, hypothesis) rows ranked -> {output}")
    if failures and not ranking:
        sys.exit(EXIT_FINDINGS)


@main.command("analyze")
@click.argument("kind", type=click.Choice(["pfnet", "tlx", "sna", "trend", "trust"]))
@click.argument("input_path", type=click.Path())
@click.option("-q", "q_param", default=None, type=int,
              help="pfnet: max indirect path length (default n-1).")
@click.option("-r", "r_param", default="inf", show_default=True,
              help="pfnet: path metric exponent, a real >= 1 or 'inf'.")
@click.option("--window", default=None, type=(float, float),
              help="sna: restrict to events with timestamp in [start, end).")
@click.option("-o", "--output", default="analysis.json", show_default=True)
def cmd_analyze(kind, input_path, q_param, r_param, window, output):
    """Run one assessment-analytics pipeline over a CSV input file."""
    try:
        text = Path(input_path).read_text()
        result = _analyze(kind, text, q_param, r_param, window)
    except (OSError, ValueError, KeyError, analytics.AnalyticsError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    Path(output).write_text(dumps_canonical(result))
    click.echo(f"{kind} analysis -> {output}")


def _analyze(kind, text, q_param, r_param, window) -> dict:
    if kind == "pfnet":
        sim = analytics.similarity_from_csv(text)
        n = len(sim.concepts)
        q = q_param if q_param is not None else n - 1
        r = math.inf if r_param in ("inf", "infinity") else float(r_param)
        net = analytics.pfnet(analytics.to_distances(sim), q, r, nodes=list(sim.concepts))
        return {
            "kind": "pfnet",
            "nodes": list(net.nodes),
            "links": [{"a": a, "b": b, "weight": w}
                      for (a, b), w in sorted(net.links.items())],
            "q": q,
            "r": "inf" if math.isinf(r) else r,
        }
    if kind == "tlx":
        responses = analytics.tlx_from_csv(text)
        scores = [analytics.tlx_score(r) for r in responses]
        return {"kind": "tlx", "scores": scores,
                "mean": sum(scores) / len(scores) if scores else None}
    if kind == "sna":
        events = analytics.interactions_from_csv(text)
        metrics = analytics.sna_metrics(events, window)
        return {
            "kind": "sna",
            "density": metrics.density,
            "weightedDegree": dict(sorted(metrics.weighted_degree.items())),
            "betweenness": dict(sorted(metrics.betweenness.items())),
            "crossGroupFraction": metrics.cross_group_fraction,
        }
    if kind == "trend":
        import csv as _csv
        import io as _io

        rows = [r for r in _csv.reader(_io.StringIO(text)) if r]
        series = [(float(r[0]), float(r[1])) for r in rows[1:]]  # skip header
        res = analytics.trend(series)
        return {"kind": "trend", "slope": res.statistic, "rSquared": res.r_squared,
                "pValue": res.p_value, "n": res.n}
    if kind == "trust":
        responses = analytics.trust_from_csv(text)
        scores = [analytics.trust_score(r) for r in responses]
        return {"kind": "trust", "scores": scores,
                "mean": sum(scores) / len(scores) if scores else None}
    raise ValueError(f"unknown analysis kind {kind!r}")


@main.command("validate")
@click.argument("scenario_path", type=click.Path())
@click.argument("plan_path", type=click.Path())
@click.option("--hypothesis", default=None)
def cmd_validate(scenario_path, plan_path, hypothesis):
    """Validate SCENARIO and PLAN; exit 0 only when there are no errors."""
    scenario = _load_scenario(scenario_path)
    plan = _load_plan(plan_path)
    hyp = scenario.hypothesis(hypothesis)
    report = validate_graph(hyp.graph)
    report.extend(validate_plan(plan, hyp.graph))
    _print_findings(report)
    if report.errors():
        sys.exit(EXIT_FINDINGS)
    click.echo("ok: no errors")


@main.command("matrix")
@click.argument("plan_path", type=click.Path())
@click.option("--bucket", default=4, show_default=True, type=int,
              help="Bucket width in ticks.")
@click.option("-o", "--output", default="sync-matrix.csv", show_default=True)
def cmd_matrix(plan_path, bucket, output):
    """Export the plan's synchronization matrix as CSV."""
    plan = _load_plan(plan_path)
    Path(output).write_text(sync_matrix_csv(sync_matrix(plan, bucket)))
    click.echo(f"synchronization matrix -> {output}")


@main.command("demo")
@click.option("--dir", "out_dir", default=".", show_default=True,
              type=click.Path(file_okay=False))
def cmd_demo(out_dir):
    """Write the bundled demo scenario, plans and desired effects."""
    from . import demo

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    from .model import scenario_to_json
    from .plan import plan_to_json

    (out / "demo-scenario.json").write_text(scenario_to_json(demo.demo_scenario()))
    (out / "demo-empty-plan.json").write_text(plan_to_json(demo.demo_empty_plan()))
    (out / "demo-integrated-plan.json").write_text(
        plan_to_json(demo.demo_integrated_plan())
    )
    (out / "demo-weak-plan.json").write_text(plan_to_json(demo.demo_weak_plan()))
    (out / "demo-effects.json").write_text(
        dumps_canonical(coa.effects_to_dicts(demo.demo_desired_effects()))
    )
    click.echo(f"demo files written to {out}")


@main.command("serve")
@click.option("--host", default=None, help="Listen address (default 127.0.0.1).")
@click.option("--port", default=None, type=int, help="Listen port (default 8410).")
@click.option("--data-dir", default=None,
              help="Document store directory (default ./wargamer-data).")
def cmd_serve(host, port, data_dir):
    """Launch the HTTP planning service."""
    import os

    import uvicorn

    from .server import DEFAULT_HOST, DEFAULT_PORT, create_app

    host = host or os.environ.get("WARGAMER_HOST", DEFAULT_HOST)
    port = port or int(os.environ.get("WARGAMER_PORT", DEFAULT_PORT))
    uvicorn.run(create_app(data_dir), host=host, port=port)


if __name__ == "__main__":
    main()
