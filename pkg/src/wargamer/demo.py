"""Bundled demo scenario, plans and generators for large-scale exercises.

The demo models a small two-province situation with economy, security and
governance components under two competing hypotheses about what drives the
unrest.  ``large_scenario``/``large_plan`` generate inputs at campaign scale
(tens of instances, hundreds of actions) for throughput checks.
"""

from __future__ import annotations

import numpy as np

from .coa import DesiredEffect
from .model import (
    Aggregation,
    AggregationTerm,
    ComponentTemplate,
    Coupling,
    LevelVar,
    Override,
    Scenario,
    SituationHypothesis,
    compose,
    instantiate_template,
)
from .plan import Action, LineOfEffort, Plan, ResourcePool


def _economy_template() -> ComponentTemplate:
    return ComponentTemplate(
        id="economy",
        kind="economic",
        state_vars=(
            LevelVar("employment", 40.0, "favorable-high"),
            LevelVar("corruption", 60.0, "favorable-low"),
        ),
        input_ports=("investment", "security_pressure"),
        output_ports=("prosperity",),
        dynamics_a=((0.96, -0.02), (0.0, 0.985)),
        dynamics_b=((0.5, 0.1), (-0.2, 0.0)),
        bias=(2.7, 0.95),
        output_map=((1.0, -0.5),),
        noise_std=(0.4, 0.3),
    )


def _security_template() -> ComponentTemplate:
    return ComponentTemplate(
        id="security",
        kind="military",
        state_vars=(
            LevelVar("stability", 45.0, "favorable-high"),
            LevelVar("militant_influence", 55.0, "favorable-low"),
        ),
        input_ports=("patrols", "prosperity_signal"),
        output_ports=("order",),
        dynamics_a=((0.96, -0.03), (-0.01, 0.97)),
        dynamics_b=((0.6, 0.05), (-0.4, -0.05)),
        bias=(3.4, 2.15),
        output_map=((1.0, -0.6),),
        noise_std=(0.5, 0.5),
    )


def _governance_template() -> ComponentTemplate:
    return ComponentTemplate(
        id="governance",
        kind="political",
        state_vars=(LevelVar("legitimacy", 50.0, "favorable-high"),),
        input_ports=("reform_support", "order_signal"),
        output_ports=("authority",),
        dynamics_a=((0.98,),),
        dynamics_b=((0.4, 0.03),),
        bias=(0.92,),
        output_map=((1.0,),),
        noise_std=(0.3,),
    )


def _demo_graph(graph_id: str, militant_bias: float) -> tuple:
    """Instances/couplings/aggregations for one hypothesis.

    ``militant_bias`` shifts the security component's militant-influence
    drift, distinguishing the insurgency-driven hypothesis from the
    economically-driven one.
    """
    economy = _economy_template()
    security = _security_template()
    governance = _governance_template()
    templates = {t.id: t for t in (economy, security, governance)}

    instances = []
    for region, employment0 in (("north", 35.0), ("south", 45.0)):
        instances.append(
            instantiate_template(
                economy,
                overrides=[Override("x0", (0,), employment0)],
                region=region,
                instance_id=f"economy-{region}",
            )
        )
        instances.append(
            instantiate_template(
                security,
                overrides=[Override("c", (1,), 2.15 + militant_bias)],
                region=region,
                instance_id=f"security-{region}",
            )
        )
    instances.append(
        instantiate_template(
            governance, region="capital", tier="national",
            instance_id="governance-national",
        )
    )

    couplings = []
    for region in ("north", "south"):
        couplings.append(
            Coupling(f"economy-{region}", "prosperity",
                     f"security-{region}", "prosperity_signal", gain=0.02)
        )
        couplings.append(
            Coupling(f"security-{region}", "order",
                     f"economy-{region}", "security_pressure", gain=0.02)
        )
        couplings.append(
            Coupling(f"security-{region}", "order",
                     "governance-national", "order_signal", gain=0.01)
        )

    aggregations = (
        Aggregation(
            "national_employment",
            (
                AggregationTerm("economy-north", "employment", 0.5),
                AggregationTerm("economy-south", "employment", 0.5),
            ),
        ),
        Aggregation(
            "national_stability",
            (
                AggregationTerm("security-north", "stability", 0.5),
                AggregationTerm("security-south", "stability", 0.5),
            ),
        ),
    )
    return compose(templates, instances, couplings, aggregations, graph_id=graph_id)


def demo_scenario() -> Scenario:
    base = _demo_graph("economy-driven", militant_bias=0.0)
    insurgent = _demo_graph("insurgency-driven", militant_bias=0.35)
    templates = dict(base.templates)
    return Scenario(
        scenario_id="demo-two-province",
        templates=templates,
        hypotheses=(
            SituationHypothesis(
                "economy-driven", base,
                provenance="unrest driven by stagnant growth",
            ),
            SituationHypothesis(
                "insurgency-driven", insurgent,
                provenance="unrest driven by organized militancy",
            ),
        ),
    )


_DEMO_LOES = (
    LineOfEffort("reconstruction", "economic recovery"),
    LineOfEffort("governance", "institution building"),
    LineOfEffort("security", "stabilization"),
)
_DEMO_POOLS = (
    ResourcePool("aid-fund", "development agency", 6000.0, "financial"),
    ResourcePool("force-pool", "military", 4000.0, "personnel"),
)


def demo_empty_plan(horizon_ticks: int = 104) -> Plan:
    return Plan("demo-empty", (), _DEMO_LOES, _DEMO_POOLS, horizon_ticks)


def demo_integrated_plan(horizon_ticks: int = 104) -> Plan:
    """A coordinated multi-instrument plan touching both provinces."""
    actions = (
        Action("survey", "joint district assessment", "information",
               "governance", "governance-national", "reform_support",
               start_tick=0, duration_ticks=4, intensity=0.2,
               pool_id="aid-fund", rate_per_tick=1.0),
        Action("invest-north", "northern investment program", "economic",
               "reconstruction", "economy-north", "investment",
               start_tick=4, duration_ticks=96, intensity=2.0,
               pool_id="aid-fund", rate_per_tick=10.0),
        Action("invest-south", "southern investment program", "economic",
               "reconstruction", "economy-south", "investment",
               start_tick=8, duration_ticks=88, intensity=1.6,
               pool_id="aid-fund", rate_per_tick=8.0),
        Action("patrol-north", "security surge north", "military",
               "security", "security-north", "patrols",
               start_tick=0, duration_ticks=100, intensity=0.8,
               pool_id="force-pool", rate_per_tick=15.0),
        Action("patrol-south", "sustained patrols south", "military",
               "security", "security-south", "patrols",
               start_tick=10, duration_ticks=80, intensity=0.6,
               pool_id="force-pool", rate_per_tick=12.0),
        Action("reform-push", "governance reform package", "diplomatic",
               "governance", "governance-national", "reform_support",
               start_tick=26, duration_ticks=70, intensity=1.2,
               pool_id="aid-fund", rate_per_tick=6.0,
               dependencies=frozenset({"survey"})),
    )
    return Plan("demo-integrated", actions, _DEMO_LOES, _DEMO_POOLS, horizon_ticks)


def demo_weak_plan(horizon_ticks: int = 104) -> Plan:
    """A single modest action; yields few if any significant effects."""
    actions = (
        Action("token-aid", "token aid program", "economic",
               "reconstruction", "economy-north", "investment",
               start_tick=20, duration_ticks=8, intensity=0.3,
               pool_id="aid-fund", rate_per_tick=5.0),
    )
    return Plan("demo-weak", actions, _DEMO_LOES, _DEMO_POOLS, horizon_ticks)


def demo_desired_effects() -> list[DesiredEffect]:
    return [
        DesiredEffect("employment-up", "national_employment", "increase",
                      50.0, 100, instance_id=None),
        DesiredEffect("stability-up", "national_stability", "increase",
                      60.0, 100, instance_id=None),
        DesiredEffect("north-jobs", "employment", "increase", 55.0, 95,
                      instance_id="economy-north"),
        DesiredEffect("militants-down", "militant_influence", "decrease",
                      40.0, 100, instance_id="security-north"),
        DesiredEffect("legitimacy-up", "legitimacy", "increase", 55.0, 100,
                      instance_id="governance-national"),
    ]


def large_scenario(n_instances: int = 50, n_hypotheses: int = 2, seed: int = 7) -> Scenario:
    """A campaign-scale scenario: ``n_instances`` coupled components."""
    rng = np.random.default_rng(seed)
    economy = _economy_template()
    security = _security_template()
    templates = {t.id: t for t in (economy, security)}

    def build(graph_id: str, bias: float):
        instances = []
        for i in range(n_instances):
            tpl = economy if i % 2 == 0 else security
            instances.append(
                instantiate_template(
                    tpl,
                    overrides=[
                        Override("x0", (0,), float(rng.uniform(30, 60))),
                        Override("c", (0,), float(rng.uniform(0.3, 0.9) + bias)),
                    ],
                    region=f"r{i}",
                    instance_id=f"unit-{i:03d}",
                )
            )
        couplings = []
        for i in range(n_instances):
            j = (i + 1) % n_instances
            src = instances[i]
            dst = instances[j]
            out_port = "prosperity" if src.template_id == "economy" else "order"
            in_port = (
                "investment" if dst.template_id == "economy" else "patrols"
            )
            couplings.append(
                Coupling(src.id, out_port, dst.id, in_port, gain=0.01)
            )
        terms = tuple(
            AggregationTerm(inst.id, "employment" if inst.template_id == "economy"
                            else "stability", 1.0 / n_instances)
            for inst in instances
        )
        aggregations = (Aggregation("national_outlook", terms),)
        return compose(templates, instances, couplings, aggregations, graph_id=graph_id)

    hypotheses = tuple(
        SituationHypothesis(f"hypothesis-{h}", build(f"large-{h}", bias=0.1 * h))
        for h in range(n_hypotheses)
    )
    return Scenario("large-campaign", templates, hypotheses)


def large_plan(
    scenario: Scenario,
    n_actions: int = 400,
    plan_id: str = "large-plan",
    horizon_ticks: int = 260,
    seed: int = 11,
) -> Plan:
    """A plan with hundreds of actions against ``scenario``'s first graph."""
    rng = np.random.default_rng(seed)
    graph = scenario.hypotheses[0].graph
    loes = _DEMO_LOES
    pools = (
        ResourcePool("aid-fund", "development agency", 10_000_000.0, "financial"),
        ResourcePool("force-pool", "military", 10_000_000.0, "personnel"),
    )
    actions = []
    for i in range(n_actions):
        inst = graph.instances[int(rng.integers(len(graph.instances)))]
        is_economy = inst.template_id == "economy"
        port = ("investment", "security_pressure")[int(rng.integers(2))] if is_economy \
            else ("patrols", "prosperity_signal")[int(rng.integers(2))]
        start = int(rng.integers(0, horizon_ticks - 20))
        actions.append(
            Action(
                id=f"act-{i:04d}",
                name=f"action {i}",
                instrument="economic" if is_economy else "military",
                line_of_effort=loes[i % len(loes)].name,
                target_instance=inst.id,
                target_port=port,
                start_tick=start,
                duration_ticks=int(rng.integers(4, 21)),
                intensity=float(rng.uniform(0.2, 1.5)),
                pool_id="aid-fund" if is_economy else "force-pool",
                rate_per_tick=float(rng.uniform(1, 10)),
            )
        )
    return Plan(plan_id, tuple(actions), loes, pools, horizon_ticks)
