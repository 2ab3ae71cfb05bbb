"""Component model library and coupled model-graph composition.

Each component is a synchronous discrete-time affine block with saturation:

    x[t+1] = clamp(A @ x[t] + B @ u[t] + c + noise[t], 0, 100)
    y[t]   = C @ x[t]

State variables live on an abstract "level" scale [0, 100].  Components are
instantiated from templates with sparse parameter overrides, wired through
gain couplings, and rolled up from province tier to national tier through
weighted aggregation rules.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field, asdict

LEVEL_MIN = 0.0
LEVEL_MAX = 100.0

COMPONENT_KINDS = (
    "political",
    "military",
    "economic",
    "social",
    "information",
    "infrastructure",
)
POLARITIES = ("favorable-high", "favorable-low")
TIERS = ("province", "national")

SCENARIO_SCHEMA_VERSION = 1

WEIGHT_TOL = 1e-9


class ModelError(ValueError):
    """Raised for structurally invalid model definitions."""


@dataclass(frozen=True)
class LevelVar:
    """A named level variable with a fixed polarity.

    ``polarity`` says which direction is good: "favorable-high" (employment)
    or "favorable-low" (corruption).  Values are clamped into [0, 100].
    """

    name: str
    value: float
    polarity: str = "favorable-high"

    def __post_init__(self):
        if self.polarity not in POLARITIES:
            raise ModelError(f"unknown polarity {self.polarity!r}")
        object.__setattr__(
            self, "value", min(LEVEL_MAX, max(LEVEL_MIN, float(self.value)))
        )


@dataclass(frozen=True)
class ComponentTemplate:
    """A generic, parameterizable component model.

    ``dynamics_a`` is k x k, ``dynamics_b`` k x m, ``bias`` length k,
    ``output_map`` p x k, for k state vars, m input ports, p output ports.
    """

    id: str
    kind: str
    state_vars: tuple[LevelVar, ...]
    input_ports: tuple[str, ...]
    output_ports: tuple[str, ...]
    dynamics_a: tuple[tuple[float, ...], ...]
    dynamics_b: tuple[tuple[float, ...], ...]
    bias: tuple[float, ...]
    output_map: tuple[tuple[float, ...], ...]
    noise_std: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "state_vars", tuple(self.state_vars))
        object.__setattr__(self, "input_ports", tuple(self.input_ports))
        object.__setattr__(self, "output_ports", tuple(self.output_ports))
        object.__setattr__(self, "dynamics_a", _freeze2(self.dynamics_a))
        object.__setattr__(self, "dynamics_b", _freeze2(self.dynamics_b))
        object.__setattr__(self, "bias", tuple(float(v) for v in self.bias))
        object.__setattr__(self, "output_map", _freeze2(self.output_map))
        object.__setattr__(
            self, "noise_std", tuple(float(v) for v in self.noise_std)
        )
        if self.kind not in COMPONENT_KINDS:
            raise ModelError(f"unknown component kind {self.kind!r}")
        k, m, p = len(self.state_vars), len(self.input_ports), len(self.output_ports)
        _check_shape(self.dynamics_a, k, k, f"template {self.id}: A")
        _check_shape(self.dynamics_b, k, m, f"template {self.id}: B")
        if len(self.bias) != k:
            raise ModelError(f"template {self.id}: bias must have {k} entries")
        _check_shape(self.output_map, p, k, f"template {self.id}: C")
        if len(self.noise_std) != k:
            raise ModelError(f"template {self.id}: noiseStd must have {k} entries")
        if any(s < 0 for s in self.noise_std):
            raise ModelError(f"template {self.id}: noiseStd must be nonnegative")
        names = [v.name for v in self.state_vars]
        if len(set(names)) != len(names):
            raise ModelError(f"template {self.id}: duplicate state var names")

    @property
    def k(self) -> int:
        return len(self.state_vars)


# Override targets and the shape they index with.
_OVERRIDE_FIELDS = {
    "A": 2,
    "B": 2,
    "c": 1,
    "noiseStd": 1,
    "x0": 1,
}


@dataclass(frozen=True)
class Override:
    """A sparse override of one template parameter coordinate."""

    field: str
    index: tuple[int, ...]
    value: float

    def __post_init__(self):
        object.__setattr__(self, "index", tuple(int(i) for i in self.index))
        object.__setattr__(self, "value", float(self.value))
        if self.field not in _OVERRIDE_FIELDS:
            raise ModelError(f"unknown override field {self.field!r}")
        if len(self.index) != _OVERRIDE_FIELDS[self.field]:
            raise ModelError(
                f"override on {self.field} needs {_OVERRIDE_FIELDS[self.field]} indices"
            )


@dataclass(frozen=True)
class ComponentInstance:
    id: str
    template_id: str
    overrides: tuple[Override, ...] = ()
    region: str = ""
    tier: str = "province"

    def __post_init__(self):
        object.__setattr__(self, "overrides", tuple(self.overrides))
        if self.tier not in TIERS:
            raise ModelError(f"unknown tier {self.tier!r}")


@dataclass(frozen=True)
class Coupling:
    """Directed signal connection: gain * source output feeds a target input.

    Multiple couplings into one input port sum.
    """

    from_instance: str
    output_port: str
    to_instance: str
    input_port: str
    gain: float = 1.0


@dataclass(frozen=True)
class AggregationTerm:
    instance_id: str
    var_name: str
    weight: float


@dataclass(frozen=True)
class Aggregation:
    """National variable as a weighted sum of province variables."""

    national_var: str
    terms: tuple[AggregationTerm, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))


@dataclass(frozen=True)
class ModelGraph:
    """An immutable wired set of component instances.

    Safe to share across concurrent simulation runs.
    """

    graph_id: str
    templates: dict[str, ComponentTemplate]
    instances: tuple[ComponentInstance, ...]
    couplings: tuple[Coupling, ...]
    aggregations: tuple[Aggregation, ...]

    def template_of(self, instance: ComponentInstance) -> ComponentTemplate:
        return self.templates[instance.template_id]

    def instance(self, instance_id: str) -> ComponentInstance:
        for inst in self.instances:
            if inst.id == instance_id:
                return inst
        raise KeyError(instance_id)


@dataclass(frozen=True)
class SituationHypothesis:
    """One competing modeled view of the situation."""

    name: str
    graph: ModelGraph
    provenance: str = ""


@dataclass(frozen=True)
class Finding:
    level: str  # "error" | "warning"
    code: str
    message: str


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)

    def add_error(self, code: str, message: str) -> None:
        self.findings.append(Finding("error", code, message))

    def add_warning(self, code: str, message: str) -> None:
        self.findings.append(Finding("warning", code, message))

    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.level == "error"]

    def warnings(self) -> list[Finding]:
        return [f for f in self.findings if f.level == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors()

    def extend(self, other: "ValidationReport") -> None:
        self.findings.extend(other.findings)


def _freeze2(rows) -> tuple[tuple[float, ...], ...]:
    return tuple(tuple(float(v) for v in row) for row in rows)


def _check_shape(mat, rows: int, cols: int, what: str) -> None:
    if len(mat) != rows or any(len(r) != cols for r in mat):
        raise ModelError(f"{what} must be {rows}x{cols}")


def instantiate_template(
    template: ComponentTemplate,
    overrides: list[Override] | tuple[Override, ...] = (),
    region: str = "",
    tier: str = "province",
    instance_id: str | None = None,
) -> ComponentInstance:
    """Create an instance of ``template`` with sparse parameter overrides.

    The template itself is never modified.  Override coordinates must exist
    and initial-state overrides must lie in [0, 100].
    """
    for ov in overrides:
        _check_override(template, ov)
    return ComponentInstance(
        id=instance_id or f"{template.id}@{region or 'default'}",
        template_id=template.id,
        overrides=tuple(overrides),
        region=region,
        tier=tier,
    )


def _check_override(template: ComponentTemplate, ov: Override) -> None:
    k, m = template.k, len(template.input_ports)
    shapes = {
        "A": (k, k),
        "B": (k, m),
        "c": (k,),
        "noiseStd": (k,),
        "x0": (k,),
    }
    shape = shapes[ov.field]
    for idx, bound in zip(ov.index, shape):
        if not (0 <= idx < bound):
            raise ModelError(
                f"override {ov.field}{list(ov.index)} out of bounds for "
                f"template {template.id} (shape {shape})"
            )
    if ov.field == "x0" and not (LEVEL_MIN <= ov.value <= LEVEL_MAX):
        raise ModelError(
            f"initial state override {ov.value} outside [{LEVEL_MIN}, {LEVEL_MAX}]"
        )
    if ov.field == "noiseStd" and ov.value < 0:
        raise ModelError("noiseStd override must be nonnegative")


def effective_params(
    template: ComponentTemplate, instance: ComponentInstance
) -> dict:
    """Template parameters with the instance's overrides merged in.

    Returns mutable lists: {"A", "B", "c", "noiseStd", "x0"}.
    """
    params = {
        "A": [list(row) for row in template.dynamics_a],
        "B": [list(row) for row in template.dynamics_b],
        "c": list(template.bias),
        "noiseStd": list(template.noise_std),
        "x0": [v.value for v in template.state_vars],
    }
    for ov in instance.overrides:
        _check_override(template, ov)
        target = params[ov.field]
        if len(ov.index) == 2:
            target[ov.index[0]][ov.index[1]] = ov.value
        else:
            target[ov.index[0]] = ov.value
    return params


def compose(
    templates: dict[str, ComponentTemplate] | list[ComponentTemplate],
    instances: list[ComponentInstance],
    couplings: list[Coupling] = (),
    aggregations: list[Aggregation] = (),
    graph_id: str = "graph",
) -> ModelGraph:
    """Compose instances, couplings and aggregations into a model graph.

    Only duplicate instance ids are rejected here; everything else is
    reported by :func:`validate_graph`.
    """
    if not isinstance(templates, dict):
        templates = {t.id: t for t in templates}
    ids = [inst.id for inst in instances]
    dupes = {i for i in ids if ids.count(i) > 1}
    if dupes:
        raise ModelError(f"duplicate instance ids: {sorted(dupes)}")
    return ModelGraph(
        graph_id=graph_id,
        templates=dict(templates),
        instances=tuple(instances),
        couplings=tuple(couplings),
        aggregations=tuple(aggregations),
    )


def validate_graph(graph: ModelGraph) -> ValidationReport:
    """Structural validation: dangling endpoints, missing templates,
    aggregation weight sums; warnings for unbound input ports (they read 0).
    """
    report = ValidationReport()
    by_id: dict[str, ComponentInstance] = {}
    for inst in graph.instances:
        by_id[inst.id] = inst
        tpl = graph.templates.get(inst.template_id)
        if tpl is None:
            report.add_error(
                "unknown-template",
                f"instance {inst.id} references unknown template {inst.template_id}",
            )
            continue
        try:
            effective_params(tpl, inst)
        except ModelError as exc:
            report.add_error("bad-override", f"instance {inst.id}: {exc}")

    bound_inputs: set[tuple[str, str]] = set()
    for cpl in graph.couplings:
        src = by_id.get(cpl.from_instance)
        dst = by_id.get(cpl.to_instance)
        if src is None:
            report.add_error(
                "dangling-endpoint",
                f"coupling source instance {cpl.from_instance} does not exist",
            )
        elif cpl.from_instance in by_id:
            tpl = graph.templates.get(src.template_id)
            if tpl and cpl.output_port not in tpl.output_ports:
                report.add_error(
                    "dangling-endpoint",
                    f"instance {cpl.from_instance} has no output port "
                    f"{cpl.output_port!r}",
                )
        if dst is None:
            report.add_error(
                "dangling-endpoint",
                f"coupling target instance {cpl.to_instance} does not exist",
            )
        else:
            tpl = graph.templates.get(dst.template_id)
            if tpl and cpl.input_port not in tpl.input_ports:
                report.add_error(
                    "dangling-endpoint",
                    f"instance {cpl.to_instance} has no input port "
                    f"{cpl.input_port!r}",
                )
            else:
                bound_inputs.add((cpl.to_instance, cpl.input_port))

    for inst in graph.instances:
        tpl = graph.templates.get(inst.template_id)
        if tpl is None:
            continue
        for port in tpl.input_ports:
            if (inst.id, port) not in bound_inputs:
                report.add_warning(
                    "unbound-input",
                    f"input port {inst.id}.{port} is unbound (reads 0)",
                )

    seen_nat: set[str] = set()
    for agg in graph.aggregations:
        if agg.national_var in seen_nat:
            report.add_error(
                "duplicate-aggregation",
                f"multiple aggregation rules for {agg.national_var!r}",
            )
        seen_nat.add(agg.national_var)
        total = sum(t.weight for t in agg.terms)
        if abs(total - 1.0) > WEIGHT_TOL:
            report.add_error(
                "aggregation-weight-sum",
                f"aggregation {agg.national_var!r} weights sum to {total}, not 1",
            )
        for term in agg.terms:
            inst = by_id.get(term.instance_id)
            if inst is None:
                report.add_error(
                    "dangling-endpoint",
                    f"aggregation {agg.national_var!r} references unknown "
                    f"instance {term.instance_id}",
                )
                continue
            tpl = graph.templates.get(inst.template_id)
            if tpl and term.var_name not in [v.name for v in tpl.state_vars]:
                report.add_error(
                    "dangling-endpoint",
                    f"aggregation {agg.national_var!r}: instance "
                    f"{term.instance_id} has no state var {term.var_name!r}",
                )
    return report


def aggregate(
    graph: ModelGraph, frame: dict[tuple[str, str], float], national_var: str
) -> float:
    """Weighted roll-up of province values at one tick.

    ``frame`` maps (instance_id, var_name) to the value at that tick.
    """
    for agg in graph.aggregations:
        if agg.national_var == national_var:
            total = 0.0
            for term in agg.terms:
                key = (term.instance_id, term.var_name)
                if key not in frame:
                    raise KeyError(f"missing province value for {key}")
                total += term.weight * frame[key]
            return total
    raise KeyError(f"no aggregation rule for {national_var!r}")


@dataclass(frozen=True)
class Scenario:
    """A scenario document: shared templates plus one or more hypotheses.

    The first hypothesis is the default view used when no hypothesis name is
    given.
    """

    scenario_id: str
    templates: dict[str, ComponentTemplate]
    hypotheses: tuple[SituationHypothesis, ...]

    def __post_init__(self):
        names = [h.name for h in self.hypotheses]
        if len(set(names)) != len(names):
            raise ModelError("hypothesis names must be distinct")

    def hypothesis(self, name: str | None = None) -> SituationHypothesis:
        if not self.hypotheses:
            raise ModelError(f"scenario {self.scenario_id} has no hypotheses")
        if name is None:
            return self.hypotheses[0]
        for hyp in self.hypotheses:
            if hyp.name == name:
                return hyp
        raise KeyError(f"unknown hypothesis {name!r}")


# ---------------------------------------------------------------------------
# Serialization (canonical field ordering, byte-stable round trips)


def template_to_dict(tpl: ComponentTemplate) -> dict:
    return {
        "id": tpl.id,
        "kind": tpl.kind,
        "stateVars": [
            {"name": v.name, "value": v.value, "polarity": v.polarity}
            for v in tpl.state_vars
        ],
        "inputPorts": list(tpl.input_ports),
        "outputPorts": list(tpl.output_ports),
        "A": [list(r) for r in tpl.dynamics_a],
        "B": [list(r) for r in tpl.dynamics_b],
        "c": list(tpl.bias),
        "C": [list(r) for r in tpl.output_map],
        "noiseStd": list(tpl.noise_std),
    }


def template_from_dict(d: dict) -> ComponentTemplate:
    return ComponentTemplate(
        id=d["id"],
        kind=d["kind"],
        state_vars=tuple(
            LevelVar(v["name"], v["value"], v.get("polarity", "favorable-high"))
            for v in d["stateVars"]
        ),
        input_ports=tuple(d["inputPorts"]),
        output_ports=tuple(d["outputPorts"]),
        dynamics_a=d["A"],
        dynamics_b=d["B"],
        bias=d["c"],
        output_map=d["C"],
        noise_std=d["noiseStd"],
    )


def instance_to_dict(inst: ComponentInstance) -> dict:
    return {
        "id": inst.id,
        "template": inst.template_id,
        "overrides": [
            {"field": ov.field, "index": list(ov.index), "value": ov.value}
            for ov in inst.overrides
        ],
        "region": inst.region,
        "tier": inst.tier,
    }


def instance_from_dict(d: dict) -> ComponentInstance:
    return ComponentInstance(
        id=d["id"],
        template_id=d["template"],
        overrides=tuple(
            Override(ov["field"], tuple(ov["index"]), ov["value"])
            for ov in d.get("overrides", [])
        ),
        region=d.get("region", ""),
        tier=d.get("tier", "province"),
    )


def graph_to_dict(graph: ModelGraph) -> dict:
    return {
        "id": graph.graph_id,
        "instances": [instance_to_dict(i) for i in graph.instances],
        "couplings": [
            {
                "from": c.from_instance,
                "outputPort": c.output_port,
                "to": c.to_instance,
                "inputPort": c.input_port,
                "gain": c.gain,
            }
            for c in graph.couplings
        ],
        "aggregations": [
            {
                "nationalVar": a.national_var,
                "terms": [
                    {
                        "instance": t.instance_id,
                        "var": t.var_name,
                        "weight": t.weight,
                    }
                    for t in a.terms
                ],
            }
            for a in graph.aggregations
        ],
    }


def graph_from_dict(d: dict, templates: dict[str, ComponentTemplate]) -> ModelGraph:
    return ModelGraph(
        graph_id=d.get("id", "graph"),
        templates=templates,
        instances=tuple(instance_from_dict(i) for i in d.get("instances", [])),
        couplings=tuple(
            Coupling(
                from_instance=c["from"],
                output_port=c["outputPort"],
                to_instance=c["to"],
                input_port=c["inputPort"],
                gain=c.get("gain", 1.0),
            )
            for c in d.get("couplings", [])
        ),
        aggregations=tuple(
            Aggregation(
                national_var=a["nationalVar"],
                terms=tuple(
                    AggregationTerm(t["instance"], t["var"], t["weight"])
                    for t in a["terms"]
                ),
            )
            for a in d.get("aggregations", [])
        ),
    )


def scenario_to_dict(scn: Scenario) -> dict:
    return {
        "schemaVersion": SCENARIO_SCHEMA_VERSION,
        "id": scn.scenario_id,
        "templates": [template_to_dict(t) for t in scn.templates.values()],
        "hypotheses": [
            {
                "name": h.name,
                "provenance": h.provenance,
                "graph": graph_to_dict(h.graph),
            }
            for h in scn.hypotheses
        ],
    }


def scenario_from_dict(d: dict) -> Scenario:
    version = d.get("schemaVersion")
    if version != SCENARIO_SCHEMA_VERSION:
        raise ModelError(f"unsupported scenario schemaVersion {version!r}")
    templates = {t["id"]: template_from_dict(t) for t in d.get("templates", [])}
    hypotheses = tuple(
        SituationHypothesis(
            name=h["name"],
            graph=graph_from_dict(h["graph"], templates),
            provenance=h.get("provenance", ""),
        )
        for h in d.get("hypotheses", [])
    )
    return Scenario(
        scenario_id=d.get("id", "scenario"),
        templates=templates,
        hypotheses=hypotheses,
    )


def dumps_canonical(payload: dict) -> str:
    """Deterministic JSON text: declared key order, fixed separators."""
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def scenario_to_json(scn: Scenario) -> str:
    return dumps_canonical(scenario_to_dict(scn))


def scenario_from_json(text: str) -> Scenario:
    return scenario_from_dict(json.loads(text))
