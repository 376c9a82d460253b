"""Well-formedness rules and the diagnostics engine.

Each rule is a function registered under a stable code. ``validate_spec`` runs
the whole catalog and returns diagnostics sorted by (severity, code, subject).
"""

from __future__ import annotations

import json
from collections.abc import Callable, Iterable, Iterator
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

from .linkmodel import check_link
from .metamodel import (
    Activity,
    ActivityRef,
    DegreeVector,
    ElementKind,
    ElementRef,
    EventExec,
    Gateway,
    GatewayBehavior,
    GatewayExec,
    LinkType,
    MesSpec,
    ProcessModel,
    SignalRef,
    TsKind,
    ViewTag,
)


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"
    LINT = "lint"

    @property
    def rank(self) -> int:
        return _SEVERITY_RANK[self]


_SEVERITY_RANK = {Severity.ERROR: 0, Severity.WARNING: 1, Severity.LINT: 2}


@dataclass(frozen=True)
class Rule:
    code: str
    severity: Severity
    summary: str


_E, _W, _L = Severity.ERROR, Severity.WARNING, Severity.LINT

RULES: dict[str, Rule] = {
    r.code: r
    for r in (
        Rule("W-SPEC-01", _E, "specification must hold exactly one MES, PP, TS and link model"),
        Rule("W-TS-01", _E, "technical system needs at least one area, unit and signal"),
        Rule("W-TS-02", _E, "signals must be children of units"),
        Rule("W-TS-03", _E, "technical system hierarchy must be a tree rooted at the plant"),
        Rule("W-PP-01", _E, "process model needs at least 3 flow objects"),
        Rule("W-PP-02", _E, "process model needs at least 2 events"),
        Rule("W-PP-03", _E, "process model needs at least 2 connecting objects"),
        Rule("W-PP-04", _E, "process model needs at least one activity"),
        Rule("W-MES-01", _E, "MES model needs at least one pool and one lane"),
        Rule("W-GW-01", _E, "exclusive/parallel split: 1 incoming, >= 2 outgoing sequence flows"),
        Rule("W-GW-02", _E, "inclusive split: 1 incoming, >= 3 outgoing sequence flows"),
        Rule("W-GW-03", _E, "merge: >= 2 incoming, 1 outgoing sequence flow"),
        Rule("W-GW-04", _E, "gateways carry no message or data flows"),
        Rule("W-REF-01", _E, "reference target must exist and be of the referenced kind"),
        Rule("W-REF-02", _E, "activity reference must target the other process model"),
        Rule("W-REF-03", _E, "reference name must equal its target's name"),
        Rule("W-REF-04", _W, "reference element without an equivalence link"),
        Rule("W-LK-01", _E, "gateways, connecting objects, link events and annotations are not linkable"),
        Rule("W-LK-02", _E, "links connect elements of different views"),
        Rule("W-LK-03", _E, "illegal data transfer endpoint"),
        Rule("W-LK-04", _E, "illegal equivalence endpoints"),
        Rule("W-LK-05", _E, "equivalent elements must have the same name"),
        Rule("W-LK-06", _E, "illegal deployment direction or target"),
        Rule("W-LK-07", _W, "link model is empty"),
        Rule("W-SUB-01", _E, "subprocess containment cycle"),
        Rule("L-ACT-01", _L, "declared degree counts differ from computed counts"),
        Rule("L-PP-01", _L, "diagram lacks a start or stop event"),
    )
}

Subject = Union[ElementRef, str]


@dataclass(frozen=True)
class Diagnostic:
    rule: str
    severity: Severity
    subject: Subject
    message: str
    related: Optional[ElementRef] = None

    @property
    def subject_id(self) -> str:
        return self.subject.id if isinstance(self.subject, ElementRef) else self.subject

    def sort_key(self) -> tuple:
        return (self.severity.rank, self.rule, self.subject_id, self.message)

    def render(self) -> str:
        return f"{self.severity.name} {self.rule} {self.subject}: {self.message}"

    def to_dict(self) -> dict:
        out = {
            "rule": self.rule,
            "severity": self.severity.value,
            "subject": str(self.subject),
            "message": self.message,
        }
        if self.related is not None:
            out["related"] = str(self.related)
        return out


def diagnostic(code: str, subject: Subject, message: str, related: Optional[ElementRef] = None) -> Diagnostic:
    return Diagnostic(code, RULES[code].severity, subject, message, related)


RuleFn = Callable[[MesSpec], Iterable[Diagnostic]]
_CHECKS: list[RuleFn] = []


def _check(fn: RuleFn) -> RuleFn:
    _CHECKS.append(fn)
    return fn


def _process_models(spec: MesSpec) -> Iterator[ProcessModel]:
    for model in (spec.mes_model, spec.pp_model):
        if model is not None and model.role in (ViewTag.MES, ViewTag.PP):
            yield model


# -- specification / technical system ----------------------------------------


def _submodels_in_place(spec: MesSpec) -> bool:
    return (spec.ts_model is not None
            and spec.mes_model is not None and spec.mes_model.role is ViewTag.MES
            and spec.pp_model is not None and spec.pp_model.role is ViewTag.PP)


@_check
def check_submodels(spec: MesSpec) -> Iterator[Diagnostic]:
    for field_name, view in (("mes_model", ViewTag.MES), ("pp_model", ViewTag.PP)):
        model = getattr(spec, field_name)
        if model is None:
            yield diagnostic("W-SPEC-01", "spec", f"missing {view.name} model")
        elif model.role is not view:
            yield diagnostic("W-SPEC-01", "spec",
                             f"{view.name} slot holds a {model.role.name} model (duplicated {model.role.name} model)")
    if spec.ts_model is None:
        yield diagnostic("W-SPEC-01", "spec", "missing TS model")
    if spec.link_model is None:
        yield diagnostic("W-SPEC-01", "spec", "missing link model")


@_check
def check_technical_system(spec: MesSpec) -> Iterator[Diagnostic]:
    ts = spec.ts_model
    if ts is None:
        return
    counts = {TsKind.AREA: 0, TsKind.UNIT: 0, TsKind.SIGNAL: 0}
    seen: set[str] = set()
    root = ts.root
    if root.kind is not TsKind.PLANT:
        yield diagnostic("W-TS-03", ElementRef(ViewTag.TS, root.id), f"root node is a {root.kind.value}, not a plant")
    for parent, node, _ in root.walk():
        ref = ElementRef(ViewTag.TS, node.id)
        if node.kind in counts:
            counts[node.kind] += 1
        if node.id in seen:
            yield diagnostic("W-TS-03", ref, f"node {node.id!r} appears more than once (cycle or multiple parents)")
        seen.add(node.id)
        if parent is not None and node.kind is TsKind.PLANT:
            yield diagnostic("W-TS-03", ref, "plant may only appear at the root")
        if node.kind is TsKind.SIGNAL:
            if parent is None or parent.kind is not TsKind.UNIT:
                where = parent.kind.value if parent is not None else "no parent"
                yield diagnostic("W-TS-02", ref, f"signal {node.name!r} sits under {where}, not a unit")
            if node.children:
                yield diagnostic("W-TS-03", ref, f"signal {node.name!r} has child nodes")
    for kind, n in counts.items():
        if n == 0:
            yield diagnostic("W-TS-01", "ts", f"no {kind.value} nodes")


# -- process model cardinalities ---------------------------------------------


@_check
def check_cardinalities(spec: MesSpec) -> Iterator[Diagnostic]:
    for model in _process_models(spec):
        top = model.content
        where = model.role.value
        if top.flow_object_count < 3:
            # subsumes the activity and event minima
            yield diagnostic("W-PP-01", where, f"{top.flow_object_count} flow objects, need >= 3")
        else:
            if not top.activities:
                yield diagnostic("W-PP-04", where, "no activities")
            if len(top.events) < 2:
                yield diagnostic("W-PP-02", where, f"{len(top.events)} events, need >= 2")
        if len(top.flows) < 2:
            yield diagnostic("W-PP-03", where, f"{len(top.flows)} connecting objects, need >= 2")
        if model.role is ViewTag.MES:
            n_pools, n_lanes = len(model.pools), len(model.lanes)
            if n_pools < 1 or n_lanes < 1:
                yield diagnostic("W-MES-01", where, f"{n_pools} pools and {n_lanes} lanes, need >= 1 each")


# -- gateways -----------------------------------------------------------------


def gateway_arity_rule(exec_type: GatewayExec, behavior: GatewayBehavior, in_sf: int, out_sf: int) -> Optional[str]:
    """Code of the violated arity rule, or None."""
    if behavior is GatewayBehavior.MERGE:
        return None if in_sf >= 2 and out_sf == 1 else "W-GW-03"
    if exec_type is GatewayExec.INCLUSIVE:
        return None if in_sf == 1 and out_sf >= 3 else "W-GW-02"
    return None if in_sf == 1 and out_sf >= 2 else "W-GW-01"


def _gateway_diagnostics(g: Gateway, view: ViewTag, d: DegreeVector) -> list[Diagnostic]:
    ref = ElementRef(view, g.id)
    out = []
    code = gateway_arity_rule(g.exec_type, g.behavior, d.in_sf, d.out_sf)
    if code is not None:
        out.append(diagnostic(
            code, ref,
            f"{g.exec_type.value} {g.behavior.value} gateway has {d.in_sf} incoming and "
            f"{d.out_sf} outgoing sequence flows",
        ))
    if d.information_flows:
        out.append(diagnostic(
            "W-GW-04", ref,
            f"gateway has {d.in_mf + d.out_mf} message flows and {d.in_df + d.out_df} data flows",
        ))
    return out


def check_gateway(g: Union[Gateway, ElementRef, str], spec: MesSpec) -> list[Diagnostic]:
    """Arity and information-flow rules for one gateway."""
    ident = g.id if isinstance(g, (Gateway, ElementRef)) else g
    entry = spec.index.resolve(g if isinstance(g, ElementRef) else ident)
    if entry.kind is not ElementKind.GATEWAY:
        raise ValueError(f"{ident!r} is a {entry.kind.value}, not a gateway")
    return _gateway_diagnostics(entry.element, entry.view, spec.index.degrees(ident))


@_check
def check_gateways(spec: MesSpec) -> Iterator[Diagnostic]:
    index = spec.index
    for model in _process_models(spec):
        for _, diagram, _ in model.diagrams():
            for g in diagram.gateways:
                yield from _gateway_diagnostics(g, model.role, index.degrees(g.id))


# -- reference elements -------------------------------------------------------


def _equivalence_endpoints(spec: MesSpec) -> set[str]:
    ends = set()
    for link in spec.links:
        if link.link_type is LinkType.EQUIVALENCE:
            ends.add(link.source.id)
            ends.add(link.target.id)
    return ends


def check_references(model: ProcessModel, spec: MesSpec,
                     linked: Optional[set[str]] = None) -> list[Diagnostic]:
    """Reference-element rules for every reference in ``model``, nested diagrams included."""
    index = spec.index
    if linked is None:
        linked = _equivalence_endpoints(spec)
    out: list[Diagnostic] = []
    view = model.role
    for _, diagram, _ in model.diagrams():
        refs: list[Union[ActivityRef, SignalRef]] = [*diagram.activity_refs, *diagram.signal_refs]
        for r in refs:
            ref = ElementRef(view, r.id)
            is_activity_ref = isinstance(r, ActivityRef)
            wanted = ElementKind.ACTIVITY if is_activity_ref else ElementKind.SIGNAL
            target = index.get(r.target)
            if target is None or target.kind is not wanted:
                found = "nothing" if target is None else f"a {target.kind.value}"
                out.append(diagnostic("W-REF-01", ref, f"target {r.target!r} is {found}, expected {wanted.value}"))
                continue
            related = target.ref
            if is_activity_ref and target.view in (view, ViewTag.TS):
                out.append(diagnostic("W-REF-02", ref,
                                      f"target {r.target!r} lies in the {target.view.name} model, "
                                      f"expected the other process model", related))
            if r.name != target.name:
                out.append(diagnostic("W-REF-03", ref,
                                      f"named {r.name!r} but its target is named {target.name!r}", related))
            if r.id not in linked:
                out.append(diagnostic("W-REF-04", ref, "no equivalence link attaches to this reference", related))
    return out


@_check
def check_all_references(spec: MesSpec) -> Iterator[Diagnostic]:
    linked = _equivalence_endpoints(spec)
    for model in _process_models(spec):
        yield from check_references(model, spec, linked)


# -- links --------------------------------------------------------------------


@_check
def check_links(spec: MesSpec) -> Iterator[Diagnostic]:
    if spec.link_model is None or not _submodels_in_place(spec):
        return  # endpoints cannot be resolved; W-SPEC-01 already reports why
    if not spec.links:
        yield diagnostic("W-LK-07", "links", "the link model contains no links")
        return
    for link in spec.links:
        verdict = check_link(link, spec)
        if not verdict:
            yield diagnostic(verdict.rule, f"link:{link.id}", verdict.reason, link.source)


# -- subprocesses and lints ---------------------------------------------------


def _contained_activity_ids(activity: Activity) -> Iterator[str]:
    stack = [activity.subprocess] if activity.subprocess is not None else []
    while stack:
        diagram = stack.pop()
        for a in diagram.activities:
            yield a.id
            if a.subprocess is not None:
                stack.append(a.subprocess)


@_check
def check_subprocess_cycles(spec: MesSpec) -> Iterator[Diagnostic]:
    for model in _process_models(spec):
        for activity in model.all_activities():
            if activity.subprocess is None:
                continue
            if any(i == activity.id for i in _contained_activity_ids(activity)):
                yield diagnostic("W-SUB-01", ElementRef(model.role, activity.id),
                                 f"subprocess of {activity.name!r} contains the activity itself")


@_check
def check_declared_degrees(spec: MesSpec) -> Iterator[Diagnostic]:
    index = spec.index
    for model in _process_models(spec):
        for _, diagram, _ in model.diagrams():
            for element in (*diagram.activities, *diagram.gateways):
                declared = element.declared_degrees
                if declared is None:
                    continue
                computed = index.degrees(element.id)
                if declared != computed:
                    yield diagnostic("L-ACT-01", ElementRef(model.role, element.id),
                                     f"declared {declared.as_tuple()} but computed {computed.as_tuple()}")


def diagram_path_label(view: ViewTag, path: tuple[str, ...]) -> str:
    return "/".join((view.value, *path))


@_check
def check_start_stop(spec: MesSpec) -> Iterator[Diagnostic]:
    for model in _process_models(spec):
        for path, diagram, _ in model.diagrams():
            kinds = {e.exec_type for e in diagram.events}
            missing = [k.value for k in (EventExec.START, EventExec.STOP) if k not in kinds]
            if missing:
                yield diagnostic("L-PP-01", diagram_path_label(model.role, path),
                                 f"diagram lacks a {' and a '.join(missing)} event")


# -- engine ---------------------------------------------------------------------


def validate_spec(spec: MesSpec, rules: Optional[Iterable[str]] = None) -> list[Diagnostic]:
    """Run every rule; optionally keep only the listed codes."""
    found: list[Diagnostic] = []
    for check in _CHECKS:
        found.extend(check(spec))
    if rules is not None:
        keep = set(rules)
        unknown = keep - RULES.keys()
        if unknown:
            raise ValueError(f"unknown rule codes: {', '.join(sorted(unknown))}")
        found = [d for d in found if d.rule in keep]
    found.sort(key=Diagnostic.sort_key)
    return found


def worst_severity(diagnostics: Iterable[Diagnostic]) -> Optional[Severity]:
    ranks = [d.severity.rank for d in diagnostics]
    if not ranks:
        return None
    return next(s for s, r in _SEVERITY_RANK.items() if r == min(ranks))


def errors_only(diagnostics: Iterable[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diagnostics if d.severity is Severity.ERROR]


def render_text(diagnostics: Iterable[Diagnostic]) -> str:
    return "".join(d.render() + "\n" for d in diagnostics)


def render_structured(diagnostics: list[Diagnostic]) -> str:
    counts = {s.value: sum(1 for d in diagnostics if d.severity is s) for s in Severity}
    payload = {"diagnostics": [d.to_dict() for d in diagnostics], "counts": counts}
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
