"""Derived views of a spec: requirement status, model statistics, diagram tree and exports."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .linker import DeploymentMap, EquivalencePair, InterfaceEntry
from .metamodel import (
    Activity,
    Diagram,
    EventExec,
    ExecType,
    FlowKind,
    GatewayExec,
    MesmlError,
    MesSpec,
    ProcessModel,
    ReqStatus,
    Repetition,
    TsNode,
    UnsupportedKind,
    ViewTag,
)

PROCESS_VIEWS = (ViewTag.MES, ViewTag.PP)


class UnknownDiagram(MesmlError, LookupError):
    pass


def _process_model(spec: MesSpec, view: ViewTag) -> ProcessModel:
    if view is ViewTag.TS:
        raise UnsupportedKind("the TS view has no process diagrams; use the TS hierarchy directly")
    model = spec.process_model(view)
    if model is None:
        raise MesmlError(f"spec has no {view.name} model")
    return model


# -- requirement status ---------------------------------------------------------


@dataclass(frozen=True)
class StatusReport:
    # view -> status -> activities sorted by id
    partitions: dict[ViewTag, dict[ReqStatus, tuple[Activity, ...]]]

    def counts(self, view: ViewTag) -> tuple[int, int, int]:
        part = self.partitions[view]
        return tuple(len(part[s]) for s in ReqStatus)

    def total(self, view: ViewTag) -> int:
        return sum(self.counts(view))

    def to_dict(self) -> dict:
        return {
            view.value: {
                status.value: [{"id": a.id, "name": a.name} for a in acts]
                for status, acts in part.items()
            }
            for view, part in self.partitions.items()
        }

    def render_text(self) -> str:
        lines = [f"{'model':<6}{'to_implement':>14}{'implemented':>13}{'excluded':>10}{'total':>7}"]
        for view in self.partitions:
            ti, im, ex = self.counts(view)
            lines.append(f"{view.name:<6}{ti:>14}{im:>13}{ex:>10}{ti + im + ex:>7}")
        for view, part in self.partitions.items():
            for status, acts in part.items():
                if acts:
                    lines.append("")
                    lines.append(f"{view.name} {status.value}:")
                    lines.extend(f"  {a.id}  {a.name}" for a in acts)
        return "\n".join(lines) + "\n"


def status_report(spec: MesSpec) -> StatusReport:
    partitions = {}
    for view in PROCESS_VIEWS:
        model = spec.process_model(view)
        buckets: dict[ReqStatus, list[Activity]] = {s: [] for s in ReqStatus}
        if model is not None:
            for activity in model.all_activities():
                buckets[activity.status].append(activity)
        partitions[view] = {s: tuple(sorted(acts, key=lambda a: a.id)) for s, acts in buckets.items()}
    return StatusReport(partitions)


# -- statistics -----------------------------------------------------------------


@dataclass(frozen=True)
class DiagramStats:
    path: str
    level: int
    activities: int
    elements: int

    @property
    def others(self) -> int:
        return self.elements - self.activities


@dataclass(frozen=True)
class ViewStats:
    view: ViewTag
    diagrams: tuple[DiagramStats, ...]

    @property
    def diagram_count(self) -> int:
        return len(self.diagrams)

    @property
    def activities(self) -> int:
        return sum(d.activities for d in self.diagrams)

    @property
    def elements(self) -> int:
        return sum(d.elements for d in self.diagrams)

    @property
    def others(self) -> int:
        return self.elements - self.activities


@dataclass(frozen=True)
class ModelStats:
    views: tuple[ViewStats, ...]

    def view(self, view: ViewTag) -> ViewStats:
        return next(v for v in self.views if v.view is view)

    @property
    def diagram_count(self) -> int:
        return sum(v.diagram_count for v in self.views)

    @property
    def activities(self) -> int:
        return sum(v.activities for v in self.views)

    @property
    def elements(self) -> int:
        return sum(v.elements for v in self.views)

    def to_dict(self) -> dict:
        return {
            "views": {
                v.view.value: {
                    "diagrams": v.diagram_count,
                    "activities": v.activities,
                    "other_elements": v.others,
                    "per_diagram": [
                        {"path": d.path, "level": d.level, "activities": d.activities, "other_elements": d.others}
                        for d in v.diagrams
                    ],
                }
                for v in self.views
            },
            "totals": {
                "diagrams": self.diagram_count,
                "activities": self.activities,
                "other_elements": self.elements - self.activities,
            },
        }

    def render_text(self) -> str:
        lines = ["view  diagrams (activities; all other elements)"]
        for v in self.views:
            lines.append(f"{v.view.name:<6}{v.diagram_count} ({v.activities}; {v.others})")
        lines.append(f"{'total':<6}{self.diagram_count} ({self.activities}; {self.elements - self.activities})")
        for v in self.views:
            lines.append("")
            lines.append(f"{v.view.name} diagrams:")
            for d in v.diagrams:
                lines.append(f"  L{d.level} {d.path} ({d.activities}; {d.others})")
        return "\n".join(lines) + "\n"


def _path_label(model: ProcessModel, path: tuple[str, ...]) -> str:
    return "/".join((model.role.value, *path))


def model_stats(spec: MesSpec) -> ModelStats:
    """Per-view counts shaped as diagrams (activities; all other elements)."""
    views = []
    for view in PROCESS_VIEWS:
        model = spec.process_model(view)
        diagrams = []
        if model is not None:
            for path, diagram, _ in model.diagrams():
                elements = diagram.element_count
                if not path:
                    elements += len(model.pools) + len(model.lanes)
                diagrams.append(DiagramStats(_path_label(model, path), len(path), len(diagram.activities), elements))
        views.append(ViewStats(view, tuple(sorted(diagrams, key=lambda d: d.path))))
    ts_nodes = sum(1 for _ in spec.ts_model.nodes()) if spec.ts_model is not None else 0
    views.append(ViewStats(ViewTag.TS, (DiagramStats("ts", 0, 0, ts_nodes),) if spec.ts_model else ()))
    return ModelStats(tuple(views))


# -- diagram tree -----------------------------------------------------------------


@dataclass(frozen=True)
class DiagramNode:
    view: ViewTag
    path: tuple[str, ...]
    title: str
    level: int
    callable: bool = False
    children: tuple["DiagramNode", ...] = field(default=())

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()

    def render(self, indent: str = "  ") -> str:
        lines = []
        for node in self.walk():
            tag = " (callable)" if node.callable else ""
            lines.append(f"{indent * node.level}L{node.level} {node.title}{tag}")
        return "\n".join(lines) + "\n"


def _is_callable(activity: Activity, spec: MesSpec) -> bool:
    d = spec.index.degrees(activity.id)
    return d.in_sf == 0 and d.out_sf == 0


def _tree(spec: MesSpec, view: ViewTag, diagram: Diagram, path: tuple[str, ...],
          title: str, is_callable: bool) -> DiagramNode:
    children = tuple(
        _tree(spec, view, a.subprocess, path + (a.id,), a.name, _is_callable(a, spec))
        for a in diagram.activities
        if a.subprocess is not None
    )
    return DiagramNode(view, path, title, len(path), is_callable, children)


def diagram_tree(spec: MesSpec, view: ViewTag) -> DiagramNode:
    """Diagram hierarchy of a process view; subprocess activities outside the sequence flow are callable."""
    model = _process_model(spec, view)
    return _tree(spec, view, model.content, (), f"{view.name} level 0", False)


def resolve_diagram(spec: MesSpec, view: ViewTag, path: Optional[str]) -> tuple[tuple[str, ...], Diagram]:
    """Resolve ``"A/B"`` (activity ids or names) to a diagram. Empty path means the top level."""
    model = _process_model(spec, view)
    diagram = model.content
    ids: tuple[str, ...] = ()
    if not path:
        return ids, diagram
    for segment in path.split("/"):
        segment = segment.strip()
        if not segment:
            continue
        candidates = [a for a in diagram.activities if a.subprocess is not None and a.id == segment]
        if not candidates:
            candidates = [a for a in diagram.activities if a.subprocess is not None and a.name == segment]
        if len(candidates) != 1:
            problem = "no" if not candidates else "ambiguous"
            raise UnknownDiagram(f"{problem} subprocess {segment!r} under {'/'.join((view.value, *ids))}")
        ids += (candidates[0].id,)
        diagram = candidates[0].subprocess
    return ids, diagram


# -- DOT export ---------------------------------------------------------------------

FILL = {ViewTag.PP: "gray85", ViewTag.MES: "white"}
GATEWAY_GLYPH = {GatewayExec.EXCLUSIVE: "X", GatewayExec.INCLUSIVE: "O", GatewayExec.PARALLEL: "+"}
EDGE_STYLE = {
    FlowKind.SEQUENCE: "style=solid",
    FlowKind.MESSAGE: "style=dashed, arrowhead=empty",
    FlowKind.DATA: "style=dotted",
    FlowKind.ASSOCIATION: "style=dotted, arrowhead=none",
}
REPETITION_MARK = {Repetition.SEQUENTIAL: "[seq]", Repetition.PARALLEL: "[par]"}


def _q(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return f'"{escaped}"'


def _comment(text: str) -> str:
    return " ".join(text.split())


def _activity_label(name: str, exec_type: ExecType, repetition: Repetition = Repetition.NONE,
                    subprocess: bool = False) -> str:
    marks = []
    if exec_type is not ExecType.UNDEFINED:
        marks.append(f"[{exec_type.value}]")
    if repetition in REPETITION_MARK:
        marks.append(REPETITION_MARK[repetition])
    if subprocess:
        marks.append("[+]")
    return name + ("\n" + " ".join(marks) if marks else "")


def _node_lines(spec: MesSpec, view: ViewTag, diagram: Diagram) -> dict[str, str]:
    fill = FILL[view]
    index = spec.index
    nodes: dict[str, str] = {}
    for a in diagram.activities:
        label = _activity_label(a.name, a.exec_type, a.repetition, a.subprocess is not None)
        nodes[a.id] = f'shape=box, style="rounded,filled", fillcolor={fill}, label={_q(label)}'
    for e in diagram.events:
        shape = "doublecircle" if e.exec_type is EventExec.STOP else "circle"
        style = "dashed,filled" if e.exec_type is EventExec.INTERMEDIATE_NON_INTERRUPTING else "filled"
        label = e.name or ""
        if e.behavior is not None:
            label = f"{label}\n({e.behavior.value})" if label else f"({e.behavior.value})"
        nodes[e.id] = f'shape={shape}, style="{style}", fillcolor={fill}, label={_q(label)}'
    for g in diagram.gateways:
        nodes[g.id] = (f'shape=diamond, style=filled, fillcolor={fill}, '
                       f'label={_q(GATEWAY_GLYPH[g.exec_type])}, tooltip={_q(g.behavior.value)}')
    for r in diagram.activity_refs:
        target = index.get(r.target)
        # a reference looks like its original element
        ref_fill = FILL.get(target.view, fill) if target is not None else fill
        exec_type = getattr(target.element, "exec_type", None) if target is not None else None
        label = _activity_label(r.name, exec_type) if exec_type is not None else r.name
        nodes[r.id] = f'shape=box, style="rounded,filled,bold", fillcolor={ref_fill}, label={_q(label)}'
    for s in diagram.signal_refs:
        nodes[s.id] = f'shape=parallelogram, style=filled, fillcolor={fill}, label={_q(s.name)}'
    for d in diagram.data_objects:
        mark = {"single": "", "multi": "\n|||", "store": "\n(store)"}[d.kind.value]
        nodes[d.id] = f'shape=note, style=filled, fillcolor={fill}, label={_q(d.name + mark)}'
    for t in diagram.annotations:
        nodes[t.id] = f'shape=plaintext, label={_q(t.text)}'
    return nodes


def export_dot(spec: MesSpec, view: ViewTag, diagram: Optional[str] = None) -> str:
    """DOT text for one process diagram (the top level unless ``diagram`` names a subprocess path)."""
    model = _process_model(spec, view)
    path, content = resolve_diagram(spec, view, diagram)
    title = "/".join((view.value, *path))
    nodes = _node_lines(spec, view, content)
    out = [f"digraph {_q(title)} {{"]
    out.append(f"  graph [rankdir=LR, labelloc=t, label={_q(title)}];")
    out.append('  node [fontname="Helvetica"];')

    placed: set[str] = set()
    if view is ViewTag.MES:
        assigned: dict[str, list[str]] = {}
        for a in content.activities:
            if a.lane is not None:
                assigned.setdefault(a.lane, []).append(a.id)
        pools = [p for p in model.pools_by_rank()
                 if not path or p.id in assigned or any(l.id in assigned for l in p.lanes)]
        for pool in pools:
            out.append(f"  subgraph {_q('cluster_' + pool.id)} {{")
            out.append(f"    label={_q(pool.name)}; style=solid;")
            lanes = sorted(enumerate(pool.lanes), key=lambda il: (il[1].rank, il[0]))
            for _, lane in lanes:
                if path and lane.id not in assigned:
                    continue
                out.append(f"    subgraph {_q('cluster_' + lane.id)} {{")
                out.append(f"      label={_q(lane.name)}; style=dashed;")
                for node_id in assigned.get(lane.id, []):
                    out.append(f"      {_q(node_id)} [{nodes[node_id]}];")
                    placed.add(node_id)
                out.append("    }")
            for node_id in assigned.get(pool.id, []):
                out.append(f"    {_q(node_id)} [{nodes[node_id]}];")
                placed.add(node_id)
            out.append("  }")

    for node_id in sorted(nodes):
        if node_id not in placed:
            out.append(f"  {_q(node_id)} [{nodes[node_id]}];")
    for flow in content.flows:
        out.append(f"  {_q(flow.source)} -> {_q(flow.target)} [{EDGE_STYLE[flow.kind]}];  // {_comment(flow.id)}")
    for group in content.groups:
        out.append(f"  // group {_comment(group.id)}: {_comment(' '.join(group.members))}")

    local = set(nodes) | {g.id for g in content.groups}
    if view is ViewTag.MES and not path:
        local |= {p.id for p in model.pools} | {l.id for l in model.lanes}
    for link in spec.links:
        if link.source.id in local or link.target.id in local:
            connector = f" via {link.connector}" if link.connector is not None else ""
            out.append("  // " + _comment(f"link {link.id} {link.link_type.value} "
                                          f"{link.source} -> {link.target}{connector}"))
    out.append("}")
    return "\n".join(out) + "\n"


def render_ts_tree(spec: MesSpec, indent: str = "  ") -> str:
    """Indented listing of the technical system hierarchy."""
    if spec.ts_model is None:
        raise MesmlError("spec has no TS model")
    lines = []
    for _, node, depth in spec.ts_model.root.walk():
        lines.append(f"{indent * depth}{node.name} ({node.kind.value}) [{node.id}]{_attrs(node)}")
    return "\n".join(lines) + "\n"


def _attrs(node: TsNode) -> str:
    if not node.attrs:
        return ""
    return " {" + ", ".join(f"{k}={v}" for k, v in node.attrs) + "}"


# -- link reports -------------------------------------------------------------------


def render_equivalences(pairs: list[EquivalencePair]) -> str:
    lines = ["link  original  reference"]
    lines.extend(f"{p.link}  {p.original}  {p.reference}" for p in pairs)
    return "\n".join(lines) + "\n"


def render_deployments(dmap: DeploymentMap) -> str:
    lines = ["ts_target  process_element  link"]
    lines.extend(f"{e.ts_target}  {e.process_element}  {e.link}" for e in dmap.entries)
    return "\n".join(lines) + "\n"


def render_interfaces(entries: list[InterfaceEntry]) -> str:
    lines = ["link  connector  source  target"]
    lines.extend(f"{e.link}  {e.connector if e.connector is not None else '-'}  {e.source}  {e.target}"
                 for e in entries)
    return "\n".join(lines) + "\n"


def equivalences_to_list(pairs: list[EquivalencePair]) -> list[dict]:
    return [{"link": p.link, "original": str(p.original), "reference": str(p.reference)} for p in pairs]


def deployments_to_list(dmap: DeploymentMap) -> list[dict]:
    return [
        {"link": e.link, "process_element": str(e.process_element), "ts_target": str(e.ts_target)}
        for e in dmap.entries
    ]


def interfaces_to_list(entries: list[InterfaceEntry]) -> list[dict]:
    return [
        {
            "link": e.link,
            "connector": str(e.connector) if e.connector is not None else None,
            "source": str(e.source),
            "target": str(e.target),
        }
        for e in entries
    ]


def links_to_dict(pairs: list[EquivalencePair], dmap: DeploymentMap, interfaces: list[InterfaceEntry]) -> dict:
    return {
        "equivalence": equivalences_to_list(pairs),
        "deployment": deployments_to_list(dmap),
        "data_transfer": interfaces_to_list(interfaces),
    }


def to_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
