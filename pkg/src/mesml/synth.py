"""Programmatic spec builders: random well-formed specs, defect injection, large synthetic specs.

Ids are generated here (``prefix`` + running number); parsed documents never
get auto-ids.
"""

from __future__ import annotations

import dataclasses
import random
from collections import Counter
from typing import Callable, Optional

from .metamodel import (
    Activity,
    ActivityRef,
    ConnectorType,
    DataKind,
    DataObject,
    Diagram,
    Event,
    EventBehavior,
    EventExec,
    ExecType,
    Flow,
    FlowKind,
    Gateway,
    GatewayBehavior,
    GatewayExec,
    Group,
    Lane,
    Link,
    LinkModel,
    LinkType,
    MesSpec,
    ElementRef,
    Pool,
    PREDEFINED_CONNECTORS,
    ProcessModel,
    Repetition,
    ReqStatus,
    SignalRef,
    TechnicalSystemModel,
    TextAnnotation,
    TsKind,
    TsNode,
    ViewTag,
)

WORDS = (
    "Mix", "Heat", "Cool", "Fill", "Check", "Label", "Store", "Dose", "Clean", "Weigh",
    "Report", "Plan", "Order", "Sample", "Release", "Pack", "Track", "Archive",
)


class _Draft:
    """Mutable diagram under construction."""

    def __init__(self) -> None:
        self.activities: list[Activity] = []
        self.events: list[Event] = []
        self.gateways: list[Gateway] = []
        self.activity_refs: list[ActivityRef] = []
        self.signal_refs: list[SignalRef] = []
        self.data_objects: list[DataObject] = []
        self.flows: list[Flow] = []
        self.annotations: list[TextAnnotation] = []
        self.groups: list[Group] = []

    def freeze(self) -> Diagram:
        return Diagram(
            tuple(self.activities), tuple(self.events), tuple(self.gateways),
            tuple(self.activity_refs), tuple(self.signal_refs), tuple(self.data_objects),
            tuple(self.flows), tuple(self.annotations), tuple(self.groups),
        )


class SpecBuilder:
    """Builds well-formed specs. ``size`` scales how many segments each diagram gets."""

    def __init__(self, rng: random.Random, size: int = 1, max_depth: int = 2):
        self.rng = rng
        self.size = size
        self.max_depth = max_depth
        self.counter = 0
        self.signals: list[TsNode] = []
        self.deploy_targets: list[TsNode] = []
        self.ts_linkable: list[TsNode] = []
        # (view, activity) for every activity built, any depth
        self.activities: dict[ViewTag, list[Activity]] = {ViewTag.PP: [], ViewTag.MES: []}
        self.dt_candidates: list[ElementRef] = []
        self.refs: list[tuple[ViewTag, object]] = []
        self.lane_ids: list[str] = []

    def new_id(self, prefix: str) -> str:
        self.counter += 1
        return f"{prefix}{self.counter}"

    def name(self) -> str:
        return f"{self.rng.choice(WORDS)} {self.rng.randrange(100)}"

    # -- technical system ---------------------------------------------------

    def technical_system(self) -> TechnicalSystemModel:
        rng = self.rng
        areas = []
        for _ in range(rng.randint(1, 1 + self.size)):
            units = []
            for _ in range(rng.randint(1, 1 + self.size)):
                signals = []
                for _ in range(rng.randint(1, 1 + self.size)):
                    attrs = {"quality": rng.choice(["good", "raw"])} if rng.random() < 0.5 else {}
                    sig = TsNode(self.new_id("sn"), TsKind.SIGNAL, f"S{self.counter}", (), attrs)
                    signals.append(sig)
                units.append(TsNode(self.new_id("u"), TsKind.UNIT, f"Unit {self.counter}", tuple(signals)))
            areas.append(TsNode(self.new_id("ar"), TsKind.AREA, f"Area {self.counter}", tuple(units)))
        children = list(areas)
        if rng.random() < 0.4:
            unit = TsNode(self.new_id("u"), TsKind.UNIT, f"Device {self.counter}")
            children.append(TsNode(self.new_id("udl"), TsKind.USER_DEFINED_LAYER, "Automation", (unit,)))
        root = TsNode(self.new_id("plant"), TsKind.PLANT, "Plant", tuple(children))
        for _, node, _ in root.walk():
            if node.kind is TsKind.SIGNAL:
                self.signals.append(node)
            if node.kind in (TsKind.AREA, TsKind.UNIT, TsKind.USER_DEFINED_LAYER):
                self.deploy_targets.append(node)
            if node.kind is not TsKind.PLANT:
                self.ts_linkable.append(node)
        return TechnicalSystemModel(root)

    # -- process diagrams -------------------------------------------------------

    def activity(self, view: ViewTag, depth: int, lanes: list[str], allow_sub: bool = True) -> Activity:
        rng = self.rng
        ident = self.new_id("a")
        sub = None
        if allow_sub and depth < self.max_depth and rng.random() < 0.25:
            sub = self.diagram(view, depth + 1, lanes, segments=rng.randint(1, 1 + self.size)).freeze()
        act = Activity(
            ident,
            self.name(),
            rng.choice(list(ExecType)),
            rng.choice(list(Repetition)),
            rng.choice(list(ReqStatus)),
            sub,
            rng.choice(lanes + [None]) if lanes else None,
        )
        self.activities[view].append(act)
        self.dt_candidates.append(ElementRef(view, ident))
        return act

    def flow(self, draft: _Draft, kind: FlowKind, source: str, target: str) -> None:
        draft.flows.append(Flow(self.new_id("f"), kind, source, target))

    def segment(self, draft: _Draft, view: ViewTag, depth: int, lanes: list[str],
                ref_targets: Optional[list[Activity]]) -> tuple[str, str]:
        """Append one single-entry/single-exit fragment; returns (entry id, exit id)."""
        rng = self.rng
        roll = rng.random()
        if roll < 0.25:
            exec_type = rng.choice(list(GatewayExec))
            low = 3 if exec_type is GatewayExec.INCLUSIVE else 2
            split = Gateway(self.new_id("g"), exec_type, GatewayBehavior.SPLIT)
            merge = Gateway(self.new_id("g"), exec_type, GatewayBehavior.MERGE)
            draft.gateways += [split, merge]
            for _ in range(rng.randint(low, low + 1)):
                act = self.activity(view, depth, lanes, allow_sub=False)
                draft.activities.append(act)
                self.flow(draft, FlowKind.SEQUENCE, split.id, act.id)
                self.flow(draft, FlowKind.SEQUENCE, act.id, merge.id)
            return split.id, merge.id
        if roll < 0.35 and ref_targets:
            target = rng.choice(ref_targets)
            ref = ActivityRef(self.new_id("ra"), target.name, target.id)
            draft.activity_refs.append(ref)
            self.refs.append((view, ref))
            return ref.id, ref.id
        if roll < 0.42 and self.signals:
            signal = rng.choice(self.signals)
            ref = SignalRef(self.new_id("rs"), signal.name, signal.id)
            draft.signal_refs.append(ref)
            self.refs.append((view, ref))
            return ref.id, ref.id
        act = self.activity(view, depth, lanes)
        draft.activities.append(act)
        return act.id, act.id

    def diagram(self, view: ViewTag, depth: int, lanes: list[str], segments: int,
                ref_targets: Optional[list[Activity]] = None) -> _Draft:
        rng = self.rng
        draft = _Draft()
        start_behavior = rng.choice([None, None, EventBehavior.TIMER, EventBehavior.LINK])
        start = Event(self.new_id("e"), EventExec.START, start_behavior, rng.choice([None, "Start"]))
        stop = Event(self.new_id("e"), EventExec.STOP)
        draft.events += [start, stop]
        for e in (start, stop):
            if not e.is_link_event:
                self.dt_candidates.append(ElementRef(view, e.id))
        previous = start.id
        for i in range(max(1, segments)):
            if i == 0:  # every diagram carries at least one activity
                act = self.activity(view, depth, lanes)
                draft.activities.append(act)
                entry, exit_ = act.id, act.id
            else:
                entry, exit_ = self.segment(draft, view, depth, lanes, ref_targets)
            self.flow(draft, FlowKind.SEQUENCE, previous, entry)
            previous = exit_
        self.flow(draft, FlowKind.SEQUENCE, previous, stop.id)

        if draft.activities and rng.random() < 0.4:
            data = DataObject(self.new_id("d"), self.name(), rng.choice(list(DataKind)))
            draft.data_objects.append(data)
            self.dt_candidates.append(ElementRef(view, data.id))
            self.flow(draft, FlowKind.DATA, rng.choice(draft.activities).id, data.id)
        if len(draft.activities) >= 2 and rng.random() < 0.3:
            a, b = rng.sample(draft.activities, 2)
            self.flow(draft, FlowKind.MESSAGE, a.id, b.id)
        if depth == 0 and rng.random() < 0.3:
            callee = self.activity(view, depth, lanes)  # callable: outside the sequence flow
            draft.activities.append(callee)
        if draft.activities and rng.random() < 0.2:
            note = TextAnnotation(self.new_id("t"), "note " + self.name())
            draft.annotations.append(note)
            self.flow(draft, FlowKind.ASSOCIATION, note.id, rng.choice(draft.activities).id)
        if len(draft.activities) >= 2 and rng.random() < 0.2:
            members = [a.id for a in rng.sample(draft.activities, 2)]
            group = Group(self.new_id("gr"), tuple(members))
            draft.groups.append(group)
            self.dt_candidates.append(ElementRef(view, group.id))
        return draft

    def pools(self) -> tuple[Pool, ...]:
        rng = self.rng
        pools = []
        for rank in range(rng.randint(1, 2)):
            lanes = tuple(
                Lane(self.new_id("l"), f"Lane {self.counter}", i)
                for i in range(rng.randint(1 if rank == 0 else 0, 2))
            )
            pools.append(Pool(self.new_id("p"), f"Pool {self.counter}", rank, lanes))
        for pool in pools:
            self.lane_ids.append(pool.id)
            self.dt_candidates.append(ElementRef(ViewTag.MES, pool.id))
            for lane in pool.lanes:
                self.lane_ids.append(lane.id)
                self.dt_candidates.append(ElementRef(ViewTag.MES, lane.id))
        return tuple(pools)

    # -- links ----------------------------------------------------------------

    def links(self, extra: int) -> list[Link]:
        rng = self.rng
        links: list[Link] = []
        for view, ref in self.refs:
            if isinstance(ref, ActivityRef):
                original = ElementRef(ViewTag.PP if view is ViewTag.MES else ViewTag.MES, ref.target)
            else:
                original = ElementRef(ViewTag.TS, ref.target)
            ends = [original, ElementRef(view, ref.id)]
            rng.shuffle(ends)
            links.append(Link(self.new_id("lk"), LinkType.EQUIVALENCE, ends[0], ends[1]))
        process_acts = [(v, a) for v, acts in self.activities.items() for a in acts]
        ts_refs = [ElementRef(ViewTag.TS, n.id) for n in self.ts_linkable]
        for i in range(max(1, extra)):
            if i == 0 or rng.random() < 0.5:
                view, act = rng.choice(process_acts)
                target = rng.choice(self.deploy_targets)
                links.append(Link(self.new_id("lk"), LinkType.DEPLOYMENT, ElementRef(view, act.id),
                                  ElementRef(ViewTag.TS, target.id)))
            else:
                candidates = self.dt_candidates + ts_refs
                source = rng.choice(candidates)
                others = [c for c in candidates if c.view is not source.view]
                target = rng.choice(others)
                connector = rng.choice([None, ConnectorType(rng.choice(PREDEFINED_CONNECTORS)),
                                        ConnectorType.custom("bus " + self.name())])
                links.append(Link(self.new_id("lk"), LinkType.DATA_TRANSFER, source, target, connector))
        rng.shuffle(links)
        return links

    # -- whole spec -------------------------------------------------------------

    def build(self, links: int = 3) -> MesSpec:
        rng = self.rng
        ts = self.technical_system()
        pp_draft = self.diagram(ViewTag.PP, 0, [], rng.randint(1, 1 + 2 * self.size))
        pools = self.pools()
        pp_acts = list(self.activities[ViewTag.PP])
        mes_draft = self.diagram(ViewTag.MES, 0, self.lane_ids, rng.randint(1, 1 + 2 * self.size),
                                 ref_targets=pp_acts)
        if rng.random() < 0.3 and self.activities[ViewTag.MES]:
            target = rng.choice(self.activities[ViewTag.MES])
            ref = ActivityRef(self.new_id("ra"), target.name, target.id)
            pp_draft.activity_refs.append(ref)
            self.refs.append((ViewTag.PP, ref))
        pp = ProcessModel(ViewTag.PP, pp_draft.freeze())
        mes = ProcessModel(ViewTag.MES, mes_draft.freeze(), pools)
        spec = MesSpec(mes, pp, ts, LinkModel(tuple(self.links(links))))
        return _declare_some_degrees(spec, rng)


def _declare_some_degrees(spec: MesSpec, rng: random.Random) -> MesSpec:
    index = spec.index

    def visit(diagram: Diagram) -> Diagram:
        acts = []
        for a in diagram.activities:
            sub = visit(a.subprocess) if a.subprocess is not None else None
            declared = index.degrees(a.id) if rng.random() < 0.15 else None
            acts.append(dataclasses.replace(a, subprocess=sub, declared_degrees=declared))
        return dataclasses.replace(diagram, activities=tuple(acts))

    return dataclasses.replace(
        spec,
        mes_model=dataclasses.replace(spec.mes_model, content=visit(spec.mes_model.content)),
        pp_model=dataclasses.replace(spec.pp_model, content=visit(spec.pp_model.content)),
    )


def count_elements(spec: MesSpec) -> int:
    """Every identified object: model elements, TS nodes, pools, lanes and links."""
    return sum(spec.index.occurrences.values())


def random_spec(rng: random.Random, max_elements: int = 50) -> MesSpec:
    """A random well-formed spec with at most ``max_elements`` identified objects."""
    while True:
        spec = SpecBuilder(rng, size=1, max_depth=2).build(links=rng.randint(1, 3))
        if count_elements(spec) <= max_elements:
            return spec


def synthetic_spec(n_elements: int = 10_000, n_links: int = 2_000, seed: int = 0) -> MesSpec:
    """A large well-formed spec of roughly ``n_elements`` elements and exactly ``n_links`` links."""
    rng = random.Random(seed)
    size = 1
    while True:
        builder = SpecBuilder(rng, size=size, max_depth=3)
        spec = builder.build(links=n_links)
        if count_elements(spec) >= n_elements:
            break
        size += max(1, size // 2)
    links = list(spec.links)
    if len(links) > n_links:
        # keep every equivalence link so reference elements stay paired
        keep = [l for l in links if l.link_type is LinkType.EQUIVALENCE]
        rest = [l for l in links if l.link_type is not LinkType.EQUIVALENCE]
        links = (keep + rest)[:max(n_links, len(keep))]
    return dataclasses.replace(spec, link_model=LinkModel(tuple(links)))


# -- defect injection -----------------------------------------------------------


def _fresh(spec: MesSpec) -> Callable[[str], str]:
    taken = set(spec.index.occurrences)
    counter = [0]

    def make(prefix: str) -> str:
        while True:
            counter[0] += 1
            ident = f"inj_{prefix}{counter[0]}"
            if ident not in taken:
                taken.add(ident)
                return ident

    return make


def _with_top(spec: MesSpec, view: ViewTag, **changes) -> MesSpec:
    model = spec.process_model(view)
    content = dataclasses.replace(model.content, **changes)
    field = "mes_model" if view is ViewTag.MES else "pp_model"
    return dataclasses.replace(spec, **{field: dataclasses.replace(model, content=content)})


def _add_links(spec: MesSpec, *links: Link) -> MesSpec:
    return dataclasses.replace(spec, link_model=LinkModel(spec.links + links))


def prune_dangling_links(spec: MesSpec) -> MesSpec:
    """Drop links whose endpoints no longer resolve in their view."""
    index = spec.index

    def ok(ref: ElementRef) -> bool:
        entry = index.get(ref.id)
        return entry is not None and entry.view is ref.view

    kept = tuple(l for l in spec.links if ok(l.source) and ok(l.target))
    return dataclasses.replace(spec, link_model=LinkModel(kept))


def _ts_map(node: TsNode, fn: Callable[[TsNode], TsNode]) -> TsNode:
    return fn(dataclasses.replace(node, children=tuple(_ts_map(c, fn) for c in node.children)))


def _inject_spec01(spec, rng, fresh):
    choice = rng.randrange(3)
    if choice == 0:
        return dataclasses.replace(spec, ts_model=None)
    if choice == 1:
        return dataclasses.replace(spec, link_model=None)
    return dataclasses.replace(spec, mes_model=spec.pp_model)


def _inject_ts01(spec, rng, fresh):
    def demote(node: TsNode) -> TsNode:
        return dataclasses.replace(node, kind=TsKind.USER_DEFINED_LAYER) if node.kind is TsKind.AREA else node

    return dataclasses.replace(spec, ts_model=TechnicalSystemModel(_ts_map(spec.ts_model.root, demote)))


def _inject_ts02(spec, rng, fresh):
    root = spec.ts_model.root
    stray = TsNode(fresh("sn"), TsKind.SIGNAL, "Stray signal")
    if rng.random() < 0.5:
        root = dataclasses.replace(root, children=root.children + (stray,))
    else:
        area = root.children[0]
        root = dataclasses.replace(root, children=(dataclasses.replace(area, children=area.children + (stray,)),)
                                   + root.children[1:])
    return dataclasses.replace(spec, ts_model=TechnicalSystemModel(root))


def _inject_ts03(spec, rng, fresh):
    root = spec.ts_model.root
    if rng.random() < 0.5:
        extra = TsNode(fresh("plant"), TsKind.PLANT, "Nested plant")
    else:
        # the same node under a second parent
        extra = next(n for n in spec.ts_model.nodes() if n.kind is TsKind.UNIT)
    return dataclasses.replace(spec, ts_model=TechnicalSystemModel(
        dataclasses.replace(root, children=root.children + (extra,))))


def _inject_pp01(spec, rng, fresh):
    view = rng.choice([ViewTag.PP, ViewTag.MES])
    start = Event(fresh("e"), EventExec.START)
    act = Activity(fresh("a"), "Lonely")
    flow = Flow(fresh("f"), FlowKind.SEQUENCE, start.id, act.id)
    spec = _with_top(spec, view, activities=(act,), events=(start,), gateways=(), activity_refs=(),
                     signal_refs=(), data_objects=(), flows=(flow,), annotations=(), groups=())
    return prune_dangling_links(spec)


def _inject_pp02(spec, rng, fresh):
    view = rng.choice([ViewTag.PP, ViewTag.MES])
    top = spec.process_model(view).content
    kept = top.events[:1]
    gone = {e.id for e in top.events[1:]}
    flows = tuple(f for f in top.flows if f.source not in gone and f.target not in gone)
    acts = top.activities
    while len(acts) + len(kept) + len(top.gateways) + len(top.activity_refs) + len(top.signal_refs) < 3:
        acts += (Activity(fresh("a"), "Filler"),)
    return prune_dangling_links(_with_top(spec, view, events=kept, flows=flows, activities=acts))


def _inject_pp03(spec, rng, fresh):
    view = rng.choice([ViewTag.PP, ViewTag.MES])
    top = spec.process_model(view).content
    return prune_dangling_links(_with_top(spec, view, flows=top.flows[:1]))


def _inject_pp04(spec, rng, fresh):
    view = rng.choice([ViewTag.PP, ViewTag.MES])
    top = spec.process_model(view).content
    gone = {a.id for a in top.activities}
    flows = tuple(f for f in top.flows if f.source not in gone and f.target not in gone)
    groups = tuple(g for g in top.groups if not gone & set(g.members))
    events = top.events + tuple(Event(fresh("e"), EventExec.INTERMEDIATE_INTERRUPTING) for _ in range(3))
    return prune_dangling_links(_with_top(spec, view, activities=(), flows=flows, events=events, groups=groups))


def _inject_mes01(spec, rng, fresh):
    mes = spec.mes_model
    pools = tuple(dataclasses.replace(p, lanes=()) for p in mes.pools) if rng.random() < 0.5 else ()
    spec = dataclasses.replace(spec, mes_model=dataclasses.replace(mes, pools=pools))
    return prune_dangling_links(spec)


def _gateway_case(spec, rng, fresh, gateway: Gateway, n_in: int, n_out: int, info: bool = False):
    view = rng.choice([ViewTag.PP, ViewTag.MES])
    top = spec.process_model(view).content
    acts, flows = list(top.activities), list(top.flows)
    for _ in range(n_in):
        a = Activity(fresh("a"), "Before")
        acts.append(a)
        flows.append(Flow(fresh("f"), FlowKind.SEQUENCE, a.id, gateway.id))
    for _ in range(n_out):
        a = Activity(fresh("a"), "After")
        acts.append(a)
        flows.append(Flow(fresh("f"), FlowKind.SEQUENCE, gateway.id, a.id))
    data = list(top.data_objects)
    if info:
        d = DataObject(fresh("d"), "Gateway input")
        data.append(d)
        flows.append(Flow(fresh("f"), FlowKind.DATA, d.id, gateway.id))
    return _with_top(spec, view, activities=tuple(acts), flows=tuple(flows),
                     gateways=top.gateways + (gateway,), data_objects=tuple(data))


def _inject_gw01(spec, rng, fresh):
    g = Gateway(fresh("g"), rng.choice([GatewayExec.EXCLUSIVE, GatewayExec.PARALLEL]), GatewayBehavior.SPLIT)
    n_in, n_out = rng.choice([(1, 1), (0, 2), (2, 3), (1, 0)])
    return _gateway_case(spec, rng, fresh, g, n_in, n_out)


def _inject_gw02(spec, rng, fresh):
    g = Gateway(fresh("g"), GatewayExec.INCLUSIVE, GatewayBehavior.SPLIT)
    n_in, n_out = rng.choice([(1, 2), (1, 1), (0, 3), (2, 4)])
    return _gateway_case(spec, rng, fresh, g, n_in, n_out)


def _inject_gw03(spec, rng, fresh):
    g = Gateway(fresh("g"), rng.choice(list(GatewayExec)), GatewayBehavior.MERGE)
    n_in, n_out = rng.choice([(1, 1), (2, 2), (3, 0), (0, 1)])
    return _gateway_case(spec, rng, fresh, g, n_in, n_out)


def _inject_gw04(spec, rng, fresh):
    g = Gateway(fresh("g"), GatewayExec.EXCLUSIVE, GatewayBehavior.SPLIT)
    return _gateway_case(spec, rng, fresh, g, 1, 2, info=True)


def _first_activity(spec: MesSpec, view: ViewTag) -> Activity:
    return next(iter(spec.process_model(view).all_activities()))


def _inject_ref01(spec, rng, fresh):
    area = next(n for n in spec.ts_model.nodes() if n.kind in (TsKind.AREA, TsKind.UNIT))
    view = rng.choice([ViewTag.PP, ViewTag.MES])
    ref = SignalRef(fresh("rs"), area.name, area.id)
    return _with_top(spec, view, signal_refs=spec.process_model(view).content.signal_refs + (ref,))


def _inject_ref02(spec, rng, fresh):
    target = _first_activity(spec, ViewTag.MES)
    ref = ActivityRef(fresh("ra"), target.name, target.id)
    return _with_top(spec, ViewTag.MES, activity_refs=spec.mes_model.content.activity_refs + (ref,))


def _inject_ref03(spec, rng, fresh):
    target = _first_activity(spec, ViewTag.PP)
    ref = ActivityRef(fresh("ra"), target.name + " (renamed)", target.id)
    return _with_top(spec, ViewTag.MES, activity_refs=spec.mes_model.content.activity_refs + (ref,))


def _inject_ref04(spec, rng, fresh):
    target = _first_activity(spec, ViewTag.PP)
    ref = ActivityRef(fresh("ra"), target.name, target.id)
    return _with_top(spec, ViewTag.MES, activity_refs=spec.mes_model.content.activity_refs + (ref,))


def _inject_lk01(spec, rng, fresh):
    flow = spec.pp_model.content.flows[0]
    unit = next(n for n in spec.ts_model.nodes() if n.kind is TsKind.UNIT)
    link = Link(fresh("lk"), rng.choice(list(LinkType)), ElementRef(ViewTag.PP, flow.id),
                ElementRef(ViewTag.TS, unit.id))
    return _add_links(spec, link)


def _inject_lk02(spec, rng, fresh):
    act = _first_activity(spec, ViewTag.PP)
    event = next(e for e in spec.pp_model.content.events if not e.is_link_event)
    link = Link(fresh("lk"), rng.choice(list(LinkType)), ElementRef(ViewTag.PP, act.id),
                ElementRef(ViewTag.PP, event.id))
    return _add_links(spec, link)


def _inject_lk03(spec, rng, fresh):
    act = _first_activity(spec, ViewTag.PP)
    link = Link(fresh("lk"), LinkType.DATA_TRANSFER, ElementRef(ViewTag.PP, act.id),
                ElementRef(ViewTag.TS, spec.ts_model.root.id), ConnectorType("opc"))
    return _add_links(spec, link)


def _inject_lk04(spec, rng, fresh):
    ends = [ElementRef(ViewTag.PP, _first_activity(spec, ViewTag.PP).id),
            ElementRef(ViewTag.MES, _first_activity(spec, ViewTag.MES).id)]
    rng.shuffle(ends)
    return _add_links(spec, Link(fresh("lk"), LinkType.EQUIVALENCE, ends[0], ends[1]))


def _inject_lk05(spec, rng, fresh):
    original = _first_activity(spec, ViewTag.PP)
    ref = ActivityRef(fresh("ra"), original.name, original.id)
    impostor = Activity(fresh("a"), original.name + " (other)")
    spec = _with_top(spec, ViewTag.MES, activity_refs=spec.mes_model.content.activity_refs + (ref,))
    spec = _with_top(spec, ViewTag.PP, activities=spec.pp_model.content.activities + (impostor,))
    return _add_links(spec, Link(fresh("lk"), LinkType.EQUIVALENCE, ElementRef(ViewTag.PP, impostor.id),
                                 ElementRef(ViewTag.MES, ref.id)))


def _inject_lk06(spec, rng, fresh):
    act = _first_activity(spec, ViewTag.PP)
    signal = next(n for n in spec.ts_model.nodes() if n.kind is TsKind.SIGNAL)
    unit = next(n for n in spec.ts_model.nodes() if n.kind is TsKind.UNIT)
    choice = rng.randrange(3)
    if choice == 0:
        link = Link(fresh("lk"), LinkType.DEPLOYMENT, ElementRef(ViewTag.PP, act.id), ElementRef(ViewTag.TS, signal.id))
    elif choice == 1:
        link = Link(fresh("lk"), LinkType.DEPLOYMENT, ElementRef(ViewTag.TS, unit.id), ElementRef(ViewTag.PP, act.id))
    else:
        event = next(e for e in spec.pp_model.content.events if not e.is_link_event)
        link = Link(fresh("lk"), LinkType.DEPLOYMENT, ElementRef(ViewTag.PP, event.id), ElementRef(ViewTag.TS, unit.id))
    return _add_links(spec, link)


def _inject_lk07(spec, rng, fresh):
    return dataclasses.replace(spec, link_model=LinkModel(()))


def _inject_sub01(spec, rng, fresh):
    view = rng.choice([ViewTag.PP, ViewTag.MES])
    top = spec.process_model(view).content
    victim = top.activities[0]
    inner = Diagram(activities=(dataclasses.replace(victim, subprocess=None),))
    looped = dataclasses.replace(victim, subprocess=inner)
    return prune_dangling_links(_with_top(spec, view, activities=(looped,) + top.activities[1:]))


def _inject_act01(spec, rng, fresh):
    view = rng.choice([ViewTag.PP, ViewTag.MES])
    top = spec.process_model(view).content
    victim = top.activities[0]
    d = spec.index.degrees(victim.id)
    wrong = dataclasses.replace(d, in_sf=d.in_sf + 1)
    return _with_top(spec, view, activities=(dataclasses.replace(victim, declared_degrees=wrong),)
                     + top.activities[1:])


def _inject_ppl01(spec, rng, fresh):
    view = rng.choice([ViewTag.PP, ViewTag.MES])
    top = spec.process_model(view).content
    holder = Activity(fresh("a"), "Undetailed", subprocess=Diagram(activities=(Activity(fresh("a"), "Inner"),)))
    return _with_top(spec, view, activities=top.activities + (holder,))


INJECTORS: dict[str, Callable] = {
    "W-SPEC-01": _inject_spec01,
    "W-TS-01": _inject_ts01,
    "W-TS-02": _inject_ts02,
    "W-TS-03": _inject_ts03,
    "W-PP-01": _inject_pp01,
    "W-PP-02": _inject_pp02,
    "W-PP-03": _inject_pp03,
    "W-PP-04": _inject_pp04,
    "W-MES-01": _inject_mes01,
    "W-GW-01": _inject_gw01,
    "W-GW-02": _inject_gw02,
    "W-GW-03": _inject_gw03,
    "W-GW-04": _inject_gw04,
    "W-REF-01": _inject_ref01,
    "W-REF-02": _inject_ref02,
    "W-REF-03": _inject_ref03,
    "W-REF-04": _inject_ref04,
    "W-LK-01": _inject_lk01,
    "W-LK-02": _inject_lk02,
    "W-LK-03": _inject_lk03,
    "W-LK-04": _inject_lk04,
    "W-LK-05": _inject_lk05,
    "W-LK-06": _inject_lk06,
    "W-LK-07": _inject_lk07,
    "W-SUB-01": _inject_sub01,
    "L-ACT-01": _inject_act01,
    "L-PP-01": _inject_ppl01,
}


def inject_defect(spec: MesSpec, rule: str, rng: random.Random) -> MesSpec:
    """Return a copy of ``spec`` carrying one defect that the rule ``rule`` must report."""
    return INJECTORS[rule](spec, rng, _fresh(spec))


def kind_histogram(spec: MesSpec) -> Counter:
    return Counter(entry.kind for entry in spec.index.entries.values())
