"""Core object model for MES-ML specifications.

A specification bundles four sub-models: the MES/IT functional model, the
production process (PP) model, the technical system (TS) model and the link
model. All objects are frozen dataclasses; unordered collections are sorted by
id on construction so that two specs built in different orders compare equal.

Element lookup, classification and degree counting go through :class:`SpecIndex`,
built lazily once per spec (``spec.index``).
"""

from __future__ import annotations

from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Optional, Union


class MesmlError(Exception):
    """Base class for errors raised by the toolkit."""


class UnresolvedReference(MesmlError, LookupError):
    def __init__(self, element_id: str, view: Optional["ViewTag"] = None):
        self.element_id = element_id
        self.view = view
        where = f" in view {view.label}" if view is not None else ""
        super().__init__(f"element {element_id!r} not found{where}")


class UnsupportedKind(MesmlError, ValueError):
    pass


class ViewTag(Enum):
    MES = "mes"
    PP = "pp"
    TS = "ts"

    @property
    def label(self) -> str:
        return self.name


class ExecType(Enum):
    UNDEFINED = "undefined"
    MANUAL = "manual"
    AUTOMATIC = "automatic"


class Repetition(Enum):
    NONE = "none"
    SEQUENTIAL = "sequential"
    PARALLEL = "parallel"


class ReqStatus(Enum):
    TO_IMPLEMENT = "to_implement"
    IMPLEMENTED = "implemented"
    EXCLUDED = "excluded"


class EventExec(Enum):
    START = "start"
    STOP = "stop"
    INTERMEDIATE_INTERRUPTING = "intermediate_interrupting"
    INTERMEDIATE_NON_INTERRUPTING = "intermediate_non_interrupting"


class EventBehavior(Enum):
    TIMER = "timer"
    ERROR = "error"
    LINK = "link"


class GatewayExec(Enum):
    EXCLUSIVE = "exclusive"
    INCLUSIVE = "inclusive"
    PARALLEL = "parallel"


class GatewayBehavior(Enum):
    SPLIT = "split"
    MERGE = "merge"


class DataKind(Enum):
    SINGLE = "single"
    MULTI = "multi"
    STORE = "store"


class FlowKind(Enum):
    SEQUENCE = "sequence"
    MESSAGE = "message"
    DATA = "data"
    ASSOCIATION = "association"


class TsKind(Enum):
    PLANT = "plant"
    AREA = "area"
    UNIT = "unit"
    SIGNAL = "signal"
    USER_DEFINED_LAYER = "user_defined_layer"


class ElementKind(Enum):
    ACTIVITY = "Activity"
    EVENT = "Event"
    GATEWAY = "Gateway"
    ACTIVITY_REF = "ActivityRef"
    SIGNAL_REF = "SignalRef"
    DATA_OBJECT = "DataObject"
    POOL = "Pool"
    LANE = "Lane"
    GROUP = "Group"
    TEXT_ANNOTATION = "TextAnnotation"
    SEQUENCE_FLOW = "SequenceFlow"
    MESSAGE_FLOW = "MessageFlow"
    DATA_FLOW = "DataFlow"
    ASSOCIATION = "Association"
    PLANT = "Plant"
    AREA = "Area"
    UNIT = "Unit"
    SIGNAL = "Signal"
    USER_DEFINED_LAYER = "UserDefinedLayer"


FLOW_KIND_TO_ELEMENT = {
    FlowKind.SEQUENCE: ElementKind.SEQUENCE_FLOW,
    FlowKind.MESSAGE: ElementKind.MESSAGE_FLOW,
    FlowKind.DATA: ElementKind.DATA_FLOW,
    FlowKind.ASSOCIATION: ElementKind.ASSOCIATION,
}

TS_KIND_TO_ELEMENT = {
    TsKind.PLANT: ElementKind.PLANT,
    TsKind.AREA: ElementKind.AREA,
    TsKind.UNIT: ElementKind.UNIT,
    TsKind.SIGNAL: ElementKind.SIGNAL,
    TsKind.USER_DEFINED_LAYER: ElementKind.USER_DEFINED_LAYER,
}

CONNECTING_KINDS = frozenset(FLOW_KIND_TO_ELEMENT.values())
TS_KINDS = frozenset(TS_KIND_TO_ELEMENT.values())
FLOW_OBJECT_KINDS = frozenset(
    {
        ElementKind.ACTIVITY,
        ElementKind.EVENT,
        ElementKind.GATEWAY,
        ElementKind.ACTIVITY_REF,
        ElementKind.SIGNAL_REF,
    }
)
# kinds that can live inside a process diagram (either process view)
DIAGRAM_KINDS = FLOW_OBJECT_KINDS | CONNECTING_KINDS | {
    ElementKind.DATA_OBJECT,
    ElementKind.GROUP,
    ElementKind.TEXT_ANNOTATION,
}
SWIMLANE_KINDS = frozenset({ElementKind.POOL, ElementKind.LANE})


def possible_views(kind: ElementKind) -> tuple[ViewTag, ...]:
    """Views in which an element of ``kind`` can reside."""
    if kind in TS_KINDS:
        return (ViewTag.TS,)
    if kind in SWIMLANE_KINDS:
        return (ViewTag.MES,)
    return (ViewTag.MES, ViewTag.PP)


@dataclass(frozen=True)
class ElementRef:
    view: ViewTag
    id: str

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("element id must be non-empty")

    def __str__(self) -> str:
        return f"{self.view.value}:{self.id}"

    @classmethod
    def parse(cls, text: str) -> "ElementRef":
        """Parse ``"view:id"`` (split at the first colon)."""
        view, sep, ident = text.partition(":")
        if not sep:
            raise ValueError(f"expected 'view:id', got {text!r}")
        return cls(ViewTag(view.strip().lower()), ident)


@dataclass(frozen=True)
class DegreeVector:
    in_sf: int = 0
    out_sf: int = 0
    in_mf: int = 0
    out_mf: int = 0
    in_df: int = 0
    out_df: int = 0

    FIELDS = ("in_sf", "out_sf", "in_mf", "out_mf", "in_df", "out_df")

    def __post_init__(self) -> None:
        for name in self.FIELDS:
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(getattr(self, name) for name in self.FIELDS)

    @property
    def information_flows(self) -> int:
        return self.in_mf + self.out_mf + self.in_df + self.out_df


def _sorted_by_id(items) -> tuple:
    return tuple(sorted(items, key=lambda e: e.id))


@dataclass(frozen=True)
class Activity:
    id: str
    name: str
    exec_type: ExecType = ExecType.UNDEFINED
    repetition: Repetition = Repetition.NONE
    status: ReqStatus = ReqStatus.TO_IMPLEMENT
    subprocess: Optional["Diagram"] = None
    lane: Optional[str] = None  # pool or lane id, MES model only
    declared_degrees: Optional[DegreeVector] = None


@dataclass(frozen=True)
class Event:
    id: str
    exec_type: EventExec
    behavior: Optional[EventBehavior] = None
    name: Optional[str] = None

    @property
    def is_link_event(self) -> bool:
        return self.behavior is EventBehavior.LINK


@dataclass(frozen=True)
class Gateway:
    id: str
    exec_type: GatewayExec
    behavior: GatewayBehavior
    name: Optional[str] = None
    declared_degrees: Optional[DegreeVector] = None


@dataclass(frozen=True)
class ActivityRef:
    id: str
    name: str
    target: str


@dataclass(frozen=True)
class SignalRef:
    id: str
    name: str
    target: str


@dataclass(frozen=True)
class DataObject:
    id: str
    name: str
    kind: DataKind = DataKind.SINGLE


@dataclass(frozen=True)
class Flow:
    """A connecting object: sequence flow, message flow, data flow or association."""

    id: str
    kind: FlowKind
    source: str
    target: str

    def __post_init__(self) -> None:
        if self.kind is FlowKind.SEQUENCE and self.source == self.target:
            raise ValueError(f"sequence flow {self.id!r} connects {self.source!r} to itself")


@dataclass(frozen=True)
class TextAnnotation:
    id: str
    text: str


@dataclass(frozen=True)
class Group:
    id: str
    members: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "members", tuple(sorted(self.members)))


@dataclass(frozen=True)
class Diagram:
    """Content of one process diagram: a top-level model or a subprocess fragment."""

    activities: tuple[Activity, ...] = ()
    events: tuple[Event, ...] = ()
    gateways: tuple[Gateway, ...] = ()
    activity_refs: tuple[ActivityRef, ...] = ()
    signal_refs: tuple[SignalRef, ...] = ()
    data_objects: tuple[DataObject, ...] = ()
    flows: tuple[Flow, ...] = ()
    annotations: tuple[TextAnnotation, ...] = ()
    groups: tuple[Group, ...] = ()

    def __post_init__(self) -> None:
        for name in (
            "activities", "events", "gateways", "activity_refs", "signal_refs",
            "data_objects", "flows", "annotations", "groups",
        ):
            object.__setattr__(self, name, _sorted_by_id(getattr(self, name)))

    def flow_objects(self) -> Iterator:
        yield from self.activities
        yield from self.events
        yield from self.gateways
        yield from self.activity_refs
        yield from self.signal_refs

    @property
    def flow_object_count(self) -> int:
        return (
            len(self.activities) + len(self.events) + len(self.gateways)
            + len(self.activity_refs) + len(self.signal_refs)
        )

    def flows_of(self, kind: FlowKind) -> tuple[Flow, ...]:
        return tuple(f for f in self.flows if f.kind is kind)

    def data_of(self, kind: DataKind) -> tuple[DataObject, ...]:
        return tuple(d for d in self.data_objects if d.kind is kind)

    def elements(self) -> Iterator[tuple[ElementKind, object]]:
        """Own elements of this diagram (subprocess content not included)."""
        for a in self.activities:
            yield ElementKind.ACTIVITY, a
        for e in self.events:
            yield ElementKind.EVENT, e
        for g in self.gateways:
            yield ElementKind.GATEWAY, g
        for r in self.activity_refs:
            yield ElementKind.ACTIVITY_REF, r
        for s in self.signal_refs:
            yield ElementKind.SIGNAL_REF, s
        for d in self.data_objects:
            yield ElementKind.DATA_OBJECT, d
        for f in self.flows:
            yield FLOW_KIND_TO_ELEMENT[f.kind], f
        for t in self.annotations:
            yield ElementKind.TEXT_ANNOTATION, t
        for gr in self.groups:
            yield ElementKind.GROUP, gr

    @property
    def element_count(self) -> int:
        return (
            self.flow_object_count + len(self.data_objects) + len(self.flows)
            + len(self.annotations) + len(self.groups)
        )


@dataclass(frozen=True)
class Lane:
    id: str
    name: str
    rank: int = 0


@dataclass(frozen=True)
class Pool:
    id: str
    name: str
    rank: int = 0
    lanes: tuple[Lane, ...] = ()

    def __post_init__(self) -> None:
        if self.rank < 0:
            raise ValueError("pool rank must be >= 0")


@dataclass(frozen=True)
class ProcessModel:
    role: ViewTag
    content: Diagram = field(default_factory=Diagram)
    pools: tuple[Pool, ...] = ()

    def __post_init__(self) -> None:
        if self.role is ViewTag.TS:
            raise ValueError("a process model has role MES or PP")
        if self.role is ViewTag.PP and self.pools:
            raise ValueError("the PP model carries no swimlanes")
        object.__setattr__(self, "pools", _sorted_by_id(self.pools))

    @property
    def lanes(self) -> tuple[Lane, ...]:
        return tuple(lane for pool in self.pools for lane in pool.lanes)

    def pools_by_rank(self) -> tuple[Pool, ...]:
        return tuple(sorted(self.pools, key=lambda p: (p.rank, p.id)))

    def diagrams(self) -> Iterator[tuple[tuple[str, ...], Diagram, Optional[Activity]]]:
        """Depth-first (path, diagram, owner) over the top-level content and every fragment.

        ``path`` is the tuple of owning activity ids; ``()`` for the top level.
        """
        stack: list[tuple[tuple[str, ...], Diagram, Optional[Activity]]] = [((), self.content, None)]
        while stack:
            path, diagram, owner = stack.pop()
            yield path, diagram, owner
            for act in reversed(diagram.activities):
                if act.subprocess is not None:
                    stack.append((path + (act.id,), act.subprocess, act))

    def all_activities(self) -> Iterator[Activity]:
        for _, diagram, _ in self.diagrams():
            yield from diagram.activities


@dataclass(frozen=True)
class TsNode:
    id: str
    kind: TsKind
    name: str
    children: tuple["TsNode", ...] = ()
    attrs: tuple[tuple[str, str], ...] = ()  # signal attributes: quality, metadata, semantics

    def __post_init__(self) -> None:
        attrs = self.attrs
        if isinstance(attrs, Mapping):
            attrs = attrs.items()
        object.__setattr__(self, "attrs", tuple(sorted((str(k), str(v)) for k, v in attrs)))
        object.__setattr__(self, "children", tuple(self.children))

    def walk(self) -> Iterator[tuple[Optional["TsNode"], "TsNode", int]]:
        """Pre-order (parent, node, depth) triples."""
        stack: list[tuple[Optional[TsNode], TsNode, int]] = [(None, self, 0)]
        while stack:
            parent, node, depth = stack.pop()
            yield parent, node, depth
            for child in reversed(node.children):
                stack.append((node, child, depth + 1))


@dataclass(frozen=True)
class TechnicalSystemModel:
    root: TsNode

    def nodes(self) -> Iterator[TsNode]:
        for _, node, _ in self.root.walk():
            yield node

    def nodes_of(self, kind: TsKind) -> list[TsNode]:
        return [n for n in self.nodes() if n.kind is kind]


class LinkType(Enum):
    DATA_TRANSFER = "data_transfer"
    EQUIVALENCE = "equivalence"
    DEPLOYMENT = "deployment"


PREDEFINED_CONNECTORS = ("opc", "file", "database", "web_service")


@dataclass(frozen=True)
class ConnectorType:
    name: str
    predefined: bool = True

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("connector name must be non-empty")
        if self.predefined and self.name not in PREDEFINED_CONNECTORS:
            raise ValueError(f"unknown predefined connector {self.name!r}")

    @classmethod
    def custom(cls, name: str) -> "ConnectorType":
        return cls(name, predefined=False)

    def __str__(self) -> str:
        return self.name.upper() if self.predefined else f"custom:{self.name}"


OPC = ConnectorType("opc")


@dataclass(frozen=True)
class Link:
    id: str
    link_type: LinkType
    source: ElementRef
    target: ElementRef
    connector: Optional[ConnectorType] = None


@dataclass(frozen=True, eq=False)
class LinkModel:
    """Links in authored order. Equality ignores authoring order."""

    links: tuple[Link, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "links", tuple(self.links))

    def canonical(self) -> tuple[Link, ...]:
        return _sorted_by_id(self.links)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinkModel):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self) -> int:
        return hash(self.canonical())

    def __len__(self) -> int:
        return len(self.links)

    def __iter__(self) -> Iterator[Link]:
        return iter(self.links)


@dataclass(frozen=True)
class MesSpec:
    mes_model: Optional[ProcessModel]
    pp_model: Optional[ProcessModel]
    ts_model: Optional[TechnicalSystemModel]
    link_model: Optional[LinkModel] = field(default_factory=LinkModel)

    def process_model(self, view: ViewTag) -> Optional[ProcessModel]:
        if view is ViewTag.MES:
            return self.mes_model
        if view is ViewTag.PP:
            return self.pp_model
        raise UnsupportedKind("the TS view is not a process model")

    @property
    def links(self) -> tuple[Link, ...]:
        return self.link_model.links if self.link_model is not None else ()

    @cached_property
    def index(self) -> "SpecIndex":
        return SpecIndex(self)


@dataclass(frozen=True)
class Entry:
    """Where one element lives."""

    element: object
    kind: ElementKind
    view: ViewTag
    diagram_path: Optional[tuple[str, ...]] = None  # None for pools, lanes, TS nodes
    parent: Optional[str] = None  # TS parent id, or pool id for lanes

    @property
    def ref(self) -> ElementRef:
        return ElementRef(self.view, self.element.id)

    @property
    def name(self) -> Optional[str]:
        return getattr(self.element, "name", None)


_SF, _MF, _DF = FlowKind.SEQUENCE, FlowKind.MESSAGE, FlowKind.DATA


class SpecIndex:
    """Id lookup, link incidence and degree tables for one spec.

    Built in a single pass. Duplicate ids keep the first occurrence in
    ``entries``; every occurrence is listed in ``occurrences``.
    """

    def __init__(self, spec: MesSpec):
        self.spec = spec
        self.entries: dict[str, Entry] = {}
        self.occurrences: dict[str, int] = {}
        self.diagrams: dict[tuple[ViewTag, tuple[str, ...]], Diagram] = {}
        self._degrees: dict[str, list[int]] = {}
        self.links_by_element: dict[str, list[Link]] = {}

        for model in (spec.mes_model, spec.pp_model):
            if model is not None:
                self._add_process_model(model)
        if spec.ts_model is not None:
            for parent, node, _ in spec.ts_model.root.walk():
                self._add(node.id, Entry(node, TS_KIND_TO_ELEMENT[node.kind], ViewTag.TS,
                                         parent=parent.id if parent else None))
        for link in spec.links:
            self.occurrences[link.id] = self.occurrences.get(link.id, 0) + 1
            for end in (link.source, link.target):
                self.links_by_element.setdefault(end.id, []).append(link)

    def _add(self, ident: str, entry: Entry) -> None:
        self.occurrences[ident] = self.occurrences.get(ident, 0) + 1
        self.entries.setdefault(ident, entry)

    def _add_process_model(self, model: ProcessModel) -> None:
        view = model.role
        for pool in model.pools:
            self._add(pool.id, Entry(pool, ElementKind.POOL, view))
            for lane in pool.lanes:
                self._add(lane.id, Entry(lane, ElementKind.LANE, view, parent=pool.id))
        degrees = self._degrees
        for path, diagram, _ in model.diagrams():
            self.diagrams[(view, path)] = diagram
            for kind, element in diagram.elements():
                self._add(element.id, Entry(element, kind, view, diagram_path=path))
            for flow in diagram.flows:
                if flow.kind is FlowKind.ASSOCIATION:
                    continue
                slot = 0 if flow.kind is _SF else 2 if flow.kind is _MF else 4
                out = degrees.get(flow.source)
                if out is None:
                    out = degrees[flow.source] = [0] * 6
                out[slot + 1] += 1
                inc = degrees.get(flow.target)
                if inc is None:
                    inc = degrees[flow.target] = [0] * 6
                inc[slot] += 1

    def get(self, ident: str) -> Optional[Entry]:
        return self.entries.get(ident)

    def resolve(self, ref: Union[ElementRef, str]) -> Entry:
        if isinstance(ref, str):
            entry = self.entries.get(ref)
            if entry is None:
                raise UnresolvedReference(ref)
            return entry
        entry = self.entries.get(ref.id)
        if entry is None or entry.view is not ref.view:
            raise UnresolvedReference(ref.id, ref.view)
        return entry

    def degrees(self, ident: str) -> DegreeVector:
        counts = self._degrees.get(ident)
        return DegreeVector(*counts) if counts else DegreeVector()

    def links_of(self, ident: str) -> list[Link]:
        return self.links_by_element.get(ident, [])


def kind_of(ref: Union[ElementRef, str], spec: MesSpec) -> ElementKind:
    return spec.index.resolve(ref).kind


def view_of(ref: Union[ElementRef, str], spec: MesSpec) -> ViewTag:
    return spec.index.resolve(ref).view


def compute_degrees(ref: Union[ElementRef, str], spec: MesSpec) -> DegreeVector:
    """Count attached sequence, message and data flows of a flow or data object."""
    entry = spec.index.resolve(ref)
    if entry.kind not in FLOW_OBJECT_KINDS and entry.kind is not ElementKind.DATA_OBJECT:
        raise UnsupportedKind(f"degrees are defined for flow and data objects, not {entry.kind.value}")
    return spec.index.degrees(entry.element.id)
