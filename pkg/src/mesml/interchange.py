"""Textual interchange format (``.mesml``) for MES-ML specifications.

The format is YAML with four top-level sections::

    ts:     plant root node, nested ``children``
    pp:     production process diagram content
    mes:    MES/IT diagram content plus ``pools``
    links:  list of cross-view links

Documents are read from the composed YAML node graph rather than through the
constructor, so scalars keep their raw spelling and every error carries a
source position. Parsing collects all errors before failing.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Optional, Union

import yaml

from .metamodel import (
    Activity,
    ActivityRef,
    ConnectorType,
    DataKind,
    DataObject,
    DegreeVector,
    Diagram,
    ElementKind,
    ElementRef,
    Event,
    EventBehavior,
    EventExec,
    ExecType,
    FLOW_KIND_TO_ELEMENT,
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
    MesmlError,
    MesSpec,
    Pool,
    PREDEFINED_CONNECTORS,
    ProcessModel,
    Repetition,
    ReqStatus,
    SignalRef,
    TechnicalSystemModel,
    TextAnnotation,
    TS_KIND_TO_ELEMENT,
    TsKind,
    TsNode,
    ViewTag,
)

try:
    _Loader = yaml.CSafeLoader
    _Dumper = yaml.CSafeDumper
except AttributeError:  # pragma: no cover - libyaml missing
    _Loader = yaml.SafeLoader
    _Dumper = yaml.SafeDumper

FILE_SUFFIX = ".mesml"

ALIASES: dict[type, dict[str, str]] = {
    EventExec: {"end": "stop"},
    GatewayExec: {"exclusiv": "exclusive", "inclusiv": "inclusive"},
}


class ParseCategory(Enum):
    SYNTAX = "Syntax"
    UNKNOWN_KEY = "UnknownKey"
    BAD_ENUM = "BadEnum"
    DUPLICATE_ID = "DuplicateId"
    DANGLING_REF = "DanglingRef"
    MISSING_SUBMODEL = "MissingSubmodel"


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int
    length: int = 0

    def __post_init__(self) -> None:
        if self.line < 1 or self.column < 1:
            raise ValueError("line and column are 1-based")

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class ParseError:
    span: SourceSpan
    message: str
    category: ParseCategory

    def __str__(self) -> str:
        return f"{self.span}: {self.category.value}: {self.message}"


class SpecParseError(MesmlError):
    def __init__(self, errors: list[ParseError]):
        self.errors = errors
        head = str(errors[0]) if errors else "parse failed"
        more = f" (+{len(errors) - 1} more)" if len(errors) > 1 else ""
        super().__init__(head + more)


_DIAGRAM_KEYS = (
    "activities", "events", "gateways", "activity_refs", "signal_refs",
    "data_objects", "flows", "annotations", "groups",
)
_SECTIONS = ("ts", "pp", "mes", "links")


def _is_null(node: yaml.Node) -> bool:
    return isinstance(node, yaml.ScalarNode) and node.tag.endswith(":null") and node.style is None


class _Parser:
    def __init__(self, filename: str):
        self.filename = filename
        self.errors: list[ParseError] = []
        # id -> (view, kind, diagram key or None, span)
        self.ids: dict[str, tuple[ViewTag, ElementKind, Any, SourceSpan]] = {}
        self.deferred: list[Callable[[], None]] = []

    # -- primitives -------------------------------------------------------

    def span(self, node: yaml.Node) -> SourceSpan:
        start, end = node.start_mark, node.end_mark
        return SourceSpan(self.filename, start.line + 1, start.column + 1, max(end.index - start.index, 0))

    def error(self, node: Optional[yaml.Node], category: ParseCategory, message: str) -> None:
        span = self.span(node) if node is not None else SourceSpan(self.filename, 1, 1)
        self.errors.append(ParseError(span, message, category))

    def mapping(self, node: yaml.Node, what: str, keys: tuple[str, ...],
                required: tuple[str, ...] = ()) -> Optional[dict[str, yaml.Node]]:
        if not isinstance(node, yaml.MappingNode):
            self.error(node, ParseCategory.SYNTAX, f"{what}: expected a mapping")
            return None
        out: dict[str, yaml.Node] = {}
        for key_node, value in node.value:
            key = key_node.value if isinstance(key_node, yaml.ScalarNode) else None
            if key is None:
                self.error(key_node, ParseCategory.SYNTAX, f"{what}: keys must be scalars")
            elif key not in keys:
                self.error(key_node, ParseCategory.UNKNOWN_KEY, f"{what}: unknown key {key!r}")
            elif key in out:
                self.error(key_node, ParseCategory.SYNTAX, f"{what}: duplicate key {key!r}")
            else:
                out[key] = value
        ok = True
        for key in required:
            if key not in out:
                self.error(node, ParseCategory.SYNTAX, f"{what}: missing required key {key!r}")
                ok = False
        return out if ok else None

    def sequence(self, node: yaml.Node, what: str) -> list[yaml.Node]:
        if _is_null(node):
            return []
        if not isinstance(node, yaml.SequenceNode):
            self.error(node, ParseCategory.SYNTAX, f"{what}: expected a list")
            return []
        return list(node.value)

    def string(self, node: yaml.Node, what: str) -> Optional[str]:
        if not isinstance(node, yaml.ScalarNode) or _is_null(node):
            self.error(node, ParseCategory.SYNTAX, f"{what}: expected a non-empty string")
            return None
        if node.value == "":
            self.error(node, ParseCategory.SYNTAX, f"{what}: must be non-empty")
            return None
        return node.value

    def integer(self, node: yaml.Node, what: str, minimum: int = 0) -> Optional[int]:
        if isinstance(node, yaml.ScalarNode):
            try:
                value = int(node.value)
            except ValueError:
                pass
            else:
                if value >= minimum:
                    return value
        self.error(node, ParseCategory.SYNTAX, f"{what}: expected an integer >= {minimum}")
        return None

    def enum(self, node: yaml.Node, enum_cls: type[Enum], what: str) -> Optional[Any]:
        if not isinstance(node, yaml.ScalarNode):
            self.error(node, ParseCategory.SYNTAX, f"{what}: expected an enumeration literal")
            return None
        raw = node.value.strip().lower()
        raw = ALIASES.get(enum_cls, {}).get(raw, raw)
        try:
            return enum_cls(raw)
        except ValueError:
            choices = "|".join(m.value for m in enum_cls)
            self.error(node, ParseCategory.BAD_ENUM, f"{what}: {node.value!r} is not one of {choices}")
            return None

    def register(self, ident: Optional[str], node: yaml.Node, view: ViewTag,
                 kind: ElementKind, scope: Any = None) -> None:
        if ident is None:
            return
        if ident in self.ids:
            first = self.ids[ident][3]
            self.error(node, ParseCategory.DUPLICATE_ID, f"id {ident!r} already defined at {first}")
            return
        self.ids[ident] = (view, kind, scope, self.span(node))

    # -- technical system -------------------------------------------------

    def ts_node(self, node: yaml.Node) -> Optional[TsNode]:
        fields = self.mapping(node, "ts node", ("id", "kind", "name", "attrs", "children"),
                              ("id", "kind", "name"))
        if fields is None:
            return None
        ident = self.string(fields["id"], "ts node id")
        kind = self.enum(fields["kind"], TsKind, "ts node kind")
        name = self.string(fields["name"], "ts node name")
        attrs: dict[str, str] = {}
        if "attrs" in fields and not _is_null(fields["attrs"]):
            attr_node = fields["attrs"]
            if isinstance(attr_node, yaml.MappingNode):
                for key_node, value in attr_node.value:
                    if not (isinstance(key_node, yaml.ScalarNode) and isinstance(value, yaml.ScalarNode)):
                        self.error(key_node, ParseCategory.SYNTAX, "attrs: expected scalar key/value pairs")
                    elif key_node.value in attrs:
                        self.error(key_node, ParseCategory.SYNTAX, f"attrs: duplicate key {key_node.value!r}")
                    else:
                        attrs[key_node.value] = value.value
            else:
                self.error(attr_node, ParseCategory.SYNTAX, "attrs: expected a mapping")
        children = []
        for child_node in self.sequence(fields.get("children", _EMPTY), "children"):
            child = self.ts_node(child_node)
            if child is not None:
                children.append(child)
        if kind is not None:
            self.register(ident, fields["id"], ViewTag.TS, TS_KIND_TO_ELEMENT[kind])
        if attrs and kind is not TsKind.SIGNAL and kind is not None:
            self.error(fields["attrs"], ParseCategory.UNKNOWN_KEY, "attrs: only signals carry attributes")
        if ident is None or kind is None or name is None:
            return None
        return TsNode(ident, kind, name, tuple(children), attrs)

    # -- process models ---------------------------------------------------

    def process_model(self, node: yaml.Node, view: ViewTag) -> Optional[ProcessModel]:
        keys = _DIAGRAM_KEYS + (("pools",) if view is ViewTag.MES else ())
        fields = self.mapping(node, f"{view.value} model", keys)
        if fields is None:
            return None
        pools = []
        if "pools" in fields:
            for pool_node in self.sequence(fields["pools"], "pools"):
                pool = self.pool(pool_node, view)
                if pool is not None:
                    pools.append(pool)
        content = self.diagram_fields(fields, view, ())
        return ProcessModel(view, content, tuple(pools))

    def pool(self, node: yaml.Node, view: ViewTag) -> Optional[Pool]:
        fields = self.mapping(node, "pool", ("id", "name", "rank", "lanes"), ("id", "name"))
        if fields is None:
            return None
        ident = self.string(fields["id"], "pool id")
        name = self.string(fields["name"], "pool name")
        rank = self.integer(fields["rank"], "pool rank") if "rank" in fields else 0
        self.register(ident, fields["id"], view, ElementKind.POOL)
        lanes = []
        for lane_node in self.sequence(fields.get("lanes", _EMPTY), "lanes"):
            lf = self.mapping(lane_node, "lane", ("id", "name", "rank"), ("id", "name"))
            if lf is None:
                continue
            lane_id = self.string(lf["id"], "lane id")
            lane_name = self.string(lf["name"], "lane name")
            lane_rank = self.integer(lf["rank"], "lane rank") if "rank" in lf else 0
            self.register(lane_id, lf["id"], view, ElementKind.LANE)
            if None not in (lane_id, lane_name, lane_rank):
                lanes.append(Lane(lane_id, lane_name, lane_rank))
        if None in (ident, name, rank):
            return None
        return Pool(ident, name, rank, tuple(lanes))

    def diagram(self, node: yaml.Node, view: ViewTag, path: tuple[str, ...]) -> Optional[Diagram]:
        fields = self.mapping(node, "subprocess", _DIAGRAM_KEYS)
        if fields is None:
            return None
        return self.diagram_fields(fields, view, path)

    def diagram_fields(self, fields: dict[str, yaml.Node], view: ViewTag,
                       path: tuple[str, ...]) -> Diagram:
        parts: dict[str, list] = {key: [] for key in _DIAGRAM_KEYS}
        builders = {
            "activities": self.activity,
            "events": self.event,
            "gateways": self.gateway,
            "activity_refs": self.activity_ref,
            "signal_refs": self.signal_ref,
            "data_objects": self.data_object,
            "flows": self.flow,
            "annotations": self.annotation,
            "groups": self.group,
        }
        for key in _DIAGRAM_KEYS:
            if key not in fields:
                continue
            for item in self.sequence(fields[key], key):
                element = builders[key](item, view, path)
                if element is not None:
                    parts[key].append(element)
        return Diagram(**{key: tuple(items) for key, items in parts.items()})

    def _common(self, node, what, keys, required, view, kind, path):
        fields = self.mapping(node, what, keys, required)
        if fields is None:
            return None, None
        ident = self.string(fields["id"], f"{what} id")
        self.register(ident, fields["id"], view, kind, (view, path))
        return fields, ident

    def degrees(self, node: yaml.Node) -> Optional[DegreeVector]:
        fields = self.mapping(node, "degrees", DegreeVector.FIELDS)
        if fields is None:
            return None
        values = {k: self.integer(v, f"degrees.{k}") for k, v in fields.items()}
        if None in values.values():
            return None
        return DegreeVector(**values)

    def activity(self, node, view, path) -> Optional[Activity]:
        keys = ("id", "name", "exec", "repetition", "status", "degrees", "subprocess")
        if view is ViewTag.MES:
            keys += ("lane",)
        fields, ident = self._common(node, "activity", keys, ("id", "name"), view, ElementKind.ACTIVITY, path)
        if fields is None:
            return None
        name = self.string(fields["name"], "activity name")
        attrs: dict[str, Any] = {}
        for key, enum_cls, attr in (("exec", ExecType, "exec_type"), ("repetition", Repetition, "repetition"),
                                    ("status", ReqStatus, "status")):
            if key in fields:
                attrs[attr] = self.enum(fields[key], enum_cls, f"activity {key}")
                if attrs[attr] is None:
                    return None
        if "degrees" in fields:
            attrs["declared_degrees"] = self.degrees(fields["degrees"])
        if "lane" in fields:
            lane = self.string(fields["lane"], "activity lane")
            attrs["lane"] = lane
            if lane is not None:
                self.defer_lane(lane, fields["lane"], view)
        if "subprocess" in fields and ident is not None:
            attrs["subprocess"] = self.diagram(fields["subprocess"], view, path + (ident,))
        if ident is None or name is None:
            return None
        return Activity(ident, name, **attrs)

    def event(self, node, view, path) -> Optional[Event]:
        fields, ident = self._common(node, "event", ("id", "name", "exec", "behavior"), ("id", "exec"),
                                     view, ElementKind.EVENT, path)
        if fields is None:
            return None
        exec_type = self.enum(fields["exec"], EventExec, "event exec")
        behavior = None
        if "behavior" in fields and not _is_null(fields["behavior"]):
            behavior = self.enum(fields["behavior"], EventBehavior, "event behavior")
            if behavior is None:
                return None
        name = self.string(fields["name"], "event name") if "name" in fields else None
        if ident is None or exec_type is None:
            return None
        return Event(ident, exec_type, behavior, name)

    def gateway(self, node, view, path) -> Optional[Gateway]:
        fields, ident = self._common(node, "gateway", ("id", "name", "exec", "behavior", "degrees"),
                                     ("id", "exec", "behavior"), view, ElementKind.GATEWAY, path)
        if fields is None:
            return None
        exec_type = self.enum(fields["exec"], GatewayExec, "gateway exec")
        behavior = self.enum(fields["behavior"], GatewayBehavior, "gateway behavior")
        name = self.string(fields["name"], "gateway name") if "name" in fields else None
        declared = self.degrees(fields["degrees"]) if "degrees" in fields else None
        if ident is None or exec_type is None or behavior is None:
            return None
        return Gateway(ident, exec_type, behavior, name, declared)

    def _reference(self, node, view, path, what, kind, cls):
        fields, ident = self._common(node, what, ("id", "name", "target"), ("id", "name", "target"),
                                     view, kind, path)
        if fields is None:
            return None
        name = self.string(fields["name"], f"{what} name")
        target = self.string(fields["target"], f"{what} target")
        if target is not None:
            target_node = fields["target"]

            def check() -> None:
                if target not in self.ids:
                    self.error(target_node, ParseCategory.DANGLING_REF, f"{what} target {target!r} does not exist")

            self.deferred.append(check)
        if None in (ident, name, target):
            return None
        return cls(ident, name, target)

    def activity_ref(self, node, view, path):
        return self._reference(node, view, path, "activity_ref", ElementKind.ACTIVITY_REF, ActivityRef)

    def signal_ref(self, node, view, path):
        return self._reference(node, view, path, "signal_ref", ElementKind.SIGNAL_REF, SignalRef)

    def data_object(self, node, view, path) -> Optional[DataObject]:
        fields, ident = self._common(node, "data_object", ("id", "name", "kind"), ("id", "name"),
                                     view, ElementKind.DATA_OBJECT, path)
        if fields is None:
            return None
        name = self.string(fields["name"], "data_object name")
        kind = self.enum(fields["kind"], DataKind, "data_object kind") if "kind" in fields else DataKind.SINGLE
        if None in (ident, name, kind):
            return None
        return DataObject(ident, name, kind)

    def flow(self, node, view, path) -> Optional[Flow]:
        fields = self.mapping(node, "flow", ("id", "kind", "source", "target"), ("id", "kind", "source", "target"))
        if fields is None:
            return None
        ident = self.string(fields["id"], "flow id")
        kind = self.enum(fields["kind"], FlowKind, "flow kind")
        source = self.string(fields["source"], "flow source")
        target = self.string(fields["target"], "flow target")
        if kind is not None:
            self.register(ident, fields["id"], view, FLOW_KIND_TO_ELEMENT[kind], (view, path))
        for end, end_node in ((source, fields["source"]), (target, fields["target"])):
            if end is not None:
                self.defer_endpoint(end, end_node, view, path, f"flow {ident!r}")
        if None in (ident, kind, source, target):
            return None
        try:
            return Flow(ident, kind, source, target)
        except ValueError as exc:
            self.error(node, ParseCategory.SYNTAX, str(exc))
            return None

    def annotation(self, node, view, path) -> Optional[TextAnnotation]:
        fields, ident = self._common(node, "annotation", ("id", "text"), ("id", "text"),
                                     view, ElementKind.TEXT_ANNOTATION, path)
        if fields is None:
            return None
        text = self.string(fields["text"], "annotation text")
        if ident is None or text is None:
            return None
        return TextAnnotation(ident, text)

    def group(self, node, view, path) -> Optional[Group]:
        fields, ident = self._common(node, "group", ("id", "members"), ("id", "members"),
                                     view, ElementKind.GROUP, path)
        if fields is None:
            return None
        members = []
        for member_node in self.sequence(fields["members"], "group members"):
            member = self.string(member_node, "group member")
            if member is not None:
                members.append(member)
                self.defer_member(member, member_node, view)
        if not members:
            self.error(fields["members"], ParseCategory.SYNTAX, "group members must be non-empty")
            return None
        if ident is None:
            return None
        return Group(ident, tuple(members))

    # -- deferred reference checks ----------------------------------------

    def defer_lane(self, lane: str, node: yaml.Node, view: ViewTag) -> None:
        def check() -> None:
            info = self.ids.get(lane)
            if info is None or info[0] is not view or info[1] not in (ElementKind.POOL, ElementKind.LANE):
                self.error(node, ParseCategory.DANGLING_REF, f"lane {lane!r} is not a pool or lane of the MES model")

        self.deferred.append(check)

    def defer_endpoint(self, ident: str, node: yaml.Node, view: ViewTag, path: tuple[str, ...], what: str) -> None:
        def check() -> None:
            info = self.ids.get(ident)
            if info is None:
                self.error(node, ParseCategory.DANGLING_REF, f"{what}: endpoint {ident!r} does not exist")
            elif info[1] in (ElementKind.POOL, ElementKind.LANE):
                if info[0] is not view:
                    self.error(node, ParseCategory.DANGLING_REF, f"{what}: endpoint {ident!r} is outside this model")
            elif info[2] != (view, path):
                self.error(node, ParseCategory.DANGLING_REF, f"{what}: endpoint {ident!r} is outside this diagram")

        self.deferred.append(check)

    def defer_member(self, ident: str, node: yaml.Node, view: ViewTag) -> None:
        def check() -> None:
            info = self.ids.get(ident)
            if info is None or info[0] is not view:
                self.error(node, ParseCategory.DANGLING_REF, f"group member {ident!r} is not in the {view.name} model")

        self.deferred.append(check)

    # -- links ------------------------------------------------------------

    def connector(self, node: yaml.Node) -> Optional[ConnectorType]:
        if _is_null(node):
            return None
        if isinstance(node, yaml.MappingNode):
            fields = self.mapping(node, "connector", ("custom",), ("custom",))
            if fields is None:
                return None
            name = self.string(fields["custom"], "custom connector")
            return ConnectorType.custom(name) if name is not None else None
        if isinstance(node, yaml.ScalarNode):
            raw = node.value.strip().lower()
            if raw in PREDEFINED_CONNECTORS:
                return ConnectorType(raw)
            self.error(node, ParseCategory.BAD_ENUM,
                       f"connector {node.value!r} is not one of {'|'.join(PREDEFINED_CONNECTORS)}; "
                       "use {custom: NAME} for user-defined connectors")
            return None
        self.error(node, ParseCategory.SYNTAX, "connector: expected a name or {custom: NAME}")
        return None

    def endpoint(self, node: yaml.Node, what: str) -> Optional[ElementRef]:
        text = self.string(node, what)
        if text is None:
            return None
        view, sep, ident = text.partition(":")
        if not sep or not ident:
            self.error(node, ParseCategory.SYNTAX, f"{what}: expected 'view:id', got {text!r}")
            return None
        try:
            tag = ViewTag(view.strip().lower())
        except ValueError:
            self.error(node, ParseCategory.BAD_ENUM, f"{what}: unknown view {view!r}")
            return None

        def check() -> None:
            info = self.ids.get(ident)
            if info is None:
                self.error(node, ParseCategory.DANGLING_REF, f"{what}: element {ident!r} does not exist")
            elif info[0] is None:
                self.error(node, ParseCategory.DANGLING_REF, f"{what}: {ident!r} is a link, not an element")
            elif info[0] is not tag:
                self.error(node, ParseCategory.DANGLING_REF,
                           f"{what}: element {ident!r} resides in {info[0].name}, not {tag.name}")

        self.deferred.append(check)
        return ElementRef(tag, ident)

    def link(self, node: yaml.Node) -> Optional[Link]:
        fields = self.mapping(node, "link", ("id", "type", "connector", "source", "target"),
                              ("id", "type", "source", "target"))
        if fields is None:
            return None
        ident = self.string(fields["id"], "link id")
        link_type = self.enum(fields["type"], LinkType, "link type")
        if ident is not None:
            if ident in self.ids:
                self.error(fields["id"], ParseCategory.DUPLICATE_ID,
                           f"id {ident!r} already defined at {self.ids[ident][3]}")
            else:
                self.ids[ident] = (None, None, None, self.span(fields["id"]))
        source = self.endpoint(fields["source"], "link source")
        target = self.endpoint(fields["target"], "link target")
        connector = self.connector(fields["connector"]) if "connector" in fields else None
        if None in (ident, link_type, source, target):
            return None
        return Link(ident, link_type, source, target, connector)

    # -- document ---------------------------------------------------------

    def document(self, root: Optional[yaml.Node]) -> Optional[MesSpec]:
        if root is None:
            for section in _SECTIONS:
                self.error(None, ParseCategory.MISSING_SUBMODEL, f"missing section {section!r}")
            return None
        fields = self.mapping(root, "document", _SECTIONS)
        if fields is None:
            return None
        for section in _SECTIONS:
            if section not in fields or _is_null(fields[section]):
                self.error(root, ParseCategory.MISSING_SUBMODEL, f"missing section {section!r}")

        ts_root = self.ts_node(fields["ts"]) if "ts" in fields and not _is_null(fields["ts"]) else None
        models = {}
        for view in (ViewTag.PP, ViewTag.MES):
            node = fields.get(view.value)
            models[view] = self.process_model(node, view) if node is not None and not _is_null(node) else None
        links = []
        if "links" in fields and not _is_null(fields["links"]):
            for link_node in self.sequence(fields["links"], "links"):
                link = self.link(link_node)
                if link is not None:
                    links.append(link)
        for check in self.deferred:
            check()
        if self.errors:
            return None
        return MesSpec(
            mes_model=models[ViewTag.MES],
            pp_model=models[ViewTag.PP],
            ts_model=TechnicalSystemModel(ts_root),
            link_model=LinkModel(tuple(links)),
        )


_EMPTY = yaml.SequenceNode("tag:yaml.org,2002:seq", [])


def parse_spec(text: str, filename: str = "<string>") -> MesSpec:
    """Parse a ``.mesml`` document. Raises :class:`SpecParseError` with every problem found."""
    parser = _Parser(filename)
    try:
        root = yaml.compose(text, Loader=_Loader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line, col = (mark.line + 1, mark.column + 1) if mark is not None else (1, 1)
        problem = exc.problem or exc.context or "invalid document"
        raise SpecParseError([ParseError(SourceSpan(filename, line, col), problem, ParseCategory.SYNTAX)]) from None
    except yaml.YAMLError as exc:
        raise SpecParseError([ParseError(SourceSpan(filename, 1, 1), str(exc), ParseCategory.SYNTAX)]) from None
    spec = parser.document(root)
    if spec is None:
        raise SpecParseError(parser.errors)
    return spec


def load_spec(path: Union[str, Path]) -> MesSpec:
    path = Path(path)
    return parse_spec(path.read_text(encoding="utf-8"), str(path))


# -- serialization ----------------------------------------------------------


def _degrees_dict(d: DegreeVector) -> dict:
    return {name: getattr(d, name) for name in DegreeVector.FIELDS}


def _ts_dict(node: TsNode) -> dict:
    out: dict[str, Any] = {"id": node.id, "kind": node.kind.value, "name": node.name}
    if node.attrs:
        out["attrs"] = dict(node.attrs)
    if node.children:
        out["children"] = [_ts_dict(child) for child in node.children]
    return out


def _activity_dict(a: Activity) -> dict:
    out: dict[str, Any] = {
        "id": a.id,
        "name": a.name,
        "exec": a.exec_type.value,
        "repetition": a.repetition.value,
        "status": a.status.value,
    }
    if a.lane is not None:
        out["lane"] = a.lane
    if a.declared_degrees is not None:
        out["degrees"] = _degrees_dict(a.declared_degrees)
    if a.subprocess is not None:
        out["subprocess"] = _diagram_dict(a.subprocess)
    return out


def _event_dict(e: Event) -> dict:
    out: dict[str, Any] = {"id": e.id}
    if e.name is not None:
        out["name"] = e.name
    out["exec"] = e.exec_type.value
    if e.behavior is not None:
        out["behavior"] = e.behavior.value
    return out


def _gateway_dict(g: Gateway) -> dict:
    out: dict[str, Any] = {"id": g.id}
    if g.name is not None:
        out["name"] = g.name
    out["exec"] = g.exec_type.value
    out["behavior"] = g.behavior.value
    if g.declared_degrees is not None:
        out["degrees"] = _degrees_dict(g.declared_degrees)
    return out


def _diagram_dict(d: Diagram) -> dict:
    out: dict[str, Any] = {}
    if d.activities:
        out["activities"] = [_activity_dict(a) for a in d.activities]
    if d.events:
        out["events"] = [_event_dict(e) for e in d.events]
    if d.gateways:
        out["gateways"] = [_gateway_dict(g) for g in d.gateways]
    if d.activity_refs:
        out["activity_refs"] = [{"id": r.id, "name": r.name, "target": r.target} for r in d.activity_refs]
    if d.signal_refs:
        out["signal_refs"] = [{"id": r.id, "name": r.name, "target": r.target} for r in d.signal_refs]
    if d.data_objects:
        out["data_objects"] = [{"id": o.id, "name": o.name, "kind": o.kind.value} for o in d.data_objects]
    if d.flows:
        out["flows"] = [{"id": f.id, "kind": f.kind.value, "source": f.source, "target": f.target} for f in d.flows]
    if d.annotations:
        out["annotations"] = [{"id": t.id, "text": t.text} for t in d.annotations]
    if d.groups:
        out["groups"] = [{"id": g.id, "members": list(g.members)} for g in d.groups]
    return out


def _model_dict(model: ProcessModel) -> dict:
    out: dict[str, Any] = {}
    if model.pools:
        out["pools"] = [
            {
                "id": p.id,
                "name": p.name,
                "rank": p.rank,
                **({"lanes": [{"id": l.id, "name": l.name, "rank": l.rank} for l in p.lanes]} if p.lanes else {}),
            }
            for p in model.pools
        ]
    out.update(_diagram_dict(model.content))
    return out


def _link_dict(link: Link) -> dict:
    out: dict[str, Any] = {
        "id": link.id,
        "type": link.link_type.value,
        "source": str(link.source),
        "target": str(link.target),
    }
    if link.connector is not None:
        c = link.connector
        out["connector"] = c.name if c.predefined else {"custom": c.name}
    return out


def spec_to_dict(spec: MesSpec) -> dict:
    """Canonical plain-data form of a spec (the structure that gets serialized)."""
    if spec.ts_model is None or spec.pp_model is None or spec.mes_model is None or spec.link_model is None:
        raise MesmlError("cannot serialize a spec with a missing sub-model")
    return {
        "ts": _ts_dict(spec.ts_model.root),
        "pp": _model_dict(spec.pp_model),
        "mes": _model_dict(spec.mes_model),
        "links": [_link_dict(link) for link in spec.link_model.canonical()],
    }


def serialize_spec(spec: MesSpec) -> str:
    """Deterministic canonical text: fixed key order, elements and links sorted by id."""
    return yaml.dump(
        spec_to_dict(spec),
        Dumper=_Dumper,
        sort_keys=False,
        default_flow_style=False,
        allow_unicode=True,
        width=1_000_000,
    )


def dump_spec(spec: MesSpec, path: Union[str, Path]) -> None:
    Path(path).write_text(serialize_spec(spec), encoding="utf-8")
