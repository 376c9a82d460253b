"""Link legality: which cross-view links are well-formed.

The kind-level decision (:func:`kind_verdict`) is a pure function of the two
endpoint placements and the link type. :func:`check_link` adds the
per-instance checks that the table cannot express: link events and
name equality of equivalence partners.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .metamodel import (
    CONNECTING_KINDS,
    ElementKind,
    Link,
    LinkType,
    MesSpec,
    TS_KINDS,
    ViewTag,
    possible_views,
)

K = ElementKind

NEVER_LINKABLE = CONNECTING_KINDS | {K.GATEWAY, K.TEXT_ANNOTATION}

DATA_TRANSFER_KINDS = frozenset(
    {K.ACTIVITY, K.EVENT, K.DATA_OBJECT, K.GROUP, K.POOL, K.LANE}
    | (TS_KINDS - {K.PLANT})
)

DEPLOYMENT_TARGETS = frozenset({K.AREA, K.UNIT, K.USER_DEFINED_LAYER})

PROCESS_VIEWS = frozenset({ViewTag.MES, ViewTag.PP})


@dataclass(frozen=True)
class LinkLegality:
    allowed: bool
    rule: Optional[str] = None
    reason: str = field(default="", compare=False)

    def __bool__(self) -> bool:
        return self.allowed

    def __str__(self) -> str:
        return "Allowed" if self.allowed else f"Forbidden({self.rule})"


ALLOWED = LinkLegality(True)


def forbidden(rule: str, reason: str) -> LinkLegality:
    return LinkLegality(False, rule, reason)


@dataclass(frozen=True)
class Placement:
    """An element kind together with the view it resides in."""

    kind: ElementKind
    view: ViewTag

    def __str__(self) -> str:
        return f"{self.kind.value}[{self.view.name}]"


def all_placements() -> list[Placement]:
    return [Placement(kind, view) for kind in ElementKind for view in possible_views(kind)]


def kind_verdict(source: Placement, target: Placement, link_type: LinkType) -> LinkLegality:
    for end in (source, target):
        if end.kind in NEVER_LINKABLE:
            return forbidden("W-LK-01", f"{end.kind.value} elements cannot be linked")
    if source.view is target.view:
        return forbidden("W-LK-02", f"both endpoints are in the {source.view.name} view")

    if link_type is LinkType.DATA_TRANSFER:
        for end in (source, target):
            if end.kind not in DATA_TRANSFER_KINDS:
                return forbidden("W-LK-03", f"{end.kind.value} is not a data transfer endpoint")
        return ALLOWED

    if link_type is LinkType.EQUIVALENCE:
        kinds = {source.kind, target.kind}
        views = {source.view, target.view}
        if views == {ViewTag.MES, ViewTag.PP}:
            if kinds == {K.ACTIVITY, K.ACTIVITY_REF}:
                return ALLOWED
            return forbidden("W-LK-04", "MES/PP equivalence requires an activity and an activity reference")
        if kinds == {K.SIGNAL, K.SIGNAL_REF}:
            return ALLOWED
        return forbidden("W-LK-04", "TS equivalence requires a signal and a signal reference")

    # deployment
    if source.view not in PROCESS_VIEWS or target.view is not ViewTag.TS:
        return forbidden("W-LK-06", "deployment runs from a process element to the technical system")
    if source.kind is not K.ACTIVITY:
        return forbidden("W-LK-06", f"only activities can be deployed, not {source.kind.value}")
    if target.kind not in DEPLOYMENT_TARGETS:
        return forbidden("W-LK-06", f"activities deploy to areas, units or user-defined layers, not {target.kind.value}")
    return ALLOWED


def check_link(link: Link, spec: MesSpec) -> LinkLegality:
    """Full legality of one link; raises UnresolvedReference for a dangling endpoint."""
    index = spec.index
    src = index.resolve(link.source)
    dst = index.resolve(link.target)
    for entry in (src, dst):
        if entry.kind is K.EVENT and entry.element.is_link_event:
            return forbidden("W-LK-01", f"link event {entry.element.id!r} cannot be linked")
    verdict = kind_verdict(Placement(src.kind, src.view), Placement(dst.kind, dst.view), link.link_type)
    if not verdict:
        return verdict
    if link.link_type is LinkType.EQUIVALENCE and src.name != dst.name:
        return forbidden("W-LK-05", f"equivalent elements are named {src.name!r} and {dst.name!r}")
    return ALLOWED


def legality_table() -> dict[tuple[Placement, Placement, LinkType], LinkLegality]:
    """Kind-level verdict for every ordered pair of placements and every link type."""
    placements = all_placements()
    return {
        (s, t, lt): kind_verdict(s, t, lt)
        for s in placements
        for t in placements
        for lt in LinkType
    }
