"""Queries over the links of a spec: navigation, equivalence pairs, deployments, interfaces."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .linkmodel import check_link
from .metamodel import (
    ConnectorType,
    ElementKind,
    ElementRef,
    Link,
    LinkType,
    MesmlError,
    MesSpec,
)
from .validator import Diagnostic, diagnostic


class PreconditionError(MesmlError):
    """A query was run on a spec whose relevant links are not well-formed."""

    def __init__(self, message: str, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__(message)


@dataclass(frozen=True)
class EquivalencePair:
    original: ElementRef
    reference: ElementRef
    link: str


@dataclass(frozen=True)
class DeploymentEntry:
    process_element: ElementRef
    ts_target: ElementRef
    link: str


@dataclass(frozen=True)
class DeploymentMap:
    entries: tuple[DeploymentEntry, ...]

    def targets(self) -> dict[str, list[DeploymentEntry]]:
        grouped: dict[str, list[DeploymentEntry]] = {}
        for entry in self.entries:
            grouped.setdefault(entry.ts_target.id, []).append(entry)
        return grouped

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class InterfaceEntry:
    link: str
    connector: Optional[ConnectorType]
    source: ElementRef
    target: ElementRef


def links_of(ref: Union[ElementRef, str], spec: MesSpec) -> list[Link]:
    """Links touching ``ref`` in document order."""
    entry = spec.index.resolve(ref)
    return list(spec.index.links_of(entry.element.id))


def _require_clean(spec: MesSpec, link_type: LinkType) -> list[Link]:
    links = [link for link in spec.links if link.link_type is link_type]
    problems = []
    for link in links:
        verdict = check_link(link, spec)
        if not verdict:
            problems.append(diagnostic(verdict.rule, f"link:{link.id}", verdict.reason, link.source))
    if problems:
        ids = ", ".join(str(d.subject) for d in problems)
        raise PreconditionError(f"ill-formed {link_type.value} links: {ids}", problems)
    return links


def equivalence_pairs(spec: MesSpec) -> list[EquivalencePair]:
    """One pair per equivalence link, original element first regardless of link direction."""
    pairs = []
    index = spec.index
    for link in _require_clean(spec, LinkType.EQUIVALENCE):
        source_kind = index.resolve(link.source).kind
        if source_kind in (ElementKind.ACTIVITY, ElementKind.SIGNAL):
            pairs.append(EquivalencePair(link.source, link.target, link.id))
        else:
            pairs.append(EquivalencePair(link.target, link.source, link.id))
    return pairs


def deployment_map(spec: MesSpec) -> DeploymentMap:
    """Deployment entries ordered by TS target id, document order within a target."""
    links = _require_clean(spec, LinkType.DEPLOYMENT)
    entries = [DeploymentEntry(link.source, link.target, link.id) for link in links]
    entries.sort(key=lambda e: e.ts_target.id)
    return DeploymentMap(tuple(entries))


def data_interfaces(spec: MesSpec) -> list[InterfaceEntry]:
    return [
        InterfaceEntry(link.id, link.connector, link.source, link.target)
        for link in _require_clean(spec, LinkType.DATA_TRANSFER)
    ]
