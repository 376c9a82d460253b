"""MES-ML toolchain: parse, validate, query and export MES specifications."""

from .interchange import ParseCategory, ParseError, SpecParseError, load_spec, parse_spec, serialize_spec
from .linker import PreconditionError, data_interfaces, deployment_map, equivalence_pairs, links_of
from .linkmodel import LinkLegality, Placement, check_link, legality_table
from .metamodel import (
    ElementKind,
    ElementRef,
    LinkType,
    MesSpec,
    UnresolvedReference,
    UnsupportedKind,
    ViewTag,
    compute_degrees,
    kind_of,
    view_of,
)
from .reporting import diagram_tree, export_dot, model_stats, render_ts_tree, status_report
from .validator import RULES, Diagnostic, Severity, check_gateway, check_references, validate_spec

__all__ = [
    "RULES",
    "Diagnostic",
    "ElementKind",
    "ElementRef",
    "LinkLegality",
    "LinkType",
    "MesSpec",
    "ParseCategory",
    "ParseError",
    "Placement",
    "PreconditionError",
    "Severity",
    "SpecParseError",
    "UnresolvedReference",
    "UnsupportedKind",
    "ViewTag",
    "check_gateway",
    "check_link",
    "check_references",
    "compute_degrees",
    "data_interfaces",
    "deployment_map",
    "diagram_tree",
    "equivalence_pairs",
    "export_dot",
    "kind_of",
    "legality_table",
    "links_of",
    "load_spec",
    "model_stats",
    "parse_spec",
    "render_ts_tree",
    "serialize_spec",
    "status_report",
    "validate_spec",
    "view_of",
]
