"""Specialize a project's dependency tree by trimming classes it never reaches."""

from spectrim.errors import SpectrimError
from spectrim.model import (
    Archive,
    ClassUnit,
    Dependency,
    Member,
    MemberKind,
    MemberRef,
    PackageId,
    ProjectManifest,
    Scope,
    parse_coordinates,
    render_coordinates,
)
from spectrim.repository import Repository, compute_checksum, open_repository
from spectrim.resolver import resolve_tree
from spectrim.callgraph import build_call_graph, classify_dependencies, reachable_units
from spectrim.specializer import specialize_dependency
from spectrim.buildcheck import full_build
from spectrim.treebuilder import PipelineOptions, run_pipeline, search_pst
from spectrim.report import SpecializationReport, compute_ratios, emit_report

__version__ = "0.1.0"

__all__ = [
    "Archive",
    "ClassUnit",
    "Dependency",
    "Member",
    "MemberKind",
    "MemberRef",
    "PackageId",
    "PipelineOptions",
    "ProjectManifest",
    "Repository",
    "Scope",
    "SpecializationReport",
    "SpectrimError",
    "build_call_graph",
    "classify_dependencies",
    "compute_checksum",
    "compute_ratios",
    "emit_report",
    "full_build",
    "open_repository",
    "parse_coordinates",
    "reachable_units",
    "render_coordinates",
    "resolve_tree",
    "run_pipeline",
    "search_pst",
    "specialize_dependency",
]
