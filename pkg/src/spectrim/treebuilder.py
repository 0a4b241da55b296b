"""Tree-level specialization: totally specialized tree first, then the per-dependency search.

The full pipeline lives in :func:`run_pipeline`.
"""

from __future__ import annotations

import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

from spectrim.buildcheck import BuildOutcome, Builder, command_builder, in_process_builder
from spectrim.callgraph import DependencyClassification, build_call_graph, classify_dependencies
from spectrim.errors import PreconditionError, SpectrimError
from spectrim.model import Dependency, PackageId, ProjectManifest
from spectrim.project import SPECIALIZED_MANIFEST_NAME, Project, load_project, write_manifest
from spectrim.report import SpecializationReport, build_report
from spectrim.repository import Repository, serialize_archive
from spectrim.resolver import ResolvedTree, classpath, resolve_tree
from spectrim.specializer import (
    DEFAULT_PREFIX,
    SpecializedArtifact,
    debloat_manifest,
    deploy_specialized,
    specialize_dependency,
)

log = logging.getLogger(__name__)

TST = "TST"
PST = "PST"


@dataclass(frozen=True)
class SpecializedTreeResult:
    kind: str
    manifest: ProjectManifest
    specialized_deps: frozenset[PackageId]
    reverted_deps: dict = field(default_factory=dict)
    union_backoff_steps: tuple[PackageId, ...] = ()
    final_outcome: Optional[BuildOutcome] = None


def build_tst_manifest(debloated: ProjectManifest, artifacts: Sequence[SpecializedArtifact]) -> ProjectManifest:
    """Pin every artifact's original coordinates to its specialized ones."""
    pins = dict(debloated.pins)
    for art in artifacts:
        if art.original_id in pins:
            raise SpectrimError(f"duplicate pin for {art.original_id}")
        pins[art.original_id] = art.specialized_id
    deps = tuple(Dependency(pins.get(d.id, d.id), d.scope) for d in debloated.dependencies)
    return replace(debloated, dependencies=deps, pins=pins)


def _candidate_name(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", label)


def search_pst(
    project: Project,
    debloated: ProjectManifest,
    artifacts: Sequence[SpecializedArtifact],
    repo: Repository,
    *,
    builder: Builder = in_process_builder,
    jobs: int = 1,
) -> SpecializedTreeResult:
    baseline = builder(project, debloated, repo, "baseline")
    if not baseline.ok:
        raise PreconditionError(
            "original build must pass: the debloated project fails with no specialized dependency "
            f"({baseline.status}: {', '.join(map(str, baseline.diagnostics[:3]))})"
        )

    tst = build_tst_manifest(debloated, artifacts)
    outcome = builder(project, tst, repo, "tst")
    if outcome.ok:
        return SpecializedTreeResult(TST, tst, frozenset(a.original_id for a in artifacts), final_outcome=outcome)
    log.info("totally specialized tree fails (%s); trying one dependency at a time", outcome.status)

    ordered = sorted(artifacts, key=lambda a: str(a.original_id))

    def try_one(art: SpecializedArtifact) -> BuildOutcome:
        candidate = build_tst_manifest(debloated, [art])
        return builder(project, candidate, repo, _candidate_name(f"single-{art.original_id}"))

    if jobs > 1 and len(ordered) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(try_one, ordered))
    else:
        outcomes = [try_one(a) for a in ordered]

    safe = [a for a, o in zip(ordered, outcomes) if o.ok]
    reverted = {a.original_id: o for a, o in zip(ordered, outcomes) if not o.ok}

    backoff: list[PackageId] = []
    step = 0
    while True:
        union = build_tst_manifest(debloated, safe)
        outcome = builder(project, union, repo, "union" if step == 0 else f"backoff-{step}")
        if outcome.ok:
            break
        if not safe:
            raise PreconditionError("debloated project stopped building during union validation")
        # largest removal first, lexicographic tie-break
        victim = min(safe, key=lambda a: (-a.removed_units, str(a.original_id)))
        safe.remove(victim)
        reverted[victim.original_id] = outcome
        backoff.append(victim.original_id)
        step += 1

    return SpecializedTreeResult(
        PST,
        union,
        frozenset(a.original_id for a in safe),
        reverted,
        tuple(backoff),
        final_outcome=outcome,
    )


@dataclass
class PipelineOptions:
    repo: Repository
    jobs: int = 1
    specialized_prefix: str = DEFAULT_PREFIX
    build_command: Optional[str] = None
    ignore_dependencies: tuple[PackageId, ...] = ()
    write_manifest: bool = True


@dataclass
class PipelineState:
    """Everything computed along the way; the report is assembled from this."""

    project: Project
    tree: ResolvedTree
    classification: DependencyClassification
    debloated: ProjectManifest
    debloated_tree: ResolvedTree
    artifacts: list[SpecializedArtifact]
    result: SpecializedTreeResult
    call_graph_diagnostics: list
    specialized_manifest_path: Optional[Path] = None
    # serialized size of the compile classpath for the original, debloated and final trees
    archive_bytes: dict = field(default_factory=dict)


def analyze(project: Project, repo: Repository, ignore: Iterable[PackageId] = ()):
    """Resolve the tree, build the call graph over the compile classpath and classify."""
    tree = resolve_tree(project.manifest, repo)
    archives = [tree.nodes[p].archive for p in classpath(tree, "compile")]
    cg = build_call_graph(project.src_units, archives, project.manifest.entry_points)
    ignored = tuple(project.manifest.ignore_dependencies) + tuple(ignore)
    return tree, cg, classify_dependencies(cg, tree, ignored)


def specialize_all(
    tree: ResolvedTree,
    classification: DependencyClassification,
    debloated_tree: ResolvedTree,
    prefix: str = DEFAULT_PREFIX,
):
    """Strip every non-bloated, not totally used compile dependency still in the debloated tree."""
    present = {n.original for n in debloated_tree.nodes.values()}
    out = []
    for pid in sorted(classification.non_bloated - classification.totally_used, key=str):
        if tree.nodes[pid].original not in present:
            continue
        out.append(specialize_dependency(tree.nodes[pid].archive, classification.reachable_units[pid], prefix))
    return out


def classpath_bytes(tree: ResolvedTree) -> int:
    return sum(len(serialize_archive(n.archive)) for n in tree.compile_nodes())


def execute_pipeline(project_dir, options: PipelineOptions) -> PipelineState:
    repo = options.repo
    project = load_project(project_dir)
    builder = command_builder(options.build_command) if options.build_command else in_process_builder

    original = builder(project, project.manifest, repo, "original")
    if not original.ok:
        raise PreconditionError(
            f"original build must pass ({original.status}: {', '.join(map(str, original.diagnostics[:3]))})"
        )

    tree, cg, classification = analyze(project, repo, options.ignore_dependencies)
    debloated = debloat_manifest(project.manifest, classification, tree)
    debloated_tree = resolve_tree(debloated, repo)

    pairs = specialize_all(tree, classification, debloated_tree, options.specialized_prefix)
    deploy_specialized(repo, pairs)
    artifacts = [art for _, art in pairs]

    result = search_pst(project, debloated, artifacts, repo, builder=builder, jobs=options.jobs)
    state = PipelineState(project, tree, classification, debloated, debloated_tree, artifacts, result, cg.diagnostics)
    state.archive_bytes = {
        "original": classpath_bytes(tree),
        "debloated": classpath_bytes(debloated_tree),
        "specialized": classpath_bytes(resolve_tree(result.manifest, repo)),
    }
    if options.write_manifest:
        state.specialized_manifest_path = write_manifest(project.directory / SPECIALIZED_MANIFEST_NAME, result.manifest)
    return state


def run_pipeline(project_dir, options: PipelineOptions) -> SpecializationReport:
    return build_report(execute_pipeline(project_dir, options))
