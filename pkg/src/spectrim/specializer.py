"""Debloating of manifests and class-level stripping of used dependencies."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from spectrim.callgraph import DependencyClassification
from spectrim.errors import ConfigError, DeploymentError
from spectrim.model import Archive, PackageId, ProjectManifest, Scope
from spectrim.repository import ChecksumRecord, Repository, compute_checksum
from spectrim.resolver import ResolvedTree

DEFAULT_PREFIX = "deptrim.spl"


@dataclass(frozen=True)
class SpecializedArtifact:
    original_id: PackageId
    specialized_id: PackageId
    kept_units: int
    removed_units: int
    checksum: ChecksumRecord


def specialized_coordinates(pid: PackageId, group_prefix: str = DEFAULT_PREFIX) -> PackageId:
    """Rewrite only the group, keeping the original group as a suffix.

    Already-prefixed coordinates are returned unchanged.
    """
    if not group_prefix or ":" in group_prefix:
        raise ConfigError(f"invalid specialized group prefix {group_prefix!r}")
    if pid.group.startswith(group_prefix + "."):
        return pid
    return pid.with_group(f"{group_prefix}.{pid.group}")


def debloat_manifest(
    manifest: ProjectManifest,
    classification: DependencyClassification,
    tree: ResolvedTree,
) -> ProjectManifest:
    """Drop direct compile dependencies whose whole resolved subtree is bloated."""
    kept = []
    for dep in manifest.dependencies:
        node = tree.node_for(dep.id)
        if dep.scope is Scope.COMPILE and node is not None:
            subtree = [tree.nodes[p] for p in tree.subtree(node.id)]
            if all(n.id in classification.bloated for n in subtree if n.scope is Scope.COMPILE):
                continue
        kept.append(dep)
    if len(kept) == len(manifest.dependencies):
        return manifest
    return replace(manifest, dependencies=tuple(kept))


def specialize_dependency(
    archive: Archive,
    reachable: Iterable[str],
    group_prefix: str = DEFAULT_PREFIX,
) -> tuple[Archive, SpecializedArtifact]:
    reachable = frozenset(reachable)
    if not reachable:
        raise ConfigError(f"{archive.id} has no reachable units; bloated dependencies are removed, not specialized")
    unknown = reachable - archive.unit_names()
    if unknown:
        raise ConfigError(f"{archive.id} has no units named {sorted(unknown)}")
    units = {name: archive.units[name] for name in sorted(reachable)}
    stripped = Archive(
        id=specialized_coordinates(archive.id, group_prefix),
        units=units,
        resources=dict(archive.resources),
        declared_dependencies=archive.declared_dependencies,
    )
    artifact = SpecializedArtifact(
        original_id=archive.id,
        specialized_id=stripped.id,
        kept_units=len(units),
        removed_units=len(archive.units) - len(units),
        checksum=compute_checksum(stripped),
    )
    return stripped, artifact


def deploy_specialized(
    repo: Repository,
    artifacts: Sequence[tuple[Archive, SpecializedArtifact]],
) -> list[PackageId]:
    deployed = []
    failures: list[DeploymentError] = []
    for archive, artifact in artifacts:
        try:
            repo.store(archive)
        except DeploymentError as exc:
            failures.append(exc)
            continue
        deployed.append(artifact.specialized_id)
    if failures:
        coords = [c for f in failures for c in f.coordinates]
        detail = "; ".join(str(f) for f in failures)
        raise DeploymentError(
            f"specialized dependency not deployed for {', '.join(str(c) for c in coords)}: {detail}",
            coords,
        )
    return deployed
