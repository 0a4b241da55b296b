"""Dependency tree resolution with nearest-wins mediation and coordinate pins."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Optional

from spectrim.errors import CycleError, NotFoundError, ResolutionError
from spectrim.model import Archive, PackageId, ProjectManifest, Scope
from spectrim.repository import Repository


@dataclass(frozen=True)
class TreeNode:
    id: PackageId
    archive: Archive
    depth: int
    scope: Scope
    # coordinates before pin substitution; equals ``id`` for unpinned nodes
    original: PackageId
    parent: PackageId


@dataclass(frozen=True)
class ResolvedTree:
    root: PackageId
    nodes: Mapping[PackageId, TreeNode] = field(default_factory=dict)
    edges: tuple[tuple[PackageId, PackageId], ...] = ()
    pins: Mapping[PackageId, PackageId] = field(default_factory=dict)

    def node_for(self, pid: PackageId) -> Optional[TreeNode]:
        """Find a node by resolved or original coordinates."""
        node = self.nodes.get(pid)
        if node is not None:
            return node
        return self.nodes.get(self.pins.get(pid, pid))

    def by_original(self) -> dict[PackageId, TreeNode]:
        return {n.original: n for n in self.nodes.values()}

    def children(self, pid: PackageId) -> list[PackageId]:
        return [c for p, c in self.edges if p == pid]

    def subtree(self, pid: PackageId) -> list[PackageId]:
        out = [pid]
        i = 0
        while i < len(out):
            out.extend(self.children(out[i]))
            i += 1
        return out

    def compile_nodes(self) -> list[TreeNode]:
        return [self.nodes[p] for p in classpath(self, "compile")]


def resolve_tree(manifest: ProjectManifest, repo: Repository) -> ResolvedTree:
    pins = dict(manifest.pins)
    originals = {v: k for k, v in pins.items()}
    root = manifest.id

    winners: dict[tuple[str, str], PackageId] = {root.key: root}
    nodes: dict[PackageId, TreeNode] = {}
    edges: list[tuple[PackageId, PackageId]] = []
    # declared (group, artifact) edges among winners, for cycle detection
    declared: dict[tuple[str, str], list[tuple[str, str]]] = {root.key: []}
    paths: dict[PackageId, tuple[PackageId, ...]] = {root: (root,)}

    queue: deque = deque()
    for dep in manifest.dependencies:
        original = originals.get(dep.id, dep.id)
        declared[root.key].append(original.key)
        queue.append((dep.id, dep.scope, 1, root))

    while queue:
        requested, scope, depth, parent = queue.popleft()
        original = originals.get(requested, requested)
        if original.key in winners:
            continue
        resolved = pins.get(original, requested)
        path = paths[parent] + (resolved,)
        try:
            archive = repo.lookup(resolved)
        except NotFoundError:
            chain = " -> ".join(str(p) for p in path)
            raise ResolutionError(f"missing archive {resolved} (path: {chain})", path) from None
        winners[original.key] = resolved
        paths[resolved] = path
        nodes[resolved] = TreeNode(resolved, archive, depth, scope, original, parent)
        edges.append((parent, resolved))
        children = declared.setdefault(original.key, [])
        for child in archive.declared_dependencies:
            if child.scope is Scope.TEST:
                continue
            children.append(originals.get(child.id, child.id).key)
            queue.append((child.id, scope, depth + 1, resolved))

    _check_cycles(declared, winners)
    return ResolvedTree(root=root, nodes=nodes, edges=tuple(edges), pins=pins)


def _check_cycles(declared: dict, winners: dict) -> None:
    white, grey, black = 0, 1, 2
    colour = {k: white for k in declared}
    stack_path: list = []

    def visit(key) -> None:
        colour[key] = grey
        stack_path.append(key)
        for child in declared.get(key, ()):
            if child not in colour:
                continue
            if colour[child] == grey:
                cycle = stack_path[stack_path.index(child):] + [child]
                ids = tuple(winners[k] for k in cycle)
                raise CycleError("dependency cycle: " + " -> ".join(str(p) for p in ids), ids)
            if colour[child] == white:
                visit(child)
        stack_path.pop()
        colour[key] = black

    for key in sorted(declared):
        if colour[key] == white:
            visit(key)


def classpath(tree: ResolvedTree, phase: str) -> list[PackageId]:
    if phase == "compile":
        wanted = {Scope.COMPILE}
    elif phase == "test":
        wanted = {Scope.COMPILE, Scope.TEST}
    else:
        raise ValueError(f"unknown phase {phase!r}")
    compile_part = sorted(
        (n for n in tree.nodes.values() if n.scope is Scope.COMPILE),
        key=lambda n: (n.depth, str(n.id)),
    )
    out = [n.id for n in compile_part]
    if Scope.TEST in wanted:
        test_part = sorted(
            (n for n in tree.nodes.values() if n.scope is Scope.TEST),
            key=lambda n: (n.depth, str(n.id)),
        )
        out.extend(n.id for n in test_part)
    return out
