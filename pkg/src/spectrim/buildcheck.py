"""In-process stand-in for compiling and testing a project against a tree.

The compile phase resolves the static closure of the project sources and
runs the manifest's build checks. The test phase resolves everything the
test units touch, including string-literal and hidden references, the way
a class loader would at run time.
"""

from __future__ import annotations

import os
import shlex
import shutil
import subprocess
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

from spectrim.errors import ResolutionError
from spectrim.model import ChecksumCheck, ClassUnit, ProjectManifest, RequireUnitCheck
from spectrim.project import MANIFEST_NAME, SRC_DIR, TEST_DIR, Project, load_project, write_manifest
from spectrim.repository import Repository, compute_checksum
from spectrim.resolver import ResolvedTree, classpath, resolve_tree

SUCCESS = "success"
COMPILE_ERROR = "compileError"
TEST_FAILURE = "testFailure"

MISSING_STATIC_REF = "missingStaticRef"
CHECKSUM_MISMATCH = "checksumMismatch"
MISSING_REQUIRED_UNIT = "missingRequiredUnit"
MISSING_DEPENDENCY = "missingDependency"
BUILD_COMMAND_FAILED = "buildCommandFailed"
MISSING_DYNAMIC_REF = "missingDynamicRef"
MISSING_HIDDEN_REF = "missingHiddenRef"

COMPILE_KINDS = frozenset({MISSING_STATIC_REF, CHECKSUM_MISMATCH, MISSING_REQUIRED_UNIT, MISSING_DEPENDENCY, BUILD_COMMAND_FAILED})
TEST_KINDS = frozenset({MISSING_STATIC_REF, MISSING_DYNAMIC_REF, MISSING_HIDDEN_REF})

WORK_DIR = Path(".spectrim") / "work"


@dataclass(frozen=True, order=True)
class Diagnostic:
    source_unit: str
    target: str
    kind: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "sourceUnit": self.source_unit, "target": self.target}

    def __str__(self) -> str:
        return f"{self.kind}: {self.source_unit} -> {self.target}"


@dataclass(frozen=True)
class BuildOutcome:
    status: str
    diagnostics: tuple[Diagnostic, ...] = ()

    def __post_init__(self) -> None:
        if (self.status == SUCCESS) != (not self.diagnostics):
            raise ValueError("a build succeeds exactly when it has no diagnostics")
        allowed = {SUCCESS: frozenset(), COMPILE_ERROR: COMPILE_KINDS, TEST_FAILURE: TEST_KINDS}[self.status]
        bad = [d for d in self.diagnostics if d.kind not in allowed]
        if bad:
            raise ValueError(f"diagnostic {bad[0]} not allowed for status {self.status}")

    @property
    def ok(self) -> bool:
        return self.status == SUCCESS

    def to_json(self) -> dict:
        return {"status": self.status, "diagnostics": [d.to_json() for d in self.diagnostics]}


def _outcome(failure_status: str, diagnostics: Iterable[Diagnostic]) -> BuildOutcome:
    diags = tuple(sorted(set(diagnostics)))
    return BuildOutcome(failure_status if diags else SUCCESS, diags)


def _unit_index(units: Iterable[ClassUnit], tree: ResolvedTree, phase: str) -> dict[str, ClassUnit]:
    index: dict[str, ClassUnit] = {}
    for unit in units:
        index.setdefault(unit.name, unit)
    for pid in classpath(tree, phase):
        for name, unit in tree.nodes[pid].archive.units.items():
            index.setdefault(name, unit)
    return index


def _classpath_units(tree: ResolvedTree, phase: str) -> set[str]:
    out: set[str] = set()
    for pid in classpath(tree, phase):
        out.update(tree.nodes[pid].archive.units)
    return out


def compile_check(
    project_src_units: Iterable[ClassUnit],
    tree: ResolvedTree,
    build_checks: Sequence = (),
    repo: Optional[Repository] = None,
) -> BuildOutcome:
    src = list(project_src_units)
    index = _unit_index(src, tree, "compile")
    diagnostics: list[Diagnostic] = []

    seen = {u.name for u in src}
    queue = deque(src)
    while queue:
        unit = queue.popleft()
        for ref in unit.static_refs:
            target = index.get(ref.unit)
            if target is None or (ref.member is not None and ref.member not in target.member_names()):
                diagnostics.append(Diagnostic(unit.name, str(ref), MISSING_STATIC_REF))
                continue
            if target.name not in seen:
                seen.add(target.name)
                queue.append(target)

    owner = str(tree.root)
    on_classpath = None
    for check in build_checks:
        if isinstance(check, ChecksumCheck):
            node = tree.node_for(check.dep)
            if node is None:
                continue
            archive = repo.lookup(node.id) if repo is not None else node.archive
            actual = compute_checksum(archive).checksum
            if actual != check.expected.lower():
                diagnostics.append(Diagnostic(owner, str(check.dep), CHECKSUM_MISMATCH))
        elif isinstance(check, RequireUnitCheck):
            if on_classpath is None:
                on_classpath = _classpath_units(tree, "compile")
            if check.unit not in on_classpath:
                diagnostics.append(Diagnostic(owner, check.unit, MISSING_REQUIRED_UNIT))
    return _outcome(COMPILE_ERROR, diagnostics)


def test_check(
    test_units: Iterable[ClassUnit],
    tree: ResolvedTree,
    project_src_units: Iterable[ClassUnit],
) -> BuildOutcome:
    tests = list(test_units)
    index = _unit_index(tests + list(project_src_units), tree, "test")
    diagnostics: list[Diagnostic] = []

    seen = {u.name for u in tests}
    queue = deque((u, u.name) for u in tests)

    def visit(name: str, origin: str, ref_text: str, kind: str, member: Optional[str] = None) -> None:
        target = index.get(name)
        if target is None or (member is not None and member not in target.member_names()):
            diagnostics.append(Diagnostic(origin, ref_text, kind))
            return
        if target.name not in seen:
            seen.add(target.name)
            queue.append((target, origin))

    # diagnostics name the test unit whose closure hit the missing reference
    while queue:
        unit, origin = queue.popleft()
        for ref in unit.static_refs:
            visit(ref.unit, origin, str(ref), MISSING_STATIC_REF, ref.member)
        for name in unit.dynamic_literal_refs:
            visit(name, origin, name, MISSING_DYNAMIC_REF)
        for name in unit.hidden_refs:
            visit(name, origin, name, MISSING_HIDDEN_REF)
    return _outcome(TEST_FAILURE, diagnostics)


test_check.__test__ = False  # keep pytest from collecting it


def full_build(project_dir, manifest: ProjectManifest, repo: Repository, project: Optional[Project] = None) -> BuildOutcome:
    """Resolve, compile-check and test-check ``manifest`` against the units in ``project_dir``."""
    if project is None:
        project = load_project(project_dir)
    try:
        tree = resolve_tree(manifest, repo)
    except ResolutionError as exc:
        target = str(exc.path[-1]) if exc.path else str(exc)
        return BuildOutcome(COMPILE_ERROR, (Diagnostic(str(manifest.id), target, MISSING_DEPENDENCY),))
    compiled = compile_check(project.src_units, tree, manifest.build_checks, repo)
    if not compiled.ok:
        return compiled
    return test_check(project.test_units, tree, project.src_units)


Builder = Callable[[Project, ProjectManifest, Repository, str], BuildOutcome]


def in_process_builder(project: Project, manifest: ProjectManifest, repo: Repository, candidate: str) -> BuildOutcome:
    return full_build(project.directory, manifest, repo, project=project)


def command_builder(command: str, timeout: Optional[float] = None) -> Builder:
    """Builder that runs ``command`` in an isolated copy of the project.

    Exit status 0 is success; anything else is a compile error.
    """

    def build(project: Project, manifest: ProjectManifest, repo: Repository, candidate: str) -> BuildOutcome:
        workspace = prepare_workspace(project, manifest, candidate)
        env = dict(os.environ, SPECTRIM_REPO=str(Path(repo.root).resolve()), SPECTRIM_CANDIDATE=candidate)
        try:
            proc = subprocess.run(
                command if os.name == "nt" else shlex.split(command),
                cwd=workspace,
                env=env,
                stdout=subprocess.PIPE,
                stderr=subprocess.STDOUT,
                timeout=timeout,
            )
            code = proc.returncode
        except (OSError, subprocess.TimeoutExpired) as exc:
            return BuildOutcome(COMPILE_ERROR, (Diagnostic(candidate, f"{command}: {exc}", BUILD_COMMAND_FAILED),))
        if code == 0:
            return BuildOutcome(SUCCESS)
        return BuildOutcome(COMPILE_ERROR, (Diagnostic(candidate, f"{command}: exit {code}", BUILD_COMMAND_FAILED),))

    return build


def prepare_workspace(project: Project, manifest: ProjectManifest, candidate: str) -> Path:
    workspace = project.directory / WORK_DIR / candidate
    if workspace.exists():
        shutil.rmtree(workspace)
    workspace.mkdir(parents=True)
    for sub in (SRC_DIR, TEST_DIR):
        if (project.directory / sub).is_dir():
            shutil.copytree(project.directory / sub, workspace / sub)
    write_manifest(workspace / MANIFEST_NAME, manifest)
    return workspace
