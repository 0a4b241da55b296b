from dataclasses import replace
import sys

from spectrim.buildcheck import (
    CHECKSUM_MISMATCH,
    COMPILE_ERROR,
    MISSING_DEPENDENCY,
    MISSING_HIDDEN_REF,
    MISSING_REQUIRED_UNIT,
    MISSING_STATIC_REF,
    SUCCESS,
    TEST_FAILURE,
    BuildOutcome,
    Diagnostic,
    command_builder,
    compile_check,
    full_build,
    test_check,
)
from spectrim.model import ChecksumCheck, ClassUnit, MemberRef, RequireUnitCheck, parse_coordinates as c
from spectrim.project import load_project
from spectrim.repository import compute_checksum
from spectrim.resolver import resolve_tree
from spectrim.specializer import specialize_dependency
from spectrim.treebuilder import build_tst_manifest

import pytest

LIBX = c("libx:libx:1.0")


def specialized_manifest(demo, project):
    stripped, art = specialize_dependency(demo.repo.lookup(LIBX), {"x.X1"})
    demo.repo.store(stripped)
    return build_tst_manifest(project.manifest, [art]), art


def test_original_demo_builds(demo_project, demo):
    assert full_build(demo.project_dir, demo_project.manifest, demo.repo).status == SUCCESS


def test_tst_manifest_builds(demo_project, demo):
    manifest, _ = specialized_manifest(demo, demo_project)
    assert full_build(demo.project_dir, manifest, demo.repo).ok


def test_hidden_ref_to_removed_unit_fails_tests(demo_project, demo):
    manifest, _ = specialized_manifest(demo, demo_project)
    t = demo_project.test_units[0]
    project = replace(demo_project, test_units=(replace(t, hidden_refs=("x.X2",)),))
    outcome = full_build(demo.project_dir, manifest, demo.repo, project=project)
    assert outcome.status == TEST_FAILURE
    assert outcome.diagnostics == (Diagnostic("MainTest", "x.X2", MISSING_HIDDEN_REF),)


def test_missing_static_ref_is_compile_error(demo_project, demo):
    manifest, _ = specialized_manifest(demo, demo_project)
    src = (ClassUnit("Main", static_refs=(MemberRef("x.X2"),)),)
    tree = resolve_tree(manifest, demo.repo)
    outcome = compile_check(src, tree)
    assert outcome.status == COMPILE_ERROR
    assert outcome.diagnostics[0].kind == MISSING_STATIC_REF


def test_checksum_check(demo_project, demo):
    digest = compute_checksum(demo.repo.lookup(LIBX)).checksum
    good = replace(demo_project.manifest, build_checks=(ChecksumCheck(LIBX, digest),))
    assert full_build(demo.project_dir, good, demo.repo).ok
    pinned, _ = specialized_manifest(demo, replace(demo_project, manifest=good))
    outcome = full_build(demo.project_dir, pinned, demo.repo)
    assert outcome.status == COMPILE_ERROR
    assert [d.kind for d in outcome.diagnostics] == [CHECKSUM_MISMATCH]


def test_require_unit_check(demo_project, demo):
    with_check = replace(demo_project.manifest, build_checks=(RequireUnitCheck("x.X2"),))
    assert full_build(demo.project_dir, with_check, demo.repo).ok
    pinned, _ = specialized_manifest(demo, replace(demo_project, manifest=with_check))
    outcome = full_build(demo.project_dir, pinned, demo.repo)
    assert [d.kind for d in outcome.diagnostics] == [MISSING_REQUIRED_UNIT]


def test_missing_archive_is_compile_error(demo_project, demo):
    pins = {LIBX: c("deptrim.spl.libx:libx:1.0")}  # never deployed
    outcome = full_build(demo.project_dir, replace(demo_project.manifest, pins=pins), demo.repo)
    assert outcome.status == COMPILE_ERROR
    assert outcome.diagnostics[0].kind == MISSING_DEPENDENCY


def test_test_check_sees_literals(demo_project, demo):
    tree = resolve_tree(demo_project.manifest, demo.repo)
    t = replace(demo_project.test_units[0], dynamic_literal_refs=("x.Gone",))
    outcome = test_check([t], tree, demo_project.src_units)
    assert outcome.status == TEST_FAILURE


def test_outcome_invariants():
    with pytest.raises(ValueError):
        BuildOutcome(SUCCESS, (Diagnostic("a", "b", MISSING_STATIC_REF),))
    with pytest.raises(ValueError):
        BuildOutcome(COMPILE_ERROR)
    with pytest.raises(ValueError):
        BuildOutcome(COMPILE_ERROR, (Diagnostic("a", "b", MISSING_HIDDEN_REF),))


def test_command_builder(demo_project, demo):
    ok = command_builder(f"{sys.executable} -c \"import os,sys; sys.exit(0 if os.path.exists('project.json') else 5)\"")
    assert ok(demo_project, demo_project.manifest, demo.repo, "probe").ok
    assert (demo.project_dir / ".spectrim" / "work" / "probe" / "src-units" / "Main.json").exists()
    bad = command_builder(f"{sys.executable} -c \"import sys; sys.exit(3)\"")
    outcome = bad(demo_project, demo_project.manifest, demo.repo, "probe")
    assert outcome.status == COMPILE_ERROR and "exit 3" in outcome.diagnostics[0].target
    missing = command_builder("/nonexistent/build-tool")
    assert not missing(demo_project, demo_project.manifest, demo.repo, "probe").ok
