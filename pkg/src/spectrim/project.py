"""Reading and writing project directories.

A project directory holds ``project.json`` plus unit files under
``src-units/`` and ``test-units/``.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from spectrim.codec import decode_manifest, decode_unit, dumps, encode_manifest, encode_unit
from spectrim.errors import LoadError, ParseError
from spectrim.model import ClassUnit, ProjectManifest

MANIFEST_NAME = "project.json"
SPECIALIZED_MANIFEST_NAME = "project.specialized.json"
SRC_DIR = "src-units"
TEST_DIR = "test-units"


@dataclass(frozen=True)
class Project:
    directory: Path
    manifest: ProjectManifest
    src_units: tuple[ClassUnit, ...]
    test_units: tuple[ClassUnit, ...]

    @property
    def all_units(self) -> tuple[ClassUnit, ...]:
        return self.src_units + self.test_units


def read_manifest(path: os.PathLike | str) -> ProjectManifest:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise LoadError(f"{path}: no such manifest") from None
    except json.JSONDecodeError as exc:
        raise LoadError(f"{path}: invalid JSON: {exc}") from None
    try:
        return decode_manifest(obj, str(path))
    except ParseError as exc:
        raise LoadError(str(exc)) from None


def write_manifest(path: os.PathLike | str, manifest: ProjectManifest) -> Path:
    path = Path(path)
    _atomic_write(path, dumps(encode_manifest(manifest), indent=2))
    return path


def _load_units(directory: Path, is_test: bool) -> tuple[ClassUnit, ...]:
    if not directory.is_dir():
        return ()
    units = []
    seen = set()
    for file in sorted(directory.glob("*.json")):
        try:
            unit = decode_unit(json.loads(file.read_text(encoding="utf-8")), str(file))
        except (ValueError, TypeError) as exc:
            raise LoadError(f"{file}: {exc}") from None
        if unit.name in seen:
            raise LoadError(f"{file}: duplicate unit name {unit.name}")
        seen.add(unit.name)
        if unit.is_test != is_test:
            unit = ClassUnit(unit.name, unit.members, unit.static_refs, unit.dynamic_literal_refs, unit.hidden_refs, is_test)
        units.append(unit)
    return tuple(units)


def load_project(directory: os.PathLike | str, manifest_name: str = MANIFEST_NAME) -> Project:
    directory = Path(directory)
    manifest = read_manifest(directory / manifest_name)
    src = _load_units(directory / SRC_DIR, False)
    test = _load_units(directory / TEST_DIR, True)
    names = [u.name for u in src + test]
    if len(names) != len(set(names)):
        raise LoadError(f"{directory}: a unit name appears in both {SRC_DIR} and {TEST_DIR}")
    return Project(directory, manifest, src, test)


def write_units(directory: os.PathLike | str, units: Iterable[ClassUnit]) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for unit in units:
        (directory / f"{unit.name}.json").write_bytes(dumps(encode_unit(unit)))


def write_project(project_dir: os.PathLike | str, manifest: ProjectManifest, src: Iterable[ClassUnit], test: Iterable[ClassUnit]) -> Path:
    project_dir = Path(project_dir)
    project_dir.mkdir(parents=True, exist_ok=True)
    write_manifest(project_dir / MANIFEST_NAME, manifest)
    write_units(project_dir / SRC_DIR, src)
    write_units(project_dir / TEST_DIR, test)
    return project_dir


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
