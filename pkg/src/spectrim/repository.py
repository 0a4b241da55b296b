"""Local on-disk repository of unit archives (``.uar`` files).

Layout is ``<root>/<group>/<artifact>/<version>/<artifact>-<version>.uar``.
Archives are ZIP containers written in a canonical form so that their
SHA-256 digest depends only on content.
"""

from __future__ import annotations

import hashlib
import io
import json
import os
import tempfile
import threading
import zipfile
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from filelock import FileLock, Timeout

from spectrim.codec import decode_dependencies, decode_unit, dumps, encode_dependencies, encode_unit
from spectrim.errors import DeploymentError, LoadError, NotFoundError, ParseError
from spectrim.model import Archive, PackageId, parse_coordinates

EXTENSION = ".uar"
METADATA_ENTRY = "archive.json"
UNITS_DIR = "units/"
RESOURCES_DIR = "resources/"
LOCK_NAME = ".spectrim.lock"
CHECKSUM_ALGORITHM = "SHA-256"

# ZIP cannot encode dates before 1980; this is its epoch.
_FIXED_DATE = (1980, 1, 1, 0, 0, 0)

PathLike = Union[str, os.PathLike]


@dataclass(frozen=True)
class ChecksumRecord:
    id: PackageId
    checksum: str
    algorithm: str = CHECKSUM_ALGORITHM

    def __post_init__(self) -> None:
        if self.algorithm == CHECKSUM_ALGORITHM and len(self.checksum) != 64:
            raise ValueError(f"SHA-256 checksum must be 64 hex chars, got {len(self.checksum)}")
        if self.checksum != self.checksum.lower():
            raise ValueError("checksum must be lowercase hex")

    def to_json(self) -> dict:
        return {
            "groupId": self.id.group,
            "artifactId": self.id.artifact,
            "version": self.id.version,
            "checksumAlgorithm": self.algorithm,
            "checksum": self.checksum,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ChecksumRecord":
        return cls(
            id=PackageId(obj["groupId"], obj["artifactId"], obj["version"]),
            checksum=obj["checksum"],
            algorithm=obj["checksumAlgorithm"],
        )


def _entry(name: str) -> zipfile.ZipInfo:
    info = zipfile.ZipInfo(name, date_time=_FIXED_DATE)
    info.compress_type = zipfile.ZIP_STORED
    info.create_system = 3
    info.external_attr = 0o100644 << 16
    return info


def serialize_archive(archive: Archive) -> bytes:
    """Canonical bytes: metadata first, units then resources in sorted order, stored entries."""
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", compression=zipfile.ZIP_STORED) as zf:
        meta = {"id": str(archive.id), "dependencies": encode_dependencies(archive.declared_dependencies)}
        zf.writestr(_entry(METADATA_ENTRY), dumps(meta))
        for name in sorted(archive.units):
            zf.writestr(_entry(f"{UNITS_DIR}{name}.json"), dumps(encode_unit(archive.units[name])))
        for path in sorted(archive.resources):
            zf.writestr(_entry(f"{RESOURCES_DIR}{path}"), bytes(archive.resources[path]))
    return buf.getvalue()


def parse_archive(data: bytes, where: str = "<memory>") -> Archive:
    try:
        zf = zipfile.ZipFile(io.BytesIO(data))
    except zipfile.BadZipFile as exc:
        raise LoadError(f"{where}: malformed container: {exc}") from None
    with zf:
        names = zf.namelist()
        if len(names) != len(set(names)):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise LoadError(f"{where}: duplicate entry {dup[0]}")
        if METADATA_ENTRY not in names:
            raise LoadError(f"{where}: missing entry {METADATA_ENTRY}")
        try:
            meta = json.loads(zf.read(METADATA_ENTRY))
            pid = parse_coordinates(meta["id"])
            deps = decode_dependencies(meta.get("dependencies", []), f"{where}!{METADATA_ENTRY}")
        except (ValueError, KeyError, TypeError) as exc:
            raise LoadError(f"{where}!{METADATA_ENTRY}: schema violation: {exc}") from None
        units = {}
        resources = {}
        for name in names:
            if name.endswith("/"):
                continue
            if name.startswith(UNITS_DIR):
                stem = name[len(UNITS_DIR):]
                if not stem.endswith(".json"):
                    raise LoadError(f"{where}!{name}: unit entries must be .json")
                try:
                    unit = decode_unit(json.loads(zf.read(name)), f"{where}!{name}")
                except (ValueError, TypeError) as exc:
                    raise LoadError(f"{where}!{name}: schema violation: {exc}") from None
                if unit.name != stem[: -len(".json")]:
                    raise LoadError(f"{where}!{name}: entry name does not match unit name {unit.name!r}")
                if unit.name in units:
                    raise LoadError(f"{where}!{name}: duplicate unit name {unit.name}")
                units[unit.name] = unit
            elif name.startswith(RESOURCES_DIR):
                resources[name[len(RESOURCES_DIR):]] = zf.read(name)
            elif name != METADATA_ENTRY:
                raise LoadError(f"{where}!{name}: unexpected entry")
    try:
        return Archive(id=pid, units=units, resources=resources, declared_dependencies=deps)
    except ParseError as exc:
        raise LoadError(f"{where}: {exc}") from None


_cache: dict[tuple, Archive] = {}
_cache_lock = threading.Lock()
_CACHE_LIMIT = 512


def load_archive(path: PathLike) -> Archive:
    """Read a ``.uar`` file. The id stored in its metadata is authoritative."""
    path = Path(path)
    try:
        st = path.stat()
    except FileNotFoundError:
        raise LoadError(f"{path}: no such archive") from None
    key = (str(path.resolve()), st.st_mtime_ns, st.st_size, st.st_ino)
    with _cache_lock:
        hit = _cache.get(key)
    if hit is not None:
        return hit
    archive = parse_archive(path.read_bytes(), str(path))
    with _cache_lock:
        if len(_cache) >= _CACHE_LIMIT:
            _cache.clear()
        _cache[key] = archive
    return archive


def compute_checksum(archive: Archive) -> ChecksumRecord:
    digest = hashlib.sha256(serialize_archive(archive)).hexdigest()
    return ChecksumRecord(id=archive.id, checksum=digest)


class Repository:
    """A directory of archives. Writes are serialized through a lock file at the root."""

    def __init__(self, root: PathLike, *, lock_timeout: float = -1):
        self.root = Path(root)
        # -1 blocks forever, 0 fails fast
        self.lock_timeout = lock_timeout

    def __repr__(self) -> str:
        return f"Repository({str(self.root)!r})"

    def path_for(self, pid: PackageId) -> Path:
        return self.root / pid.group / pid.artifact / pid.version / f"{pid.artifact}-{pid.version}{EXTENSION}"

    def contains(self, pid: PackageId) -> bool:
        return self.path_for(pid).is_file()

    def lookup(self, pid: PackageId) -> Archive:
        path = self.path_for(pid)
        if not path.is_file():
            raise NotFoundError(f"{pid} not found in repository {self.root}")
        return load_archive(path)

    def store(self, archive: Archive) -> Path:
        target = self.path_for(archive.id)
        data = serialize_archive(archive)
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            with FileLock(str(self.root / LOCK_NAME), timeout=self.lock_timeout):
                fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=".tmp-", suffix=EXTENSION)
                try:
                    with os.fdopen(fd, "wb") as fh:
                        fh.write(data)
                    os.replace(tmp, target)
                except BaseException:
                    if os.path.exists(tmp):
                        os.unlink(tmp)
                    raise
        except Timeout:
            raise DeploymentError(f"cannot deploy {archive.id}: repository {self.root} is locked", [archive.id]) from None
        except OSError as exc:
            raise DeploymentError(f"cannot deploy {archive.id} to {self.root}: {exc}", [archive.id]) from None
        return target


def store_archive(repo: Repository, archive: Archive) -> Path:
    return repo.store(archive)


def lookup(repo: Repository, pid: PackageId) -> Archive:
    return repo.lookup(pid)


def open_repository(root: Optional[PathLike]) -> Repository:
    if root is None:
        root = os.environ.get("SPECTRIM_REPO") or Path.home() / ".spectrim" / "repository"
    return Repository(root)
