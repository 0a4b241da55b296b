"""Class-ratio metrics, per-dependency outcome statuses and report serialization."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

from spectrim.buildcheck import COMPILE_ERROR, TEST_FAILURE
from spectrim.codec import dumps
from spectrim.errors import SpectrimError
from spectrim.model import PackageId, parse_coordinates
from spectrim.repository import ChecksumRecord, compute_checksum

SPECIALIZED = "specialized"
TUD = "TUD"
BLOATED_REMOVED = "bloatedRemoved"
REVERTED_COMPILE_ERROR = "revertedCompileError"
REVERTED_TEST_FAILURE = "revertedTestFailure"
IGNORED = "ignored"
STATUSES = (SPECIALIZED, TUD, BLOATED_REMOVED, REVERTED_COMPILE_ERROR, REVERTED_TEST_FAILURE, IGNORED)

REPORT_NAME = "spectrim-report.json"


class UndefinedRatioError(SpectrimError, ValueError):
    phase = "report"


@dataclass(frozen=True)
class RatioSet:
    """Dependency-to-project class ratios for the original, debloated and specialized trees."""

    ratio_o: Fraction
    ratio_d: Fraction
    ratio_s: Fraction

    def rounded(self) -> tuple[str, str, str]:
        return (round_half_up(self.ratio_o), round_half_up(self.ratio_d), round_half_up(self.ratio_s))


def round_half_up(value: Fraction, places: int = 1) -> str:
    scale = 10**places
    q = math.floor(Fraction(value) * scale + Fraction(1, 2))
    whole, frac = divmod(q, scale)
    return f"{whole}.{frac:0{places}d}" if places else str(whole)


def compute_ratios(project_units: int, cd_units: int, removed_by_debloat: int, removed_by_specialization: int) -> RatioSet:
    if project_units <= 0:
        raise UndefinedRatioError("class ratios are undefined for a project without classes")
    if min(cd_units, removed_by_debloat, removed_by_specialization) < 0:
        raise ValueError("unit counts must be non-negative")
    if removed_by_debloat + removed_by_specialization > cd_units:
        raise ValueError("cannot remove more dependency units than exist")
    return RatioSet(
        Fraction(cd_units, project_units),
        Fraction(cd_units - removed_by_debloat, project_units),
        Fraction(cd_units - removed_by_debloat - removed_by_specialization, project_units),
    )


@dataclass(frozen=True)
class DependencyEntry:
    id: PackageId
    status: str
    kept_units: int
    removed_units: int
    checksum: Optional[ChecksumRecord] = None
    specialized_id: Optional[PackageId] = None
    diagnostics: tuple = ()

    def to_json(self) -> dict:
        return {
            "id": str(self.id),
            "status": self.status,
            "keptUnits": self.kept_units,
            "removedUnits": self.removed_units,
            "checksum": None if self.checksum is None else self.checksum.to_json(),
            "specializedId": None if self.specialized_id is None else str(self.specialized_id),
            "diagnostics": list(self.diagnostics),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DependencyEntry":
        return cls(
            id=parse_coordinates(obj["id"]),
            status=obj["status"],
            kept_units=obj["keptUnits"],
            removed_units=obj["removedUnits"],
            checksum=None if obj.get("checksum") is None else ChecksumRecord.from_json(obj["checksum"]),
            specialized_id=None if obj.get("specializedId") is None else parse_coordinates(obj["specializedId"]),
            diagnostics=tuple(obj.get("diagnostics", ())),
        )


@dataclass(frozen=True)
class SpecializationReport:
    project_id: PackageId
    project_unit_count: int
    cd_unit_count: int
    nbcd_count: int
    bloated_removed_units: int
    specialized_removed_units: int
    tree_kind: str
    per_dependency: tuple[DependencyEntry, ...]
    ratios: RatioSet
    diagnostics: tuple = ()
    union_backoff_steps: tuple[PackageId, ...] = ()
    # serialized archive sizes, not comparable to real bytecode sizes
    archive_bytes: tuple[tuple[str, int], ...] = ()

    def count(self, status: str) -> int:
        return sum(1 for e in self.per_dependency if e.status == status)

    @property
    def nbcd_specialized(self) -> int:
        return self.count(SPECIALIZED)

    def checksum_records(self) -> list[ChecksumRecord]:
        return [e.checksum for e in self.per_dependency if e.status == SPECIALIZED and e.checksum is not None]

    def to_json(self) -> dict:
        def ratio(r: Fraction) -> dict:
            return {"numerator": r.numerator, "denominator": r.denominator, "value": float(r)}

        return {
            "projectId": str(self.project_id),
            "projectUnitCount": self.project_unit_count,
            "cdUnitCount": self.cd_unit_count,
            "nbcdCount": self.nbcd_count,
            "nbcdSpecialized": self.nbcd_specialized,
            "bloatedRemovedUnits": self.bloated_removed_units,
            "specializedRemovedUnits": self.specialized_removed_units,
            "treeKind": self.tree_kind,
            "perDependency": [e.to_json() for e in sorted(self.per_dependency, key=lambda e: str(e.id))],
            "ratios": {
                "ratioO": ratio(self.ratios.ratio_o),
                "ratioD": ratio(self.ratios.ratio_d),
                "ratioS": ratio(self.ratios.ratio_s),
            },
            "checksums": [c.to_json() for c in sorted(self.checksum_records(), key=lambda c: str(c.id))],
            "unionBackoffSteps": [str(p) for p in self.union_backoff_steps],
            "diagnostics": list(self.diagnostics),
            "archiveBytes": dict(self.archive_bytes),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SpecializationReport":
        def ratio(d: dict) -> Fraction:
            return Fraction(d["numerator"], d["denominator"])

        r = obj["ratios"]
        return cls(
            project_id=parse_coordinates(obj["projectId"]),
            project_unit_count=obj["projectUnitCount"],
            cd_unit_count=obj["cdUnitCount"],
            nbcd_count=obj["nbcdCount"],
            bloated_removed_units=obj["bloatedRemovedUnits"],
            specialized_removed_units=obj["specializedRemovedUnits"],
            tree_kind=obj["treeKind"],
            per_dependency=tuple(DependencyEntry.from_json(e) for e in obj["perDependency"]),
            ratios=RatioSet(ratio(r["ratioO"]), ratio(r["ratioD"]), ratio(r["ratioS"])),
            diagnostics=tuple(obj.get("diagnostics", ())),
            union_backoff_steps=tuple(parse_coordinates(p) for p in obj.get("unionBackoffSteps", ())),
            archive_bytes=tuple(sorted(obj.get("archiveBytes", {}).items())),
        )


def classify_outcomes(result, classification) -> dict[PackageId, str]:
    """Map every analyzed compile-scope dependency to exactly one status."""
    statuses: dict[PackageId, str] = {}
    for pid in sorted(classification.unit_counts, key=str):
        if pid in classification.ignored:
            status = IGNORED
        elif pid in classification.bloated:
            status = BLOATED_REMOVED
        elif pid in classification.totally_used:
            status = TUD
        elif pid in result.specialized_deps:
            status = SPECIALIZED
        elif pid in result.reverted_deps:
            outcome = result.reverted_deps[pid]
            if outcome.status == COMPILE_ERROR:
                status = REVERTED_COMPILE_ERROR
            elif outcome.status == TEST_FAILURE:
                status = REVERTED_TEST_FAILURE
            else:
                raise SpectrimError(f"reverted dependency {pid} has a passing build outcome")
        else:
            raise SpectrimError(f"dependency {pid} fits no outcome category")
        statuses[pid] = status
    return statuses


def build_report(state) -> SpecializationReport:
    """Assemble the report from a finished pipeline run (see ``treebuilder.run_pipeline``)."""
    tree = state.tree
    cls = state.classification
    result = state.result
    statuses = classify_outcomes(result, cls)
    artifacts = {a.original_id: a for a in state.artifacts}
    remaining = {n.original for n in state.debloated_tree.nodes.values()}

    entries = []
    diagnostics = [
        {"kind": "unresolvedReference", "sourceUnit": d.source_unit, "target": d.target, "detail": d.reason}
        for d in state.call_graph_diagnostics
    ]
    bloated_removed = 0
    specialized_removed = 0
    for pid, status in statuses.items():
        node = tree.nodes[pid]
        total = len(node.archive.units)
        diag: tuple = ()
        if status == SPECIALIZED:
            art = artifacts[pid]
            entry = DependencyEntry(pid, status, art.kept_units, art.removed_units, art.checksum, art.specialized_id)
            specialized_removed += art.removed_units
        elif status == BLOATED_REMOVED:
            if node.original in remaining:
                # still pulled in by a kept dependency; nothing actually removed
                diagnostics.append({"kind": "bloatedRetained", "sourceUnit": str(node.parent), "target": str(pid), "detail": "transitive of a kept dependency"})
                entry = DependencyEntry(pid, status, total, 0, None)
            else:
                entry = DependencyEntry(pid, status, 0, total, None)
                bloated_removed += total
        else:
            if status in (REVERTED_COMPILE_ERROR, REVERTED_TEST_FAILURE):
                outcome = result.reverted_deps[pid]
                diag = tuple(d.to_json() for d in outcome.diagnostics)
            entry = DependencyEntry(pid, status, total, 0, compute_checksum(node.archive), None, diag)
        entries.append(entry)

    return SpecializationReport(
        project_id=state.project.manifest.id,
        project_unit_count=len(state.project.src_units),
        cd_unit_count=sum(cls.unit_counts.values()),
        nbcd_count=len(cls.non_bloated),
        bloated_removed_units=bloated_removed,
        specialized_removed_units=specialized_removed,
        tree_kind=result.kind,
        per_dependency=tuple(entries),
        ratios=compute_ratios(len(state.project.src_units), sum(cls.unit_counts.values()), bloated_removed, specialized_removed),
        diagnostics=tuple(sorted(diagnostics, key=lambda d: (d["kind"], d["sourceUnit"], d["target"]))),
        union_backoff_steps=result.union_backoff_steps,
        archive_bytes=tuple(sorted(getattr(state, "archive_bytes", {}).items())),
    )


def render_text(report: SpecializationReport) -> str:
    o, d, s = report.ratios.rounded()
    lines = [
        f"project: {report.project_id}",
        f"tree: {report.tree_kind}",
        f"project units: {report.project_unit_count}",
        f"compile dependency units: {report.cd_unit_count}",
        f"NBCD specialized: {report.nbcd_specialized}/{report.nbcd_count}",
        f"TUD: {report.count(TUD)}/{report.nbcd_count}",
        f"compile errors: {report.count(REVERTED_COMPILE_ERROR)}, test failures: {report.count(REVERTED_TEST_FAILURE)}",
        f"units removed by debloating: {report.bloated_removed_units}/{report.cd_unit_count}",
        f"units removed by specialization: {report.specialized_removed_units}",
        f"Ratio_O={o} Ratio_D={d} Ratio_S={s}",
    ]
    sizes = dict(report.archive_bytes)
    if sizes:
        lines.append(
            "archive bytes (original/debloated/specialized): "
            f"{sizes.get('original', 0)}/{sizes.get('debloated', 0)}/{sizes.get('specialized', 0)}"
        )
    lines += [
        "",
        f"{'dependency':<60} {'status':<22} {'kept':>7} {'removed':>8}",
    ]
    for e in sorted(report.per_dependency, key=lambda e: str(e.id)):
        lines.append(f"{str(e.id):<60} {e.status:<22} {e.kept_units:>7} {e.removed_units:>8}")
    if report.union_backoff_steps:
        lines.append("")
        lines.append("union backoff: " + ", ".join(map(str, report.union_backoff_steps)))
    return "\n".join(lines) + "\n"


def emit_report(report: SpecializationReport, fmt: str = "json", out: Union[str, os.PathLike, None] = None) -> bytes:
    if fmt == "json":
        data = dumps(report.to_json(), indent=2)
    elif fmt == "text":
        data = render_text(report).encode("utf-8")
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if out is not None:
        Path(out).write_bytes(data)
    return data


def load_report(path: Union[str, os.PathLike]) -> SpecializationReport:
    return SpecializationReport.from_json(json.loads(Path(path).read_text(encoding="utf-8")))
