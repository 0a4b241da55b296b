"""Command-line front end.

Exit codes: 0 success (TST or PST), 1 internal error, 2 the original
project does not build, 3 PST under ``--strict-tst``, 64 usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from spectrim import corpus
from spectrim.codec import dumps
from spectrim.errors import ParseError, PreconditionError, SpectrimError
from spectrim.model import PackageId, parse_coordinates
from spectrim.project import load_project
from spectrim.report import REPORT_NAME, emit_report, load_report
from spectrim.repository import open_repository
from spectrim.resolver import resolve_tree
from spectrim.specializer import DEFAULT_PREFIX, debloat_manifest, deploy_specialized
from spectrim.treebuilder import PST, PipelineOptions, analyze, run_pipeline, specialize_all

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_PRECONDITION = 2
EXIT_STRICT_PST = 3
EXIT_USAGE = 64

COMMANDS = ("resolve", "analyze", "specialize", "run", "gen", "report")

log = logging.getLogger("spectrim")


class UsageError(Exception):
    pass


class _HelpShown(Exception):
    pass


@dataclass
class Command:
    name: str
    path: Optional[str] = None
    repo: Optional[str] = None
    jobs: int = 1
    specialized_prefix: str = DEFAULT_PREFIX
    build_command: Optional[str] = None
    ignore_dependencies: tuple[PackageId, ...] = ()
    format: str = "text"
    out: Optional[str] = None
    strict_tst: bool = False
    preset: Optional[str] = None
    spec_file: Optional[str] = None
    gen_options: dict = field(default_factory=dict)
    verbose: bool = False


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")

    def exit(self, status=0, message=None):
        if message:
            sys.stderr.write(message)
        if status:
            raise UsageError(message or "usage error")
        raise _HelpShown()


def _coordinates(text: str) -> PackageId:
    try:
        return parse_coordinates(text)
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _build_parser() -> _Parser:
    parser = _Parser(prog="spectrim", description="Trim unused classes out of a project's dependencies.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to standard error")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def project_cmd(name: str, help: str) -> _Parser:
        p = sub.add_parser(name, help=help)
        p.add_argument("path", metavar="PROJECT_DIR")
        p.add_argument("--repo", help="local repository (default: $SPECTRIM_REPO)")
        return p

    project_cmd("resolve", "print the resolved dependency tree")

    p = project_cmd("analyze", "classify dependencies as bloated, used or totally used")
    p.add_argument("--ignore-dependency", action="append", type=_coordinates, default=[], metavar="G:A:V")
    p.add_argument("--format", choices=("json", "text"), default="text")

    p = project_cmd("specialize", "deploy specialized artifacts without validating the tree")
    p.add_argument("--ignore-dependency", action="append", type=_coordinates, default=[], metavar="G:A:V")
    p.add_argument("--specialized-prefix", default=DEFAULT_PREFIX, metavar="S")

    p = project_cmd("run", "run the whole pipeline and write the report")
    p.add_argument("--jobs", type=_positive, default=1, metavar="N")
    p.add_argument("--specialized-prefix", default=DEFAULT_PREFIX, metavar="S")
    p.add_argument("--build-command", metavar="CMD")
    p.add_argument("--ignore-dependency", action="append", type=_coordinates, default=[], metavar="G:A:V")
    p.add_argument("--format", choices=("json", "text"), default="text", help="format printed to standard output")
    p.add_argument("--out", metavar="FILE", help=f"report path (default: PROJECT_DIR/{REPORT_NAME})")
    p.add_argument("--strict-tst", action="store_true", help="exit 3 when only a partial tree builds")

    p = sub.add_parser("gen", help="generate a synthetic project and repository")
    p.add_argument("path", metavar="OUT_DIR")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--preset", choices=sorted({**corpus.PRESETS, **corpus.FIXTURES}))
    src.add_argument("--spec", dest="spec_file", metavar="CORPUS_JSON")
    p.add_argument("--seed", type=int)
    p.add_argument("--deps", type=int, dest="dep_count")
    p.add_argument("--units", type=int, nargs=2, dest="units_per_dep", metavar=("MIN", "MAX"))
    p.add_argument("--usage-density", type=float)
    p.add_argument("--bloated-fraction", type=float)
    p.add_argument("--hidden-refs", type=int, dest="hidden_ref_count")
    p.add_argument("--build-checks", type=int, dest="build_check_count")
    p.add_argument("--build-check-kind", choices=("checksum", "requireUnit", "mixed"))
    p.add_argument("--tud", type=int, dest="tud_count")
    p.add_argument("--project-units", type=int)
    p.add_argument("--test-units", type=int)
    p.add_argument("--test-deps", type=int, dest="test_dep_count")
    p.add_argument("--transitive-fraction", type=float)

    p = sub.add_parser("report", help="reformat an existing report")
    p.add_argument("path", metavar="REPORT_JSON")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--out", metavar="FILE")
    return parser


_GEN_KEYS = (
    "seed", "dep_count", "units_per_dep", "usage_density", "bloated_fraction", "hidden_ref_count",
    "build_check_count", "build_check_kind", "tud_count", "project_units", "test_units",
    "test_dep_count", "transitive_fraction",
)


def parse_args(argv: Sequence[str]) -> Command:
    """Turn ``argv`` into a :class:`Command`. Touches no files.

    Raises :class:`UsageError` for bad input; returns ``Command("help")`` after
    printing help.
    """
    try:
        ns = _build_parser().parse_args(list(argv))
    except _HelpShown:
        return Command("help")
    cmd = Command(ns.command, path=ns.path, verbose=ns.verbose)
    for name in ("repo", "jobs", "specialized_prefix", "build_command", "format", "out", "strict_tst", "preset", "spec_file"):
        if hasattr(ns, name):
            setattr(cmd, name, getattr(ns, name))
    if hasattr(ns, "ignore_dependency"):
        cmd.ignore_dependencies = tuple(ns.ignore_dependency)
    if cmd.name == "gen":
        opts = {k: getattr(ns, k) for k in _GEN_KEYS if getattr(ns, k) is not None}
        if opts.get("units_per_dep") is not None:
            opts["units_per_dep"] = tuple(opts["units_per_dep"])
        if cmd.preset and opts:
            raise UsageError("spectrim gen: --preset cannot be combined with generator options")
        cmd.gen_options = opts
    return cmd


def _write(text: str | bytes) -> None:
    if isinstance(text, str):
        text = text.encode("utf-8")
    sys.stdout.buffer.write(text)
    sys.stdout.flush()


def _cmd_resolve(cmd: Command) -> int:
    project = load_project(cmd.path)
    tree = resolve_tree(project.manifest, open_repository(cmd.repo))

    def walk(pid: PackageId, indent: int) -> None:
        for child in sorted(tree.children(pid), key=str):
            node = tree.nodes[child]
            pinned = f" (pinned from {node.original})" if node.original != node.id else ""
            lines.append(f"{'  ' * indent}{child} [{node.scope.value}]{pinned}")
            walk(child, indent + 1)

    lines = [str(tree.root)]
    walk(tree.root, 1)
    _write("\n".join(lines) + "\n")
    return EXIT_OK


def _classification_json(tree, classification) -> dict:
    deps = []
    for pid in sorted(classification.unit_counts, key=str):
        if pid in classification.ignored:
            kind = "ignored"
        elif pid in classification.bloated:
            kind = "bloated"
        elif pid in classification.totally_used:
            kind = "totallyUsed"
        else:
            kind = "nonBloated"
        deps.append({
            "id": str(pid),
            "classification": kind,
            "depth": tree.nodes[pid].depth,
            "units": classification.unit_counts[pid],
            "reachableUnits": len(classification.reachable_units[pid]),
        })
    return {
        "projectId": str(tree.root),
        "bloated": sorted(map(str, classification.bloated)),
        "nonBloated": sorted(map(str, classification.non_bloated)),
        "totallyUsed": sorted(map(str, classification.totally_used)),
        "ignored": sorted(map(str, classification.ignored)),
        "dependencies": deps,
    }


def _cmd_analyze(cmd: Command) -> int:
    project = load_project(cmd.path)
    tree, _, classification = analyze(project, open_repository(cmd.repo), cmd.ignore_dependencies)
    data = _classification_json(tree, classification)
    if cmd.format == "json":
        _write(dumps(data, indent=2))
        return EXIT_OK
    lines = [f"project: {data['projectId']}"]
    for key in ("bloated", "nonBloated", "totallyUsed", "ignored"):
        lines.append(f"{key} ({len(data[key])}):")
        lines.extend(f"  {pid}" for pid in data[key])
    lines.append("")
    for d in data["dependencies"]:
        lines.append(f"{d['id']:<60} {d['classification']:<12} {d['reachableUnits']:>6}/{d['units']}")
    _write("\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_specialize(cmd: Command) -> int:
    project = load_project(cmd.path)
    repo = open_repository(cmd.repo)
    tree, _, classification = analyze(project, repo, cmd.ignore_dependencies)
    debloated = debloat_manifest(project.manifest, classification, tree)
    pairs = specialize_all(tree, classification, resolve_tree(debloated, repo), cmd.specialized_prefix)
    deploy_specialized(repo, pairs)
    for _, art in pairs:
        _write(f"{art.original_id} -> {art.specialized_id} kept={art.kept_units} removed={art.removed_units}\n")
    return EXIT_OK


def _cmd_run(cmd: Command) -> int:
    options = PipelineOptions(
        repo=open_repository(cmd.repo),
        jobs=cmd.jobs,
        specialized_prefix=cmd.specialized_prefix,
        build_command=cmd.build_command,
        ignore_dependencies=cmd.ignore_dependencies,
    )
    report = run_pipeline(cmd.path, options)
    out = Path(cmd.out) if cmd.out else Path(cmd.path) / REPORT_NAME
    emit_report(report, "json", out)
    _write(emit_report(report, cmd.format))
    if cmd.strict_tst and report.tree_kind == PST:
        return EXIT_STRICT_PST
    return EXIT_OK


def _cmd_gen(cmd: Command) -> int:
    if cmd.preset:
        generated = corpus.generate_preset(cmd.preset, cmd.path)
    else:
        spec = corpus.load_spec(cmd.spec_file) if cmd.spec_file else corpus.CorpusSpec()
        for key, value in cmd.gen_options.items():
            setattr(spec, key, value)
        generated = corpus.generate_corpus(spec, cmd.path)
    truth = generated.ground_truth
    _write(
        f"project: {generated.project_dir}\n"
        f"repository: {generated.repo.root}\n"
        f"expected tree: {truth.tree_kind}, bloated {len(truth.bloated)}, "
        f"non-bloated {len(truth.non_bloated)}\n"
    )
    return EXIT_OK


def _cmd_report(cmd: Command) -> int:
    report = load_report(cmd.path)
    data = emit_report(report, cmd.format, cmd.out)
    if cmd.out is None:
        _write(data)
    return EXIT_OK


_HANDLERS = {
    "resolve": _cmd_resolve,
    "analyze": _cmd_analyze,
    "specialize": _cmd_specialize,
    "run": _cmd_run,
    "gen": _cmd_gen,
    "report": _cmd_report,
}


def _fail(phase: str, message: str) -> None:
    sys.stderr.write(f"spectrim: [{phase}] {message}\n")


def dispatch(cmd: Command) -> int:
    if cmd.name == "help":
        return EXIT_OK
    try:
        return _HANDLERS[cmd.name](cmd)
    except PreconditionError as exc:
        _fail(exc.phase, str(exc))
        return EXIT_PRECONDITION
    except SpectrimError as exc:
        _fail(exc.phase, str(exc))
        return EXIT_INTERNAL
    except OSError as exc:
        _fail("io", str(exc))
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - last resort, still a labelled error
        log.debug("unexpected failure", exc_info=True)
        _fail("internal", f"{type(exc).__name__}: {exc}")
        return EXIT_INTERNAL


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cmd = parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        _fail("usage", str(exc).strip())
        return EXIT_USAGE
    logging.basicConfig(
        level=logging.INFO if cmd.verbose else logging.WARNING,
        format="spectrim: [%(name)s] %(message)s",
        stream=sys.stderr,
    )
    return dispatch(cmd)
