"""Command line front end.

Exit codes: 0 success, 1 input error, 2 not certified (or survey mismatch).
"""
import argparse
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError

from .catalog import Expected, SolidSpec, build, known_solids, survey_set
from .errors import NoSection, NotDoubleArch, RupertError, UnknownSolid
from .figures import allowable_figure, section_figure, shadow_figure
from .geom import ConvexPolygon2, Polyhedron, RigidMotion, Rotation, shadow
from .offio import load_polyhedron
from .passage import (
    Certificate,
    CertificateKind,
    SearchConfig,
    Theorem,
    allowable_set_sample,
    certify,
    verify_certificate,
)
from .polygon import double_arch_decompose, regular_polygon
from .sections import candidate_orientations, find_polygonal_section, find_prism_section

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_CERTIFIED = 2


class InputError(RupertError):
    """Bad command line input."""


class RunReport(BaseModel):
    """One survey row."""

    model_config = ConfigDict(frozen=True)

    solid: str
    expected: Expected
    outcome: str
    delta: float | None = None
    margin: float | None = None
    ms: float | None = None
    stage: str | None = None
    certificate: dict | None = None
    certificate_path: str | None = None

    @property
    def matches(self) -> bool:
        return {
            Expected.RUPERT_VIA_A: "certified-A",
            Expected.REVERSE_VIA_B: "certified-B",
            Expected.NOT_COVERED: "not-covered",
        }[self.expected] == self.outcome


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors, not "not certified"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _vector(text: str) -> np.ndarray:
    try:
        values = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}") from None
    if len(values) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    return np.array(values)


def _spec_for(text: str, n: int | None = None, height: float | None = None) -> SolidSpec:
    name, _, suffix = text.rpartition("-")
    if name and suffix.isdigit():
        return SolidSpec(name=name, n=int(suffix), height=height)
    return SolidSpec(name=text, n=n, height=height)


def resolve_input(text: str, n: int | None = None, height: float | None = None) -> tuple[Polyhedron, str]:
    """A catalog name (``cube``, ``prism-6``) or a path to an OFF file.

    Catalog names win over files without an ``.off`` suffix.
    """
    path = Path(text)
    if path.suffix.lower() == ".off":
        return load_polyhedron(path), path.stem
    try:
        spec = _spec_for(text, n, height)
    except UnknownSolid:
        if not path.is_file():
            raise
        return load_polyhedron(path), path.stem
    return build(spec), spec.label


def _config(args) -> SearchConfig:
    return SearchConfig(
        delta0=args.delta0,
        shrink=args.shrink,
        max_retries=args.max_retries,
        tolerance=args.tolerance,
        seed=args.seed,
    )


def _write_json(path: Path, document) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2) + "\n")


def cmd_certify(args) -> int:
    Q, label = resolve_input(args.input, args.n, args.height)
    result = certify(Q, _config(args), Theorem(args.theorem), solid=label)
    if not isinstance(result, Certificate):
        print(f"{label}: not certified by Theorem {result.theorem} (stage {result.stage.value}: {result.detail})")
        return EXIT_NOT_CERTIFIED
    document = result.to_document()
    output = Path(args.output or f"{label}.certificate.json")
    _write_json(output, document)
    print(f"{label}: {result.kind.value} certificate, delta={result.delta!r}, margin={result.margin!r} -> {output}")
    return EXIT_OK


def _survey_one(spec: SolidSpec, cfg: SearchConfig) -> RunReport:
    start = time.perf_counter()
    try:
        result = certify(build(spec), cfg, solid=spec.label)
    except RupertError as err:
        logger.error(f"[survey] {spec.label} failed: {err}")
        return RunReport(solid=spec.label, expected=spec.expected, outcome="failed", stage=type(err).__name__)
    ms = 1000.0 * (time.perf_counter() - start)
    if isinstance(result, Certificate):
        outcome = "certified-A" if result.kind is CertificateKind.RUPERT else "certified-B"
        return RunReport(
            solid=spec.label,
            expected=spec.expected,
            outcome=outcome,
            delta=result.delta,
            margin=result.margin,
            ms=ms,
            certificate=result.to_document(),
        )
    return RunReport(solid=spec.label, expected=spec.expected, outcome="not-covered", ms=ms, stage=result.stage.value)


def run_survey(specs: list[SolidSpec], cfg: SearchConfig, workers: int = 1) -> list[RunReport]:
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda spec: _survey_one(spec, cfg), specs))
    return [_survey_one(spec, cfg) for spec in specs]


def format_table(reports: list[RunReport], timings: bool = False) -> str:
    header = f"{'solid':<32} {'expected':<12} {'outcome':<20} {'delta':>10} {'margin':>10}"
    if timings:
        header += f" {'ms':>9}"
    lines = [header, "-" * len(header)]
    for report in reports:
        outcome = report.outcome if report.stage is None else f"{report.outcome}:{report.stage}"
        delta = "-" if report.delta is None else f"{report.delta:.3e}"
        margin = "-" if report.margin is None else f"{report.margin:.3e}"
        line = f"{report.solid:<32} {report.expected.value:<12} {outcome:<20} {delta:>10} {margin:>10}"
        if timings:
            line += f" {report.ms or 0.0:>9.1f}"
        if not report.matches:
            line += "  MISMATCH"
        lines.append(line)
    mismatches = sum(not report.matches for report in reports)
    lines.append(f"{len(reports)} solids, {mismatches} mismatches")
    return "\n".join(lines) + "\n"


def cmd_survey(args) -> int:
    specs = survey_set(include_gyrobicupola=args.with_gyrobicupola)
    reports = run_survey(specs, _config(args), args.workers)
    table = format_table(reports, args.timings)
    sys.stdout.write(table)
    if args.output:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        (out / "survey.txt").write_text(table)
        rows = []
        for report in reports:
            row = report.model_dump(mode="json", exclude={"certificate_path"} | (set() if args.timings else {"ms"}))
            if report.certificate is not None:
                path = out / "certificates" / f"{report.solid}.json"
                _write_json(path, report.certificate)
                row["certificate_path"] = str(path.relative_to(out))
            rows.append(row)
        _write_json(out / "survey.json", rows)
    return EXIT_OK if all(report.matches for report in reports) else EXIT_NOT_CERTIFIED


def _rotation_from_flags(args) -> Rotation:
    if args.align is not None:
        return Rotation.from_matrix(RigidMotion.align_to_z(args.align).matrix)
    if args.axis is not None:
        return Rotation(axis=args.axis, angle=args.angle)
    return Rotation.identity()


def cmd_shadow(args) -> int:
    Q, label = resolve_input(args.input, args.n, args.height)
    shadow_figure(Q, _rotation_from_flags(args)).save(args.output or f"{label}.shadow.svg")
    return EXIT_OK


def _oriented_section(Q: Polyhedron, kind: str):
    """First orientation exposing a section of the requested kind."""
    finders = []
    if kind in ("polygonal", "auto"):
        finders.append(("plane", find_polygonal_section))
    if kind in ("prism", "auto"):
        finders.append(("axis", find_prism_section))
    for orientation_kind, finder in finders:
        for motion in candidate_orientations(Q, kind=orientation_kind):
            oriented = Q.transformed(motion)
            try:
                return oriented, finder(oriented, motion=motion)
            except NoSection:
                continue
    raise InputError(f"no {kind} section found in any candidate orientation")


def cmd_section(args) -> int:
    Q, label = resolve_input(args.input, args.n, args.height)
    oriented, section = _oriented_section(Q, args.kind)
    try:
        decomposition = double_arch_decompose(section.polygon)
    except NotDoubleArch:
        decomposition = None
    section_figure(oriented, section, decomposition).save(args.output or f"{label}.section.svg")
    print(f"{label}: {type(section).__name__} with a {section.polygon.n}-gon")
    return EXIT_OK


def _flat_polygon(args) -> ConvexPolygon2:
    name, _, suffix = args.input.rpartition("-")
    if name == "polygon" and suffix.isdigit():
        return regular_polygon(int(suffix))
    Q, _ = resolve_input(args.input, args.n, args.height)
    if args.experimental:
        return shadow(Q, Rotation.identity())
    return _oriented_section(Q, "polygonal")[1].polygon


def cmd_allowable(args) -> int:
    P = _flat_polygon(args)
    if not 0 <= args.vertex < P.n:
        raise InputError(f"vertex index {args.vertex} out of range for a {P.n}-gon")
    grid = allowable_set_sample(P, args.vertex, args.delta, args.resolution)
    allowable_figure(grid).save(args.output or "allowable.svg")
    print(f"{grid.allowable.sum()} of {grid.allowable.size} cells allowable")
    return EXIT_OK


def cmd_verify(args) -> int:
    Q, label = resolve_input(args.input, args.n, args.height)
    document = json.loads(Path(args.certificate).read_text())
    margin = verify_certificate(Q, document)
    stored = float(document["margin"])
    print(f"{label}: recomputed margin {margin!r} (stored {stored!r})")
    if abs(margin - stored) <= 1e-12 and margin > args.tolerance:
        return EXIT_OK
    return EXIT_NOT_CERTIFIED


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="local_rupert",
        description="Certify convex polyhedra as locally Rupert or locally reverse Rupert.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python -m local_rupert certify cube
  python -m local_rupert certify ./mesh.off --theorem A --delta0 1e-3
  python -m local_rupert survey --output results --timings
  python -m local_rupert shadow cube --align 1,1,1 --output cube.svg
  python -m local_rupert allowable polygon-4 --vertex 0 --delta 0.3
""",
    )
    parser.add_argument("--quiet", action="store_true", help="Only log warnings and errors")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def solid_command(name: str, help_text: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument("input", help=f"Catalog solid ({', '.join(known_solids())}) or OFF file")
        sub.add_argument("-n", type=int, default=None, help="Family size for prism/bipyramid/antiprism/trapezohedron")
        sub.add_argument("--height", type=float, default=None, help="Prism half-height (default: 1)")
        return sub

    def search_flags(sub: argparse.ArgumentParser) -> None:
        defaults = SearchConfig()
        sub.add_argument("--delta0", type=float, default=defaults.delta0, help="Initial rotation angle (default: 1e-2)")
        sub.add_argument("--shrink", type=float, default=defaults.shrink, help="Angle factor per retry (default: 0.5)")
        sub.add_argument("--max-retries", type=int, default=defaults.max_retries, help="Retries (default: 40)")
        sub.add_argument("--tolerance", type=float, default=defaults.tolerance, help="Margin to beat (default: 1e-9)")
        sub.add_argument(
            "--seed", type=int, default=defaults.seed, help="Seed for the vertex-triple sample of very large meshes (default: 0)"
        )

    certify_cmd = solid_command("certify", "Certify one solid")
    search_flags(certify_cmd)
    certify_cmd.add_argument("--theorem", choices=[t.value for t in Theorem], default="auto")
    certify_cmd.add_argument("--output", "-o", default=None, help="Certificate JSON path")
    certify_cmd.set_defaults(handler=cmd_certify)

    survey_cmd = commands.add_parser("survey", help="Certify the surveyed solids and compare with expectations")
    search_flags(survey_cmd)
    survey_cmd.add_argument("--output", "-o", default=None, help="Directory for survey.txt, survey.json and certificates")
    survey_cmd.add_argument("--workers", type=int, default=1, help="Worker threads (default: 1)")
    survey_cmd.add_argument("--timings", action="store_true", help="Add a per-solid milliseconds column")
    survey_cmd.add_argument("--with-gyrobicupola", action="store_true", help="Include the elongated square gyrobicupola")
    survey_cmd.set_defaults(handler=cmd_survey)

    shadow_cmd = solid_command("shadow", "Draw the shadow before and after a rotation")
    shadow_cmd.add_argument("--axis", type=_vector, default=None, help="Rotation axis x,y,z")
    shadow_cmd.add_argument("--angle", type=float, default=0.0, help="Rotation angle in radians")
    shadow_cmd.add_argument("--align", type=_vector, default=None, help="Rotate this direction onto the view axis")
    shadow_cmd.add_argument("--output", "-o", default=None)
    shadow_cmd.set_defaults(handler=cmd_shadow)

    section_cmd = solid_command("section", "Draw a detected section and its double-arch chord")
    section_cmd.add_argument("--kind", choices=["polygonal", "prism", "auto"], default="auto")
    section_cmd.add_argument("--output", "-o", default=None)
    section_cmd.set_defaults(handler=cmd_section)

    allowable_cmd = solid_command("allowable", "Draw the allowable axis set of a section vertex")
    allowable_cmd.add_argument("--vertex", type=int, default=0)
    allowable_cmd.add_argument("--delta", type=float, default=0.3)
    allowable_cmd.add_argument("--resolution", type=int, default=256)
    allowable_cmd.add_argument("--experimental", action="store_true", help="Use the shadow polygon when there is no section")
    allowable_cmd.add_argument("--output", "-o", default=None)
    allowable_cmd.set_defaults(handler=cmd_allowable)

    verify_cmd = solid_command("verify", "Recompute the margin of a certificate file")
    verify_cmd.add_argument("certificate", help="Certificate JSON written by certify or survey")
    verify_cmd.add_argument("--tolerance", type=float, default=SearchConfig().tolerance)
    verify_cmd.set_defaults(handler=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO)
    try:
        return args.handler(args)
    except (RupertError, OSError, ValidationError, ValueError, IndexError, KeyError) as err:
        logger.error(f"[{args.command}] {err}")
        return EXIT_INPUT
