"""Command-line front end.

Every subcommand prints one JSON report on stdout. Exit status: 0 when the
requested verification succeeded, 1 when it did not, 2 for usage errors
(including unknown subcommands), 3 for unreadable or malformed input.
Output is deterministic unless ``--timings`` is given.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import pathlib
import sys
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import __version__
from .certify import CertificationError, Certificate, krawczyk_certify
from .diagram import DiagramConfig, DiagramError, octahedral_triangulation, parse_pd
from .filling import FillConfig, SlopeError, fill, parse_family, parse_slopes, sweep
from .homology import (
    HomologyError,
    is_homology_sphere,
    meridian_zero_surgery_check,
    parse_linking_matrix,
    surgery_homology,
)
from .intervals import Interval, IntervalError, render_interval, significant
from .solver import SolverConfig, SolverError, solve
from .triangulation import (
    TriangulationError,
    dump_triangulation,
    gluing_system,
    parse_triangulation,
    validate,
)
from .volume import volume

OK, FAILED, USAGE, INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


@dataclass
class RunReport:
    command: list[str]
    inputs: dict[str, str] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)
    result: dict = field(default_factory=dict)
    status: int = OK

    def to_json(self, with_timings: bool = False) -> str:
        doc = {"command": self.command, "inputs": self.inputs, "result": self.result, "exit_status": self.status}
        if with_timings:
            doc["timings"] = {k: round(v, 6) for k, v in self.timings.items()}
        return json.dumps(doc, indent=2, ensure_ascii=False)


class _Stage:
    def __init__(self, report: RunReport, name: str):
        self.report, self.name = report, name

    def __enter__(self):
        self.t0 = time.perf_counter()

    def __exit__(self, *exc):
        self.report.timings[self.name] = time.perf_counter() - self.t0
        return False


class _Fmt:
    def __init__(self, hex_floats: bool):
        self.hex = hex_floats

    def num(self, x: Optional[float]):
        if x is None:
            return None
        return float(x).hex() if self.hex else float(significant(x))

    def interval(self, iv: Interval):
        return [self.num(iv.lo), self.num(iv.hi)]

    def complex(self, z: complex):
        return [self.num(z.real), self.num(z.imag)]


def _read(path: str, report: RunReport) -> str:
    try:
        data = pathlib.Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    report.inputs[path] = hashlib.sha256(data).hexdigest()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError:
        raise InputError(f"{path} is not UTF-8 text") from None


def _load(path: str, report: RunReport):
    text = _read(path, report)
    try:
        return parse_triangulation(text)
    except TriangulationError as exc:
        raise InputError(f"{path}: {exc}") from None


def _solver_config(args) -> SolverConfig:
    return SolverConfig(seed=args.seed)


def _cert_payload(cert: Certificate, fmt: _Fmt) -> dict:
    out = {
        "unique": cert.unique,
        "geometric": cert.geometric,
        "boxes": len(cert.boxes),
        "shapes": [
            {"re": fmt.interval(b.re), "im": fmt.interval(b.im)} for b in cert.boxes
        ],
        "rendered": cert.render(),
        "system_hash": cert.system_hash,
    }
    if cert.volume_enclosure is not None:
        out["volume_enclosure"] = fmt.interval(cert.volume_enclosure)
    return out


def cmd_validate(args, report: RunReport, fmt: _Fmt):
    tri = _load(args.file, report)
    with _Stage(report, "validate"):
        rep = validate(tri)
    report.result = {
        "ok": rep.ok,
        "tetrahedra": rep.n,
        "edges": rep.edge_classes,
        "cusps": rep.cusps,
        "cusp_euler_characteristics": list(rep.euler),
        "problems": list(rep.problems),
    }
    return OK if rep.ok else FAILED


def _checked(tri):
    rep = validate(tri)
    if not rep.ok:
        raise InputError("invalid triangulation: " + "; ".join(rep.problems))


def cmd_solve(args, report, fmt):
    tri = _load(args.file, report)
    _checked(tri)
    with _Stage(report, "solve"):
        sh = solve(gluing_system(tri), config=_solver_config(args))
    report.result = {
        "shapes": [fmt.complex(z) for z in sh.shapes],
        "geometric": sh.geometric,
        "residual_history": [fmt.num(r) for r in sh.history],
        "volume": fmt.num(volume(sh).value),
    }
    return OK


def _certified(tri, args, report):
    sys_ = gluing_system(tri)
    with _Stage(report, "solve"):
        sh = solve(sys_, config=_solver_config(args))
    with _Stage(report, "certify"):
        cert = krawczyk_certify(sys_, sh)
    return sh, cert


def cmd_certify(args, report, fmt):
    tri = _load(args.file, report)
    _checked(tri)
    _, cert = _certified(tri, args, report)
    report.result = _cert_payload(cert, fmt)
    return OK if cert.unique and cert.geometric else FAILED


def cmd_volume(args, report, fmt):
    tri = _load(args.file, report)
    _checked(tri)
    _, cert = _certified(tri, args, report)
    if not (cert.geometric and cert.volume_enclosure is not None):
        report.result = {"error": "solution is not certified geometric", "certificate": _cert_payload(cert, fmt)}
        return FAILED
    enc = cert.volume_enclosure
    report.result = {
        "volume": fmt.num(enc.mid),
        "enclosure": fmt.interval(enc),
        "rendered": render_interval(enc),
    }
    return OK


def cmd_fill(args, report, fmt):
    tri = _load(args.file, report)
    _checked(tri)
    try:
        slopes = parse_slopes(args.slopes)
    except SlopeError as exc:
        raise InputError(str(exc)) from None
    if len(slopes) != len(tri.peripheral):
        raise InputError(f"{len(slopes)} slopes for {len(tri.peripheral)} cusps")
    with _Stage(report, "fill"):
        res = fill(tri, slopes, FillConfig(solver=_solver_config(args)))
    cert = res.certificate
    report.result = {
        "slopes": [str(s) for s in slopes],
        "certificate": _cert_payload(cert, fmt),
        "volume": fmt.num(res.volume.value.mid if isinstance(res.volume.value, Interval) else res.volume.value),
    }
    return OK if cert.unique and cert.geometric else FAILED


def cmd_sweep(args, report, fmt):
    tri = _load(args.file, report)
    _checked(tri)
    try:
        family = parse_family(args.family)
        fixed = parse_slopes(args.fixed) if args.fixed else None
    except SlopeError as exc:
        raise InputError(str(exc)) from None
    if not 0 <= args.cusp < len(tri.peripheral):
        raise InputError(f"cusp {args.cusp} out of range for {len(tri.peripheral)} cusps")
    config = FillConfig(solver=_solver_config(args), parallel=args.parallel)
    with _Stage(report, "sweep"):
        res = sweep(tri, args.cusp, family, fixed, config)
    table = res.to_csv(hex_floats=fmt.hex)
    if args.out:
        try:
            pathlib.Path(args.out).write_text(table)
        except OSError as exc:
            raise InputError(f"cannot write {args.out}: {exc.strerror}") from None
    report.result = {
        "rows": len(res.rows),
        "certified": len(res.certified()),
        "cusped_volume": fmt.num(res.cusped_volume),
        "out": args.out,
    }
    if not args.out:
        report.result["table"] = table.splitlines()
    return OK


def cmd_homology(args, report, fmt):
    text = _read(args.file, report)
    try:
        link = parse_linking_matrix(text)
    except HomologyError as exc:
        raise InputError(f"{args.file}: {exc}") from None
    group = surgery_homology(link)
    report.result = {
        "components": link.size,
        "homology": str(group),
        "rank": group.rank,
        "torsion": list(group.torsion),
        "homology_sphere": is_homology_sphere(link),
    }
    if args.meridian is None:
        return OK
    if not 0 <= args.meridian < link.size:
        raise InputError(f"component {args.meridian} out of range for {link.size} components")
    ok = meridian_zero_surgery_check(link, args.meridian)
    report.result["meridian_check"] = {"component": args.meridian, "holds": ok}
    return OK if ok else FAILED


def cmd_pd2tri(args, report, fmt):
    text = _read(args.file, report)
    try:
        pd = parse_pd(text)
    except DiagramError as exc:
        raise InputError(f"{args.file}: {exc}") from None
    with _Stage(report, "triangulate"):
        tri = octahedral_triangulation(pd, DiagramConfig(seed=args.seed), name=pathlib.Path(args.file).stem)
    rep = validate(tri)
    if args.out:
        try:
            pathlib.Path(args.out).write_text(dump_triangulation(tri))
        except OSError as exc:
            raise InputError(f"cannot write {args.out}: {exc.strerror}") from None
    report.result = {
        "crossings": len(pd.crossings),
        "components": pd.components,
        "tetrahedra": tri.n,
        "cusps": rep.cusps,
        "valid": rep.ok,
        "out": args.out,
    }
    if not args.out:
        report.result["triangulation"] = json.loads(dump_triangulation(tri))
    return OK if rep.ok else FAILED


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _Usage(f"{self.prog}: error: {message}")


class _Usage(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--hex-floats", action="store_true", help="print floats as exact hex literals")
    common.add_argument("--seed", type=int, default=0, help="seed for the solver's retry ladder")
    common.add_argument("--timings", action="store_true", help="add per-stage wall times to the report")

    p = _Parser(prog="artifact", description="Gluing equations, certified volumes and Dehn filling.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def add(name, fn, help_, file_help="triangulation file"):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("file", help=file_help)
        sp.set_defaults(fn=fn)
        return sp

    add("validate", cmd_validate, "check a triangulation")
    add("solve", cmd_solve, "solve the gluing equations")
    add("certify", cmd_certify, "solve and certify the complete structure")
    add("volume", cmd_volume, "certified volume")
    sp = add("fill", cmd_fill, "solve and certify a Dehn filling")
    sp.add_argument("--slopes", required=True, help="one slope per cusp, e.g. 1/2,inf")
    sp = add("sweep", cmd_sweep, "fill one cusp along a family of slopes")
    sp.add_argument("--cusp", type=int, required=True)
    sp.add_argument("--family", required=True, help="e.g. 1/3..1/20 or a comma list")
    sp.add_argument("--fixed", help="slopes for all cusps; the swept cusp's entry is ignored")
    sp.add_argument("--out", help="CSV output path (default: table in the report)")
    sp.add_argument("--parallel", action="store_true", help="unseeded rows in worker processes")
    sp = add("homology", cmd_homology, "H_1 of surgery on a framed link", "linking matrix JSON file")
    sp.add_argument("--meridian", type=int, help="check 0-surgery on a meridian of this component")
    sp = add("pd2tri", cmd_pd2tri, "triangulate a link complement from a PD code", "PD code file")
    sp.add_argument("--out", help="triangulation output path")
    return p


def run(argv: Sequence[str]) -> tuple[RunReport, bool]:
    """Execute one invocation; returns the report and whether timings were asked for."""
    report = RunReport(command=list(argv))
    try:
        args = build_parser().parse_args(list(argv))
    except _Usage as exc:
        report.status = USAGE
        report.result = {"error": str(exc)}
        return report, False
    fmt = _Fmt(args.hex_floats)
    try:
        report.status = args.fn(args, report, fmt)
    except InputError as exc:
        report.status = INPUT
        report.result = {"error": str(exc)}
    except (TriangulationError, DiagramError) as exc:
        report.status = INPUT
        report.result = {"error": str(exc)}
    except (SolverError, CertificationError, IntervalError) as exc:
        report.status = FAILED
        report.result = {"error": f"{type(exc).__name__}: {exc}"}
    return report, args.timings


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        report, timings = run(argv)
    except SystemExit as exc:  # --help, --version
        return int(exc.code or 0)
    if report.status == USAGE:
        print(report.result["error"], file=sys.stderr)
        return USAGE
    if report.status != OK and "error" in report.result:
        print(report.result["error"], file=sys.stderr)
    print(report.to_json(timings))
    return report.status


if __name__ == "__main__":
    raise SystemExit(main())
