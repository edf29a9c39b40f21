"""Dehn filling along slopes and slope-family sweeps.

A slope ``p/q`` on a cusp means the curve ``p * meridian + q * longitude`` in
the peripheral basis stored with the triangulation. Filling replaces that
cusp's two holonomy rows by the single row ``p log H(m) + q log H(l) = 2 pi i``.
"""
from __future__ import annotations

import csv
import io
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from .certify import CertificationError, Certificate, CertifyConfig, krawczyk_certify
from .intervals import IntervalError, significant
from .solver import ShapeAssignment, SolverConfig, SolverError, solve
from .triangulation import IdealTriangulation, TriangulationError, gluing_system, validate
from .volume import VolumeResult, boxes_volume, volume


class SlopeError(ValueError):
    pass


@dataclass(frozen=True)
class Slope:
    """``None`` for both fields is the unfilled slope, written ``inf``."""

    p: Optional[int] = None
    q: Optional[int] = None

    def __post_init__(self):
        if (self.p is None) != (self.q is None):
            raise SlopeError("a slope needs both p and q, or neither")
        if self.p is None:
            return
        p, q = int(self.p), int(self.q)
        g = math.gcd(p, q)
        if g != 1:
            raise SlopeError(f"slope ({p}, {q}) is not primitive")
        if p < 0 or (p == 0 and q < 0):
            p, q = -p, -q
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @staticmethod
    def unfilled() -> "Slope":
        return Slope()

    @property
    def is_filled(self) -> bool:
        return self.p is not None

    @staticmethod
    def parse(text: str) -> "Slope":
        """``inf``, ``p/q`` or ``(p,q)``."""
        s = text.strip().replace(" ", "")
        if s.lower() in ("inf", "infinity", "∞"):
            return Slope()
        m = re.fullmatch(r"\(?(-?\d+)[/,](-?\d+)\)?", s)
        if m is None:
            raise SlopeError(f"cannot parse slope {text!r}")
        return Slope(int(m.group(1)), int(m.group(2)))

    def __str__(self) -> str:
        return "inf" if not self.is_filled else f"{self.p}/{self.q}"


def parse_slopes(text: str) -> list[Slope]:
    return [Slope.parse(s) for s in text.split(",")]


def parse_family(text: str) -> list[Slope]:
    """``a/b..a/c`` steps ``q`` from ``b`` to ``c``; ``a/b..c/b`` steps ``p``.

    A comma-separated list of slopes is also accepted.
    """
    if ".." not in text:
        return parse_slopes(text)
    left, right = text.split("..", 1)
    lo, hi = Slope.parse(left), Slope.parse(right)
    if not (lo.is_filled and hi.is_filled):
        raise SlopeError("range endpoints must be finite slopes")
    # compare the raw text so that normalization does not hide the range
    m1 = re.fullmatch(r"\(?(-?\d+)[/,](-?\d+)\)?", left.strip())
    m2 = re.fullmatch(r"\(?(-?\d+)[/,](-?\d+)\)?", right.strip())
    p1, q1 = int(m1.group(1)), int(m1.group(2))
    p2, q2 = int(m2.group(1)), int(m2.group(2))
    if p1 == p2:
        step = 1 if q2 >= q1 else -1
        pairs = [(p1, q) for q in range(q1, q2 + step, step)]
    elif q1 == q2:
        step = 1 if p2 >= p1 else -1
        pairs = [(p, q1) for p in range(p1, p2 + step, step)]
    else:
        raise SlopeError("a range must fix either p or q")
    out = []
    for p, q in pairs:
        if math.gcd(p, q) == 1:
            out.append(Slope(p, q))
    if not out:
        raise SlopeError(f"range {text!r} holds no primitive slopes")
    return out


@dataclass(frozen=True)
class FillConfig:
    solver: SolverConfig = SolverConfig()
    certify: CertifyConfig = CertifyConfig()
    parallel: bool = False
    workers: Optional[int] = None


@dataclass(frozen=True)
class FillResult:
    shapes: ShapeAssignment
    certificate: Optional[Certificate]
    volume: VolumeResult


def _check_slopes(tri: IdealTriangulation, slopes: Sequence[Slope]) -> list[Slope]:
    slopes = [s if isinstance(s, Slope) else Slope.parse(str(s)) for s in slopes]
    if len(slopes) != len(tri.peripheral):
        raise SlopeError(f"{len(slopes)} slopes for {len(tri.peripheral)} cusps")
    return slopes


def complete_solution(tri: IdealTriangulation, config: FillConfig = FillConfig()) -> ShapeAssignment:
    return solve(gluing_system(tri), config=config.solver)


def fill(
    tri: IdealTriangulation,
    slopes: Sequence[Slope],
    config: FillConfig = FillConfig(),
    init: Optional[ShapeAssignment] = None,
) -> FillResult:
    """Solve, certify and measure the filled manifold.

    Solver and certifier errors propagate; they are expected at exceptional
    slopes.
    """
    report = validate(tri)
    if not report.ok:
        raise TriangulationError("; ".join(report.problems))
    slopes = _check_slopes(tri, slopes)
    if init is None:
        init = complete_solution(tri, config)
    sys = gluing_system(tri, slopes)
    shapes = solve(sys, init, config.solver)
    cert = krawczyk_certify(sys, shapes, config.certify)
    if cert.geometric:
        vol = boxes_volume(cert.boxes)
    else:
        vol = volume(shapes)
    return FillResult(shapes, cert, vol)


CERTIFIED = "certified-geometric"
UNCERTIFIED = "solved-uncertified"
FAILED = "failed"


@dataclass(frozen=True)
class SweepRow:
    slope: Slope
    status: str
    volume: Optional[float] = None
    enclosure_width: Optional[float] = None

    def __post_init__(self):
        if (self.volume is None) != (self.status == FAILED):
            raise ValueError("volume is present exactly when the row did not fail")


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    cusped_volume: float
    cusp: int

    def certified(self) -> list[SweepRow]:
        return [r for r in self.rows if r.status == CERTIFIED]

    def to_csv(self, hex_floats: bool = False) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["slope_p", "slope_q", "status", "volume", "enclosure_width", "delta_to_cusped"])
        for r in self.rows:
            p, q = ("inf", "") if not r.slope.is_filled else (r.slope.p, r.slope.q)
            if r.volume is None:
                w.writerow([p, q, r.status, "", "", ""])
                continue
            w.writerow(
                [
                    p,
                    q,
                    r.status,
                    format_float(r.volume, hex_floats),
                    "" if r.enclosure_width is None else format_float(r.enclosure_width, hex_floats),
                    format_float(self.cusped_volume - r.volume, hex_floats),
                ]
            )
        return buf.getvalue()


def format_float(x: float, hex_floats: bool = False) -> str:
    return float(x).hex() if hex_floats else significant(x)


def _row(tri, slopes, config, init) -> tuple[SweepRow, Optional[ShapeAssignment]]:
    slope = next((s for s in slopes if s.is_filled), Slope())
    sys = gluing_system(tri, slopes)
    try:
        shapes = solve(sys, init, config.solver)
    except (SolverError, ValueError):
        return SweepRow(slope, FAILED), None
    try:
        cert = krawczyk_certify(sys, shapes, config.certify)
    except (CertificationError, IntervalError):
        cert = None
    if cert is not None and cert.geometric and cert.volume_enclosure is not None:
        enc = cert.volume_enclosure
        return SweepRow(slope, CERTIFIED, enc.mid, enc.width), shapes
    return SweepRow(slope, UNCERTIFIED, volume(shapes).value), shapes


def _unseeded(args):
    tri, slopes, config = args
    return _row(tri, slopes, config, None)[0]


def sweep(
    tri: IdealTriangulation,
    cusp: int,
    family: Sequence[Slope],
    fixed: Optional[Sequence[Slope]] = None,
    config: FillConfig = FillConfig(),
) -> SweepResult:
    """Fill ``cusp`` along each slope of ``family``, the other cusps at ``fixed``.

    Sequential mode seeds every run with the last successful solution and
    falls back to the default start if that fails. Parallel mode runs every
    row from the default start.
    """
    if not family:
        raise SlopeError("empty slope family")
    ncusps = len(tri.peripheral)
    if not 0 <= cusp < ncusps:
        raise SlopeError(f"cusp {cusp} out of range for {ncusps} cusps")
    report = validate(tri)
    if not report.ok:
        raise TriangulationError("; ".join(report.problems))
    others = list(fixed) if fixed is not None else [Slope()] * ncusps
    if len(others) != ncusps:
        raise SlopeError(f"{len(others)} fixed slopes for {ncusps} cusps")

    base = _check_slopes(tri, others[:cusp] + [Slope()] + others[cusp + 1 :])
    complete = _row(tri, base, config, None)
    cusped = complete[0].volume if complete[0].volume is not None else math.nan

    def slopes_for(s: Slope) -> list[Slope]:
        out = list(base)
        out[cusp] = s
        return out

    rows: list[SweepRow] = []
    if config.parallel:
        jobs = [(tri, slopes_for(s), config) for s in family]
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(_unseeded, jobs))
    else:
        seed = complete[1]
        for s in family:
            row, shapes = _row(tri, slopes_for(s), config, seed)
            if row.status == FAILED and seed is not None:
                row, shapes = _row(tri, slopes_for(s), config, None)
            rows.append(_relabel(row, s))
            if shapes is not None:
                seed = shapes
    rows = [_relabel(r, s) for r, s in zip(rows, family)]
    return SweepResult(tuple(rows), cusped, cusp)


def _relabel(row: SweepRow, slope: Slope) -> SweepRow:
    if row.slope == slope:
        return row
    return SweepRow(slope, row.status, row.volume, row.enclosure_width)
