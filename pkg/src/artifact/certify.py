"""Interval certification of gluing-equation solutions by the Krawczyk test.

For a square subsystem ``F`` with midpoint ``x``, preconditioner ``Y`` (the
floating inverse of ``F'(x)``) and a box vector ``X`` around ``x``,

    K(X) = x - Y F(x) + (I - Y F'(X)) (X - x).

``K(X)`` inside the interior of ``X`` proves that ``F`` has exactly one zero
in ``X``, and that zero lies in ``K(X)``.

The square subsystem takes rows in the order: per cusp the meridian (or the
filling row), then edges, then longitudes, keeping each row that is
independent of those already kept in the reduced coordinates
``(log z, log z')``. Rows left out are re-checked over the final boxes.

Why a left-out row only needs an enclosure of 0 of bounded width: an edge
or filling row that is a rational combination of kept rows and of the
per-tetrahedron relation ``z z' z'' = -1`` (in the slot coordinates) holds
after exponentiation up to a sign once raised to the common denominator
``d`` of that combination, so its logarithm lies in ``(pi i / d) Z`` and an
enclosure of 0 narrower than ``pi / d`` forces it to vanish. A longitude of
a cusp whose meridian row is kept has parabolic holonomy, since it commutes
with the meridian's translation, so its logarithm lies in ``2 pi i Z``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .intervals import PI, ComplexBox, Interval, IntervalError, render_box
from .solver import ShapeAssignment, jacobian, residual
from .triangulation import GluingSystem, independent_rows
from .volume import boxes_volume


class CertificationError(RuntimeError):
    pass


class NotCertified(CertificationError):
    """Krawczyk containment failed on every rung of the inflation ladder."""


class SubsystemRankDeficient(CertificationError):
    pass


class ApproximationTooCoarse(CertificationError):
    pass


@dataclass(frozen=True)
class CertifyConfig:
    max_residual: float = 1e-8
    min_radius: float = 1e-14
    residual_factor: float = 10.0
    inflation: float = 8.0
    max_inflations: int = 6


@dataclass(frozen=True)
class Certificate:
    boxes: tuple[ComplexBox, ...]
    geometric: bool
    unique: bool
    volume_enclosure: Optional[Interval]
    system_hash: str
    rows_used: tuple[int, ...] = ()
    inflations: int = 0
    row_enclosures: tuple[ComplexBox, ...] = field(default=(), compare=False)

    @property
    def n(self) -> int:
        return len(self.boxes)

    def contains(self, shapes: Sequence[complex]) -> bool:
        return all(b.contains(z) for b, z in zip(self.boxes, shapes))

    def render(self) -> str:
        """``(True, [a? + b?*I, ...])`` in the style of verified-shape listings."""
        inner = ", ".join(render_box(b) for b in self.boxes)
        return f"({self.unique and self.geometric}, [{inner}])"

    def to_dict(self) -> dict:
        return {
            "system_hash": self.system_hash,
            "unique": self.unique,
            "geometric": self.geometric,
            "rows_used": list(self.rows_used),
            "boxes": [
                {"re": [b.re.lo.hex(), b.re.hi.hex()], "im": [b.im.lo.hex(), b.im.hi.hex()]}
                for b in self.boxes
            ],
            "volume": None
            if self.volume_enclosure is None
            else [self.volume_enclosure.lo.hex(), self.volume_enclosure.hi.hex()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @staticmethod
    def from_dict(d: dict) -> "Certificate":
        boxes = tuple(
            ComplexBox(
                Interval(float.fromhex(b["re"][0]), float.fromhex(b["re"][1])),
                Interval(float.fromhex(b["im"][0]), float.fromhex(b["im"][1])),
            )
            for b in d["boxes"]
        )
        vol = d.get("volume")
        return Certificate(
            boxes=boxes,
            geometric=bool(d["geometric"]),
            unique=bool(d["unique"]),
            volume_enclosure=None if vol is None else Interval(float.fromhex(vol[0]), float.fromhex(vol[1])),
            system_hash=d["system_hash"],
            rows_used=tuple(d.get("rows_used", ())),
        )


def _priority(sys: GluingSystem) -> list[int]:
    first = [i for i, k in enumerate(sys.kinds) if k in ("meridian", "filling")]
    edges = [i for i, k in enumerate(sys.kinds) if k == "edge"]
    last = [i for i, k in enumerate(sys.kinds) if k == "longitude"]
    return first + edges + last


def square_subsystem(sys: GluingSystem) -> list[int]:
    """Indices of ``n`` rows forming an independent square subsystem."""
    order = _priority(sys)
    reduced = sys.reduced_rows()
    picked = independent_rows([reduced[i] for i in order])
    rows = [order[i] for i in picked][: sys.n]
    if len(rows) < sys.n:
        raise SubsystemRankDeficient(f"only {len(rows)} independent rows for {sys.n} unknowns")
    return rows


def _subsystem(sys: GluingSystem, rows: Sequence[int]) -> GluingSystem:
    return GluingSystem(
        tuple(sys.rows[i] for i in rows),
        tuple(sys.targets[i] for i in rows),
        tuple(sys.kinds[i] for i in rows),
        tuple(sys.cusps[i] for i in rows) if sys.cusps else (),
    )


def _shape_boxes(box: ComplexBox) -> tuple[ComplexBox, ComplexBox, ComplexBox]:
    return box, box.recip_one_minus(), box.one_minus_recip()


def interval_residual(sys: GluingSystem, boxes: Sequence[ComplexBox]) -> list[ComplexBox]:
    """Per-row enclosure of the row value minus its target."""
    if len(boxes) != sys.n:
        raise ValueError(f"{len(boxes)} boxes for {sys.n} unknowns")
    used = [any(row[k] for row in sys.rows) for k in range(3 * sys.n)]
    logs = []
    for j, b in enumerate(boxes):
        if b.contains_zero() or b.one_minus().contains_zero():
            raise IntervalError("box contains 0 or 1")
        # a slot no row touches may sit on the branch cut harmlessly
        logs.append(tuple(w.log() if used[3 * j + s] else None for s, w in enumerate(_shape_boxes(b))))
    out = []
    for row, nu in zip(sys.rows, sys.targets):
        acc = ComplexBox.point(0)
        for j in range(sys.n):
            for s in range(3):
                a = row[3 * j + s]
                if a:
                    acc = acc + logs[j][s] * float(a)
        acc = acc - ComplexBox(Interval.point(0.0), PI * float(nu))
        out.append(acc)
    return out


def _interval_jacobian(sys: GluingSystem, boxes: Sequence[ComplexBox]) -> list[list[ComplexBox]]:
    per = []
    for b in boxes:
        inv_z = b.recip()
        inv_1mz = b.recip_one_minus()
        per.append((inv_z, inv_1mz, -(inv_z * inv_1mz)))
    jac = []
    for row in sys.rows:
        line = []
        for j in range(sys.n):
            acc = ComplexBox.point(0)
            for s in range(3):
                a = row[3 * j + s]
                if a:
                    acc = acc + per[j][s] * float(a)
            line.append(acc)
        jac.append(line)
    return jac


def _mat_box_mul(y: np.ndarray, m: list[list[ComplexBox]]) -> list[list[ComplexBox]]:
    n = len(m)
    cols = len(m[0]) if m else 0
    out = []
    for i in range(n):
        line = []
        for j in range(cols):
            acc = ComplexBox.point(0)
            for k in range(n):
                yik = complex(y[i, k])
                if yik != 0:
                    acc = acc + m[k][j] * ComplexBox.point(yik)
            line.append(acc)
        out.append(line)
    return out


def krawczyk_step(sq: GluingSystem, mid: Sequence[complex], y: np.ndarray, boxes: Sequence[ComplexBox]):
    n = sq.n
    fx = interval_residual(sq, [ComplexBox.point(z) for z in mid])
    yf = _mat_box_mul(y, [[f] for f in fx])
    yj = _mat_box_mul(y, _interval_jacobian(sq, boxes))
    delta = [b - z for b, z in zip(boxes, mid)]
    out = []
    for i in range(n):
        acc = ComplexBox.point(mid[i]) - yf[i][0]
        for k in range(n):
            coeff = (1.0 if i == k else 0.0) - yj[i][k]
            acc = acc + coeff * delta[k]
        out.append(acc)
    return out


def krawczyk_certify(
    sys: GluingSystem,
    approx,
    config: CertifyConfig = CertifyConfig(),
) -> Certificate:
    """Prove existence and uniqueness of a solution near ``approx``."""
    shapes = list(approx.shapes) if isinstance(approx, ShapeAssignment) else [complex(z) for z in approx]
    if len(shapes) != sys.n:
        raise ValueError(f"{len(shapes)} shapes for {sys.n} unknowns")
    res = residual(sys, shapes)
    if not res < config.max_residual:
        raise ApproximationTooCoarse(f"approximate residual {res:.3e} exceeds {config.max_residual:g}")
    rows = square_subsystem(sys)
    sq = _subsystem(sys, rows)
    mid = np.array(shapes, dtype=complex)
    jac = jacobian(sq, mid)
    try:
        y = np.linalg.inv(jac)
    except np.linalg.LinAlgError:
        raise SubsystemRankDeficient("square Jacobian is singular at the approximation") from None
    if not np.all(np.isfinite(y)) or np.linalg.cond(jac) > 1e12:
        raise SubsystemRankDeficient("square Jacobian is numerically singular at the approximation")
    radius = max(config.min_radius, config.residual_factor * res)
    for step in range(config.max_inflations + 1):
        boxes = [ComplexBox.around(z, radius) for z in shapes]
        try:
            image = krawczyk_step(sq, list(mid), y, boxes)
        except IntervalError:
            break
        if all(b.interior_contains(k) for b, k in zip(boxes, image)):
            return _finish(sys, rows, image, step)
        radius *= config.inflation
    raise NotCertified("Krawczyk containment failed on the whole inflation ladder")


def _implied_order(target: Sequence[int], basis: list[Sequence[int]]) -> Optional[int]:
    """Least ``d`` with ``d * target`` an integer combination of ``basis``,
    restricted to the rational combination found by elimination; ``None`` if
    ``target`` is outside the rational span."""
    m = len(basis)
    dim = len(target)
    # columns are basis vectors; solve basis^T c = target exactly
    aug = [[Fraction(basis[j][i]) for j in range(m)] + [Fraction(target[i])] for i in range(dim)]
    pivots = []
    r = 0
    for col in range(m):
        pr = next((i for i in range(r, dim) if aug[i][col] != 0), None)
        if pr is None:
            continue
        aug[r], aug[pr] = aug[pr], aug[r]
        pv = aug[r][col]
        aug[r] = [x / pv for x in aug[r]]
        for i in range(dim):
            if i != r and aug[i][col] != 0:
                c = aug[i][col]
                aug[i] = [x - c * y for x, y in zip(aug[i], aug[r])]
        pivots.append(col)
        r += 1
    if any(aug[i][m] != 0 for i in range(r, dim)):
        return None
    d = 1
    for i in range(r):
        d = math.lcm(d, aug[i][m].denominator)
    return d


def _dropped_bounds(sys: GluingSystem, rows: Sequence[int]) -> dict[int, float]:
    """Largest admissible imaginary width for each row outside ``rows``."""
    n = sys.n
    kept = [sys.rows[i] for i in rows]
    tets = [tuple(1 if j // 3 == t else 0 for j in range(3 * n)) for t in range(n)]
    kept_cusps = {sys.cusps[i] for i in rows if sys.kinds[i] == "meridian"}
    out = {}
    for i in range(len(sys.rows)):
        if i in rows:
            continue
        d = _implied_order(sys.rows[i], kept + tets)
        if d is not None:
            out[i] = math.pi / d
        elif sys.kinds[i] == "longitude" and sys.cusps[i] in kept_cusps:
            out[i] = 2 * math.pi
        else:
            out[i] = 0.0
    return out


def _finish(sys: GluingSystem, rows: list[int], boxes: list[ComplexBox], steps: int) -> Certificate:
    try:
        enclosures = interval_residual(sys, boxes)
    except IntervalError as exc:
        raise NotCertified(f"full system cannot be evaluated on the boxes: {exc}") from None
    bounds = _dropped_bounds(sys, rows)
    for i, enc in enumerate(enclosures):
        if not enc.contains_zero():
            raise NotCertified(f"row {i} ({sys.kinds[i]}) is not satisfied on the certified boxes")
        if i in bounds and not enc.im.width < bounds[i]:
            raise NotCertified(f"row {i} ({sys.kinds[i]}) is not pinned to 0 by the certified boxes")
    geometric = all(b.im.lo > 0 for b in boxes)
    vol = None
    if geometric:
        try:
            vol = boxes_volume(boxes).value
        except IntervalError:
            vol = None
    return Certificate(
        boxes=tuple(boxes),
        geometric=geometric,
        unique=True,
        volume_enclosure=vol,
        system_hash=sys.digest(),
        rows_used=tuple(rows),
        inflations=steps,
        row_enclosures=tuple(enclosures),
    )
