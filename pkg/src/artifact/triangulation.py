"""Ideal triangulations of cusped orientable 3-manifolds.

A triangulation is a list of tetrahedra whose faces are glued in pairs.
Face ``f`` of tetrahedron ``t`` is the face opposite vertex ``f``; the record
``(to, perm)`` sends vertex ``i`` of ``t`` to vertex ``perm[i]`` of ``to``, so
face ``f`` lands on face ``perm[f]``.

Shape slots follow one global convention: edges 01 and 23 carry ``z``,
02 and 13 carry ``z' = 1/(1 - z)``, 03 and 12 carry ``z'' = 1 - 1/z``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from itertools import permutations
from typing import Iterable, Optional, Sequence

EDGES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
SLOT_NAMES = ("z", "z'", "z''")
_SLOT = {(0, 1): 0, (2, 3): 0, (0, 2): 1, (1, 3): 1, (0, 3): 2, (1, 2): 2}

KINDS = ("edge", "meridian", "longitude", "filling")
FIXTURES = ("figure_eight", "whitehead", "borromean")


class TriangulationError(ValueError):
    """Malformed or inconsistent triangulation data."""


def edge_slot(a: int, b: int) -> int:
    """Shape slot (0 for z, 1 for z', 2 for z'') of the edge joining a and b."""
    return _SLOT[(a, b) if a < b else (b, a)]


def perm_parity(perm: Sequence[int]) -> int:
    inv = sum(1 for i in range(4) for j in range(i + 1, 4) if perm[i] > perm[j])
    return inv % 2


def perm_inverse(perm: Sequence[int]) -> tuple[int, ...]:
    out = [0] * 4
    for i, p in enumerate(perm):
        out[p] = i
    return tuple(out)


@dataclass(frozen=True)
class IdealTriangulation:
    """Gluing data plus one (meridian, longitude) pair of rows per cusp.

    Cusps are indexed by the order in which their vertex classes are first
    met when scanning ``(tetrahedron, vertex)`` pairs lexicographically.
    """

    name: str
    gluings: tuple[tuple[tuple[int, tuple[int, int, int, int]], ...], ...]
    peripheral: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...] = ()

    @property
    def n(self) -> int:
        return len(self.gluings)

    def neighbor(self, t: int, f: int) -> tuple[int, tuple[int, int, int, int]]:
        return self.gluings[t][f]

    def with_peripheral(self, rows) -> "IdealTriangulation":
        rows = tuple((tuple(int(x) for x in m), tuple(int(x) for x in l)) for m, l in rows)
        return IdealTriangulation(self.name, self.gluings, rows)

    def renamed(self, name: str) -> "IdealTriangulation":
        return IdealTriangulation(name, self.gluings, self.peripheral)


@dataclass(frozen=True)
class EdgeClass:
    """Cyclically ordered incidences ``(tetrahedron, (a, b))`` around one edge."""

    incidences: tuple[tuple[int, tuple[int, int]], ...]

    @property
    def slots(self) -> tuple[int, ...]:
        return tuple(edge_slot(a, b) for _, (a, b) in self.incidences)

    @property
    def degree(self) -> int:
        return len(self.incidences)


@dataclass(frozen=True)
class ValidationReport:
    n: int
    edge_classes: int
    cusps: int
    euler: tuple[int, ...]
    problems: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.problems

    def summary(self) -> str:
        status = "pass" if self.ok else "fail"
        lines = [
            f"{status}: {self.n} tetrahedra, {self.edge_classes} edges, {self.cusps} cusps, "
            f"euler {list(self.euler)}"
        ]
        lines.extend(f"  {p}" for p in self.problems)
        return "\n".join(lines)


@dataclass(frozen=True)
class GluingSystem:
    """Rows of integer log-coefficients ``(a_j, b_j, c_j)`` with targets ``nu * pi * i``."""

    rows: tuple[tuple[int, ...], ...]
    targets: tuple[int, ...]
    kinds: tuple[str, ...]
    cusps: tuple[int, ...] = field(default=())

    @property
    def n(self) -> int:
        if not self.rows:
            return 0
        return len(self.rows[0]) // 3

    def __len__(self) -> int:
        return len(self.rows)

    def reduced_rows(self) -> list[list[int]]:
        """Rows in the 2n coordinates (log z, log z') after log z'' = pi i - log z - log z'."""
        out = []
        for row in self.rows:
            red = []
            for j in range(self.n):
                a, b, c = row[3 * j : 3 * j + 3]
                red.extend((a - c, b - c))
            out.append(red)
        return out

    def reduced_targets(self) -> list[int]:
        return [nu - sum(row[3 * j + 2] for j in range(self.n)) for row, nu in zip(self.rows, self.targets)]

    def digest(self) -> str:
        import hashlib

        payload = json.dumps([self.rows, self.targets, self.kinds], separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()

    def concatenate(self, other: "GluingSystem") -> "GluingSystem":
        """Block-diagonal union; the result describes the disjoint union."""
        n1, n2 = self.n, other.n
        rows = [tuple(r) + (0,) * (3 * n2) for r in self.rows]
        rows += [(0,) * (3 * n1) + tuple(r) for r in other.rows]
        off = max(self.cusps, default=-1) + 1
        return GluingSystem(
            tuple(rows),
            self.targets + other.targets,
            self.kinds + other.kinds,
            self.cusps + tuple(c + off if c >= 0 else c for c in other.cusps),
        )


# ---------------------------------------------------------------------------
# combinatorics


def _check_structure(gluings) -> list[str]:
    problems = []
    n = len(gluings)
    for t, faces in enumerate(gluings):
        if len(faces) != 4:
            problems.append(f"tetrahedron {t} has {len(faces)} face records")
            continue
        for f, (u, perm) in enumerate(faces):
            if not 0 <= u < n:
                problems.append(f"face {t}.{f} glued to missing tetrahedron {u}")
                continue
            if sorted(perm) != [0, 1, 2, 3]:
                problems.append(f"face {t}.{f} has invalid permutation {list(perm)}")
                continue
            back = gluings[u][perm[f]]
            if back[0] != t or tuple(back[1]) != perm_inverse(perm):
                problems.append(f"gluing of face {t}.{f} is not involutive")
            elif (u, perm[f]) == (t, f):
                problems.append(f"face {t}.{f} glued to itself")
    return problems


class _DSU:
    def __init__(self, items: Iterable):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


def vertex_classes(tri: IdealTriangulation) -> list[list[tuple[int, int]]]:
    """Ideal vertex classes as lists of ``(t, v)``, in cusp-index order."""
    dsu = _DSU((t, v) for t in range(tri.n) for v in range(4))
    for t in range(tri.n):
        for f, (u, perm) in enumerate(tri.gluings[t]):
            for v in range(4):
                if v != f:
                    dsu.union((t, v), (u, perm[v]))
    groups: dict = {}
    for t in range(tri.n):
        for v in range(4):
            groups.setdefault(dsu.find((t, v)), []).append((t, v))
    return sorted(groups.values(), key=lambda g: g[0])


def cusp_index_map(tri: IdealTriangulation) -> dict[tuple[int, int], int]:
    return {tv: k for k, group in enumerate(vertex_classes(tri)) for tv in group}


def edge_classes(tri: IdealTriangulation) -> list[EdgeClass]:
    """Edge classes with incidences listed in cyclic order around the edge."""
    seen = set()
    out = []
    for t in range(tri.n):
        for a, b in EDGES:
            if (t, (a, b)) in seen:
                continue
            c, d = (w for w in range(4) if w not in (a, b))
            start = (t, a, b, c, d)
            state = start
            inc = []
            for _ in range(6 * tri.n + 1):
                s, x, y, p, q = state
                key = (s, (x, y) if x < y else (y, x))
                if key in seen:
                    break
                seen.add(key)
                inc.append(key)
                u, perm = tri.gluings[s][p]
                state = (u, perm[x], perm[y], perm[q], perm[p])
            out.append(EdgeClass(tuple(inc)))
    return out


def cusp_euler_characteristics(tri: IdealTriangulation) -> list[int]:
    """Euler characteristic of each vertex link, in cusp-index order."""
    classes = vertex_classes(tri)
    index = {tv: k for k, group in enumerate(classes) for tv in group}
    ends = _DSU((t, v, w) for t in range(tri.n) for v in range(4) for w in range(4) if w != v)
    for t in range(tri.n):
        for f, (u, perm) in enumerate(tri.gluings[t]):
            for v in range(4):
                for w in range(4):
                    if len({v, w, f}) == 3:
                        ends.union((t, v, w), (u, perm[v], perm[w]))
    verts = [set() for _ in classes]
    for t in range(tri.n):
        for v in range(4):
            for w in range(4):
                if w != v:
                    verts[index[(t, v)]].add(ends.find((t, v, w)))
    return [len(verts[k]) - len(g) * 3 // 2 + len(g) for k, g in enumerate(classes)]


def is_orientable_gluing(tri: IdealTriangulation) -> bool:
    return all(perm_parity(perm) == 1 for faces in tri.gluings for _, perm in faces)


def edge_rows(tri: IdealTriangulation) -> list[tuple[int, ...]]:
    rows = []
    for ec in edge_classes(tri):
        row = [0] * (3 * tri.n)
        for t, (a, b) in ec.incidences:
            row[3 * t + edge_slot(a, b)] += 1
        rows.append(tuple(row))
    return rows


def rational_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank over Q by exact elimination."""
    return len(independent_rows(rows))


def independent_rows(rows: Sequence[Sequence[int]]) -> list[int]:
    """Indices of the first maximal independent subset of rows, scanning in order."""
    basis: list[tuple[int, list[Fraction]]] = []
    keep = []
    for i, row in enumerate(rows):
        vec = [Fraction(x) for x in row]
        for pivot, b in basis:
            if vec[pivot]:
                factor = vec[pivot] / b[pivot]
                vec = [x - factor * y for x, y in zip(vec, b)]
        nz = next((j for j, x in enumerate(vec) if x), None)
        if nz is not None:
            basis.append((nz, vec))
            keep.append(i)
    return keep


_GENERIC_POINTS = (
    (Fraction(3, 7), Fraction(5, 11), Fraction(-2, 13), Fraction(17, 5), Fraction(-9, 4), Fraction(7, 19)),
    (Fraction(-5, 7), Fraction(11, 23), Fraction(13, 6), Fraction(-1, 8), Fraction(29, 31), Fraction(4, 9)),
)


def jacobian_rank(rows: Sequence[Sequence[int]], n: int) -> int:
    """Generic rank of the Jacobian of the log-equations in the n shape variables.

    Each entry ``a/z + b/(1 - z) + c/(z(z - 1))`` is evaluated exactly at
    fixed rational points; the maximum rank over the points is returned.
    """
    best = 0
    for pts in _GENERIC_POINTS:
        zs = [pts[j % len(pts)] + Fraction(j // len(pts), 3) for j in range(n)]
        mat = []
        for row in rows:
            mat.append([
                row[3 * j] / zs[j] + row[3 * j + 1] / (1 - zs[j]) + row[3 * j + 2] / (zs[j] * (zs[j] - 1))
                for j in range(n)
            ])
        best = max(best, rational_rank(mat))
    return best


def validate(tri: IdealTriangulation) -> ValidationReport:
    """Check every structural invariant; failures are collected, never raised."""
    problems = _check_structure(tri.gluings)
    if tri.n == 0:
        problems.append("no tetrahedra")
    if problems:
        return ValidationReport(tri.n, 0, 0, (), tuple(problems))
    if not is_orientable_gluing(tri):
        problems.append("gluing permutations are not all odd (non-orientable or inconsistently oriented)")
    edges = edge_classes(tri)
    euler = tuple(cusp_euler_characteristics(tri))
    if len(edges) != tri.n:
        problems.append(f"{len(edges)} edge classes, expected {tri.n}")
    for k, chi in enumerate(euler):
        if chi != 0:
            problems.append(f"cusp {k} link has Euler characteristic {chi}")
    if len(tri.peripheral) != len(euler):
        problems.append(f"{len(tri.peripheral)} peripheral pairs for {len(euler)} cusps")
    else:
        for k, (m, l) in enumerate(tri.peripheral):
            if len(m) != 3 * tri.n or len(l) != 3 * tri.n:
                problems.append(f"cusp {k} peripheral row has wrong length")
        if not problems:
            base = jacobian_rank(edge_rows(tri), tri.n)
            if base != tri.n - len(euler):
                problems.append(f"edge rows have rank {base}, expected {tri.n - len(euler)}")
            full = jacobian_rank(gluing_system(tri).rows, tri.n)
            if full != tri.n:
                problems.append(f"edge and peripheral rows have rank {full}, expected {tri.n}")
    return ValidationReport(tri.n, len(edges), len(euler), euler, tuple(problems))


# ---------------------------------------------------------------------------
# gluing equations


def gluing_system(tri: IdealTriangulation, slopes: Optional[Sequence] = None) -> GluingSystem:
    """Edge rows, then per cusp either (meridian, longitude) or one filling row.

    ``slopes`` holds one entry per cusp: ``None`` or a slope object with
    ``is_filled``, ``p`` and ``q`` attributes (see ``artifact.filling.Slope``).
    """
    ncusps = len(tri.peripheral)
    if slopes is not None and len(slopes) != ncusps:
        raise TriangulationError(f"{len(slopes)} slopes given for {ncusps} cusps")
    rows = edge_rows(tri)
    targets = [2] * len(rows)
    kinds = ["edge"] * len(rows)
    cusps = [-1] * len(rows)
    for k, (mer, lon) in enumerate(tri.peripheral):
        s = slopes[k] if slopes is not None else None
        if s is not None and getattr(s, "is_filled", False):
            rows.append(tuple(s.p * a + s.q * b for a, b in zip(mer, lon)))
            targets.append(2)
            kinds.append("filling")
            cusps.append(k)
        else:
            rows.extend((tuple(mer), tuple(lon)))
            targets.extend((0, 0))
            kinds.extend(("meridian", "longitude"))
            cusps.extend((k, k))
    return GluingSystem(tuple(rows), tuple(targets), tuple(kinds), tuple(cusps))


# ---------------------------------------------------------------------------
# file format

_TOP_FIELDS = {"name", "tetrahedra", "gluings", "cusps"}


def _int(x, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise TriangulationError(f"{what} must be an integer, got {x!r}")
    return x


def parse_triangulation(text: str) -> IdealTriangulation:
    """Parse a triangulation document (JSON object, unknown fields rejected)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TriangulationError(f"malformed document: {exc}") from None
    if not isinstance(doc, dict):
        raise TriangulationError("document must be an object")
    extra = set(doc) - _TOP_FIELDS
    if extra:
        raise TriangulationError(f"unknown fields: {sorted(extra)}")
    missing = _TOP_FIELDS - set(doc)
    if missing:
        raise TriangulationError(f"missing fields: {sorted(missing)}")
    name = doc["name"]
    if not isinstance(name, str):
        raise TriangulationError("name must be text")
    n = _int(doc["tetrahedra"], "tetrahedra")
    if n < 1:
        raise TriangulationError("a triangulation needs at least one tetrahedron")
    glu = doc["gluings"]
    if not isinstance(glu, list) or len(glu) != n:
        raise TriangulationError(f"gluings must list {n} tetrahedra")
    gluings = []
    for t, faces in enumerate(glu):
        if not isinstance(faces, list) or len(faces) != 4:
            raise TriangulationError(f"tetrahedron {t} needs 4 face records")
        recs = []
        for f, rec in enumerate(faces):
            if not isinstance(rec, dict) or set(rec) != {"to", "perm"}:
                raise TriangulationError(f"face record {t}.{f} must have exactly 'to' and 'perm'")
            u = _int(rec["to"], f"face {t}.{f} target")
            if not 0 <= u < n:
                raise TriangulationError(f"face {t}.{f} targets tetrahedron {u}, out of range")
            perm = rec["perm"]
            if not isinstance(perm, list) or sorted(_int(p, "perm entry") for p in perm) != [0, 1, 2, 3]:
                raise TriangulationError(f"face {t}.{f} has an invalid permutation")
            recs.append((u, tuple(perm)))
        gluings.append(tuple(recs))
    problems = _check_structure(gluings)
    if problems:
        raise TriangulationError("; ".join(problems))
    cusps = doc["cusps"]
    if not isinstance(cusps, list):
        raise TriangulationError("cusps must be a list")
    periph = []
    for k, c in enumerate(cusps):
        if not isinstance(c, dict) or set(c) != {"meridian", "longitude"}:
            raise TriangulationError(f"cusp {k} must have exactly 'meridian' and 'longitude'")
        pair = []
        for key in ("meridian", "longitude"):
            row = c[key]
            if not isinstance(row, list) or len(row) != 3 * n:
                raise TriangulationError(f"cusp {k} {key} row must have {3 * n} entries")
            pair.append(tuple(_int(x, f"cusp {k} {key} entry") for x in row))
        periph.append(tuple(pair))
    return IdealTriangulation(name, tuple(gluings), tuple(periph))


def dump_triangulation(tri: IdealTriangulation) -> str:
    """Serialize; one line per tetrahedron and per peripheral row."""
    lines = ["{", f'  "name": {json.dumps(tri.name)},', f'  "tetrahedra": {tri.n},', '  "gluings": [']
    for t, faces in enumerate(tri.gluings):
        recs = ", ".join(f'{{"to": {u}, "perm": [{", ".join(map(str, p))}]}}' for u, p in faces)
        lines.append(f"    [{recs}]" + ("," if t < tri.n - 1 else ""))
    lines.append("  ],")
    lines.append('  "cusps": [')
    for k, (m, l) in enumerate(tri.peripheral):
        lines.append("    {")
        lines.append(f'      "meridian": [{", ".join(map(str, m))}],')
        lines.append(f'      "longitude": [{", ".join(map(str, l))}]')
        lines.append("    }" + ("," if k < len(tri.peripheral) - 1 else ""))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def load_triangulation(path) -> IdealTriangulation:
    with open(path, encoding="utf-8") as fh:
        return parse_triangulation(fh.read())


def load_fixture(name: str) -> IdealTriangulation:
    """One of the shipped fixtures: figure_eight, whitehead, borromean."""
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {FIXTURES}")
    text = resources.files("artifact.fixtures").joinpath(f"{name}.tri").read_text(encoding="utf-8")
    return parse_triangulation(text)


def fixture_path(name: str) -> str:
    return str(resources.files("artifact.fixtures").joinpath(f"{name}.tri"))


def from_gluings(name: str, gluings, peripheral=()) -> IdealTriangulation:
    """Build from nested lists ``[[(to, perm), ...x4], ...]``."""
    g = tuple(tuple((int(u), tuple(int(x) for x in p)) for u, p in faces) for faces in gluings)
    problems = _check_structure(g)
    if problems:
        raise TriangulationError("; ".join(problems))
    return IdealTriangulation(name, g, tuple(peripheral))


ALL_PERMS = tuple(permutations(range(4)))
ODD_PERMS = tuple(p for p in ALL_PERMS if perm_parity(p) == 1)
