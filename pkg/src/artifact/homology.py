"""Smith normal form and first homology of surgery presentations.

All arithmetic is on Python integers, so entry growth never overflows.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

Matrix = list  # list[list[int]]


class HomologyError(ValueError):
    pass


def _copy(a: Sequence[Sequence[int]]) -> Matrix:
    return [[int(x) for x in row] for row in a]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols)] for i in range(len(a))]


def determinant(a: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    m = _copy(a)
    n = len(m)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def smith_normal_form(a: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(U, D, V)`` with ``U A V = D``, ``U`` and ``V`` unimodular.

    ``D`` is diagonal with nonnegative entries ``d_1 | d_2 | ...``. Pivots are
    chosen by smallest nonzero absolute value.
    """
    d = _copy(a)
    rows = len(d)
    cols = len(d[0]) if rows else 0
    u = identity(rows)
    v = identity(cols)

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):
        d[dst] = [x + k * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, k):
        for row in d:
            row[dst] += k * row[src]
        for row in v:
            row[dst] += k * row[src]

    s = 0
    while s < min(rows, cols):
        best = None
        for i in range(s, rows):
            for j in range(s, cols):
                if d[i][j] and (best is None or abs(d[i][j]) < abs(d[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(s, best[0])
        swap_cols(s, best[1])
        clean = True
        for i in range(s + 1, rows):
            if d[i][s]:
                add_row(i, s, -(d[i][s] // d[s][s]))
                clean = clean and d[i][s] == 0
        for j in range(s + 1, cols):
            if d[s][j]:
                add_col(j, s, -(d[s][j] // d[s][s]))
                clean = clean and d[s][j] == 0
        if not clean:
            continue
        # enforce divisibility by the pivot on the remaining block
        bad = next(
            ((i, j) for i in range(s + 1, rows) for j in range(s + 1, cols) if d[i][j] % d[s][s]),
            None,
        )
        if bad is not None:
            add_row(s, bad[0], 1)
            continue
        if d[s][s] < 0:
            d[s] = [-x for x in d[s]]
            u[s] = [-x for x in u[s]]
        s += 1
    return u, d, v


def diagonal(d: Matrix) -> list[int]:
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]


@dataclass(frozen=True)
class AbelianGroup:
    rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 0 or any(t < 2 for t in self.torsion):
            raise HomologyError("invalid abelian group data")
        if any(b % a for a, b in zip(self.torsion, self.torsion[1:])):
            raise HomologyError("torsion coefficients must form a divisibility chain")

    @property
    def trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    @property
    def order(self) -> Optional[int]:
        if self.rank:
            return None
        out = 1
        for t in self.torsion:
            out *= t
        return out

    def __str__(self) -> str:
        parts = [f"Z/{t}" for t in self.torsion] + ["Z"] * self.rank
        return " ⊕ ".join(parts) if parts else "0"


def cokernel(a: Sequence[Sequence[int]], columns: Optional[int] = None) -> AbelianGroup:
    """``Z^columns / rowspace(a)``."""
    rows = _copy(a)
    cols = columns if columns is not None else (len(rows[0]) if rows else 0)
    if not rows:
        return AbelianGroup(cols)
    _, d, _ = smith_normal_form(rows)
    diag = diagonal(d)
    nonzero = [x for x in diag if x]
    torsion = tuple(x for x in nonzero if x > 1)
    return AbelianGroup(cols - len(nonzero), torsion)


@dataclass(frozen=True)
class LinkingMatrix:
    matrix: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        m = self.matrix
        if any(len(row) != len(m) for row in m):
            raise HomologyError("linking matrix must be square")
        if any(m[i][j] != m[j][i] for i in range(len(m)) for j in range(len(m))):
            raise HomologyError("linking matrix must be symmetric")
        if self.labels and len(self.labels) != len(m):
            raise HomologyError("one label per component")

    @property
    def size(self) -> int:
        return len(self.matrix)

    @staticmethod
    def of(rows, labels=()) -> "LinkingMatrix":
        return LinkingMatrix(tuple(tuple(int(x) for x in r) for r in rows), tuple(labels))


def parse_linking_matrix(text: str) -> LinkingMatrix:
    """JSON object with ``size``, row-major ``matrix`` and optional ``labels``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise HomologyError(f"malformed document: {exc}") from None
    if not isinstance(doc, dict):
        raise HomologyError("document must be an object")
    extra = set(doc) - {"size", "matrix", "labels"}
    if extra:
        raise HomologyError(f"unknown fields: {sorted(extra)}")
    size = doc.get("size")
    flat = doc.get("matrix")
    if not isinstance(size, int) or isinstance(size, bool) or size < 0:
        raise HomologyError("size must be a nonnegative integer")
    if not isinstance(flat, list):
        raise HomologyError("matrix must be a list")
    if flat and isinstance(flat[0], list):
        flat = [x for row in flat for x in row]
    if len(flat) != size * size or not all(isinstance(x, int) and not isinstance(x, bool) for x in flat):
        raise HomologyError(f"matrix must hold {size * size} integers")
    labels = doc.get("labels", [])
    if not isinstance(labels, list) or not all(isinstance(s, str) for s in labels):
        raise HomologyError("labels must be a list of strings")
    return LinkingMatrix.of([flat[i * size : (i + 1) * size] for i in range(size)], labels)


def surgery_homology(link: LinkingMatrix) -> AbelianGroup:
    """H_1 of the surgered manifold: the cokernel of the linking matrix."""
    return cokernel(link.matrix, link.size)


def is_homology_sphere(link: LinkingMatrix) -> bool:
    return surgery_homology(link).trivial


def meridian_extension(link: LinkingMatrix, component: int) -> LinkingMatrix:
    """Append a 0-framed meridian of ``component``."""
    m = link.size
    if not 0 <= component < m:
        raise IndexError(f"component {component} out of range for {m} components")
    rows = [list(r) + [int(i == component)] for i, r in enumerate(link.matrix)]
    rows.append([int(j == component) for j in range(m)] + [0])
    labels = link.labels + ("meridian",) if link.labels else ()
    return LinkingMatrix.of(rows, labels)


def meridian_zero_surgery_check(link: LinkingMatrix, component: int) -> bool:
    """Whether 0-surgery on the meridian of ``component`` gives H_1 = Z."""
    g = surgery_homology(meridian_extension(link, component))
    return g.rank == 1 and not g.torsion


@dataclass(frozen=True)
class DualPresentation:
    """H_1 of an ideal triangulation presented on its dual 1-skeleton.

    Every face pair is a dual edge; those in a spanning tree of the dual graph
    are collapsed, the rest are generators (``columns``). Each edge class
    gives one relation.
    """

    index: dict  # (t, f) -> (face pair number, sign)
    column: dict  # face pair number -> generator column, for non-tree pairs
    relations: tuple[tuple[int, ...], ...]

    @property
    def generators(self) -> int:
        return len(self.column)

    def crossing_vector(self, steps) -> list[int]:
        """Class of a loop given as the faces ``(t, f)`` it leaves through."""
        vec = [0] * self.generators
        for t, f in steps:
            k, sign = self.index[(t, f)]
            if k in self.column:
                vec[self.column[k]] += sign
        return vec

    def group(self) -> AbelianGroup:
        return cokernel(self.relations, self.generators)


def dual_presentation(tri) -> DualPresentation:
    from .triangulation import edge_classes

    n = tri.n
    index = {}
    pairs = 0
    for t in range(n):
        for f in range(4):
            u, p = tri.gluings[t][f]
            if (t, f) <= (u, p[f]):
                index[(t, f)] = (pairs, 1)
                index[(u, p[f])] = (pairs, -1)
                pairs += 1
    seen = {0}
    tree = set()
    stack = [0]
    while stack:
        t = stack.pop()
        for f in range(4):
            u = tri.gluings[t][f][0]
            if u not in seen:
                seen.add(u)
                tree.add(index[(t, f)][0])
                stack.append(u)
    column = {k: i for i, k in enumerate(k for k in range(pairs) if k not in tree)}
    pres = DualPresentation(index, column, ())
    rels = []
    for ec in edge_classes(tri):
        t, (a, b) = ec.incidences[0]
        c, d = (w for w in range(4) if w not in (a, b))
        state = (t, a, b, c, d)
        steps = []
        for _ in range(ec.degree):
            s, x, y, pc, pd = state
            steps.append((s, pc))
            u, perm = tri.gluings[s][pc]
            state = (u, perm[x], perm[y], perm[pd], perm[pc])
        rels.append(tuple(pres.crossing_vector(steps)))
    return DualPresentation(index, column, tuple(rels))


def triangulation_homology(tri) -> AbelianGroup:
    """H_1 of the manifold of an ideal triangulation, from its dual 2-skeleton."""
    return dual_presentation(tri).group()


def _reduce(basis: list, vec: list) -> list:
    # basis rows are in echelon form with a leading 1 at ``lead``
    out = [Fraction(x) for x in vec]
    for lead, row in basis:
        if out[lead]:
            c = out[lead]
            out = [x - c * y for x, y in zip(out, row)]
    return out


def _echelon(rows) -> list:
    basis = []
    for r in rows:
        v = _reduce(basis, r)
        lead = next((i for i, x in enumerate(v) if x), None)
        if lead is None:
            continue
        v = [x / v[lead] for x in v]
        basis = [(l, [x - row[lead] * y for x, y in zip(row, v)]) for l, row in basis]
        basis.append((lead, v))
    return basis


def rational_kernel_slope(relations, a: Sequence[int], b: Sequence[int]) -> Optional[tuple[int, int]]:
    """Primitive ``(x, y)`` with ``x a + y b`` in the rational span of
    ``relations``, when that kernel has rank exactly one."""
    basis = _echelon(relations)
    ra, rb = _reduce(basis, a), _reduce(basis, b)
    za, zb = not any(ra), not any(rb)
    if za and zb:
        return None
    if za:
        return 1, 0
    if zb:
        return 0, 1
    i = next(i for i, x in enumerate(rb) if x)
    t = ra[i] / rb[i]
    if any(x != t * y for x, y in zip(ra, rb)):
        return None
    # a - t b vanishes; clear the denominator
    x, y = t.denominator, -t.numerator
    g = math.gcd(x, y)
    return x // g, y // g
