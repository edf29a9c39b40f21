"""Link diagrams to ideal triangulations of link complements.

PD tuples list the four strand labels at a crossing counterclockwise,
starting from the incoming under-strand, so positions 0 and 2 are under and
1 and 3 are over.

Each crossing contributes an octahedron split into four tetrahedra, one per
corner of the crossing. Tetrahedron vertices are labelled ``0`` (the point
above the projection plane), ``1`` (the point below), ``2`` and ``3`` (the
strands at the two crossing ends bounding the corner, in counterclockwise
order). The two points above and below end up as finite vertices; they are
removed by edge collapses and the result is brought back to four tetrahedra
per crossing with 2-3 and 3-2 moves.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Optional

from . import moves
from .triangulation import (
    IdealTriangulation,
    TriangulationError,
    cusp_euler_characteristics,
    edge_slot,
    from_gluings,
    perm_inverse,
    perm_parity,
    validate,
    vertex_classes,
)

ABOVE, BELOW = 0, 1


class DiagramError(ValueError):
    """Invalid or unsupported planar diagram."""


@dataclass(frozen=True)
class PDCode:
    crossings: tuple[tuple[int, int, int, int], ...]
    components: int

    def __len__(self) -> int:
        return len(self.crossings)


@dataclass(frozen=True)
class DiagramConfig:
    """Knobs for :func:`octahedral_triangulation`."""

    seed: int = 0
    max_attempts: int = 200
    resize: bool = True


_TUPLE = re.compile(r"-?\d+")


def parse_pd(text: str) -> PDCode:
    """Read ``X a b c d`` lines (blank lines and ``#`` comments ignored)."""
    crossings = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head not in ("X", "x"):
            raise DiagramError(f"line {lineno}: expected 'X a b c d'")
        nums = _TUPLE.findall(rest)
        if len(nums) != 4 or re.sub(r"[-\d\s,()\[\]]", "", rest):
            raise DiagramError(f"line {lineno}: a crossing needs exactly 4 integer labels")
        crossings.append(tuple(int(x) for x in nums))
    return pd_code(crossings)


def pd_code(crossings) -> PDCode:
    """Validate a list of 4-tuples and count link components."""
    xs = tuple(tuple(int(a) for a in x) for x in crossings)
    if any(len(x) != 4 for x in xs):
        raise DiagramError("every crossing needs 4 labels")
    if len(xs) < 2:
        raise DiagramError("a diagram needs at least 2 crossings")
    seen: dict[int, list[tuple[int, int]]] = {}
    for k, x in enumerate(xs):
        if len(set(x)) != 4:
            raise DiagramError(f"crossing {k} repeats a label")
        for i, a in enumerate(x):
            seen.setdefault(a, []).append((k, i))
    bad = sorted(a for a, occ in seen.items() if len(occ) != 2)
    if bad:
        raise DiagramError(f"labels {bad} do not occur exactly twice")
    # connectivity of the diagram
    parent = list(range(len(xs)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for occ in seen.values():
        parent[find(occ[0][0])] = find(occ[1][0])
    if len({find(k) for k in range(len(xs))}) != 1:
        raise DiagramError("diagram is disconnected")
    comps = _components(xs)
    faces, _ = _faces(xs)
    if len(faces) != len(xs) + 2:
        raise DiagramError("crossing data does not describe a planar diagram")
    # a component that is only ever over (or only under) can be pulled off
    for comp in comps:
        kinds = {i % 2 for k, x in enumerate(xs) for i, a in enumerate(x) if a in comp}
        if len(kinds) != 2:
            raise DiagramError("diagram is visibly split; unsupported")
    return PDCode(xs, len(comps))


def _components(xs) -> list[set[int]]:
    parent = {a: a for x in xs for a in x}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for x in xs:
        parent[find(x[0])] = find(x[2])
        parent[find(x[1])] = find(x[3])
    groups: dict = {}
    for a in parent:
        groups.setdefault(find(a), set()).add(a)
    return sorted(groups.values(), key=min)


def _faces(xs):
    """Regions of the diagram as cycles of darts ``(crossing, position)``."""
    where: dict[int, list[tuple[int, int]]] = {}
    for k, x in enumerate(xs):
        for i, a in enumerate(x):
            where.setdefault(a, []).append((k, i))
    other = {}
    for a, (d0, d1) in where.items():
        other[d0], other[d1] = d1, d0
    seen = set()
    faces = []
    for k in range(len(xs)):
        for i in range(4):
            d = (k, i)
            if d in seen:
                continue
            face = []
            while d not in seen:
                seen.add(d)
                face.append(d)
                y, j = other[d]
                d = (y, (j - 1) % 4)
            faces.append(face)
    return faces, other


def octahedral_complex(pd: PDCode) -> list:
    """Raw gluing table with 4 tetrahedra per crossing.

    Tetrahedron ``4k + i`` sits in the corner of crossing ``k`` between
    positions ``i`` and ``i + 1``. The complex has the two finite vertices
    above and below the diagram besides one ideal vertex per component.
    """
    xs = pd.crossings
    n = 4 * len(xs)
    g: list = [[None] * 4 for _ in range(n)]

    def slot(i, e):
        return 2 if e == i else 3

    def put(t, f, u, perm):
        if g[t][f] is not None:
            raise AssertionError(f"face {t}.{f} glued twice")
        g[t][f] = (u, tuple(perm))

    # across the crossing: faces opposite the top or bottom point
    for k in range(len(xs)):
        for i in range(4):
            t = 4 * k + i
            for e in (i, (i + 1) % 4):
                j = (i - 1) % 4 if e == i else (i + 1) % 4
                perm = [None] * 4
                perm[ABOVE], perm[BELOW] = ABOVE, BELOW
                for a in (i, (i + 1) % 4):
                    b = next(b for b in (j, (j + 1) % 4) if b % 2 == a % 2)
                    perm[slot(i, a)] = slot(j, b)
                put(t, ABOVE if e % 2 else BELOW, 4 * k + j, perm)
    # across the regions
    faces, other = _faces(xs)
    for face in faces:
        for x, i in face:
            y, jj = other[(x, i)]
            t, u = 4 * x + i, 4 * y + (jj - 1) % 4
            s_t, o_t = slot(i, i), slot(i, (i + 1) % 4)
            s_u, o_u = slot((jj - 1) % 4, jj), slot((jj - 1) % 4, (jj - 1) % 4)
            perm = [None] * 4
            perm[ABOVE], perm[BELOW] = ABOVE, BELOW
            perm[s_t], perm[o_t] = s_u, o_u
            put(t, o_t, u, perm)
            put(u, o_u, t, perm_inverse(perm))
    return g


def _ideal_table(g, target: int, rng: random.Random, attempts: int, resize: bool):
    h = None
    work = g
    for _ in range(attempts):
        h = moves.remove_finite_vertices(work)
        if h is not None:
            break
        work = moves.random_two_three(work, rng)
        if work is None:
            return None
    if h is None or not resize:
        return h
    guard = 0
    while len(h) > target and guard < attempts:
        guard += 1
        nxt = moves.first_three_two(h)
        if nxt is None:
            nxt = moves.random_two_three(h, rng)
            if nxt is None:
                return None
            # a 2-3 move can expose a removable degree-3 edge elsewhere
            shrunk = moves.first_three_two(nxt)
            nxt = shrunk if shrunk is not None and len(shrunk) < len(h) else nxt
        h = nxt
    if len(h) < target:
        h = _pad_geometric(h, target) or h
    while len(h) < target:
        nxt = moves.first_two_three(h)
        if nxt is None:
            return None
        h = nxt
    return h if len(h) == target else None


def _shape_at(z: complex, a: int, b: int) -> complex:
    return (z, 1 / (1 - z), 1 - 1 / z)[edge_slot(a, b)]


def _pad_geometric(h, target: int, margin: float = 1e-6):
    """Grow by 2-3 moves that keep every tetrahedron positively oriented.

    The hyperbolic structure of the smaller triangulation is solved for
    once; across a 2-3 move the new tetrahedron over rim edge ``xy`` has
    shape equal to the product of the two old shapes at ``xy``.
    Returns ``None`` if no geometric structure is found or the moves run out.
    """
    from .solver import SolverError, solve
    from .triangulation import gluing_system

    try:
        tri = from_gluings("pad", h)
        tri = tri.with_peripheral(cusp_basis(tri))
        sol = solve(gluing_system(tri))
    except (SolverError, TriangulationError, ValueError):
        return None
    z = list(sol.shapes)
    if min(w.imag for w in z) <= margin:
        return None
    while len(h) < target:
        for t0 in range(len(h)):
            for f0 in range(4):
                t1, p = h[t0][f0]
                if t1 == t0:
                    continue
                rim = [v for v in range(4) if v != f0]
                new_z = []
                for k in range(3):
                    x, y = rim[(k + 1) % 3], rim[(k + 2) % 3]
                    new_z.append(_shape_at(z[t0], x, y) * _shape_at(z[t1], p[x], p[y]))
                if min(w.imag for w in new_z) <= margin:
                    continue
                nxt = moves.two_three(h, t0, f0)
                if nxt is None:
                    continue
                z = [w for t, w in enumerate(z) if t not in (t0, t1)] + new_z
                h = nxt
                break
            else:
                continue
            break
        else:
            return None
    return h


def octahedral_triangulation(pd: PDCode, config: DiagramConfig = DiagramConfig(), name: str = "") -> IdealTriangulation:
    """Ideal triangulation of the link complement with peripheral rows attached."""
    raw = octahedral_complex(pd)
    table = _ideal_table(raw, 4 * len(pd), random.Random(config.seed), config.max_attempts, config.resize)
    if table is None:
        raise TriangulationError("could not reduce the octahedral complex to an ideal triangulation")
    tri = from_gluings(name or f"pd{len(pd)}", table)
    tri = tri.with_peripheral(cusp_basis(tri))
    report = validate(tri)
    if not report.ok or report.cusps != pd.components:
        raise TriangulationError("diagram construction produced an invalid triangulation: " + report.summary())
    return tri


# ---------------------------------------------------------------------------
# peripheral curves


def _ccw(v: int, a: int, b: int, c: int) -> bool:
    """Whether ``(a, b, c)`` runs counterclockwise on the link of vertex ``v``."""
    return perm_parity((v, a, b, c)) == 0


class _CuspTorus:
    """Triangulated link of one ideal vertex class.

    Triangles are the corners ``(t, v)``; side ``f`` of triangle ``(t, v)``
    lies in face ``f`` of ``t`` and is opposite the link vertex on edge
    ``(v, f)``.
    """

    def __init__(self, tri: IdealTriangulation, corners: list[tuple[int, int]]):
        self.tri = tri
        self.corners = corners
        self.members = set(corners)

    def across(self, t: int, v: int, f: int) -> tuple[int, int, int, tuple]:
        u, p = self.tri.gluings[t][f]
        return u, p[v], p[f], p

    def canon(self, t: int, v: int, f: int, w: int) -> tuple[tuple[int, int, int], int]:
        u, pv, pf, p = self.across(t, v, f)
        if (t, v, f) <= (u, pv, pf):
            return (t, v, f), w
        return (u, pv, pf), p[w]

    def sides(self, t: int, v: int):
        return [f for f in range(4) if f != v]

    def candidate_cycles(self) -> list[list[tuple[int, int, int]]]:
        """Simple dual cycles from breadth-first trees rooted at every triangle.

        A cycle is a list of steps ``(t, v, f)``: leave triangle ``(t, v)``
        through side ``f``.
        """
        found = {}
        for root in self.corners:
            parent = {root: None}
            depth = {root: 0}
            order = [root]
            tree_sides = set()
            for tv in order:
                t, v = tv
                for f in self.sides(t, v):
                    u, pv, pf, _ = self.across(t, v, f)
                    if (u, pv) not in parent:
                        parent[(u, pv)] = (t, v, f)
                        depth[(u, pv)] = depth[tv] + 1
                        order.append((u, pv))
                        tree_sides.add(self.canon(t, v, f, 0)[0])
            for tv in order:
                t, v = tv
                for f in self.sides(t, v):
                    key = self.canon(t, v, f, 0)[0]
                    if key in tree_sides or key != (t, v, f):
                        continue
                    u, pv, _, _ = self.across(t, v, f)
                    cyc = self._close(parent, (t, v), (t, v, f), (u, pv))
                    if cyc:
                        sig = _cycle_signature(cyc)
                        if sig not in found:
                            found[sig] = cyc
        cycles = list(found.values())
        cycles.sort(key=lambda c: (len(c), _cycle_signature(c)))
        return cycles

    def _close(self, parent, a, step, b):
        def path(x):
            out = []
            while parent[x] is not None:
                out.append(parent[x])
                t, v, f = parent[x]
                x = (t, v)
            return out[::-1]

        pa, pb = path(a), path(b)
        k = 0
        while k < min(len(pa), len(pb)) and pa[k] == pb[k]:
            k += 1
        pa, pb = pa[k:], pb[k:]
        back = []
        for t, v, f in reversed(pb):
            # the tree step walked backwards, leaving the child triangle
            u, uv, uf, _ = self.across(t, v, f)
            back.append((u, uv, uf))
        return pa + [step] + back

    def turns(self, cycle):
        """Yield ``(t, v, f_in, f_out)`` for each triangle the cycle passes."""
        m = len(cycle)
        for k in range(m):
            t, v, f_out = cycle[k]
            pt, pv, pf = cycle[k - 1]
            u, uv, uf, _ = self.across(pt, pv, pf)
            assert (u, uv) == (t, v), "cycle is not closed"
            yield t, v, uf, f_out

    def row(self, cycle) -> list[int]:
        n = self.tri.n
        row = [0] * (3 * n)
        for t, v, f_in, f_out in self.turns(cycle):
            if f_in == f_out:
                raise ValueError("dual cycle backtracks")
            c = next(w for w in range(4) if w not in (v, f_in, f_out))
            sign = 1 if not _ccw(v, f_in, f_out, c) else -1
            row[3 * t + edge_slot(v, c)] += sign
        return row

    def push_right(self, cycle) -> list[tuple[tuple[int, int, int], int]]:
        """A primal loop homotopic to ``cycle``, pushed off it to the right.

        Returned as oriented sides ``(canonical side, start link vertex)``.
        """
        out = []
        for t, v, f_in, f_out in self.turns(cycle):
            c = next(w for w in range(4) if w not in (v, f_in, f_out))
            if not _ccw(v, f_in, f_out, c):
                out.append(self.canon(t, v, c, f_out))
        return out

    def intersection(self, dual, primal) -> int:
        """Algebraic intersection of a dual cycle with a primal loop."""
        total = 0
        for t, v, f in dual:
            key, _ = self.canon(t, v, f, 0)
            for pkey, start in primal:
                if pkey != key:
                    continue
                # express the start vertex in this triangle's labels
                if key == (t, v, f):
                    w1 = start
                else:
                    _, _, _, p = self.across(t, v, f)
                    w1 = perm_inverse(p)[start]
                w2 = next(w for w in range(4) if w not in (v, f, w1))
                total += 1 if _ccw(v, w1, w2, f) else -1
        return total


def _cycle_signature(cycle):
    # rotation/orientation-independent key on the multiset of sides crossed
    return tuple(sorted(cycle))


def _combine(x: int, a: list[int], y: int, b: list[int]) -> list[int]:
    return [x * u + y * v for u, v in zip(a, b)]


def cusp_basis(tri: IdealTriangulation) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Meridian and longitude rows for every cusp.

    The longitude is the primitive peripheral class that vanishes in rational
    homology of the manifold, as for a link in the 3-sphere with linking
    numbers zero; the meridian is the shortest dual cycle meeting it once.
    A cusp whose rational kernel is not of rank one keeps the two shortest
    cycles meeting once. Orientations are fixed by ``meridian . longitude = +1``.
    """
    from .homology import dual_presentation, rational_kernel_slope

    chis = cusp_euler_characteristics(tri)
    pres = dual_presentation(tri)
    out = []
    for k, corners in enumerate(vertex_classes(tri)):
        if chis[k] != 0:
            raise TriangulationError(f"cusp {k} link is not a torus (Euler characteristic {chis[k]})")
        torus = _CuspTorus(tri, corners)
        cycles = torus.candidate_cycles()
        pushed = [torus.push_right(c) for c in cycles]
        pair = None
        for i, ci in enumerate(cycles):
            for j in range(len(cycles)):
                if j != i and abs(torus.intersection(ci, pushed[j])) == 1:
                    pair = (i, j)
                    break
            if pair:
                break
        if pair is None:
            raise TriangulationError(f"no peripheral basis found on cusp {k}")
        i, j = pair
        a, b = cycles[i], cycles[j]
        ra, rb = torus.row(a), torus.row(b)
        if torus.intersection(a, pushed[j]) < 0:
            rb = [-x for x in rb]
            sb = -1
        else:
            sb = 1
        # a . (sb b) = +1 from here on
        ha = pres.crossing_vector([(t, f) for t, _, f in a])
        hb = [sb * x for x in pres.crossing_vector([(t, f) for t, _, f in b])]
        slope = rational_kernel_slope(pres.relations, ha, hb)
        if slope is None:
            out.append((tuple(ra), tuple(rb)))
            continue
        x, y = slope
        lrow = _combine(x, ra, y, rb)
        best = None
        for c, pc in zip(cycles, pushed):
            # c . (x a + y b), by bilinearity
            dot = x * torus.intersection(c, pushed[i]) + y * sb * torus.intersection(c, pushed[j])
            if abs(dot) == 1:
                best = (c, dot)
                break
        if best is None:
            raise TriangulationError(f"no cycle meets the longitude of cusp {k} once")
        c, dot = best
        mrow = torus.row(c)
        if dot < 0:
            lrow = [-v for v in lrow]
        out.append((tuple(mrow), tuple(lrow)))
    return out
