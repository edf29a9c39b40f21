"""Local retriangulation moves on raw gluing tables.

A gluing table is a list (one entry per tetrahedron) of 4 pairs
``(to, perm)``. These helpers work on mutable copies and return a fresh
table, or ``None`` when the requested move is not applicable.
"""
from __future__ import annotations

import random
from typing import Optional

from .triangulation import EDGES, perm_inverse, perm_parity

Table = list  # list[list[tuple[int, tuple[int, ...]]]]


def copy_table(g) -> Table:
    return [[(u, tuple(p)) for u, p in row] for row in g]


def is_consistent(g) -> bool:
    n = len(g)
    for t, row in enumerate(g):
        for f, rec in enumerate(row):
            if rec is None:
                return False
            u, p = rec
            if not 0 <= u < n or sorted(p) != [0, 1, 2, 3]:
                return False
            back = g[u][p[f]]
            if back is None or back[0] != t or tuple(back[1]) != perm_inverse(p):
                return False
            if (u, p[f]) == (t, f):
                return False
    return True


def relabel(g: Table, t: int, sigma) -> None:
    """Rename vertex ``i`` of tetrahedron ``t`` to ``sigma[i]``, in place."""
    old = g[t]
    inv = perm_inverse(sigma)
    new = [None] * 4
    for f, (u, p) in enumerate(old):
        if u == t:
            q = tuple(sigma[p[inv[i]]] for i in range(4))
        else:
            q = tuple(p[inv[i]] for i in range(4))
            uf = p[f]
            r = g[u][uf][1]
            g[u][uf] = (t, tuple(sigma[r[i]] for i in range(4)))
        new[sigma[f]] = (u, q)
    g[t] = new


def _compact(g: Table, removed: set) -> Table:
    keep = [t for t in range(len(g)) if t not in removed]
    idx = {t: i for i, t in enumerate(keep)}
    return [[(idx[u], p) for u, p in g[t]] for t in keep]


def _orient(g: Table, new: list[int], gone: set) -> bool:
    """Relabel new tetrahedra so every gluing permutation is odd."""
    fixed = {t for t in range(len(g)) if t not in new and t not in gone}
    pending = list(new)
    if not fixed:
        fixed.add(pending.pop(0))
    swap = (0, 1, 3, 2)
    progress = True
    while pending and progress:
        progress = False
        for t in list(pending):
            for u, p in g[t]:
                if u in fixed:
                    if perm_parity(p) == 0:
                        relabel(g, t, swap)
                    fixed.add(t)
                    pending.remove(t)
                    progress = True
                    break
    live = [row for t, row in enumerate(g) if t not in gone]
    return not pending and all(perm_parity(p) == 1 for row in live for _, p in row)


def _retriangulate(g, removed: list[int], points: dict, internal: set, new_tets: list[tuple]) -> Optional[Table]:
    """Replace ``removed`` tetrahedra by ``new_tets``.

    ``points`` maps each ``(t, v)`` of a removed tetrahedron to a point id of
    the ball being retriangulated; ``internal`` lists the ``(t, f)`` faces
    interior to that ball. Each new tetrahedron is a 4-tuple of point ids.
    """
    g = copy_table(g)
    base = len(g)
    for _ in new_tets:
        g.append([None] * 4)
    gone = set(removed)

    def locate(t, f):
        pts = {points[(t, v)] for v in range(4) if v != f}
        hits = [k for k, T in enumerate(new_tets) if pts <= set(T)]
        if len(hits) != 1:
            return None
        k = hits[0]
        T = new_tets[k]
        face = next(i for i in range(4) if T[i] not in pts)
        # old vertex of t behind each new label
        back = {}
        for v in range(4):
            if v != f:
                back[T.index(points[(t, v)])] = v
        return base + k, face, back

    for t in removed:
        for f in range(4):
            if (t, f) in internal:
                continue
            loc = locate(t, f)
            if loc is None:
                return None
            T, F, back = loc
            u, p = g[t][f]
            if u in gone:
                loc2 = locate(u, p[f])
                if loc2 is None:
                    return None
                T2, F2, back2 = loc2
                fwd2 = {v: i for i, v in back2.items()}
                perm = [0] * 4
                perm[F] = F2
                for i, v in back.items():
                    perm[i] = fwd2[p[v]]
                if (T, F) == (T2, F2):
                    return None
                g[T][F] = (T2, tuple(perm))
            else:
                perm = [0] * 4
                perm[F] = p[f]
                for i, v in back.items():
                    perm[i] = p[v]
                g[T][F] = (u, tuple(perm))
                g[u][p[f]] = (T, perm_inverse(perm))
    # faces shared between new tetrahedra
    for k, T in enumerate(new_tets):
        for F in range(4):
            if g[base + k][F] is not None:
                continue
            pts = set(T) - {T[F]}
            for k2, T2 in enumerate(new_tets):
                if k2 != k and pts <= set(T2):
                    F2 = next(i for i in range(4) if T2[i] not in pts)
                    perm = [0] * 4
                    perm[F] = F2
                    for i in range(4):
                        if i != F:
                            perm[i] = T2.index(T[i])
                    g[base + k][F] = (base + k2, tuple(perm))
                    break
            else:
                return None
    if not _orient(g, [base + k for k in range(len(new_tets))], gone):
        return None
    out = _compact(g, gone)
    return out if is_consistent(out) else None


def two_three(g, t0: int, f0: int) -> Optional[Table]:
    """Replace the two tetrahedra meeting at face ``f0`` of ``t0`` by three."""
    t1, p = g[t0][f0]
    if t1 == t0:
        return None
    rim = [v for v in range(4) if v != f0]
    points = {(t0, f0): "N", (t1, p[f0]): "S"}
    for v in rim:
        points[(t0, v)] = v
        points[(t1, p[v])] = v
    new = []
    for k in range(3):
        x, y = rim[(k + 1) % 3], rim[(k + 2) % 3]
        new.append(("N", "S", x, y))
    return _retriangulate(g, [t0, t1], points, {(t0, f0), (t1, p[f0])}, new)


def three_two(g, t0: int, edge: tuple[int, int]) -> Optional[Table]:
    """Replace the three tetrahedra around a degree-3 edge by two."""
    a, b = edge
    c, d = (w for w in range(4) if w not in edge)
    state = (t0, a, b, c, d)
    walk = []
    for _ in range(4):
        walk.append(state)
        s, x, y, pc, pd = state
        u, perm = g[s][pc]
        state = (u, perm[x], perm[y], perm[pd], perm[pc])
        if state == walk[0]:
            break
    else:
        return None
    if len(walk) != 3 or len({w[0] for w in walk}) != 3:
        return None
    points = {}
    internal = set()
    for k, (s, x, y, pc, pd) in enumerate(walk):
        points[(s, x)] = "N"
        points[(s, y)] = "S"
        points[(s, pc)] = k
        points[(s, pd)] = (k + 1) % 3
        internal.add((s, pc))
        internal.add((s, pd))
    return _retriangulate(g, [w[0] for w in walk], points, internal, [("N", 0, 1, 2), ("S", 0, 1, 2)])


# ---------------------------------------------------------------------------
# class bookkeeping on raw tables


def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def raw_classes(g):
    """Vertex-class root lookup and edge classes (lists of ``(t, (a, b))``)."""
    n = len(g)
    vpar = {(t, v): (t, v) for t in range(n) for v in range(4)}
    epar = {(t, e): (t, e) for t in range(n) for e in EDGES}
    for t in range(n):
        for f, (u, p) in enumerate(g[t]):
            for v in range(4):
                if v != f:
                    vpar[_find(vpar, (t, v))] = _find(vpar, (u, p[v]))
            for e in EDGES:
                if f not in e:
                    im = tuple(sorted((p[e[0]], p[e[1]])))
                    epar[_find(epar, (t, e))] = _find(epar, (u, im))
    edges: dict = {}
    for k in sorted(epar):
        edges.setdefault(_find(epar, k), []).append(k)

    def vertex(tv):
        return _find(vpar, tv)

    return vertex, list(edges.values())


def link_euler(g) -> dict:
    """Euler characteristic of each vertex link, keyed by class root."""
    vertex, edges = raw_classes(g)
    corners: dict = {}
    for t in range(len(g)):
        for v in range(4):
            r = vertex((t, v))
            corners[r] = corners.get(r, 0) + 1
    ends = {r: 0 for r in corners}
    for cls in edges:
        t, (x, y) = cls[0]
        ends[vertex((t, x))] += 1
        ends[vertex((t, y))] += 1
    return {r: ends[r] - corners[r] * 3 // 2 + corners[r] for r in corners}


def collapse_edge(g, star, va) -> Optional[Table]:
    """Collapse an edge joining vertex class ``va`` to a different class.

    Every tetrahedron around the edge is flattened: its two faces meeting the
    far endpoint and the ``va`` endpoint are glued directly to each other.
    """
    vertex, _ = raw_classes(g)
    g = copy_table(g)
    tets = [t for t, _ in star]
    if len(set(tets)) != len(tets):
        return None
    removed = set()
    for t, (x, y) in star:
        a, b = (x, y) if vertex((t, x)) == va else (y, x)
        na, pa = g[t][a]
        nb, pb = g[t][b]
        removed.add(t)
        fa, fb = pa[a], pb[b]
        if na == t or nb == t:
            if (na, fa) == (t, b):
                continue
            return None
        ia = perm_inverse(pa)
        perm = [None] * 4
        for w in range(4):
            if w == fa:
                continue
            tv = ia[w]
            perm[w] = pb[a if tv == b else tv]
        perm[fa] = fb
        if sorted(perm) != [0, 1, 2, 3]:
            return None
        g[na][fa] = (nb, tuple(perm))
        g[nb][fb] = (na, perm_inverse(perm))
    for t in range(len(g)):
        if t not in removed and any(u in removed for u, _ in g[t]):
            return None
    out = _compact(g, removed)
    if not out or not is_consistent(out):
        return None
    return out


def remove_finite_vertices(g) -> Optional[Table]:
    """Collapse edges until every vertex link is a torus.

    Edges from a sphere-link vertex to a torus-link vertex go first, largest
    star first; each accepted collapse must remove exactly one sphere vertex.
    """
    while True:
        chi = link_euler(g)
        if any(c not in (0, 2) for c in chi.values()):
            return None
        finite = {r for r, c in chi.items() if c == 2}
        if not finite:
            return g
        vertex, edges = raw_classes(g)
        cands = []
        for order, cls in enumerate(edges):
            t, (x, y) = cls[0]
            a, b = vertex((t, x)), vertex((t, y))
            if a == b or (a not in finite and b not in finite):
                continue
            both = a in finite and b in finite
            cands.append((both, -len(cls), order, a if a in finite else b, cls))
        cands.sort(key=lambda c: c[:3])
        tori = sum(1 for c in chi.values() if c == 0)
        for *_, va, star in cands:
            h = collapse_edge(g, star, va)
            if h is None:
                continue
            c2 = link_euler(h)
            if (
                all(c in (0, 2) for c in c2.values())
                and len(c2) == len(chi) - 1
                and sum(1 for c in c2.values() if c == 0) == tori
            ):
                g = h
                break
        else:
            return None


def random_two_three(g, rng: random.Random, tries: int = 64) -> Optional[Table]:
    for _ in range(tries):
        h = two_three(g, rng.randrange(len(g)), rng.randrange(4))
        if h is not None:
            return h
    return None


def first_two_three(g) -> Optional[Table]:
    for t in range(len(g)):
        for f in range(4):
            h = two_three(g, t, f)
            if h is not None:
                return h
    return None


def first_three_two(g) -> Optional[Table]:
    _, edges = raw_classes(g)
    for cls in edges:
        if len(cls) == 3:
            t, e = cls[0]
            h = three_two(g, t, e)
            if h is not None:
                return h
    return None
