"""Search for the shipped fixture triangulations and write them out.

figure_eight   2 tetrahedra, 1 cusp, H1 = Z, both shapes exp(i pi/3)
whitehead      one regular ideal octahedron cut into 4 tetrahedra around
               its N-S diagonal, 2 cusps, H1 = Z^2, all shapes i
borromean      two regular ideal octahedra, each face of one glued to the
               same face of the other, 3 cusps, H1 = Z^3, all shapes i

Candidates are enumerated in a fixed order and filtered by validation,
homology and an exact-shape residual; the first survivor is kept, except for
the Whitehead search where several manifolds share the filters and the
survivor is chosen by the cusp vertex split (see ``pick_whitehead``).

Usage: python scripts/build_fixtures.py [--out DIR] [--list]
"""
from __future__ import annotations

import argparse
import cmath
import itertools
import math
import pathlib
import sys

from artifact.diagram import cusp_basis
from artifact.homology import triangulation_homology
from artifact.solver import residual
from artifact.triangulation import (
    ODD_PERMS,
    IdealTriangulation,
    TriangulationError,
    dump_triangulation,
    from_gluings,
    gluing_system,
    validate,
    vertex_classes,
)

REGULAR = cmath.exp(1j * math.pi / 3)


def matchings(items):
    if not items:
        yield []
        return
    first = items[0]
    for k in range(1, len(items)):
        rest = items[1:k] + items[k + 1 :]
        for m in matchings(rest):
            yield [(first, items[k])] + m


def face_maps(f, g):
    """Odd permutations sending face ``f`` onto face ``g``."""
    return [p for p in ODD_PERMS if p[f] == g]


def assemble(n, fixed, pairs_with_perms):
    table = [[None] * 4 for _ in range(n)]
    for (t, f), (u, g), p in fixed + pairs_with_perms:
        inv = [0] * 4
        for i, x in enumerate(p):
            inv[x] = i
        if table[t][f] is not None or table[u][g] is not None:
            return None
        table[t][f] = (u, tuple(p))
        table[u][g] = (t, tuple(inv))
    return table


def finish(name, table, cusps, h1, shapes):
    try:
        tri = from_gluings(name, table)
        if len(vertex_classes(tri)) != cusps:
            return None
        tri = tri.with_peripheral(cusp_basis(tri))
    except TriangulationError:
        return None
    if not validate(tri).ok:
        return None
    if str(triangulation_homology(tri)) != h1:
        return None
    if residual(gluing_system(tri), shapes) > 1e-12:
        return None
    return tri


def search_figure_eight():
    faces = [(t, f) for t in range(2) for f in range(4)]
    for m in matchings(faces):
        if any(a == b for a, b in m):
            continue
        for perms in itertools.product(*(face_maps(a[1], b[1]) for a, b in m)):
            table = assemble(2, [], [(a, b, p) for (a, b), p in zip(m, perms)])
            if table is None:
                continue
            tri = finish("figure_eight", table, 1, "Z", [REGULAR] * 2)
            if tri is not None:
                yield tri


# octahedron tetrahedra T_k = (N, S, E_k, E_k+1) with labels (0, 1, 2, 3)
def octahedron_interior(base):
    out = []
    for k in range(4):
        # face (N, S, E_k+1) of T_k is face (N, S, E_k+1) of T_k+1
        out.append(((base + k, 2), (base + (k + 1) % 4, 3), (0, 1, 3, 2)))
    return out


def octahedron_faces(base):
    return [(base + k, f) for k in range(4) for f in (0, 1)]


def search_whitehead():
    faces = octahedron_faces(0)
    fixed = octahedron_interior(0)
    for m in matchings(faces):
        for perms in itertools.product(*(face_maps(a[1], b[1]) for a, b in m)):
            table = assemble(4, fixed, [(a, b, p) for (a, b), p in zip(m, perms)])
            if table is None:
                continue
            tri = finish("whitehead", table, 2, "Z ⊕ Z", [1j] * 4)
            if tri is not None:
                yield tri


def cusp_split(tri: IdealTriangulation) -> tuple[int, ...]:
    return tuple(sorted(len(c) for c in vertex_classes(tri)))


def pick_whitehead(cands):
    # the link complement's two cusps are exchanged by a symmetry, so each
    # cusp torus has the same number of triangles
    for tri in cands:
        split = cusp_split(tri)
        if split[0] == split[-1]:
            return tri
    return None


def _perm_from_vertices(src, dst, vmap):
    return tuple(dst.index(vmap.get(v, v)) for v in src)


def search_borromean():
    # second octahedron labelled as a mirror image, T'_k = (N, S, E_k+1, E_k),
    # so face identifications by rotation are orientation reversing
    verts = [("N", "S", f"E{k}", f"E{(k + 1) % 4}") for k in range(4)]
    verts += [("N", "S", f"E{(k + 1) % 4}", f"E{k}") for k in range(4)]
    fixed = octahedron_interior(0)
    for k in range(4):
        t, u = 4 + k, 4 + (k + 1) % 4
        fixed.append(((t, 3), (u, 2), _perm_from_vertices(verts[t], verts[u], {verts[t][3]: verts[u][2]})))
    faces = octahedron_faces(0)
    for rots in itertools.product(range(3), repeat=len(faces)):
        pairs = []
        for (t, f), r in zip(faces, rots):
            tri = [v for i, v in enumerate(verts[t]) if i != f]
            vmap = {tri[i]: tri[(i + r) % 3] for i in range(3)}
            pairs.append(((t, f), (t + 4, f), _perm_from_vertices(verts[t], verts[t + 4], vmap)))
        table = assemble(8, fixed, pairs)
        if table is None:
            continue
        tri = finish("borromean", table, 3, "Z ⊕ Z ⊕ Z", [1j] * 8)
        if tri is not None:
            yield tri


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    default = pathlib.Path(__file__).resolve().parents[1] / "src" / "artifact" / "fixtures"
    ap.add_argument("--out", type=pathlib.Path, default=default)
    ap.add_argument("--list", action="store_true", help="print candidate counts only")
    args = ap.parse_args(argv)
    if args.list:
        print("figure_eight", sum(1 for _ in search_figure_eight()))
        wh = list(search_whitehead())
        print("whitehead", len(wh), sorted({cusp_split(t) for t in wh}))
        print("borromean", sum(1 for _ in search_borromean()))
        return 0
    found = {
        "figure_eight": next(search_figure_eight(), None),
        "whitehead": pick_whitehead(search_whitehead()),
        "borromean": next(search_borromean(), None),
    }
    for name, tri in found.items():
        if tri is None:
            print(f"{name}: no candidate", file=sys.stderr)
            return 1
        path = args.out / f"{name}.tri"
        path.write_text(dump_triangulation(tri))
        print(f"{name}: {tri.n} tetrahedra -> {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
