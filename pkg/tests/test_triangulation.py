import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.filling import Slope
from artifact.homology import triangulation_homology
from artifact.triangulation import (
    ALL_PERMS,
    FIXTURES,
    EdgeClass,
    TriangulationError,
    dump_triangulation,
    edge_classes,
    edge_rows,
    edge_slot,
    from_gluings,
    gluing_system,
    jacobian_rank,
    load_fixture,
    parse_triangulation,
    perm_inverse,
    rational_rank,
    validate,
)

EXPECTED = {"figure_eight": (2, 1), "whitehead": (4, 2), "borromean": (8, 3)}


def test_slot_convention():
    assert edge_slot(0, 1) == edge_slot(2, 3) == 0
    assert edge_slot(0, 2) == edge_slot(1, 3) == 1
    assert edge_slot(0, 3) == edge_slot(1, 2) == 2
    assert edge_slot(3, 0) == 2


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_validates(name):
    tri = load_fixture(name)
    n, c = EXPECTED[name]
    rep = validate(tri)
    assert rep.ok, rep.problems
    assert rep.n == n
    assert rep.edge_classes == n
    assert rep.cusps == c
    assert rep.euler == (0,) * c


@pytest.mark.parametrize("name", FIXTURES)
def test_edge_incidences(name):
    tri = load_fixture(name)
    classes = edge_classes(tri)
    per_tet = [0] * tri.n
    for ec in classes:
        assert isinstance(ec, EdgeClass)
        for t, _ in ec.incidences:
            per_tet[t] += 1
    assert per_tet == [6] * tri.n


@pytest.mark.parametrize("name", FIXTURES)
def test_edge_row_sums(name):
    tri = load_fixture(name)
    rows = edge_rows(tri)
    for j in range(tri.n):
        assert tuple(sum(r[3 * j + s] for r in rows) for s in range(3)) == (2, 2, 2)


@pytest.mark.parametrize("name", FIXTURES)
def test_edge_rank(name):
    tri = load_fixture(name)
    n, c = EXPECTED[name]
    sys_ = gluing_system(tri)
    edge = [r for r, k in zip(sys_.reduced_rows(), sys_.kinds) if k == "edge"]
    assert rational_rank(edge) == n - c
    assert jacobian_rank(edge_rows(tri), n) == n - c
    assert jacobian_rank(sys_.rows, n) == n


def test_figure_eight_system_shape():
    sys_ = gluing_system(load_fixture("figure_eight"))
    assert sys_.kinds == ("edge", "edge", "meridian", "longitude")
    assert sys_.targets == (2, 2, 0, 0)
    assert all(len(r) == 6 for r in sys_.rows)


def test_unfilled_slopes_match_complete():
    tri = load_fixture("whitehead")
    a = gluing_system(tri)
    b = gluing_system(tri, [Slope(), Slope()])
    assert a == b
    assert a.digest() == b.digest()


def test_filling_row():
    tri = load_fixture("whitehead")
    sys_ = gluing_system(tri, [Slope(2, -3), Slope()])
    mer, lon = tri.peripheral[0]
    i = sys_.kinds.index("filling")
    assert sys_.rows[i] == tuple(2 * a - 3 * b for a, b in zip(mer, lon))
    assert sys_.targets[i] == 2
    assert sys_.kinds.count("meridian") == 1


def test_slope_count_mismatch():
    with pytest.raises(TriangulationError):
        gluing_system(load_fixture("whitehead"), [Slope(1, 0)])


@pytest.mark.parametrize("name", FIXTURES)
def test_round_trip(name):
    tri = load_fixture(name)
    again = parse_triangulation(dump_triangulation(tri))
    assert again == tri
    assert dump_triangulation(again) == dump_triangulation(tri)


def _doc(name="figure_eight"):
    return json.loads(dump_triangulation(load_fixture(name)))


def test_rejects_empty():
    doc = _doc()
    doc["tetrahedra"] = 0
    doc["gluings"] = []
    with pytest.raises(TriangulationError):
        parse_triangulation(json.dumps(doc))


def test_rejects_out_of_range():
    doc = _doc("whitehead")
    doc["gluings"][0][0]["to"] = 7
    with pytest.raises(TriangulationError):
        parse_triangulation(json.dumps(doc))


def test_rejects_unknown_field():
    doc = _doc()
    doc["extra"] = 1
    with pytest.raises(TriangulationError):
        parse_triangulation(json.dumps(doc))


def test_rejects_short_peripheral_row():
    doc = _doc()
    doc["cusps"][0]["meridian"] = doc["cusps"][0]["meridian"][:-1]
    with pytest.raises(TriangulationError):
        parse_triangulation(json.dumps(doc))


def test_rejects_malformed():
    with pytest.raises(TriangulationError):
        parse_triangulation("{not json")
    with pytest.raises(TriangulationError):
        parse_triangulation("[]")


def test_non_involutive_gluing():
    doc = _doc("whitehead")
    # face 0 of tetrahedron 0 now claims a face that is already taken
    tgt = doc["gluings"][0][1]
    doc["gluings"][0][0] = dict(tgt)
    try:
        tri = parse_triangulation(json.dumps(doc))
    except TriangulationError:
        return
    rep = validate(tri)
    assert not rep.ok
    assert any("involut" in p for p in rep.problems)


def test_even_permutation_rejected():
    tri = load_fixture("figure_eight")
    g = [list(r) for r in tri.gluings]
    # flip the orientation of one face pair consistently on both sides
    t, f = 0, 0
    u, p = g[t][f]
    q = tuple(p[i] for i in (1, 0, 2, 3)) if f not in (0, 1) else tuple(p[i] for i in (0, 1, 3, 2))
    if q[f] != p[f]:
        pytest.skip("swap moved the face")
    g[t][f] = (u, q)
    g[u][q[f]] = (t, perm_inverse(q))
    try:
        bad = from_gluings("bad", g, tri.peripheral)
    except TriangulationError:
        return
    assert not validate(bad).ok


def _relabel(tri, order, perms):
    """Isomorphic copy: tetrahedron t becomes order[t] with vertices renamed by perms[t]."""
    n = tri.n
    new = [[None] * 4 for _ in range(n)]
    for t in range(n):
        s = perms[t]
        for f in range(4):
            u, p = tri.gluings[t][f]
            su = perms[u]
            q = [0] * 4
            for i in range(4):
                q[s[i]] = su[p[i]]
            new[order[t]][s[f]] = (order[u], tuple(q))
    return from_gluings(tri.name, new)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(FIXTURES), st.randoms(use_true_random=False))
def test_relabelling_invariants(name, rnd):
    tri = load_fixture(name)
    order = list(range(tri.n))
    rnd.shuffle(order)
    even = [p for p in ALL_PERMS if sum(p[i] > p[j] for i in range(4) for j in range(i + 1, 4)) % 2 == 0]
    perms = [rnd.choice(even) for _ in range(tri.n)]
    other = _relabel(tri, order, perms)
    rep = validate(other.with_peripheral(_basis(other)))
    assert rep.ok
    assert rep.cusps == EXPECTED[name][1]
    assert str(triangulation_homology(other)) == str(triangulation_homology(tri))
    assert sorted(ec.degree for ec in edge_classes(other)) == sorted(ec.degree for ec in edge_classes(tri))


def _basis(tri):
    from artifact.diagram import cusp_basis

    return cusp_basis(tri)
