import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from artifact.filling import (
    CERTIFIED,
    FAILED,
    Slope,
    SlopeError,
    SweepRow,
    fill,
    parse_family,
    parse_slopes,
    sweep,
)
from artifact.solver import solve
from artifact.triangulation import gluing_system, load_fixture
from artifact.volume import volume

from conftest import BORROMEAN_VOLUME, FIG8_VOLUME, WHITEHEAD_VOLUME

nonzero_pairs = st.tuples(st.integers(-50, 50), st.integers(-50, 50)).filter(
    lambda pq: math.gcd(*pq) == 1
)


@given(nonzero_pairs)
def test_normalization(pq):
    p, q = pq
    s = Slope(p, q)
    assert s == Slope(-p, -q)
    assert s.p > 0 or (s.p == 0 and s.q == 1)
    assert Slope(s.p, s.q) == s
    assert Slope.parse(str(s)) == s


def test_non_primitive():
    with pytest.raises(SlopeError):
        Slope(2, 4)
    with pytest.raises(SlopeError):
        Slope(0, 0)
    with pytest.raises(SlopeError):
        Slope(1, None)


def test_parsing():
    assert parse_slopes("1/2,inf") == [Slope(1, 2), Slope()]
    assert Slope.parse("(-1, 3)") == Slope(1, -3)
    assert [s.q for s in parse_family("1/3..1/20")] == list(range(3, 21))
    assert [s.p for s in parse_family("1/5..4/5")] == [1, 2, 3, 4]
    assert parse_family("2/3..2/7") == [Slope(2, 3), Slope(2, 5), Slope(2, 7)]
    with pytest.raises(SlopeError):
        Slope.parse("one half")
    with pytest.raises(SlopeError):
        parse_family("1/2..3/4")


def test_all_unfilled_is_complete():
    tri = load_fixture("whitehead")
    res = fill(tri, [Slope(), Slope()])
    sys_ = gluing_system(tri)
    direct = solve(sys_, res.shapes)
    assert res.certificate.system_hash == sys_.digest()
    assert abs(res.volume.value.mid - WHITEHEAD_VOLUME) < 1e-11
    assert abs(volume(direct).value - res.volume.value.mid) < 1e-11


def test_whitehead_filling_gives_figure_eight():
    tri = load_fixture("whitehead")
    hits = []
    for p in range(0, 3):
        for q in range(-2, 3):
            if math.gcd(p, q) != 1 or (p == 0 and q != 1):
                continue
            try:
                res = fill(tri, [Slope(p, q), Slope()])
            except Exception:
                continue
            if res.certificate.geometric and abs(res.volume.value.mid - FIG8_VOLUME) < 1e-8:
                hits.append((p, q))
    assert hits


def test_large_slope_below_cusped():
    tri = load_fixture("borromean")
    res = fill(tri, [Slope(1, 30), Slope(), Slope()])
    assert res.certificate.geometric
    assert res.volume.value.hi < BORROMEAN_VOLUME


def test_figure_eight_fillings_below_cusped():
    tri = load_fixture("figure_eight")
    for s in (Slope(5, 1), Slope(1, 3), Slope(7, 2)):
        try:
            res = fill(tri, [s])
        except Exception:
            continue
        if res.certificate.geometric:
            assert res.volume.value.hi < FIG8_VOLUME


def test_sweep_infinity_row():
    tri = load_fixture("whitehead")
    res = sweep(tri, 1, [Slope()])
    assert len(res.rows) == 1
    assert res.rows[0].status == CERTIFIED
    assert abs(res.rows[0].volume - res.cusped_volume) < 1e-12


def test_sweep_isolates_failures():
    tri = load_fixture("whitehead")
    family = [Slope(1, 2), Slope(1, 0), Slope(1, 1), Slope(2, 1)]
    res = sweep(tri, 0, family)
    assert [r.slope for r in res.rows] == family
    by = {r.slope: r for r in res.rows}
    assert by[Slope(1, 0)].status == FAILED
    assert by[Slope(1, 0)].volume is None
    assert by[Slope(1, 2)].status == CERTIFIED
    assert by[Slope(1, 1)].status == CERTIFIED
    assert abs(by[Slope(1, 1)].volume - FIG8_VOLUME) < 1e-9


def test_sweep_csv():
    res = sweep(load_fixture("borromean"), 2, parse_family("1/5..1/7"))
    lines = res.to_csv().splitlines()
    assert lines[0] == "slope_p,slope_q,status,volume,enclosure_width,delta_to_cusped"
    assert len(lines) == 4
    p, q, status, vol, width, delta = lines[1].split(",")
    assert (p, q, status) == ("1", "5", CERTIFIED)
    assert float(delta) > 0 and float(width) < 1e-8
    hexed = res.to_csv(hex_floats=True).splitlines()[1].split(",")
    assert float.fromhex(hexed[3]) == res.rows[0].volume


def test_sweep_parallel_matches():
    tri = load_fixture("borromean")
    family = parse_family("1/4..1/6")
    from artifact.filling import FillConfig

    seq = sweep(tri, 0, family)
    par = sweep(tri, 0, family, config=FillConfig(parallel=True, workers=2))
    for a, b in zip(seq.rows, par.rows):
        assert a.slope == b.slope and a.status == b.status
        assert abs(a.volume - b.volume) < 1e-10


def test_row_invariant():
    with pytest.raises(ValueError):
        SweepRow(Slope(1, 2), FAILED, 1.0)
    with pytest.raises(ValueError):
        SweepRow(Slope(1, 2), CERTIFIED, None)


def test_bad_cusp():
    with pytest.raises(SlopeError):
        sweep(load_fixture("whitehead"), 5, [Slope(1, 2)])
    with pytest.raises(SlopeError):
        sweep(load_fixture("whitehead"), 0, [])
