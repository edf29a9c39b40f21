import json
import math

import pytest

from artifact.certify import (
    ApproximationTooCoarse,
    Certificate,
    CertifyConfig,
    NotCertified,
    interval_residual,
    krawczyk_certify,
    square_subsystem,
)
from artifact.intervals import ComplexBox, IntervalError
from artifact.solver import residual
from artifact.triangulation import GluingSystem

from conftest import FIG8_SHAPE


def test_figure_eight_certificate(solved):
    _, sys_, sol = solved["figure_eight"]
    cert = krawczyk_certify(sys_, sol)
    assert cert.unique and cert.geometric
    assert cert.contains([FIG8_SHAPE, FIG8_SHAPE])
    assert all(b.width < 1e-10 for b in cert.boxes)
    assert cert.system_hash == sys_.digest()


@pytest.mark.parametrize("name,n", [("whitehead", 4), ("borromean", 8)])
def test_fixture_certificates(solved, name, n):
    _, sys_, sol = solved[name]
    cert = krawczyk_certify(sys_, sol)
    assert cert.unique and cert.geometric
    assert len(cert.boxes) == n
    assert cert.render().startswith("(True, [")
    assert all(b.im.lo > 0 for b in cert.boxes)


def test_full_system_contains_zero(solved):
    for _, sys_, sol in solved.values():
        cert = krawczyk_certify(sys_, sol)
        assert all(e.contains_zero() for e in interval_residual(sys_, list(cert.boxes)))


def test_inflated_boxes_still_contain_zero(solved):
    for _, sys_, sol in solved.values():
        cert = krawczyk_certify(sys_, sol)
        grown = [b.scaled_about_mid(1.1) for b in cert.boxes]
        assert all(e.contains_zero() for e in interval_residual(sys_, grown))


def test_perturbed_not_certified(solved):
    _, sys_, sol = solved["figure_eight"]
    far = [z + 0.5 for z in sol.shapes]
    with pytest.raises((NotCertified, ApproximationTooCoarse)):
        krawczyk_certify(sys_, far)
    # bypass the residual gate so the containment test itself must fail
    with pytest.raises(NotCertified):
        krawczyk_certify(sys_, far, CertifyConfig(max_residual=1e9))


def test_real_root_toy_system():
    # log z + log z' = 0, i.e. z = 1 - z
    toy = GluingSystem(((1, 1, 0),), (0,), ("edge",), (-1,))
    cert = krawczyk_certify(toy, [0.5 + 1e-13j])
    assert cert.unique
    assert not cert.geometric
    assert cert.contains([0.5])
    assert cert.volume_enclosure is None


def test_box_with_pole(solved):
    _, sys_, _ = solved["figure_eight"]
    with pytest.raises(IntervalError):
        interval_residual(sys_, [ComplexBox.around(1.0, 0.1), ComplexBox.point(FIG8_SHAPE)])


def test_point_boxes_match_float_residual(solved):
    _, sys_, sol = solved["borromean"]
    enc = interval_residual(sys_, [ComplexBox.point(z) for z in sol.shapes])
    worst = max(max(abs(e.re.mid), abs(e.im.mid)) for e in enc)
    assert abs(worst - residual(sys_, sol)) < 1e-12


def test_monotone_enclosures(solved):
    _, sys_, sol = solved["whitehead"]
    small = [ComplexBox.around(z, 1e-9) for z in sol.shapes]
    big = [b.widen(1e-6) for b in small]
    for s, b in zip(interval_residual(sys_, small), interval_residual(sys_, big)):
        assert b.contains(s)


def test_two_precisions_overlap(solved):
    _, sys_, sol = solved["borromean"]
    a = krawczyk_certify(sys_, sol)
    b = krawczyk_certify(sys_, sol, CertifyConfig(min_radius=1e-9))
    for x, y in zip(a.boxes, b.boxes):
        assert x.re.lo <= y.re.hi and y.re.lo <= x.re.hi
        assert x.im.lo <= y.im.hi and y.im.lo <= x.im.hi


def test_square_subsystem_prefers_peripheral(solved):
    _, sys_, _ = solved["borromean"]
    rows = square_subsystem(sys_)
    assert len(rows) == sys_.n
    assert all(sys_.kinds[i] != "longitude" for i in rows)
    assert sum(sys_.kinds[i] == "meridian" for i in rows) == 3


def test_serialization_round_trip(solved):
    _, sys_, sol = solved["whitehead"]
    cert = krawczyk_certify(sys_, sol)
    back = Certificate.from_dict(json.loads(cert.to_json()))
    assert back.boxes == cert.boxes
    assert back.volume_enclosure == cert.volume_enclosure
    assert back.system_hash == cert.system_hash
    assert (back.unique, back.geometric) == (True, True)
