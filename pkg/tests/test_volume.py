import cmath
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.intervals import ComplexBox, IntervalError
from artifact.triangulation import gluing_system, load_fixture
from artifact.volume import (
    VolumeError,
    bernoulli,
    bloch_wigner,
    bloch_wigner_interval,
    boxes_volume,
    volume,
    volume_enclosure,
)
from artifact.certify import krawczyk_certify, Certificate
from artifact.solver import solve

import oracles
from conftest import BORROMEAN_VOLUME, FIG8_VOLUME, WHITEHEAD_VOLUME

# frozen from the oracles module (quadrature and series), 16 digits
REGULAR_D = 1.0149416064096536
CATALAN = 0.9159655941772190

upper = st.builds(
    complex,
    st.floats(min_value=-20, max_value=20, allow_nan=False),
    st.floats(min_value=1e-3, max_value=20, allow_nan=False),
)


def test_frozen_oracles_reproduce():
    assert abs(3 * oracles.lobachevsky(math.pi / 3) - REGULAR_D) < 1e-13
    assert abs(oracles.catalan_series(20000) - CATALAN) < 1e-13


def test_regular():
    assert abs(bloch_wigner(cmath.exp(1j * math.pi / 3)) - REGULAR_D) < 1e-13


def test_catalan():
    assert abs(bloch_wigner(1j) - CATALAN) < 1e-13


def test_real_axis_is_zero():
    assert bloch_wigner(0.37) == 0.0
    assert bloch_wigner(-5.0) == 0.0
    assert bloch_wigner(complex(12.0, 0.0)) == 0.0


def test_poles():
    for z in (0, 1, 0j, 1 + 0j):
        with pytest.raises(ValueError):
            bloch_wigner(z)


def test_bernoulli():
    from fractions import Fraction

    assert bernoulli(0) == 1
    assert bernoulli(1) == Fraction(-1, 2)
    assert bernoulli(2) == Fraction(1, 6)
    assert bernoulli(12) == Fraction(-691, 2730)
    assert bernoulli(7) == 0


@settings(max_examples=300, deadline=None)
@given(upper)
def test_against_polylog(z):
    assert abs(bloch_wigner(z) - float(oracles.bloch_wigner_mp(z))) < 1e-13


@settings(max_examples=60, deadline=None)
@given(upper.filter(lambda z: z.imag > 0.05 and abs(z) < 8))
def test_against_lobachevsky(z):
    assert abs(bloch_wigner(z) - oracles.tetrahedron_volume_from_angles(z)) < 1e-9


@settings(max_examples=300, deadline=None)
@given(upper)
def test_interval_encloses(z):
    box = ComplexBox.around(z, 1e-12 * max(1.0, abs(z)))
    enc = bloch_wigner_interval(box)
    assert enc.contains(float(oracles.bloch_wigner_mp(z)))
    assert enc.width < 1e-9


def test_interval_singular():
    with pytest.raises(IntervalError):
        bloch_wigner_interval(ComplexBox.around(1.0, 1e-3))


@pytest.mark.parametrize(
    "name,value,tol",
    [("figure_eight", FIG8_VOLUME, 1e-11), ("whitehead", WHITEHEAD_VOLUME, 1e-11), ("borromean", BORROMEAN_VOLUME, 1e-11)],
)
def test_fixture_volumes(solved, name, value, tol):
    _, sys_, sol = solved[name]
    res = volume(sol)
    assert abs(res.value - value) < tol
    assert res.value == sum(res.per_tetrahedron)
    assert all(p > 0 for p in res.per_tetrahedron)


@pytest.mark.parametrize("name", ["figure_eight", "whitehead", "borromean"])
def test_float_inside_enclosure(solved, name):
    _, sys_, sol = solved[name]
    cert = krawczyk_certify(sys_, sol)
    enc = volume_enclosure(cert)
    assert enc.width < 1e-8
    assert enc.contains(volume(sol).value)
    parts = boxes_volume(cert.boxes).per_tetrahedron
    assert all(p.lo > 0 for p in parts)


def test_enclosure_requires_geometric(solved):
    _, sys_, sol = solved["whitehead"]
    cert = krawczyk_certify(sys_, sol)
    flat = Certificate(cert.boxes, False, True, None, cert.system_hash)
    with pytest.raises(VolumeError):
        volume_enclosure(flat)
    with pytest.raises(VolumeError):
        volume_enclosure(Certificate(cert.boxes, True, False, None, cert.system_hash))


def test_additivity(solved):
    _, s1, a = solved["figure_eight"]
    _, s2, b = solved["whitehead"]
    joined = s1.concatenate(s2)
    sol = solve(joined, list(a.shapes) + list(b.shapes))
    assert abs(volume(sol).value - (volume(a).value + volume(b).value)) < 1e-12


def test_low_precision_flag():
    res = volume([complex(0.5, 1e-8), 1j])
    assert res.low_precision == (True, False)
