"""Bloch-Wigner dilogarithm and hyperbolic volume.

``D(z) = Im Li2(z) + arg(1 - z) log|z|`` is the volume of the ideal
tetrahedron of shape ``z`` (for ``Im z > 0``). ``D`` is invariant under the
even anharmonic maps ``z -> 1 - 1/z -> 1/(1 - z)`` and changes sign under the
odd ones ``1/z``, ``1 - z``, ``z/(z - 1)``. Inputs are moved into
``|w| <= 1, Re w <= 1/2`` where the series

    Li2(w) = u - u^2/4 + sum_k B_2k u^(2k+1) / (2k+1)!,   u = -log(1 - w)

converges geometrically with ratio ``(|u| / 2 pi)^2 < 0.1``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Union

from .intervals import ComplexBox, Interval, IntervalError, down, up

LOW_PRECISION_IM = 1e-6


@lru_cache(maxsize=None)
def bernoulli(m: int) -> Fraction:
    """Exact Bernoulli number ``B_m`` (``B_1 = -1/2``)."""
    a = [Fraction(0)] * (m + 1)
    for k in range(m + 1):
        a[k] = Fraction(1, k + 1)
        for j in range(k, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
    b = a[0]
    return -b if m == 1 else b


@lru_cache(maxsize=None)
def _coefficients(count: int) -> tuple[Fraction, ...]:
    # c_k = B_2k / (2k+1)!
    return tuple(bernoulli(2 * k) / math.factorial(2 * k + 1) for k in range(1, count + 1))


_COEFF_FLOAT = tuple(float(c) for c in _coefficients(40))


def _coeff_interval(k: int) -> Interval:
    c = _coefficients(40)[k]
    f = float(c)
    return Interval(down(f), up(f))


# (image function, sign): D(z) = sign * D(image(z))
_MAPS = (
    (lambda z: z, 1),
    (lambda z: 1 - 1 / z, 1),
    (lambda z: 1 / (1 - z), 1),
    (lambda z: 1 / z, -1),
    (lambda z: 1 - z, -1),
    (lambda z: z / (z - 1), -1),
)


def _choose_map(z: complex) -> int:
    """Index of the anharmonic image landing in |w| <= 1, Re w <= 1/2.

    Ties (the boundary of the region) are broken by the smallest |log(1 - w)|.
    """
    best, best_key = 0, None
    for i, (f, _) in enumerate(_MAPS):
        w = f(z)
        inside = abs(w) <= 1 + 1e-12 and w.real <= 0.5 + 1e-12
        key = (not inside, abs(cmath.log(1 - w)))
        if best_key is None or key < best_key:
            best, best_key = i, key
    return best


def _reduced_float(w: complex) -> float:
    u = -cmath.log(1 - w)
    u2 = u * u
    total = u - u2 / 4
    term = u
    for c in _COEFF_FLOAT:
        term *= u2
        t = c * term
        total += t
        if abs(t) < 1e-18:
            break
    return total.imag + cmath.phase(1 - w) * math.log(abs(w))


def bloch_wigner(z: complex) -> float:
    """``D(z)`` in double precision; exactly 0 on the real axis."""
    z = complex(z)
    if z == 0 or z == 1:
        raise ValueError("Bloch-Wigner dilogarithm is undefined at 0 and 1")
    if z.imag == 0:
        return 0.0
    i = _choose_map(z)
    f, sign = _MAPS[i]
    return sign * _reduced_float(f(z))


def _apply_map_box(i: int, box: ComplexBox) -> ComplexBox:
    if i == 0:
        return box
    if i == 1:
        return box.one_minus_recip()
    if i == 2:
        return box.recip_one_minus()
    if i == 3:
        return box.recip()
    if i == 4:
        return box.one_minus()
    return box / (box - 1.0)


def bloch_wigner_interval(box: ComplexBox, terms: int = 30) -> Interval:
    """Rigorous enclosure of ``D`` over a box avoiding 0 and 1."""
    if box.contains_zero() or box.one_minus().contains_zero():
        raise IntervalError("box meets a singularity of the dilogarithm")
    i = _choose_map(box.mid)
    sign = _MAPS[i][1]
    w = _apply_map_box(i, box)
    one_minus_w = w.one_minus()
    u = -(one_minus_w.log())
    u2 = u * u
    total = u - u2 * 0.25
    term = u
    for k in range(terms):
        term = term * u2
        total = total + term * _coeff_interval(k)
    # tail: |B_2k| / (2k)! <= 2 zeta(2) / (2 pi)^(2k)
    umag = math.sqrt(up(up(u.re.mag * u.re.mag) + up(u.im.mag * u.im.mag)))
    umag = up(umag, 2)
    r = up((umag / (2 * math.pi)) ** 2, 4)
    if r >= 0.5:
        raise IntervalError("series ratio too large for a rigorous tail bound")
    tail = up(3.3 * umag * r ** (terms + 1) / (1 - r), 8)
    im_li2 = total.im.widen(tail)
    log_abs = w.abs2().log() * 0.5
    value = im_li2 + one_minus_w.arg() * log_abs
    return value if sign > 0 else -value


@dataclass(frozen=True)
class VolumeResult:
    value: Union[float, Interval]
    per_tetrahedron: tuple
    low_precision: tuple[bool, ...] = ()

    @property
    def certified(self) -> bool:
        return isinstance(self.value, Interval)


def volume(shapes) -> VolumeResult:
    """Sum of ``D`` over the shapes, with per-tetrahedron contributions."""
    zs = list(shapes.shapes) if hasattr(shapes, "shapes") else [complex(z) for z in shapes]
    parts = tuple(bloch_wigner(z) for z in zs)
    total = 0.0
    for p in parts:
        total += p
    flags = tuple(abs(z.imag) <= LOW_PRECISION_IM for z in zs)
    return VolumeResult(total, parts, flags)


def boxes_volume(boxes: Sequence[ComplexBox]) -> VolumeResult:
    parts = tuple(bloch_wigner_interval(b) for b in boxes)
    total = Interval.point(0.0)
    for p in parts:
        total = total + p
    flags = tuple(b.im.lo <= LOW_PRECISION_IM for b in boxes)
    return VolumeResult(total, parts, flags)


class VolumeError(ValueError):
    pass


def volume_enclosure(cert) -> Interval:
    """Certified volume interval for a unique, geometric certificate."""
    if not cert.unique:
        raise VolumeError("certificate does not establish a unique solution")
    if not cert.geometric:
        raise VolumeError("certificate is not geometric")
    return boxes_volume(cert.boxes).value
