"""Independent reference computations used by the tests."""
from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations, permutations

import mpmath
from scipy.integrate import quad


def lobachevsky(theta: float) -> float:
    """-int_0^theta log|2 sin t| dt by adaptive quadrature.

    The function is odd and pi-periodic, so theta is folded into [0, pi/2]
    first, keeping the only log singularity at the left endpoint, where it
    is split off analytically.
    """
    theta = math.fmod(theta, math.pi)
    if theta < 0:
        theta += math.pi
    sign = 1.0
    if theta > math.pi / 2:
        theta, sign = math.pi - theta, -1.0
    if theta == 0:
        return 0.0
    # log(2 sin t) = log(2t) + log(sin(t)/t); the first part integrates in closed form
    smooth, _ = quad(lambda t: math.log(math.sin(t) / t) if t > 0 else 0.0, 0.0, theta, limit=200)
    return -sign * (theta * (math.log(2 * theta) - 1) + smooth)


def tetrahedron_volume_from_angles(z: complex) -> float:
    """Volume of the ideal tetrahedron of shape z as a sum of Lobachevsky values."""
    w = complex(z)
    a = math.atan2(w.imag, w.real)
    w1 = 1 / (1 - w)
    b = math.atan2(w1.imag, w1.real)
    return lobachevsky(a) + lobachevsky(b) + lobachevsky(math.pi - a - b)


def catalan_series(terms: int = 200000) -> float:
    total = mpmath.mpf(0)
    for k in range(terms):
        total += (-1) ** k / mpmath.mpf(2 * k + 1) ** 2
    # alternating tail correction: half of the next term
    total += (-1) ** terms / mpmath.mpf(2 * terms + 1) ** 2 / 2
    return float(total)


def bloch_wigner_mp(z: complex, dps: int = 40) -> mpmath.mpf:
    with mpmath.workdps(dps):
        w = mpmath.mpc(z.real, z.imag)
        return mpmath.im(mpmath.polylog(2, w)) + mpmath.arg(1 - w) * mpmath.log(abs(w))


def minor_gcds(a: list[list[int]]) -> list[int]:
    """Determinantal divisors d_1, d_2, ... of an integer matrix by brute force."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    out = []
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for rs in combinations(range(rows), k):
            for cs in combinations(range(cols), k):
                g = math.gcd(g, _det([[a[r][c] for c in cs] for r in rs]))
        if g == 0:
            break
        out.append(g)
    return out


def _det(m: list[list[int]]) -> int:
    n = len(m)
    total = 0
    for p in permutations(range(n)):
        inv = sum(p[i] > p[j] for i in range(n) for j in range(i + 1, n))
        term = 1
        for i in range(n):
            term *= m[i][p[i]]
        total += -term if inv % 2 else term
    return total


def cokernel_oracle(a: list[list[int]], cols: int) -> tuple[int, tuple[int, ...]]:
    """(rank, torsion) of Z^cols / rowspace(a) from determinantal divisors."""
    ds = minor_gcds(a) if a else []
    factors = []
    prev = 1
    for d in ds:
        factors.append(d // prev)
        prev = d
    return cols - len(factors), tuple(f for f in factors if f > 1)


def exact(x: float) -> Fraction:
    return Fraction(x)
