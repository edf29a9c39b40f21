"""Real intervals and complex boxes with outward rounding.

Rounding is done portably: every bound produced by a floating operation is
pushed outward with ``math.nextafter``. Basic arithmetic is correctly rounded
in IEEE double, so one ulp suffices there; results of libm transcendentals
(``log``, ``atan2``) are widened by two ulps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_DOWN, Decimal, localcontext
from typing import Union

_INF = math.inf


def down(x: float, k: int = 1) -> float:
    for _ in range(k):
        x = math.nextafter(x, -_INF)
    return x


def up(x: float, k: int = 1) -> float:
    for _ in range(k):
        x = math.nextafter(x, _INF)
    return x


class IntervalError(ArithmeticError):
    """Operation undefined somewhere on the input interval."""


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @staticmethod
    def point(x: float) -> "Interval":
        x = float(x)
        return Interval(x, x)

    @staticmethod
    def around(x: float, r: float) -> "Interval":
        return Interval(down(x - r), up(x + r))

    @property
    def mid(self) -> float:
        return 0.5 * self.lo + 0.5 * self.hi

    @property
    def width(self) -> float:
        return up(self.hi - self.lo)

    @property
    def mag(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    def interior_contains(self, other: "Interval") -> bool:
        return self.lo < other.lo and other.hi < self.hi

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def widen(self, r: float) -> "Interval":
        return Interval(down(self.lo - r), up(self.hi + r))

    def __add__(self, o):
        o = _iv(o)
        return Interval(down(self.lo + o.lo), up(self.hi + o.hi))

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, o):
        o = _iv(o)
        return Interval(down(self.lo - o.hi), up(self.hi - o.lo))

    def __rsub__(self, o):
        return _iv(o) - self

    def __mul__(self, o):
        o = _iv(o)
        if self.lo == self.hi and o.lo == o.hi:
            p = self.lo * o.lo
            return Interval(down(p), up(p))
        ps = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(down(min(ps)), up(max(ps)))

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = _iv(o)
        if o.lo <= 0 <= o.hi:
            raise IntervalError("division by an interval containing 0")
        qs = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        return Interval(down(min(qs)), up(max(qs)))

    def __rtruediv__(self, o):
        return _iv(o) / self

    def sqr(self) -> "Interval":
        if self.lo >= 0:
            return Interval(down(self.lo * self.lo), up(self.hi * self.hi))
        if self.hi <= 0:
            return Interval(down(self.hi * self.hi), up(self.lo * self.lo))
        return Interval(0.0, up(max(self.lo * self.lo, self.hi * self.hi)))

    def log(self) -> "Interval":
        if self.lo <= 0:
            raise IntervalError("log of an interval reaching 0")
        return Interval(down(math.log(self.lo), 2), up(math.log(self.hi), 2))

    def __repr__(self):
        return f"[{self.lo!r}, {self.hi!r}]"


def _iv(x) -> Interval:
    if isinstance(x, Interval):
        return x
    return Interval.point(float(x))


PI = Interval(math.pi, up(math.pi))  # math.pi rounds below pi
TWO_PI = Interval(2 * math.pi, up(2 * math.pi))


@dataclass(frozen=True)
class ComplexBox:
    re: Interval
    im: Interval

    @staticmethod
    def point(z: complex) -> "ComplexBox":
        z = complex(z)
        return ComplexBox(Interval.point(z.real), Interval.point(z.imag))

    @staticmethod
    def around(z: complex, r: float) -> "ComplexBox":
        z = complex(z)
        return ComplexBox(Interval.around(z.real, r), Interval.around(z.imag, r))

    @property
    def mid(self) -> complex:
        return complex(self.re.mid, self.im.mid)

    @property
    def width(self) -> float:
        return max(self.re.width, self.im.width)

    def contains(self, z) -> bool:
        if isinstance(z, ComplexBox):
            return self.re.contains(z.re) and self.im.contains(z.im)
        z = complex(z)
        return self.re.contains(z.real) and self.im.contains(z.imag)

    def interior_contains(self, other: "ComplexBox") -> bool:
        return self.re.interior_contains(other.re) and self.im.interior_contains(other.im)

    def contains_zero(self) -> bool:
        return self.re.lo <= 0 <= self.re.hi and self.im.lo <= 0 <= self.im.hi

    def widen(self, r: float) -> "ComplexBox":
        return ComplexBox(self.re.widen(r), self.im.widen(r))

    def scaled_about_mid(self, factor: float) -> "ComplexBox":
        """Same center, half-widths multiplied by ``factor``."""
        def grow(iv: Interval) -> Interval:
            m = iv.mid
            r = max(m - iv.lo, iv.hi - m) * factor
            return Interval(down(m - r), up(m + r))

        return ComplexBox(grow(self.re), grow(self.im))

    def __add__(self, o):
        o = _cb(o)
        return ComplexBox(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return ComplexBox(-self.re, -self.im)

    def __sub__(self, o):
        o = _cb(o)
        return ComplexBox(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return _cb(o) - self

    def __mul__(self, o):
        if isinstance(o, (int, float)) and not isinstance(o, bool):
            return ComplexBox(self.re * o, self.im * o)
        o = _cb(o)
        return ComplexBox(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def abs2(self) -> Interval:
        return self.re.sqr() + self.im.sqr()

    def recip(self) -> "ComplexBox":
        if self.contains_zero():
            raise IntervalError("reciprocal of a box containing 0")
        d = self.abs2()
        return ComplexBox(self.re / d, -self.im / d)

    def __truediv__(self, o):
        o = _cb(o)
        if o.contains_zero():
            raise IntervalError("division by a box containing 0")
        d = o.abs2()
        num = self * ComplexBox(o.re, -o.im)
        return ComplexBox(num.re / d, num.im / d)

    def __rtruediv__(self, o):
        return _cb(o) / self

    def one_minus(self) -> "ComplexBox":
        return ComplexBox(1.0 - self.re, -self.im)

    def recip_one_minus(self) -> "ComplexBox":
        """Enclosure of ``1 / (1 - z)``."""
        return self.one_minus().recip()

    def one_minus_recip(self) -> "ComplexBox":
        """Enclosure of ``1 - 1/z``."""
        return 1.0 - self.recip()

    def arg(self) -> Interval:
        """Principal argument; the box may not meet the branch cut."""
        if self.contains_zero():
            raise IntervalError("argument of a box containing 0")
        if self.re.lo < 0 and self.im.lo < 0 <= self.im.hi:
            raise IntervalError("box straddles the branch cut of log")
        # adding 0.0 turns a signed zero into +0.0, so the negative axis maps to +pi
        angles = [math.atan2(y + 0.0, x) for x in (self.re.lo, self.re.hi) for y in (self.im.lo, self.im.hi)]
        return Interval(down(min(angles), 2), up(max(angles), 2))

    def log(self) -> "ComplexBox":
        """Principal logarithm."""
        if self.contains_zero():
            raise IntervalError("log of a box containing 0")
        re = self.abs2().log() * 0.5
        return ComplexBox(re, self.arg())

    def __repr__(self):
        return f"ComplexBox({self.re!r}, {self.im!r})"


def _cb(x) -> ComplexBox:
    if isinstance(x, ComplexBox):
        return x
    if isinstance(x, Interval):
        return ComplexBox(x, Interval.point(0.0))
    return ComplexBox.point(complex(x))


Number = Union[int, float, complex, Interval, ComplexBox]


# ---------------------------------------------------------------------------
# rendering


def _question_digits(iv: Interval) -> str:
    """Shortest decimal ``d`` such that the interval lies in ``d`` +- one unit
    of its last digit, written ``d?``."""
    lo, hi = Decimal(iv.lo), Decimal(iv.hi)
    if iv.lo == iv.hi:
        return f"{iv.lo!r}"
    if iv.lo <= 0 <= iv.hi:
        # straddles zero: 0.?eK means |x| <= 10^K
        return f"0.?e{math.ceil(math.log10(iv.mag))}" if iv.mag > 0 else "0"
    mid = (lo + hi) / 2
    with localcontext() as ctx:
        ctx.prec = 60
        mag = max(abs(lo), abs(hi))
        top = mag.adjusted() if mag != 0 else 0
        best = None
        for digits in range(1, 18):
            exp = top - digits + 1
            unit = Decimal(1).scaleb(exp)
            d = mid.quantize(unit)
            if d - unit <= lo and hi <= d + unit:
                best = (d, exp)
            else:
                break
    if best is None:
        return f"[{iv.lo!r} .. {iv.hi!r}]"
    d, exp = best
    text = format(d, "f") if exp < 0 else format(d.quantize(Decimal(1)), "f")
    return text + "?"


def significant(x: float, digits: int = 15) -> str:
    """``x`` to ``digits`` significant digits, truncated toward zero."""
    if not math.isfinite(x) or x == 0:
        return repr(float(x))
    d = Decimal(x)
    with localcontext() as ctx:
        ctx.prec = 60
        q = d.quantize(Decimal(1).scaleb(d.adjusted() - digits + 1), rounding=ROUND_DOWN)
    # a 15-digit decimal survives the round trip through a double
    return repr(float(q))


def render_interval(iv: Interval) -> str:
    return _question_digits(iv)


def render_box(box: ComplexBox) -> str:
    re = _question_digits(box.re)
    if box.im.lo >= 0 or box.im.mid >= 0:
        return f"{re} + {_question_digits(box.im)}*I"
    return f"{re} - {_question_digits(-box.im)}*I"
