"""Double-double (compensated) arithmetic for eigenphase doubling.

A value is carried as an unevaluated sum ``hi + lo`` of two floats with
``|lo| <= ulp(hi)/2``, giving roughly 106 bits of significand.  Phases are
held in *turns* (fractions of a full rotation): doubling a turn count and
dropping its integer part are both exact in binary floating point, so the
only rounding in ``2**i * phase mod 1`` is the initial division by 2*pi.

That division is done on ``2**i * theta`` (exact in binary) against a
triple-double ``1/(2 pi)``, so its absolute error does not grow with ``i``.
"""

from __future__ import annotations

import math
from typing import NamedTuple

_SPLITTER = 134217729.0  # 2**27 + 1


class DD(NamedTuple):
    hi: float
    lo: float = 0.0

    def __float__(self) -> float:
        return self.hi + self.lo


def two_sum(a: float, b: float) -> DD:
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return DD(s, err)


def quick_two_sum(a: float, b: float) -> DD:
    """Requires ``|a| >= |b|``."""
    s = a + b
    return DD(s, b - (s - a))


def _split(a: float) -> tuple[float, float]:
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def two_prod(a: float, b: float) -> DD:
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return DD(p, err)


def dd_add(x: DD, y: DD) -> DD:
    s, e = two_sum(x.hi, y.hi)
    t, f = two_sum(x.lo, y.lo)
    e += t
    s, e = quick_two_sum(s, e)
    e += f
    return quick_two_sum(s, e)


def dd_mul(x: DD, y: DD) -> DD:
    p, e = two_prod(x.hi, y.hi)
    e += x.hi * y.lo + x.lo * y.hi
    return quick_two_sum(p, e)


def dd_div(x: DD, y: DD) -> DD:
    q1 = x.hi / y.hi
    r = dd_add(x, DD(*(-v for v in dd_mul(DD(q1), y))))
    q2 = r.hi / y.hi
    r = dd_add(r, DD(*(-v for v in dd_mul(DD(q2), y))))
    q3 = r.hi / y.hi
    return dd_add(quick_two_sum(q1, q2), DD(q3))


# 2*pi to ~107 bits: hi is the double nearest 2*pi, lo the rounded remainder
TWO_PI = DD(6.283185307179586, 2.4492935982947064e-16)


# 1/(2 pi) as an unevaluated sum of three doubles (~160 bits)
_INV_TWO_PI = (0.15915494309189535, -9.839338337591243e-18, -5.360718141446502e-34)


def angle_to_turns(theta: float, doublings: int = 0) -> DD:
    """``2**doublings * theta / (2 pi)`` reduced into [0, 1)."""
    if doublings < 0:
        raise ValueError("doublings must be non-negative")
    x = math.ldexp(float(theta), doublings)
    c0, c1, c2 = _INV_TWO_PI
    p0 = two_prod(x, c0)
    p1 = two_prod(x, c1)
    acc = DD(0.0)
    for v in (p0.hi, p0.lo, p1.hi, p1.lo):
        # fmod is exact; dropping whole turns early keeps acc small
        acc = dd_add(acc, DD(math.fmod(v, 1.0)))
    return frac(dd_add(acc, DD(x * c2)))


def frac(x: DD) -> DD:
    """Fractional part; the value lies in [0, 1) though ``hi`` may round to 1."""
    n = math.floor(x.hi)
    # hi - n is not exact when hi < 0, so keep its rounding error
    r = dd_add(two_sum(x.hi, -float(n)), DD(x.lo))
    if r.hi < 0.0 or (r.hi == 0.0 and r.lo < 0.0):
        r = dd_add(r, DD(1.0))
    elif r.hi > 1.0 or (r.hi == 1.0 and r.lo >= 0.0):
        r = dd_add(r, DD(-1.0))
    return r


def double_turns(x: DD, times: int) -> DD:
    """``2**times * x mod 1``, exact at every step."""
    if times < 0:
        raise ValueError("times must be non-negative")
    for _ in range(times):
        x = frac(DD(2.0 * x.hi, 2.0 * x.lo))
    return x


def turns_to_angle(x: DD) -> float:
    """Angle in radians (double) of a turn count."""
    return float(dd_mul(x, TWO_PI))
