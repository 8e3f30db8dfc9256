"""Continued fractions with eventually periodic digit streams.

Values are quadratic surds ``(p + q*sqrt(D)) / r`` held with integer
coefficients, then enclosed by outward-rounded mpmath intervals.
"""
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from mpmath import iv, mp, mpf

from .errors import DomainError

DEFAULT_PRECISION = 128


@contextmanager
def precision(bits):
    """Temporarily set the working precision of mpmath's interval and float contexts."""
    old_iv, old_mp = iv.prec, mp.prec
    iv.prec = mp.prec = max(int(bits), 53)
    try:
        yield
    finally:
        iv.prec, mp.prec = old_iv, old_mp


def check_digits(digits):
    for d in digits:
        if not isinstance(d, int) or isinstance(d, bool) or d < 1:
            raise DomainError(f"continued-fraction digits must be positive integers, got {d!r}")


def mobius(digits):
    """Integer matrix ``[[p, p'], [q, q']]`` with ``[d1; d2, ..., dk + t] = (p t + p') / (q t + q')``.

    Here ``t`` stands for the tail after the last digit, so the map is
    ``t -> [d1; ..., dk, t]`` read as ``d1 + 1/(d2 + ... 1/(dk + 1/t))``.
    """
    p, pp, q, qq = 1, 0, 0, 1
    for d in digits:
        p, pp, q, qq = p * d + pp, p, q * d + qq, q
    return p, pp, q, qq


@dataclass(frozen=True)
class Surd:
    """The real number ``(p + q * sqrt(D)) / r`` with ``r > 0`` and ``D >= 0``."""

    p: int
    q: int
    D: int
    r: int

    def __post_init__(self):
        if self.r <= 0 or self.D < 0:
            raise ValueError("surd needs r > 0 and D >= 0")

    @classmethod
    def rational(cls, x):
        x = Fraction(x)
        return cls(x.numerator, 0, 0, x.denominator)

    @property
    def is_rational(self):
        return self.q == 0 or self.D == 0 or isqrt(self.D) ** 2 == self.D

    def interval(self, prec=None):
        """Outward-rounded enclosure; uses the current interval precision unless ``prec`` is given."""
        if prec is not None:
            with precision(prec):
                return self.interval()
        x = iv.mpf(self.p)
        if self.q and self.D:
            x = x + iv.mpf(self.q) * iv.sqrt(iv.mpf(self.D))
        return x / iv.mpf(self.r)

    def __float__(self):
        return float(self.interval(64).mid)

    def mobius(self, a, b, c, d):
        """``(a x + b) / (c x + d)`` rationalized back into surd form."""
        # x = (p + q s) / r, s = sqrt(D)
        n0, n1 = a * self.p + b * self.r, a * self.q
        d0, d1 = c * self.p + d * self.r, c * self.q
        # (n0 + n1 s)(d0 - d1 s) / (d0^2 - d1^2 D)
        den = d0 * d0 - d1 * d1 * self.D
        if den == 0:
            raise ZeroDivisionError("degenerate Mobius image")
        num0 = n0 * d0 - n1 * d1 * self.D
        num1 = n1 * d0 - n0 * d1
        if den < 0:
            den, num0, num1 = -den, -num0, -num1
        return Surd(num0, num1, self.D, den)._reduced()

    def _reduced(self):
        from math import gcd

        g = gcd(gcd(self.p, self.q), self.r)
        if g > 1:
            return Surd(self.p // g, self.q // g, self.D, self.r // g)
        return self


def purely_periodic(period) -> Surd:
    """``[c1; c2, ..., ck, c1, c2, ...]`` as the positive root of its fixed-point quadratic."""
    period = tuple(period)
    check_digits(period)
    P, P1, Q, Q1 = mobius(period)
    # x = (P x + P1) / (Q x + Q1)  ->  Q x^2 + (Q1 - P) x - P1 = 0
    b = Q1 - P
    disc = b * b + 4 * Q * P1
    return Surd(-b, 1, disc, 2 * Q)._reduced()


def eventually_periodic(prefix, period) -> Surd:
    """``[prefix..., period, period, ...]``; the first prefix digit is the integer part."""
    prefix = tuple(prefix)
    if prefix:
        if not isinstance(prefix[0], int) or prefix[0] < 0:
            raise DomainError(f"integer part must be a nonnegative integer, got {prefix[0]!r}")
        check_digits(prefix[1:])
    tail = purely_periodic(period)
    if not prefix:
        return tail
    a, b, c, d = mobius(prefix)
    return tail.mobius(a, b, c, d)


def reciprocal(x: Surd) -> Surd:
    return x.mobius(0, 1, 1, 0)


def truncated_value(digits, prec=DEFAULT_PRECISION):
    """Finite continued fraction ``[d1; d2, ..., dk]`` by backward recurrence at ``prec`` bits."""
    with precision(prec):
        x = mpf(digits[-1])
        for d in reversed(digits[:-1]):
            x = d + 1 / x
        return +x


def endpoints(x):
    """Exact mpf endpoints of an mpmath interval."""
    lo, hi = x._mpi_
    return mp.make_mpf(lo), mp.make_mpf(hi)
