"""Certified rational enclosures for logarithms, exponentials, and roots.

mpmath's interval arithmetic does the transcendental work; everything
crossing into an assertion is converted back to exact Fractions, so no
bare float ever decides a pass/fail.  Inputs are fed to mpmath in
exact pieces (small-integer limbs) to keep the enclosures sound for
arbitrarily large integers.

mpmath's interval precision is global state; the helpers here save and
restore it, so they are not safe to
call concurrently with other mpmath interval users.
"""

from __future__ import annotations

from contextlib import contextmanager
from fractions import Fraction

from mpmath import iv


_LIMB_BITS = 40


@contextmanager
def _precision(bits: int):
    old = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = old


def _fraction_from_raw(t) -> Fraction:
    # mantissa and exponent may be gmpy2 integers depending on the mpmath
    # backend; normalize to plain ints so Fractions stay homogeneous
    sign, man, exp, bc = t
    man, exp = int(man), int(exp)
    if man == 0 and exp != 0:
        raise OverflowError("non-finite interval endpoint")
    v = Fraction(man)
    v = v * Fraction(2) ** exp
    return -v if sign else v


def _interval_to_fractions(x) -> tuple[Fraction, Fraction]:
    lo_t, hi_t = x._mpi_
    return _fraction_from_raw(lo_t), _fraction_from_raw(hi_t)


def _iv_from_int(n: int):
    """Interval certainly containing the exact integer, at any precision."""
    if abs(n) < (1 << 53):
        return iv.mpf(n)
    sign = -1 if n < 0 else 1
    n = abs(n)
    limbs = []
    while n:
        limbs.append(n & ((1 << _LIMB_BITS) - 1))
        n >>= _LIMB_BITS
    acc = iv.mpf(0)
    base = iv.mpf(1 << _LIMB_BITS)
    for limb in reversed(limbs):
        acc = acc * base + iv.mpf(limb)
    return acc * sign


def _iv_from_fraction(q: Fraction):
    return _iv_from_int(q.numerator) / _iv_from_int(q.denominator)


def _iv_from_fraction_interval(lo: Fraction, hi: Fraction):
    a = _iv_from_fraction(lo)
    b = _iv_from_fraction(hi)
    return iv.mpf([a.a, b.b])


def log_enclosure(value, bits: int = 64) -> tuple[Fraction, Fraction]:
    """Enclosure of ln(value); value is a positive int, Fraction, or (lo, hi) pair."""
    with _precision(bits + 16):
        if isinstance(value, tuple):
            x = _iv_from_fraction_interval(Fraction(value[0]), Fraction(value[1]))
        elif isinstance(value, int):
            x = _iv_from_int(value)
        else:
            x = _iv_from_fraction(Fraction(value))
        return _interval_to_fractions(iv.log(x))


def log_ratio_enclosure(
    numerator: int,
    scale: int,
    beta_interval: tuple[Fraction, Fraction],
    bits: int = 64,
) -> tuple[Fraction, Fraction]:
    """Enclosure of ln(numerator) / (scale * ln(beta))."""
    if numerator == 1:
        return Fraction(0), Fraction(0)
    with _precision(bits + 16):
        num = iv.log(_iv_from_int(numerator))
        den = iv.log(_iv_from_fraction_interval(*beta_interval)) * _iv_from_int(scale)
        return _interval_to_fractions(num / den)


def log_base_enclosure(
    n: int, beta_interval: tuple[Fraction, Fraction], bits: int = 64
) -> tuple[Fraction, Fraction]:
    """Enclosure of log_beta(n) for an integer n >= 1."""
    return log_ratio_enclosure(n, 1, beta_interval, bits)


def profile_ratio_enclosure(
    mass_denominator: int,
    n: int,
    beta_interval: tuple[Fraction, Fraction],
    follower_interval: tuple[Fraction, Fraction],
    bits: int = 64,
) -> tuple[Fraction, Fraction]:
    """Enclosure of ln(mass_denominator) / (n*ln(beta) - ln(follower)),
    the mass-versus-length exponent of a cylinder of depth n whose length
    is beta**-n times the follower value in (0, 1]."""
    with _precision(bits + 16):
        num = iv.log(_iv_from_int(mass_denominator))
        den = iv.log(_iv_from_fraction_interval(*beta_interval)) * _iv_from_int(n)
        den = den - iv.log(_iv_from_fraction_interval(*follower_interval))
        return _interval_to_fractions(num / den)


def log2_enclosure(beta_interval: tuple[Fraction, Fraction], bits: int = 64) -> tuple[Fraction, Fraction]:
    """Enclosure of log2(beta)."""
    with _precision(bits + 16):
        num = iv.log(_iv_from_fraction_interval(*beta_interval))
        den = iv.log(iv.mpf(2))
        return _interval_to_fractions(num / den)


def ceil_exp_int(m: int) -> int:
    """Exact ceiling of e**m for a positive integer m (e**m is irrational)."""
    bits = 64
    while True:
        with _precision(bits):
            lo, hi = _interval_to_fractions(iv.exp(iv.mpf(m)))
        import math

        clo, chi = int(math.ceil(lo)), int(math.ceil(hi))
        if clo == chi:
            return clo
        bits *= 2


def floor_ln_int(n: int) -> int:
    """Exact floor of ln(n) for an integer n >= 2 (ln n is irrational)."""
    if n < 2:
        raise ValueError("floor of ln is only certified for n >= 2")
    bits = 64
    while True:
        lo, hi = log_enclosure(n, bits)
        import math

        flo, fhi = int(math.floor(lo)), int(math.floor(hi))
        if flo == fhi:
            return flo
        bits *= 2


def nth_root_enclosure(a: int, k: int, bits: int = 64) -> tuple[Fraction, Fraction]:
    """Enclosure of a**(1/k) for integers a >= 1, k >= 1."""
    with _precision(bits + 16):
        x = iv.exp(iv.log(_iv_from_int(a)) / _iv_from_int(k))
        return _interval_to_fractions(x)


def sqrt_enclosure(n: int, bits: int) -> tuple[Fraction, Fraction]:
    """Dyadic enclosure of sqrt(n), nested as bits grows."""
    import math

    shifted = n << (2 * bits)
    r = math.isqrt(shifted)
    lo = Fraction(r, 1 << bits)
    if r * r == shifted:
        return lo, lo
    return lo, Fraction(r + 1, 1 << bits)


def int_nth_root(x: int, k: int) -> int:
    """floor(x ** (1/k)) for integers x >= 0, k >= 1."""
    if x < 0:
        raise ValueError("negative radicand")
    if x < 2 or k == 1:
        return x
    r = 1 << ((x.bit_length() + k - 1) // k)
    while True:
        nr = ((k - 1) * r + x // r ** (k - 1)) // k
        if nr >= r:
            break
        r = nr
    while r ** k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


def nth_root_dyadic(n: int, p: int, q: int, bits: int) -> tuple[Fraction, Fraction]:
    """Dyadic enclosure of n**(p/q), nested as bits grows."""
    shifted = (n ** p) << (q * bits)
    r = int_nth_root(shifted, q)
    lo = Fraction(r, 1 << bits)
    if r ** q == shifted:
        return lo, lo
    return lo, Fraction(r + 1, 1 << bits)
