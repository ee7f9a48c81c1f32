"""Extended-range real and complex scalar arithmetic.

A value is stored as ``significand * 2**exponent`` with the significand an
ordinary float in [1, 2) (or exactly 0) and the exponent a 64-bit signed
integer.  This keeps magnitudes like exp(exp(40)) representable long after
ordinary floats overflow, while retaining the ~15 significant digits of the
double significand under subtraction (a signed-log representation would not).

Only the operations the growth machinery actually needs are provided:
add/sub/mul, natural log and exponential, comparisons.  Complex division and
square roots are deliberately absent; everything upstream is written to avoid
them (log-magnitude and phase arithmetic take their place).

All values are immutable plain data and all operations are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "ExtendedReal",
    "ExtendedComplex",
    "ExponentOverflowError",
    "er_add",
    "er_sub",
    "er_neg",
    "er_abs",
    "er_mul",
    "er_ln",
    "er_exp",
    "er_cmp",
    "er_from_float",
    "er_to_float",
    "ec_add",
    "ec_sub",
    "ec_mul",
    "ec_neg",
    "ec_ln_abs",
    "ec_arg",
    "ec_from_log_polar",
    "format_extended",
]

# Wide exponent is a 64-bit signed integer; +/-9.2e18 covers exp(exp(43)).
EXP_LIMIT = 2**63 - 1

# Shifts beyond this leave the smaller addend entirely below the significand's
# precision, so it is absorbed.  53 mantissa bits + slack.
_ABSORB_SHIFT = 60

LN2 = 0.6931471805599453
# Two-part ln 2: the high part carries 29 significand bits so that
# e * LN2_HI is exact for |e| < 2**24.
_LN2_HI = float.fromhex("0x1.62e42fep-1")
_LN2_LO = 0.693147180559945309417232121458176568 - _LN2_HI
_LN2_FRACTION = Fraction(
    693147180559945309417232121458176568075500134360255254120680,
    10**60,
)


class ExponentOverflowError(ArithmeticError):
    """The wide binary exponent left the 64-bit range.

    This is a hard error: it signals that experiment parameters are out of
    the representable range, not a recoverable rounding condition.
    """


@dataclass(frozen=True)
class ExtendedReal:
    """Real scalar ``significand * 2**exponent``, normalized.

    Invariants: ``1 <= |significand| < 2`` or ``significand == 0`` with
    ``exponent == 0`` (the canonical zero).
    """

    significand: float
    exponent: int

    def __bool__(self) -> bool:
        return self.significand != 0.0

    # Ordering mirrors the real ordering; see er_cmp.
    def __lt__(self, other: "ExtendedReal") -> bool:
        return er_cmp(self, other) < 0

    def __le__(self, other: "ExtendedReal") -> bool:
        return er_cmp(self, other) <= 0

    def __gt__(self, other: "ExtendedReal") -> bool:
        return er_cmp(self, other) > 0

    def __ge__(self, other: "ExtendedReal") -> bool:
        return er_cmp(self, other) >= 0


ER_ZERO = ExtendedReal(0.0, 0)
ER_ONE = ExtendedReal(1.0, 0)


def _normalize(significand: float, exponent: int) -> ExtendedReal:
    if significand == 0.0:
        return ER_ZERO
    if not math.isfinite(significand):
        raise ExponentOverflowError("significand overflowed the float range")
    mant, shift = math.frexp(significand)  # 0.5 <= |mant| < 1, exact
    exponent = exponent + shift - 1
    if not -EXP_LIMIT <= exponent <= EXP_LIMIT:
        raise ExponentOverflowError(
            f"binary exponent {exponent} outside the 64-bit range; "
            "experiment parameters out of range"
        )
    return ExtendedReal(mant * 2.0, exponent)


def er_from_float(x: float) -> ExtendedReal:
    """Exact conversion from an ordinary float (round-trips bit for bit)."""
    if x == 0.0:
        return ER_ZERO
    if not math.isfinite(x):
        raise ValueError("cannot represent a non-finite float")
    return _normalize(x, 0)


def er_to_float(a: ExtendedReal) -> float:
    """Back to an ordinary float; raises OverflowError if it does not fit."""
    return math.ldexp(a.significand, a.exponent)


def er_neg(a: ExtendedReal) -> ExtendedReal:
    if a.significand == 0.0:
        return ER_ZERO
    return ExtendedReal(-a.significand, a.exponent)


def er_abs(a: ExtendedReal) -> ExtendedReal:
    if a.significand < 0.0:
        return ExtendedReal(-a.significand, a.exponent)
    return a


def er_add(a: ExtendedReal, b: ExtendedReal) -> ExtendedReal:
    """Sum with relative error <= a few eps, except under catastrophic
    cancellation where only absolute error ~eps * max(|a|, |b|) holds."""
    if a.significand == 0.0:
        return b
    if b.significand == 0.0:
        return a
    d = a.exponent - b.exponent
    if d >= 0:
        if d > _ABSORB_SHIFT:
            return a
        return _normalize(a.significand + math.ldexp(b.significand, -d), a.exponent)
    if -d > _ABSORB_SHIFT:
        return b
    return _normalize(b.significand + math.ldexp(a.significand, d), b.exponent)


def er_sub(a: ExtendedReal, b: ExtendedReal) -> ExtendedReal:
    return er_add(a, er_neg(b))


def er_mul(a: ExtendedReal, b: ExtendedReal) -> ExtendedReal:
    """Product; exponents add as wide integers, relative error <= 2 eps."""
    if a.significand == 0.0 or b.significand == 0.0:
        return ER_ZERO
    return _normalize(a.significand * b.significand, a.exponent + b.exponent)


def er_cmp(a: ExtendedReal, b: ExtendedReal) -> int:
    """Three-way comparison agreeing with the real ordering."""
    sa = (a.significand > 0) - (a.significand < 0)
    sb = (b.significand > 0) - (b.significand < 0)
    if sa != sb:
        return 1 if sa > sb else -1
    if sa == 0:
        return 0
    # Same nonzero sign: a bigger exponent means a bigger magnitude (so a
    # smaller value when negative); equal exponents compare the signed
    # significands directly.
    if a.exponent != b.exponent:
        return (1 if a.exponent > b.exponent else -1) * sa
    if a.significand != b.significand:
        return 1 if a.significand > b.significand else -1
    return 0


def er_ln(a: ExtendedReal) -> float:
    """Natural log as an ordinary float, accurate to a few eps relatively.

    The exponents of interest never push ``exponent*ln2`` outside the float
    range, so the result always fits.  Raises ValueError for a <= 0.
    """
    if a.significand <= 0.0:
        raise ValueError("er_ln requires a positive value")
    e, s = a.exponent, a.significand
    # Near 1 the plain formula cancels catastrophically; handle e in {-1, 0}
    # via log1p so the relative error stays at the eps level.
    if e == 0:
        return math.log(s)
    if e == -1:
        return math.log1p((s - 2.0) / 2.0)  # s/2 - 1 is exact (Sterbenz)
    if abs(e) < (1 << 24):
        return (e * _LN2_HI + math.log(s)) + e * _LN2_LO
    return e * LN2 + math.log(s)


def er_exp(x: float) -> ExtendedReal:
    """e**x in extended range.

    Requires x/ln2 to fit the wide exponent; otherwise a hard
    ExponentOverflowError is raised.
    """
    if not math.isfinite(x):
        raise ValueError("er_exp requires a finite argument")
    if abs(x) > EXP_LIMIT * LN2:
        raise ExponentOverflowError(
            f"exp({x!r}) exceeds the wide exponent range"
        )
    e = math.floor(x / LN2)
    if abs(e) < (1 << 24):
        frac = (x - e * _LN2_HI) - e * _LN2_LO
    else:
        # Cold path for gigantic arguments: exact rational reduction.
        frac = float(Fraction(x) - e * _LN2_FRACTION)
    # Guard the reduction into [0, ln2).
    while frac < 0.0:
        e -= 1
        frac += LN2
    while frac >= LN2:
        e += 1
        frac -= LN2
    return _normalize(math.exp(frac), e)


@dataclass(frozen=True)
class ExtendedComplex:
    """Complex scalar with extended-range real and imaginary parts."""

    re: ExtendedReal
    im: ExtendedReal


EC_ZERO = ExtendedComplex(ER_ZERO, ER_ZERO)


def ec_add(a: ExtendedComplex, b: ExtendedComplex) -> ExtendedComplex:
    return ExtendedComplex(er_add(a.re, b.re), er_add(a.im, b.im))


def ec_sub(a: ExtendedComplex, b: ExtendedComplex) -> ExtendedComplex:
    return ExtendedComplex(er_sub(a.re, b.re), er_sub(a.im, b.im))


def ec_neg(a: ExtendedComplex) -> ExtendedComplex:
    return ExtendedComplex(er_neg(a.re), er_neg(a.im))


def ec_mul(a: ExtendedComplex, b: ExtendedComplex) -> ExtendedComplex:
    re = er_sub(er_mul(a.re, b.re), er_mul(a.im, b.im))
    im = er_add(er_mul(a.re, b.im), er_mul(a.im, b.re))
    return ExtendedComplex(re, im)


def ec_ln_abs(a: ExtendedComplex) -> float:
    """ln|a| without a square root: 0.5 * ln(re^2 + im^2)."""
    mag2 = er_add(er_mul(a.re, a.re), er_mul(a.im, a.im))
    if not mag2:
        raise ValueError("ln|0| is undefined")
    return 0.5 * er_ln(mag2)


def ec_arg(a: ExtendedComplex) -> float:
    """Argument of a, via significands aligned to a common exponent."""
    if not a.re and not a.im:
        return 0.0
    m = max(a.re.exponent if a.re else -EXP_LIMIT,
            a.im.exponent if a.im else -EXP_LIMIT)
    # Only the direction matters, so an underflowing component is just 0.
    y = math.ldexp(a.im.significand, max(a.im.exponent - m, -1100)) if a.im else 0.0
    x = math.ldexp(a.re.significand, max(a.re.exponent - m, -1100)) if a.re else 0.0
    return math.atan2(y, x)


def ec_from_log_polar(ln_r: float, theta: float) -> ExtendedComplex:
    """The complex number with |z| = e**ln_r and arg z = theta."""
    mag = er_exp(ln_r)
    return ExtendedComplex(
        er_mul(mag, er_from_float(math.cos(theta))),
        er_mul(mag, er_from_float(math.sin(theta))),
    )


def format_extended(a: ExtendedReal) -> str:
    """Report serialization: sign character plus ln|value| to 12 digits.

    Growth analysis only ever consumes logarithms, so the decimal string of
    er_ln(|x|) identifies the value.  Zero serializes as "0".
    """
    if not a:
        return "0"
    sign = "+" if a.significand > 0 else "-"
    return f"{sign}{er_ln(er_abs(a)):.12g}"
