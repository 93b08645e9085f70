"""Exact and high-precision scalar arithmetic.

Signed fractional parts, dilation products with certified error bounds,
Legendre symbols, quadratic Gauss sums, deterministic 64-bit primality,
and modular inverses.  Everything here is a pure function of its inputs;
values are immutable after construction and safe to share across workers.

A dilation value alpha is either an exact rational (error bound 0) or a
fixed-point approximation mantissa/2^bits with certified error 2^-bits.
Symbolic inputs (sqrt:k, golden, pi-frac) are realized as fixed-point
once at construction; there is no lazy symbolic algebra.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from .errors import AlphaParseError, PreconditionError, PrecisionError

DEFAULT_BITS = 256
MAX_BITS = 4096

# |m| cap for dilation products and the certified-error guard threshold
_M_CAP = 1 << 62
_GUARD = 2.0 ** -40


@dataclass(frozen=True)
class AlphaValue:
    """A dilation factor in [0, 1) with a certified error bound.

    kind "rational": value is exactly num/den (reduced, 0 <= num < den).
    kind "fixed-point": value is mantissa/2^bits and the true real it
    realizes lies within 2^-bits of it.  `tag` records the symbolic
    origin, if any ("sqrt:2", "golden", "pi-frac").
    """

    kind: str
    num: int = 0
    den: int = 1
    mantissa: int = 0
    bits: int = 0
    tag: str | None = None

    def __post_init__(self):
        if self.kind == "rational":
            if self.den < 1:
                raise PreconditionError("rational denominator must be >= 1")
            if gcd(self.num, self.den) != 1 and self.num != 0:
                raise PreconditionError("rational alpha must be reduced")
            if not (0 <= self.num < self.den or (self.num == 0 and self.den == 1)):
                raise PreconditionError("rational alpha must lie in [0, 1)")
        elif self.kind == "fixed-point":
            if self.bits < 1 or self.bits > MAX_BITS:
                raise PreconditionError(f"fractional bits must be in [1, {MAX_BITS}]")
            if not 0 <= self.mantissa < (1 << self.bits):
                raise PreconditionError("fixed-point mantissa must lie in [0, 2^bits)")
        else:
            raise PreconditionError(f"unknown alpha kind {self.kind!r}")

    @property
    def error_bound(self) -> float:
        return 0.0 if self.kind == "rational" else 2.0 ** -self.bits

    @property
    def exact(self) -> Fraction:
        """The stored value as an exact fraction (not the realized real)."""
        if self.kind == "rational":
            return Fraction(self.num, self.den)
        return Fraction(self.mantissa, 1 << self.bits)

    def value(self) -> float:
        if self.kind == "rational":
            return self.num / self.den
        return self.mantissa / (1 << self.bits)

    def describe(self) -> str:
        if self.kind == "rational":
            return f"rational:{self.num}/{self.den}"
        base = self.tag or f"fixed:{self.mantissa}"
        return f"{base}@{self.bits}"


def alpha_rational(a: int, q: int) -> AlphaValue:
    """Exact rational dilation a/q, normalized into [0, 1)."""
    if q < 1:
        raise PreconditionError("denominator must be positive")
    a %= q
    g = gcd(a, q)
    return AlphaValue("rational", num=a // g, den=q // g)


def alpha_fixed(mantissa: int, bits: int, tag: str | None = None) -> AlphaValue:
    return AlphaValue("fixed-point", mantissa=mantissa % (1 << bits), bits=bits, tag=tag)


def alpha_sqrt(k: int, bits: int = DEFAULT_BITS) -> AlphaValue:
    """Fractional part of sqrt(k), realized by integer square root.

    Perfect squares collapse to the exact rational 0.
    """
    if k < 1:
        raise PreconditionError("sqrt argument must be a positive integer")
    r = isqrt(k)
    if r * r == k:
        return alpha_rational(0, 1)
    # floor(sqrt(k) * 2^bits); the floor error is < 2^-bits
    s = isqrt(k << (2 * bits))
    mant = s - (r << bits)
    return alpha_fixed(mant, bits, tag=f"sqrt:{k}")


def alpha_golden(bits: int = DEFAULT_BITS) -> AlphaValue:
    """(sqrt(5) - 1)/2, the fractional part of the golden ratio."""
    s = isqrt(5 << (2 * bits))
    mant = (s - (1 << bits)) >> 1
    return alpha_fixed(mant, bits, tag="golden")


def alpha_pi_frac(bits: int = DEFAULT_BITS) -> AlphaValue:
    """pi mod 1 realized to the requested precision via mpmath."""
    import mpmath

    with mpmath.workprec(bits + 64):
        mant = int(mpmath.floor((mpmath.pi - 3) * (1 << bits)))
    return alpha_fixed(mant, bits, tag="pi-frac")


def alpha_from_cf(digits: list[int]) -> AlphaValue:
    """Exact rational from continued-fraction digits [a0; a1, a2, ...].

    The leading digit is the integer part, which the mod-1 normalization
    discards; the remaining digits are the partial quotients proper.
    """
    if not digits or any(a < 1 for a in digits):
        raise PreconditionError("continued-fraction digits must be positive integers")
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    for a in digits[1:]:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    return alpha_rational(p, q)


_ALPHA_RE = {
    "rational": re.compile(r"^rational:(-?\d+)/(\d+)$"),
    "dec": re.compile(r"^dec:(\d+)\.(\d+)$"),
    "sqrt": re.compile(r"^sqrt:(\d+)(?:@(\d+))?$"),
    "golden": re.compile(r"^golden(?:@(\d+))?$"),
    "pi-frac": re.compile(r"^pi-frac(?:@(\d+))?$"),
    "cf": re.compile(r"^cf:(\d+(?:,\d+)*)$"),
}


def parse_alpha_spec(spec: str) -> AlphaValue:
    """Parse an alpha spec string.

    Grammar: "rational:a/q", "dec:0.1234", "sqrt:k", "golden", "pi-frac",
    "cf:a1,a2,...".  The fixed-point forms accept an optional "@bits"
    suffix (default 256, maximum 4096).
    """
    spec = spec.strip()
    head = spec.split(":", 1)[0].split("@", 1)[0]
    if head not in _ALPHA_RE:
        raise AlphaParseError(f"unknown alpha form {head!r}", 0)
    m = _ALPHA_RE[head].match(spec)
    if m is None:
        # point at the first character that breaks the expected shape
        probe = _ALPHA_RE[head]
        pos = next((i for i in range(len(spec), 0, -1) if probe.match(spec[:i] + "1")), len(head))
        raise AlphaParseError(f"malformed {head!r} spec {spec!r}", pos)

    def _bits(group: str | None) -> int:
        b = int(group) if group else DEFAULT_BITS
        if b > MAX_BITS:
            raise AlphaParseError(f"precision request {b} exceeds {MAX_BITS} bits", spec.index("@") + 1)
        if b < 8:
            raise AlphaParseError("precision request below 8 bits", spec.index("@") + 1)
        return b

    if head == "rational":
        return alpha_rational(int(m.group(1)), int(m.group(2)))
    if head == "dec":
        whole, frac = m.group(1), m.group(2)
        return alpha_rational(int(whole + frac), 10 ** len(frac))
    if head == "sqrt":
        return alpha_sqrt(int(m.group(1)), _bits(m.group(2)))
    if head == "golden":
        return alpha_golden(_bits(m.group(1)))
    if head == "pi-frac":
        return alpha_pi_frac(_bits(m.group(1)))
    return alpha_from_cf([int(t) for t in m.group(1).split(",")])


def signed_frac(x: float) -> float:
    """Signed distance from x to the nearest integer, in (-1/2, 1/2].

    Ties round up so that signed_frac(k + 1/2) == +1/2 for integer k.
    """
    if not math.isfinite(x):
        raise PreconditionError("signed_frac requires a finite input")
    r = x % 1.0
    if r >= 1.0:  # tiny negative x can round to 1.0
        r = 0.0
    return r if r <= 0.5 else r - 1.0


def frac_dilate(alpha: AlphaValue, m: int) -> float:
    """Signed fractional part of alpha*m with certified error.

    Exact for rational alpha (integer arithmetic on num*m mod den).
    For fixed-point alpha the absolute error is at most
    alpha.error_bound * |m|, which must stay below 2^-40.
    """
    if abs(m) > _M_CAP:
        raise PreconditionError(f"|m| exceeds 2^62: {m}")
    if alpha.kind == "rational":
        r = (alpha.num * m) % alpha.den
        return (r - alpha.den) / alpha.den if 2 * r > alpha.den else r / alpha.den
    if abs(m) >= (1 << (alpha.bits - 40)):
        raise PrecisionError(
            f"error bound 2^-{alpha.bits} * |{m}| exceeds 2^-40; "
            "rebuild alpha with more fractional bits"
        )
    scale = 1 << alpha.bits
    t = (alpha.mantissa * m) % scale
    if 2 * t > scale:
        t -= scale
    return t / scale


def legendre_symbol(a: int, q: int) -> int:
    """Legendre symbol (a/q) for an odd prime q, by Euler's criterion."""
    if q <= 2 or not is_prime(q):
        raise PreconditionError(f"q={q} is not an odd prime")
    r = pow(a % q, (q - 1) // 2, q)
    return r - q if r > 1 else r


def gauss_sum(j: int, q: int) -> complex:
    """Quadratic Gauss sum sum_x exp(2 pi i j x^2 / q) for odd prime q.

    Closed form: q when q | j, otherwise (j/q) * eps_q * sqrt(q) with
    eps_q = 1 for q = 1 mod 4 and eps_q = i for q = 3 mod 4.
    """
    if q <= 2 or not is_prime(q):
        raise PreconditionError(f"q={q} is not an odd prime")
    if j % q == 0:
        return complex(q)
    eps = 1.0 if q % 4 == 1 else 1.0j
    return legendre_symbol(j, q) * eps * math.sqrt(q)


def gauss_sum_direct(j: int, q: int) -> complex:
    """Direct summation reference for gauss_sum, O(q)."""
    import numpy as np

    if q <= 2 or not is_prime(q):
        raise PreconditionError(f"q={q} is not an odd prime")
    res = (j * np.arange(q, dtype=np.int64) ** 2) % q
    return complex(np.exp(2j * np.pi * res / q).sum())


_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, correct for all n < 2^63."""
    if n >= (1 << 63):
        raise PreconditionError("primality test limited to 63-bit inputs")
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_in(lo: int, hi: int) -> list[int]:
    """All primes in [lo, hi], increasing, via a segmented sieve."""
    import numpy as np

    if hi >= (1 << 63):
        raise PreconditionError("prime range limited to 63-bit inputs")
    if hi < lo or hi < 2:
        return []
    lo = max(lo, 2)
    if hi - lo > 200_000_000:
        raise PreconditionError("prime range too wide to sieve")
    root = isqrt(hi)
    base = np.ones(root + 1, dtype=bool)
    base[:2] = False
    for p in range(2, isqrt(root) + 1):
        if base[p]:
            base[p * p :: p] = False
    small = np.flatnonzero(base)
    seg = np.ones(hi - lo + 1, dtype=bool)
    for p in small:
        p = int(p)
        start = max(p * p, ((lo + p - 1) // p) * p)
        if start <= hi:
            seg[start - lo :: p] = False
    return [int(v) for v in np.flatnonzero(seg) + lo]


def mod_inverse(a: int, q: int) -> int:
    """Inverse of a modulo prime q, in [1, q-1]."""
    if a % q == 0:
        raise PreconditionError(f"{a} is divisible by {q}; no inverse")
    return pow(a, -1, q)
