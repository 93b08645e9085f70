"""Continued fractions, prime-denominator approximation, partial-quotient sums.

Continued fractions of fixed-point values are expanded only as far as the
certified error allows: a quotient is emitted only if both endpoints of
the error interval agree on it, so no emitted digit can be changed by
recomputing alpha at higher precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from .errors import BudgetError, PreconditionError
from .numeric import AlphaValue, frac_dilate, is_prime, primes_in


@dataclass(frozen=True)
class ContinuedFraction:
    """Partial quotients a_1, a_2, ... and convergents p_i/q_i of a value in [0, 1)."""

    quotients: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]
    exact: bool  # False when truncated by the certified-error stopping rule

    def __post_init__(self):
        qs = [q for _, q in self.convergents]
        for i in range(2, len(qs)):
            if qs[i] <= qs[i - 1]:
                raise PreconditionError("convergent denominators must increase")


def _cf_digits_exact(frac: Fraction, max_terms: int) -> list[int]:
    digits = []
    num, den = frac.numerator, frac.denominator
    while num and len(digits) < max_terms:
        # x = num/den in (0,1): next digit is floor(den/num)
        a, rem = divmod(den, num)
        digits.append(a)
        num, den = rem, num
    return digits


def continued_fraction(alpha: AlphaValue, max_terms: int = 64) -> ContinuedFraction:
    """Continued fraction of alpha (a value in [0, 1)).

    Rational alpha expands exactly by the Euclidean algorithm.  Fixed-point
    alpha expands the interval [v - e, v + e] with e = 2^-bits and stops
    before the first digit on which the endpoints disagree.
    """
    if max_terms < 1:
        raise PreconditionError("max_terms must be >= 1")
    if alpha.kind == "rational":
        digits = _cf_digits_exact(alpha.exact, max_terms)
        exact = True
    else:
        e = Fraction(1, 1 << alpha.bits)
        lo, hi = alpha.exact - e, alpha.exact + e
        digits = []
        while len(digits) < max_terms:
            if lo <= 0 or hi >= 1:
                break
            alo, ahi = int(1 / hi), int(1 / lo)  # digits of the two endpoints
            if alo != ahi or alo < 1:
                break
            digits.append(alo)
            lo, hi = 1 / hi - alo, 1 / lo - alo
            lo, hi = min(lo, hi), max(lo, hi)
        exact = False
    convergents = []
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    for a in digits:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        convergents.append((p, q))
    return ContinuedFraction(tuple(digits), tuple(convergents), exact)


@dataclass(frozen=True)
class RationalApprox:
    """A reduced rational a/q approximating alpha, with certified error."""

    a: int
    q: int
    err: float  # |alpha - a/q| up to alpha's certified error
    q_prime: bool

    def __post_init__(self):
        if self.q < 1 or gcd(self.a, self.q) != 1:
            raise PreconditionError("approximation must be reduced with q >= 1")


def _dist_to_rational(alpha: AlphaValue, a: int, q: int) -> float:
    """|alpha - a/q| for the stored value, exact rational arithmetic."""
    return float(abs(alpha.exact - Fraction(a, q)))


def prime_denominator_approx(alpha: AlphaValue, N: int, eta: float) -> RationalApprox | None:
    """Smallest prime q in [N, 2N] with ||q alpha|| < N^-(1-eta), if any.

    Returns the reduced a/q with a = round(q * alpha); None when no prime
    in the window qualifies (possible for specific alpha, e.g. rationals
    with small denominator).  A qualifying q with round(q*alpha) = 0 mod q
    is skipped since it admits no reduced numerator coprime to q.
    """
    if N < 2:
        raise PreconditionError("N must be >= 2")
    if not 0 < eta < 1:
        raise PreconditionError("eta must lie in (0, 1)")
    threshold = N ** (-(1.0 - eta))
    for q in primes_in(N, 2 * N):
        dist = abs(frac_dilate(alpha, q))
        if dist < threshold:
            a = round(q * alpha.value())
            if a % q == 0:
                continue
            g = gcd(a, q)
            return RationalApprox(a // g, q // g, _dist_to_rational(alpha, a, q), True)
    return None


def partial_quotient_sum(alpha: AlphaValue, N: int) -> tuple[int, int]:
    """(i(N), A_N): index of the largest convergent denominator q_i <= N,
    and the sum of the partial quotients a_1 .. a_i.

    Indexing follows the convergents p_i/q_i, i >= 1, of the continued
    fraction of alpha; i(N) = 0 with empty sum when already q_1 > N.
    """
    if N < 1:
        raise PreconditionError("N must be >= 1")
    # denominators grow at least like Fibonacci: ~1.62^i terms suffice
    need = max(8, int(1.5 * N.bit_length() / 0.69) + 4)
    cf = continued_fraction(alpha, max_terms=need)
    i = 0
    for idx, (_, q) in enumerate(cf.convergents, start=1):
        if q <= N:
            i = idx
        else:
            break
    else:
        if not cf.exact and (not cf.convergents or cf.convergents[-1][1] <= N):
            raise BudgetError("certified precision exhausted before q_i exceeded N")
    return i, sum(cf.quotients[:i])


def squarefree_part(q: int) -> int:
    """Product of the primes dividing q to an odd power."""
    if q < 1:
        raise PreconditionError("q must be a positive integer")
    if q > 1 << 50:
        raise BudgetError("squarefree_part limited to q <= 2^50")
    result = 1
    n = q
    # strip small prime powers; what survives trial division past n^(1/3)
    # is 1, a prime, a prime square, or a product of two distinct primes
    p = 2
    while p * p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            if e % 2 == 1:
                result *= p
        p += 1 if p == 2 else 2
    if n > 1:
        r = isqrt(n)
        if r * r == n:
            pass  # square of a prime: contributes nothing
        elif is_prime(n):
            result *= n
        else:
            # product of two distinct primes p1*p2, both > n^(1/3)
            result *= n
    return result
