"""Dilated point sets, discrepancy, window-count moments, and the random model.

The central object is the sorted set of fractional parts {alpha * n^d}
for n = 1..N.  Window statistics integrate the count of points in a
sliding arc of length L/N exactly, by an event sweep over the at most
2N breakpoints of the piecewise-constant count function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .numeric import AlphaValue

_SIM_CHUNK = 4096


@dataclass(frozen=True)
class Provenance:
    alpha: AlphaValue
    d: int
    N: int


@dataclass(frozen=True)
class PointSet:
    """Sorted points in [0, 1), optionally tagged with their dilation origin."""

    points: np.ndarray
    provenance: Provenance | None = None

    @property
    def n(self) -> int:
        return len(self.points)

    @staticmethod
    def from_values(values, provenance: Provenance | None = None) -> "PointSet":
        pts = np.sort(np.asarray(values, dtype=np.float64))
        if len(pts) == 0:
            raise PreconditionError("point set must be nonempty")
        if pts[0] < 0.0 or pts[-1] >= 1.0:
            raise PreconditionError("points must lie in [0, 1)")
        pts.flags.writeable = False
        return PointSet(pts, provenance)


def dilated_points(alpha: AlphaValue, d: int, N: int) -> PointSet:
    """Sorted fractional parts of alpha * n^d for n = 1..N.

    Exact for rational alpha; for fixed-point alpha each point carries a
    certified error of at most alpha.error_bound * N^d, enforced by the
    same guard as frac_dilate.
    """
    if d < 1 or N < 1:
        raise PreconditionError("need d >= 1 and N >= 1")
    top = N**d
    if top > (1 << 62):
        raise PreconditionError("N^d exceeds 2^62")
    vals = np.empty(N, dtype=np.float64)
    if alpha.kind == "rational":
        num, den = alpha.num, alpha.den
        for n in range(1, N + 1):
            vals[n - 1] = ((num * n**d) % den) / den
    else:
        if top >= (1 << (alpha.bits - 40)):
            raise PreconditionError(
                f"precision guard: 2^-{alpha.bits} * N^d not below 2^-40; "
                "rebuild alpha with more fractional bits"
            )
        mant, scale = alpha.mantissa, 1 << alpha.bits
        for n in range(1, N + 1):
            vals[n - 1] = ((mant * n**d) % scale) / scale
    vals[vals >= 1.0] = 0.0  # guard against float rounding at the top edge
    return PointSet.from_values(vals, Provenance(alpha, d, N))


def discrepancy(ps: PointSet) -> float:
    """Two-sided (extreme) discrepancy of a point set in [0, 1).

    Sorted-order formula: D = 1/n + max_i(i/n - x_(i)) - min_i(i/n - x_(i)),
    the exact sup over subintervals of |count/n - length|.
    """
    x = ps.points
    n = len(x)
    grid = np.arange(1, n + 1, dtype=np.float64) / n
    diffs = grid - x
    return 1.0 / n + float(diffs.max()) - float(diffs.min())


def window_moment(ps: PointSet, L: float, k: int) -> float:
    """Exact k-th moment of the count of points in a random arc of length L/n.

    W(y) = #{i : x_i in [y, y+L/n) mod 1} is piecewise constant; its
    breakpoints are the point positions (exits) and the positions x_i - L/n
    mod 1 (entries).  The integral of W^k over y in [0,1) is accumulated
    with exact compensated summation.
    """
    n = ps.n
    if not 0 < L <= n:
        raise PreconditionError(f"L must lie in (0, n]; got L={L}, n={n}")
    if k < 1:
        raise PreconditionError("moment order must be >= 1")
    ell = L / n
    x = ps.points
    if ell >= 1.0:
        return float(n) ** k
    entries = (x - ell) % 1.0
    entries[entries >= 1.0] = 0.0
    pos = np.concatenate([entries, x])
    delta = np.concatenate([np.ones(n, dtype=np.int64), -np.ones(n, dtype=np.int64)])
    order = np.argsort(pos, kind="stable")
    pos, delta = pos[order], delta[order]

    w = int(np.count_nonzero(x < ell))  # W(0): the arc [0, ell)
    terms = []
    prev = 0.0
    i = 0
    while i < len(pos):
        p = pos[i]
        if p > prev:
            terms.append(float(w) ** k * (p - prev))
            prev = p
        # fold all events at identical positions into one level change
        dw = 0
        while i < len(pos) and pos[i] == p:
            dw += delta[i]
            i += 1
        w += int(dw)
    terms.append(float(w) ** k * (1.0 - prev))
    return math.fsum(terms)


@dataclass(frozen=True)
class WindowStats:
    """Window-count moments E W^k for k = 1..k_max at one scale L."""

    L: float
    moments: tuple[float, ...]  # moments[j-1] = E W^j

    def __post_init__(self):
        if abs(self.moments[0] - self.L) > 1e-9 * max(1.0, abs(self.L)):
            raise PreconditionError("first window moment must equal L")


def window_stats(ps: PointSet, L: float, k_max: int) -> WindowStats:
    return WindowStats(L, tuple(window_moment(ps, L, k) for k in range(1, k_max + 1)))


def stirling2(k: int) -> list[int]:
    """Stirling numbers of the second kind S(k, j) for j = 0..k, exact."""
    row = [1]
    for _ in range(k):
        prev = row
        row = [0] * (len(prev) + 1)
        for j in range(1, len(row)):
            row[j] = j * prev[j] if j < len(prev) else 0
            row[j] += prev[j - 1]
    return row


def poisson_moment_coefficients(k: int) -> list[int]:
    """Coefficients c_j with E X^k = sum_j c_j L^j for X ~ Po(L).

    These are the Stirling numbers of the second kind (Touchard's formula).
    """
    if not 1 <= k <= 30:
        raise PreconditionError("poisson moment order limited to 1..30")
    return stirling2(k)


def poisson_moment(L: float, k: int) -> float:
    """k-th raw moment of a Poisson(L) variable."""
    coeffs = poisson_moment_coefficients(k)
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * L + c
    return acc


@dataclass(frozen=True)
class SimulationResult:
    """Empirical law of the random-model window count."""

    N: int
    L: float
    samples: int
    seed: int
    counts: np.ndarray  # counts[k] = #realizations with window count k
    moments: tuple[float, float, float, float]

    @property
    def pmf(self) -> np.ndarray:
        return self.counts / self.samples

    def tv_distance_poisson(self, lam: float | None = None) -> float:
        """Total-variation distance between the empirical law and Po(L)."""
        lam = self.L if lam is None else lam
        kmax = max(len(self.counts), int(10 * lam) + 20)
        ks = np.arange(kmax)
        logp = ks * math.log(lam) - lam - np.array([math.lgamma(v + 1) for v in ks])
        p = np.exp(logp)
        emp = np.zeros(kmax)
        emp[: len(self.counts)] = self.pmf
        # mass of Po(L) beyond kmax is below 1e-16 for the scales used here
        return 0.5 * float(np.abs(emp - p).sum() + max(0.0, 1.0 - p.sum()))


def simulate_counts(N: int, L: float, samples: int, seed: int) -> SimulationResult:
    """Sample the window count of N uniform points in a uniform arc of length L/N.

    Conditioned on the arc position Y, each of the N i.i.d. uniform points
    lands in the arc independently with probability L/N, so the count of a
    single realization is exactly Binomial(N, L/N); realizations are drawn
    directly from that law.  Sampling is split into fixed chunks of 4096
    realizations, chunk j using a counter-based Philox stream keyed by
    (seed, j), so results are identical for any worker count.
    """
    if samples < 1:
        raise PreconditionError("need at least one sample")
    if not 0 < L <= N:
        raise PreconditionError("L must lie in (0, N]")
    p = L / N
    out = np.empty(samples, dtype=np.int64)
    for j in range(0, samples, _SIM_CHUNK):
        key = np.array([seed, j // _SIM_CHUNK], dtype=np.uint64)
        rng = np.random.Generator(np.random.Philox(key=key))
        out[j : j + _SIM_CHUNK] = rng.binomial(N, p, size=min(_SIM_CHUNK, samples - j))
    counts = np.bincount(out)
    zf = out.astype(np.float64)
    moments = tuple(float(np.mean(zf**k)) for k in range(1, 5))
    return SimulationResult(N, L, samples, seed, counts, moments)
