"""Modular counting engine over (Z/q)^2 for odd primes q.

Counts triples (x, y, z) with x^2 - y^2 = c1 and y^2 - z^2 = c2 (mod q),
truncated to [1, M]^3 (tables A) or over the full field (tables A0), the
normalized error terms Delta and Delta*, their variance sums, the
six-variable exponential sums S(b, q), the approximation-weight counts f,
and the D / bad-set machinery built on top of Delta*.

Exact evaluation strategy, cross-checked three ways throughout the tests:

* A0 per cell has a closed form.  Writing H(c1, c2) for the character sum
  sum_{l=2}^{q-1} (l(l-1)(l c2 + c1) / q) over the Legendre symbol,

      A0(q, c1, c2) = q - 3 + q*[q|c1] + q*[q|c2] + q*[q|c1+c2] + H(c1, c2)

  which specializes to 4q-3 at (0,0), to 2q-3-((-c2)/q) when q|c1, to
  2q-3-((c1)/q) when q|c2, and to 2q-3-((c2)/q) on the anti-diagonal.
  The additive constants -3 (degenerate and non-degenerate) are calibrated
  against brute-force enumeration at q = 3 and verified for all q <= 23.

* S(b, q) decomposes by the frequency pairs (j, k) of the two congruence
  constraints into Gauss-sum blocks (j=0, k=0, j=k) plus a generic block
  q(q-1)R - q(q-2-R), where R counts l in [2, q-1] with
  nu(l) = l^2(b6^2-b3^2) + l(b1^2-b2^2+b3^2-b4^2+b5^2-b6^2) + (b4^2-b1^2)
  vanishing mod q.  The fast path is O(q); two brute oracles back it.

All table reductions are integer-exact, so results are independent of
evaluation order and worker count.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, PreconditionError, VerificationError
from .numeric import is_prime, mod_inverse

_SPARSE_KEY_CAP = 2 * 10**8
_GRID_Q_CAP = 3000
_DELTA_STAR_M_CAP = 5000


def _check_odd_prime(q: int):
    if q <= 2 or not is_prime(q):
        raise PreconditionError(f"q={q} is not an odd prime")


@functools.lru_cache(maxsize=64)
def legendre_table(q: int) -> np.ndarray:
    """chi[t] = Legendre symbol (t/q) for t = 0..q-1, int8."""
    _check_odd_prime(q)
    chi = -np.ones(q, dtype=np.int8)
    sq = (np.arange(q, dtype=np.int64) ** 2) % q
    chi[sq] = 1
    chi[0] = 0
    return chi


def square_root_counts(q: int, M: int) -> np.ndarray:
    """table[r] = #{1 <= m <= M : m^2 = r (mod q)}."""
    _check_odd_prime(q)
    if not 1 <= M <= q:
        raise PreconditionError("need 1 <= M <= q")
    m = np.arange(1, M + 1, dtype=np.int64)
    return np.bincount((m * m) % q, minlength=q).astype(np.int64)


def count_A(q: int, M: int, c1: int, c2: int) -> int:
    """#{(x,y,z) in [1,M]^3 : x^2-y^2 = c1, y^2-z^2 = c2 (mod q)}."""
    cnt = square_root_counts(q, M)
    y2 = (np.arange(1, M + 1, dtype=np.int64) ** 2) % q
    return int(np.sum(cnt[(y2 + c1) % q] * cnt[(y2 - c2) % q]))


def count_A_brute(q: int, M: int, c1: int, c2: int) -> int:
    """Full-enumeration oracle for count_A, O(M^3); M <= 50."""
    if M > 50:
        raise BudgetError("brute count_A limited to M <= 50")
    c1 %= q
    c2 %= q
    total = 0
    for x in range(1, M + 1):
        for y in range(1, M + 1):
            if (x * x - y * y) % q != c1:
                continue
            for z in range(1, M + 1):
                if (y * y - z * z) % q == c2:
                    total += 1
    return total


def _a_keys(q: int, M: int) -> np.ndarray:
    """Flat cell keys c1*q + c2 of all M^3 triples, in y-major chunks."""
    if M**3 > _SPARSE_KEY_CAP:
        raise BudgetError(f"A-table construction at M={M} exceeds the key budget")
    sq = (np.arange(1, M + 1, dtype=np.int64) ** 2) % q
    chunks = []
    for y in range(M):
        c1 = (sq - sq[y]) % q
        c2 = (sq[y] - sq) % q
        chunks.append((c1[:, None] * q + c2[None, :]).ravel())
    return np.concatenate(chunks)


def count_A_sparse(q: int, M: int):
    """Support cells and counts of the truncated table: (flat_keys, counts)."""
    keys = _a_keys(q, M)
    if q * q <= 4 * len(keys):
        dense = np.bincount(keys, minlength=q * q)
        support = np.flatnonzero(dense)
        return support, dense[support]
    support, counts = np.unique(keys, return_counts=True)
    return support, counts


def count_A_grid(q: int, M: int) -> np.ndarray:
    """Dense (q, q) truncated table; sum of entries is M^3."""
    if q > _GRID_Q_CAP:
        raise BudgetError(f"dense grids limited to q <= {_GRID_Q_CAP}")
    keys = _a_keys(q, M)
    return np.bincount(keys, minlength=q * q).reshape(q, q).astype(np.int64)


def count_A0_brute(q: int, c1: int, c2: int) -> int:
    """Exact A0 by counting square roots along y, O(q) per cell; q <= 499."""
    if q > 499:
        raise BudgetError("count_A0_brute limited to q <= 499")
    _check_odd_prime(q)
    rsq = square_root_counts(q, q)
    y2 = (np.arange(1, q + 1, dtype=np.int64) ** 2) % q
    return int(np.sum(rsq[(y2 + c1) % q] * rsq[(y2 - c2) % q]))


def count_A0_naive(q: int, c1: int, c2: int) -> int:
    """Triple-loop oracle, O(q^3); q <= 31."""
    if q > 31:
        raise BudgetError("naive A0 limited to q <= 31")
    c1 %= q
    c2 %= q
    total = 0
    for x in range(q):
        for y in range(q):
            if (x * x - y * y) % q != c1:
                continue
            for z in range(q):
                if (y * y - z * z) % q == c2:
                    total += 1
    return total


def count_A0_closed(q: int, c1: int, c2: int) -> int:
    """Closed-form A0 by case analysis (see module docstring)."""
    _check_odd_prime(q)
    chi = legendre_table(q)
    c1 %= q
    c2 %= q
    if c1 == 0 and c2 == 0:
        return 4 * q - 3
    if c1 == 0:
        return 2 * q - 3 - int(chi[(-c2) % q])
    if c2 == 0:
        return 2 * q - 3 - int(chi[c1])
    if (c1 + c2) % q == 0:
        return 2 * q - 3 - int(chi[c2])
    l = np.arange(2, q, dtype=np.int64)
    arg = (l * (l - 1)) % q * ((l * c2 + c1) % q) % q
    h = int(np.sum(chi[arg]))
    return q - 3 + h


@functools.lru_cache(maxsize=16)
def a0_closed_grid(q: int) -> np.ndarray:
    """Dense (q, q) table of closed-form A0 values.

    The character sum H is evaluated for all cells at once: for fixed
    c2 != 0 it is a circular cross-correlation in c1 of the reindexed
    weight l(l-1) values against the Legendre table, done by FFT and
    rounded back to exact integers.
    """
    _check_odd_prime(q)
    if q > _GRID_Q_CAP:
        raise BudgetError(f"dense grids limited to q <= {_GRID_Q_CAP}")
    chi = legendre_table(q).astype(np.float64)
    l = np.arange(q, dtype=np.int64)
    w = legendre_table(q)[(l * (l - 1)) % q].astype(np.float64)  # zero at l = 0, 1

    c2s = np.arange(1, q, dtype=np.int64)
    invs = np.array([mod_inverse(int(c), q) for c in c2s], dtype=np.int64)
    # w'[c2, m] = w[m * inv(c2) mod q]; H(c1, c2) = sum_m w'[m] chi[(m + c1) mod q]
    idx = (invs[:, None] * l[None, :]) % q
    wprime = w[idx]
    fw = np.fft.fft(wprime, axis=1)
    fchi = np.fft.fft(chi)
    corr = np.fft.ifft(np.conj(fw) * fchi[None, :], axis=1).real
    hgrid = np.empty((q, q), dtype=np.int64)
    hcols = np.rint(corr).astype(np.int64)
    if np.max(np.abs(corr - hcols)) > 1e-6:
        raise VerificationError("FFT evaluation of the A0 character sum lost integrality")
    hgrid[:, 1:] = hcols.T
    hgrid[:, 0] = -legendre_table(q).astype(np.int64)  # H(c1, 0) = -(c1/q)

    c = np.arange(q, dtype=np.int64)
    ind = (c[:, None] == 0).astype(np.int64) + (c[None, :] == 0) + ((c[:, None] + c[None, :]) % q == 0)
    return q - 3 + q * ind + hgrid


@functools.lru_cache(maxsize=16)
def sum_a0_squared(q: int) -> int:
    """sum over all (c1,c2) of A0^2; equals q^4 + 3q^3 - 3q^2 + q(q-1)(q-2)."""
    grid = a0_closed_grid(q)
    total = int(np.sum(grid.astype(np.int64) ** 2))
    poly = q**4 + 3 * q**3 - 3 * q**2 + q * (q - 1) * (q - 2)
    if total != poly:
        raise VerificationError(f"A0 square-sum {total} disagrees with closed form {poly}")
    return total


def delta(q: int, M: int, c1: int, c2: int) -> float:
    """|A(M,q,c1,c2) - (M/q)^3 A0(q,c1,c2)| with closed-form A0."""
    if not 1 <= M <= q:
        raise PreconditionError("need 1 <= M <= q")
    return abs(count_A(q, M, c1, c2) - (M / q) ** 3 * count_A0_closed(q, c1, c2))


def delta_sq_sum(q: int, M: int) -> float:
    """sum over all q^2 cells of delta^2.

    Uses the sparse truncated table on its support; the A = 0 complement
    contributes (M/q)^6 * (sum_all A0^2 - sum_support A0^2), with the full
    square sum taken once per q from the closed form.
    """
    if not 1 <= M <= q:
        raise PreconditionError("need 1 <= M <= q")
    support, acnt = count_A_sparse(q, M)
    a0 = a0_closed_grid(q).reshape(-1)[support].astype(np.float64)
    t = (M / q) ** 3
    s_support = float(np.sum((acnt.astype(np.float64) - t * a0) ** 2))
    a0sq_support = int(np.sum(a0_closed_grid(q).reshape(-1)[support].astype(np.int64) ** 2))
    return s_support + t * t * (sum_a0_squared(q) - a0sq_support)


@dataclass(frozen=True)
class CongruenceTable:
    """Per-(c1, c2) table over (Z/q)^2 for one odd prime q."""

    q: int
    M: int
    kind: str  # "A", "A0", "delta", "delta-star"
    entries: np.ndarray  # (q, q); integer kinds int64, delta kinds float64

    def checksum(self) -> int:
        if self.entries.dtype == np.int64:
            return int(self.entries.sum(dtype=object)) % (1 << 64)
        bits = self.entries.astype(np.float64).reshape(-1).view(np.uint64)
        return int(bits.sum(dtype=object)) % (1 << 64)

    @property
    def dense_serialization(self) -> bool:
        return self.kind == "A0"

    def rows(self):
        q = self.q
        if self.dense_serialization:
            for c1 in range(q):
                for c2 in range(q):
                    yield c1, c2, self.entries[c1, c2]
        else:
            nz = np.argwhere(self.entries != 0)
            for c1, c2 in nz:
                yield int(c1), int(c2), self.entries[c1, c2]

    def sidecar(self) -> dict:
        return {"q": self.q, "M": self.M, "kind": self.kind, "checksum": self.checksum()}


def a_table(q: int, M: int) -> CongruenceTable:
    return CongruenceTable(q, M, "A", count_A_grid(q, M))


def a0_table(q: int) -> CongruenceTable:
    return CongruenceTable(q, q, "A0", a0_closed_grid(q))


def delta_table(q: int, M: int) -> CongruenceTable:
    """Dense table of |A - (M/q)^3 A0| over all cells."""
    a = count_A_grid(q, M).astype(np.float64)
    a0 = a0_closed_grid(q).astype(np.float64)
    return CongruenceTable(q, M, "delta", np.abs(a - (M / q) ** 3 * a0))


def delta_star_budget(q: int, beta: float) -> int:
    if not 0 < beta < 0.75:
        raise PreconditionError("beta must lie in (0, 3/4)")
    return math.floor(q ** (2.0 / (2.0 + beta)))


def delta_star_table(q: int, beta: float) -> CongruenceTable:
    """Per-cell maximum of delta(M, q, c1, c2) over M = 1..floor(q^(2/(2+beta))).

    Incremental in M: each step touches only the cells whose truncated
    count changes.  Between touch points a cell's count is constant while
    (M/q)^3 A0 increases, so |A - (M/q)^3 A0| is V-shaped and attains its
    maximum at the interval endpoints; those are exactly the evaluation
    points (just before a change, just after it, and the final M).
    """
    mmax = delta_star_budget(q, beta)
    if mmax > _DELTA_STAR_M_CAP:
        raise BudgetError(f"delta-star budget {mmax} exceeds {_DELTA_STAR_M_CAP}")
    if q > _GRID_Q_CAP:
        raise BudgetError(f"dense grids limited to q <= {_GRID_Q_CAP}")
    a0 = a0_closed_grid(q).astype(np.float64).reshape(-1)
    acc = np.zeros(q * q, dtype=np.int64)
    best = np.zeros(q * q, dtype=np.float64)
    sq = (np.arange(0, mmax + 1, dtype=np.int64) ** 2) % q

    for m in range(1, mmax + 1):
        y = sq[1 : m + 1]
        sm = sq[m]
        # triples with max coordinate m, split into three disjoint faces
        k1 = (((sm - y) % q)[:, None] * q + ((y[:, None] - sq[1 : m + 1][None, :]) % q)).ravel()
        if m > 1:
            xs = sq[1:m]
            k2 = (((xs - sm) % q)[:, None] * q + ((sm - sq[1 : m + 1]) % q)[None, :]).ravel()
            ys = sq[1:m]
            k3 = (((sq[1:m][:, None] - ys[None, :]) % q) * q + ((ys[None, :] - sm) % q)).ravel()
            keys = np.concatenate([k1, k2, k3])
        else:
            keys = k1
        cells, inc = np.unique(keys, return_counts=True)
        tprev = ((m - 1) / q) ** 3
        best[cells] = np.maximum(best[cells], np.abs(acc[cells] - tprev * a0[cells]))
        acc[cells] += inc
        tcur = (m / q) ** 3
        best[cells] = np.maximum(best[cells], np.abs(acc[cells] - tcur * a0[cells]))
    tfin = (mmax / q) ** 3
    np.maximum(best, np.abs(acc - tfin * a0), out=best)
    return CongruenceTable(q, mmax, "delta-star", best.reshape(q, q))


def delta_star_table_naive(q: int, beta: float) -> CongruenceTable:
    """Recompute-at-every-M oracle for delta_star_table (small q only)."""
    mmax = delta_star_budget(q, beta)
    a0 = a0_closed_grid(q).astype(np.float64)
    best = np.zeros((q, q), dtype=np.float64)
    for m in range(1, mmax + 1):
        a = count_A_grid(q, m).astype(np.float64)
        np.maximum(best, np.abs(a - (m / q) ** 3 * a0), out=best)
    return CongruenceTable(q, mmax, "delta-star", best)


# ---------------------------------------------------------------------------
# six-variable exponential sums


def _as_b6(b) -> tuple:
    b = tuple(int(v) for v in b)
    if len(b) != 6:
        raise PreconditionError("b must have six components")
    return b


def exp_sum_S(b, q: int, verify: bool = False) -> complex:
    """S(b, q): the b-twisted count of pairs of triples with equal differences.

    S(b,q) = sum over (x,y,z,x',y',z') in [1,q]^6 with
    x^2-y^2 = x'^2-y'^2 and y^2-z^2 = y'^2-z'^2 (mod q) of
    e_q(b . (x,y,z,x',y',z')).  Exact O(q) evaluation via the block
    decomposition in the module docstring; always a real integer because
    the solution set is symmetric under negation of all six variables.

    With verify=True the value is cross-checked against the O(q^2)
    frequency-grid oracle (and the full six-fold enumeration for q <= 7).
    """
    _check_odd_prime(q)
    if q > 10**4:
        raise BudgetError("exp_sum_S limited to q <= 1e4")
    b = _as_b6(b)
    br = [v % q for v in b]
    bsq = [v * v % q for v in br]
    total = 0
    if all(v == 0 for v in br):
        total += q**4
    m1 = (-bsq[1] + bsq[2] + bsq[4] - bsq[5]) % q
    m2 = (-bsq[0] + bsq[1] + bsq[3] - bsq[4]) % q
    m3 = (-bsq[0] + bsq[2] + bsq[3] - bsq[5]) % q
    if br[0] == 0 and br[3] == 0:
        total += q * q * ((q if m1 == 0 else 0) - 1)
    if br[2] == 0 and br[5] == 0:
        total += q * q * ((q if m2 == 0 else 0) - 1)
    if br[1] == 0 and br[4] == 0:
        total += q * q * ((q if m3 == 0 else 0) - 1)
    # generic frequencies: nu(l) = l^2 (b6^2-b3^2) + l (b1^2-b2^2+b3^2-b4^2+b5^2-b6^2)
    #                              + (b4^2-b1^2)
    c2 = (bsq[5] - bsq[2]) % q
    c1 = (bsq[0] - bsq[1] + bsq[2] - bsq[3] + bsq[4] - bsq[5]) % q
    c0 = (bsq[3] - bsq[0]) % q
    l = np.arange(2, q, dtype=np.int64)
    r = int(np.count_nonzero((c2 * l * l + c1 * l + c0) % q == 0))
    total += q * (q - 1) * r - q * (q - 2 - r)
    val = complex(total)
    if verify:
        ref = exp_sum_S_jk_oracle(b, q)
        if abs(val - ref) > 1e-6 * q**3:
            raise VerificationError(f"exp_sum_S fast path {val} vs jk oracle {ref}")
        if q <= 7:
            ref6 = exp_sum_S_enum(b, q)
            if abs(val - ref6) > 1e-6 * q**3:
                raise VerificationError(f"exp_sum_S fast path {val} vs enumeration {ref6}")
    return val


@functools.lru_cache(maxsize=16)
def _inverse_table(q: int) -> np.ndarray:
    inv = np.zeros(q, dtype=np.int64)
    for t in range(1, q):
        inv[t] = pow(t, q - 2, q)
    return inv


def exp_sum_S_jk_oracle(b, q: int) -> complex:
    """O(q^2) oracle: expand both congruences in frequencies (j, k) and use
    the one-variable quadratic Gauss sum closed form per factor."""
    _check_odd_prime(q)
    b = _as_b6(b)
    chi = legendre_table(q).astype(np.complex128)
    inv = _inverse_table(q)
    eps = 1.0 if q % 4 == 1 else 1.0j
    root = math.sqrt(q)
    e = np.exp(2j * np.pi * np.arange(q) / q)

    def sigma(a_coef: np.ndarray, b_lin: int) -> np.ndarray:
        # sum_t e_q(a t^2 + b t): q * [q | b] when a = 0, else
        # e_q(-b^2 / (4a)) (a/q) eps sqrt(q)
        out = np.empty(a_coef.shape, dtype=np.complex128)
        zero = a_coef % q == 0
        out[zero] = q if b_lin % q == 0 else 0.0
        anz = a_coef[~zero] % q
        shift = (-(b_lin * b_lin) % q) * inv[(4 * anz) % q] % q
        out[~zero] = e[shift] * chi[anz] * eps * root
        return out

    j = np.arange(q)[:, None] * np.ones(q, dtype=np.int64)[None, :]
    k = np.ones(q, dtype=np.int64)[:, None] * np.arange(q)[None, :]
    prod = sigma(j, b[0])
    prod = prod * sigma(k - j, b[1])
    prod = prod * sigma(-k, b[2])
    prod = prod * sigma(-j, b[3])
    prod = prod * sigma(j - k, b[4])
    prod = prod * sigma(k, b[5])
    return complex(prod.sum() / (q * q))


def exp_sum_S_enum(b, q: int) -> complex:
    """Literal six-fold enumeration, O(q^6); q <= 7."""
    if q > 7:
        raise BudgetError("six-fold enumeration limited to q <= 7")
    b = _as_b6(b)
    r = np.arange(1, q + 1, dtype=np.int64)
    grids = np.meshgrid(r, r, r, r, r, r, indexing="ij")
    x, y, z, xp, yp, zp = [g.ravel() for g in grids]
    ok = ((x * x - y * y - xp * xp + yp * yp) % q == 0) & (
        (y * y - z * z - yp * yp + zp * zp) % q == 0
    )
    phase = (b[0] * x + b[1] * y + b[2] * z + b[3] * xp + b[4] * yp + b[5] * zp) % q
    return complex(np.exp(2j * np.pi * phase[ok] / q).sum())


# ---------------------------------------------------------------------------
# approximation-weight counts and bad sets


def f_radius(q: int, beta: float, eta: float, C: float) -> int:
    """Integer box radius floor(q^((2-beta)/(2+beta) + C*eta))."""
    if not 0 < beta < 0.75:
        raise PreconditionError("beta must lie in (0, 3/4)")
    return math.floor(q ** ((2.0 - beta) / (2.0 + beta) + C * eta))


def f_count(q: int, R: int, c1: int, c2: int) -> int:
    """#{(a, r1, r2) : 1<=a<=q, gcd(a,q)=1, 0<|r_i|<=R, a^-1 r_i = c_i (mod q)}.

    O(R): iterate r1 and solve a = r1 * c1^-1; then r2 = a*c2 must land in
    the box.  Zero when q divides c1 or c2 (r_i = 0 is excluded).
    """
    _check_odd_prime(q)
    if not 1 <= R < q / 2:
        raise PreconditionError("need 1 <= R < q/2")
    c1 %= q
    c2 %= q
    if c1 == 0 or c2 == 0:
        return 0
    c1inv = mod_inverse(c1, q)
    r1 = np.concatenate([np.arange(1, R + 1), -np.arange(1, R + 1)]).astype(np.int64)
    a = (r1 * c1inv) % q
    r2 = (a * c2) % q
    r2 = np.where(2 * r2 > q, r2 - q, r2)
    return int(np.count_nonzero((r2 != 0) & (np.abs(r2) <= R)))


def compute_D(a: int, q: int, beta: float, eta: float, C: float,
              table: CongruenceTable | None = None) -> float:
    """Sum of Delta*(q, a^-1 r1, a^-1 r2) over the punctured r-box."""
    if table is None:
        table = delta_star_table(q, beta)
    R = f_radius(q, beta, eta, C)
    if R >= q / 2:
        raise BudgetError(f"box radius {R} reaches q/2; shrink C*eta")
    abar = mod_inverse(a, q)
    rs = np.concatenate([np.arange(1, R + 1), -np.arange(1, R + 1)]).astype(np.int64)
    idx = (abar * rs) % q
    return float(table.entries[np.ix_(idx, idx)].sum())


def bad_set(q: int, beta: float, eta: float, C: float,
            table: CongruenceTable | None = None) -> list[int]:
    """All coprime a <= q with D(a,q) * q^((-6+4 beta)/(2+beta)) >= q^(-C eta)."""
    if q > 401:
        raise BudgetError("bad_set limited to q <= 401")
    if table is None:
        table = delta_star_table(q, beta)
    weight = q ** ((-6.0 + 4.0 * beta) / (2.0 + beta))
    threshold = q ** (-C * eta)
    out = []
    for a in range(1, q):
        if compute_D(a, q, beta, eta, C, table) * weight >= threshold:
            out.append(a)
    return out


# ---------------------------------------------------------------------------
# residue-box sums used by the sandwich pipeline


def _mod_prefix(values: np.ndarray, q: int) -> np.ndarray:
    c = np.bincount(values, minlength=q)
    return np.concatenate([[0], np.cumsum(c)])


def _arc_count_mod(prefix: np.ndarray, lo: np.ndarray, hi: np.ndarray, q: int) -> np.ndarray:
    """Counts in the inclusive residue arc [lo..hi] (wrapping when hi < lo)."""
    wrapped = lo > hi
    plain = prefix[hi + 1] - prefix[lo]
    wrap = (prefix[q] - prefix[lo]) + prefix[hi + 1]
    return np.where(wrapped, wrap, plain)


def _clip_range(rng: tuple[int, int], q: int) -> tuple[int, int] | None:
    half = (q - 1) // 2
    lo, hi = max(rng[0], -half), min(rng[1], half)
    return None if lo > hi else (lo, hi)


def residue_box_sum_A(q: int, M: int, a: int, r1_range: tuple[int, int],
                      r2_range: tuple[int, int]) -> int:
    """sum of A(M,q, a^-1 r1, a^-1 r2) over integer (r1, r2) in the box,
    excluding r1 r2 = 0 and r1 + r2 = 0.

    Requires M < q/2, which makes the excluded lines coincide with the
    coincidence patterns x=y, y=z, x=z, so the sum is the number of
    distinct triples whose residue pair falls in the punctured box.
    Evaluated per y by prefix-sum window counts, O((M + q) overall).
    """
    _check_odd_prime(q)
    if not 2 * M < q:
        raise PreconditionError("residue box sums need M < q/2")
    if a % q == 0:
        raise PreconditionError("a must be coprime to q")
    i1 = _clip_range(r1_range, q)
    i2 = _clip_range(r2_range, q)
    if i1 is None or i2 is None:
        return 0
    ax = (a * (np.arange(1, M + 1, dtype=np.int64) ** 2)) % q
    prefix = _mod_prefix(ax, q)

    def arc(base_lo: np.ndarray, lo: int, hi: int) -> np.ndarray:
        return _arc_count_mod(prefix, (base_lo + lo) % q, (base_lo + hi) % q, q)

    th1 = arc(ax, i1[0], i1[1])
    if i1[0] <= 0 <= i1[1]:
        th1 = th1 - 1  # r1 = 0 is exactly x = y
    # z side: r2 = a(y^2 - z^2), so a z^2 must land in a y^2 - [lo2, hi2]
    lo2, hi2 = i2
    th2 = _arc_count_mod(prefix, (ax - hi2) % q, (ax - lo2) % q, q)
    if lo2 <= 0 <= hi2:
        th2 = th2 - 1  # r2 = 0 is exactly z = y
    jlo, jhi = max(i1[0], -hi2), min(i1[1], -lo2)
    if jlo <= jhi:
        corr = arc(ax, jlo, jhi)
        if jlo <= 0 <= jhi:
            corr = corr - 1
    else:
        corr = np.zeros(M, dtype=np.int64)
    return int(np.sum(th1 * th2 - corr))


def residue_box_sum_A0(q: int, a: int, r1_range: tuple[int, int],
                       r2_range: tuple[int, int]) -> int:
    """sum of A0(q, a^-1 r1, a^-1 r2) over the box minus the three lines
    r1 = 0, r2 = 0, r1 + r2 = 0; exact integer arithmetic throughout."""
    _check_odd_prime(q)
    if a % q == 0:
        raise PreconditionError("a must be coprime to q")
    i1 = _clip_range(r1_range, q)
    i2 = _clip_range(r2_range, q)
    if i1 is None or i2 is None:
        return 0
    x = np.arange(1, q + 1, dtype=np.int64)
    ax = (a * (x * x)) % q
    prefix = _mod_prefix(ax, q)
    # multiplicity of each residue value r at offset from a*y^2 is
    # n(y, r) in {0, 1, 2}; n = 1 exactly when r = -a y^2 (mod q)
    n0 = np.where(x == q, 1, 2)  # n(y, 0): number of x with x^2 = y^2

    th1 = _arc_count_mod(prefix, (ax + i1[0]) % q, (ax + i1[1]) % q, q)
    if i1[0] <= 0 <= i1[1]:
        th1 = th1 - n0
    lo2, hi2 = i2
    th2 = _arc_count_mod(prefix, (ax - hi2) % q, (ax - lo2) % q, q)
    if lo2 <= 0 <= hi2:
        th2 = th2 - n0

    jlo, jhi = max(i1[0], -hi2), min(i1[1], -lo2)
    if jlo <= jhi:
        cnt_j = _arc_count_mod(prefix, (ax + jlo) % q, (ax + jhi) % q, q)
        if jlo <= 0 <= jhi:
            cnt_j = cnt_j - n0
        rstar = (-ax) % q
        rstar_signed = np.where(2 * rstar > q, rstar - q, rstar)
        single = (rstar_signed != 0) & (rstar_signed >= jlo) & (rstar_signed <= jhi)
        corr = 2 * cnt_j - single.astype(np.int64)
    else:
        corr = np.zeros(q, dtype=np.int64)
    return int(np.sum(th1 * th2 - corr))
