"""The acceptance suite: twelve independently checkable criteria.

Each criterion is a function returning a CheckResult; run_all executes
them in order and the CLI `verify` command exits nonzero if any fails.
All random draws use fixed seeds, so the suite is deterministic.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import modcount as mc
from .correlations import box1d, box2d, moment_identity_report, pair_correlation, triangle, triple_correlation
from .diophantine import RationalApprox, prime_denominator_approx
from .numeric import (
    alpha_fixed,
    alpha_pi_frac,
    alpha_rational,
    alpha_sqrt,
    gauss_sum,
    primes_in,
)
from .pipeline import SandwichBox, obstruction_growth_exponent, obstruction_report, sandwich_bounds
from .sequences import PointSet, dilated_points, poisson_moment_coefficients, simulate_counts


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    details: str
    elapsed: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.number:2d}  {self.name}: {self.details}  [{self.elapsed:.1f}s]"


def _random_alpha(rng: np.random.Generator):
    return alpha_fixed(int.from_bytes(rng.bytes(32), "big"), 256)


def check_a0_exactness() -> CheckResult:
    """Closed-form A0 equals brute-force A0 on every cell, every prime q <= 23."""
    t0 = time.time()
    bad = []
    for q in primes_in(3, 23):
        rsq = mc.square_root_counts(q, q)
        y2 = (np.arange(1, q + 1, dtype=np.int64) ** 2) % q
        grid = mc.a0_closed_grid(q)
        for c1 in range(q):
            for c2 in range(q):
                brute = int(np.sum(rsq[(y2 + c1) % q] * rsq[(y2 - c2) % q]))
                if grid[c1, c2] != brute or mc.count_A0_closed(q, c1, c2) != brute:
                    bad.append((q, c1, c2))
    spots = (
        mc.count_A0_closed(3, 0, 0) == 9
        and mc.count_A0_closed(3, 0, 1) == 4
        and mc.count_A0_closed(3, 1, 1) == 0
    )
    ok = not bad and spots
    return CheckResult(1, "a0-exactness", ok,
                       f"exhaustive q<=23, mismatches={len(bad)}, spot rows ok={spots}",
                       time.time() - t0)


def check_hasse_consistency() -> CheckResult:
    """|A0 - q| <= 2 sqrt(q) + 4 on non-degenerate cells for all q <= 199."""
    t0 = time.time()
    worst = 0.0
    ok = True
    for q in primes_in(3, 199):
        grid = mc.a0_closed_grid(q).astype(np.float64)
        c = np.arange(q)
        nondeg = (c[:, None] != 0) & (c[None, :] != 0) & ((c[:, None] + c[None, :]) % q != 0)
        dev = float(np.abs(grid - q)[nondeg].max())
        bound = 2.0 * math.sqrt(q) + 4.0
        worst = max(worst, dev / bound)
        ok = ok and dev <= bound
    return CheckResult(2, "hasse-consistency", ok,
                       f"all primes q<=199, worst deviation/bound={worst:.3f}", time.time() - t0)


def check_gauss_sums() -> CheckResult:
    """Closed form vs direct summation to 1e-9 sqrt(q) for all j, q <= 101."""
    t0 = time.time()
    worst = 0.0
    for q in primes_in(3, 101):
        e = np.exp(2j * np.pi * np.arange(q) / q)
        sq = (np.arange(q, dtype=np.int64) ** 2) % q
        for j in range(q):
            direct = complex(e[(j * sq) % q].sum())
            worst = max(worst, abs(direct - gauss_sum(j, q)) / math.sqrt(q))
    ok = worst <= 1e-9
    return CheckResult(3, "gauss-sums", ok, f"worst |closed-direct|/sqrt(q)={worst:.2e}", time.time() - t0)


def check_variance_bounds() -> CheckResult:
    """Grid of delta_sq_sum values against the polylog upper and 0.1 M^3 lower bounds."""
    t0 = time.time()
    worst_ratio = 0.0
    lower_ok = True
    for q in (101, 211, 401, 809):
        for expo in (0.3, 0.5, 0.66):
            M = math.ceil(q**expo)
            v = mc.delta_sq_sum(q, M)
            bound = math.log(q) ** 3 * M**3 + math.log(q) ** 6 * q**2
            worst_ratio = max(worst_ratio, v / bound)
            if M <= 0.2 * q ** (2.0 / 3.0):
                lower_ok = lower_ok and v >= 0.1 * M**3
    ok = worst_ratio <= 50.0 and lower_ok
    return CheckResult(4, "variance-bounds", ok,
                       f"worst upper ratio={worst_ratio:.3g} (<=50), lower bound ok={lower_ok}",
                       time.time() - t0)


def check_moment_identities(sets: int = 200, seed: int = 5) -> CheckResult:
    """E W^2 and E W^3 identities to 1e-9 relative on random point sets."""
    t0 = time.time()
    rng = np.random.default_rng(seed)
    worst = 0.0
    ok = True
    for _ in range(sets):
        n = int(rng.integers(20, 2001))
        L = float(rng.uniform(1.0, n / 2))
        ps = PointSet.from_values(np.sort(rng.random(n)))
        rep = moment_identity_report(ps, L)
        worst = max(worst, rep.computed["gap2_rel"], rep.computed["gap3_rel"])
        ok = ok and rep.passed
    return CheckResult(5, "moment-identities", ok,
                       f"{sets} random sets (N<=2000, L<=N/2), worst rel gap={worst:.2e}",
                       time.time() - t0)


def check_pair_asymptotic(seed: int = 20260809) -> CheckResult:
    """R2(box[-1,1]) within 10% of 2L for >= 9 of 10 random 256-bit dilations."""
    t0 = time.time()
    rng = np.random.default_rng(seed)
    N = 50_000
    L = N**0.6
    hits = 0
    ratios = []
    for _ in range(10):
        ps = dilated_points(_random_alpha(rng), 2, N)
        r2 = pair_correlation(ps, L, box1d(-1, 1)).value
        ratios.append(r2 / (2 * L))
        hits += 0.9 * 2 * L <= r2 <= 1.1 * 2 * L
    ok = hits >= 9
    return CheckResult(6, "pair-asymptotic", ok,
                       f"{hits}/10 in [0.9,1.1]*2L at N=5e4, L=N^0.6; ratios "
                       + ",".join(f"{r:.3f}" for r in ratios), time.time() - t0)


def check_triple_asymptotic(seed: int = 20260810) -> CheckResult:
    """R3(box[-1,1]^2) within 15% of 4L^2 for >= 4 of 5 random dilations."""
    t0 = time.time()
    rng = np.random.default_rng(seed)
    N = 30_000
    L = N**0.35
    hits = 0
    ratios = []
    for _ in range(5):
        ps = dilated_points(_random_alpha(rng), 2, N)
        r3 = triple_correlation(ps, L, box2d(-1, 1, -1, 1)).value
        ratios.append(r3 / (4 * L * L))
        hits += 0.85 * 4 * L * L <= r3 <= 1.15 * 4 * L * L
    ok = hits >= 4
    return CheckResult(7, "triple-asymptotic", ok,
                       f"{hits}/5 in [0.85,1.15]*4L^2 at N=3e4, L=N^0.35; ratios "
                       + ",".join(f"{r:.3f}" for r in ratios), time.time() - t0)


def check_exponential_sums(seed: int = 8) -> CheckResult:
    """Fast path vs O(q^2) oracle on 50 random b per q; exact vs enumeration for q <= 7."""
    t0 = time.time()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for q in (11, 31, 101):
        for _ in range(50):
            b = tuple(int(v) for v in rng.integers(0, q, size=6))
            gap = abs(mc.exp_sum_S(b, q) - mc.exp_sum_S_jk_oracle(b, q)) / q**3
            worst = max(worst, gap)
    exact_ok = mc.exp_sum_S((0,) * 6, 3) == 141
    for q in (3, 5, 7):
        for _ in range(10):
            b = tuple(int(v) for v in rng.integers(0, q, size=6))
            exact_ok = exact_ok and abs(mc.exp_sum_S(b, q) - mc.exp_sum_S_enum(b, q)) <= 1e-9 * q**3
    ok = worst <= 1e-6 and exact_ok
    return CheckResult(8, "exponential-sums", ok,
                       f"worst |fast-oracle|/q^3={worst:.2e}, small-q enumeration exact={exact_ok}",
                       time.time() - t0)


def check_sandwich_chain(seed: int = 1009) -> CheckResult:
    """lower <= R3 <= upper on prime-approximation instances and on exact
    rational instances cross-checked by full triple enumeration."""
    from .correlations import generic_correlation

    t0 = time.time()
    rng = np.random.default_rng(seed)
    eta = 0.05
    box = SandwichBox(-1.0, 1.0, -1.0, 1.0)
    instances = flagged = chains = 0
    ok = True
    for _ in range(5):
        alpha = _random_alpha(rng)
        for N in (500, 1000):
            L = math.sqrt(N)
            beta = 1.0 - math.log(L) / math.log(N)
            Q = math.ceil(N ** ((2.0 + beta) / 2.0 + 10.0 * eta))
            ap = prime_denominator_approx(alpha, Q, eta)
            if ap is None:
                continue
            rep = sandwich_bounds(alpha, ap, N, L, eta, box)
            instances += 1
            flagged += rep.preconditions_held
            chains += rep.chain_holds
            ok = ok and rep.chain_holds
    # exact rational instances: the chain and r3 are checked against the
    # brute-force enumeration of all ordered triples
    for (a, q, N, L) in ((37, 101, 10, 2.0), (58, 127, 12, 2.5)):
        alpha = alpha_rational(a, q)
        rep = sandwich_bounds(alpha, RationalApprox(a, q, 0.0, True), N, L, eta, box)
        brute = generic_correlation(dilated_points(alpha, 2, N), L, 3, box2d(-1, 1, -1, 1)).value
        ok = ok and rep.chain_holds and abs(rep.r3 - brute) <= 1e-12 and rep.preconditions_held
        instances += 1
        chains += rep.chain_holds
    ok = ok and instances >= 3
    return CheckResult(9, "sandwich-chain", ok,
                       f"{chains}/{instances} chains hold ({flagged} with all flags), "
                       "rational instances enumeration-checked", time.time() - t0)


def check_diophantine_search() -> CheckResult:
    """Pinned prime-denominator searches: sqrt2/N=20 -> 29, pi/N=100 -> 113, 1/4 -> none."""
    t0 = time.time()
    r1 = prime_denominator_approx(alpha_sqrt(2), 20, 0.2)
    r2 = prime_denominator_approx(alpha_pi_frac(), 100, 0.3)
    r3 = prime_denominator_approx(alpha_rational(1, 4), 20, 0.2)
    ok = r1 is not None and r1.q == 29 and r2 is not None and r2.q == 113 and r3 is None
    return CheckResult(10, "diophantine-search", ok,
                       f"sqrt2->q={getattr(r1, 'q', None)}, pi->q={getattr(r2, 'q', None)}, "
                       f"1/4->{r3}", time.time() - t0)


def check_obstruction() -> CheckResult:
    """Spike exactness, Parseval within 10%, variance growth within 10% of 2(k-1)."""
    t0 = time.time()
    spike_rep = obstruction_report(2, 3, 2.0, 4, box2d(-1, 1, -1, 1), grid=16,
                                   with_coefficients=False, enforce_guard=False)
    spike_ok = spike_rep.spike == 6.0 and abs(spike_rep.grid_value_at_zero - 6.0) <= 1e-9
    rep = obstruction_report(2, 2, 2.0, 50, triangle(), grid=65536)
    ratio = rep.parseval_lhs / rep.parseval_rhs
    parseval_ok = abs(ratio - 1.0) <= 0.10
    growth = obstruction_growth_exponent(2, 3, 2.0, [32, 64, 128], box2d(-1, 1, -1, 1), grid=256)
    growth_ok = abs(growth["exponent"] - 4.0) <= 0.4
    ok = spike_ok and parseval_ok and growth_ok
    return CheckResult(11, "obstruction", ok,
                       f"spike exact={spike_ok}, parseval lhs/rhs={ratio:.4f}, "
                       f"growth exponent={growth['exponent']:.3f} (target 4)", time.time() - t0)


def check_poisson_baseline(seed: int = 20260809) -> CheckResult:
    """Random model within TV 0.02 of Po(2); second-moment coefficients exact."""
    t0 = time.time()
    sim = simulate_counts(10**4, 2.0, 10**5, seed)
    tv = sim.tv_distance_poisson()
    coeff_ok = poisson_moment_coefficients(2) == [0, 1, 1]
    rng = np.random.default_rng(seed)
    eval_ok = True
    for _ in range(20):
        L = float(rng.uniform(0.1, 20.0))
        coeffs = poisson_moment_coefficients(2)
        eval_ok = eval_ok and abs((coeffs[1] * L + coeffs[2] * L * L) - (L + L * L)) <= 1e-12 * (L + L * L)
    ok = tv <= 0.02 and coeff_ok and eval_ok
    return CheckResult(12, "poisson-baseline", ok,
                       f"TV(empirical, Po(2))={tv:.4f} (<=0.02), moment coefficients exact={coeff_ok}",
                       time.time() - t0)


ALL_CHECKS = [
    check_a0_exactness,
    check_hasse_consistency,
    check_gauss_sums,
    check_variance_bounds,
    check_moment_identities,
    check_pair_asymptotic,
    check_triple_asymptotic,
    check_exponential_sums,
    check_sandwich_chain,
    check_diophantine_search,
    check_obstruction,
    check_poisson_baseline,
]


def run_all(only: list[int] | None = None, report=None) -> list[CheckResult]:
    """Run criteria (all, or the listed numbers, 1-based in suite order)."""
    results = []
    for idx, fn in enumerate(ALL_CHECKS, start=1):
        if only is not None and idx not in only:
            continue
        res = fn()
        if report is not None:
            report(res.line())
        results.append(res)
    return results
