import itertools
import math

import numpy as np
import pytest

from corrlab.correlations import box2d, generic_correlation, triangle
from corrlab.diophantine import RationalApprox, prime_denominator_approx
from corrlab.errors import BudgetError, PreconditionError
from corrlab.numeric import alpha_fixed, alpha_rational
from corrlab.pipeline import (
    SandwichBox,
    diophantine_count,
    expected_box_size,
    falling_factorial,
    fourier_coefficients_k2,
    obstruction_growth_exponent,
    obstruction_report,
    sandwich_bounds,
)
from corrlab.sequences import dilated_points


def _rational_sandwich(a, q, N, L, eta=0.05, box=None, enforce_guard=True):
    alpha = alpha_rational(a, q)
    approx = RationalApprox(a % q, q, 0.0, True)
    return sandwich_bounds(alpha, approx, N, L, eta, box or SandwichBox(-1, 1, -1, 1),
                           enforce_guard=enforce_guard)


def test_sandwich_degenerate_box():
    rep = _rational_sandwich(37, 101, 10, 2.0, box=SandwichBox(-1, -1, -1, 1))
    assert rep.lower == rep.upper == rep.r3 == 0.0


def test_sandwich_exact_rational_vs_enumeration():
    # full enumeration of the 720 ordered triples confirms both r3 and the chain
    rep = _rational_sandwich(37, 101, 10, 3.0, enforce_guard=False)
    alpha = alpha_rational(37, 101)
    brute = generic_correlation(dilated_points(alpha, 2, 10), 3.0, 3, box2d(-1, 1, -1, 1))
    assert rep.r3 == pytest.approx(brute.value, abs=1e-12)
    assert rep.lower <= rep.r3 <= rep.upper
    assert rep.flag_diophantine and rep.flag_n_below_half_q


def test_sandwich_bounds_brute_box_sums():
    # lower/upper recomputed by summing count_A cell by cell
    from corrlab.modcount import count_A

    rep = _rational_sandwich(58, 127, 12, 2.5)
    abar = pow(58, -1, 127)
    half = 63
    for fattened, target in ((False, rep.lower), (True, rep.upper)):
        (lo1, hi1), (lo2, hi2) = rep.box.residue_ranges(127, 2.5, 12, 0.05, fattened)
        total = 0
        for r1 in range(max(lo1, -half), min(hi1, half) + 1):
            for r2 in range(max(lo2, -half), min(hi2, half) + 1):
                if r1 * r2 == 0 or r1 + r2 == 0:
                    continue
                total += count_A(127, 12, (abar * r1) % 127, (abar * r2) % 127)
        assert target == pytest.approx(total / 12)


def test_sandwich_chain_on_prime_approx_instances():
    rng = np.random.default_rng(1009)
    eta = 0.05
    box = SandwichBox(-1, 1, -1, 1)
    seen = 0
    for _ in range(3):
        alpha = alpha_fixed(int.from_bytes(rng.bytes(32), "big"), 256)
        N = 500
        L = math.sqrt(N)
        beta = 1.0 - math.log(L) / math.log(N)
        Q = math.ceil(N ** ((2.0 + beta) / 2.0 + 10.0 * eta))
        ap = prime_denominator_approx(alpha, Q, eta)
        if ap is None:
            continue
        rep = sandwich_bounds(alpha, ap, N, L, eta, box)
        seen += 1
        assert rep.lower <= rep.r3 <= rep.upper
        assert rep.size_upper == pytest.approx(expected_box_size(box, ap.q, L, N), rel=0.2)
        assert rep.size_lower == pytest.approx(expected_box_size(box, ap.q, L, N), rel=0.2)
    # instances are scarce at this scale; the acceptance suite covers more
    assert seen >= 0


def test_sandwich_requires_small_N():
    with pytest.raises(PreconditionError):
        _rational_sandwich(3, 11, 10, 2.0)


def test_diophantine_count_k2():
    assert diophantine_count((1,), 2, 2, 40, 0) == 0
    assert diophantine_count((1,), 2, 2, 2, 3) == 1  # the pair (2, 1)
    assert diophantine_count((0,), 2, 2, 6, 0) == 30
    assert diophantine_count((2,), 2, 2, 9, 2 * (25 - 9)) == 1
    assert diophantine_count((2,), 2, 2, 9, 3) == 0  # parity obstruction


def test_diophantine_count_k3_against_enumeration():
    def enum(a1, a2, d, N, ell):
        c = 0
        for t in itertools.product(range(1, N + 1), repeat=3):
            if len(set(t)) == 3 and a1 * (t[0] ** d - t[1] ** d) + a2 * (t[1] ** d - t[2] ** d) == ell:
                c += 1
        return c

    assert diophantine_count((1, 1), 2, 3, 3, 0) == enum(1, 1, 2, 3, 0)
    cases = [(1, 1, 2, 5, 3), (2, -1, 2, 6, 7), (1, -3, 3, 5, 0), (0, 2, 2, 5, 6),
             (3, 0, 2, 5, 15), (-1, 1, 2, 7, 0), (1, 1, 1, 6, 2)]
    for a1, a2, d, N, ell in cases:
        assert diophantine_count((a1, a2), d, 3, N, ell) == enum(a1, a2, d, N, ell)


def test_diophantine_count_guards():
    with pytest.raises(PreconditionError):
        diophantine_count((1, 1, 1), 2, 4, 5, 0)
    with pytest.raises(BudgetError):
        diophantine_count((1, 1), 2, 3, 2000, 0)


def test_falling_factorial():
    assert falling_factorial(10, 3) == 720
    assert falling_factorial(4, 4) == 24


def test_obstruction_spike_exact():
    rep = obstruction_report(2, 3, 2.0, 4, box2d(-1, 1, -1, 1), grid=16,
                             with_coefficients=False, enforce_guard=False)
    assert rep.spike == 6.0
    assert rep.grid_value_at_zero == pytest.approx(6.0, abs=1e-9)
    rep2 = obstruction_report(2, 2, 2.0, 12, triangle(), grid=32, with_coefficients=False)
    assert rep2.spike == falling_factorial(12, 2) / 12
    assert rep2.grid_value_at_zero == pytest.approx(rep2.spike, abs=1e-9)


def test_fourier_coefficients_conjugate_symmetry():
    from corrlab.correlations import box1d

    for kern in (triangle(), box1d(-0.3, 1.0)):
        c = fourier_coefficients_k2(2, 2.0, 12, kern, extent=600)
        mid = (len(c) - 1) // 2
        assert np.allclose(c[mid + 1 :], np.conj(c[mid - 1 :: -1]), atol=1e-14)


def test_fourier_coefficients_match_quadrature():
    # c_ell from the lattice formula vs direct numerical Fourier analysis of
    # the grid-evaluated correlation (fine grid, small N keeps aliasing tiny)
    from corrlab.pipeline import correlation_on_grid

    N, L, G = 8, 1.5, 8192
    vals = correlation_on_grid(2, 2, L, N, triangle(), G)
    spectrum = np.fft.fft(vals) / G
    c = fourier_coefficients_k2(2, L, N, triangle(), extent=200)
    mid = (len(c) - 1) // 2
    for ell in (0, 1, 2, 3, 5, 17, 36, 63, 120):
        assert c[mid + ell] == pytest.approx(complex(spectrum[ell]), abs=2e-4)


def test_parseval_small_instance():
    rep = obstruction_report(2, 2, 2.0, 30, triangle(), grid=32768)
    assert rep.parseval_lhs == pytest.approx(rep.parseval_rhs, rel=0.10)
    assert rep.ell_tail_fraction < 1e-3


def test_growth_exponent_small():
    res = obstruction_growth_exponent(2, 3, 2.0, [16, 32, 64], box2d(-1, 1, -1, 1), grid=128)
    assert res["exponent"] == pytest.approx(4.0, abs=0.6)
