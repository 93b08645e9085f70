import math

import numpy as np
import pytest

from corrlab import modcount as mc
from corrlab.errors import BudgetError, PreconditionError, VerificationError
from corrlab.numeric import primes_in


def test_square_root_counts_examples():
    t = mc.square_root_counts(7, 7)
    assert t[0] == 1 and all(t[r] == 2 for r in (1, 2, 4)) and all(t[r] == 0 for r in (3, 5, 6))
    t = mc.square_root_counts(7, 2)
    assert t[1] == 1 and t[4] == 1 and t.sum() == 2
    t = mc.square_root_counts(3, 3)
    assert t[0] == 1 and t[1] == 2
    assert mc.square_root_counts(101, 40).sum() == 40


def test_count_A_examples():
    assert mc.count_A(7, 2, 0, 0) == 2
    assert mc.count_A(7, 2, 3, 4) == 1  # the triple (2, 1, 2)
    for q in (7, 11):
        for c1 in range(q):
            for c2 in range(q):
                assert mc.count_A(q, q, c1, c2) == mc.count_A0_brute(q, c1, c2)


def test_count_A_matches_brute():
    rng = np.random.default_rng(1)
    for _ in range(25):
        q = int(rng.choice([11, 13, 23, 47]))
        M = int(rng.integers(1, min(q, 13)))
        c1, c2 = (int(v) for v in rng.integers(0, q, size=2))
        assert mc.count_A(q, M, c1, c2) == mc.count_A_brute(q, M, c1, c2)


def test_a_table_sums_to_M_cubed():
    for q, M in ((11, 4), (101, 20), (23, 23)):
        support, counts = mc.count_A_sparse(q, M)
        assert int(counts.sum()) == M**3
        grid = mc.count_A_grid(q, M)
        assert int(grid.sum()) == M**3


def test_a0_examples():
    assert mc.count_A0_closed(3, 0, 0) == 9
    assert mc.count_A0_closed(3, 0, 1) == 4
    assert mc.count_A0_closed(3, 1, 1) == 0
    assert mc.count_A0_brute(3, 0, 1) == 4
    assert mc.count_A0_naive(3, 1, 1) == 0
    assert mc.count_A0_closed(7, 1, 1) == 4 == mc.count_A0_brute(7, 1, 1)


def test_a0_closed_equals_brute_exhaustive():
    for q in primes_in(3, 23):
        for c1 in range(q):
            for c2 in range(q):
                assert mc.count_A0_closed(q, c1, c2) == mc.count_A0_brute(q, c1, c2)


def test_a0_brute_equals_naive_small():
    for q in (3, 5, 7, 11):
        for c1 in range(q):
            for c2 in range(q):
                assert mc.count_A0_brute(q, c1, c2) == mc.count_A0_naive(q, c1, c2)


def test_a0_grid_consistency():
    for q in (3, 7, 23, 101, 199):
        grid = mc.a0_closed_grid(q)
        assert int(grid.sum()) == q**3
        rng = np.random.default_rng(q)
        for _ in range(12):
            c1, c2 = (int(v) for v in rng.integers(0, q, size=2))
            assert grid[c1, c2] == mc.count_A0_closed(q, c1, c2)


def test_a0_relabeling_symmetry():
    # (x,y,z) -> (z,x,y) sends (c1, c2) to (-c1-c2, c1)
    for q in primes_in(3, 23):
        grid = mc.a0_closed_grid(q)
        for c1 in range(q):
            for c2 in range(q):
                assert grid[c1, c2] == grid[(-c1 - c2) % q, c1]


def test_sum_a0_squared_polynomial():
    for q in (3, 5, 11):
        direct = sum(mc.count_A0_brute(q, c1, c2) ** 2 for c1 in range(q) for c2 in range(q))
        assert mc.sum_a0_squared(q) == direct


def test_delta_examples():
    assert mc.delta(7, 7, 3, 5) == 0.0
    assert mc.delta(7, 2, 0, 0) == pytest.approx(abs(2 - (8 / 343) * 25), abs=1e-12)


def test_delta_sq_sum_matches_direct_double_loop():
    q, M = 101, 20
    direct = sum(mc.delta(q, M, c1, c2) ** 2 for c1 in range(q) for c2 in range(q))
    assert mc.delta_sq_sum(q, M) == pytest.approx(direct, rel=1e-12)


def test_delta_star_matches_naive():
    for q, beta in ((11, 0.5), (101, 0.5), (37, 0.7)):
        fast = mc.delta_star_table(q, beta)
        naive = mc.delta_star_table_naive(q, beta)
        assert np.array_equal(fast.entries, naive.entries)
        assert float((fast.entries**2).sum()) == pytest.approx(float((naive.entries**2).sum()))


def test_delta_star_entry_bounds():
    t = mc.delta_star_table(101, 0.5)
    assert np.all(t.entries >= 0)
    assert t.entries[0, 0] >= mc.delta(101, 1, 0, 0)


def test_delta_star_budget_guard():
    with pytest.raises(BudgetError):
        mc.delta_star_table(10007, 0.01)


def test_exp_sum_examples():
    assert mc.exp_sum_S((0, 0, 0, 0, 0, 0), 3) == 141
    assert mc.exp_sum_S((3, 3, 3, 3, 3, 3), 3) == 141  # periodicity mod q
    v = mc.exp_sum_S((1, 0, 0, 0, 0, 0), 3)
    assert abs(v.imag) <= 1e-9 and abs(v) <= 4 * 27
    assert abs(v - mc.exp_sum_S_enum((1, 0, 0, 0, 0, 0), 3)) <= 1e-9


def test_exp_sum_oracles_agree():
    rng = np.random.default_rng(2)
    for q in (3, 5, 7):
        for _ in range(12):
            b = tuple(int(v) for v in rng.integers(0, q, size=6))
            fast = mc.exp_sum_S(b, q, verify=True)
            assert abs(fast - mc.exp_sum_S_enum(b, q)) <= 1e-9 * q**3
    for q in (11, 31):
        for _ in range(20):
            b = tuple(int(v) for v in rng.integers(0, q, size=6))
            assert abs(mc.exp_sum_S(b, q) - mc.exp_sum_S_jk_oracle(b, q)) <= 1e-6 * q**3


def test_exp_sum_negation_symmetry():
    rng = np.random.default_rng(3)
    for q in (5, 11, 31):
        for _ in range(10):
            b = tuple(int(v) for v in rng.integers(0, q, size=6))
            neg = tuple(-v for v in b)
            s, sneg = mc.exp_sum_S(b, q), mc.exp_sum_S(neg, q)
            assert s == sneg.conjugate() == sneg  # real and even in b


def test_exp_sum_zero_equals_a0_square_sum():
    for q in (3, 5, 7, 11):
        assert mc.exp_sum_S((0,) * 6, q).real == mc.sum_a0_squared(q)


def _f_count_enum(q, R, c1, c2):
    total = 0
    for a in range(1, q):
        for r1 in range(-R, R + 1):
            for r2 in range(-R, R + 1):
                if r1 * r2 == 0:
                    continue
                abar = pow(a, -1, q)
                if (abar * r1) % q == c1 % q and (abar * r2) % q == c2 % q:
                    total += 1
    return total


def test_f_count_examples():
    assert mc.f_count(5, 1, 1, 1) == 2
    assert mc.f_count(5, 1, 1, 2) == 0
    for q, R in ((5, 1), (11, 3), (13, 5)):
        total = sum(mc.f_count(q, R, c1, c2) for c1 in range(q) for c2 in range(q))
        assert total == (q - 1) * (2 * R) ** 2
        for c1 in range(q):
            for c2 in range(q):
                assert mc.f_count(q, R, c1, c2) == _f_count_enum(q, R, c1, c2)


def test_compute_D_symmetry_and_bad_set():
    q, beta, eta, C = 101, 0.5, 0.01, 10.0
    table = mc.delta_star_table(q, beta)
    for a in (3, 20, 50):
        assert mc.compute_D(a, q, beta, eta, C, table) == mc.compute_D(q - a, q, beta, eta, C, table)
    bs = mc.bad_set(q, beta, eta, C, table)
    assert bs == mc.bad_set(q, beta, eta, C, table)
    assert len(bs) <= q
    # with C*eta = 0 the threshold becomes 1
    weight = q ** ((-6.0 + 4.0 * beta) / (2.0 + beta))
    expect = [a for a in range(1, q) if mc.compute_D(a, q, beta, 0.3, 0.0, table) * weight >= 1.0]
    assert mc.bad_set(q, beta, 0.3, 0.0, table) == expect


def test_congruence_table_serialization():
    t = mc.a0_table(3)
    rows = list(t.rows())
    assert rows[0] == (0, 0, 9)
    assert len(rows) == 9  # dense for the complete table
    side = t.sidecar()
    assert side["q"] == 3 and side["kind"] == "A0" and side["checksum"] == 27
    ta = mc.a_table(7, 2)
    assert sum(v for _, _, v in ta.rows()) == 8  # sparse rows carry the full mass
    ts = mc.delta_star_table(11, 0.5)
    assert isinstance(ts.checksum(), int)


def test_residue_box_sums_match_direct():
    rng = np.random.default_rng(5)
    for _ in range(10):
        q = int(rng.choice([23, 37, 101]))
        a = int(rng.integers(1, q))
        M = int(rng.integers(2, (q - 1) // 2))
        lo1, hi1 = sorted(int(v) for v in rng.integers(-q, q, size=2))
        lo2, hi2 = sorted(int(v) for v in rng.integers(-q, q, size=2))
        abar = pow(a, -1, q)
        half = (q - 1) // 2

        def direct(count_fn):
            tot = 0
            for r1 in range(lo1, hi1 + 1):
                for r2 in range(lo2, hi2 + 1):
                    if r1 * r2 == 0 or r1 + r2 == 0 or abs(r1) > half or abs(r2) > half:
                        continue
                    tot += count_fn((abar * r1) % q, (abar * r2) % q)
            return tot

        got = mc.residue_box_sum_A(q, M, a, (lo1, hi1), (lo2, hi2))
        assert got == direct(lambda c1, c2: mc.count_A(q, M, c1, c2))
        got0 = mc.residue_box_sum_A0(q, a, (lo1, hi1), (lo2, hi2))
        assert got0 == direct(lambda c1, c2: mc.count_A0_closed(q, c1, c2))


def test_residue_box_sum_guards():
    with pytest.raises(PreconditionError):
        mc.residue_box_sum_A(11, 6, 1, (-2, 2), (-2, 2))  # M >= q/2
    assert mc.residue_box_sum_A(11, 3, 1, (5, 4), (-2, 2)) == 0  # empty range
