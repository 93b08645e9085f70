import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corrlab.errors import PreconditionError
from corrlab.numeric import alpha_rational, alpha_sqrt
from corrlab.sequences import (
    PointSet,
    dilated_points,
    discrepancy,
    poisson_moment,
    poisson_moment_coefficients,
    simulate_counts,
    stirling2,
    window_moment,
)


def test_dilated_points_examples():
    ps = dilated_points(alpha_rational(1, 4), 2, 4)
    assert np.allclose(ps.points, [0.0, 0.0, 0.25, 0.25])
    ps = dilated_points(alpha_rational(1, 3), 1, 3)
    assert np.allclose(ps.points, [0.0, 1 / 3, 2 / 3])
    ps = dilated_points(alpha_sqrt(2), 2, 3)
    assert np.allclose(ps.points, sorted((math.sqrt(2) * n * n) % 1 for n in (1, 2, 3)), atol=1e-12)


def test_dilated_points_precision_guard():
    with pytest.raises(PreconditionError):
        dilated_points(alpha_sqrt(2, bits=64), 2, 10**6)


def _discrepancy_oracle(points):
    """Exhaustive sup over candidate intervals with endpoints at the samples."""
    pts = sorted(points)
    n = len(pts)
    cands = sorted(set([0.0, 1.0] + pts))
    best = 0.0
    for i, a in enumerate(cands):
        for b in cands[i:]:
            closed = sum(1 for x in pts if a <= x <= b)
            opened = sum(1 for x in pts if a < x < b)
            best = max(best, closed / n - (b - a), (b - a) - opened / n)
    return best


def test_discrepancy_examples():
    assert discrepancy(PointSet.from_values([0.25, 0.75])) == pytest.approx(0.5)
    grid = [(2 * i - 1) / 8 for i in range(1, 5)]
    assert discrepancy(PointSet.from_values(grid)) == pytest.approx(0.25)
    assert discrepancy(PointSet.from_values([0.5])) == pytest.approx(1.0)


def test_discrepancy_matches_exhaustive_oracle():
    rng = np.random.default_rng(11)
    for _ in range(25):
        n = int(rng.integers(1, 40))
        pts = np.sort(rng.random(n))
        ps = PointSet.from_values(pts)
        assert discrepancy(ps) == pytest.approx(_discrepancy_oracle(pts), abs=1e-12)


def test_discrepancy_of_grid_is_one_over_n():
    for n in (2, 5, 17, 100):
        ps = PointSet.from_values([i / n for i in range(n)])
        assert discrepancy(ps) == pytest.approx(1 / n, abs=1e-15)


def test_window_moment_examples():
    ps = PointSet.from_values([0.0, 0.5])
    assert window_moment(ps, 1.0, 2) == pytest.approx(1.0, abs=1e-12)
    # whole-circle window
    assert window_moment(ps, 2.0, 3) == pytest.approx(8.0)


def test_window_first_moment_is_L():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = int(rng.integers(2, 400))
        L = float(rng.uniform(0.01, n))
        ps = PointSet.from_values(np.sort(rng.random(n)))
        assert window_moment(ps, L, 1) == pytest.approx(L, rel=1e-9)


def test_window_moment_shift_invariance():
    rng = np.random.default_rng(4)
    pts = np.sort(rng.random(64))
    L = 7.5
    base = [window_moment(PointSet.from_values(pts), L, k) for k in (1, 2, 3)]
    for shift in (0.123456, 0.5, 0.9999):
        moved = np.sort((pts + shift) % 1.0)
        got = [window_moment(PointSet.from_values(moved), L, k) for k in (1, 2, 3)]
        assert np.allclose(base, got, atol=1e-12, rtol=0)
    # larger instance: relative agreement at float precision
    pts = np.sort(rng.random(2000))
    L = 900.0
    base = [window_moment(PointSet.from_values(pts), L, k) for k in (1, 2, 3)]
    moved = np.sort((pts + 0.777) % 1.0)
    got = [window_moment(PointSet.from_values(moved), L, k) for k in (1, 2, 3)]
    assert np.allclose(base, got, rtol=1e-12)


def test_window_stats_invariant():
    from corrlab.sequences import window_stats

    rng = np.random.default_rng(15)
    ps = PointSet.from_values(np.sort(rng.random(100)))
    stats = window_stats(ps, 12.0, 3)
    assert stats.moments[0] == pytest.approx(12.0, rel=1e-9)
    assert len(stats.moments) == 3


def test_window_moment_guards():
    ps = PointSet.from_values([0.1, 0.4])
    with pytest.raises(PreconditionError):
        window_moment(ps, 0.0, 1)
    with pytest.raises(PreconditionError):
        window_moment(ps, 3.0, 1)


def _bell_numbers(kmax):
    # Bell triangle
    row = [1]
    bells = [1]
    for _ in range(kmax):
        new = [row[-1]]
        for v in row:
            new.append(new[-1] + v)
        row = new
        bells.append(row[0])
    return bells


def test_poisson_moment_examples():
    for L in (0.3, 1.0, 7.5):
        assert poisson_moment(L, 1) == pytest.approx(L)
        assert poisson_moment(L, 2) == pytest.approx(L + L * L, rel=1e-15)
    # at L = 1 the k-th moment is the k-th Bell number
    bells = _bell_numbers(8)
    for k in range(1, 9):
        assert poisson_moment(1.0, k) == pytest.approx(bells[k])
    assert poisson_moment(1.0, 3) == 5.0


def test_stirling_recurrence():
    for k in range(1, 12):
        row = stirling2(k)
        prev = stirling2(k - 1) + [0]
        for j in range(1, k + 1):
            assert row[j] == (j * prev[j] if j < len(prev) - 0 else 0) + prev[j - 1]


def test_poisson_moment_guard():
    with pytest.raises(PreconditionError):
        poisson_moment_coefficients(31)


def test_simulate_whole_circle_point_mass():
    sim = simulate_counts(10, 10.0, 300, 42)
    assert sim.counts[10] == 300 and sim.counts[:10].sum() == 0


def test_simulate_deterministic_and_chunk_stable():
    a = simulate_counts(100, 3.0, 6000, 9)
    b = simulate_counts(100, 3.0, 6000, 9)
    assert np.array_equal(a.counts, b.counts)
    # chunked streams: a shorter run is a prefix of a longer one
    n1, n2 = 4096, 8192
    long = simulate_counts(100, 3.0, n2, 9)
    short = simulate_counts(100, 3.0, n1, 9)
    # re-derive raw draws via the same keyed generators
    key0 = np.array([9, 0], dtype=np.uint64)
    rng0 = np.random.Generator(np.random.Philox(key=key0))
    first = rng0.binomial(100, 0.03, size=n1)
    assert np.array_equal(np.bincount(first, minlength=len(short.counts))[: len(short.counts)],
                          short.counts)


def test_simulate_poisson_distance():
    sim = simulate_counts(10**4, 2.0, 10**5, 1)
    assert sim.tv_distance_poisson() <= 0.02
    assert abs(sim.moments[0] - 2.0) <= 0.05
    assert abs(sim.moments[1] - 6.0) <= 0.2
