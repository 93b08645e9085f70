"""Acceptance gate: every criterion runs at its stated tolerance.

Each test prints the one-line pass/fail summary for its criterion; run
with `pytest -s tests/test_acceptance.py` (or `corrlab verify`) to see
them all.
"""

import pytest

from corrlab import acceptance


def _run(fn):
    res = fn()
    print(res.line())
    assert res.passed, res.details
    return res


def test_criterion_01_a0_exactness():
    _run(acceptance.check_a0_exactness)


def test_criterion_02_hasse_consistency():
    _run(acceptance.check_hasse_consistency)


def test_criterion_03_gauss_sums():
    _run(acceptance.check_gauss_sums)


def test_criterion_04_variance_bounds():
    _run(acceptance.check_variance_bounds)


def test_criterion_05_moment_identities():
    _run(acceptance.check_moment_identities)


def test_criterion_06_pair_asymptotic():
    _run(acceptance.check_pair_asymptotic)


def test_criterion_07_triple_asymptotic():
    _run(acceptance.check_triple_asymptotic)


def test_criterion_08_exponential_sums():
    _run(acceptance.check_exponential_sums)


def test_criterion_09_sandwich_chain():
    _run(acceptance.check_sandwich_chain)


def test_criterion_10_diophantine_search():
    _run(acceptance.check_diophantine_search)


def test_criterion_11_obstruction():
    _run(acceptance.check_obstruction)


def test_criterion_12_poisson_baseline():
    _run(acceptance.check_poisson_baseline)
