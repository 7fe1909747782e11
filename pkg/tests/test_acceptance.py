"""Every acceptance criterion at its stated size and tolerance, one line per criterion.

The pass/fail lines are collected in ``RESULTS`` and printed in the pytest
terminal summary.
"""

import pytest

from cpdilation import acceptance


@pytest.fixture(scope="module")
def extremality_results():
    return acceptance.criterion_extremality()


RESULTS = []


def report(result):
    RESULTS.append(result)
    assert result.passed, result.line()


def test_criterion_01_round_trip():
    report(acceptance._timed(acceptance.criterion_round_trip))


def test_criterion_02_unital_iff_isometry():
    report(acceptance._timed(acceptance.criterion_unital_isometry))


def test_criterion_03_gns_agreement():
    report(acceptance._timed(acceptance.criterion_gns_agreement))


def test_criterion_04_minimality():
    report(acceptance._timed(acceptance.criterion_minimality))


def test_criterion_05_star_homomorphisms():
    report(acceptance._timed(acceptance.criterion_star_hom))


def test_criterion_06_extremality(extremality_results):
    report(extremality_results[0])


def test_criterion_07_decomposition(extremality_results):
    report(extremality_results[1])


def test_criterion_08_pure_states():
    report(acceptance._timed(acceptance.criterion_pure_states))


def test_criterion_09_fusion_coherence():
    report(acceptance._timed(acceptance.criterion_fusion_coherence))


def test_criterion_10_cpinf_laws():
    report(acceptance._timed(acceptance.criterion_cpinf_laws))


def test_criterion_11_classification():
    report(acceptance._timed(acceptance.criterion_classification))


def test_oracle_agreement():
    report(acceptance.oracle_checks())
