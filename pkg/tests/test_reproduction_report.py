"""
test_reproduction_report.py
Tests the full check report: every reference quantity against its target, and alpha overrides
"""
import dataclasses
from fractions import Fraction

import pytest

from src.reproduction_report import reproduce_paper
from src.scenario_config import ScenarioConfig

EXPECTED_CHECKS = [
    'alpha_exactness', 'freefall_voltage_scale', 'equilibrium_charge', 'voltage_chain_identity',
    'transition_gap_100_99', 'transverse_moment_asymptote', 'tidal_force_gradient', 'freefall_convergence',
    'cavendish_orders', 'outcome_table', 'seeded_determinism',
]


@pytest.fixture(scope="module")
def default_report():
    return reproduce_paper(ScenarioConfig(), seed=0)


def test_all_checks_pass_with_defaults(default_report):
    assert [check.name for check in default_report.checks] == EXPECTED_CHECKS
    assert default_report.passed, default_report.failed_checks()
    assert default_report.failed_checks() == []


def test_reported_values(default_report):
    values = {check.name: check.value for check in default_report.checks}
    assert values['alpha_exactness'] == "11/18"
    assert values['freefall_voltage_scale'] == pytest.approx(1.176, rel=1e-3)
    assert values['equilibrium_charge'] == pytest.approx(1.674e-12, rel=1e-3)
    assert values['transition_gap_100_99'] == pytest.approx(6.68e9, rel=1e-2)
    assert values['freefall_convergence'] == pytest.approx(7.7e-7, rel=1e-2)


def test_overridden_alpha_fails_only_that_check():
    config = ScenarioConfig()
    config = dataclasses.replace(config, circuit=dataclasses.replace(config.circuit, alpha=Fraction(1, 2)))
    report = reproduce_paper(config, seed=0)
    assert not report.passed
    assert report.failed_checks() == ['alpha_exactness']


def test_record_is_deterministic(default_report):
    config = ScenarioConfig()
    first = default_report.to_record(config).to_json()
    second = reproduce_paper(config, seed=0).to_record(config).to_json()
    assert first == second
    record = default_report.to_record(config)
    assert record.value('all_passed') is True
    assert record.inputs['seed'] == 0
