"""
test_cavendish.py
Rotating source masses, pendulum response, synchronous detection and outcome classification
"""
import dataclasses

import numpy as np
import pytest

from src import cavendish as cav
from src.errors import DomainError, InsufficientDataError, SingularityError, SmallAngleViolationError, ValidationError
from src.physical_constants import constants
from src.scenario_config import ScenarioConfig

C = constants()
SINGLE = cav.SourceAssembly(pile_mass=500.0, orbit_radius=0.5, pile_count=1)


def test_single_pile_field_at_centre():
    field = cav.source_field(SINGLE, 0.0, (0.0, 0.0, 0.0))
    assert field[0] == pytest.approx(1.335e-7, rel=1e-3)
    assert abs(field[1]) < 1e-20 and field[2] == 0.0
    heavy = dataclasses.replace(SINGLE, pile_mass=1000.0)
    assert np.linalg.norm(cav.source_field(heavy, 0.0, 0.0)) == pytest.approx(2.67e-7, rel=1e-3)


def test_single_pile_deflection_is_nanoradians():
    a = float(np.linalg.norm(cav.source_field(SINGLE, 0.0, 0.0)))
    assert cav.pendulum_deflection(a) == pytest.approx(1.36e-8, rel=1e-2)


def test_opposite_piles_cancel_at_centre():
    pair = cav.SourceAssembly()
    assert np.linalg.norm(cav.source_field(pair, 0.3, (0.0, 0.0, 0.0))) < 1e-20


def test_field_superposition():
    pair = cav.SourceAssembly()
    point = (0.01, 0.02, 0.0)
    combined = cav.source_field(pair, 0.4, point)
    separate = cav.source_field(SINGLE, 0.4, point) + cav.source_field(SINGLE, 0.4 + np.pi, point)
    np.testing.assert_allclose(combined, separate, rtol=1e-12, atol=1e-24)


def test_field_rotates_with_phase():
    # a quarter turn of the sources is a quarter turn of the field at the centre
    at_zero = cav.source_field(SINGLE, 0.0, 0.0)
    at_quarter = cav.source_field(SINGLE, np.pi / 2, 0.0)
    assert at_quarter[1] == pytest.approx(at_zero[0], rel=1e-12)


def test_field_errors():
    with pytest.raises(DomainError):
        cav.source_field(SINGLE, 0.0, (0.6, 0.0, 0.0))
    with pytest.raises(SingularityError):
        cav.source_field(SINGLE, 0.0, (0.5, 0.0, 0.0))
    with pytest.raises(ValidationError):
        cav.SourceAssembly(pile_mass=-1.0)
    with pytest.raises(ValidationError):
        cav.SourceAssembly(pile_count=0)


def test_pendulum_limits():
    assert cav.pendulum_deflection(0.0) == 0.0
    assert cav.pendulum_deflection(0.05) == pytest.approx(0.05 / C.surface_gravity)
    with pytest.raises(SmallAngleViolationError):
        cav.pendulum_deflection(0.1)
    response = cav.pendulum_response(np.array([1e-7, -1e-7]))
    assert response.static_gain == pytest.approx(1.0 / C.surface_gravity)
    np.testing.assert_allclose(response.deflection, [1e-7 / C.surface_gravity, -1e-7 / C.surface_gravity])


def _sinusoid(amplitude=1e-12, phase=0.3, count=2000, rotation=0.01, harmonic=2):
    times = np.arange(count) * 1.0
    return times, amplitude * np.cos(2.0 * np.pi * harmonic * rotation * times + phase)


def test_detect_clean_sinusoid():
    times, values = _sinusoid()
    result = cav.synchronous_detect(times, values, 0.01, 2, 1000.0)
    assert result.amplitude == pytest.approx(1e-12, rel=1e-9)
    assert result.phase == pytest.approx(0.3, abs=1e-9)
    assert result.harmonic == 2


def test_detect_rejects_dc_and_other_harmonics():
    times, _ = _sinusoid()
    flat = np.full(times.shape, 5e-12)
    assert cav.synchronous_detect(times, flat, 0.01, 2, 1000.0).amplitude < 1e-12 * 5e-12
    _, first = _sinusoid(harmonic=1)
    assert cav.synchronous_detect(times, first, 0.01, 2, 1000.0).amplitude < 1e-24


def test_detect_when_period_is_not_whole_samples():
    # harmonic 3 of 10 mHz at 1 Hz sampling: 33.3 samples per period
    times = np.arange(400) * 1.0
    dc = cav.synchronous_detect(times, np.ones_like(times), 0.01, 3, 350.0)
    assert dc.amplitude < 1e-9
    wave = np.cos(2.0 * np.pi * 0.03 * times + 0.3)
    result = cav.synchronous_detect(times, 2.0 + wave, 0.01, 3, 350.0)
    assert abs(result.amplitude - 1.0) <= 1e-6
    assert result.phase == pytest.approx(0.3, abs=1e-6)
    assert result.noise_floor < 1e-9


def test_detection_is_linear():
    times, values = _sinusoid()
    base = cav.synchronous_detect(times, values, 0.01, 2, 1000.0).amplitude
    tripled = cav.synchronous_detect(times, 3.0 * values, 0.01, 2, 1000.0).amplitude
    assert tripled == pytest.approx(3.0 * base, rel=1e-12)


def test_detection_noise_bound_over_seeds():
    times, values = _sinusoid()
    sigma = 1e-13
    bound = 5.0 * sigma / np.sqrt(1000)
    failures = 0
    for seed in range(200):
        noise = np.random.default_rng(seed).normal(0.0, sigma, times.size)
        result = cav.synchronous_detect(times, values + noise, 0.01, 2, 1000.0)
        failures += abs(result.amplitude - 1e-12) > bound
    assert failures <= 2


def test_detection_needs_enough_data():
    times, values = _sinusoid(count=300)
    with pytest.raises(InsufficientDataError):
        cav.synchronous_detect(times, values, 0.01, 2, 600.0)
    with pytest.raises(InsufficientDataError):
        cav.synchronous_detect(times, values, 0.01, 2, 100.0)
    with pytest.raises(InsufficientDataError):
        cav.synchronous_detect(times[:1], values[:1], 0.01, 2, 1000.0)


def test_detection_rejects_uneven_sampling():
    times, values = _sinusoid()
    times = times.copy()
    times[10] += 0.5
    with pytest.raises(ValidationError):
        cav.synchronous_detect(times, values, 0.01, 2, 1000.0)
    with pytest.raises(ValidationError):
        cav.synchronous_detect(times, values, 0.01, 0, 1000.0)


def test_predicted_signal_without_sources_is_constant():
    config = ScenarioConfig()
    signal = cav.predicted_charge_signal(None, config, np.arange(10.0))
    assert np.all(signal == signal[0])
    assert signal[0] == pytest.approx(1.674e-12, rel=1e-3)


def test_predicted_signal_repeats_every_half_turn():
    config = ScenarioConfig()
    assembly = cav.SourceAssembly.from_config(config)
    times = np.arange(1000) * 1.0
    signal = cav.predicted_charge_signal(assembly, config, times)
    np.testing.assert_allclose(signal[:950], signal[50:], rtol=1e-12)
    first = cav.synchronous_detect(times, signal, 0.01, 1, 1000.0).amplitude
    second = cav.synchronous_detect(times, signal, 0.01, 2, 1000.0).amplitude
    assert second > 0
    assert first < 1e-9 * second


def test_odd_harmonics_vanish_for_slow_rotation():
    config = ScenarioConfig()
    config = dataclasses.replace(config, cavendish=dataclasses.replace(config.cavendish, rotation_hz=0.003))
    assembly = cav.SourceAssembly.from_config(config)
    times = np.arange(3500) * 1.0
    signal = cav.predicted_charge_signal(assembly, config, times)
    first = cav.synchronous_detect(times, signal, 0.003, 1, 3400.0).amplitude
    second = cav.synchronous_detect(times, signal, 0.003, 2, 3400.0).amplitude
    assert second > 0
    assert first < 1e-9 * second


def test_predicted_modulation_is_linear_in_mass():
    config = ScenarioConfig()
    times = np.arange(20) * 2.5
    light = cav.SourceAssembly(pile_mass=500.0)
    heavy = cav.SourceAssembly(pile_mass=1000.0)
    base = cav.predicted_charge_signal(None, config, times)
    delta_light = cav.predicted_charge_signal(light, config, times) - base
    delta_heavy = cav.predicted_charge_signal(heavy, config, times) - base
    np.testing.assert_allclose(delta_heavy, 2.0 * delta_light, rtol=1e-6, atol=1e-26)


def test_synthesized_record_is_seeded():
    config = ScenarioConfig()
    config = dataclasses.replace(config, cavendish=dataclasses.replace(config.cavendish, record_s=200.0))
    first = cav.synthesize_record(config, seed=3)
    second = cav.synthesize_record(config, seed=3)
    other = cav.synthesize_record(config, seed=4)
    assert len(first.t) == 200
    np.testing.assert_array_equal(first.charge_C, second.charge_C)
    np.testing.assert_array_equal(first.deflection_rad, other.deflection_rad)
    assert not np.array_equal(first.charge_C, other.charge_C)
    assert first.as_rows()[0][0] == 0.0


def test_synthesized_record_needs_two_samples():
    config = ScenarioConfig()
    config = dataclasses.replace(config, cavendish=dataclasses.replace(config.cavendish, record_s=1.0))
    with pytest.raises(InsufficientDataError):
        cav.synthesize_record(config)


@pytest.mark.parametrize("charge, deflection, expected", [
    (True, False, cav.Outcome.I),
    (False, True, cav.Outcome.II),
    (True, True, cav.Outcome.III),
    (False, False, cav.Outcome.IV),
])
def test_outcome_table(charge, deflection, expected):
    record = cav.classify_outcome(charge, deflection)
    assert record.classification is expected
    assert record.charge_separation_detected is charge
    assert record.deflection_detected is deflection


def test_hypotheses_map_to_outcomes():
    assert cav.expected_outcome(cav.Hypothesis.UNCERTAINTY_PRINCIPLE_WINS).classification is cav.Outcome.I
    assert cav.expected_outcome(cav.Hypothesis.EQUIVALENCE_PRINCIPLE_WINS).classification is cav.Outcome.II
    assert cav.expected_outcome(cav.Hypothesis.LATTICE_DRAGS_PAIRS).classification is cav.Outcome.III
    assert cav.expected_outcome(cav.Hypothesis.NEWTONIAN_GRAVITY_FAILS).classification is cav.Outcome.IV
