"""
test_perturbations.py
Tests the diamagnetic and tidal perturbation engines and the sweep manager
"""
import numpy as np
import pytest

from src.engines import diamagnetic_perturbation as dia
from src.engines import tidal_perturbation as tidal
from src.errors import DomainError, ValidationError
from src.perturbation_manager import PerturbationManager
from src.physical_constants import constants
from src.rydberg import MomentMode, circular_state

APPROX = MomentMode.PAPER_APPROX
STATE = circular_state(100)


def test_tidal_field_values():
    np.testing.assert_array_equal(tidal.tidal_field(0.0, 0.0, 5.0), np.zeros(3))
    h = tidal.tidal_field(0.01, 0.0, 1.0)
    assert h[0] == pytest.approx(1.539e-8, rel=1e-3)
    assert h[1] == 0.0 and h[2] == 0.0


def test_tidal_field_rejects_large_offsets():
    with pytest.raises(DomainError):
        tidal.tidal_field(1e4, 0.0, 1.0)


def test_field_model_requires_consistent_gravity():
    c = constants()
    with pytest.raises(ValidationError):
        tidal.TidalFieldModel(surface_gravity=9.0, earth_radius=c.earth_radius, earth_gm=c.earth_gm)


def test_diamagnetic_shift():
    assert dia.diamagnetic_shift(STATE, 0.0) == 0.0
    assert dia.diamagnetic_shift(STATE, 1.0, APPROX) == pytest.approx(9.86e-22, rel=2e-3)
    ratio = dia.diamagnetic_shift(STATE, 1.0) / dia.diamagnetic_shift(STATE, 1.0, APPROX)
    assert ratio == pytest.approx(1.01, rel=1e-12)
    assert dia.diamagnetic_shift(STATE, 2.0) == pytest.approx(4.0 * dia.diamagnetic_shift(STATE, 1.0), rel=1e-15)
    with pytest.raises(DomainError):
        dia.diamagnetic_shift(STATE, -1.0)


def test_magnetic_force():
    np.testing.assert_array_equal(dia.magnetic_force(STATE, (0.0, 0.0, 0.0)), np.zeros(3))
    force = dia.magnetic_force(STATE, (1.0, 0.0, 0.0), APPROX)
    assert force[0] == pytest.approx(-dia.diamagnetic_shift(STATE, 1.0, APPROX), rel=1e-15)
    assert force[1] == 0.0 and force[2] == 0.0


def test_gravitational_shift():
    assert tidal.gravitational_shift(STATE, 0.0) == 0.0
    assert tidal.gravitational_shift(STATE, 1.0, mode=APPROX) == pytest.approx(3.0e-55, rel=0.02)
    with pytest.raises(DomainError):
        tidal.gravitational_shift(STATE, -1.0)


def test_gravitational_force():
    np.testing.assert_array_equal(tidal.gravitational_force(STATE, 0.0, constants().earth_radius), np.zeros(3))
    force = tidal.gravitational_force(STATE, 1.0, constants().earth_radius, mode=APPROX)
    assert force[2] == pytest.approx(2.85e-61, rel=0.01)
    assert 0.0 < force[2] < 1e-50
    with pytest.raises(DomainError):
        tidal.gravitational_force(STATE, 1.0, 0.5 * constants().earth_radius)


@pytest.mark.parametrize("k", range(5))
def test_force_is_minus_gradient(k):
    c = constants()
    r = c.earth_radius * (1.0 + 1e-4 * k)
    analytic = tidal.gravitational_force(STATE, 1.0, r)[2]
    numeric = tidal.numerical_force(STATE, 1.0, r)
    assert numeric == pytest.approx(analytic, rel=1e-6)


def test_altitude_shift_matches_surface_shift_scale():
    c = constants()
    model = tidal.TidalFieldModel.from_constants(c)
    at_surface = tidal.energy_shift_at_altitude(STATE, 1.0, c.earth_radius)
    # g(R_E) from G·M differs from the pinned g by under 0.5%
    assert at_surface == pytest.approx(tidal.gravitational_shift(STATE, 1.0), rel=1e-2)
    assert model.gravity_at(2.0 * c.earth_radius) == pytest.approx(model.gravity_at(c.earth_radius) / 4.0, rel=1e-15)


def test_equivalent_magnetic_field_reproduces_shift():
    for t in (0.1, 1.0, 3.0):
        b = tidal.equivalent_magnetic_field(t)
        assert dia.diamagnetic_shift(STATE, b) == pytest.approx(tidal.gravitational_shift(STATE, t), rel=1e-12)


def test_landau_frequencies_agree_under_substitution():
    magnetic = dia.DiamagneticPerturbation()
    gravity = tidal.TidalPerturbation()
    t = 2.0
    assert magnetic.landau_frequency(tidal.equivalent_magnetic_field(t)) == pytest.approx(
        gravity.landau_frequency(t), rel=1e-12)


def test_engine_evaluate():
    engine = tidal.TidalPerturbation(mode=APPROX)
    result = engine.evaluate(STATE, 1.0)
    assert result.time_evaluated == 1.0
    assert result.energy_shift == pytest.approx(3.0e-55, rel=0.02)
    assert engine.gradient_mismatch(STATE, 1.0, constants().earth_radius) < 1e-6
    assert engine.describe()['drive'] == 't'
    assert dia.DiamagneticPerturbation().describe()['drive'] == 'B'


def test_manager_sweep_keeps_order():
    manager = PerturbationManager(max_workers=3)
    drives = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0]
    shifts = manager.sweep('tidal', STATE, drives)
    expected = [tidal.gravitational_shift(STATE, t) for t in drives]
    assert shifts == pytest.approx(expected, rel=1e-15)
    assert manager.get_engine('tidal') is manager.get_engine('TIDAL')


def test_manager_sweep_errors():
    manager = PerturbationManager()
    with pytest.raises(KeyError):
        manager.get_engine('stark')
    with pytest.raises(DomainError):
        manager.sweep('diamagnetic', STATE, [1.0, -1.0])
    assert manager.sweep('diamagnetic', STATE, []) == []
