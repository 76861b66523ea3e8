"""
test_physical_constants.py
Tests the pinned constant set, its self-consistency and dimensional bookkeeping
"""
import math
from dataclasses import replace

import pytest
from scipy import constants as sp

from src import quantity as q
from src.errors import DimensionError, ValidationError
from src.physical_constants import constants, consistency_report, dimension, verify_consistency


def test_pinned_values():
    c = constants()
    assert c.bohr_radius == 5.29177210903e-11
    assert c.flux_quantum == pytest.approx(2.067833848e-15, rel=1e-9)
    assert c.bohr_magneton == pytest.approx(9.2740e-24, rel=1e-4)
    assert c.electron_charge == sp.e


def test_constants_is_shared_instance():
    assert constants() is constants()


def test_bohr_radius_dimension():
    assert dimension('bohr_radius') == (1, 0, 0, 0, 0, 0, 0)
    assert constants().quantity('flux_quantum').dimension == q.MAGNETIC_FLUX


def test_consistency_passes_for_pinned_set():
    verify_consistency()
    report = consistency_report(constants())
    assert report['flux_quantum'] == 0.0
    assert report['surface_gravity'] < 5e-3


def test_consistency_detects_tampered_set():
    tampered = replace(constants(), bohr_radius=constants().bohr_radius * (1 + 1e-6))
    with pytest.raises(ValidationError):
        verify_consistency(tampered)


def test_derived_properties():
    c = constants()
    assert c.coulomb_constant == pytest.approx(8.9875517923e9, rel=1e-9)
    assert c.earth_gm == pytest.approx(3.98602e14, rel=1e-5)


def test_quantity_arithmetic():
    length = q.Quantity(2.0, q.LENGTH)
    time = q.Quantity(4.0, q.TIME)
    speed = length / time
    assert speed.dimension == q.VELOCITY
    assert speed.value == 0.5
    area = length * length
    assert area.sqrt().dimension == q.LENGTH
    assert (length + length).value == 4.0
    assert (1.0 / time).dimension == q.FREQUENCY


def test_quantity_dimension_errors():
    length = q.Quantity(1.0, q.LENGTH)
    with pytest.raises(DimensionError):
        length + q.Quantity(1.0, q.TIME)
    with pytest.raises(DimensionError):
        length.sqrt()
    with pytest.raises(DimensionError):
        length ** 0.5


def test_derived_unit_chain():
    # e·ħ/(2m) has the dimension of a magnetic moment
    c = constants()
    moment = c.quantity('electron_charge') * c.quantity('reduced_planck') / (2 * c.quantity('electron_mass'))
    assert moment.is_close(c.quantity('bohr_magneton'), rel=1e-9)
    assert math.isclose(moment.value, c.bohr_magneton, rel_tol=1e-9)
