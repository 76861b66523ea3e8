"""
test_electrostatics_circuit.py
Exact dumbbell electrostatics and the tidal/Coulomb balance of the two-cube circuit
"""
import dataclasses
import random
from fractions import Fraction

import pytest

from src import electrostatics_circuit as ec
from src.electrostatics_circuit import DumbbellPair, PointCharge, VoltageConvention
from src.errors import DomainError, SingularityError, ValidationError
from src.physical_constants import constants

C = constants()


def test_alpha_is_exactly_eleven_eighteenths():
    alpha = ec.alpha_constant()
    assert isinstance(alpha, Fraction)
    assert alpha == Fraction(11, 18)


def test_alpha_float_oracle():
    left = [(-1.0, 0.0), (1.0, 1.0)]
    right = [(1.0, 2.0), (-1.0, 3.0)]
    force = sum(qr * ql / (xr - xl) ** 2 for qr, xr in right for ql, xl in left)
    assert force == pytest.approx(float(ec.alpha_constant()), rel=1e-15)


def test_force_scales_with_charge_and_distance():
    scaled = DumbbellPair(
        left=(PointCharge(-2, 0), PointCharge(2, 2)),
        right=(PointCharge(2, 4), PointCharge(-2, 6)),
    )
    # Q → 2Q, L → 2L: 4 / 4
    assert ec.coulomb_force(scaled.charges(), scaled.right_indices) == Fraction(11, 18)
    spread = DumbbellPair(
        left=(PointCharge(-1, 0), PointCharge(1, 3)),
        right=(PointCharge(1, 6), PointCharge(-1, 9)),
    )
    assert ec.coulomb_force(spread.charges(), spread.right_indices) == Fraction(11, 18) / 9


def test_newtons_third_law_with_random_rationals():
    rng = random.Random(7)
    for _ in range(20):
        positions = rng.sample(range(-50, 50), 5)
        config = [PointCharge(Fraction(rng.randint(-5, 5), rng.randint(1, 4)), Fraction(x, 7)) for x in positions]
        group = {0, 2}
        rest = {1, 3, 4}
        assert ec.axial_force(config, group) == -ec.axial_force(config, rest)


def test_three_dimensional_pythagorean_distance():
    config = [PointCharge(1, (0, 0, 0)), PointCharge(1, (3, 4, 0))]
    assert ec.axial_force(config, [1], axis=0) == Fraction(3, 125)
    assert ec.axial_force(config, [1], axis=1) == Fraction(4, 125)
    assert ec.axial_force(config, [1], axis=2) == 0


def test_irrational_distance_is_rejected():
    config = [PointCharge(1, (0, 0, 0)), PointCharge(1, (1, 1, 0))]
    with pytest.raises(DomainError):
        ec.axial_force(config, [1])


def test_repulsion_needs_separated_centres():
    # the group {-1 at 0, -1 at 2} and the charge +1 at 1 share the centre x = 1
    config = [PointCharge(-1, 0), PointCharge(1, 1), PointCharge(-1, 2)]
    with pytest.raises(ValidationError):
        ec.coulomb_force(config, [0, 2])
    assert ec.axial_force(config, [0, 2]) == 0


def test_coincident_charges_are_singular():
    config = [PointCharge(1, 0), PointCharge(-1, 0)]
    with pytest.raises(SingularityError):
        ec.axial_force(config, [1])


@pytest.mark.parametrize("on_group", [[], [5]])
def test_bad_group_is_rejected(on_group):
    with pytest.raises(ValidationError):
        ec.axial_force(DumbbellPair.canonical().charges(), on_group)


def test_dumbbell_validation():
    with pytest.raises(ValidationError):
        DumbbellPair(left=(PointCharge(-1, 0), PointCharge(2, 1)), right=(PointCharge(2, 2), PointCharge(-1, 3)))
    with pytest.raises(ValidationError):
        DumbbellPair(left=(PointCharge(-1, 0), PointCharge(1, 1)), right=(PointCharge(1, 2), PointCharge(-1, 4)))


@pytest.mark.parametrize("convention, expected", [
    (VoltageConvention.ALL_OTHER_CHARGES, Fraction(-5, 3)),
    (VoltageConvention.OTHER_DUMBBELL_ONLY, Fraction(1, 3)),
    (VoltageConvention.PARTNER_ONLY, Fraction(-2)),
    (VoltageConvention.MIDPOINT_NEAREST_CHARGE, Fraction(1, 2)),
])
def test_voltage_conventions(convention, expected):
    result = ec.dumbbell_voltage(DumbbellPair.canonical(), convention)
    assert result.value == expected
    assert result.convention is convention


def test_beta_candidates_report_discrepancy():
    candidates = ec.beta_candidates()
    assert set(candidates.values) == {convention.label for convention in VoltageConvention}
    assert candidates.published == Fraction(-2, 3)
    assert candidates.discrepancy
    assert Fraction(-2, 3) not in candidates.values.values()


def test_convention_labels():
    assert VoltageConvention.from_label("partner-only") is VoltageConvention.PARTNER_ONLY
    with pytest.raises(ValidationError):
        VoltageConvention.from_label("nearest")


def test_innermost_term_dominates():
    report = ec.innermost_dominance()
    assert report.innermost_term == 1
    assert report.other_terms_sum == Fraction(-7, 18)
    assert report.other_terms_abs_sum == Fraction(11, 18)
    assert report.innermost_term > report.other_terms_abs_sum
    assert report.repulsive
    assert report.innermost_term + report.other_terms_sum == ec.alpha_constant()


def test_tidal_force_and_voltage_scale():
    assert ec.tidal_force_on_cube(1e4, 0.01) == pytest.approx(1.539e-10, rel=1e-3)
    assert ec.freefall_voltage_scale(1e4, 0.01) == pytest.approx(1.176, rel=1e-3)
    assert ec.tidal_force_on_cube(0.0, 0.01) == 0.0
    with pytest.raises(DomainError):
        ec.tidal_force_on_cube(-1.0, 0.01)


def test_capacitance_scale():
    assert ec.capacitance_scale(0.01) == pytest.approx(1.113e-12, rel=1e-3)
    with pytest.raises(DomainError):
        ec.capacitance_scale(0.0)


def test_equilibrium_chain():
    result = ec.equilibrium_solve(1e4, 0.01)
    assert result.Q == pytest.approx(1.674e-12, rel=1e-3)
    assert result.V == pytest.approx(1.003, rel=1e-3)
    assert result.residual <= 1e-12
    assert result.beta_sign == -1
    chain = (2.0 / 3.0) / (11.0 / 18.0) ** 0.5 * ec.freefall_voltage_scale(1e4, 0.01)
    assert result.V == pytest.approx(chain, rel=1e-12)
    # the capacitance picture gives the same order of magnitude
    assert 0.1 < result.Q / ec.capacitance_scale(0.01) < 10.0


def test_equilibrium_scaling_with_alpha():
    base = ec.equilibrium_solve(1e4, 0.01)
    halved = ec.equilibrium_solve(1e4, 0.01, alpha=Fraction(11, 36))
    assert halved.Q == pytest.approx(base.Q * 2 ** 0.5, rel=1e-12)


def test_equilibrium_without_gravity():
    flat = dataclasses.replace(constants(), surface_gravity=0.0)
    result = ec.equilibrium_solve(1e4, 0.01, c=flat)
    assert result.Q == 0.0
    assert result.V == 0.0
    assert result.residual == 0.0


@pytest.mark.parametrize("kwargs", [
    {'alpha': Fraction(0)},
    {'alpha': Fraction(-1, 2)},
    {'beta': Fraction(0)},
    {'rho': -1.0},
    {'L': 0.0},
])
def test_equilibrium_domain_errors(kwargs):
    arguments = {'rho': 1e4, 'L': 0.01}
    arguments.update(kwargs)
    with pytest.raises(DomainError):
        ec.equilibrium_solve(**arguments)


def test_equilibrium_record():
    record = ec.equilibrium_solve(1e4, 0.01).to_record()
    assert set(record) == {'alpha', 'Q_coulomb', 'V_volt', 'F_tidal_newton', 'residual', 'beta_convention'}
    assert record['alpha'] == "11/18"
    assert "-2/3" in record['beta_convention']
