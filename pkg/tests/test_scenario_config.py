"""
test_scenario_config.py
Tests loading, validation and normalization of the scenario document
"""
import json
from fractions import Fraction

import pytest

from src.errors import MalformedInputError, ValidationError
from src.scenario_config import ScenarioConfig, config_to_dict, load_config, load_config_file, serialize_config


def test_empty_document_gives_defaults():
    config = load_config("")
    assert config == ScenarioConfig()
    assert config.cube_edge == 0.01
    assert config.density == 1.0e4
    assert config.principal_n == 100
    assert config.circuit.alpha == Fraction(11, 18)
    assert config.circuit.beta == Fraction(-2, 3)
    assert config.cavendish.pile_count == 2


def test_partial_document_keeps_other_defaults():
    config = load_config(json.dumps({'circuit': {'L_m': 0.02}, 'atom': {'n': 50}}))
    assert config.cube_edge == 0.02
    assert config.density == 1.0e4
    assert config.principal_n == 50
    assert config.drop.duration_s == 1.0


@pytest.mark.parametrize("document", [
    {'circuit': {'L_m': -1}},
    {'circuit': {'rho_kg_m3': 0}},
    {'atom': {'n': 0}},
    {'drop': {'step_s': 0.0}},
    {'drop': {'height_m': -5.0}},
    {'circuit': {'alpha': '-1/2'}},
    {'circuit': {'beta': '0'}},
])
def test_sign_constraints(document):
    with pytest.raises(ValidationError):
        load_config(json.dumps(document))


@pytest.mark.parametrize("document, key", [
    ({'circuit': {'width': 1.0}}, 'circuit.width'),
    ({'plasma': {}}, 'plasma'),
    ({'atom': {'n': 10.5}}, 'atom.n'),
    ({'atom': {'n': True}}, 'atom.n'),
    ({'circuit': {'L_m': 'wide'}}, 'circuit.L_m'),
    ({'circuit': {'alpha': 'eleven'}}, 'circuit.alpha'),
])
def test_malformed_input_names_key(document, key):
    with pytest.raises(MalformedInputError) as excinfo:
        load_config(json.dumps(document))
    assert excinfo.value.key == key


def test_invalid_json():
    with pytest.raises(MalformedInputError):
        load_config("{not json")


def test_rational_parameters():
    config = load_config(json.dumps({'circuit': {'alpha': '1/2', 'beta': 2}}))
    assert config.circuit.alpha == Fraction(1, 2)
    assert config.circuit.beta == Fraction(2)
    assert config_to_dict(config)['circuit']['alpha'] == '1/2'


def test_serialize_is_normalized():
    text = serialize_config(load_config(json.dumps({'atom': {'n': 7}})))
    assert serialize_config(load_config(text)) == text
    document = json.loads(text)
    assert set(document) == {'circuit', 'atom', 'drop', 'cavendish'}
    assert document['atom']['n'] == 7
    assert document['circuit']['alpha'] == '11/18'


def test_load_from_file(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps({'drop': {'separation_m': 2.0}}), encoding='utf-8')
    assert load_config_file(str(path)).drop.separation_m == 2.0
