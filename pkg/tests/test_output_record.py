"""
test_output_record.py
Result records: units, provenance and deterministic serialization
"""
import io
import json
from fractions import Fraction

import numpy as np
import pytest

from src.errors import ValidationError
from src.output_record import (PLUMBING_SOURCE, OutputRecord, format_number, render_csv, round_significant,
                               write_text)


def _record():
    record = OutputRecord('circuit', inputs={'L_m': 0.01, 'alpha': Fraction(11, 18)})
    record.add('Q_coulomb', 1.6740512345678912e-12, 'C', 'tidal/Coulomb balance')
    record.add('alpha', Fraction(11, 18), '1', 'exact dumbbell force')
    record.add('converged', np.bool_(True), '1')
    return record


def test_round_significant():
    assert round_significant(1.23456789012345, 3) == 1.23
    assert round_significant(0.0) == 0.0
    assert np.isnan(round_significant(float('nan')))


def test_add_requires_unit_and_source():
    record = OutputRecord('circuit')
    with pytest.raises(ValidationError):
        record.add('Q', 1.0, '')
    with pytest.raises(ValidationError):
        record.add('Q', 1.0, 'C', '')
    record.add('Q', 1.0, 'C')
    with pytest.raises(ValidationError):
        record.add('Q', 2.0, 'C')


def test_provenance_lists_each_source_once():
    record = _record()
    record.add('V_volt', 1.0, 'V', 'tidal/Coulomb balance')
    assert record.provenance == ['tidal/Coulomb balance', 'exact dumbbell force', PLUMBING_SOURCE]


def test_json_document():
    document = json.loads(_record().to_json())
    assert document['schema_version'] == 1
    assert document['subcommand'] == 'circuit'
    assert document['inputs']['alpha'] == "11/18"
    assert document['results']['alpha'] == {'value': "11/18", 'unit': '1', 'source': 'exact dumbbell force'}
    assert document['results']['Q_coulomb']['value'] == 1.67405123457e-12
    assert document['results']['converged']['value'] is True


def test_json_is_byte_stable():
    assert _record().to_json() == _record().to_json()
    assert _record().to_json().endswith("}\n")


def test_csv_layout():
    lines = _record().to_csv(digits=4).splitlines()
    assert lines[0] == "name,value,unit,source"
    assert lines[1] == "Q_coulomb,1.674e-12,C,tidal/Coulomb balance"
    assert lines[2] == "alpha,11/18,1,exact dumbbell force"
    assert lines[3] == f"converged,True,1,{PLUMBING_SOURCE}"


def test_render_csv_and_format_number():
    assert format_number(0.1 + 0.2, 6) == "0.3"
    assert format_number(True) == "True"
    assert format_number(3) == "3"
    text = render_csv(('t', 'x'), [(0.0, 1.0), (0.5, np.float64(2.25))], digits=6)
    assert text == "t,x\n0,1\n0.5,2.25\n"


def test_write_text(tmp_path):
    stream = io.StringIO()
    write_text(None, "abc\n", stream)
    assert stream.getvalue() == "abc\n"
    target = tmp_path / "out.json"
    write_text(str(target), "abc\n")
    assert target.read_bytes() == b"abc\n"
