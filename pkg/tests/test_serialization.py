import io
import json
from fractions import Fraction

import pytest

from cy3_bounds.algebra.forms import LinearFormC2, TrilinearForm, UnsupportedRankError
from cy3_bounds.algebra.real_algebraic import RealAlgebraic
from cy3_bounds.entities import ErrorRecord, FormsMode
from cy3_bounds.geometry.cone2 import Cone2
from cy3_bounds.geometry.rays import Ray2
from cy3_bounds.serialization.json_codec import (
    DecodeError,
    decode_algebraic,
    decode_cone,
    decode_ray,
    encode_algebraic,
    encode_cone,
    encode_forms,
    encode_rational,
    encode_ray,
    parse_forms_instance,
    parse_rational,
)
from cy3_bounds.serialization.jsonl_reader import FormsRecord, ingest_jsonl, read_records
from cy3_bounds.services.flops.flops import FormsState


@pytest.mark.parametrize("text, value", [
    (3, Fraction(3)),
    ("-7", Fraction(-7)),
    ("2/4", Fraction(1, 2)),
    (" 5 / -3 ", Fraction(-5, 3)),
])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("text", ["1/0", "x", "1.5", True, None, [1]])
def test_parse_rational_rejects(text):
    with pytest.raises(DecodeError):
        parse_rational(text)


def test_encode_rational():
    assert encode_rational(Fraction(4, 2)) == 2
    assert encode_rational(Fraction(-1, 3)) == "-1/3"
    assert encode_rational(2 ** 60) == str(2 ** 60)


def test_parse_forms_instance():
    state = parse_forms_instance({"rank": 2, "trilinear": {"112": 1, "122": "1"}, "c2": [12, 12], "id": 7})
    assert state.trilinear.mode == FormsMode.topological
    assert state.trilinear.entry(0, 1, 0) == 1
    assert state.trilinear.entry(1, 1, 0) == 1
    assert state.trilinear.entry(0, 0, 0) == 0
    assert state.c2 == LinearFormC2((12, 12))


@pytest.mark.parametrize("data", [
    {"rank": 2, "trilinear": {"12": 1}, "c2": [0, 0]},
    {"rank": 2, "trilinear": {"211": 1}, "c2": [0, 0]},
    {"rank": 2, "trilinear": {"111": 1}},
    "not an object",
])
def test_parse_forms_instance_rejects(data):
    with pytest.raises(DecodeError):
        parse_forms_instance(data)


def test_parse_forms_instance_rank_three():
    with pytest.raises(UnsupportedRankError):
        parse_forms_instance({"rank": 3, "trilinear": {"123": 1}, "c2": [0, 0, 0]})


def test_encode_forms(topological_state):
    assert encode_forms(topological_state) == {
        "rank": 2,
        "mode": "topological",
        "trilinear": {"112": 1, "122": 1},
        "c2": [12, 12],
    }
    normal = FormsState(TrilinearForm.from_cubic(0, 1, 1, 0), LinearFormC2((6, 6)))
    assert encode_forms(normal)["trilinear"] == {"112": "1/3", "122": "1/3"}
    assert parse_forms_instance(encode_forms(normal)).trilinear == normal.trilinear


def test_ray_codec():
    assert encode_ray(Ray2.integral(2, -4)) == {"int": [1, -2]}
    sqrt3 = RealAlgebraic.from_isolating_interval([-3, 0, 1], Fraction(1), Fraction(2))
    ray = Ray2.sloped(-1, sqrt3)
    data = encode_ray(ray)
    assert data["alg"]["sign"] == -1
    assert data["alg"]["slope"]["poly"] == [-3, 0, 1]
    assert decode_ray(json.loads(json.dumps(data))) == ray
    assert decode_algebraic(encode_algebraic(sqrt3)) == sqrt3


def test_decode_ray_rejects_garbage():
    with pytest.raises(DecodeError):
        decode_ray({"alg": {"sign": 1}})
    with pytest.raises(DecodeError):
        decode_ray({"int": [1]})
    with pytest.raises(DecodeError):
        decode_ray({"int": ["1/2", 1]})


def test_decode_algebraic_needs_integer_coefficients():
    with pytest.raises(DecodeError):
        decode_algebraic({"poly": ["1/2", 0, 1], "interval": ["-1", "1"]})
    sqrt3 = RealAlgebraic.from_isolating_interval([-3, 0, 1], Fraction(1), Fraction(2))
    assert decode_algebraic({"poly": ["-3/1", 0, "1"], "interval": ["1", "2"]}) == sqrt3


def test_cone_codec():
    cone = Cone2(Ray2.integral(1, 0), Ray2.integral(-1, 1))
    assert decode_cone(json.loads(json.dumps(encode_cone(cone)))) == cone
    with pytest.raises(DecodeError):
        decode_cone({"lo": {"int": [1, 0]}})
    with pytest.raises(DecodeError):
        decode_cone([1, 0])


def test_read_records():
    text = "\n".join([
        '{"rank": 2, "trilinear": {"111": 1}, "c2": [0, 1], "id": "a"}',
        "",
        '{"rank": 2, "trilinear": {"111": "1/0"}, "c2": [0, 1]}',
        "[1, 2",
        '{"rank": 2, "trilinear": {"222": 1}, "c2": [1, 0]}',
    ])
    records = list(read_records(io.StringIO(text)))
    assert [record.line for record in records] == [1, 3, 4, 5]
    first, bad_value, bad_line, last = records
    assert isinstance(first, FormsRecord)
    assert first.record_id == "a"
    assert isinstance(bad_value, ErrorRecord)
    assert bad_value.error == "DecodeError"
    assert bad_line.error == "InvalidLineError"
    assert isinstance(last, FormsRecord)
    assert last.record_id is None
    assert last.state.c2 == LinearFormC2((1, 0))


def test_read_records_of_blank_input():
    assert list(read_records(io.StringIO("\n\n"))) == []


def test_ingest_jsonl(tmp_path):
    path = tmp_path / "corpus.jsonl"
    path.write_text('{"rank": 2, "trilinear": {"112": 1}, "c2": [2, 0], "id": 1}\n', encoding="utf-8")
    records = list(ingest_jsonl(path))
    assert len(records) == 1
    assert records[0].record_id == 1
