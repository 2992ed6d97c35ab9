"""Canonical documents, the content-addressed cache, and exports."""

import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcft.characters import QSeries, eta_series
from bcft.errors import DocumentFormatError, MigrationError
from bcft.fusion import verlinde
from bcft.invariants import enumerate_physical
from bcft.nimreps import enumerate_su2_nimreps, regular_nimrep
from bcft.persistence import (
    ARTIFACT_VERSION,
    Cache,
    cache_key,
    canonical_json,
    deserialize,
    export,
    make_entry,
    serialize,
)
from bcft.report import index_document, index_report
from conftest import fusion_minimal, minimal, su2

# ---------------------------------------------------------------------------
# serialize / deserialize round trips


def _domain_objects():
    md = su2(10)
    yield minimal(5, 2)
    yield md
    yield fusion_minimal(4, 3)
    yield [z for z in enumerate_physical(md) if z.tag == "E6"][0]
    yield enumerate_su2_nimreps(md, 6)[0]
    yield regular_nimrep(fusion_minimal(4, 3))
    yield eta_series(40)
    yield QSeries(Fraction(-3, 8), 8, (1, 0, -2, 5))


@pytest.mark.parametrize("obj", list(_domain_objects()), ids=lambda o: type(o).__name__)
def test_round_trip_is_exact(obj):
    doc = serialize(obj)
    assert deserialize(doc) == obj
    # and the document itself survives a JSON round trip
    assert deserialize(json.loads(canonical_json(doc))) == obj


def test_report_documents_pass_through():
    md = minimal(4, 3)
    doc = index_document(md, index_report(md, (1, 0, 1)))
    assert serialize(doc) is doc
    assert deserialize(doc) is doc


def test_serialize_rejects_unknown_types():
    with pytest.raises(TypeError):
        serialize(object())
    with pytest.raises(TypeError):
        serialize({"no_format_field": 1})


def test_deserialize_version_and_format_errors():
    with pytest.raises(DocumentFormatError):
        deserialize({"not": "a document"})
    with pytest.raises(DocumentFormatError):
        deserialize("just a string")
    with pytest.raises(DocumentFormatError):
        deserialize({"format": "somebody-elses/1"})
    with pytest.raises(MigrationError) as exc:
        deserialize({"format": "bcft-model/2"})
    assert "bcft-model" in str(exc.value)
    with pytest.raises(MigrationError):
        deserialize({"format": "bcft-report/0"})


# ---------------------------------------------------------------------------
# canonical text and keys


def test_canonical_json_is_key_order_insensitive():
    a = {"b": 1, "a": [1, 2], "c": {"y": 1, "x": 2}}
    b = {"c": {"x": 2, "y": 1}, "a": [1, 2], "b": 1}
    assert canonical_json(a) == canonical_json(b)


def test_cache_key_is_stable_across_builds():
    key = cache_key("fusion", {"model": "su2_2"}, precision=50)
    assert key == "41f3c57cd40ab404d3dd540ab0b1fa1318f5c808d8ea9068877217c984f3fb92"


def test_cache_key_distinguishes_every_field():
    base = cache_key("fusion", {"model": "su2_2"}, precision=50, order=None)
    assert cache_key("invariants", {"model": "su2_2"}, precision=50) != base
    assert cache_key("fusion", {"model": "su2_3"}, precision=50) != base
    assert cache_key("fusion", {"model": "su2_2"}, precision=30) != base
    assert cache_key("fusion", {"model": "su2_2"}, precision=50, order=100) != base
    assert cache_key("fusion", {"model": "su2_2"}, precision=50) == base


# ---------------------------------------------------------------------------
# the cache directory


def test_cache_store_load_round_trip(tmp_path):
    cache = Cache(tmp_path / "cache")
    md = minimal(4, 3)
    fr = verlinde(md)
    entry = make_entry("fusion", {"model": "minimal_4_3"}, fr, precision=50)
    key = cache.store(entry)
    assert key == entry.key
    path = cache.path_for(key)
    assert path.is_file()
    assert path.parent.name == key[:2]
    assert path.name == key + ".json"
    payload = cache.load(key)
    assert payload == serialize(fr)
    assert canonical_json(payload) == canonical_json(serialize(fr))
    assert deserialize(payload) == fr


def test_cache_miss_returns_none(tmp_path):
    assert Cache(tmp_path).load("ab" + "0" * 62) is None


def test_cache_meta_records_build_and_operation(tmp_path):
    entry = make_entry("fusion", {"model": "su2_1"}, verlinde(su2(1)))
    assert entry.meta["artifact"] == ARTIFACT_VERSION
    assert entry.meta["operation"] == "fusion"
    cache = Cache(tmp_path)
    cache.store(entry)
    wrapper = json.loads(cache.path_for(entry.key).read_text())
    assert wrapper["format"] == "bcft-cache/1"
    assert wrapper["key"] == entry.key
    assert wrapper["meta"]["artifact"] == ARTIFACT_VERSION


def test_cache_refuses_foreign_versions_and_mismatched_keys(tmp_path):
    cache = Cache(tmp_path)
    key1 = "aa" + "1" * 62
    key2 = "bb" + "2" * 62
    p = cache.path_for(key1)
    p.parent.mkdir(parents=True)
    p.write_text(json.dumps({"format": "bcft-cache/9", "key": key1, "payload": {}}))
    with pytest.raises(MigrationError):
        cache.load(key1)
    p2 = cache.path_for(key2)
    p2.parent.mkdir(parents=True)
    p2.write_text(
        json.dumps({"format": "bcft-cache/1", "key": key1, "payload": {}})
    )
    with pytest.raises(DocumentFormatError):
        cache.load(key2)


def test_cache_writes_leave_no_temp_files(tmp_path):
    cache = Cache(tmp_path)
    for k in (1, 2, 3):
        cache.store(make_entry("model", {"level": k}, su2(k)))
    names = [p.name for p in tmp_path.rglob("*") if p.is_file()]
    assert names and all(
        n.endswith(".json") and not n.startswith(".tmp-") for n in names
    )


def test_cache_store_is_idempotent(tmp_path):
    cache = Cache(tmp_path)
    entry = make_entry("model", {"level": 2}, su2(2))
    cache.store(entry)
    first = cache.path_for(entry.key).read_bytes()
    cache.store(entry)
    assert cache.path_for(entry.key).read_bytes() == first


# ---------------------------------------------------------------------------
# exports


def test_structured_export_is_deterministic():
    fr = fusion_minimal(5, 2)
    assert export(fr) == export(fr)
    assert export(fr).endswith("\n")
    assert json.loads(export(fr))["format"] == "bcft-fusion/1"


def test_text_export_lists_fields():
    md = minimal(4, 3)
    text = export(index_document(md, index_report(md, (1, 0, 1))), "text")
    assert "d_pi:" in text
    assert "two_interval:" in text
    with pytest.raises(ValueError):
        export(md, "yaml")


# ---------------------------------------------------------------------------
# document equality tracks object equality


@st.composite
def qseries_strategy(draw):
    grid = draw(st.sampled_from([1, 2, 24, 48]))
    num = draw(st.integers(min_value=-40, max_value=40))
    coeffs = draw(
        st.lists(st.integers(min_value=-5, max_value=5), min_size=1, max_size=6)
    )
    return QSeries(Fraction(num, grid), grid, tuple(coeffs))


@settings(max_examples=120, deadline=None)
@given(qseries_strategy(), qseries_strategy())
def test_document_equality_iff_object_equality(f, g):
    assert (serialize(f) == serialize(g)) == (f == g)
    assert deserialize(serialize(f)) == f
