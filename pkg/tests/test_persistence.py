import io
import json

import pytest

from foodnet import KnowledgeBase, load, save, union
from foodnet.errors import ParseError, SchemaError, ValidationError
from foodnet.notation import fmt_number
from foodnet.persistence import (
    canonical_json,
    load_modifier,
    load_path,
    modifier_to_document,
    to_document,
)

import builders


def doc_of(kb):
    return json.loads(save(kb))


class TestFixtures:
    @pytest.mark.parametrize("name, build", [("square.json", builders.square_kb),
                                             ("polygons.json", builders.polygons_kb)])
    def test_fixture_matches_builder(self, fixtures_dir, name, build):
        assert load_path(fixtures_dir / name) == build()
        assert (fixtures_dir / name).read_bytes() == save(build())

    def test_polygons(self, fixtures_dir):
        kb = load_path(fixtures_dir / "polygons.json")
        assert (len(kb.classes), len(kb.objects)) == (2, 2)

    def test_memberships_survive(self, fixtures_dir, polygons_kb):
        kb = load_path(fixtures_dir / "polygons.json")
        for oid in ("A", "B"):
            for p, q in zip(kb.object(oid).spec, polygons_kb.object(oid).spec):
                assert p == q

    def test_empty(self, fixtures_dir):
        kb = load_path(fixtures_dir / "empty.json")
        assert kb == KnowledgeBase()

    def test_modifier_files(self, fixtures_dir):
        with open(fixtures_dir / "square_to_rhombus.json", "rb") as fh:
            assert load_modifier(fh) == builders.square_to_rhombus()
        with open(fixtures_dir / "dilute_angles_equal.json", "rb") as fh:
            assert load_modifier(fh) == builders.dilute_angles_equal(2)


class TestRoundTrip:
    def test_with_generated_classes(self, polygons_kb):
        union(polygons_kb.object("A"), polygons_kb.object("B"), polygons_kb)
        again = load(save(polygons_kb))
        assert again == polygons_kb
        assert save(again) == save(polygons_kb)

    def test_deterministic(self, polygons_kb):
        assert save(polygons_kb) == save(polygons_kb)
        assert save(polygons_kb) == save(polygons_kb.copy())

    def test_sources(self, polygons_kb):
        data = save(polygons_kb)
        assert load(data) == load(data.decode()) == load(io.BytesIO(data)) == polygons_kb

    def test_modifier_document(self):
        m = builders.square_to_rhombus()
        assert load_modifier(canonical_json(modifier_to_document(m))) == m


class TestCanonical:
    @pytest.mark.parametrize("x, text", [(1.0, "1"), (0.5, "0.5"), (2.2, "2.2"), (-0.0, "0"),
                                         (1 / 3, "0.333333333"), (4.840000000001, "4.84")])
    def test_numbers(self, x, text):
        assert fmt_number(x) == text

    def test_sorted_keys(self):
        assert canonical_json({"b": 1, "a": [1, 2]}) == '{\n  "a": [1, 2],\n  "b": 1\n}'


class TestErrors:
    def test_missing_class(self, polygons_kb):
        doc = doc_of(polygons_kb)
        doc["objects"][1]["class"] = "T(C)"
        with pytest.raises(ValidationError) as info:
            load(json.dumps(doc))
        assert info.value.path == "$.objects[1].class"
        assert "T(C)" in str(info.value)

    def test_schema(self, polygons_kb):
        doc = doc_of(polygons_kb)
        del doc["objects"][0]["id"]
        with pytest.raises(SchemaError) as info:
            load(json.dumps(doc))
        assert info.value.path.startswith("$.objects[0]")

    def test_not_json(self):
        with pytest.raises(SchemaError):
            load(b"{nope")

    def test_version(self, polygons_kb):
        doc = doc_of(polygons_kb)
        doc["format_version"] = 2
        with pytest.raises(SchemaError):
            load(json.dumps(doc))

    def test_bad_expression(self, polygons_kb):
        doc = doc_of(polygons_kb)
        doc["classes"][0]["signature"][0]["body"] = "4*"
        with pytest.raises(ParseError) as info:
            load(json.dumps(doc))
        assert info.value.column == 3

    def test_bad_degree(self, polygons_kb):
        doc = doc_of(polygons_kb)
        doc["classes"][0]["spec"][4] = {"name": "sides_equal", "verification": 1.5}
        with pytest.raises(ValidationError) as info:
            load(json.dumps(doc))
        assert info.value.path.startswith("$.classes[0].spec[4]")

    def test_property_mismatch(self, polygons_kb):
        doc = doc_of(polygons_kb)
        del doc["objects"][0]["spec"][0]
        with pytest.raises(ValidationError) as info:
            load(json.dumps(doc))
        assert info.value.path == "$.objects[0].spec"

    def test_unknown_rule_property(self, polygons_kb):
        doc = doc_of(polygons_kb)
        doc["rules"][0]["sources"] = ["colour"]
        with pytest.raises(ValidationError) as info:
            load(json.dumps(doc))
        assert info.value.path == "$.rules[0]"

    def test_dangling_derivation(self, polygons_kb):
        doc = doc_of(polygons_kb)
        doc["derivations"] = [{"operation": "clone", "inputs": ["A"], "output": "A_9"}]
        with pytest.raises(ValidationError) as info:
            load(json.dumps(doc))
        assert info.value.path == "$.derivations[0].output"

    def test_duplicate_object(self, polygons_kb):
        doc = doc_of(polygons_kb)
        doc["objects"][1]["id"] = "A"
        with pytest.raises(ValidationError):
            load(json.dumps(doc))

    def test_guard_on_quantitative_property(self, polygons_kb):
        doc = doc_of(polygons_kb)
        doc["classes"][0]["signature"][1]["guard"] = "sides = 4"
        with pytest.raises(ValidationError):
            load(json.dumps(doc))


def test_document_shape(polygons_kb):
    doc = to_document(polygons_kb)
    assert sorted(doc) == ["classes", "derivations", "format_version", "objects", "rules"]
    assert doc["format_version"] == 1
    sides_equal = next(p for p in doc["objects"][0]["spec"] if p["name"] == "sides_equal")
    assert sides_equal == {"name": "sides_equal", "verification": 1}


def test_guards_checked_per_projection():
    # "flag" is a degree in one projection and a length in the other
    from foodnet import CrispScalar, FuzzyObject, Property, Verification, homogeneous, method

    guarded = homogeneous("G", [Property("flag", Verification(1.0))],
                          [method("scale", ["a"], "2*a", guard="flag = 1")])
    plain = homogeneous("P", [Property("flag", CrispScalar(3, "cm"))])
    kb = KnowledgeBase([guarded, plain], [FuzzyObject("g", "G", guarded.body.spec),
                                          FuzzyObject("p", "P", plain.body.spec)])
    union(kb.object("g"), kb.object("p"), kb)
    assert load(save(kb)) == kb
