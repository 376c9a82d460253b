from __future__ import annotations

import dataclasses
import random

import pytest
from hypothesis import given, settings, strategies as st

from mesml import ParseCategory, SpecParseError, ViewTag, parse_spec, serialize_spec
from mesml.metamodel import EventExec, GatewayExec, LinkModel
from mesml.synth import random_spec

from conftest import fixture_text

YOGURT = fixture_text("yogurt.mesml")

# (old text, new text, category, line): each introduces exactly one problem.
MUTATIONS = [
    ("{id: pm_fill, name: Fill tank, exec: automatic,", "{id: pm_fill, name: Fill tank, exec: automagic,",
     ParseCategory.BAD_ENUM, 78),
    ("{id: l_pm, name: production management, rank: 0}",
     "{id: l_pm, name: production management, rank: 0, colour: red}", ParseCategory.UNKNOWN_KEY, 131),
    ("- id: sn_xv101", "- id: sn_li102", ParseCategory.DUPLICATE_ID, 33),
    ("source: m_pda, target: m_db}", "source: m_pda, target: m_dbx}", ParseCategory.DANGLING_REF, 208),
    ("target: pq_signal}\n          - {id: mr_print", "target: pq_signalx}\n          - {id: mr_print",
     ParseCategory.DANGLING_REF, 162),
    ("kind: store}", "kind: heap}", ParseCategory.BAD_ENUM, 200),
    ("'ts:u_fill1'", "'ts:u_fill9'", ParseCategory.DANGLING_REF, 219),
    ("status: to_implement, lane: l_pm}\n  - id: m_quality", "status: to_implement, lane: l_none}\n  - id: m_quality",
     ParseCategory.DANGLING_REF, 139),
    ("{id: mc_split, exec: exclusive, behavior: split}", "{id: mc_split, exec: exclusive, behavior: fork}",
     ParseCategory.BAD_ENUM, 183),
    ("name: Logistics system}", "name: Logistics system, weight: 3}", ParseCategory.UNKNOWN_KEY, 55),
    ("exec: start}\n  - {id: pp_end", "exec: begin}\n  - {id: pp_end", ParseCategory.BAD_ENUM, 65),
    ("{id: sn_fs1_count, kind: signal,", "{id: sn_fs1_count, kind: sensor,", ParseCategory.BAD_ENUM, 45),
]


def _errors(text: str):
    with pytest.raises(SpecParseError) as info:
        parse_spec(text, "doc.mesml")
    return info.value.errors


class TestParse:
    def test_minimal(self, minimal):
        assert minimal.pp_model.content.flow_object_count == 3
        assert len(minimal.links) == 1

    def test_yogurt_level_zero(self, yogurt):
        names = sorted(a.name for a in yogurt.pp_model.content.activities)
        assert names == ["Bottling", "Prepare milk", "Produce Yogurt", "Quality Test", "Setting up the plant"]

    def test_missing_ts_section(self):
        text = fixture_text("minimal.mesml")
        without_ts = text[text.index("pp:"):text.index("links:")] + "links: []\n"
        errors = _errors(without_ts)
        assert [e.category for e in errors] == [ParseCategory.MISSING_SUBMODEL]
        assert "ts" in errors[0].message

    def test_aliases(self, yogurt):
        end = yogurt.index.get("pq_end").element
        assert end.exec_type is EventExec.STOP
        text = YOGURT.replace("exec: exclusive, behavior: split", "exec: Exclusiv, behavior: SPLIT")
        assert parse_spec(text).index.get("mc_split").element.exec_type is GatewayExec.EXCLUSIVE

    def test_syntax_error_has_position(self):
        errors = _errors("ts: [unclosed\n")
        assert errors[0].category is ParseCategory.SYNTAX
        assert errors[0].span.line >= 1

    def test_link_id_as_endpoint(self):
        text = YOGURT.replace("'ts:u_fill1'", "'ts:lk_dep_pda'")
        (error,) = _errors(text)
        assert error.category is ParseCategory.DANGLING_REF and "link" in error.message

    def test_flow_across_diagrams_rejected(self):
        text = YOGURT.replace("source: pp_bottling, target: pp_end", "source: pp_bottling, target: pq_end")
        (error,) = _errors(text)
        assert error.category is ParseCategory.DANGLING_REF

    def test_self_loop_rejected(self):
        text = YOGURT.replace("source: pp_bottling, target: pp_end", "source: pp_bottling, target: pp_bottling")
        assert _errors(text)[0].category is ParseCategory.SYNTAX

    @pytest.mark.parametrize("old,new,category,line", MUTATIONS)
    def test_single_mutation(self, old, new, category, line):
        assert YOGURT.count(old) == 1
        (error,) = _errors(YOGURT.replace(old, new))
        assert (error.category, error.span.line) == (category, line)
        assert str(error).startswith(f"doc.mesml:{line}:")

    @settings(max_examples=40, deadline=None)
    @given(st.sets(st.integers(0, len(MUTATIONS) - 1), min_size=1))
    def test_all_errors_reported(self, chosen):
        text = YOGURT
        for i in chosen:
            text = text.replace(MUTATIONS[i][0], MUTATIONS[i][1])
        errors = _errors(text)
        assert sorted((e.category.value, e.span.line) for e in errors) == sorted(
            (MUTATIONS[i][2].value, MUTATIONS[i][3]) for i in chosen)


class TestSerialize:
    def test_minimal_is_canonical_fixed_point(self, minimal):
        canonical = serialize_spec(minimal)
        assert serialize_spec(parse_spec(canonical)) == canonical

    def test_link_order_does_not_matter(self, yogurt):
        shuffled = dataclasses.replace(yogurt, link_model=LinkModel(tuple(reversed(yogurt.links))))
        assert serialize_spec(shuffled) == serialize_spec(yogurt)

    def test_links_sorted_by_id(self, yogurt):
        ids = [l.id for l in parse_spec(serialize_spec(yogurt)).links]
        assert ids == sorted(ids)

    def test_yogurt_round_trip(self, yogurt):
        again = parse_spec(serialize_spec(yogurt))
        assert again == yogurt
        for view in (ViewTag.PP, ViewTag.MES):
            assert again.process_model(view) == yogurt.process_model(view)
        assert again.ts_model == yogurt.ts_model

    def test_custom_connector_survives(self, yogurt):
        text = serialize_spec(yogurt)
        assert "custom: Lab terminal" in text

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 100_000))
    def test_random_round_trip(self, seed):
        spec = random_spec(random.Random(seed))
        text = serialize_spec(spec)
        assert parse_spec(text) == spec
        assert serialize_spec(parse_spec(text)) == text
