from __future__ import annotations

import pytest

from mesml import ElementKind, ElementRef, LinkType, UnresolvedReference, ViewTag, check_link, legality_table, parse_spec
from mesml.linkmodel import Placement, all_placements
from mesml.metamodel import Link

from conftest import fixture_text

MES, PP, TS = "mes", "pp", "ts"

# Hand transcription. Placements are written as "Kind[view]" strings so nothing
# is shared with the implementation's kind sets.
PROCESS_KINDS = ["Activity", "Event", "Gateway", "ActivityRef", "SignalRef", "DataObject", "Group",
                 "TextAnnotation", "SequenceFlow", "MessageFlow", "DataFlow", "Association"]
PLACEMENTS = (
    [f"{k}[{v}]" for k in PROCESS_KINDS for v in (MES, PP)]
    + ["Pool[mes]", "Lane[mes]"]
    + [f"{k}[ts]" for k in ("Plant", "Area", "Unit", "Signal", "UserDefinedLayer")]
)
UNLINKABLE = {"Gateway", "TextAnnotation", "SequenceFlow", "MessageFlow", "DataFlow", "Association"}
DATA_ENDPOINTS = {"Activity", "Event", "DataObject", "Group", "Pool", "Lane",
                  "Area", "Unit", "Signal", "UserDefinedLayer"}
EQUIVALENT = {
    ("Activity[mes]", "ActivityRef[pp]"), ("ActivityRef[pp]", "Activity[mes]"),
    ("Activity[pp]", "ActivityRef[mes]"), ("ActivityRef[mes]", "Activity[pp]"),
    ("Signal[ts]", "SignalRef[mes]"), ("SignalRef[mes]", "Signal[ts]"),
    ("Signal[ts]", "SignalRef[pp]"), ("SignalRef[pp]", "Signal[ts]"),
}
DEPLOYABLE = {
    (f"Activity[{v}]", f"{t}[ts]") for v in (MES, PP) for t in ("Area", "Unit", "UserDefinedLayer")
}


def _split(placement: str) -> tuple[str, str]:
    kind, view = placement.rstrip("]").split("[")
    return kind, view


def oracle(source: str, target: str, link_type: str) -> str:
    (sk, sv), (tk, tv) = _split(source), _split(target)
    if sk in UNLINKABLE or tk in UNLINKABLE:
        return "W-LK-01"
    if sv == tv:
        return "W-LK-02"
    if link_type == "data_transfer":
        return "Allowed" if sk in DATA_ENDPOINTS and tk in DATA_ENDPOINTS else "W-LK-03"
    if link_type == "equivalence":
        return "Allowed" if (source, target) in EQUIVALENT else "W-LK-04"
    return "Allowed" if (source, target) in DEPLOYABLE else "W-LK-06"


def _verdict_code(verdict) -> str:
    return "Allowed" if verdict else verdict.rule


def test_placements_match_transcription():
    assert sorted(str(p).replace("MES", MES).replace("PP", PP).replace("TS", TS)
                  for p in all_placements()) == sorted(PLACEMENTS)


def test_table_matches_hand_oracle():
    table = legality_table()
    assert len(table) == len(PLACEMENTS) ** 2 * 3
    mismatches = []
    for (s, t, lt), verdict in table.items():
        key = (f"{s.kind.value}[{s.view.value}]", f"{t.kind.value}[{t.view.value}]", lt.value)
        if _verdict_code(verdict) != oracle(*key):
            mismatches.append((key, str(verdict)))
    assert mismatches == []


def test_allowed_counts():
    allowed = [k for k, v in legality_table().items() if v]
    by_type = {lt: sum(1 for k in allowed if k[2] is lt) for lt in LinkType}
    assert by_type[LinkType.EQUIVALENCE] == 8
    assert by_type[LinkType.DEPLOYMENT] == 6


def test_no_allowed_verdict_within_one_view():
    assert not any(v for (s, t, _), v in legality_table().items() if s.view is t.view)


def test_data_transfer_is_symmetric():
    table = legality_table()
    for (s, t, lt), verdict in table.items():
        if lt is LinkType.DATA_TRANSFER:
            assert bool(verdict) == bool(table[(t, s, lt)])


def test_deployment_is_directed():
    table = legality_table()
    act, unit = Placement(ElementKind.ACTIVITY, ViewTag.MES), Placement(ElementKind.UNIT, ViewTag.TS)
    assert table[(act, unit, LinkType.DEPLOYMENT)]
    assert not table[(unit, act, LinkType.DEPLOYMENT)]


@pytest.mark.parametrize("link_type", list(LinkType))
def test_text_annotation_never_linkable(link_type):
    table = legality_table()
    for (s, t, lt), verdict in table.items():
        if lt is link_type and "TextAnnotation" in (s.kind.value, t.kind.value):
            assert verdict.rule == "W-LK-01"


class TestCheckLink:
    def _link(self, link_type, source, target, ident="x"):
        return Link(ident, link_type, ElementRef.parse(source), ElementRef.parse(target))

    def test_collect_results_to_manual_activity(self, yogurt):
        assert check_link(self._link(LinkType.DATA_TRANSFER, "mes:m_collect", "pp:pq_enter"), yogurt)

    def test_print_label_equivalence(self, yogurt):
        link = next(l for l in yogurt.links if l.id == "lk_eq_print")
        assert check_link(link, yogurt)

    def test_activity_to_activity_equivalence(self, yogurt):
        verdict = check_link(self._link(LinkType.EQUIVALENCE, "mes:m_schedule", "pp:pp_setup"), yogurt)
        assert verdict.rule == "W-LK-04"

    def test_deploy_to_signal(self, yogurt):
        verdict = check_link(self._link(LinkType.DEPLOYMENT, "pp:pp_bottling", "ts:sn_ti101"), yogurt)
        assert verdict.rule == "W-LK-06"

    def test_gateway_endpoint(self, yogurt):
        verdict = check_link(self._link(LinkType.DATA_TRANSFER, "pp:pq_split", "ts:u_tank101"), yogurt)
        assert verdict.rule == "W-LK-01"

    def test_link_event_endpoint(self, yogurt):
        event = next(e for _, d, _ in yogurt.pp_model.diagrams() for e in d.events if e.is_link_event)
        verdict = check_link(self._link(LinkType.DATA_TRANSFER, f"pp:{event.id}", "ts:u_tank101"), yogurt)
        assert verdict.rule == "W-LK-01"

    def test_name_mismatch(self):
        text = fixture_text("yogurt.mesml").replace(
            "{id: mr_print, name: Print Label,", "{id: mr_print, name: PrintLabel,")
        spec = parse_spec(text)
        link = next(l for l in spec.links if l.id == "lk_eq_print")
        assert check_link(link, spec).rule == "W-LK-05"

    def test_dangling_endpoint_raises(self, yogurt):
        with pytest.raises(UnresolvedReference):
            check_link(self._link(LinkType.DEPLOYMENT, "pp:nope", "ts:u_tank101"), yogurt)
