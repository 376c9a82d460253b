from __future__ import annotations

import json
import re
from pathlib import Path

import pytest

from mesml import UnsupportedKind, ViewTag, diagram_tree, export_dot, model_stats, parse_spec, status_report
from mesml.reporting import UnknownDiagram, render_ts_tree, resolve_diagram, to_json

from mutations import MINIMAL, YOGURT, edit

GOLDEN = Path(__file__).parent / "golden"
NODE = re.compile(r'^\s*"([^"]+)" \[(.*)\];$')


def dot_nodes(dot: str) -> dict[str, str]:
    """Node id -> attribute text for every node statement."""
    nodes = {}
    for line in dot.splitlines():
        m = NODE.match(line)
        if m and "->" not in line:
            nodes[m.group(1)] = m.group(2)
    return nodes


def _six_activities() -> str:
    extra = "".join(
        f"  - {{id: a{i}, name: Step {i}, status: {status}}}\n"
        for i, status in enumerate(["to_implement", "to_implement", "to_implement", "implemented", "excluded"])
    )
    return edit(MINIMAL, ("exec: automatic, status: implemented}\n", "exec: automatic, status: implemented}\n" + extra))


class TestStatus:
    def test_three_two_one(self):
        report = status_report(parse_spec(_six_activities()))
        assert report.counts(ViewTag.PP) == (3, 2, 1)

    def test_all_implemented(self, minimal):
        assert status_report(minimal).counts(ViewTag.PP) == (0, 1, 0)

    def test_yogurt_mes_has_open_work(self, yogurt):
        report = status_report(yogurt)
        assert report.counts(ViewTag.MES) == (9, 2, 0)
        assert report.counts(ViewTag.PP) == (0, 11, 0)

    def test_structured_is_json(self, yogurt):
        payload = json.loads(to_json(status_report(yogurt).to_dict()))
        assert payload


class TestStats:
    def test_minimal(self, minimal):
        pp = model_stats(minimal).view(ViewTag.PP)
        assert (pp.diagram_count, pp.activities, pp.others) == (1, 1, 4)

    def test_yogurt_level_zero(self, yogurt):
        top = model_stats(yogurt).view(ViewTag.PP).diagrams[0]
        assert (top.level, top.activities) == (0, 5)

    def test_one_nested_subprocess(self):
        sub = ("{id: pp_act, name: Produce, exec: automatic, status: implemented}",
               "{id: pp_act, name: Produce, exec: automatic, status: implemented, subprocess: "
               "{activities: [{id: inner, name: Inner}]}}")
        assert model_stats(parse_spec(edit(MINIMAL, sub))).view(ViewTag.PP).diagram_count == 2

    def test_yogurt_golden(self, yogurt):
        assert model_stats(yogurt).render_text() == (GOLDEN / "yogurt_stats.txt").read_text()


class TestDiagramTree:
    def test_pp(self, yogurt):
        tree = diagram_tree(yogurt, ViewTag.PP)
        children = {c.title: c.callable for c in tree.children}
        assert children == {"Prepare milk": False, "Quality Test": True}

    def test_mes_quality_test(self, yogurt):
        tree = diagram_tree(yogurt, ViewTag.MES)
        (quality,) = tree.children
        assert quality.title == "Quality Test"
        assert sorted(c.title for c in quality.children) == ["Collect Test Results", "Create Sample"]

    def test_flat_spec(self, minimal):
        tree = diagram_tree(minimal, ViewTag.PP)
        assert tree.children == () and len(list(tree.walk())) == 1

    def test_node_count_matches_stats(self, yogurt):
        for view in (ViewTag.PP, ViewTag.MES):
            assert len(list(diagram_tree(yogurt, view).walk())) == model_stats(yogurt).view(view).diagram_count

    def test_ts_unsupported(self, yogurt):
        with pytest.raises(UnsupportedKind):
            diagram_tree(yogurt, ViewTag.TS)

    def test_resolve_by_name_or_id(self, yogurt):
        by_name = resolve_diagram(yogurt, ViewTag.MES, "Quality Test/Create Sample")
        by_id = resolve_diagram(yogurt, ViewTag.MES, "m_quality/m_sample")
        assert by_name == by_id and by_id[0] == ("m_quality", "m_sample")

    def test_resolve_unknown(self, yogurt):
        with pytest.raises(UnknownDiagram):
            resolve_diagram(yogurt, ViewTag.PP, "Quality Test/Nope")


class TestDot:
    def test_pp_activity_is_gray(self, yogurt):
        nodes = dot_nodes(export_dot(yogurt, ViewTag.PP))
        assert "fillcolor=gray85" in nodes["pp_setup"]

    def test_mes_activity_is_white(self, yogurt):
        nodes = dot_nodes(export_dot(yogurt, ViewTag.MES))
        assert "fillcolor=white" in nodes["m_schedule"]

    def test_exclusive_gateway(self, yogurt):
        nodes = dot_nodes(export_dot(yogurt, ViewTag.MES, "Quality Test/Collect Test Results"))
        assert "shape=diamond" in nodes["mc_split"] and 'label="X"' in nodes["mc_split"]

    def test_parallel_gateway(self, yogurt):
        nodes = dot_nodes(export_dot(yogurt, ViewTag.PP, "Quality Test"))
        assert 'label="+"' in nodes["pq_split"]

    def test_deterministic(self, yogurt):
        assert export_dot(yogurt, ViewTag.MES) == export_dot(parse_spec(YOGURT), ViewTag.MES)

    def test_five_level_zero_activities(self, yogurt):
        nodes = dot_nodes(export_dot(yogurt, ViewTag.PP))
        assert sum("shape=box" in attrs for attrs in nodes.values()) == 5

    def test_quality_test_subprocess(self, yogurt):
        nodes = dot_nodes(export_dot(yogurt, ViewTag.MES, "Quality Test"))
        assert {n for n, a in nodes.items() if "shape=box" in a} == {"m_collect", "m_sample"}

    def test_reference_takes_target_fill(self, yogurt):
        nodes = dot_nodes(export_dot(yogurt, ViewTag.MES, "Quality Test/Create Sample"))
        assert "fillcolor=gray85" in nodes["mr_print"]
        assert "fillcolor=white" in nodes["ms_register"]

    def test_edge_styles(self, yogurt):
        dot = export_dot(yogurt, ViewTag.MES)
        assert '"m_order" -> "m_schedule" [style=dashed, arrowhead=empty]' in dot
        assert '"m_pda" -> "m_db" [style=dotted]' in dot

    def test_pools_in_rank_order(self, yogurt):
        dot = export_dot(yogurt, ViewTag.MES)
        order = [dot.index(f'cluster_{p}"') for p in ("p_erp", "p_mes", "p_pcs")]
        assert order == sorted(order)

    def test_pp_golden(self, yogurt):
        assert export_dot(yogurt, ViewTag.PP) == (GOLDEN / "yogurt_pp.dot").read_text()

    def test_unknown_diagram(self, yogurt):
        with pytest.raises(UnknownDiagram):
            export_dot(yogurt, ViewTag.PP, "Nope")


def test_ts_tree(yogurt):
    text = render_ts_tree(yogurt)
    assert "    Tank 101 (unit) [u_tank101]" in text.splitlines()
    assert text.splitlines()[0].startswith("Yogurt production plant (plant)")
