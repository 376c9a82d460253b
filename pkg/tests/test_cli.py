from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from mesml.cli import EXIT_CLEAN, EXIT_ERRORS, EXIT_PARSE, EXIT_USAGE, EXIT_WARNINGS, run

from mutations import MINIMAL, YOGURT, edit


def call(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def write(tmp_path):
    def _write(text: str, name: str = "spec.mesml") -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return _write


GATEWAY_MUTATION = ("{id: pq_split, exec: parallel,", "{id: pq_split, exec: inclusive,")
UNLINKED_REF = ("- {id: lk_eq_signal, type: equivalence, source: 'pp:pq_signal', target: 'mes:mr_signal'}\n", "")


class TestValidate:
    def test_yogurt_is_clean(self, yogurt_path):
        assert call("validate", str(yogurt_path)) == (EXIT_CLEAN, "", "")

    def test_gateway_mutation(self, write):
        code, out, _ = call("validate", write(edit(YOGURT, GATEWAY_MUTATION)))
        assert code == EXIT_ERRORS
        assert out.splitlines() == [
            "ERROR W-GW-02 pp:pq_split: inclusive split gateway has 1 incoming and 2 outgoing sequence flows"]

    def test_warnings_only(self, write):
        path = write(edit(YOGURT, UNLINKED_REF))
        assert call("validate", path)[0] == EXIT_WARNINGS
        assert call("validate", "--deny-warnings", path)[0] == EXIT_ERRORS

    def test_lints_do_not_fail(self, write):
        path = write(edit(YOGURT, ("{id: pm_end, exec: stop}", "{id: pm_end, exec: intermediate_interrupting}")))
        code, out, _ = call("validate", path)
        assert code == EXIT_CLEAN and out.startswith("LINT L-PP-01")

    def test_rule_filter(self, write):
        path = write(edit(YOGURT, GATEWAY_MUTATION, UNLINKED_REF))
        code, out, _ = call("validate", "--rule", "W-REF-04", path)
        assert code == EXIT_WARNINGS and out.startswith("WARNING W-REF-04")
        assert call("validate", "--rule", "W-GW-02", "--rule", "W-REF-04", path)[0] == EXIT_ERRORS

    def test_unknown_rule(self, yogurt_path):
        code, _, err = call("validate", "--rule", "W-XX-99", str(yogurt_path))
        assert code == EXIT_USAGE and "W-XX-99" in err

    def test_structured(self, write):
        code, out, _ = call("validate", "--format", "structured", write(edit(YOGURT, GATEWAY_MUTATION)))
        payload = json.loads(out)
        assert code == EXIT_ERRORS
        assert [d["rule"] for d in payload["diagnostics"]] == ["W-GW-02"]

    def test_parse_error(self, write):
        code, out, err = call("validate", write(edit(YOGURT, ("kind: store}", "kind: heap}"))))
        assert (code, out) == (EXIT_PARSE, "")
        assert "BadEnum" in err and ":200:" in err

    def test_missing_file(self, tmp_path):
        code, _, err = call("validate", str(tmp_path / "absent.mesml"))
        assert code == EXIT_USAGE and "absent.mesml" in err

    def test_bad_flag(self, yogurt_path):
        assert call("validate", "--format", "xml", str(yogurt_path))[0] == EXIT_USAGE
        assert call()[0] == EXIT_USAGE


class TestExport:
    def test_pp_dot(self, yogurt_path):
        code, out, _ = call("export", str(yogurt_path), "--view", "pp")
        assert code == EXIT_CLEAN and out.startswith('digraph "pp"')
        assert out.count("shape=box") == 5

    def test_ts_tree(self, yogurt_path):
        code, out, _ = call("export", str(yogurt_path), "--view", "ts")
        assert code == EXIT_CLEAN and "Tank 101" in out

    def test_mes_subprocess(self, yogurt_path):
        code, out, _ = call("export", str(yogurt_path), "--view", "mes", "--diagram", "Quality Test")
        assert code == EXIT_CLEAN and out.count("shape=box") == 2

    def test_bad_diagram(self, yogurt_path):
        assert call("export", str(yogurt_path), "--view", "mes", "--diagram", "Nope")[0] == EXIT_USAGE

    def test_diagram_with_ts(self, yogurt_path):
        assert call("export", str(yogurt_path), "--view", "ts", "--diagram", "x")[0] == EXIT_USAGE

    def test_out_file(self, yogurt_path, tmp_path):
        target = tmp_path / "pp.dot"
        code, out, _ = call("export", str(yogurt_path), "--view", "pp", "--out", str(target))
        assert (code, out) == (EXIT_CLEAN, "")
        assert target.read_text().startswith('digraph "pp"')


class TestReport:
    @pytest.mark.parametrize("kind", ["status", "stats", "links", "deployment", "interfaces"])
    @pytest.mark.parametrize("fmt", ["text", "structured"])
    def test_kinds(self, yogurt_path, kind, fmt):
        code, out, _ = call("report", str(yogurt_path), "--kind", kind, "--format", fmt)
        assert code == EXIT_CLEAN and out
        if fmt == "structured":
            json.loads(out)

    def test_interfaces_one_row_per_link(self, yogurt_path):
        _, out, _ = call("report", str(yogurt_path), "--kind", "interfaces")
        rows = out.splitlines()[1:]
        assert len(rows) == 3 and sum("OPC" in r for r in rows) == 2

    def test_status_all_implemented(self, write):
        path = write(edit(MINIMAL, ("status: to_implement", "status: implemented")))
        payload = json.loads(call("report", path, "--kind", "status", "--format", "structured")[1])
        assert all(row["to_implement"] == [] for row in payload.values())

    def test_precondition(self, write):
        path = write(YOGURT + "- {id: lk_bad, type: deployment, source: 'pp:pp_setup', target: 'ts:sn_li101'}\n")
        code, out, err = call("report", path, "--kind", "deployment")
        assert (code, out) == (EXIT_ERRORS, "")
        assert "W-LK-06" in err and "lk_bad" in err


def test_module_entry_point(yogurt_path):
    proc = subprocess.run([sys.executable, "-m", "mesml", "validate", str(yogurt_path)],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_CLEAN
