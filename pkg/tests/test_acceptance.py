"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

from __future__ import annotations

import dataclasses
import itertools
import os
import random
import statistics
import subprocess
import sys
import time

from mesml import RULES, Severity, legality_table, parse_spec, serialize_spec, validate_spec
from mesml.metamodel import GatewayBehavior, GatewayExec
from mesml.synth import INJECTORS, count_elements, inject_defect, random_spec, synthetic_spec
from mesml.validator import gateway_arity_rule

from conftest import fixture_text
from mutations import MUTATIONS
from test_linkmodel import oracle
from test_validator import _brute_force_arity


def _errors(diagnostics):
    return [d for d in diagnostics if d.severity is Severity.ERROR]


def test_criterion_1_yogurt_fixture(verdict):
    start = time.perf_counter()
    spec = parse_spec(fixture_text("yogurt.mesml"), "yogurt.mesml")
    errors = _errors(validate_spec(spec))
    elapsed = time.perf_counter() - start
    level0 = [a.name for a in spec.pp_model.content.activities]
    pools = sorted(p.name for p in spec.mes_model.pools)
    lanes = sorted(l.name for l in spec.mes_model.lanes)
    shape_ok = (len(level0) == 5 and "Quality Test" in level0 and pools == ["ERP", "MES", "PCS"]
                and lanes == ["PDA", "production management"])
    ok = shape_ok and not errors and elapsed < 1.0
    verdict(1, ok, f"yogurt fixture: {len(errors)} errors, {elapsed * 1000:.1f} ms (< 1 s)")


def test_criterion_2_rule_mutation_suite(verdict):
    failures, slowest = [], 0.0
    for code in sorted(RULES):
        start = time.perf_counter()
        diagnostics = validate_spec(MUTATIONS[code]())
        elapsed = time.perf_counter() - start
        slowest = max(slowest, elapsed)
        blocking = {d.rule for d in diagnostics if d.severity is not Severity.LINT}
        if code not in {d.rule for d in diagnostics} or not blocking <= {code} or elapsed >= 0.1:
            failures.append(code)
    ok = not failures and set(MUTATIONS) == set(RULES)
    verdict(2, ok, f"{len(RULES) - len(failures)}/{len(RULES)} rules isolated by one mutation, "
                   f"slowest {slowest * 1000:.1f} ms (< 100 ms); failing: {failures or 'none'}")


def test_criterion_3_link_legality_oracle(verdict):
    table = legality_table()
    mismatches = [
        key for key, v in table.items()
        if ("Allowed" if v else v.rule) != oracle(
            f"{key[0].kind.value}[{key[0].view.value}]", f"{key[1].kind.value}[{key[1].view.value}]", key[2].value)
    ]
    verdict(3, not mismatches, f"{len(table) - len(mismatches)}/{len(table)} legality cases match the hand oracle")


def test_criterion_4_gateway_truth_table(verdict):
    cases = list(itertools.product(GatewayExec, GatewayBehavior, range(5), range(5)))
    agree = sum(
        (gateway_arity_rule(e, b, i, o) is None) == _brute_force_arity(e.value, b.value, i, o)
        for e, b, i, o in cases
    )
    verdict(4, agree == len(cases) == 150, f"{agree}/{len(cases)} gateway arity cases agree")


def test_criterion_5_round_trip(verdict):
    start = time.perf_counter()
    failures, largest = [], 0
    for seed in range(1000):
        spec = random_spec(random.Random(seed))
        largest = max(largest, count_elements(spec))
        if parse_spec(serialize_spec(spec)) != spec:
            failures.append(seed)
    elapsed = time.perf_counter() - start
    ok = not failures and largest <= 50 and elapsed < 30
    verdict(5, ok, f"{1000 - len(failures)}/1000 round-trips equal, max {largest} elements, "
                   f"{elapsed:.1f} s (< 30 s)")


def test_criterion_6_generator_validator_coherence(verdict):
    dirty, missed = [], []
    codes = sorted(INJECTORS)
    for seed in range(1000):
        spec = random_spec(random.Random(seed))
        if _errors(validate_spec(spec)):
            dirty.append(seed)
        code = codes[seed % len(codes)]
        mutated = inject_defect(spec, code, random.Random(seed))
        if code not in {d.rule for d in validate_spec(mutated)}:
            missed.append((seed, code))
    ok = not dirty and not missed
    verdict(6, ok, f"{1000 - len(dirty)}/1000 generated specs error-free, "
                   f"{1000 - len(missed)}/1000 injected defects reported")


_DETERMINISM_SCRIPT = r"""
import sys
from mesml import parse_spec, serialize_spec, validate_spec, export_dot, ViewTag, model_stats, status_report
from mesml import equivalence_pairs, deployment_map, data_interfaces
from mesml.validator import render_text, render_structured
from mesml.reporting import (render_ts_tree, to_json, links_to_dict, render_equivalences, render_deployments,
                             render_interfaces, diagram_tree)
spec = parse_spec(open(sys.argv[1], encoding="utf-8").read())
parts = [serialize_spec(spec), render_text(validate_spec(spec)), render_structured(validate_spec(spec)),
         render_ts_tree(spec), status_report(spec).render_text(), to_json(status_report(spec).to_dict()),
         model_stats(spec).render_text(), to_json(model_stats(spec).to_dict())]
for view in (ViewTag.PP, ViewTag.MES):
    for node in diagram_tree(spec, view).walk():
        parts.append(export_dot(spec, view, "/".join(node.path) or None))
pairs, dmap, faces = equivalence_pairs(spec), deployment_map(spec), data_interfaces(spec)
parts += [render_equivalences(pairs), render_deployments(dmap), render_interfaces(faces),
          to_json(links_to_dict(pairs, dmap, faces))]
sys.stdout.write("\x00".join(parts))
"""


def test_criterion_7_determinism(verdict, yogurt_path):
    outputs = []
    for hash_seed in ("1", "2", "3"):
        env = dict(os.environ, PYTHONHASHSEED=hash_seed)
        proc = subprocess.run([sys.executable, "-c", _DETERMINISM_SCRIPT, str(yogurt_path)],
                              capture_output=True, env=env, check=True)
        outputs.append(proc.stdout)
    ok = len(set(outputs)) == 1 and len(outputs[0]) > 0
    verdict(7, ok, f"3 runs (distinct hash seeds) byte-identical: {ok}, {len(outputs[0])} bytes each")


def test_criterion_8_scale(verdict):
    spec = synthetic_spec(10_000, 2_000)
    n_elements, n_links = count_elements(spec), len(spec.links)
    timings = []
    for _ in range(3):
        fresh = dataclasses.replace(spec)  # new object, so the element index is rebuilt inside the timing
        start = time.perf_counter()
        validate_spec(fresh)
        timings.append(time.perf_counter() - start)
    median = statistics.median(timings)
    ok = n_elements >= 10_000 and n_links == 2_000 and median < 1.0
    verdict(8, ok, f"{n_elements} elements / {n_links} links validated in {median * 1000:.0f} ms median (< 1 s)")
