import json
from pathlib import Path

import pytest

from weightseq import catalog
from weightseq.definitions import BUILTIN_SERIES, SequenceDefinition
from weightseq.kernels import BUILTIN_FUNCTIONS
from weightseq.report import TOLERANCE_PROFILES, analyze

SCHEMAS = Path(__file__).resolve().parents[1] / "docs" / "schemas"


def load(name):
    return json.loads((SCHEMAS / name).read_text())


def test_definition_kinds_match_catalog():
    s = load("sequence_definition.json")
    assert set(s["properties"]["kind"]["enum"]) == set(catalog.CATALOG) | {"custom"}
    assert s["properties"]["truncation"]["minimum"] == 16


def test_claim_builtins_match_code():
    s = load("claim.json")
    fn, series = s["properties"]["function"]["oneOf"][0], s["properties"]["series"]["oneOf"][0]
    assert set(fn["properties"]["builtin"]["enum"]) == set(BUILTIN_FUNCTIONS)
    assert set(series["properties"]["builtin"]["enum"]) == set(BUILTIN_SERIES)


@pytest.fixture(scope="module")
def report():
    return analyze(SequenceDefinition("gevrey", {"alpha": 1.0}, None, 2000))[0]


def test_report_layout(report):
    s = load("analysis_report.json")
    assert set(report) == set(s["required"]) == set(s["properties"])
    verdict = s["$defs"]["verdict"]
    for rec in report["conditions"]["results"].values():
        assert set(verdict["required"]) <= set(rec) <= set(verdict["properties"])
        assert rec["verdict"] in s["$defs"]["verdict_name"]["enum"]
    estimate = s["$defs"]["estimate"]
    for rec in report["indices"]["results"].values():
        assert set(estimate["required"]) <= set(rec) <= set(estimate["properties"])
    surj = s["properties"]["surjectivity"]["properties"]
    assert set(report["surjectivity"]) <= set(surj)
    assert set(s["properties"]["config"]["properties"]["tolerance_profile"]["enum"]) == set(TOLERANCE_PROFILES)
