import json

import pytest

from xmetrology import audit
from xmetrology import quasi_werner as qw


@pytest.fixture(scope="module")
def full_run():
    return audit.run_verify()


def test_full_verify_is_clean(full_run):
    assert full_run.ok, [c.check_id for c in full_run.failures]
    assert len(full_run.suite_times) >= 12
    assert not [c for c in full_run.checks if c.status == "stale_registration"]


def test_every_registration_is_exercised(full_run):
    ids = {c.check_id for c in full_run.checks}
    assert set(audit.KNOWN_DISCREPANCIES) <= ids


def test_closed_form_suites_cover_all_expressions(full_run):
    ids = {c.check_id for c in full_run.checks}
    for kind in ("pdc", "dpc", "adc"):
        for sign in ("plus", "minus"):
            for n in qw.QUANTITIES:
                assert f"closed_forms.{kind}.{sign}.{n}" in ids
                assert f"block_pipeline.{kind}.{sign}.{n}" in ids


def test_known_good_printed_forms_pass(full_run):
    by_id = {c.check_id: c for c in full_run.checks}
    for cid in (
        "closed_forms.pdc.plus.qfi",
        "closed_forms.pdc.minus.qfi",
        "closed_forms.adc.minus.concurrence",
        "closed_forms.dpc.plus.concurrence",
    ):
        assert by_id[cid].status == "pass"


def test_classification():
    good = audit.Check("x", "s", 1e-6, 0.0, 1, True)
    bad = audit.Check("x", "s", 1e-6, 1.0, 1, False)
    reg = {"x": audit.Registration("somewhere", "why")}
    assert audit.classify(good, {}) == "pass"
    assert audit.classify(bad, {}) == "unregistered_mismatch"
    assert audit.classify(bad, reg) == "registered_discrepancy"
    assert audit.classify(good, reg) == "stale_registration"


def test_compare_treats_nan_as_failure():
    c = audit.compare("x", "s", [1.0, float("nan")], [1.0, 2.0], 1e-6)
    assert not c.passed and c.points[0]["closed_form"] is None
    c = audit.compare("x", "s", [101.0], [100.0], 1e-6, rel_above=1.0)
    assert c.deviation == pytest.approx(0.01)


def test_injected_formula_error_is_caught(monkeypatch):
    original = qw.qfi_pdc_printed
    monkeypatch.setattr(qw, "qfi_pdc_printed", lambda p, s: original(p, s) * (1 + 1e-3))
    result = audit.run_verify(["closed_forms_pdc"])
    assert not result.ok
    assert "closed_forms.pdc.plus.qfi" in {c.check_id for c in result.failures}


def test_removing_a_registration_fails(full_run):
    registry = dict(audit.KNOWN_DISCREPANCIES)
    registry.pop("closed_forms.dpc.plus.qfi")
    result = audit.run_verify(["closed_forms_dpc"], registry=registry)
    assert [c.check_id for c in result.failures] == ["closed_forms.dpc.plus.qfi"]


def test_reports_written(tmp_path):
    result = audit.run_verify(["pure_block_forms", "channel_kraus"])
    report, disc = audit.write_reports(result, tmp_path)
    data = json.loads(report.read_text())
    assert data["summary"]["ok"]
    assert {"check_id", "tolerance", "max_deviation", "status"} <= set(data["checks"][0])
    records = [json.loads(line) for line in disc.read_text().splitlines()]
    assert records
    for rec in records:
        assert {"check_id", "location_citation", "closed_form", "oracle", "deviation", "verdict"} <= set(rec)
        assert rec["verdict"] == "registered"


def test_suite_error_is_reported(monkeypatch):
    def broken(ctx):
        raise ValueError("boom")

    monkeypatch.setitem(audit.SUITES, "broken", broken)
    result = audit.run_verify(["broken"])
    assert not result.ok and "broken" in result.errors
