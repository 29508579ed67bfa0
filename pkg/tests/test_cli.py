import json

import pytest

from xmetrology import audit, cli
from xmetrology import quasi_werner as qw


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_subset_exit_zero(tmp_path, capsys):
    code, out, _ = run(["verify", "--out", str(tmp_path), "--suite", "closed_forms_dpc", "--quiet"], capsys)
    assert code == 0
    data = json.loads((tmp_path / "verify_report.json").read_text())
    assert data["summary"]["by_status"]["registered_discrepancy"] == 4
    assert (tmp_path / "discrepancies.jsonl").read_text()


def test_verify_with_perturbed_formula_fails(tmp_path, capsys, monkeypatch):
    original = qw.concurrence_dpc_printed
    monkeypatch.setattr(qw, "concurrence_dpc_printed", lambda p, s: original(p, s) + 1e-4)
    code, out, _ = run(["verify", "--out", str(tmp_path), "--suite", "closed_forms_dpc", "--quiet"], capsys)
    assert code == 1
    assert "unregistered_mismatch" in out


def test_verify_internal_error_exits_two(tmp_path, capsys, monkeypatch):
    def crash(ctx):
        raise RuntimeError("unexpected")

    monkeypatch.setitem(audit.SUITES, "sld", crash)
    code, _, err = run(["verify", "--out", str(tmp_path), "--suite", "sld", "--quiet"], capsys)
    assert code == 2 and "RuntimeError" in err


def test_sweep_fig1_rows(tmp_path, capsys):
    out = tmp_path / "c.csv"
    code, stdout, _ = run(["sweep", "--quantity", "concurrence", "--q", "0:0.01:1", "--out", str(out)], capsys)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "family,sign,alpha,beta,q,channel,p,s,quantity,closed_form,oracle,abs_dev"
    assert len(lines) == 405
    meta = json.loads(out.with_suffix(".meta.json").read_text())
    assert meta["rows"] == 404 and meta["estimated_parameter"] == "q"


def test_sweep_is_byte_identical(tmp_path, capsys):
    args = ["sweep", "--channel", "adc", "--p", "0:0.25:1", "--sign", "both"]
    run(args + ["--out", str(tmp_path / "a.csv")], capsys)
    run(args + ["--out", str(tmp_path / "b.csv")], capsys)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


@pytest.mark.parametrize(
    "argv",
    [
        ["sweep", "--q", "0.5:0.1:0.4"],
        ["sweep", "--q", "2"],
        ["sweep", "--channel", "gamma"],
        ["sweep", "--quantity", "entropy"],
        ["sweep", "--fd-step", "abc"],
        ["sweep", "--unknown-flag"],
        ["figure", "fig7"],
    ],
)
def test_invalid_input_exits_one(argv, tmp_path, capsys):
    code, _, err = run(argv + ["--out", str(tmp_path / "x.csv")] if argv[0] == "sweep" else argv, capsys)
    assert code == 1
    assert err.startswith("error:") and len(err.strip().splitlines()) == 1


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep settings\nquantity = qfi\nq = 0.2,0.4\nbeta = 0.5\nchannel = pdc\n")
    out = tmp_path / "s.csv"
    code, _, _ = run(["sweep", "--config", str(cfg), "--q", "0.3", "--out", str(out)], capsys)
    assert code == 0
    rows = out.read_text().splitlines()[1:]
    assert len(rows) == 1
    fields = rows[0].split(",")
    assert fields[4] == "0.29999999999999999" and fields[5] == "pdc" and fields[8] == "qfi"


def test_bad_config_exits_one(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    code, _, err = run(["sweep", "--config", str(cfg)], capsys)
    assert code == 1 and "unknown key" in err


def test_figure_outputs(tmp_path, capsys):
    code, _, _ = run(["figure", "fig4", "--out", str(tmp_path), "--q", "0.8"], capsys)
    assert code == 0
    for suffix in (".csv", ".svg", ".meta.json"):
        assert (tmp_path / f"fig4{suffix}").exists()
    meta = json.loads((tmp_path / "fig4.meta.json").read_text())
    assert meta["q"] == [0.8] and meta["channels"] == ["adc"]


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "xmetrology", "figure", "nope"], capture_output=True, text=True)
    assert proc.returncode == 1
