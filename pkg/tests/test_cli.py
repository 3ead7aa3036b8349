"""CLI wiring: exit codes track verdicts, config errors exit 2, and the
scan output is machine-greppable."""

import pytest

from kglab.cli import main

QUICK_SCAN = """\
schema = kglab-experiment-v1
experiment = phase-scan
dim = 1
radius = 3.0
step = 0.5
signs = ++, --
"""


def test_run_executes_config_and_writes_reports(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("KGLAB_OUT", str(tmp_path / "ledger"))
    cfg = tmp_path / "scan.cfg"
    cfg.write_text(QUICK_SCAN)
    code = main(["run", str(cfg)])
    out = capsys.readouterr().out
    assert code == 0
    assert "phase-scan: pass" in out
    written = sorted(p.name for p in (tmp_path / "ledger").iterdir())
    assert len(written) == 2
    assert written[0].startswith("phase-scan-") and written[0].endswith(".csv")
    assert written[1].endswith(".json")


def test_run_rerun_is_byte_identical(tmp_path, monkeypatch):
    monkeypatch.setenv("KGLAB_OUT", str(tmp_path / "ledger"))
    cfg = tmp_path / "scan.cfg"
    cfg.write_text(QUICK_SCAN)
    assert main(["run", str(cfg)]) == 0
    first = {p.name: p.read_bytes() for p in (tmp_path / "ledger").iterdir()}
    assert main(["run", str(cfg)]) == 0
    second = {p.name: p.read_bytes() for p in (tmp_path / "ledger").iterdir()}
    assert first == second


def test_run_exits_2_on_unknown_key(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("KGLAB_OUT", str(tmp_path / "ledger"))
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(QUICK_SCAN + "turbo = yes\n")
    code = main(["run", str(cfg)])
    err = capsys.readouterr().err
    assert code == 2
    assert "config error" in err and "unknown key" in err
    assert not (tmp_path / "ledger").exists()  # validation precedes compute


def test_run_exits_2_on_missing_file(tmp_path, capsys):
    code = main(["run", str(tmp_path / "nope.cfg")])
    assert code == 2
    assert "config error" in capsys.readouterr().err


def test_scan_phase_prints_report_keys(capsys):
    code = main(["scan-phase", "--signs", "+-", "--radius", "2", "--step", "0.5"])
    out = capsys.readouterr().out
    assert code == 0
    for key in ("d = 1", "mu = 1", "nu = -1", "radius = 2.0", "step = 0.5",
                "n_pairs =", "min_abs_phase =", "c_phi =", "c_grad =",
                "floor_violations = 0"):
        assert key in out


def test_scan_phase_rejects_malformed_signs():
    with pytest.raises(SystemExit) as exc:
        main(["scan-phase", "--signs", "+x"])
    assert exc.value.code == 2


def test_sweep_lifespan_rejects_empty_eps(capsys):
    code = main(["sweep-lifespan", "--eps", ","])
    assert code == 2
    assert "empty eps" in capsys.readouterr().err


def test_subcommand_is_required():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
