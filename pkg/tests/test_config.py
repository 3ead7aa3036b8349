"""The config file format: strict parsing, canonical re-rendering, and
the environment fallbacks."""

import math

import pytest

from kglab.config import SCHEMA, ExperimentConfig, load_config, parse_config

GOOD = """\
schema = kglab-experiment-v1
experiment = dispersive-decay
dim = 2
n = 256
box = 64pi          # quarter-kilometer box
seed = 7
eps = 0.1, 0.05
signs = ++, +-
snapshot = true
"""


def test_parse_round_trip_through_canonical():
    cfg = parse_config(GOOD)
    assert cfg.experiment == "dispersive-decay"
    assert cfg.dim == 2 and cfg.n == 256 and cfg.seed == 7
    assert cfg.box == pytest.approx(64 * math.pi)
    assert cfg.eps == (0.1, 0.05)
    assert cfg.signs == ("++", "+-")
    assert cfg.snapshot is True
    again = parse_config(cfg.canonical())
    assert again == cfg
    assert again.canonical() == cfg.canonical()


def test_content_hash_is_stable_and_sensitive():
    cfg = parse_config(GOOD)
    h = cfg.content_hash()
    assert len(h) == 12 and all(c in "0123456789abcdef" for c in h)
    assert h == parse_config(GOOD).content_hash()
    bumped = parse_config(GOOD.replace("seed = 7", "seed = 8"))
    assert bumped.content_hash() != h


def test_comments_and_blank_lines_are_ignored():
    cfg = parse_config(
        "schema = kglab-experiment-v1\n\n# full-line comment\n"
        "experiment = phase-scan  # trailing comment\n"
    )
    assert cfg.experiment == "phase-scan"


def test_unknown_key_errors_with_line_number():
    bad = GOOD + "resolution = 8\n"
    with pytest.raises(ValueError, match=r"line 10: unknown key 'resolution'"):
        parse_config(bad)


def test_duplicate_key_errors_with_line_number():
    bad = GOOD + "seed = 9\n"
    with pytest.raises(ValueError, match=r"line 10: duplicate key 'seed'"):
        parse_config(bad)


def test_bad_value_cites_line_and_key():
    bad = GOOD.replace("n = 256", "n = many")
    with pytest.raises(ValueError, match=r"line 4: bad value for 'n'"):
        parse_config(bad)


def test_missing_schema_line_is_an_error():
    with pytest.raises(ValueError, match="schema"):
        parse_config("experiment = phase-scan\n")


def test_wrong_schema_version_is_an_error():
    bad = GOOD.replace(SCHEMA, "kglab-experiment-v0")
    with pytest.raises(ValueError, match="not supported"):
        parse_config(bad)


def test_missing_experiment_is_an_error():
    with pytest.raises(ValueError, match="experiment"):
        parse_config("schema = kglab-experiment-v1\nn = 64\n")


def test_key_without_equals_is_an_error():
    with pytest.raises(ValueError, match=r"line 2: expected 'key = value'"):
        parse_config("schema = kglab-experiment-v1\njust some words\n")


def test_pi_suffix_floats():
    cfg = parse_config("schema = kglab-experiment-v1\nexperiment = phase-scan\nbox = pi\n")
    assert cfg.box == pytest.approx(math.pi)
    cfg = parse_config("schema = kglab-experiment-v1\nexperiment = phase-scan\nbox = 2.5pi\n")
    assert cfg.box == pytest.approx(2.5 * math.pi)


def test_validation_runs_at_parse_time():
    cases = [
        ("experiment = warp-drive", "unknown experiment"),
        ("experiment = phase-scan\ndim = 4", "dim"),
        ("experiment = phase-scan\nn = 100", "power of two"),
        ("experiment = phase-scan\neps = 0.1, -0.2", "positive"),
        ("experiment = phase-scan\nt0 = 2.0\nt1 = 1.0", "t0"),
        ("experiment = phase-scan\nschedule = warp", "schedule"),
        ("experiment = phase-scan\nsigns = +T", "sign pair"),
        ("experiment = phase-scan\nalpha = 1.5", "alpha"),
        ("experiment = phase-scan\nblow_up_factor = 0.5", "blow_up_factor"),
        ("experiment = phase-scan\ncheckpoints = 1", "checkpoints"),
        ("experiment = phase-scan\nrule = gauss", "rule"),
    ]
    for body, needle in cases:
        with pytest.raises(ValueError, match=needle):
            parse_config(f"schema = {SCHEMA}\n{body}\n")


def test_load_config_reads_files(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text(GOOD)
    assert load_config(str(p)) == parse_config(GOOD)


def test_out_dir_env_fallback(monkeypatch):
    cfg = parse_config(GOOD)
    monkeypatch.delenv("KGLAB_OUT", raising=False)
    assert cfg.out_dir() == "out"
    monkeypatch.setenv("KGLAB_OUT", "/tmp/elsewhere")
    assert cfg.out_dir() == "/tmp/elsewhere"
    explicit = parse_config(GOOD + "out = results\n")
    assert explicit.out_dir() == "results"


def test_worker_count_env_fallback(monkeypatch):
    cfg = parse_config(GOOD)
    monkeypatch.delenv("KGLAB_WORKERS", raising=False)
    assert cfg.worker_count() == 1
    monkeypatch.setenv("KGLAB_WORKERS", "3")
    assert cfg.worker_count() == 3
    explicit = parse_config(GOOD + "workers = 2\n")
    assert explicit.worker_count() == 2


def test_direct_construction_validates_too():
    with pytest.raises(ValueError):
        ExperimentConfig(experiment="phase-scan", radius=-1.0)
    with pytest.raises(ValueError):
        ExperimentConfig(experiment="phase-scan", signs=())
