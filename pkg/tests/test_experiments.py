"""Experiment plumbing at unit scale: dispatch, pinned configs, worker
mapping, and one cheap end-to-end driver run."""

import dataclasses

import pytest

from kglab.config import EXPERIMENT_IDS, ExperimentConfig
from kglab.experiments import (
    CRITERIA,
    EXPERIMENT_DRIVERS,
    pinned_config,
    run_experiment,
    run_phase_scan,
)


def test_every_experiment_id_has_a_driver_and_a_pin():
    assert set(EXPERIMENT_DRIVERS) == set(EXPERIMENT_IDS)
    # the linear-flow measurements pin per dimension, the rest pin once
    per_dim = {"dispersive-decay": 1, "strichartz-growth": 1, "phase-scan": 1}
    for ident in EXPERIMENT_IDS:
        cfg = pinned_config(ident, per_dim.get(ident))
        assert cfg.experiment == ident


def test_pinned_config_unknown_id_raises():
    with pytest.raises(ValueError, match="no pinned config"):
        pinned_config("nope")


def test_pinned_dimension_variants_differ():
    d1 = pinned_config("dispersive-decay", 1)
    d2 = pinned_config("dispersive-decay", 2)
    assert d1.dim == 1 and d2.dim == 2
    assert d1.content_hash() != d2.content_hash()


def test_criteria_names_are_unique_and_split_fast_slow():
    names = [name for name, _, _ in CRITERIA]
    assert len(names) == len(set(names)) == 10
    fast = [name for name, _, in_fast in CRITERIA if in_fast]
    assert len(fast) == 6


def test_run_experiment_dispatches_and_reports():
    cfg = ExperimentConfig(experiment="phase-scan", dim=1, radius=3.0,
                           step=0.5, signs=("+-",))
    report = run_experiment(cfg)
    assert report.experiment == "phase-scan"
    assert report.config_hash == cfg.content_hash()
    assert report.verdict == "pass"
    assert [row["pair"] for row in report.rows] == ["+-"]
    assert report.checks["+--above-floor"]
    assert report.checks["+--refinement-stable"]


def test_worker_pool_gives_identical_rows():
    base = ExperimentConfig(experiment="phase-scan", dim=1, radius=3.0,
                            step=0.5, signs=("++", "+-", "--"))
    solo = run_phase_scan(base)
    pooled = run_phase_scan(dataclasses.replace(base, workers=3))
    assert solo.rows == pooled.rows
    assert solo.verdict == pooled.verdict == "pass"
