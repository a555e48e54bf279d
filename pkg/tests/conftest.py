"""Shared fixtures.

The expensive Monte Carlo runs are session-scoped so that unit-level
examples and the acceptance criteria that need the same spectra pay for
them once.  Acceptance outcomes are collected into ``ACCEPTANCE_LINES`` and
printed as a block at the end of the run, one line per criterion, so they
are visible even without ``-s``.
"""
from __future__ import annotations

import numpy as np
import pytest

from rmtlab.harness import ExperimentConfig, run_experiment
from rmtlab.harness.experiments import spectrum_for
from rmtlab.ensembles import replicate_seed

ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"criterion {criterion:<4} {'PASS' if passed else 'FAIL'}  {detail}")
    print(ACCEPTANCE_LINES[-1])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=_criterion_key):
            terminalreporter.write_line(line)


def _criterion_key(line):
    label = line.split()[1]
    digits = "".join(ch for ch in label if ch.isdigit())
    return (int(digits or 0), label)


_SLOW_FIXTURES = {"acceptance_report", "gue1000_spectra", "computed_reports"}


def pytest_collection_modifyitems(items):
    # anything touching the shared Monte Carlo runs is slow, wherever it lives
    for item in items:
        if _SLOW_FIXTURES & set(getattr(item, "fixturenames", ())):
            item.add_marker(pytest.mark.slow)


@pytest.fixture(scope="session")
def record_criterion():
    return record


@pytest.fixture(scope="session")
def gue1000_spectra():
    """2000 GUE spectra at n=1000 from the beta=2 tridiagonal model (equal in law, ~25x faster)."""
    return np.array([spectrum_for("tridiag:2", 1000, replicate_seed(2024, i))[0].values for i in range(2000)])


_REPORTS = {}


def _report(key, config):
    if key not in _REPORTS:
        _REPORTS[key] = run_experiment(config)
    return _REPORTS[key]


# acceptance configurations; seeds are arbitrary but fixed
ACCEPTANCE_CONFIGS = {
    "c1-gaussian": ExperimentConfig("semicircle", 500, 50, "gaussian", 101),
    "c1-rademacher": ExperimentConfig("semicircle", 500, 50, "rademacher", 102),
    "c1-uniform": ExperimentConfig("semicircle", 500, 50, "uniform", 103),
    "c1-student_t": ExperimentConfig("semicircle", 500, 50, "student_t:20", 104),
    "c3": ExperimentConfig("edge-tw", 400, 2000, "gue", 300, params={"ref": "rademacher"}),
    "c4": ExperimentConfig("bulk-clt", 1000, 2000, "tridiag:2", 400, params={"k": 500}),
    "c5": ExperimentConfig("universality", 500, 5000, "rademacher", 500,
                           params={"k": 250, "ref": "goe", "b": 0.0, "c": 1.0}),
    "c6": ExperimentConfig("trace-moment", 2000, 200, "rademacher", 600),
    "c7": ExperimentConfig("edge-measure", 1000, 200, "goe", 700, params={"r_exp": 0.55}),
    "c8": ExperimentConfig("pair-correlation", 500, 400, "gue", 800),
    "c9": ExperimentConfig("gap-correlation", 1000, 2000, "tridiag:2", 900),
    "c10-shell": ExperimentConfig("prop-shell", 20, 100000, seed=1000, params={"m1": 3, "m2": 3}),
    "c10-volume": ExperimentConfig("prop-volume-ratio", 20, 10000, seed=1001, params={"m1": 3, "m2": 3}),
}


@pytest.fixture(scope="session")
def acceptance_report():
    """``acceptance_report(key)`` runs (once) and returns the report for an acceptance config."""

    def get(key):
        return _report(key, ACCEPTANCE_CONFIGS[key])

    return get


@pytest.fixture(scope="session")
def computed_reports():
    """Reports produced so far in this session (for the cross-criterion invariants)."""
    return _REPORTS
