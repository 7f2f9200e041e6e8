"""Shared fixtures plus a per-criterion pass/fail summary for the gate tests.

Tests tagged ``@pytest.mark.criterion("<name>")`` feed a table printed at the
end of the run, one line per criterion.  A criterion with several tests is
FAIL if any of them failed, SKIP only if all were skipped.
"""

import time
from dataclasses import dataclass

import pytest
from hypothesis import settings

settings.register_profile("suite", max_examples=25, deadline=None)
settings.load_profile("suite")

_ORDER = []  # criteria in first-seen order


def pytest_configure(config):
    config._criterion_status = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or not mark.args:
        return
    name = mark.args[0]
    status = item.config._criterion_status
    if name not in status:
        _ORDER.append(name)
    if rep.failed:
        status[name] = "FAIL"          # failure wins regardless of phase
    elif rep.skipped:
        status.setdefault(name, "SKIP")
    elif rep.when == "call" and rep.passed:
        if status.get(name) != "FAIL":
            status[name] = "PASS"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    status = getattr(config, "_criterion_status", {})
    if not status:
        return
    terminalreporter.section("acceptance criteria")
    for name in _ORDER:
        terminalreporter.write_line(f"[{status[name]}] {name}")


# --- session corpora ----------------------------------------------------

@pytest.fixture(scope="session")
def toy_corpus(tmp_path_factory):
    """Deterministic 6-speaker corpus, 7 train + 2 test utterances each."""
    from veriphon.synth import synth_corpus

    root = tmp_path_factory.mktemp("toy_corpus")
    return synth_corpus(str(root), n_speakers=6, n_train=7, n_test=2, seed=0)


@pytest.fixture(scope="session")
def two_speaker_corpus(tmp_path_factory):
    from veriphon.synth import synth_corpus

    root = tmp_path_factory.mktemp("two_speaker")
    return synth_corpus(str(root), n_speakers=2, n_train=7, n_test=2, seed=0)


@dataclass
class DeskRun:
    manifest: object
    trained: dict      # preset name -> TrainedSystem
    reports: dict      # preset name -> EvalReport
    elapsed_s: float


@pytest.fixture(scope="session")
def desk_run(toy_corpus):
    """Train and evaluate the four headline systems on the toy corpus.

    Clean plus pink noise at 10 dB; the noisy waveforms are shared across
    systems through the condition cache, but every system is trained from
    scratch.
    """
    from veriphon.evaluate import (evaluate_systems, make_system,
                                   parse_condition, train_systems)

    conditions = [parse_condition("clean"), parse_condition("pink@10dB")]
    cache = {}
    trained, reports = {}, {}
    t0 = time.perf_counter()
    for name in ("basic1", "proposed1", "proposed2", "proposed3"):
        trained[name] = train_systems(toy_corpus, make_system(name), seed=0)
        reports[name] = evaluate_systems(toy_corpus, trained[name],
                                         conditions, cache=cache)
    elapsed = time.perf_counter() - t0
    return DeskRun(toy_corpus, trained, reports, elapsed)
