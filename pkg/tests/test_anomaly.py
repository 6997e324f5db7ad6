import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codentropy.anomaly import (
    AnomalyEvent,
    DetectorConfig,
    Direction,
    EventLabel,
    MissingLabelsError,
    RollingWindow,
    StrictnessLevel,
    counts_as_true_positive,
    detect,
    detect_series,
    parse_category,
    read_labels,
    sample_size,
    score_events,
    summarize_runs,
)
from codentropy.records import EntropySeries
from detector_fixtures import (
    MEMORY_LATE,
    SPIKE_POSITIONS,
    alternating,
    memory_series,
    reference_detect,
    spike_series,
)

MAX, CONS, LEAST = StrictnessLevel


def test_spike_fixture():
    events = detect(spike_series())
    assert [e.position for e in events] == list(SPIKE_POSITIONS)
    assert all(e.direction is Direction.INSERTION and e.z_score > 6 for e in events)


@pytest.mark.parametrize("fraction", [0.5, 0.75, 1.0])
def test_matches_brute_force(fraction):
    for deltas in (spike_series(), memory_series()):
        events = detect(deltas, DetectorConfig(memory_fraction=fraction))
        assert [e.position for e in events] == reference_detect(deltas, math.floor(fraction * len(deltas)))


def test_forgetting_reveals_masked_event():
    deltas = memory_series()
    short = {e.position for e in detect(deltas, DetectorConfig(memory_fraction=0.5))}
    full = {e.position for e in detect(deltas, DetectorConfig(memory_fraction=1.0))}
    assert short - full == {MEMORY_LATE}


series_values = st.lists(st.floats(-50, 50, allow_nan=False).map(lambda x: round(x, 3)), min_size=0, max_size=120)


@settings(max_examples=100, deadline=None)
@given(series_values, st.integers(1, 40), st.integers(1, 20), st.data())
def test_causality(deltas, window, min_samples, data):
    cfg = DetectorConfig(memory_fraction=None, window_size=window, min_samples=min_samples)
    full = detect(deltas, cfg)
    m = data.draw(st.integers(0, len(deltas)))
    assert detect(deltas[:m], cfg) == [e for e in full if e.position < m]


@settings(max_examples=100, deadline=None)
@given(series_values, st.integers(1, 40))
def test_streaming_matches_brute_force(deltas, window):
    cfg = DetectorConfig(memory_fraction=None, window_size=window, min_samples=min(window, 5))
    got = [e.position for e in detect(deltas, cfg)]
    assert got == reference_detect(deltas, window, min_samples=min(window, 5))


@settings(max_examples=100, deadline=None)
@given(series_values, st.floats(0.5, 5), st.floats(0.5, 5))
def test_threshold_monotonicity(deltas, a, b):
    lo, hi = sorted((a, b))
    strict = {e.position for e in detect(deltas, DetectorConfig(z_threshold=hi, min_samples=5))}
    loose = {e.position for e in detect(deltas, DetectorConfig(z_threshold=lo, min_samples=5))}
    assert strict <= loose


def test_current_delta_not_in_its_window():
    deltas = [0.0, 1.0] * 20 + [100.0]
    ev = detect(deltas, DetectorConfig(min_samples=40))
    assert len(ev) == 1
    assert ev[0].window_mean == 0.5 and ev[0].window_std == 0.5


def test_constant_window_uses_sentinel():
    up = detect([2.0] * 31 + [3.0], DetectorConfig())
    down = detect([2.0] * 31 + [1.0], DetectorConfig())
    assert [(e.position, e.z_score, e.direction) for e in up] == [(31, math.inf, Direction.INSERTION)]
    assert [(e.position, e.z_score) for e in down] == [(31, -math.inf)]
    assert up[0].to_json()["z_score"] == "inf"
    assert detect([2.0] * 40, DetectorConfig()) == []


def test_removal_direction():
    deltas = [0.1, -0.1] * 20 + [-9.0]
    ev = detect(deltas, DetectorConfig())
    assert ev[-1].direction is Direction.REMOVAL and ev[-1].z_score < 0


def test_too_few_samples_gives_nothing():
    assert detect([0.0] * 10 + [1e9], DetectorConfig()) == []
    assert detect([], DetectorConfig()) == []


def test_huge_threshold_gives_nothing():
    assert detect(spike_series(), DetectorConfig(z_threshold=1e9)) == []


def test_rolling_window_tracks_slice():
    rng = np.random.default_rng(3)
    w = RollingWindow(25)
    xs = rng.normal(size=400).tolist()
    for i, x in enumerate(xs):
        w.push(x)
        ref = xs[max(0, i - 24):i + 1]
        mu, sd = w.stats()
        assert mu == pytest.approx(np.mean(ref), abs=1e-9)
        assert sd == pytest.approx(np.std(ref), abs=1e-9)


def test_capacity():
    assert DetectorConfig(memory_fraction=0.5).capacity(1001) == 500
    assert DetectorConfig(memory_fraction=None, window_size=7).capacity(1001) == 7
    for bad in (dict(memory_fraction=0.0), dict(memory_fraction=1.5), dict(memory_fraction=None),
                dict(memory_fraction=0.5, window_size=3), dict(z_threshold=0)):
        with pytest.raises(ValueError):
            DetectorConfig(**bad)


def test_detect_series_uses_ids():
    values = np.cumsum(spike_series()).tolist()
    events = detect_series(EntropySeries.from_values(values))
    assert [e.position for e in events] == list(SPIKE_POSITIONS)
    assert events[0].commit_id == f"{200:040x}"


# labels ----------------------------------------------------------------------

@pytest.mark.parametrize(
    "category, expected",
    [
        ("soft_feat_add", (True, True, True)),
        ("prod_feat_up", (True, True, True)),
        ("soft_feat_rem", (False, True, True)),
        ("prod_feat_rem", (False, True, True)),
        ("soft_feat_add+ext_dep", (False, False, True)),
        ("soft_feat_add+add_dep", (True, True, True)),
        ("refactor", (False, False, False)),
        ("bug_fix", (False, False, False)),
    ],
)
def test_strictness_levels(category, expected):
    lab = EventLabel("c", category, True)
    assert tuple(counts_as_true_positive(lab, lvl) for lvl in (MAX, CONS, LEAST)) == expected
    irrelevant = EventLabel("c", category, False)
    assert not any(counts_as_true_positive(irrelevant, lvl) for lvl in (MAX, CONS, LEAST))


def test_levels_are_nested():
    cats = ["soft_feat_add", "soft_feat_rem", "soft_feat_up+ext_dep", "config", "prod_feat_rem"]
    labels = [EventLabel(str(i), c, True) for i, c in enumerate(cats)]
    ids = [lab.commit_id for lab in labels]
    scores = [score_events(ids, labels, lvl) for lvl in (MAX, CONS, LEAST)]
    assert scores == [1 / 5, 3 / 5, 4 / 5]


def test_bad_categories():
    for bad in ("feature", "refactor+ext_dep", "soft_feat_add+weird"):
        with pytest.raises(ValueError):
            parse_category(bad)


def test_missing_labels():
    ev = AnomalyEvent("abc", 3, 1.0, 4.0, Direction.INSERTION, 1, 0.0, 0.25)
    with pytest.raises(MissingLabelsError) as info:
        score_events([ev], {}, MAX)
    assert info.value.missing == ["abc"]


def test_read_labels(tmp_path):
    path = tmp_path / "labels.csv"
    path.write_text("commit_id,category,relevant\na1,soft_feat_add,true\nb2,refactor,false\n", encoding="utf-8")
    labels = read_labels(path)
    assert labels["a1"] == EventLabel("a1", "soft_feat_add", True)
    assert labels["b2"].relevant is False
    path.write_text("commit_id,category\na1,soft_feat_add\n", encoding="utf-8")
    with pytest.raises(ValueError):
        read_labels(path)


# audit sample sizes ----------------------------------------------------------

@pytest.mark.parametrize("population, n", [(1879, 320), (2225, 328), (2122, 326), (0, 0), (10, 10), (100, 80)])
def test_sample_size(population, n):
    assert sample_size(population) == n


def test_summarize_runs():
    cfg = DetectorConfig(memory_fraction=None, window_size=1, min_samples=1)
    (summary,) = summarize_runs([cfg], alternating(1879))
    assert (summary.events_detected, summary.sample_size) == (1879, 320)
