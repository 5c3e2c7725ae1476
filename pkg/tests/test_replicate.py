import numpy as np
import pytest

from lattice_cube.replicate import CSV_COLUMNS, draw_settings, replicate_asian


def test_draw_settings_reproducible():
    a = draw_settings(20, (1, 2, 4), (0.1, 0.7), 5)
    assert a == draw_settings(20, (1, 2, 4), (0.1, 0.7), 5)
    assert a != draw_settings(20, (1, 2, 4), (0.1, 0.7), 6)
    assert all(d in (1, 2, 4) and 0.1 <= s <= 0.7 for d, s, _ in a)
    # prefix stability: replication i does not depend on the total count
    assert draw_settings(5, (1, 2, 4), (0.1, 0.7), 5) == a[:5]


def test_workers_match_serial(shipped):
    serial, s1 = replicate_asian(shipped, reps=4, dims=(1, 2), seed=3)
    par, s2 = replicate_asian(shipped, reps=4, dims=(1, 2), seed=3, workers=2)
    strip = lambda rows: [(r.d, r.sigma, r.estimate, r.n) for r in rows]
    assert strip(serial) == strip(par)
    assert s1["success_count"] == s2["success_count"]


def test_summary_accounting(shipped):
    rows, summary = replicate_asian(shipped, reps=5, dims=(2,), seed=1, periodization="tent")
    assert summary["success_count"] + summary["failure_count"] == 5
    assert summary["periodization"] == "tent"
    assert sum(summary["sample_size_distribution"].values()) == 5
    assert all(r.exact > 0 and r.success == (r.abs_error <= 0.02) for r in rows)
    assert set(CSV_COLUMNS) == set(rows[0].__dict__)


def test_failures_are_recorded(shipped):
    rows, summary = replicate_asian(shipped, reps=2, dims=(1,), seed=0,
                                    option={"S0": -1.0, "K": 100.0, "T": 1.0, "rate": 0.03})
    assert summary["failure_count"] == 2 and len(summary["exceptions"]) == 2
    assert all("ValueError" in r.error and not r.success for r in rows)
    assert summary["error_quantiles"] == {}


def test_validation(shipped):
    with pytest.raises(ValueError):
        replicate_asian(shipped, reps=0)
    with pytest.raises(ValueError):
        replicate_asian(shipped, reps=1, sigma_range=(0.0, 0.5))
    with pytest.raises(ValueError):
        replicate_asian(shipped, reps=1, dims=(128,))
