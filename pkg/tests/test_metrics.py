import csv
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bigmeans.exceptions import IncompleteInputError
from bigmeans.metrics import (
    SUMMARY_COLUMNS,
    aggregate_scores,
    failed_summary,
    mean_over_k,
    relative_error,
    score,
    score_table,
    score_values,
    summarize_runs,
    write_summary_csv,
    write_summary_json,
)


class TestRelativeError:
    def test_equal(self):
        assert relative_error(5.0, 5.0) == 0.0

    def test_double(self):
        assert relative_error(10.0, 5.0) == 100.0

    def test_below_best_is_negative(self):
        # a run that beats the recorded best value
        assert relative_error(99.56, 100.0) == pytest.approx(-0.44)

    @pytest.mark.parametrize("f_best", [0.0, -1.0])
    def test_nonpositive_best(self, f_best):
        with pytest.raises(ValueError):
            relative_error(1.0, f_best)


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-3, 1e6), st.floats(1.0001, 10.0), st.floats(1.0001, 10.0))
def test_relative_error_antitone_in_best(f_best, r1, r2):
    f_bar = f_best * max(r1, r2) * 1.01
    lo, hi = f_best, f_best * min(r1, r2)
    assert relative_error(f_bar, hi) <= relative_error(f_bar, lo)


class TestScore:
    def test_min(self):
        assert score(2.0, [2.0, 4.0, 8.0]) == 1.0

    def test_max(self):
        assert score(8.0, [2.0, 4.0, 8.0]) == 0.0

    def test_middle(self):
        assert score(4.0, [2.0, 4.0, 8.0]) == pytest.approx(2 / 3)

    def test_all_equal(self):
        assert score(3.0, [3.0, 3.0]) == 1.0

    def test_empty(self):
        with pytest.raises(ValueError):
            score(1.0, [])

    def test_failed_algorithm_scores_zero(self):
        s = score_values({"a": 1.0, "b": None, "c": 3.0})
        assert s == {"a": 1.0, "b": 0.0, "c": 0.0}


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=6), st.floats(0.1, 100), st.floats(-100, 100))
def test_score_affine_invariant(values, a, b):
    base = [score(v, values) for v in values]
    moved = [a * v + b for v in values]
    if max(values) - min(values) < 1e-6:
        return
    assert [score(v, moved) for v in moved] == pytest.approx(base, abs=1e-9)


class TestAggregate:
    def test_single_cell(self):
        t = score_table({"d": {"big_means": {"accuracy": 0.3, "cpu": 1.2}}})
        assert t.sum_scores["big_means"] == {"accuracy": 1.0, "cpu": 1.0}
        assert t.efficiency_percent["big_means"] == {"accuracy": 100.0, "cpu": 100.0}

    def test_dominant_algorithm(self):
        raw = {f"d{i}": {"A": {"accuracy": 0.1, "cpu": 1.0}, "B": {"accuracy": 0.5, "cpu": 2.0}} for i in range(3)}
        t = score_table(raw)
        assert t.sum_scores["A"] == {"accuracy": 3.0, "cpu": 3.0}
        assert t.sum_mean_scores["A"] == 3.0
        assert t.sum_mean_scores["B"] == 0.0

    def test_missing_metric(self):
        with pytest.raises(IncompleteInputError):
            aggregate_scores({"d": {"A": {"accuracy": 1.0}}})

    def test_failed_cell_contributes_zero(self):
        t = aggregate_scores({"d1": {"A": {"accuracy": 1.0, "cpu": 1.0}, "B": None},
                              "d2": {"A": {"accuracy": 0.5, "cpu": 0.25}, "B": {"accuracy": 1.0, "cpu": 1.0}}})
        assert t.sum_scores["B"] == {"accuracy": 1.0, "cpu": 1.0}
        assert t.mean_scores["A"] == {"d1": 1.0, "d2": 0.375}
        assert t.sum_mean_scores["A"] == 1.375

    def test_sum_in_fixed_order(self):
        vals = [0.1, 0.7, 0.2, 0.3, 0.9, 0.05]
        table = {f"d{i}": {"A": {"accuracy": v, "cpu": v}} for i, v in enumerate(vals)}
        total = 0.0
        for v in vals:
            total += v
        assert aggregate_scores(table).sum_scores["A"]["accuracy"] == total

    def test_score_range_and_extremes(self):
        rng = np.random.default_rng(0)
        raw = {f"d{i}": {a: {"accuracy": float(rng.random()), "cpu": float(rng.random())} for a in "ABCD"}
               for i in range(4)}
        t = score_table(raw)
        for ds in raw:
            for q in ("accuracy", "cpu"):
                vals = [t.scores[a][ds][q] for a in "ABCD"]
                assert all(0.0 <= v <= 1.0 for v in vals)
                assert max(vals) == 1.0 and min(vals) == 0.0


class TestSummaries:
    def test_ordering_and_argmin(self):
        s = summarize_runs("big_means", "d", 3, [105.0, 101.0, 110.0], [0.2, 0.1, 0.3], [10, 20, 30], 100.0)
        assert s.e_min <= s.e_mean <= s.e_max
        assert s.cpu_min <= s.cpu_mean <= s.cpu_max
        assert s.e_min == pytest.approx(1.0)
        assert s.argmin_run == 1
        assert s.nd_mean == 20

    def test_mean_over_k_skips_failed(self):
        ok = summarize_runs("a", "d", 2, [101.0], [1.0], [1], 100.0)
        bad = failed_summary("a", "d", 3, "boom")
        e, c, excluded = mean_over_k([ok, bad])
        assert (e, c, excluded) == (pytest.approx(1.0), 1.0, 1)
        e, _, excluded = mean_over_k([bad])
        assert math.isnan(e) and excluded == 1

    def test_writers(self, tmp_path):
        sums = [summarize_runs("a", "d", 2, [101.0, 102.0], [1.0, 2.0], [5, 5], 100.0),
                failed_summary("b", "d", 2, "row limit")]
        t = score_table({"d": {"a": {"accuracy": 1.5, "cpu": 1.5}, "b": None}})
        write_summary_csv(tmp_path / "s.csv", sums, t)
        raw = (tmp_path / "s.csv").read_bytes()
        assert b"\r\n" not in raw
        rows = list(csv.DictReader(raw.decode().splitlines()))
        assert list(rows[0]) == SUMMARY_COLUMNS
        assert rows[0]["score_accuracy"] == "1.0" and rows[1]["score_accuracy"] == "0.0"
        write_summary_json(tmp_path / "s.json", sums, t)
        doc = json.loads((tmp_path / "s.json").read_text())
        assert doc["columns"] == SUMMARY_COLUMNS
        assert doc["rows"][1]["e_mean"] is None
