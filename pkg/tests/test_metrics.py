import json

import pytest

from mimb import parse_network, run_benchmark, score
from mimb.metrics import format_pm, mean_std

FORK_NET = """\
VAR A a b
VAR T a b
VAR B a b
VAR C a b
PARENTS T A
PARENTS B T C
CPT A
0.4 0.6
CPT T
0.85 0.15
0.2 0.8
CPT B
0.9 0.1
0.3 0.7
0.6 0.4
0.05 0.95
CPT C
0.5 0.5
"""


class TestScore:
    def test_perfect(self):
        assert score({"A", "B", "C"}, {"A", "B", "C"}) == (1.0, 1.0, 1.0)

    def test_three_of_four(self):
        s = score({"A", "B", "C", "X"}, {"A", "B", "C", "D"})
        assert s.precision == s.recall == s.f1 == 0.75

    def test_empty_found_nonempty_truth(self):
        assert score(set(), {"A"}) == (0.0, 0.0, 0.0)

    def test_both_empty(self):
        assert score(set(), set()) == (1.0, 1.0, 1.0)

    def test_nonempty_found_empty_truth(self):
        s = score({"A"}, set())
        assert s.precision == 0.0 and s.f1 == 0.0

    def test_order_invariance(self):
        assert score(["B", "A"], ["A", "B"]) == score(["A", "B"], ["B", "A"])


class TestAggregation:
    def test_mean_std(self):
        m, s = mean_std([1.0, 1.0, 1.0])
        assert m == 1.0 and s == 0.0

    def test_format(self):
        assert format_pm(1.0, 0.0) == "1.00±0.00"
        assert format_pm(0.9434, 0.0412) == "0.94±0.04"


@pytest.fixture(scope="module")
def fork_bn():
    return parse_network(FORK_NET)


class TestBenchmark:
    def test_report_is_deterministic(self, fork_bn):
        kwargs = dict(
            n_datasets=2, rows_per_dataset=400, regime="zeta_zero",
            alpha=0.05, reps=3, seed=5, max_targets_per_set=1,
        )
        a = run_benchmark(fork_bn, "T", algorithm="mimb", **kwargs)
        b = run_benchmark(fork_bn, "T", algorithm="mimb", **kwargs)
        assert a.to_json_dict() == b.to_json_dict()

    def test_report_round_trips_through_json(self, fork_bn):
        report = run_benchmark(
            fork_bn, "T", algorithm="baseline", n_datasets=2,
            rows_per_dataset=400, reps=2, seed=8, max_targets_per_set=1,
        )
        payload = json.loads(json.dumps(report.to_json_dict()))
        assert payload["algorithm"] == "baseline"
        assert payload["truth"]["mb"] == ["A", "B", "C"]
        assert len(payload["per_rep"]) == 2
        assert "±" in payload["mb"]["f1"]["pretty"]

    def test_rejects_unknown_algorithm(self, fork_bn):
        with pytest.raises(ValueError, match="algorithm"):
            run_benchmark(fork_bn, "T", algorithm="psychic")
