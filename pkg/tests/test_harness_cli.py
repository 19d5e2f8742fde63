import csv
import io

import pytest

from dynmatch.adversaries import AdaptiveSparsifierEraser, RandomOblivious, SlidingWindow
from dynmatch.cli import main
from dynmatch.framework import FrameworkConfig
from dynmatch.graph import UpdateEvent
from dynmatch.harness import COLUMNS, ExperimentConfig, MetricsRow, ValidityMonitor, default_oracle_period, run_to_string
from dynmatch.errors import InvariantViolation
from dynmatch.graph import DynamicGraph
from dynmatch.matching import Matching


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def small(**kw):
    base = dict(n=30, update_count=400, seed=1, framework=FrameworkConfig(eps=0.25, d=134))
    base.update(kw)
    return ExperimentConfig(**base)


def test_zero_updates_gives_header_only():
    text, res = run_to_string(small(update_count=0))
    assert text == ",".join(COLUMNS) + "\n"
    assert res.updates == 0 and res.ok


def test_rows_and_oracle_points():
    text, res = run_to_string(small(oracle_period=10))
    r = rows(text)
    assert len(r) == 400 and res.oracle_points == 40
    filled = [x for x in r if x["mu"]]
    assert len(filled) == 40
    for x in filled:
        mu, size = int(x["mu"]), int(x["matching_size"])
        if mu:
            assert float(x["ratio"]) == pytest.approx(mu / size)
    assert all(x["wall_ns"] == "" for x in r)
    assert default_oracle_period(50_000) == 100


def test_same_config_same_bytes():
    for kind in (RandomOblivious(0.7), SlidingWindow(50), AdaptiveSparsifierEraser()):
        a, _ = run_to_string(small(adversary=kind))
        b, _ = run_to_string(small(adversary=kind))
        assert a == b
    c, _ = run_to_string(small(seed=2))
    assert c != a


def test_det_runs_and_checks_pigeonhole():
    text, res = run_to_string(small(algo="det", K=2))
    assert res.ok and res.pigeonhole_violations == 0
    assert rows(text)[-1]["sparsifier_edges"] == ""


def test_sparsifier_size_bound_checked():
    _, res = run_to_string(small(check_sparsifier_bound=True, adversary=RandomOblivious(0.75)))
    assert res.samples_checked > 0 and res.sample_bound_violations == 0


def test_wall_time_column():
    text, _ = run_to_string(small(update_count=20, record_wall_time=True))
    assert all(int(x["wall_ns"]) >= 0 for x in rows(text))


def test_metrics_row_formatting():
    row = MetricsRow(3, 2, 4, float("inf"), 1.23456789012345, None, 7, 9, None)
    assert row.cells() == ["3", "2", "4", "inf", "1.2345678901", "", "7", "9", ""]


def test_validity_monitor_catches_stale_served_edge():
    g = DynamicGraph.from_edges(4, [(0, 1), (2, 3)])
    mon = ValidityMonitor()
    m = Matching([(0, 1)])
    mon.check(g, m, UpdateEvent.insert(2, 3))
    g.delete_edge((0, 1))
    with pytest.raises(InvariantViolation):
        mon.check(g, m, UpdateEvent.delete(0, 1))
    with pytest.raises(InvariantViolation):
        ValidityMonitor().check(g, Matching([(1, 2)]), UpdateEvent.insert(2, 3))


def test_replay_with_queries(tmp_path):
    stream = tmp_path / "s.txt"
    stream.write_text("a 0 1\na 1 2\nq\n# comment\na 2 3\nd 1 2\nq\n")
    text, res = run_to_string(
        ExperimentConfig(n=4, update_count=0, framework=FrameworkConfig(eps=0.25, d=134),
                         stream=[UpdateEvent.insert(0, 1), UpdateEvent.query()])
    )
    assert res.oracle_points == 1
    out = tmp_path / "o.csv"
    assert main(["replay", "--stream", str(stream), "--eps", "0.25", "--d", "134", "--out", str(out)]) == 0
    r = rows(out.read_text())
    assert len(r) == 6 and [x["mu"] for x in r if x["mu"]] == ["1", "2"]


def test_cli_run_writes_csv_and_is_reproducible(tmp_path):
    outs = []
    for name in ("a.csv", "b.csv"):
        p = tmp_path / name
        argv = ["run", "--n", "40", "--updates", "300", "--eps", "0.25", "--d", "134",
                "--adversary", "matched", "--seed", "7", "--out", str(p)]
        assert main(argv) == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]
    assert len(rows(outs[0].decode())) == 300


def test_cli_det_and_window(tmp_path):
    p = tmp_path / "d.csv"
    assert main(["run", "--algo", "det", "--K", "2", "--n", "40", "--updates", "200",
                 "--adversary", "window", "--window", "30", "--out", str(p)]) == 0


def test_cli_stepped_mode_and_gamma3(tmp_path):
    p = tmp_path / "s.csv"
    assert main(["run", "--n", "30", "--updates", "300", "--eps", "0.2", "--d", "20", "--gamma", "3",
                 "--policy", "alg1", "--work-mode", "stepped", "--out", str(p)]) == 0


def test_cli_bad_input_exits_nonzero(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("a 0 1\nd 1 2\n")
    assert main(["replay", "--stream", str(bad), "--eps", "0.25", "--d", "134"]) == 1
    assert "error" in capsys.readouterr().err
    assert main(["run", "--n", "10", "--updates", "5", "--eps", "0.7"]) == 1


def test_cli_verify_fractional(capsys):
    assert main(["verify", "--suite", "fractional"]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 2
