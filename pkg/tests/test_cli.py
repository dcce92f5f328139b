"""
命令行测试
"""

import json
from pathlib import Path

import pytest

from waca_simulator.cli import EXIT_INTERNAL, EXIT_OK, EXIT_PARSE, EXIT_USAGE, build_parser, main
from waca_simulator.config import OUTPUT_DIR_ENV

FIXTURES = Path(__file__).parent / "fixtures"
PATH3 = str(FIXTURES / "path3.json")


def read_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


@pytest.fixture(autouse=True)
def isolated_cwd(tmp_path, monkeypatch):
    """在临时目录中运行，避免读到工作目录下的配置文件"""
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv(OUTPUT_DIR_ENV, raising=False)
    return tmp_path


def write_split_line(path):
    signals = [1.0, 0.05, 0.0, 0.05, 0.9]
    doc = {
        "side": 100.0,
        "range": 15.0,
        "nodes": [
            {"id": i, "x": 10.0 * i, "y": 0.0, "power_ratio": 1.0, "signal": s}
            for i, s in enumerate(signals)
        ],
    }
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


class TestParser:
    """测试参数解析"""

    def test_command_required(self):
        with pytest.raises(SystemExit) as info:
            build_parser().parse_args([])
        assert info.value.code == 2

    def test_disseminate_needs_chunks(self):
        with pytest.raises(SystemExit) as info:
            main(["disseminate", "--n", "5", "--range", "10", "--interested", "0"])
        assert info.value.code == 2

    def test_experiment_lists(self):
        args = build_parser().parse_args(["experiment", "--n", "20", "30", "--range", "10", "15"])
        assert args.node_counts == [20, 30]
        assert args.ranges == [10.0, 15.0]
        assert args.parallel == 1


class TestClusterCommand:
    """测试 cluster 子命令"""

    def test_random_deployment(self, tmp_path):
        out = tmp_path / "out"
        code = main([
            "--output-dir", str(out), "cluster", "--n", "20", "--range", "30", "--seed", "4",
            "--dot", str(out / "g.dot"), "--png", str(out / "g.png"), "--quiet",
        ])
        assert code == EXIT_OK
        state = read_json(out / "state.json")
        assert len(state["roles"]) == 20
        assert "CH" in state["roles"].values()
        assert (out / "g.dot").read_text(encoding="utf-8").startswith("graph topology {")
        assert (out / "g.png").stat().st_size > 0
        manifest = read_json(out / "manifest.json")
        assert manifest["command"] == "cluster"
        assert manifest["seed"] == 4
        assert {"state.json", "topology.json"} <= set(manifest["outputs"])
        assert manifest["inputs"] == {"n": 20, "side": 100.0, "range": 30.0}

    def test_same_seed_same_state(self, tmp_path):
        for name in ("a", "b"):
            main(["--output-dir", str(tmp_path / name), "cluster",
                  "--n", "15", "--range", "25", "--seed", "9", "--quiet"])
        assert (tmp_path / "a" / "state.json").read_bytes() == (tmp_path / "b" / "state.json").read_bytes()

    def test_topology_file(self, tmp_path, capsys):
        code = main(["--output-dir", str(tmp_path), "cluster", "--topology", PATH3, "--quiet"])
        assert code == EXIT_OK
        state = read_json(tmp_path / "state.json")
        assert state["roles"] == {"0": "SL", "1": "SH", "2": "CH"}
        assert state["rounds"] == 2
        assert "derived seed" in capsys.readouterr().err

    def test_report_printed(self, tmp_path, capsys):
        main(["--output-dir", str(tmp_path), "cluster", "--topology", PATH3, "--seed", "1"])
        out = capsys.readouterr().out
        assert "=" * 60 in out
        assert "簇头 (CH):    1" in out
        assert "WCA 簇头数:   2" in out

    def test_missing_deployment_args(self, tmp_path):
        assert main(["--output-dir", str(tmp_path), "cluster", "--n", "20"]) == EXIT_USAGE

    def test_invalid_ideal_degree(self, tmp_path):
        code = main(["--output-dir", str(tmp_path), "cluster", "--topology", PATH3,
                     "--ideal-degree", "0"])
        assert code == EXIT_USAGE

    def test_unreadable_topology(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{", encoding="utf-8")
        assert main(["--output-dir", str(tmp_path), "cluster", "--topology", str(bad)]) == EXIT_PARSE


class TestCompareCommand:
    """测试 compare 子命令"""

    def test_path_fixture(self, tmp_path):
        code = main(["--output-dir", str(tmp_path), "compare", "--topology", PATH3, "--seed", "1"])
        assert code == EXIT_OK
        report = read_json(tmp_path / "compare.json")
        assert report["waca"]["heads"] == 1
        assert report["waca"]["subheads"] == 1
        assert report["waca"]["chain_depth"] == 2
        assert report["wca"]["heads"] == 2
        assert report["wca"]["cluster_sizes"] == {"0": 2, "2": 1}
        assert (tmp_path / "wca_state.json").exists()


class TestExperimentCommand:
    """测试 experiment 子命令"""

    def run(self, out):
        return main(["--output-dir", str(out), "experiment", "--runs", "1",
                     "--n", "20", "--range", "150", "--quiet"])

    def test_single_cell(self, tmp_path):
        assert self.run(tmp_path) == EXIT_OK
        lines = [l for l in (tmp_path / "rows.csv").read_text(encoding="utf-8").splitlines()
                 if not l.startswith("#")]
        assert lines[0] == "n,range,run,waca_heads,waca_subheads,wca_heads,settled,settle_rounds"
        assert len(lines) == 2
        assert lines[1].startswith("20,150.000000,0,1,0,1,")
        trends = read_json(tmp_path / "trends.json")
        assert trends["20"]["head_rank_correlation"] is None
        manifest = read_json(tmp_path / "manifest.json")
        assert manifest["config"]["runs"] == 1
        assert manifest["inputs"] == {"cells": 1}

    def test_byte_identical_outputs(self, tmp_path):
        self.run(tmp_path / "a")
        self.run(tmp_path / "b")
        for name in ("rows.csv", "aggregate.csv", "trends.json", "manifest.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_config_file_overrides(self, tmp_path):
        config = tmp_path / "sim.yaml"
        config.write_text("sweep:\n  runs: 2\n  ranges: [40]\n  node_counts: [10]\n",
                          encoding="utf-8")
        code = main(["--config", str(config), "--output-dir", str(tmp_path), "experiment",
                     "--runs", "3", "--quiet"])
        assert code == EXIT_OK
        body = [l for l in (tmp_path / "rows.csv").read_text(encoding="utf-8").splitlines()
                if not l.startswith("#")]
        # 命令行的 --runs 覆盖配置文件
        assert len(body) == 1 + 3
        assert all(l.startswith("10,40.000000,") for l in body[1:])

    def test_invalid_parallel(self, tmp_path):
        code = main(["--output-dir", str(tmp_path), "experiment", "--parallel", "0", "--quiet"])
        assert code == EXIT_USAGE


class TestDisseminateCommand:
    """测试 disseminate 子命令"""

    def test_single_node(self, tmp_path):
        code = main(["--output-dir", str(tmp_path), "disseminate", "--n", "1", "--range", "5",
                     "--seed", "2", "--chunks", "1", "--interested", "0", "--trace"])
        assert code == EXIT_OK
        report = read_json(tmp_path / "report.json")
        assert report["rounds"] == 1
        assert report["completed"] is True
        assert (tmp_path / "trace.jsonl").read_text(encoding="utf-8").count("\n") == 1
        manifest = read_json(tmp_path / "manifest.json")
        assert manifest["config"]["job"]["chunk_count"] == 1

    def test_default_relays_cross_clusters(self, tmp_path):
        topo = write_split_line(tmp_path / "line.json")
        code = main(["--output-dir", str(tmp_path), "disseminate", "--topology", topo,
                     "--seed", "1", "--chunks", "3", "--interested", "2",
                     "--max-injection-points", "1"])
        assert code == EXIT_OK
        report = read_json(tmp_path / "report.json")
        assert report["injection_points"] == [0]
        assert report["completed"] is True
        assert report["rounds"] == 4

    def test_unreachable_is_not_an_error(self, tmp_path, capsys):
        main(["--output-dir", str(tmp_path), "cluster", "--topology", PATH3, "--seed", "1",
              "--quiet"])
        # 节点 3 不在保存的状态中，它所在的分区没有簇头
        doc = read_json(FIXTURES / "path3.json")
        doc["nodes"].append({"id": 3, "x": 90.0, "y": 90.0, "power_ratio": 1.0, "signal": 0.5})
        topo = tmp_path / "grown.json"
        topo.write_text(json.dumps(doc), encoding="utf-8")
        code = main(["--output-dir", str(tmp_path / "d"), "disseminate", "--topology", str(topo),
                     "--seed", "1", "--state", str(tmp_path / "state.json"),
                     "--chunks", "3", "--interested", "0", "3"])
        assert code == EXIT_OK
        report = read_json(tmp_path / "d" / "report.json")
        assert report["completed"] is False
        assert report["rounds"] == -1
        assert report["incomplete"] == [3]
        assert "incomplete" in capsys.readouterr().err

    def test_saved_state(self, tmp_path):
        main(["--output-dir", str(tmp_path), "cluster", "--topology", PATH3, "--seed", "1",
              "--quiet"])
        code = main(["--output-dir", str(tmp_path / "d"), "disseminate", "--topology", PATH3,
                     "--seed", "1", "--state", str(tmp_path / "state.json"),
                     "--chunks", "2", "--interested", "0"])
        assert code == EXIT_OK
        assert read_json(tmp_path / "d" / "report.json")["injection_points"] == [2]

    def test_unknown_interested_node(self, tmp_path):
        code = main(["--output-dir", str(tmp_path), "disseminate", "--topology", PATH3,
                     "--seed", "1", "--chunks", "1", "--interested", "42"])
        assert code == EXIT_USAGE


class TestEventsCommand:
    """测试 events 子命令"""

    def script(self, tmp_path, *lines):
        path = tmp_path / "events.jsonl"
        path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        return str(path)

    def test_empty_script(self, tmp_path):
        script = self.script(tmp_path)
        code = main(["--output-dir", str(tmp_path), "events", "--topology", PATH3, "--seed", "1",
                     script])
        assert code == EXIT_OK
        timeline = read_json(tmp_path / "timeline.json")
        assert len(timeline) == 1
        assert timeline[0]["event"] is None
        assert timeline[0]["state"]["roles"] == {"0": "SL", "1": "SH", "2": "CH"}

    def test_remove_clusterhead_verified(self, tmp_path):
        script = self.script(tmp_path, '{"kind": "node-removed", "id": 2}')
        code = main(["--output-dir", str(tmp_path), "events", "--topology", PATH3, "--seed", "1",
                     "--verify", script])
        assert code == EXIT_OK
        timeline = read_json(tmp_path / "timeline.json")
        assert len(timeline) == 2
        assert timeline[1]["event"] == {"kind": "node-removed", "id": 2}
        assert set(timeline[1]["state"]["roles"]) == {"0", "1"}
        assert "CH" in timeline[1]["state"]["roles"].values()
        assert [n["id"] for n in read_json(tmp_path / "topology.json")["nodes"]] == [0, 1]
        assert read_json(tmp_path / "manifest.json")["config"]["verify"] is True

    def test_many_events_verified(self, tmp_path):
        script = self.script(
            tmp_path,
            '{"kind": "node-added", "id": 100, "x": 30.0, "y": 0.0, "signal": 1.0}',
            '{"kind": "attribute-changed", "id": 0, "signal": 1.0, "power_ratio": 3.0}',
            '{"kind": "node-moved", "id": 1, "x": 12.0, "y": 3.0}',
            '{"kind": "node-removed", "id": 2}',
        )
        code = main(["--output-dir", str(tmp_path), "events", "--n", "25", "--range", "30",
                     "--seed", "6", "--verify", script])
        assert code == EXIT_OK
        assert len(read_json(tmp_path / "timeline.json")) == 5

    def test_bad_event_line(self, tmp_path):
        script = self.script(tmp_path, '{"kind": "node-removed", "id": 2}', '{"kind": "warp"}')
        code = main(["--output-dir", str(tmp_path), "events", "--topology", PATH3, "--seed", "1",
                     script])
        assert code == EXIT_PARSE

    def test_unknown_node_event(self, tmp_path):
        script = self.script(tmp_path, '{"kind": "node-removed", "id": 42}')
        code = main(["--output-dir", str(tmp_path), "events", "--topology", PATH3, "--seed", "1",
                     script])
        assert code == EXIT_USAGE


class TestConfiguration:
    """测试配置与输出目录"""

    def test_output_dir_from_environment(self, tmp_path, monkeypatch):
        target = tmp_path / "env-out"
        monkeypatch.setenv(OUTPUT_DIR_ENV, str(target))
        assert main(["cluster", "--topology", PATH3, "--seed", "1", "--quiet"]) == EXIT_OK
        assert (target / "state.json").exists()

    def test_flag_beats_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "env-out"))
        main(["--output-dir", str(tmp_path / "flag"), "cluster", "--topology", PATH3,
              "--seed", "1", "--quiet"])
        assert (tmp_path / "flag" / "state.json").exists()
        assert not (tmp_path / "env-out").exists()

    def test_missing_config_file(self, tmp_path):
        code = main(["--config", str(tmp_path / "nope.yaml"), "cluster", "--topology", PATH3])
        assert code == EXIT_USAGE

    def test_malformed_config_file(self, tmp_path):
        config = tmp_path / "bad.yaml"
        config.write_text("weights: [1, 2\n", encoding="utf-8")
        assert main(["--config", str(config), "cluster", "--topology", PATH3]) == EXIT_USAGE

    def test_unknown_weight_setting(self, tmp_path):
        config = tmp_path / "sim.yaml"
        config.write_text("weights:\n  wf9: 1.0\n", encoding="utf-8")
        code = main(["--config", str(config), "--output-dir", str(tmp_path), "cluster",
                     "--topology", PATH3, "--seed", "1"])
        assert code == EXIT_USAGE

    def test_config_weights_used(self, tmp_path):
        config = tmp_path / "sim.yaml"
        config.write_text("weights:\n  wf2: 0.0\n", encoding="utf-8")
        main(["--config", str(config), "--output-dir", str(tmp_path), "cluster",
              "--topology", PATH3, "--seed", "1", "--quiet"])
        manifest = read_json(tmp_path / "manifest.json")
        assert manifest["config"]["weight_cfg"]["wf2"] == 0.0
        assert manifest["config"]["wca_cfg"]["ideal_degree"] == 7

    def test_exit_code_constants(self):
        assert (EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_INTERNAL) == (0, 2, 3, 4)


if __name__ == "__main__":
    pytest.main([__file__])
