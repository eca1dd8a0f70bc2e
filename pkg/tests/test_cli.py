import json

from qpart.commands.router import cli_router
from qpart.services import graph_service

SMALL_RUN = ["--n-screen", "2", "--n-trials", "10", "--p", "2", "--shots", "300", "--n-iter", "2", "--top-k", "5"]


def test_all_commands_registered():
    assert set(cli_router.names) == {"partition", "order", "sweep", "oracle", "coarsen"}


class TestErrors:
    def test_unknown_flag(self, run_cli):
        code, out = run_cli("partition", "--bogus")
        assert code == 1
        assert json.loads(out)["error"] == "InputError"

    def test_missing_command(self, run_cli):
        code, _ = run_cli()
        assert code == 1

    def test_missing_graph_file(self, run_cli, tmp_path):
        code, out = run_cli("oracle", "--graph", tmp_path / "none.graph")
        assert code == 1
        assert "cannot read graph file" in json.loads(out)["message"]

    def test_malformed_graph(self, run_cli, write_graph):
        code, out = run_cli("oracle", "--graph", write_graph("2 1\n2\n\n"))
        assert code == 1
        assert json.loads(out)["error"] == "GraphFormatError"

    def test_seed_is_mandatory(self, run_cli, write_graph, pinned_graph):
        code, out = run_cli("partition", "--graph", write_graph(pinned_graph), "--k", "4")
        assert code == 1
        assert "--seed is required" in json.loads(out)["message"]

    def test_levels_zero_rejected(self, run_cli, write_graph, pinned_graph):
        code, _ = run_cli("order", "--graph", write_graph(pinned_graph), "--levels", "0", "--seed", "1")
        assert code == 1

    def test_abbreviated_flag_rejected(self, run_cli, write_graph, pinned_graph):
        code, out = run_cli("partition", "--graph", write_graph(pinned_graph), "--se", "1")
        assert code == 1
        assert json.loads(out)["error"] == "InputError"

    def test_delta_and_preset_exclusive(self, run_cli, write_graph, pinned_graph):
        code, _ = run_cli(
            "partition", "--graph", write_graph(pinned_graph), "--delta", "1.0", "--preset", "Drill", "--seed", "1"
        )
        assert code == 1

    def test_qubit_cap_exit_code(self, run_cli, write_graph):
        code, out = run_cli("partition", "--graph", write_graph(graph_service.grid_graph(6, 6)),
                            "--k", "30", "--seed", "1")
        doc = json.loads(out)
        assert code == 2
        assert doc["exit_code"] == 2
        assert "STATEVECTOR_QUBIT_CAP" in doc["message"]

    def test_oracle_cap(self, run_cli, write_graph):
        code, out = run_cli("oracle", "--graph", write_graph(graph_service.path_graph(25)))
        assert code == 2
        assert json.loads(out)["error"] == "ResourceCapError"

    def test_unknown_config_field(self, run_cli, write_graph, single_edge, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"kk": 3}))
        code, _ = run_cli("oracle", "--graph", write_graph(single_edge), "--config", config)
        assert code == 1


class TestOracle:
    def test_single_edge(self, run_cli, write_graph, single_edge, tmp_path):
        part = tmp_path / "part.txt"
        code, out = run_cli("oracle", "--graph", write_graph(single_edge), "--out", part)
        report = json.loads(out)
        assert code == 0
        assert report["cut"] == 1.0
        assert report["bitstring"] == "01"
        assert part.read_text() == "1\n0\n"

    def test_elimination(self, run_cli, tmp_path):
        matrix = tmp_path / "arrow.mtx"
        entries = ["1 1", "2 1", "3 1", "4 1", "2 2", "3 3", "4 4"]
        matrix.write_text("%%MatrixMarket matrix coordinate pattern symmetric\n4 4 7\n" + "\n".join(entries) + "\n")
        code, out = run_cli("oracle", "--matrix", matrix)
        assert code == 0
        assert json.loads(out)["fill_in"] == 3

    def test_config_file_below_flags(self, run_cli, write_graph, single_edge, tmp_path):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"nu": 0.2, "lam": 2.0}))
        code, out = run_cli("oracle", "--graph", write_graph(single_edge), "--config", config, "--nu", "0.1")
        resolved = json.loads(out)["config"]
        assert code == 0
        assert resolved["nu"] == 0.1
        assert resolved["lam"] == 2.0
        assert resolved["command"] == "oracle"

    def test_report_file(self, run_cli, write_graph, single_edge, tmp_path):
        report = tmp_path / "report.json"
        code, out = run_cli("oracle", "--graph", write_graph(single_edge), "--report", report)
        assert code == 0
        assert out == ""
        assert json.loads(report.read_text())["n_vertices"] == 2


class TestSweep:
    def run(self, run_cli, graph, out):
        return run_cli("sweep", "--graph", graph, "--deltas", "0.5,1.0,1.5", "--depths", "1", "2", "--out", out)

    def test_csv_and_summary(self, run_cli, write_graph, pinned_graph, tmp_path):
        sub, _ = graph_service.induced_subgraph(pinned_graph, range(6))
        code, out = self.run(run_cli, write_graph(sub), tmp_path / "sweep.csv")
        assert code == 0
        lines = (tmp_path / "sweep.csv").read_text().splitlines()
        assert lines[0] == "# delta_grid: 0.5,1.0,1.5"
        assert lines[1] == "delta,p,expectation,normalized"
        assert len(lines) == 8
        summary = json.loads(out)
        assert [b["p"] for b in summary["best"]] == [1, 2]
        assert summary["mode"] == "exact"

    def test_minima_agree_with_csv(self, run_cli, write_graph, pinned_graph, tmp_path):
        sub, _ = graph_service.induced_subgraph(pinned_graph, range(6))
        _, out = self.run(run_cli, write_graph(sub), tmp_path / "sweep.csv")
        rows = [line.split(",") for line in (tmp_path / "sweep.csv").read_text().splitlines()[2:]]
        for best in json.loads(out)["best"]:
            row = min((float(e), float(d)) for d, p, e, _ in rows if int(p) == best["p"])
            assert row == (best["expectation"], best["delta"])

    def test_byte_identical(self, run_cli, write_graph, pinned_graph, tmp_path):
        sub, _ = graph_service.induced_subgraph(pinned_graph, range(6))
        graph = write_graph(sub)
        self.run(run_cli, graph, tmp_path / "a.csv")
        self.run(run_cli, graph, tmp_path / "b.csv")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_shots_need_seed(self, run_cli, write_graph, c4):
        code, _ = run_cli("sweep", "--graph", write_graph(c4), "--shots", "100", "--depths", "1")
        assert code == 1


class TestCoarsen:
    def test_writes_coarse_graph_and_map(self, run_cli, write_graph, pinned_graph, tmp_path):
        coarse, mapping = tmp_path / "coarse.graph", tmp_path / "map.txt"
        code, out = run_cli(
            "coarsen", "--graph", write_graph(pinned_graph), "--k", "4", "--n-trials", "20",
            "--seed", "2", "--out", coarse, "--coarse-map", mapping,
        )
        assert code == 0
        g = graph_service.read_metis_graph(coarse)
        assert g.n_vertices == 4
        assert g.total_vertex_weight == 12.0
        assert len(mapping.read_text().splitlines()) == 12
        report = json.loads(out)
        assert report["coarsening"]["k"] == 4
        assert report["config"]["n_trials"] == 20

    def test_benchmark_default_trials(self, run_cli, write_graph, c4):
        code, out = run_cli("coarsen", "--graph", write_graph(c4), "--k", "2", "--seed", "0")
        assert code == 0
        assert json.loads(out)["config"]["n_trials"] == 1000

    def test_k_required(self, run_cli, write_graph, c4):
        code, _ = run_cli("coarsen", "--graph", write_graph(c4), "--seed", "0")
        assert code == 1


class TestPartition:
    def run(self, run_cli, graph, tmp_path, tag):
        return run_cli(
            "partition", "--graph", graph, "--k", "6", "--seed", "9", *SMALL_RUN,
            "--out", tmp_path / f"{tag}.part", "--log", tmp_path / f"{tag}.jsonl",
            "--report", tmp_path / f"{tag}.json",
        )

    def test_outputs_reproducible(self, run_cli, write_graph, pinned_graph, tmp_path):
        graph = write_graph(pinned_graph)
        assert self.run(run_cli, graph, tmp_path, "a")[0] == 0
        assert self.run(run_cli, graph, tmp_path, "b")[0] == 0
        assert (tmp_path / "a.part").read_bytes() == (tmp_path / "b.part").read_bytes()
        assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()

    def test_report_contents(self, run_cli, write_graph, pinned_graph, tmp_path):
        self.run(run_cli, write_graph(pinned_graph), tmp_path, "r")
        report = json.loads((tmp_path / "r.json").read_text())
        assert report["n_vertices"] == 12
        assert report["config"]["k"] == 6
        assert report["coarsening"]["k"] == 6
        assert len(report["iterations"]) == 2
        assert report["pool"]["size"] > 0
        bits = (tmp_path / "r.part").read_text().split()
        assert len(bits) == 12
        log = (tmp_path / "r.jsonl").read_text().splitlines()
        assert [json.loads(line)["iteration"] for line in log] == [0, 1]

    def test_log_flag_alongside_log_level(self, run_cli, write_graph, pinned_graph, tmp_path):
        log = tmp_path / "iterations.jsonl"
        code, _ = run_cli(
            "--log-level", "WARNING", "partition", "--graph", write_graph(pinned_graph), "--k", "6",
            "--seed", "3", *SMALL_RUN, "--log", log,
        )
        assert code == 0
        lines = [json.loads(line) for line in log.read_text().splitlines()]
        assert [line["iteration"] for line in lines] == [0, 1]
        assert all("best_energy" in line for line in lines)

    def test_preset_fills_circuit_parameters(self, run_cli, write_graph, pinned_graph, tmp_path):
        code, out = run_cli(
            "partition", "--graph", write_graph(pinned_graph), "--k", "6", "--seed", "9",
            "--preset", "Drill:24", "--n-screen", "2", "--n-trials", "10", "--shots", "200", "--n-iter", "1",
        )
        config = json.loads(out)["config"]
        assert code == 0
        assert (config["delta"], config["p"], config["c_factor"]) == (1.0, 5, 55)


class TestOrder:
    def test_matrix_input_classical(self, run_cli, tmp_path):
        matrix = tmp_path / "p3.mtx"
        matrix.write_text("%%MatrixMarket matrix coordinate pattern symmetric\n3 3 5\n1 1\n2 1\n2 2\n3 2\n3 3\n")
        perm = tmp_path / "perm.txt"
        code, out = run_cli(
            "order", "--matrix", matrix, "--levels", "1", "--quantum-levels", "--seed", "1", "--out", perm
        )
        report = json.loads(out)
        assert code == 0
        assert [r["ordering_name"] for r in report["merit"]["rows"]] == ["identity", "nd_classical"]
        assert sorted(int(v) for v in perm.read_text().split()) == [0, 1, 2]

    def test_hybrid_and_classical_reported(self, run_cli, write_graph):
        g = graph_service.grid_graph(6, 6)
        code, out = run_cli(
            "order", "--graph", write_graph(g), "--levels", "2", "--min-block-size", "8",
            "--k", "6", "--seed", "4", *SMALL_RUN,
        )
        report = json.loads(out)
        assert code == 0
        names = [r["ordering_name"] for r in report["merit"]["rows"]]
        assert names == ["identity", "nd_classical", "nd_quantum"]
        assert report["merit"]["baseline"] == "identity"
        assert set(report["separator_sizes"]) == {"nd_classical", "nd_quantum"}

    def test_ratios_against_classical_baseline(self, run_cli, write_graph):
        g = graph_service.grid_graph(6, 6)
        code, out = run_cli(
            "order", "--graph", write_graph(g), "--levels", "2", "--min-block-size", "8",
            "--k", "6", "--seed", "4", *SMALL_RUN,
        )
        merit = json.loads(out)["merit"]
        assert code == 0
        assert merit["baselines"] == ["identity", "nd_classical"]
        rows = {r["ordering_name"]: r for r in merit["rows"]}
        assert all(set(r["ratios"]) == {"identity", "nd_classical"} for r in rows.values())
        assert rows["nd_classical"]["ratios"]["nd_classical"] == {"fill": 1.0, "ops": 1.0}
        quantum, classical = rows["nd_quantum"], rows["nd_classical"]
        if classical["fill_in"]:
            assert quantum["ratios"]["nd_classical"]["fill"] == quantum["fill_in"] / classical["fill_in"]

    def test_graph_and_matrix_exclusive(self, run_cli, write_graph, c4, tmp_path):
        code, _ = run_cli("order", "--graph", write_graph(c4), "--matrix", tmp_path / "m.mtx", "--seed", "1")
        assert code == 1
