"""Command-line interface: exit codes, output formats, pipeline fidelity."""

import json

import pytest

from kgforge import (
    DiscoveryConfig,
    Equation,
    PreprocessConfig,
    ProcessSpec,
    build_graph,
    correlation_matrix,
    discover,
    electrostatic_spec,
    from_json,
    from_turtle,
    generate,
    parse_csv,
    preprocess,
    structurally_equal,
    to_json,
    write_csv,
)
from kgforge.cli import main

from .test_service import STAMP, planted_csv

CONST_CSV = "timestamp,a,b,flat\n" + "".join(
    f"{i},{i * 0.7 + 1.0},{(-1) ** i}.5,4.0\n" for i in range(30)
)


@pytest.fixture()
def planted_file(tmp_path):
    path = tmp_path / "planted.csv"
    path.write_text(planted_csv())
    return path


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestExitCodes:
    def test_missing_file_is_data_error(self, capsys):
        code, _, err = run(capsys, "correlate", "missing.csv")
        assert code == 2
        assert "missing.csv" in err

    def test_malformed_csv_is_data_error(self, capsys, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("timestamp,a\n0,1.0\n1\n")
        code, _, err = run(capsys, "ingest", str(path))
        assert code == 2
        assert "row" in err

    def test_unknown_option_is_usage_error(self, capsys, planted_file):
        code, _, _ = run(capsys, "correlate", "--frobnicate", str(planted_file))
        assert code == 1

    def test_unknown_subcommand_is_usage_error(self, capsys):
        code, _, _ = run(capsys, "transmogrify")
        assert code == 1

    def test_unknown_spec_is_usage_error(self, capsys, tmp_path):
        code, _, err = run(capsys, "synth", "--spec", "builtin:nope", "--out", str(tmp_path / "x.csv"))
        assert code == 1
        assert "electrostatic" in err

    def test_analysis_failure_is_data_error(self, capsys, tmp_path):
        path = tmp_path / "single.csv"
        path.write_text("timestamp,only\n0,1.0\n1,2.0\n2,3.0\n")
        code, _, err = run(capsys, "correlate", str(path))
        assert code == 2
        assert "2 columns" in err

    def test_success_is_zero(self, capsys, planted_file):
        code, _, _ = run(capsys, "ingest", str(planted_file))
        assert code == 0


class TestIngest:
    def test_human_output(self, capsys, planted_file):
        code, out, _ = run(capsys, "ingest", str(planted_file))
        assert code == 0
        assert "240 rows, 2 columns" in out
        assert "x: numeric" in out and "y: numeric" in out

    def test_json_output(self, capsys, planted_file):
        code, out, _ = run(capsys, "ingest", str(planted_file), "--json")
        assert code == 0
        doc = json.loads(out)
        assert doc["rows"] == 240
        assert [c["name"] for c in doc["columns"]] == ["y", "x"]

    def test_custom_index_column(self, capsys, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("tick,a,b\n0,1.0,2.0\n1,2.0,3.0\n")
        code, out, _ = run(capsys, "ingest", str(path), "--index-column", "tick")
        assert code == 0
        assert "2 rows" in out


class TestCorrelate:
    def test_json_matches_library(self, capsys, planted_file):
        code, out, _ = run(capsys, "correlate", str(planted_file), "--json")
        assert code == 0
        table, _ = preprocess(
            parse_csv(planted_file.read_text(), source="planted.csv"), PreprocessConfig()
        )
        expected = correlation_matrix(table, "pearson").to_json_dict()
        assert json.loads(out) == expected

    def test_text_table(self, capsys, planted_file):
        code, out, _ = run(capsys, "correlate", str(planted_file), "--method", "spearman")
        assert code == 0
        assert "spearman correlation" in out
        assert out.count("1.000") == 2

    def test_degenerate_column_reported(self, capsys, tmp_path):
        path = tmp_path / "const.csv"
        path.write_text(CONST_CSV)
        code, out, _ = run(capsys, "correlate", str(path))
        assert code == 0
        assert "degenerate" in out and "flat" in out

    def test_column_subset(self, capsys, tmp_path):
        path = tmp_path / "const.csv"
        path.write_text(CONST_CSV)
        code, out, _ = run(capsys, "correlate", str(path), "--columns", "a,b", "--json")
        assert code == 0
        assert json.loads(out)["names"] == ["a", "b"]

    def test_out_file_matches_stdout_json(self, capsys, planted_file, tmp_path):
        dest = tmp_path / "matrix.json"
        code, _, _ = run(capsys, "correlate", str(planted_file), "--out", str(dest))
        assert code == 0
        _, stdout_json, _ = run(capsys, "correlate", str(planted_file), "--json")
        assert dest.read_text() == stdout_json.rstrip("\n")


class TestGranger:
    def test_human_output_marks_significant(self, capsys, planted_file):
        code, out, _ = run(capsys, "granger", str(planted_file), "--alpha", "0.01")
        assert code == 0
        assert "stationary as-is" in out
        assert "*y -> x" in out

    def test_json_output(self, capsys, planted_file):
        code, out, _ = run(
            capsys,
            "granger",
            str(planted_file),
            "--alpha",
            "0.01",
            "--multiple-testing",
            "benjamini_hochberg",
            "--json",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["config"]["multiple_testing"] == "benjamini_hochberg"
        planted = [r for r in doc["results"] if (r["source"], r["target"]) == ("y", "x")][0]
        assert planted["significant"] and planted["p_adjusted"] is not None


def library_graph(csv_text, dataset, corr_threshold=0.5, alpha=0.05):
    table, _ = preprocess(parse_csv(csv_text, source=dataset), PreprocessConfig())
    matrix = correlation_matrix(table, "pearson")
    outcome = discover(table, DiscoveryConfig())
    return build_graph(
        matrix,
        outcome.results,
        corr_threshold=corr_threshold,
        alpha=alpha,
        dataset=dataset,
        created_at=STAMP,
        config=outcome.config.to_json_dict(),
        integration=outcome.integration.to_json_dict(),
    )


class TestGraph:
    def test_json_bytes_match_library(self, capsys, planted_file):
        code, out, _ = run(
            capsys,
            "graph",
            str(planted_file),
            "--created-at",
            STAMP,
            "--dataset-name",
            "planted",
        )
        assert code == 0
        assert out.rstrip("\n") == to_json(library_graph(planted_file.read_text(), "planted"))

    def test_dataset_defaults_to_file_stem(self, capsys, planted_file):
        code, out, _ = run(capsys, "graph", str(planted_file), "--created-at", STAMP)
        assert code == 0
        assert from_json(out).provenance.dataset == "planted"

    def test_turtle_output_parses(self, capsys, planted_file, tmp_path):
        dest = tmp_path / "g.ttl"
        code, _, _ = run(
            capsys,
            "graph",
            str(planted_file),
            "--format",
            "ttl",
            "--created-at",
            STAMP,
            "--dataset-name",
            "planted",
            "--out",
            str(dest),
        )
        assert code == 0
        parsed = from_turtle(dest.read_text())
        assert structurally_equal(parsed, library_graph(planted_file.read_text(), "planted"))

    def test_vacuous_thresholds_give_nodes_only(self, capsys, tmp_path):
        spec = ProcessSpec(
            variables=("u", "v"),
            equations={"u": Equation(), "v": Equation()},
            t=200,
            seed=9,
        )
        path = tmp_path / "noise.csv"
        path.write_text(write_csv(generate(spec)))
        code, out, _ = run(
            capsys,
            "graph",
            str(path),
            "--corr-threshold",
            "2",
            "--alpha",
            "1e-9",
            "--created-at",
            STAMP,
        )
        assert code == 0
        doc = json.loads(out)
        assert len(doc["nodes"]) == 2 and doc["edges"] == []

    def test_deterministic_with_pinned_stamp(self, capsys, planted_file):
        args = ("graph", str(planted_file), "--created-at", STAMP)
        _, first, _ = run(capsys, *args)
        _, second, _ = run(capsys, *args)
        assert first == second


class TestSynth:
    def test_writes_csv_and_truth_sidecar(self, capsys, tmp_path):
        dest = tmp_path / "d.csv"
        code, out, _ = run(
            capsys, "synth", "--seed", "7", "--length", "120", "--out", str(dest)
        )
        assert code == 0
        assert "120 rows" in out
        table = parse_csv(dest.read_text(), source="d.csv")
        assert table.t == 120 and len(table.names) == 6
        truth = json.loads((tmp_path / "d.csv.truth.json").read_text())
        assert truth["name"] == "electrostatic"
        assert {e["source"] for e in truth["causal"]} <= set(table.names)

    def test_output_matches_direct_generation(self, capsys, tmp_path):
        dest = tmp_path / "d.csv"
        run(capsys, "synth", "--seed", "11", "--length", "80", "--out", str(dest))
        assert dest.read_text() == write_csv(generate(electrostatic_spec(seed=11, t=80)))

    def test_synth_then_graph_turtle(self, capsys, tmp_path):
        data = tmp_path / "d.csv"
        ttl = tmp_path / "g.ttl"
        run(capsys, "synth", "--seed", "7", "--length", "400", "--out", str(data))
        code, _, _ = run(
            capsys, "graph", str(data), "--format", "ttl", "--out", str(ttl)
        )
        assert code == 0
        assert from_turtle(ttl.read_text()).has_node("quality")
