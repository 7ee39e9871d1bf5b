import json

import pytest

from seqrank.cli import main
from seqrank.corpus import parse_run
from seqrank.fixtures import generate_fixture, write_fixture_files


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    fixture = generate_fixture(n_topics=4, n_inversions=3, n_fillers=20, seed=13)
    return write_fixture_files(fixture, tmp_path_factory.mktemp("cli_fixture"))


def run_cli(*argv):
    return main([str(a) for a in argv])


class TestExitCodes:
    def test_usage_error_is_1(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli("search")  # missing required arguments
        assert exc.value.code == 1

    def test_unknown_command_is_1(self):
        with pytest.raises(SystemExit) as exc:
            run_cli("frobnicate")
        assert exc.value.code == 1

    def test_runtime_error_is_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.tsv"
        bad.write_text("only-one-column\n", encoding="utf-8")
        code = run_cli("index", "--corpus", bad, "--out", tmp_path / "x.srix")
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_missing_file_is_2(self, tmp_path):
        code = run_cli(
            "index", "--corpus", tmp_path / "missing.tsv", "--out", tmp_path / "x.srix"
        )
        assert code == 2


class TestIndexSearch:
    def test_index_then_search(self, files, tmp_path, capsys):
        index_path = tmp_path / "fixture.srix"
        assert run_cli("index", "--corpus", files["corpus"], "--out", index_path) == 0
        assert index_path.stat().st_size > 0

        run_path = tmp_path / "bm25.run"
        code = run_cli(
            "search",
            "--index", index_path,
            "--topics", files["topics"],
            "--topics-format", "tsv3",
            "--k", "100",
            "--out", run_path,
        )
        assert code == 0
        run = parse_run(run_path.open("rb"))
        assert run.tag == "firststage"
        assert len(run.topics) == 4

    def test_search_from_corpus_matches_index_route(self, files, tmp_path):
        index_path = tmp_path / "i.srix"
        run_cli("index", "--corpus", files["corpus"], "--out", index_path)
        out_a = tmp_path / "a.run"
        out_b = tmp_path / "b.run"
        run_cli(
            "search", "--index", index_path, "--topics", files["topics"],
            "--topics-format", "tsv3", "--out", out_a,
        )
        run_cli(
            "search", "--corpus", files["corpus"], "--topics", files["topics"],
            "--topics-format", "tsv3", "--out", out_b,
        )
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_expand_search(self, files, tmp_path):
        out = tmp_path / "rm3.run"
        code = run_cli(
            "expand-search",
            "--corpus", files["corpus"],
            "--topics", files["topics"],
            "--topics-format", "tsv3",
            "--fb-docs", "3",
            "--fb-terms", "10",
            "--out", out,
        )
        assert code == 0
        assert parse_run(out.open("rb")).topics


class TestRerankEvaluateCompare:
    def test_full_cli_flow(self, files, tmp_path, capsys):
        bm25_run = tmp_path / "bm25.run"
        run_cli(
            "search", "--corpus", files["corpus"], "--topics", files["topics"],
            "--topics-format", "tsv3", "--out", bm25_run,
        )
        reranked = tmp_path / "reranked.run"
        code = run_cli(
            "rerank",
            "--run", bm25_run,
            "--corpus", files["corpus"],
            "--topics", files["topics"],
            "--topics-format", "tsv3",
            "--out", reranked,
        )
        assert code == 0
        run = parse_run(reranked.open("rb"))
        assert run.tag == "seqrank"

        summary_path = tmp_path / "summary.json"
        code = run_cli(
            "evaluate", "--run", reranked, "--qrels", files["qrels"],
            "--metric", "all", "--out", summary_path,
        )
        assert code == 0
        summary = json.loads(summary_path.read_text())
        assert set(summary) == {"mrr@10", "ap", "p@20", "ndcg@20"}
        assert summary["mrr@10"]["aggregate"] == 1.0

        compare_path = tmp_path / "cmp.json"
        code = run_cli(
            "compare", "--run-a", reranked, "--run-b", bm25_run,
            "--qrels", files["qrels"], "--metric", "mrr@10", "--out", compare_path,
        )
        assert code == 0
        cmp_result = json.loads(compare_path.read_text())
        assert cmp_result["mrr@10"]["mean_a"] >= cmp_result["mrr@10"]["mean_b"]

    def test_evaluate_prints_aggregate(self, files, tmp_path, capsys):
        run_path = tmp_path / "r.run"
        run_cli(
            "search", "--corpus", files["corpus"], "--topics", files["topics"],
            "--topics-format", "tsv3", "--out", run_path,
        )
        capsys.readouterr()
        run_cli("evaluate", "--run", run_path, "--qrels", files["qrels"], "--metric", "ap")
        out = capsys.readouterr().out
        assert out.startswith("ap\tall\t")


class TestSample:
    def test_sample_roundtrip(self, tmp_path):
        pool_path = tmp_path / "pool.tsv"
        lines = []
        for i in range(8):
            lines.append(f"query {i}\tpositive doc {i}\tpositive")
            lines.append(f"query {i}\tnegative doc {i}\tnegative")
        pool_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        out = tmp_path / "sampled.tsv"
        code = run_cli(
            "--seed", "21", "sample",
            "--instances", pool_path, "--n-pos", "3", "--n-neg", "3", "--out", out,
        )
        assert code == 0
        rows = out.read_text().strip().split("\n")
        assert len(rows) == 6
        assert all(r.split("\t")[2] in ("positive", "negative") for r in rows)

        out2 = tmp_path / "sampled2.tsv"
        run_cli(
            "--seed", "21", "sample",
            "--instances", pool_path, "--n-pos", "3", "--n-neg", "3", "--out", out2,
        )
        assert out.read_bytes() == out2.read_bytes()

    def test_insufficient_pool_is_runtime_error(self, tmp_path):
        pool_path = tmp_path / "pool.tsv"
        pool_path.write_text("q\td\tpositive\n", encoding="utf-8")
        code = run_cli(
            "sample", "--instances", pool_path, "--n-pos", "2", "--n-neg", "0",
            "--out", tmp_path / "x.tsv",
        )
        assert code == 2


class TestPipelineCommand:
    def write_config(self, files, tmp_path, out_name="out"):
        config = tmp_path / "cfg.toml"
        config.write_text(
            f"""
corpus = "{files['corpus']}"
topics = "{files['topics']}"
topics_format = "tsv3"
qrels = "{files['qrels']}"
k = 100
output_dir = "{tmp_path / out_name}"
""",
            encoding="utf-8",
        )
        return config

    def test_pipeline_from_config(self, files, tmp_path, capsys):
        config = self.write_config(files, tmp_path)
        code = run_cli("--config", config, "pipeline")
        assert code == 0
        out = tmp_path / "out"
        assert (out / "firststage.run").is_file()
        assert (out / "seqrank.run").is_file()
        assert (out / "comparison.json").is_file()

    def test_pipeline_requires_config(self, files):
        with pytest.raises(SystemExit) as exc:
            run_cli("pipeline")
        assert exc.value.code == 1

    def test_output_dir_override(self, files, tmp_path):
        config = self.write_config(files, tmp_path)
        override = tmp_path / "override"
        code = run_cli("--config", config, "--output-dir", override, "pipeline")
        assert code == 0
        assert (override / "seqrank.run").is_file()

    def test_probe_command(self, files, tmp_path, capsys):
        config = self.write_config(files, tmp_path, out_name="probe_out")
        code = run_cli("--config", config, "probe", "--trials", "1")
        assert code == 0
        probing = (tmp_path / "probe_out" / "probing.tsv").read_text()
        lines = probing.strip().split("\n")
        assert len(lines) == 7  # header + six configs
        assert lines[1].startswith("Baseline\ttrue\tfalse")
        assert lines[-1].split("\t")[-1] == "n/a"
