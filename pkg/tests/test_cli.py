import json
import subprocess
import sys

import pytest

from chainsight.centrality import salience
from chainsight.cli import main
from chainsight.kg import load_graph

from conftest import DATA

GOLDEN_SENTENCE = (
    "Apple generates 10% of its revenue from selling Desktop Computers, "
    "which spends 19% of its production budget on Integrated Circuits, "
    "13% of which are produced in Shanghai, China."
)

P3_DOC = "\n".join(
    [
        json.dumps({"rec": "node", "id": "a", "kind": "Product", "name": "Alpha"}),
        json.dumps({"rec": "node", "id": "b", "kind": "Product", "name": "Bravo"}),
        json.dumps({"rec": "node", "id": "c", "kind": "Product", "name": "Charlie"}),
        json.dumps({"rec": "edge", "src": "a", "dst": "b", "kind": "HasInput"}),
        json.dumps({"rec": "edge", "src": "b", "dst": "c", "kind": "HasInput"}),
    ]
)


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_traverse_emits_golden_sentence(capsys):
    code, out, _ = run_cli(
        ["--config", str(DATA / "config_paper.json"), "traverse", "--seed", "Apple"],
        capsys,
    )
    assert code == 0
    assert GOLDEN_SENTENCE in out


def test_traverse_hops_flag(capsys):
    code, out, _ = run_cli(
        [
            "--config", str(DATA / "config_paper.json"),
            "traverse", "--seed", "Apple", "--hops", "1",
        ],
        capsys,
    )
    assert code == 0
    assert GOLDEN_SENTENCE not in out
    assert "Apple generates 10% of its revenue from selling Desktop Computers." in out


def test_traverse_unresolvable_seed(capsys):
    code, _, err = run_cli(
        ["--config", str(DATA / "config_paper.json"), "traverse", "--seed", "zzz"],
        capsys,
    )
    assert code == 1
    assert "no node matched" in err


def test_centrality_p3_matches_module_output(tmp_path, capsys):
    graph_file = tmp_path / "p3.jsonl"
    graph_file.write_text(P3_DOC + "\n")
    code, out, _ = run_cli(["centrality", "--graph", str(graph_file)], capsys)
    assert code == 0
    # golden-output equality with the direct module call
    assert out == salience(load_graph(P3_DOC)).to_table_text()
    middle = next(line for line in out.splitlines() if line.startswith("b\t"))
    assert middle.split("\t")[-1] == "1"


def test_centrality_out_file(tmp_path, capsys):
    graph_file = tmp_path / "p3.jsonl"
    graph_file.write_text(P3_DOC + "\n")
    out_file = tmp_path / "table.tsv"
    code, _, _ = run_cli(
        ["centrality", "--graph", str(graph_file), "--out", str(out_file)], capsys
    )
    assert code == 0
    assert out_file.read_text() == salience(load_graph(P3_DOC)).to_table_text()


def test_search_news_three_hits(capsys, stores):
    code, out, _ = run_cli(
        [
            "--config", str(DATA / "config.json"),
            "search", "--modality", "news", "--query", "coltan DRC", "-k", "3",
        ],
        capsys,
    )
    assert code == 0
    scored_lines = [l for l in out.splitlines() if l and not l.startswith("\t")]
    assert len(scored_lines) == 3
    # golden-output equality with the direct module call
    from chainsight.vecstore import search

    module_hits = search(stores.news_index, "coltan DRC", k=3, embedder=stores.embedder)
    cli_scores = [float(line.split("\t")[0]) for line in scored_lines]
    assert cli_scores == pytest.approx([score for _, score in module_hits], abs=1e-6)


def test_search_since_filter(capsys):
    code, out, _ = run_cli(
        [
            "--config", str(DATA / "config.json"),
            "search", "--modality", "news", "--query", "coltan DRC",
            "-k", "5", "--since", "2030-01-01T00:00:00Z",
        ],
        capsys,
    )
    assert code == 0
    assert out.strip() == ""


def test_ingest_clean_graph(capsys):
    code, out, _ = run_cli(
        ["ingest", "--graph", str(DATA / "coltan_graph.jsonl")], capsys
    )
    assert code == 0
    assert "no issues" in out


def test_ingest_reports_violations(tmp_path, capsys):
    doc = "\n".join(
        [
            json.dumps({"rec": "node", "id": "l", "kind": "Location", "name": "Lyon",
                        "meta": {"production_share": 130}}),
            json.dumps({"rec": "node", "id": "c", "kind": "Company", "name": "Acme"}),
            json.dumps({"rec": "edge", "src": "l", "dst": "c", "kind": "Produces"}),
        ]
    )
    graph_file = tmp_path / "bad.jsonl"
    graph_file.write_text(doc + "\n")
    code, out, _ = run_cli(["ingest", "--graph", str(graph_file)], capsys)
    assert code == 1
    assert "production_share" in out
    assert "Produces" in out


def test_ingest_normalized_output_round_trips(tmp_path, capsys):
    out_file = tmp_path / "normalized.jsonl"
    code, _, _ = run_cli(
        ["ingest", "--graph", str(DATA / "paper_path_graph.jsonl"),
         "--out", str(out_file)],
        capsys,
    )
    assert code == 0
    reloaded = load_graph(out_file.read_text())
    assert reloaded.node_count == 4 and reloaded.edge_count == 3


def test_verbalize_prints_narratives(tmp_path, capsys):
    path_file = tmp_path / "paths.jsonl"
    path_file.write_text(
        json.dumps(
            {
                "rec": "path",
                "nodes": ["c_apple", "p_desktops", "i_circuits", "l_shanghai"],
                "edges": [
                    {"kind": "Produces", "orientation": "forward", "weight_percent": 10},
                    {"kind": "HasInput", "orientation": "forward", "weight_percent": 19},
                    {"kind": "ManufacturedIn", "orientation": "forward",
                     "weight_percent": 13},
                ],
                "score": 0.00247,
            }
        )
        + "\n"
    )
    code, out, _ = run_cli(
        [
            "verbalize", "--path", str(path_file),
            "--graph", str(DATA / "paper_path_graph.jsonl"),
        ],
        capsys,
    )
    assert code == 0
    assert GOLDEN_SENTENCE in out


def test_missing_file_is_runtime_error(capsys):
    code, _, err = run_cli(["centrality", "--graph", "/nope/missing.jsonl"], capsys)
    assert code == 1
    assert "error:" in err


def test_unknown_subcommand_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_unknown_flag_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["centrality", "--bogus"])
    assert exc.value.code == 2


def test_chat_repl_over_scenario():
    result = subprocess.run(
        [sys.executable, "-m", "chainsight.cli",
         "--config", str(DATA / "config.json"), "chat"],
        input="I read about problems in the DRC with coltan.\n\n",
        capture_output=True, text=True, timeout=120,
    )
    assert result.returncode == 0, result.stderr
    assert "[tool called: graph_traverser" in result.stdout
    assert "references: Supply-chain paths for coltan" in result.stdout


def test_chat_writes_session_log(tmp_path):
    log_file = tmp_path / "session.jsonl"
    result = subprocess.run(
        [sys.executable, "-m", "chainsight.cli",
         "--config", str(DATA / "config.json"), "chat", "--log", str(log_file)],
        input="I read about problems in the DRC with coltan.\n\n",
        capture_output=True, text=True, timeout=120,
    )
    assert result.returncode == 0, result.stderr
    records = [json.loads(l) for l in log_file.read_text().splitlines()]
    assert len(records) == 1
    assert records[0]["triage"] == "augment"
