import json
import os
from pathlib import Path

import pytest

import lexnet

DATA = Path(os.environ.get("LEXNET_DATA_DIR", Path(__file__).resolve().parents[2] / "data" / "toy"))


def test_normalize():
    assert lexnet.normalize_text("ABC123中文!") == "abc000中文"
    assert lexnet.normalize_token(" 貓 咪 ") == "貓咪"


def test_wcn_and_stats():
    corpus = lexnet.Corpus([["a", "b", "a", "c"], ["c", "d"]])
    vocab = lexnet.build_vocabulary(corpus, min_count=0)
    g = lexnet.build_wcn(corpus, vocab)
    assert g.node_count == 4
    assert g.edge_count == 4
    assert lexnet.average_clustering(g) == pytest.approx((1 + 1 + 1 / 3 + 0) / 4)


def test_triangle_report():
    g = lexnet.Graph(["a", "b", "c"], [(0, 1), (1, 2), (0, 2)])
    report = lexnet.structure_report(g, "tri")
    assert report["cc"] == 1.0
    assert report["dac"] == "undefined"
    with pytest.raises(lexnet.UndefinedValue):
        lexnet.degree_assortativity(g)


def test_against_networkx():
    nx = pytest.importorskip("networkx")
    g = lexnet.erdos_renyi(300, 0.05, 4)
    h = nx.Graph()
    h.add_nodes_from(range(g.node_count))
    h.add_edges_from(g.edges())
    assert lexnet.average_clustering(g) == pytest.approx(nx.average_clustering(h), abs=1e-12)
    assert lexnet.degree_assortativity(g) == pytest.approx(nx.degree_assortativity_coefficient(h), abs=1e-9)


def test_training_and_wsn():
    corpus = lexnet.read_corpus(DATA / "two_topic.txt")
    vocab = lexnet.build_vocabulary(corpus)
    emb, losses = lexnet.train_sgns(corpus, vocab, dim=16, epochs=2, seed=3)
    assert len(losses) == 2
    assert emb.input_matrix().shape == (len(vocab), 16)
    assert emb.similarity("籃球", "足球") > emb.similarity("籃球", "米飯")
    t = lexnet.estimate_similarity_threshold(emb, vocab, 95.0, 10000, 1)
    g = lexnet.build_wsn(emb, vocab, t)
    assert 0 < g.edge_count < len(vocab) * (len(vocab) - 1) // 2


def test_pipeline_stage_errors(tmp_path):
    with pytest.raises(lexnet.MissingArtifact, match="run train"):
        lexnet.run_subcommand("build-wsn", overrides={"output_dir": str(tmp_path)})
    with pytest.raises(lexnet.ConfigError):
        lexnet.run_subcommand("ingest", overrides={"output_dir": str(tmp_path)})


def test_pipeline_run(tmp_path):
    written = lexnet.run_subcommand(
        "pipeline",
        str(DATA / "analects.conf"),
        overrides={"output_dir": str(tmp_path), "epochs": "2"},
    )
    assert any(str(p).endswith("summary.csv") for p in written)
    report = json.loads((tmp_path / "wcn.report.json").read_text(encoding="utf-8"))
    assert report["name"] == "WCN-analects"
