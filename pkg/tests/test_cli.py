import json

import numpy as np
import pytest

from digraphon import core, io
from digraphon.cli import main


def run(*args):
    return main([str(a) for a in args])


def test_sample_writes_files(tmp_path):
    assert run("sample", "er", "--n", 20, "--seed", 7, "--out", tmp_path / "a") == 0
    g = io.read_digraph(tmp_path / "a" / "graph.txt")
    assert g.shape == (20, 20)
    assert len(io.read_latents(tmp_path / "a" / "latents.txt")) == 20
    run("sample", "er", "--n", 20, "--seed", 7, "--out", tmp_path / "b")
    for f in ("graph.txt", "latents.txt", "labels.txt"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_sample_tournament_passes_check(tmp_path, capsys):
    run("sample", "tournament", "--n", 20, "--out", tmp_path)
    assert run("check", tmp_path / "graph.txt", "--property", "tournament") == 0
    assert capsys.readouterr().out.strip().endswith("true")
    assert run("check", tmp_path / "graph.txt", "--property", "undirected") == 2


def test_sample_sorted_and_spec_file(tmp_path):
    spec = tmp_path / "d.json"
    io.write_digraphon(spec, core.generic_dag_digraphon(4))
    assert run("sample", spec, "--n", 30, "--sort-by-latents", "--out", tmp_path / "o") == 0
    g = io.read_digraph(tmp_path / "o" / "graph_sorted.txt")
    assert not np.tril(g).any()


def test_poset_loops_flag(tmp_path):
    run("sample", "poset", "--poset-loops", "--n", 10, "--out", tmp_path)
    g = io.read_digraph(tmp_path / "graph.txt")
    assert g.diagonal().all()
    assert run("fit", tmp_path / "graph.txt", "--iters", 1, "--out", tmp_path / "f") == 2
    assert run("fit", tmp_path / "graph.txt", "--iters", 1, "--strip-loops",
               "--out", tmp_path / "f") == 0
    assert run("check", tmp_path / "graph.txt", "--property", "poset", "--strip-loops") == 0


def test_fit_trivial_graph(tmp_path):
    (tmp_path / "g.txt").write_text("1\n0\n")
    assert run("fit", tmp_path / "g.txt", "--iters", 0, "--out", tmp_path / "f") == 0
    trace = io.read_trace(tmp_path / "f" / "trace_dirm_seed0.txt")
    assert len(trace) == 1


def test_fit_with_truth(tmp_path):
    run("sample", "half", "--n", 40, "--seed", 1, "--out", tmp_path)
    for model in ("dirm", "irm"):
        assert run("fit", tmp_path / "graph.txt", "--model", model, "--iters", 30, "--chains", 2,
                   "--truth", tmp_path / "labels.txt", "--out", tmp_path / "f") == 0
    summary = (tmp_path / "f" / "summary_dirm.tsv").read_text().splitlines()
    assert summary[0].startswith("model") and len(summary) == 4
    model, z, d = io.read_final_state(tmp_path / "f" / "final_dirm_seed1.json")
    assert model == "dirm" and len(z) == 40 and core.validate(d) == []


def test_fit_hyper_file_and_init(tmp_path):
    run("sample", "half", "--n", 12, "--out", tmp_path)
    (tmp_path / "h.json").write_text(json.dumps({"alpha": 2.0, "beta": [1, 1, 1, 1]}))
    io.write_labels(tmp_path / "z0.txt", [0] * 12)
    assert run("fit", tmp_path / "graph.txt", "--hyper", tmp_path / "h.json", "--init", "given",
               "--init-labels", tmp_path / "z0.txt", "--iters", 0, "--out", tmp_path / "f") == 0
    assert io.read_trace(tmp_path / "f" / "trace_dirm_seed0.txt")[0].n_clusters == 1
    assert run("fit", tmp_path / "graph.txt", "--init", "given", "--out", tmp_path / "f") == 4


def test_estimate_both_methods(tmp_path):
    run("sample", "half", "--n", 60, "--out", tmp_path)
    assert run("estimate", tmp_path / "graph.txt", "--method", "histogram",
               "--labels", tmp_path / "labels.txt", "--out", tmp_path / "h.json") == 0
    assert core.validate(io.read_digraphon(tmp_path / "h.json")) == []
    assert run("estimate", tmp_path / "graph.txt", "--resolution", 3,
               "--out", tmp_path / "s.json") == 0
    data = json.loads((tmp_path / "s.json").read_text())
    assert sorted(data["ordering"]) == list(range(60))
    assert run("estimate", tmp_path / "graph.txt", "--method", "histogram",
               "--out", tmp_path / "x.json") == 4


def test_render_inputs(tmp_path):
    (tmp_path / "one.txt").write_text("1\n1\n")
    assert run("render", tmp_path / "one.txt", "--out", tmp_path / "one.pgm") == 0
    assert (tmp_path / "one.pgm").read_bytes() == b"P5\n1 1\n255\n\x00"
    io.write_digraphon(tmp_path / "half.json", core.half_digraphon())
    assert run("render", tmp_path / "half.json", "--resolution", 8, "--scale", 2,
               "--out", tmp_path / "half.pgm") == 0
    assert (tmp_path / "half.pgm").read_bytes().startswith(b"P5\n76 16\n")


def test_prior_and_validate(tmp_path, capsys):
    assert run("prior", "--alpha", 3, "--seed", 2, "--out", tmp_path / "p.json") == 0
    assert run("validate", tmp_path / "p.json") == 0
    (tmp_path / "bad.json").write_text('{"cuts": [], "weights": [[[0.3, 0.3, 0.3, 0.3]]]}')
    assert run("validate", tmp_path / "bad.json") == 2
    assert "sum != 1" in capsys.readouterr().out


def test_exit_codes(tmp_path):
    assert run("sample", "nope", "--n", 3, "--out", tmp_path) == 4
    assert run("fit", tmp_path / "missing.txt", "--out", tmp_path) == 3
    (tmp_path / "junk.txt").write_text("3\n0 1\n")
    assert run("fit", tmp_path / "junk.txt", "--out", tmp_path) == 2
    with pytest.raises(SystemExit) as exc:
        run("sample", "er", "--seed", -1, "--out", tmp_path)
    assert exc.value.code == 4
    with pytest.raises(SystemExit) as exc:
        run("frobnicate")
    assert exc.value.code == 4
    with pytest.raises(SystemExit) as exc:
        run("fit", "g.txt", "--beta", "1,2", "--out", tmp_path)
    assert exc.value.code == 4


def test_config_defaults(tmp_path):
    (tmp_path / "cfg.json").write_text(json.dumps({"n": 9, "seed": 4}))
    assert run("--config", tmp_path / "cfg.json", "sample", "er", "--out", tmp_path / "a") == 0
    assert io.read_digraph(tmp_path / "a" / "graph.txt").shape == (9, 9)
    run("sample", "er", "--n", 9, "--seed", 4, "--out", tmp_path / "b")
    assert (tmp_path / "a" / "graph.txt").read_bytes() == (tmp_path / "b" / "graph.txt").read_bytes()


def test_experiment_half_small(tmp_path, capsys):
    assert run("experiment", "half", "--n", 30, "--iters", 20, "--out", tmp_path) == 0
    assert "dirm ARI" in capsys.readouterr().out
    for f in ("ari.tsv", "sample_true_clusters.pgm", "sample_dirm_sorted.pgm",
              "sample_irm_sorted.pgm", "digraphon.pgm", "labels_true.txt"):
        assert (tmp_path / f).exists()
