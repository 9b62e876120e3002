import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from digraphon import core, io, render
from digraphon.core import InvalidDigraphon
from digraphon.dirm import DirmHyperParams, sample_dirm_digraphon
from digraphon.inference import run_chain


@pytest.mark.parametrize("name", core.BUILTINS)
def test_digraphon_json_round_trip(tmp_path, name):
    d = core.builtin(name)
    p = tmp_path / "d.json"
    io.write_digraphon(p, d)
    text = p.read_text()
    back = io.read_digraphon(p)
    assert np.array_equal(back.weights, d.weights) and np.array_equal(back.cuts, d.cuts)
    io.write_digraphon(p, back)
    assert p.read_text() == text


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32), st.floats(0.3, 4))
def test_prior_draw_round_trip(seed, alpha):
    d = sample_dirm_digraphon(DirmHyperParams(alpha=alpha, truncation=10), seed)
    text = io.digraphon_to_json(d)
    again = io.digraphon_to_json(io.digraphon_from_dict(json.loads(text)))
    assert again == text


def test_lower_triangle_filled_by_symmetry():
    full = core.poset_block_digraphon()
    rows = [[list(full.weights[r, s]) for s in range(r, 3)] for r in range(3)]
    d = io.digraphon_from_dict({"cuts": [0.25, 0.75], "weights": rows})
    assert np.array_equal(d.weights, full.weights)
    nulls = [[list(full.weights[r, s]) if s >= r else None for s in range(3)] for r in range(3)]
    assert np.array_equal(io.digraphon_from_dict({"cuts": [0.25, 0.75], "weights": nulls}).weights,
                          full.weights)


def test_renormalize_small_deviation_only():
    d = io.digraphon_from_dict({"cuts": [], "weights": [[[0.5 + 5e-11, 0, 0, 0.5]]]})
    assert abs(d.weights.sum() - 1) <= 1e-12
    with pytest.raises(InvalidDigraphon):
        io.digraphon_from_dict({"cuts": [], "weights": [[[0.5 + 1e-6, 0, 0, 0.5]]]})


def test_malformed_spec():
    with pytest.raises(io.FormatError):
        io.digraphon_from_dict({"cuts": [0.5]})
    with pytest.raises(io.FormatError):
        io.digraphon_from_dict({"cuts": [0.5], "weights": [[[1, 0, 0, 0]]]})
    with pytest.raises(io.FormatError):
        io.digraphon_from_dict({"cuts": [], "weights": [[[1, 0, 0]]]})


@pytest.mark.parametrize("edge_list", [False, True])
def test_digraph_round_trip(tmp_path, edge_list):
    g = core.sample_digraph(core.poset_block_digraphon(True), 25, 2).graph
    p = tmp_path / "g.txt"
    io.write_digraph(p, g, edge_list)
    text = p.read_text()
    back = io.read_digraph(p)
    assert np.array_equal(back, g)
    io.write_digraph(p, back, edge_list)
    assert p.read_text() == text


def test_digraph_format_errors():
    with pytest.raises(io.FormatError):
        io.digraph_from_text("2\n0 1\n")
    with pytest.raises(io.FormatError):
        io.digraph_from_text("2\n0 2\n0 0\n")
    with pytest.raises(io.FormatError):
        io.digraph_from_text("digraph 2\n0 5\n")
    with pytest.raises(io.FormatError):
        io.digraph_from_text("")


def test_vectors_and_hyper_round_trip(tmp_path):
    u = np.random.default_rng(0).random(20)
    io.write_latents(tmp_path / "u.txt", u)
    assert np.array_equal(io.read_latents(tmp_path / "u.txt"), u)
    io.write_labels(tmp_path / "z.txt", [3, 1, 2])
    assert list(io.read_labels(tmp_path / "z.txt")) == [3, 1, 2]
    h = DirmHyperParams(alpha=0.5, beta=(0.5, 0, 0.5, 0), beta_diag=(1, 0, 0), truncation=7)
    io.write_hyperparams(tmp_path / "h.json", h)
    assert io.read_hyperparams(tmp_path / "h.json") == h


def test_trace_and_final_state_round_trip(tmp_path):
    g = core.sample_digraph(core.half_digraphon(), 20, 0).graph
    res = run_chain(g, DirmHyperParams(), 5, 0)
    p = tmp_path / "trace.txt"
    io.write_trace(p, res.trace)
    text = p.read_text()
    back = io.read_trace(p)
    assert [r.log_joint for r in back] == [r.log_joint for r in res.trace]
    io.write_trace(p, back)
    assert p.read_text() == text
    d = res.weights.to_digraphon(np.bincount(res.z) / 20)
    f = tmp_path / "final.json"
    io.write_final_state(f, "dirm", res.z, d)
    model, z, d2 = io.read_final_state(f)
    assert model == "dirm" and np.array_equal(z, res.z)
    first = f.read_text()
    io.write_final_state(f, model, z, d2)
    assert f.read_text() == first


def test_gray_mapping():
    assert render.pgm_bytes(render.adjacency_image([[1]])) == b"P5\n1 1\n255\n\x00"
    img = render.adjacency_image(np.eye(2))
    assert img.tolist() == [[0, 255], [255, 0]]
    assert render.to_gray([0.0, 0.5, 1.0]).tolist() == [255, 128, 0]


def test_pgm_round_trip_and_scale(tmp_path):
    img = render.adjacency_image(core.sample_digraph(core.half_digraphon(), 9, 1).graph)
    p = tmp_path / "a.pgm"
    render.write_pgm(p, img, 3)
    back = render.read_pgm(p)
    assert back.shape == (27, 27)
    assert np.array_equal(back[::3, ::3], img)
    with pytest.raises(ValueError):
        render.upscale(img, 0)


def test_adjacency_order():
    g = np.array([[0, 1], [0, 0]])
    assert render.adjacency_image(g, [1, 0]).tolist() == [[255, 255], [0, 255]]


def test_half_digraphon_panels():
    img = render.digraphon_image(core.half_digraphon(), 10)
    assert img.shape == (10, 4 * 10 + 3 * 2)
    w00 = img[:, :10]
    assert np.all(w00[:5, :5] == 128) and np.all(w00[:5, 5:] == 255)
    w01 = img[:, 12:22]
    assert np.all(w01[:5, 5:] == 128) and np.all(w01[:5, :5] == 255)
    assert np.all(img[:, 10:12] == render.GAP_VALUE)
