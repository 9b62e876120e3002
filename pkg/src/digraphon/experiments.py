"""Synthetic experiments: recovery of a random di-IRM, and the half-undirected /
half-tournament comparison against the asymmetric IRM."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import io, render
from .core import StepDigraphon, half_digraphon, sample_digraph
from .dirm import DirmHyperParams, compact_labels, sample_dirm_digraphon
from .inference import (ChainResult, IrmHyperParams, adjusted_rand_index, run_chain,
                        run_chain_irm)


def true_clusters(d: StepDigraphon, u):
    """Compacted class labels of the latents and the class each label stands for."""
    cls = d.class_of(u)
    z = compact_labels(cls)
    original = np.zeros(z.max() + 1 if len(z) else 0, dtype=np.int64)
    original[z] = cls
    return z, original


def weight_recovery_error(d: StepDigraphon, truth, original, z, eta, min_pairs: int = 20):
    """Mean absolute error of inferred cell weights against the matched true cells.

    Inferred clusters are matched to true classes by a Hungarian assignment
    on the confusion matrix; surplus inferred clusters fall back to their
    majority class. Only inferred cells with at least ``min_pairs`` vertex
    pairs are scored. Returns ``(mae, n_cells)``.
    """
    z = np.asarray(z)
    kz, kt = z.max() + 1, truth.max() + 1
    conf = np.zeros((kz, kt), dtype=np.int64)
    np.add.at(conf, (z, truth), 1)
    match = conf.argmax(axis=1)
    rows, cols = linear_sum_assignment(-conf)
    match[rows] = cols
    sizes = np.bincount(z, minlength=kz)
    errs = []
    for r in range(kz):
        for s in range(r, kz):
            pairs = sizes[r] * (sizes[r] - 1) // 2 if r == s else sizes[r] * sizes[s]
            if pairs < min_pairs:
                continue
            a, b = original[match[r]], original[match[s]]
            errs.append(np.abs(eta[r, s] - d.weights[a, b]).mean())
    return (float(np.mean(errs)) if errs else float("nan")), len(errs)


@dataclass
class HalfResult:
    graph: np.ndarray
    u: np.ndarray
    truth: np.ndarray
    dirm: list = field(default_factory=list)
    irm: list = field(default_factory=list)

    @property
    def dirm_ari(self):
        return [adjusted_rand_index(c.z, self.truth) for c in self.dirm]

    @property
    def irm_ari(self):
        return [adjusted_rand_index(c.z, self.truth) for c in self.irm]


def run_half(seed: int = 0, n: int = 100, iters: int = 500, chains: int = 1, alpha: float = 1.0,
             beta=(1, 1, 1, 1), irm: IrmHyperParams | None = None) -> HalfResult:
    """Sample G(n, W_half) once, then fit ``chains`` di-IRM and IRM chains."""
    d = half_digraphon()
    sample_rng, chain_seq = np.random.SeedSequence(int(seed)).spawn(2)
    s = sample_digraph(d, n, np.random.default_rng(sample_rng))
    truth, _ = true_clusters(d, s.u)
    h = DirmHyperParams(alpha=alpha, beta=tuple(beta))
    hi = irm or IrmHyperParams(alpha=alpha)
    out = HalfResult(s.graph, s.u, truth)
    for cs in chain_seq.spawn(chains):
        dseed, iseed = cs.spawn(2)
        out.dirm.append(run_chain(s.graph, h, iters, np.random.default_rng(dseed)))
        out.irm.append(run_chain_irm(s.graph, hi, iters, np.random.default_rng(iseed)))
    return out


@dataclass
class UniformResult:
    digraphon: StepDigraphon
    graph: np.ndarray
    u: np.ndarray
    truth: np.ndarray
    original: np.ndarray
    chains: list = field(default_factory=list)

    def best(self) -> ChainResult:
        """Chain with the highest final log joint (no use of the truth)."""
        return max(self.chains, key=lambda c: c.trace[-1].log_joint)

    def ari(self, chain: ChainResult) -> float:
        return adjusted_rand_index(chain.z, self.truth)

    def weight_error(self, chain: ChainResult, min_pairs: int = 20):
        return weight_recovery_error(self.digraphon, self.truth, self.original, chain.z,
                                     chain.weights.eta, min_pairs)


def run_uniform(seed: int = 0, n: int = 100, iters: int = 200, chains: int = 1,
                alpha: float = 1.0, truncation: int = 50) -> UniformResult:
    """Draw a di-IRM digraphon with beta = (1, 1, 1, 1), sample it and refit."""
    h = DirmHyperParams(alpha=alpha, beta=(1, 1, 1, 1), truncation=truncation)
    prior_seq, sample_seq, chain_seq = np.random.SeedSequence(int(seed)).spawn(3)
    d = sample_dirm_digraphon(h, np.random.default_rng(prior_seq))
    s = sample_digraph(d, n, np.random.default_rng(sample_seq))
    truth, original = true_clusters(d, s.u)
    out = UniformResult(d, s.graph, s.u, truth, original)
    for cs in chain_seq.spawn(chains):
        out.chains.append(run_chain(s.graph, h, iters, np.random.default_rng(cs)))
    return out


def _cluster_order(z):
    return np.argsort(np.asarray(z), kind="stable")


def _proportions(z):
    return np.bincount(z) / len(z)


def write_half_bundle(res: HalfResult, out: Path, scale: int = 4) -> None:
    out.mkdir(parents=True, exist_ok=True)
    d = half_digraphon()
    io.write_digraphon(out / "digraphon.json", d)
    io.write_digraph(out / "graph.txt", res.graph)
    io.write_latents(out / "latents.txt", res.u)
    io.write_labels(out / "labels_true.txt", res.truth)
    render.write_pgm(out / "digraphon.pgm", render.digraphon_image(d))
    render.write_pgm(out / "sample.pgm", render.adjacency_image(res.graph), scale)
    render.write_pgm(out / "sample_true_clusters.pgm",
                     render.adjacency_image(res.graph, _cluster_order(res.truth)), scale)
    rows = ["model\tchain\tclusters\tari\tlog_joint\n"]
    for name, chains in (("dirm", res.dirm), ("irm", res.irm)):
        for c_idx, chain in enumerate(chains):
            tag = f"{name}" if len(chains) == 1 else f"{name}_{c_idx}"
            io.write_trace(out / f"trace_{tag}.txt", chain.trace)
            io.write_labels(out / f"labels_{tag}.txt", chain.z)
            io.write_final_state(out / f"final_{tag}.json", name, chain.z,
                                 chain.weights.to_digraphon(_proportions(chain.z)))
            render.write_pgm(out / f"sample_{tag}_sorted.pgm",
                             render.adjacency_image(res.graph, _cluster_order(chain.z)), scale)
            ari = adjusted_rand_index(chain.z, res.truth)
            rows.append(f"{name}\t{c_idx}\t{chain.state.K}\t{ari!r}\t{chain.trace[-1].log_joint!r}\n")
    (out / "ari.tsv").write_text("".join(rows))


def write_uniform_bundle(res: UniformResult, out: Path, scale: int = 4) -> None:
    out.mkdir(parents=True, exist_ok=True)
    io.write_digraphon(out / "digraphon_true.json", res.digraphon)
    io.write_digraph(out / "graph.txt", res.graph)
    io.write_latents(out / "latents.txt", res.u)
    io.write_labels(out / "labels_true.txt", res.truth)
    render.write_pgm(out / "digraphon_true.pgm", render.digraphon_image(res.digraphon))
    render.write_pgm(out / "sample.pgm", render.adjacency_image(res.graph), scale)
    render.write_pgm(out / "sample_sorted_latents.pgm",
                     render.adjacency_image(res.graph, np.argsort(res.u, kind="stable")), scale)
    rows = ["chain\tclusters\tari\tweight_mae\tscored_cells\tlog_joint\n"]
    best = res.best()
    for c_idx, chain in enumerate(res.chains):
        tag = "dirm" if len(res.chains) == 1 else f"dirm_{c_idx}"
        inferred = chain.weights.to_digraphon(_proportions(chain.z))
        io.write_trace(out / f"trace_{tag}.txt", chain.trace)
        io.write_labels(out / f"labels_{tag}.txt", chain.z)
        io.write_final_state(out / f"final_{tag}.json", "dirm", chain.z, inferred)
        if chain is best:
            render.write_pgm(out / "digraphon_inferred.pgm", render.digraphon_image(inferred))
            render.write_pgm(out / "sample_sorted_inferred.pgm",
                             render.adjacency_image(res.graph, _cluster_order(chain.z)), scale)
        mae, cells = res.weight_error(chain)
        rows.append(f"{c_idx}\t{chain.state.K}\t{res.ari(chain)!r}\t{mae!r}\t{cells}\t"
                    f"{chain.trace[-1].log_joint!r}\n")
    (out / "ari.tsv").write_text("".join(rows))
