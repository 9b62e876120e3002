"""Command-line interface.

Exit codes: 0 success, 2 validation failure, 3 I/O error, 4 usage error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import core, estimators, experiments, io, render
from .core import InvalidDigraphon
from .dirm import DirmHyperParams, sample_dirm_digraphon
from .inference import (IrmHyperParams, SelfLoopError, adjusted_rand_index, run_chain,
                        run_chain_irm)

log = logging.getLogger("digraphon")

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_USAGE = 0, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(count):
    def parse(text):
        try:
            vals = tuple(float(x) for x in text.split(","))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers") from None
        if len(vals) != count:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers")
        return vals
    return parse


def _seed(text):
    v = int(text)
    if not 0 <= v < core.MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _add_hyper(p):
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=_floats(4), default=(1.0, 1.0, 1.0, 1.0),
                   help="off-diagonal Dirichlet parameters b00,b01,b10,b11")
    p.add_argument("--beta-diag", type=_floats(3), default=None,
                   help="diagonal override b00,b*,b11")
    p.add_argument("--truncation", type=int, default=50)
    p.add_argument("--hyper", type=Path, help="hyperparameter JSON file (overrides flags)")


def _hyper(args) -> DirmHyperParams:
    if getattr(args, "hyper", None):
        return io.read_hyperparams(args.hyper)
    return DirmHyperParams(args.alpha, tuple(args.beta),
                           tuple(args.beta_diag) if args.beta_diag else None, args.truncation)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="digraphon", description=__doc__.splitlines()[0])
    parser.add_argument("--config", type=Path, help="JSON file of default flag values")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sample", help="sample G(n, W) from a spec file or builtin")
    p.add_argument("source", help=f"digraphon JSON file or one of {', '.join(core.BUILTINS)}")
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--resolution", type=int, default=None, help="class count for linear-order/dag")
    p.add_argument("--poset-loops", action="store_true", help="poset builtin with self-loops")
    p.add_argument("--sort-by-latents", action="store_true", help="also write the resorted graph")
    p.add_argument("--edge-list", action="store_true")
    p.add_argument("--scale", type=int, default=0, help="also render PGM at this scale")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("prior", help="draw a digraphon from the di-IRM prior")
    _add_hyper(p)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("fit", help="collapsed Gibbs sampling (di-IRM or IRM)")
    p.add_argument("graph", type=Path)
    p.add_argument("--model", choices=("dirm", "irm"), default="dirm")
    _add_hyper(p)
    p.add_argument("--irm-beta", type=_floats(2), default=(1.0, 1.0),
                   help="IRM Beta(b1, b0) prior on edge probabilities")
    p.add_argument("--iters", type=int, default=200)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--chains", type=int, default=1, help="chains use seeds seed..seed+chains-1")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--init", choices=("random", "singleton", "given"), default="random")
    p.add_argument("--init-labels", type=Path)
    p.add_argument("--truth", type=Path, help="labels file; writes an ARI summary")
    p.add_argument("--strip-loops", action="store_true")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("estimate", help="histogram or degree-sorting estimate")
    p.add_argument("graph", type=Path)
    p.add_argument("--method", choices=("histogram", "degree-sort"), default="degree-sort")
    p.add_argument("--labels", type=Path, help="partition for the histogram method")
    p.add_argument("--resolution", type=int, default=2, help="block count for degree sorting")
    p.add_argument("--strip-loops", action="store_true")
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("render", help="write a PGM pixel picture")
    p.add_argument("input", type=Path, help="digraph file or digraphon JSON")
    p.add_argument("--order", type=Path, help="labels file; sort vertices by label")
    p.add_argument("--resolution", type=int, default=100, help="pixels per digraphon panel")
    p.add_argument("--scale", type=int, default=1)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("experiment", help="reproduce a synthetic experiment")
    p.add_argument("name", choices=("uniform", "half"))
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--iters", type=int, default=None, help="default 200 (uniform) / 500 (half)")
    p.add_argument("--chains", type=int, default=1)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--truncation", type=int, default=50)
    p.add_argument("--scale", type=int, default=4)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("check", help="test a structural property of a digraph")
    p.add_argument("graph", type=Path)
    p.add_argument("--property", required=True,
                   choices=("undirected", "tournament", "dag", "transitive", "poset", "linear-order"))
    p.add_argument("--strip-loops", action="store_true")

    p = sub.add_parser("validate", help="validate a digraphon spec file")
    p.add_argument("spec", type=Path)
    return parser


def _parse(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        cfg = json.loads(Path(args.config).read_text())
        sub = parser._subparsers._group_actions[0].choices[args.command]
        sub.set_defaults(**{k.replace("-", "_"): v for k, v in cfg.items()})
        args = parser.parse_args(argv)
    return args


def _load_graph(path, strip):
    g = io.read_digraph(path)
    if np.asarray(g).diagonal().any():
        if not strip:
            raise SelfLoopError(f"{path}: graph has self-loops (use --strip-loops)")
        log.warning("stripping %d self-loops", int(np.asarray(g).diagonal().sum()))
        g = core.remove_loops(g)
    return g


def cmd_sample(args):
    if args.source in core.BUILTINS:
        d = core.builtin(args.source, args.resolution, args.poset_loops)
    elif Path(args.source).exists():
        d = io.read_digraphon(args.source)
        if args.poset_loops:
            d = d.with_loops(1)
    else:
        raise UsageError(f"unknown builtin or missing file: {args.source}")
    s = core.sample_digraph(d, args.n, args.seed)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    io.write_digraph(out / "graph.txt", s.graph, args.edge_list)
    io.write_latents(out / "latents.txt", s.u)
    io.write_labels(out / "labels.txt", d.class_of(s.u))
    io.write_digraphon(out / "digraphon.json", d)
    if args.sort_by_latents:
        io.write_digraph(out / "graph_sorted.txt", core.resort_by_latents(s), args.edge_list)
    if args.scale:
        render.write_pgm(out / "graph.pgm", render.adjacency_image(s.graph), args.scale)
        if args.sort_by_latents:
            render.write_pgm(out / "graph_sorted.pgm",
                             render.adjacency_image(core.resort_by_latents(s)), args.scale)
    return EXIT_OK


def cmd_prior(args):
    d = sample_dirm_digraphon(_hyper(args), args.seed)
    io.write_digraphon(args.out, d)
    return EXIT_OK


def _fit_one(job):
    model, g, h, iters, seed, init, z0 = job
    if model == "dirm":
        return run_chain(g, h, iters, seed, init=init, z0=z0)
    return run_chain_irm(g, h, iters, seed, init=init, z0=z0)


def cmd_fit(args):
    g = _load_graph(args.graph, args.strip_loops)
    if args.model == "dirm":
        h = _hyper(args)
    else:
        h = IrmHyperParams(args.alpha, args.irm_beta[0], args.irm_beta[1])
    z0 = io.read_labels(args.init_labels) if args.init_labels else None
    if args.init == "given" and z0 is None:
        raise UsageError("--init given needs --init-labels")
    seeds = [args.seed + c for c in range(args.chains)]
    jobs = [(args.model, g, h, args.iters, s, args.init, z0) for s in seeds]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_fit_one, jobs))
    else:
        results = [_fit_one(j) for j in jobs]
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    truth = io.read_labels(args.truth) if args.truth else None
    rows = ["model\tseed\tclusters\tari\tlog_joint\n"]
    for seed, res in zip(seeds, results):
        tag = f"{args.model}_seed{seed}"
        io.write_trace(out / f"trace_{tag}.txt", res.trace)
        props = np.bincount(res.z) / len(res.z) if len(res.z) else np.ones(1)
        d = res.weights.to_digraphon(props) if len(res.z) else core.erdos_renyi_digraphon()
        io.write_final_state(out / f"final_{tag}.json", args.model, res.z, d)
        ari = adjusted_rand_index(res.z, truth) if truth is not None else float("nan")
        rows.append(f"{args.model}\t{seed}\t{res.state.K}\t{ari!r}\t{res.trace[-1].log_joint!r}\n")
    if truth is not None:
        aris = [float(r.split("\t")[3]) for r in rows[1:]]
        rows.append(f"# median_ari\t{float(np.median(aris))!r}\n")
    (out / f"summary_{args.model}.tsv").write_text("".join(rows))
    return EXIT_OK


def cmd_estimate(args):
    g = _load_graph(args.graph, args.strip_loops)
    if args.method == "histogram":
        if not args.labels:
            raise UsageError("histogram estimation needs --labels")
        z = io.read_labels(args.labels)
        w = estimators.histogram_densities(g, z)
        props = np.bincount(z, minlength=w.k) / len(z)
        if np.any(props == 0):
            raise UsageError("labels must use every class index 0..k-1")
        extra = {"empty": w.empty.astype(int).tolist()}
    else:
        res = estimators.degree_sort_estimate(g, args.resolution)
        w, props = res.weights, res.proportions
        extra = {"ordering": res.ordering.tolist(), "empty": w.empty.astype(int).tolist()}
    io.write_digraphon(args.out, w.to_digraphon(props), extra)
    return EXIT_OK


def cmd_render(args):
    text = Path(args.input).read_text()
    if text.lstrip().startswith("{"):
        d = io.digraphon_from_dict(json.loads(text))
        img = render.digraphon_image(d, args.resolution)
    else:
        g = io.digraph_from_text(text)
        order = None
        if args.order:
            order = np.argsort(io.read_labels(args.order), kind="stable")
        img = render.adjacency_image(g, order)
    render.write_pgm(args.out, img, args.scale)
    return EXIT_OK


def cmd_experiment(args):
    if args.name == "half":
        res = experiments.run_half(args.seed, args.n, args.iters or 500, args.chains, args.alpha)
        experiments.write_half_bundle(res, args.out, args.scale)
        print(f"dirm ARI {np.median(res.dirm_ari):.4f}  irm ARI {np.median(res.irm_ari):.4f}")
    else:
        res = experiments.run_uniform(args.seed, args.n, args.iters or 200, args.chains,
                                      args.alpha, args.truncation)
        experiments.write_uniform_bundle(res, args.out, args.scale)
        best = res.best()
        mae, cells = res.weight_error(best)
        print(f"true classes {res.truth.max() + 1}  inferred {best.state.K}  "
              f"ARI {res.ari(best):.4f}  weight MAE {mae:.4f} over {cells} cells")
    return EXIT_OK


def cmd_check(args):
    g = io.read_digraph(args.graph)
    if args.strip_loops:
        g = core.remove_loops(g)
    prop = args.property
    if prop == "undirected":
        ok = core.is_undirected(g)
    elif prop == "tournament":
        ok = core.is_tournament(g)
    elif prop == "dag":
        ok = core.is_dag(g)
    elif prop == "transitive":
        ok = core.is_transitively_closed(g)
    elif prop == "poset":
        ok = core.is_dag(g) and core.is_transitively_closed(g)
    else:
        ok = core.is_tournament(g) and core.is_transitively_closed(g)
    print("true" if ok else "false")
    return EXIT_OK if ok else EXIT_INVALID


def cmd_validate(args):
    data = json.loads(Path(args.spec).read_text())
    try:
        io.digraphon_from_dict(data)
    except InvalidDigraphon as exc:
        for v in exc.violations:
            print(v)
        return EXIT_INVALID
    print("ok")
    return EXIT_OK


COMMANDS = {
    "sample": cmd_sample, "prior": cmd_prior, "fit": cmd_fit, "estimate": cmd_estimate,
    "render": cmd_render, "experiment": cmd_experiment, "check": cmd_check,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    args = _parse(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"digraphon: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidDigraphon, SelfLoopError, io.FormatError, json.JSONDecodeError) as exc:
        print(f"digraphon: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"digraphon: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"digraphon: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
