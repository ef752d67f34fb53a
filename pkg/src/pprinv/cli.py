"""Command-line front end: embed, invert, evaluate, sweep.

All commands are deterministic for fixed flags and seed. PPREI_THREADS caps
sweep worker parallelism (default 1).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import embedding as emb
from . import graph as gr
from . import linalg
from . import metrics as met
from . import proximity as prox
from .analytical import AnalyticalInputs, invert_analytical
from .optimize import OptConfig, invert_optimize

log = logging.getLogger("pprinv")


def _load_graph(path: str) -> gr.Graph:
    with open(path, "rb") as fh:
        return gr.parse_edge_list(fh)


def _build_config(args, g: gr.Graph) -> prox.ProximityConfig:
    schedule = None
    if args.alpha_schedule:
        with open(args.alpha_schedule) as fh:
            schedule = prox.parse_alpha_schedule(fh.read(), args.k_horizon)
    return prox.preset_config(
        args.preset,
        alpha=args.alpha,
        epsilon=args.epsilon,
        k_horizon=args.k_horizon,
        volume=g.volume,
        alpha_schedule=schedule,
    )


def cmd_embed(args) -> int:
    g = _load_graph(args.graph)
    if args.dim > g.n:
        raise ValueError("dimension exceeds node count")
    cfg = _build_config(args, g)
    t0 = time.perf_counter()
    m = prox.build_proximity(g, cfg)
    t_build = time.perf_counter() - t0
    meta = {
        "preset": prox.Preset(args.preset).value,
        "alpha": args.alpha,
        "epsilon": cfg.epsilon,
        "k_horizon": args.k_horizon,
        "graph_n": g.n,
        "graph_volume": g.volume,
    }
    if args.preset == "lemane":
        meta["alpha_schedule"] = list(cfg.alphas)
    t0 = time.perf_counter()
    pair = emb.factorize(m, args.dim, args.seed, meta=meta)
    t_svd = time.perf_counter() - t0
    emb.save_embedding(args.out, pair)
    log.info("proximity build %.3fs, svd %.3fs", t_build, t_svd)
    print(f"wrote embedding (n={g.n}, d={args.dim}) to {args.out}")
    return 0


def _load_target(args) -> tuple[np.ndarray, dict]:
    if getattr(args, "embedding", None):
        pair = emb.load_embedding(args.embedding)
        return emb.reconstruct_proximity(pair), dict(pair.meta)
    if getattr(args, "proximity", None):
        return linalg.load_matrix(args.proximity), {}
    raise ValueError("supply --embedding DIR or --proximity FILE")


def _meta_default(args, meta: dict, flag: str, key: str):
    value = getattr(args, flag)
    if value is None:
        value = meta.get(key)
    if value is None:
        raise ValueError(f"--{flag.replace('_', '-')} required (not in metadata)")
    return value


def cmd_invert_analytical(args) -> int:
    m_k, meta = _load_target(args)
    if args.graph:
        g = _load_graph(args.graph)
        degrees = g.degrees.astype(np.float64)
    elif args.degrees:
        degrees = np.loadtxt(args.degrees, dtype=np.float64, ndmin=1)
    else:
        raise ValueError("analytical method requires the degree sequence")
    alpha = float(_meta_default(args, meta, "alpha", "alpha"))
    k_horizon = int(_meta_default(args, meta, "k_horizon", "k_horizon"))
    volume = float(degrees.sum())
    inputs = AnalyticalInputs(
        m_k=m_k,
        degrees=degrees,
        volume=volume,
        alpha=alpha,
        k_horizon=k_horizon,
        m_edges=int(volume) // 2,
    )
    recovered = invert_analytical(inputs)
    Path(args.out).write_text(gr.serialize_edge_list(recovered))
    log.info(
        "analytical inversion: n=%d, alpha=%.3f, K=%d, epsilon=%g (recorded; "
        "the closed form does not consume it)",
        recovered.n, alpha, k_horizon, args.epsilon,
    )
    print(f"wrote recovered edge list ({recovered.num_edges} edges) to {args.out}")
    return 0


def cmd_invert_optimize(args) -> int:
    m_target, meta = _load_target(args)
    if args.graph:
        g = _load_graph(args.graph)
        volume = float(g.volume)
        m_edges = g.num_edges
    else:
        if args.volume is None or args.edges is None:
            raise ValueError("supply --graph or both --volume and --edges")
        volume = float(args.volume)
        m_edges = int(args.edges)
    alpha = float(_meta_default(args, meta, "alpha", "alpha"))
    k_horizon = int(_meta_default(args, meta, "k_horizon", "k_horizon"))
    cfg = OptConfig(
        target_volume=volume,
        alpha=alpha,
        epochs=args.epochs,
        newton_iters=args.newton_iters,
        epsilon=args.epsilon,
        k_horizon=k_horizon,
        step_size=args.step_size,
        seed=args.seed,
        optimizer=args.optimizer,
    )
    result = invert_optimize(m_target, cfg, m_edges)
    Path(args.out).write_text(gr.serialize_edge_list(result.graph))
    if args.loss_trace:
        with open(args.loss_trace, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["epoch", "loss"])
            for epoch, value in enumerate(result.losses, start=1):
                writer.writerow([epoch, f"{value:.12g}"])
    log.info(
        "optimize inversion: %d epochs, loss %.6g -> %.6g",
        cfg.epochs, result.losses[0], result.losses[-1],
    )
    print(f"wrote recovered edge list ({result.graph.num_edges} edges) to {args.out}")
    return 0


def _evaluate(g: gr.Graph, g_hat: gr.Graph, labels_path: str | None, meta: dict):
    labels = None
    if labels_path:
        with open(labels_path, "rb") as fh:
            labels = gr.parse_labels(fh, g)
    else:
        meta = dict(meta, labels_missing=True)
    return met.recovery_report(g, g_hat, labels, meta)


def cmd_evaluate(args) -> int:
    g = _load_graph(args.graph)
    g_hat = _load_graph(args.recovered)
    if g_hat.n < g.n:
        # Recovered edge lists drop isolated nodes; restore the node count.
        g_hat = gr.Graph.from_edges(g.n, g_hat.edge_set())
    report = _evaluate(g, g_hat, args.labels, {"graph": args.graph})
    payload = json.dumps(report.to_dict(), sort_keys=True, indent=2)
    Path(args.out).write_text(payload + "\n")
    phi = "n/a" if report.err_phi_avg is None else f"{report.err_phi_avg:.6f}"
    print(
        f"err_A={report.err_a:.6f} err_l={report.err_l:.6f} err_phi_avg={phi}"
    )
    return 0


def _sweep_cell(g, labels, m, args, dim):
    pair = emb.factorize(m, dim, args.seed)
    target = emb.reconstruct_proximity(pair)
    if args.method == "optimize":
        opt_cfg = OptConfig(
            target_volume=float(g.volume),
            alpha=args.alpha,
            epochs=args.epochs,
            newton_iters=args.newton_iters,
            epsilon=args.opt_epsilon if args.opt_epsilon is not None else args.epsilon,
            k_horizon=args.k_horizon,
            step_size=args.step_size,
            seed=args.seed,
        )
        result = invert_optimize(target, opt_cfg, g.num_edges)
        recovered, final_loss = result.graph, result.losses[-1]
    else:
        inputs = AnalyticalInputs(
            m_k=target,
            degrees=g.degrees.astype(np.float64),
            volume=float(g.volume),
            alpha=args.alpha,
            k_horizon=args.k_horizon,
            m_edges=g.num_edges,
        )
        recovered, final_loss = invert_analytical(inputs), ""
    report = met.recovery_report(g, recovered, labels)
    row = report.csv_row()
    row["final_loss"] = f"{final_loss:.9g}" if final_loss != "" else ""
    row["status"] = "ok"
    return row


def cmd_sweep(args) -> int:
    g = _load_graph(args.graph)
    labels = None
    if args.labels:
        with open(args.labels, "rb") as fh:
            labels = gr.parse_labels(fh, g)
    dims = [int(d) for d in args.dims.split(",") if d]
    if not dims:
        raise ValueError("dims list must be nonempty")
    presets = [p.strip() for p in args.presets.split(",") if p.strip()]
    workers = max(1, int(os.environ.get("PPREI_THREADS", "1")))
    cells = []
    for preset_name in presets:
        preset_args = argparse.Namespace(**vars(args))
        preset_args.preset = preset_name
        cfg = _build_config(preset_args, g)
        # Proximity is dimension-independent: build once per preset.
        m = prox.build_proximity(g, cfg)
        for dim in dims:
            cells.append((preset_name, dim, m))

    def run(cell):
        preset_name, dim, m = cell
        try:
            row = _sweep_cell(g, labels, m, args, dim)
        except Exception as exc:  # cell failures must not kill the sweep
            row = {
                "err_A": "", "err_l": "", "err_phi_avg": "", "final_loss": "",
                "status": f"error: {exc}",
            }
        return preset_name, dim, row

    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, cells))
    else:
        results = [run(cell) for cell in cells]
    results.sort(key=lambda item: (item[0], item[1]))
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["preset", "method", "dim", "err_A", "err_l", "err_phi_avg",
             "final_loss", "status"]
        )
        for preset_name, dim, row in results:
            writer.writerow(
                [preset_name, args.method, dim, row["err_A"], row["err_l"],
                 row["err_phi_avg"], row["final_loss"], row["status"]]
            )
    print(f"wrote {len(results)} sweep rows to {args.out}")
    return 0


def _add_proximity_flags(p, epsilon_default: float) -> None:
    p.add_argument("--alpha", type=float, default=None,
                   help="stopping probability (0.7 for the flight graphs, 0.1 "
                        "for the large social graphs)")
    p.add_argument("--epsilon", type=float, default=epsilon_default)
    p.add_argument("--k-horizon", type=int, default=10, dest="k_horizon")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pprinv",
        description="PPR-based embeddings, inversion, and recovery metrics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="build a proximity matrix and factorize it")
    p.add_argument("--graph", required=True)
    p.add_argument("--preset", required=True,
                   choices=[x.value for x in prox.Preset])
    _add_proximity_flags(p, 1e-7)
    p.add_argument("--alpha-schedule", default=None,
                   help="file with one stopping probability per line (lemane)")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embed)

    inv = sub.add_parser("invert", help="recover a graph from embeddings")
    inv_sub = inv.add_subparsers(dest="method", required=True)

    p = inv_sub.add_parser("analytical", help="closed-form recovery")
    p.add_argument("--embedding", default=None)
    p.add_argument("--proximity", default=None, help="PPREIM1 matrix file")
    p.add_argument("--graph", default=None, help="original graph (degrees)")
    p.add_argument("--degrees", default=None, help="one degree per line")
    _add_proximity_flags(p, 1e-5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_invert_analytical, alpha_schedule=None)

    p = inv_sub.add_parser("optimize", help="gradient-descent recovery")
    p.add_argument("--embedding", default=None)
    p.add_argument("--proximity", default=None, help="PPREIM1 matrix file")
    p.add_argument("--graph", default=None, help="original graph (volume, edges)")
    p.add_argument("--volume", type=float, default=None)
    p.add_argument("--edges", type=int, default=None)
    _add_proximity_flags(p, 1e-7)
    p.add_argument("--epochs", type=int, default=40)
    p.add_argument("--newton-iters", type=int, default=10, dest="newton_iters")
    p.add_argument("--step-size", type=float, default=0.1, dest="step_size")
    p.add_argument("--optimizer", choices=["adam", "gd"], default="adam")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--loss-trace", default=None, dest="loss_trace",
                   help="CSV out-file with epoch,loss rows")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_invert_optimize, alpha_schedule=None)

    p = sub.add_parser("evaluate", help="compare recovered vs original graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--recovered", required=True)
    p.add_argument("--labels", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="embed/invert/evaluate over dimensions")
    p.add_argument("--graph", required=True)
    p.add_argument("--labels", default=None)
    p.add_argument("--presets", required=True,
                   help="comma-separated preset names")
    p.add_argument("--dims", required=True, help="comma-separated dimensions")
    p.add_argument("--method", choices=["optimize", "analytical"],
                   default="optimize")
    _add_proximity_flags(p, 1e-7)
    p.add_argument("--opt-epsilon", type=float, default=None, dest="opt_epsilon",
                   help="optimizer threshold when it differs from the preset's")
    p.add_argument("--alpha-schedule", default=None)
    p.add_argument("--epochs", type=int, default=40)
    p.add_argument("--newton-iters", type=int, default=10, dest="newton_iters")
    p.add_argument("--step-size", type=float, default=0.1, dest="step_size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        print(f"pprinv: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
