"""Command-line driver: embed, sweep, eval, gen, plot.

Exit codes: 0 on success, 1 on numerical failure (divergent optimization),
2 on usage, parse, or IO errors.
"""

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .datasets import make_gaussian_mixture, make_swissroll
from .estimator import QSNE
from .evaluation import coranking_matrix, knn_accuracy, q_local
from .exceptions import DivergenceError
from .io import load_csv, save_csv, save_embedding
from .pca import PCA
from .plotting import scatter_svg

SCHEMA_VERSION = 1


def _add_embedding_options(p):
    p.add_argument("--method", choices=("sne", "ssne", "tsne", "qsne"), default="qsne")
    p.add_argument("--q", type=float, default=2.0, help="kernel shape for --method qsne")
    p.add_argument("--perplexity", type=float, default=30.0)
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--lr", type=float, default=200.0)
    p.add_argument("--momentum-early", type=float, default=0.5)
    p.add_argument("--momentum-late", type=float, default=0.8)
    p.add_argument("--momentum-switch", type=int, default=250)
    p.add_argument("--exaggeration", type=float, default=12.0)
    p.add_argument("--exaggeration-iters", type=int, default=250)
    p.add_argument("--pca-dims", type=int, default=None,
                   help="project the input to this many dimensions first")
    p.add_argument("--dims", type=int, default=2, help="embedding dimension")
    p.add_argument("--label-column", type=int, default=None,
                   help="column of the input CSV holding integer labels")
    p.add_argument("--knn-k", type=int, default=10)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qsne",
        description="Neighbor embeddings with q-Gaussian kernels (sne/ssne/tsne/qsne)")
    parser.add_argument("--version", action="version", version=f"qsne {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="embed a CSV dataset and write CSV/JSON/SVG artifacts")
    p.add_argument("--input", required=True)
    p.add_argument("--output-dir", required=True)
    _add_embedding_options(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--svg", action="store_true", help="also write a scatter SVG (2-D only)")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("sweep", help="evaluate a q x perplexity x seed grid")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True, help="CSV file for the result table")
    _add_embedding_options(p)
    p.add_argument("--q-grid", default="2.0", help="comma-separated q values")
    p.add_argument("--perplexity-grid", default="30", help="comma-separated perplexities")
    p.add_argument("--seeds", default="0,1,2,3,4", help="comma-separated seeds")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("eval", help="score an embedding against its source data")
    p.add_argument("--input", required=True, help="high-dimensional CSV")
    p.add_argument("--embedding", required=True, help="embedding CSV")
    p.add_argument("--label-column", type=int, default=None,
                   help="label column of the input CSV")
    p.add_argument("--knn-k", type=int, default=10)
    p.add_argument("--output", default=None, help="JSON file (default: stdout)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gen", help="generate a synthetic dataset CSV (labels in the last column)")
    p.add_argument("--dataset", choices=("swissroll", "mixture"), required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--n", type=int, default=1500, help="swissroll point count")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--classes", type=int, default=5)
    p.add_argument("--per-class", type=int, default=100)
    p.add_argument("--dim", type=int, default=10)
    p.add_argument("--separation", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("plot", help="render a 2-D embedding CSV as an SVG scatter")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--label-column", type=int, default=None,
                   help="override label autodetection from the header")
    p.set_defaults(func=cmd_plot)
    return parser


def _thread_count():
    env = os.environ.get("THREADS")
    if env:
        try:
            value = int(env)
        except ValueError:
            value = 0
        if value >= 1:
            return value
    return os.cpu_count() or 1


def _load_embedding_csv(path, label_column=None):
    data = load_csv(path, label_column=label_column)
    if label_column is None and data.columns and "label" in data.columns:
        data = load_csv(path, label_column=data.columns.index("label"))
    return data


def _evaluate(X, Y, labels, knn_k):
    """q_local always; k-NN accuracy only when labels are available."""
    scores = {"knn_accuracy": None, "q_local": None, "k_max": None}
    if Y.shape[0] >= 3:
        score, _, k_max = q_local(coranking_matrix(X, Y))
        scores["q_local"] = float(score)
        scores["k_max"] = int(k_max)
    if labels is not None and 1 <= knn_k < Y.shape[0]:
        scores["knn_accuracy"] = float(knn_accuracy(Y, labels, k=knn_k))
    return scores


def _estimator(args, q=None, perplexity=None, seed=None):
    return QSNE(
        n_components=args.dims,
        perplexity=args.perplexity if perplexity is None else perplexity,
        method=args.method,
        q=args.q if q is None else q,
        learning_rate=args.lr,
        n_iter=args.iters,
        momentum_early=args.momentum_early,
        momentum_late=args.momentum_late,
        momentum_switch=args.momentum_switch,
        exaggeration=args.exaggeration,
        exaggeration_iters=args.exaggeration_iters,
        random_state=getattr(args, "seed", 0) if seed is None else seed,
    )


def cmd_embed(args):
    data = load_csv(args.input, label_column=args.label_column)
    X, labels = data.values, data.labels
    timings = {}
    if args.pca_dims is not None:
        t0 = time.perf_counter()
        X = PCA(n_components=args.pca_dims).fit(X).transform(X)
        timings["pca_s"] = time.perf_counter() - t0

    est = _estimator(args)
    Y = est.fit_transform(X)
    trace = est.trace_
    timings.update(trace.timings)

    t0 = time.perf_counter()
    evaluation = _evaluate(X, Y, labels, args.knn_k)
    timings["evaluation_s"] = time.perf_counter() - t0

    os.makedirs(args.output_dir, exist_ok=True)
    embedding_path = os.path.join(args.output_dir, "embedding.csv")
    report_path = os.path.join(args.output_dir, "report.json")
    svg_path = os.path.join(args.output_dir, "embedding.svg") if args.svg else None
    if svg_path and args.dims != 2:
        raise ValueError("--svg requires --dims 2")

    report = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": "embed",
        "seed": int(args.seed),
        "config": {
            "input": args.input,
            "method": args.method,
            "q": float(args.q),
            "perplexity": float(args.perplexity),
            "n_components": int(args.dims),
            "n_iter": int(args.iters),
            "learning_rate": float(args.lr),
            "momentum_early": float(args.momentum_early),
            "momentum_late": float(args.momentum_late),
            "momentum_switch": int(args.momentum_switch),
            "exaggeration": float(args.exaggeration),
            "exaggeration_iters": int(args.exaggeration_iters),
            "pca_dims": args.pca_dims,
            "label_column": args.label_column,
            "knn_k": int(args.knn_k),
            "seed": int(args.seed),
        },
        "n_samples": int(X.shape[0]),
        "kl_trace": [float(v) for v in trace.kl],
        "final_kl": float(trace.kl[-1]),
        "calibration": {
            "converged": bool((trace.calibration_entropy_gap <= est.entropy_tolerance).all()),
            "max_entropy_gap": float(trace.calibration_entropy_gap.max()),
            "warnings": list(trace.warnings),
        },
        "timings": {k: float(v) for k, v in timings.items()},
        "evaluation": evaluation,
        "outputs": {"embedding_csv": embedding_path, "svg": svg_path},
    }

    written = []
    try:
        save_embedding(Y, labels, embedding_path)
        written.append(embedding_path)
        with open(report_path, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
        written.append(report_path)
        if svg_path:
            with open(svg_path, "w", encoding="utf-8") as fh:
                fh.write(scatter_svg(Y, labels))
            written.append(svg_path)
    except BaseException:
        for path in written:
            try:
                os.unlink(path)
            except OSError:
                pass
        raise

    print(f"embedded {X.shape[0]} samples with {args.method}"
          f"{f' (q={args.q})' if args.method == 'qsne' else ''}; "
          f"final KL {report['final_kl']:.4f}; wrote {args.output_dir}")
    return 0


def _fmt(value):
    return "" if value is None else format(value, ".17g")


def cmd_sweep(args):
    data = load_csv(args.input, label_column=args.label_column)
    X, labels = data.values, data.labels
    if args.pca_dims is not None:
        X = PCA(n_components=args.pca_dims).fit(X).transform(X)
    qs = [float(v) for v in args.q_grid.split(",") if v.strip()]
    perps = [float(v) for v in args.perplexity_grid.split(",") if v.strip()]
    seeds = [int(v) for v in args.seeds.split(",") if v.strip()]
    if not qs or not perps or not seeds:
        raise ValueError("q, perplexity, and seed grids must all be nonempty")

    cells = [(q, p, s) for q in qs for p in perps for s in seeds]

    def run_cell(cell):
        q, perplexity, seed = cell
        try:
            Y = _estimator(args, q=q, perplexity=perplexity, seed=seed).fit_transform(X)
            scores = _evaluate(X, Y, labels, args.knn_k)
            return {"q": q, "perplexity": perplexity, "seed": seed,
                    "knn_accuracy": scores["knn_accuracy"],
                    "q_local": scores["q_local"], "status": "ok"}
        except Exception as exc:  # single-cell failures must not kill the sweep
            return {"q": q, "perplexity": perplexity, "seed": seed,
                    "knn_accuracy": None, "q_local": None,
                    "status": f"error: {exc}"}

    workers = min(_thread_count(), len(cells))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_cell, cells))
    else:
        results = [run_cell(cell) for cell in cells]

    import csv as _csv
    with open(args.output, "w", newline="", encoding="utf-8") as fh:
        writer = _csv.writer(fh)
        writer.writerow(["q", "perplexity", "seed", "knn_accuracy", "q_local", "status"])
        idx = 0
        for q in qs:
            for perplexity in perps:
                group = results[idx:idx + len(seeds)]
                idx += len(seeds)
                for row in group:
                    writer.writerow([_fmt(row["q"]), _fmt(row["perplexity"]), row["seed"],
                                     _fmt(row["knn_accuracy"]), _fmt(row["q_local"]),
                                     row["status"]])
                ok = [row for row in group if row["status"] == "ok"]
                mean_knn = (sum(r["knn_accuracy"] for r in ok) / len(ok)
                            if ok and ok[0]["knn_accuracy"] is not None else None)
                mean_ql = sum(r["q_local"] for r in ok) / len(ok) if ok else None
                writer.writerow([_fmt(q), _fmt(perplexity), "mean",
                                 _fmt(mean_knn), _fmt(mean_ql),
                                 f"{len(ok)}/{len(group)} ok"])
    n_ok = sum(r["status"] == "ok" for r in results)
    print(f"sweep finished: {n_ok}/{len(results)} runs ok; wrote {args.output}")
    return 0


def cmd_eval(args):
    data = load_csv(args.input, label_column=args.label_column)
    emb = _load_embedding_csv(args.embedding)
    if emb.values.shape[0] != data.values.shape[0]:
        raise ValueError(
            f"input has {data.values.shape[0]} rows but embedding has {emb.values.shape[0]}")
    labels = emb.labels if emb.labels is not None else data.labels
    scores = _evaluate(data.values, emb.values, labels, args.knn_k)
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": "eval",
        "n_samples": int(data.values.shape[0]),
        "knn_k": int(args.knn_k),
        "evaluation": scores,
    }
    text = json.dumps(report, indent=2) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_gen(args):
    if args.dataset == "swissroll":
        X, labels = make_swissroll(args.n, args.noise, args.seed)
    else:
        X, labels = make_gaussian_mixture(args.per_class, args.classes,
                                          args.dim, args.separation, args.seed)
    save_csv(X, args.output, labels=labels)
    print(f"wrote {X.shape[0]}x{X.shape[1]} {args.dataset} dataset to {args.output} "
          "(labels in the last column)")
    return 0


def cmd_plot(args):
    data = _load_embedding_csv(args.input, args.label_column)
    if data.values.shape[1] != 2:
        raise ValueError(
            f"plot requires a 2-D embedding, got {data.values.shape[1]} dimensions")
    svg = scatter_svg(data.values, data.labels)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(svg)
    print(f"wrote {args.output}")
    return 0


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
