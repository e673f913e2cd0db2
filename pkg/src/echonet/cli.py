"""Command-line pipeline: synth -> ingest -> graphs -> detection -> analytics.

Every subcommand writes CSV data files plus a JSON run manifest (flags, seed,
library versions, input digests). Outputs are byte-identical for identical
flags and seed; diagnostics go to stderr, never into data files.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import warnings
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .community import ALGORITHMS, fastgreedy, walktrap
from .compare import rand_index, random_partition
from .graphs import Partition, build_bipartite, project
from .ingest import (
    Dataset,
    dataset_summary,
    filter_dataset,
    parse_records,
    read_labels,
    serialize_records,
    write_labels,
)
from .metrics import (
    loess_fit,
    pages_per_window,
    polarization_histogram,
    two_largest_sides,
    user_engagement,
    user_polarization,
)
from .synth import SynthConfig, generate
from .temporal import (
    activity_series,
    cohesion_series,
    manova_pillai,
    two_way_anova,
)
from .timebins import parse_date, parse_quarter, quarter_label

KIND_LABEL = {"like": "likes", "comment": "comments"}
DV_ACTION = {"posts": "post", "likes": "like", "comments": "comment"}


def derived_seed(seed: int, *parts) -> int:
    """Deterministic per-operation seed from (global seed, names)."""
    text = ":".join([str(seed)] + [str(p) for p in parts])
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big") >> 1


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _write_manifest(out: Path, subcommand: str, args: argparse.Namespace,
                    inputs: list[Path]) -> None:
    flags = {k: (str(v) if isinstance(v, Path) else v)
             for k, v in sorted(vars(args).items()) if k != "func"}
    manifest = {
        "subcommand": subcommand,
        "seed": args.seed,
        "flags": flags,
        "versions": {
            "echonet": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": ".".join(str(v) for v in sys.version_info[:3]),
        },
        "inputs": {str(p): _sha256(p) for p in inputs},
    }
    _write_text(Path(str(out) + ".manifest.json"),
                json.dumps(manifest, sort_keys=True, indent=2) + "\n")


def _out_path(args, name: str) -> Path:
    p = Path(name)
    return p if p.is_absolute() else Path(args.out_dir) / p


def _load_dataset(args) -> tuple[Dataset, Path]:
    path = _out_path(args, args.infile)
    with open(path, "r", encoding="utf-8") as fh:
        d = parse_records(fh, format=getattr(args, "format", "jsonl"),
                          strict=getattr(args, "strict", True))
    if d.skipped_lines:
        print(f"warning: skipped {d.skipped_lines} malformed lines", file=sys.stderr)
    return d, path


def _load_labels(args) -> tuple[dict[str, str], Path]:
    path = _out_path(args, args.labels)
    with open(path, "r", encoding="utf-8") as fh:
        return read_labels(fh), path


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _pair(text: str) -> tuple[int, int]:
    a, b = text.split(",")
    return (int(a), int(b))


# ---------------------------------------------------------------- subcommands


def cmd_synth(args) -> int:
    kind, _, params = args.actions.partition(":")
    if kind == "fixed":
        actions = ("fixed", int(params))
    elif kind == "lognormal":
        mu, sigma = (float(v) for v in params.split(","))
        actions = ("lognormal", mu, sigma)
    else:
        raise ValueError(f"bad --actions {args.actions!r}, use fixed:N or lognormal:MU,SIGMA")
    sub_blocks = None
    if args.pro_blocks or args.anti_blocks:
        pro = tuple(int(v) for v in (args.pro_blocks or str(args.pages[0])).split(","))
        anti = tuple(int(v) for v in (args.anti_blocks or str(args.pages[1])).split(","))
        sub_blocks = (pro, anti)
    config = SynthConfig(
        users_per_side=args.users,
        pages_per_side=args.pages,
        p_out=args.p_out,
        actions_per_user=actions,
        comment_fraction=args.comment_fraction,
        posts_per_page=args.posts_per_page,
        time_range=(parse_date(args.date_from), parse_date(args.date_to)),
        seed=derived_seed(args.seed, "synth"),
        sub_blocks=sub_blocks,
    )
    dataset, truth, labels = generate(config)
    out = _out_path(args, args.out)
    _write_text(out, serialize_records(dataset))
    _write_text(_out_path(args, args.truth), write_labels(labels))
    if args.user_truth:
        _write_text(_out_path(args, args.user_truth), write_labels(truth.user_side))
    _write_manifest(out, "synth", args, [])
    return 0


def cmd_ingest(args) -> int:
    d, inpath = _load_dataset(args)
    filtered = filter_dataset(d, min_posts=args.min_posts,
                              date_range=(parse_date(args.date_from),
                                          parse_date(args.date_to)))
    out = _out_path(args, args.out)
    _write_text(out, serialize_records(filtered))
    _write_manifest(out, "ingest", args, [inpath])
    return 0


def cmd_summary(args) -> int:
    d, inpath = _load_dataset(args)
    labels, lpath = _load_labels(args)
    out = _out_path(args, args.out)
    _write_text(out, dataset_summary(d, labels).to_csv())
    _write_manifest(out, "summary", args, [inpath, lpath])
    return 0


def cmd_project(args) -> int:
    d, inpath = _load_dataset(args)
    g = project(build_bipartite(d, args.action))
    out = _out_path(args, args.out)
    _write_text(out, g.to_csv())
    _write_manifest(out, "project", args, [inpath])
    return 0


def cmd_detect(args) -> int:
    d, inpath = _load_dataset(args)
    g = project(build_bipartite(d, args.action))
    dendro = None
    if args.algorithm == "fastgreedy":
        part, dendro = fastgreedy(g)
    elif args.algorithm == "walktrap":
        part, dendro = walktrap(g, steps=args.steps)
    else:
        part = ALGORITHMS[args.algorithm](
            g, derived_seed(args.seed, "detect", args.algorithm))
    out = _out_path(args, args.out)
    _write_text(out, part.to_csv())
    if args.dendrogram:
        if dendro is None:
            raise ValueError(f"{args.algorithm} does not produce a dendrogram")
        _write_text(_out_path(args, args.dendrogram), dendro.to_csv())
    _write_manifest(out, "detect", args, [inpath])
    return 0


def run_validation_matrix(d: Dataset, labels: dict[str, str], seed: int,
                          draws: int = 100) -> dict:
    """Rand-index matrix of {random, labeled, fastgreedy} against all algorithms.

    One sub-table per action kind with at least one record; a missing kind is
    omitted with a warning. The random row averages ``draws`` uniform
    partitions into as many communities as the label map uses.
    """
    k = max(len(set(labels.values())), 2)
    result: dict[str, dict[str, dict[str, float]]] = {}
    for kind in ("like", "comment"):
        b = build_bipartite(d, kind)
        if b.n_edges == 0:
            warnings.warn(f"no {kind} records; sub-table omitted")
            continue
        g = project(b)
        parts = {algo: ALGORITHMS[algo](g, derived_seed(seed, "validate", kind, algo))
                 for algo in ALGORITHMS}
        labeled_nodes = [n for n in g.nodes if n in labels]
        if len(labeled_nodes) < 2:
            raise ValueError("need at least 2 labeled pages")
        if len(labeled_nodes) < len(g.nodes):
            warnings.warn(f"{len(g.nodes) - len(labeled_nodes)} pages unlabeled; "
                          "labeled row restricted to labeled pages")
        labeled = Partition.from_labels(labeled_nodes,
                                        [labels[n] for n in labeled_nodes])

        def restricted(part: Partition) -> Partition:
            if len(labeled_nodes) == len(g.nodes):
                return part
            mapping = part.as_dict()
            return Partition.from_labels(labeled_nodes,
                                         [mapping[n] for n in labeled_nodes])

        table: dict[str, dict[str, float]] = {"random": {}, "labeled": {},
                                              "fastgreedy": {}}
        for algo, part in parts.items():
            acc = 0.0
            for i in range(draws):
                rp = random_partition(g.nodes, k,
                                      derived_seed(seed, "validate", kind, "random", i))
                acc += rand_index(rp, part)
            table["random"][algo] = acc / draws
            table["labeled"][algo] = rand_index(labeled, restricted(part))
            table["fastgreedy"][algo] = rand_index(parts["fastgreedy"], part)
        result[KIND_LABEL[kind]] = table
    return result


def validation_matrix_csv(matrix: dict) -> str:
    cols = list(ALGORITHMS)
    rows = []
    for kind in ("likes", "comments"):
        if kind not in matrix:
            continue
        for row_name in ("random", "labeled", "fastgreedy"):
            rows.append([kind, row_name] + [matrix[kind][row_name][c] for c in cols])
    return _csv_text(["graph", "communities"] + cols, rows)


def cmd_validate(args) -> int:
    d, inpath = _load_dataset(args)
    labels, lpath = _load_labels(args)
    matrix = run_validation_matrix(d, labels, args.seed, draws=args.draws)
    out = _out_path(args, args.out)
    _write_text(out, validation_matrix_csv(matrix))
    _write_manifest(out, "validate", args, [inpath, lpath])
    return 0


def _side_map(args, d: Dataset, labels: dict[str, str]) -> dict[str, str]:
    if args.sides == "labels":
        return labels
    g = project(build_bipartite(d, args.action))
    part, _ = fastgreedy(g)
    return two_largest_sides(part)


def cmd_polarize(args) -> int:
    d, inpath = _load_dataset(args)
    labels, lpath = _load_labels(args)
    sides = _side_map(args, d, labels)
    profiles = user_polarization(d, sides, action=args.action,
                                 min_actions=args.min_actions)
    hist = polarization_histogram(profiles, bins=args.bins)
    rows = [(hist.edges[i], hist.edges[i + 1], hist.densities[i])
            for i in range(len(hist.densities))]
    out = _out_path(args, args.out)
    _write_text(out, _csv_text(["bin_left", "bin_right", "density"], rows))
    if args.profiles:
        prows = [(p.user, p.x, p.y, p.rho) for p in profiles]
        _write_text(_out_path(args, args.profiles),
                    _csv_text(["user", "x", "y", "rho"], prows))
    _write_manifest(out, "polarize", args, [inpath, lpath])
    return 0


def cmd_exposure(args) -> int:
    d, inpath = _load_dataset(args)
    labels, lpath = _load_labels(args)
    engagement = user_engagement(d, labels)
    by_side: dict[str, list] = {}
    for e in engagement:
        by_side.setdefault(e.community, []).append(e)
    rows = []
    for side in sorted(by_side):
        members = by_side[side]
        if len(members) < 3:
            warnings.warn(f"community {side!r} has fewer than 3 users; skipped")
            continue
        counts = np.array([pages_per_window(d, e.user, args.window)
                           for e in members], dtype=float)
        if args.standardize_pages:
            lo, hi = counts.min(), counts.max()
            counts = (counts - lo) / (hi - lo) if hi > lo else counts * 0.0
        for measure in ("lifetime", "activity"):
            x = np.array([getattr(e, f"{measure}_std") for e in members])
            grid = np.linspace(x.min(), x.max(), args.eval_points)
            fit, lo95, hi95 = loess_fit(x, counts, span=args.span, eval_points=grid)
            for i in range(len(grid)):
                rows.append((side, measure, float(grid[i]), float(fit[i]),
                             float(lo95[i]), float(hi95[i])))
    out = _out_path(args, args.out)
    _write_text(out, _csv_text(["community", "measure", "x", "fit", "lo95", "hi95"],
                               rows))
    _write_manifest(out, "exposure", args, [inpath, lpath])
    return 0


def cmd_timeline(args) -> int:
    d, inpath = _load_dataset(args)
    labels, lpath = _load_labels(args)
    series = activity_series(d, labels)
    rows = [(quarter_label(s.quarter), s.community, s.measure, s.count)
            for s in series]
    out = _out_path(args, args.out)
    _write_text(out, _csv_text(["quarter", "community", "measure", "count"], rows))
    _write_manifest(out, "timeline", args, [inpath, lpath])
    return 0


def cmd_cohesion(args) -> int:
    d, inpath = _load_dataset(args)
    labels, lpath = _load_labels(args)
    algos = tuple(ALGORITHMS) if args.algorithms == "all" else \
        tuple(a.strip() for a in args.algorithms.split(","))
    points = cohesion_series(d, labels, action=args.action, algorithms=algos,
                             seed=args.seed, cumulative=args.cumulative)
    for pt in points:
        if pt.flags:
            print(f"warning: degenerate quarter {quarter_label(pt.quarter)} "
                  f"for {pt.community}", file=sys.stderr)
            break
    rows = [(quarter_label(p.quarter), p.community, p.algorithm, p.largest, p.total)
            for p in points]
    out = _out_path(args, args.out)
    _write_text(out, _csv_text(["quarter", "community", "algorithm", "largest",
                                "total"], rows))
    _write_manifest(out, "cohesion", args, [inpath, lpath])
    return 0


def cmd_anova(args) -> int:
    d, inpath = _load_dataset(args)
    labels, lpath = _load_labels(args)
    dvs = [v.strip() for v in args.dv.split(",")]
    for dv in dvs:
        if dv not in DV_ACTION:
            raise ValueError(f"unknown dependent variable {dv!r}")
        if args.entity == "users" and dv == "posts":
            raise ValueError("users are never active by posts")
    measures = [f"active_{args.entity}_{DV_ACTION[dv]}" for dv in dvs]
    split = parse_quarter(args.split)
    series = activity_series(d, labels)
    counts: dict[tuple, dict[str, int]] = {}
    for s in series:
        if s.measure in measures:
            counts.setdefault((s.community, s.quarter), {})[s.measure] = s.count
    obs = []
    for (community, q), values in sorted(counts.items()):
        epoch = "before" if q <= split else "after"
        obs.append((community, epoch, tuple(values[m] for m in measures)))

    rows = []
    if len(measures) == 1:
        table = two_way_anova([(a, b, v[0]) for a, b, v in obs])
        for res in (table.factor_a, table.factor_b, table.interaction):
            rows.append((res.term, res.F, res.df1, res.df2, res.p, res.partial_eta2))
    else:
        res = manova_pillai(obs)
        rows.append((res.term, res.F, res.df1, res.df2, res.p, res.partial_eta2))
    out = _out_path(args, args.out)
    _write_text(out, _csv_text(["term", "F", "df1", "df2", "p", "partial_eta2"], rows))
    _write_manifest(out, "anova", args, [inpath, lpath])
    return 0


# --------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0,
                        help="global seed; per-operation seeds derive from it")
    common.add_argument("--threads", type=int, default=1,
                        help="worker cap (results never depend on it)")
    common.add_argument("--out-dir", default=".", help="directory for outputs")

    parser = argparse.ArgumentParser(
        prog="echonet",
        description="polarized user-page interaction network analytics")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("synth", parents=[common],
                       help="generate a planted-polarization dataset")
    p.add_argument("--users", type=_pair, default=(5000, 5000), metavar="PRO,ANTI")
    p.add_argument("--pages", type=_pair, default=(145, 98), metavar="PRO,ANTI")
    p.add_argument("--p-out", dest="p_out", type=float, default=0.02)
    p.add_argument("--actions", default="lognormal:2,1",
                   help="fixed:N or lognormal:MU,SIGMA per-user action count")
    p.add_argument("--comment-fraction", type=float, default=0.2)
    p.add_argument("--posts-per-page", type=int, default=50)
    p.add_argument("--from", dest="date_from", default="2010-01-01")
    p.add_argument("--to", dest="date_to", default="2017-05-31")
    p.add_argument("--pro-blocks", default=None, metavar="N1,N2,...",
                   help="user-disjoint page blocks on the pro side")
    p.add_argument("--anti-blocks", default=None, metavar="N1,N2,...")
    p.add_argument("--out", required=True)
    p.add_argument("--truth", required=True, help="page label CSV output")
    p.add_argument("--user-truth", default=None)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ingest", parents=[common],
                       help="parse, filter and canonicalize an interaction log")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    p.add_argument("--min-posts", type=int, default=10)
    p.add_argument("--from", dest="date_from", default="2010-01-01")
    p.add_argument("--to", dest="date_to", default="2017-05-31")
    strictness = p.add_mutually_exclusive_group()
    strictness.add_argument("--strict", dest="strict", action="store_true",
                            default=True)
    strictness.add_argument("--lenient", dest="strict", action="store_false")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("summary", parents=[common],
                       help="per-label dataset description table")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_summary)

    p = sub.add_parser("project", parents=[common],
                       help="weighted one-mode page projection")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--action", choices=("like", "comment"), default="like")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("detect", parents=[common], help="community detection")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--action", choices=("like", "comment"), default="like")
    p.add_argument("--algorithm", choices=tuple(ALGORITHMS), default="fastgreedy")
    p.add_argument("--steps", type=int, default=4, help="walk length for walktrap")
    p.add_argument("--out", required=True)
    p.add_argument("--dendrogram", default=None)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("validate", parents=[common],
                       help="partition-similarity validation matrix")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--draws", type=int, default=100,
                   help="random partitions averaged in the random row")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("polarize", parents=[common],
                       help="per-user polarization density")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--sides", choices=("labels", "detected"), default="labels")
    p.add_argument("--action", choices=("like", "comment"), default="like")
    p.add_argument("--min-actions", type=int, default=10)
    p.add_argument("--bins", type=int, default=21)
    p.add_argument("--out", required=True)
    p.add_argument("--profiles", default=None, help="optional per-user CSV")
    p.set_defaults(func=cmd_polarize)

    p = sub.add_parser("exposure", parents=[common],
                       help="selective-exposure curves with 95%% confidence bands")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--window", choices=("year", "month", "week"), default="week")
    p.add_argument("--span", type=float, default=0.75)
    p.add_argument("--eval-points", type=int, default=25)
    p.add_argument("--standardize-pages", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_exposure)

    p = sub.add_parser("timeline", parents=[common],
                       help="quarterly active-page and active-user series")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_timeline)

    p = sub.add_parser("cohesion", parents=[common],
                       help="largest detected community per quarter")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--action", choices=("like", "comment"), default="like")
    p.add_argument("--algorithms", default="all")
    p.add_argument("--cumulative", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cohesion)

    p = sub.add_parser("anova", parents=[common],
                       help="sentiment-by-epoch interaction tests")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--dv", default="comments",
                   help="dependent variables, e.g. comments or posts,likes")
    p.add_argument("--entity", choices=("pages", "users"), default="pages")
    p.add_argument("--split", default="2014Q4", help="last quarter of the 'before' epoch")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_anova)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
