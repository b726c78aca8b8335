"""
narrative-miner command line.

Each subcommand runs one analysis step on files; ``pipeline`` runs them all
with caching and a manifest. Tables go to CSV with ``--out`` and are printed
otherwise.
"""

import argparse
import asyncio
import json
import os
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import yaml
from dotenv import load_dotenv
from loguru import logger

from ..attribution import (
    classify_users,
    engagement_by_topic_count,
    label_counts,
    label_posts,
    labels_from_frame,
    labels_to_frame,
    polarization_table,
    profiles_to_frame,
    topic_correlations,
)
from ..community import ALGORITHMS, DEFAULT_WALK_LENGTH, concordance, detect_all, reference_partition
from ..corpus import Corpus, dump_corpus, ingest_file, summarize
from ..errors import NarrativeMinerError
from ..lexicon import DEFAULT_TOPICS, DocTermMatrix, Normalization, build_dtm, load_dictionary, restrict_to_dictionary
from ..netcore import TermNetwork, backbone_sweep, extract_backbone, project_cooccurrence
from ..ordinal import absolute_distance_coefficient, fit_diagnostics, fit_pom, odds_ratio, predict_category
from ..survival import LifetimeSample, gehan_wilcoxon, kaplan_meier, lifetimes, lifetimes_by_topic
from ..synthgen import GeneratorSpec, write_synthetic
from ..tailfit import bootstrap_pvalue, fit_grid, fits_to_frame
from .artifacts import write_frame, write_json
from .config import load_config
from .pipeline import run_pipeline

DEFAULT_LOG_LEVEL = "INFO"
DEFAULT_SYNTH_SEED = 7
DEFAULT_MIN_CONFIDENCE = 0.9
REFERENCE_PRESETS = ("paper-shaped", "reference-shaped")


def configure_logging(level: Optional[str] = None) -> str:
    """Single stderr sink; level from the flag, then the environment, then INFO."""
    level = (level or os.getenv("NARRATIVE_MINER_LOG_LEVEL") or DEFAULT_LOG_LEVEL).upper()
    logger.remove()
    logger.add(sys.stderr, level=level)
    return level


def _emit(frame: pd.DataFrame, out: Optional[str]) -> None:
    if out:
        write_frame(out, frame)
        logger.info("Wrote {} rows to {}", len(frame), out)
    else:
        print(frame.to_string(index=False))


def _topics(args: argparse.Namespace) -> List[str]:
    return list(args.topics) if args.topics else list(DEFAULT_TOPICS)


def _seed(args: argparse.Namespace, default: int = 0) -> int:
    return default if args.seed is None else args.seed


def _floats(text: str) -> List[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _names(text: str) -> List[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def _labels(path: str) -> Dict[str, str]:
    return labels_from_frame(pd.read_csv(path, dtype=str, keep_default_na=False))


def _lexicon(corpus: Corpus, args: argparse.Namespace):
    normalization = Normalization(fold_accents=args.fold_accents)
    dictionary = load_dictionary(args.dictionary, _topics(args), args.min_confidence, normalization)
    dtm = build_dtm(corpus, args.min_occurrences, normalization, dictionary.phrases, progress=args.progress)
    return dictionary, dtm


def _column_spec(text: str, column: Optional[str]) -> Tuple[str, Optional[str]]:
    """``path.csv:column`` unless the column comes from its own flag."""
    if column is None and ":" in Path(text).name:
        path, _, column = text.rpartition(":")
        return path, column
    return text, column


# ===
# Subcommands
# ===

def cmd_ingest(args: argparse.Namespace) -> int:
    corpus = ingest_file(args.corpus)
    if args.cache:
        Path(args.cache).parent.mkdir(parents=True, exist_ok=True)
        with open(args.cache, "w", encoding="utf-8") as f:
            n = dump_corpus(corpus, f)
        logger.info("Cached {} normalized posts to {}", n, args.cache)
    print(f"Ingested {len(corpus)} posts from {len(corpus.page_index)} pages")
    return 0


def cmd_summary(args: argparse.Namespace) -> int:
    _emit(summarize(ingest_file(args.corpus)).to_frame(), args.out)
    return 0


def cmd_dtm(args: argparse.Namespace) -> int:
    corpus = ingest_file(args.corpus)
    normalization = Normalization(fold_accents=args.fold_accents)
    if args.dictionary:
        dictionary = load_dictionary(args.dictionary, _topics(args), args.min_confidence, normalization)
        dtm = build_dtm(corpus, args.min_occurrences, normalization, dictionary.phrases,
                        args.on_empty, args.progress)
        dtm = restrict_to_dictionary(dtm, dictionary)
    else:
        dtm = build_dtm(corpus, args.min_occurrences, normalization, (), args.on_empty, args.progress)
    logger.info("Document-term matrix: {} posts x {} terms", *dtm.shape)
    _emit(dtm.to_frame(), args.out)
    return 0


def cmd_cooccur(args: argparse.Namespace) -> int:
    dtm = DocTermMatrix.from_frame(pd.read_csv(args.dtm, dtype={"post_id": str, "term": str}, keep_default_na=False))
    net = project_cooccurrence(dtm)
    _emit(net.to_frame(), args.out)
    return 0


def _read_network(path: str) -> TermNetwork:
    frame = pd.read_csv(path, dtype={"term_i": str, "term_j": str})
    nodes = tuple(sorted(set(frame["term_i"]) | set(frame["term_j"])))
    if "retained" in frame.columns:
        frame = frame[frame["retained"].astype(bool)]
    return TermNetwork.from_frame(frame[["term_i", "term_j", "weight"]], nodes=nodes)


def cmd_backbone(args: argparse.Namespace) -> int:
    net = _read_network(args.edges)
    backbone = extract_backbone(net, args.alpha, args.mode)
    _emit(backbone.to_frame(), args.out)
    if args.sweep:
        print(backbone_sweep(net, _floats(args.sweep), args.mode).to_string(index=False))
    return 0


def cmd_communities(args: argparse.Namespace) -> int:
    net = _read_network(args.edges)
    labels: Dict[str, str] = {}
    if args.dictionary:
        labels = dict(load_dictionary(args.dictionary, _topics(args), args.min_confidence).entries)
    graph = net.to_networkx()
    partitions = asyncio.run(detect_all(graph, _names(args.algorithms), args.walk_length))
    reference = reference_partition(graph, labels) if labels else None

    frames = []
    for algorithm, partition in partitions.items():
        frame = partition.to_frame(reference_labels=labels or None)
        frame.insert(0, "algorithm", algorithm)
        frames.append(frame)
        line = f"{algorithm}: {partition.n_communities} communities, modularity {partition.modularity:.4f}"
        if reference is not None:
            line += f", concordance {concordance(partition, reference):.4f}"
        print(line)
    if args.out:
        write_frame(args.out, pd.concat(frames, ignore_index=True))
    return 0


def cmd_label_posts(args: argparse.Namespace) -> int:
    corpus = ingest_file(args.corpus)
    dictionary, dtm = _lexicon(corpus, args)
    labels = label_posts(corpus, restrict_to_dictionary(dtm, dictionary), dictionary, args.mode)
    print(label_counts(labels, _topics(args)).to_string(index=False))
    if args.out:
        write_frame(args.out, labels_to_frame(labels))
    return 0


def _profiles(args: argparse.Namespace):
    if args.corpus is None or args.labels is None:
        raise ValueError(f"{args.command} needs a corpus and --labels")
    corpus = ingest_file(args.corpus)
    profiles = classify_users(corpus, _labels(args.labels), args.threshold, _topics(args), args.category)
    return corpus, profiles


def cmd_classify_users(args: argparse.Namespace) -> int:
    _, profiles = _profiles(args)
    print(polarization_table(profiles, _topics(args)).to_string(index=False))
    if args.out:
        write_frame(args.out, profiles_to_frame(profiles, _topics(args)))
    return 0


def cmd_mobility_stats(args: argparse.Namespace) -> int:
    _, profiles = _profiles(args)
    topics = _topics(args)
    correlations = topic_correlations(profiles, topics, args.restrict_polarized)
    correlations = correlations.reset_index().rename(columns={"index": "topic"})
    engagement = engagement_by_topic_count(profiles, topics, args.min_likes)
    if args.out_dir:
        out = Path(args.out_dir)
        write_frame(out / "topic_correlations.csv", correlations)
        write_frame(out / "engagement_by_topics.csv", engagement)
    print(correlations.to_string(index=False))
    print(engagement.to_string(index=False))
    return 0


def cmd_fit_tail(args: argparse.Namespace) -> int:
    path, column = _column_spec(args.samples, args.column)
    if column is None:
        raise ValueError("fit-tail needs --column or an input of the form path.csv:column")
    frame = pd.read_csv(path)
    if column not in frame.columns:
        raise ValueError(f"column '{column}' not in {path}")
    if args.group_by:
        groups = {(str(g), column): sub[column].astype(int).tolist()
                  for g, sub in frame.groupby(args.group_by, sort=True)}
    else:
        groups = {("all", column): frame[column].astype(int).tolist()}
    fits = asyncio.run(fit_grid(groups))
    table = fits_to_frame(fits)
    if args.bootstrap:
        table["p_value"] = [
            bootstrap_pvalue([v for v in groups[(c.group, c.metric)] if v > 0], c.fit,
                             args.bootstrap, _seed(args), args.progress) if c.fit else np.nan
            for c in fits
        ]
    _emit(table, args.out)
    return 0


def _lifetime_samples(args: argparse.Namespace) -> Dict[str, LifetimeSample]:
    corpus, profiles = _profiles(args)
    labels = _labels(args.labels)
    kwargs = dict(censor_horizon=args.censor_horizon, exclude_zero=args.exclude_zero)
    user_profiles = profiles if args.unit == "user" else None
    if args.scope:
        return {args.scope: lifetimes(corpus, labels, args.unit, args.scope, user_profiles, **kwargs)}
    return lifetimes_by_topic(corpus, labels, _topics(args), args.unit, user_profiles, **kwargs)


def _grouped_lifetimes(path: str) -> Dict[str, LifetimeSample]:
    """group,duration[,observed] rows; a missing observed column means every lifetime ended."""
    frame = pd.read_csv(path, dtype={"group": str})
    missing = {"group", "duration"} - set(frame.columns)
    if missing:
        raise ValueError(f"{path} lacks columns {sorted(missing)}")
    if "observed" not in frame.columns:
        frame["observed"] = True
    return {
        str(group): LifetimeSample(
            sub["duration"].to_numpy(dtype=float), sub["observed"].astype(bool).to_numpy(), str(group)
        )
        for group, sub in frame.groupby("group", sort=False)
    }


def cmd_survival(args: argparse.Namespace) -> int:
    samples = _lifetime_samples(args)
    curves = {group: kaplan_meier(sample) for group, sample in samples.items()}
    for group, curve in curves.items():
        median = "not reached" if curve.median is None else f"{curve.median:.0f}s"
        print(f"{group}: n={curve.n}, median lifetime {median}")
    if args.out:
        write_frame(args.out, pd.concat([c.to_frame(args.level) for c in curves.values()], ignore_index=True))
    return 0


def cmd_survtest(args: argparse.Namespace) -> int:
    samples = _grouped_lifetimes(args.groups) if args.groups else _lifetime_samples(args)
    result = gehan_wilcoxon(list(samples.values()), args.weighting, args.method,
                            args.permutations, _seed(args))
    payload = result.to_dict()
    if args.out:
        write_json(args.out, payload)
    print(json.dumps(payload, indent=2, default=str))
    return 0


def _pom_observations(args: argparse.Namespace) -> Tuple[np.ndarray, np.ndarray, int]:
    if args.input:
        frame = pd.read_csv(args.input)
        if not {"x", "y"} <= set(frame.columns):
            raise ValueError(f"{args.input} lacks x and y columns")
        x = frame["x"].to_numpy(dtype=float)
        y = frame["y"].to_numpy(dtype=np.int64)
        return x, y, args.K or int(y.max(initial=0))

    if args.users is None:
        raise ValueError("pom needs a users table or --input")
    users = pd.read_csv(args.users)
    like_columns = [c for c in users.columns if c.startswith("likes_")]
    if not like_columns or "total_likes" not in users.columns:
        raise ValueError(f"{args.users} lacks total_likes and likes_<topic> columns")
    x = users["total_likes"].to_numpy(dtype=float)
    y = (users[like_columns].to_numpy() > 0).sum(axis=1)
    keep = (x >= args.min_likes) & (y > 0)
    return x[keep], y[keep], args.K or len(like_columns)


def cmd_pom(args: argparse.Namespace) -> int:
    x, y, K = _pom_observations(args)
    fit = fit_pom(x, y, K, args.log_transform, covariate_names=("likes",))
    _, predicted = predict_category(fit, x)
    diagnostics = fit_diagnostics(fit, x, y)
    report = {
        "fit": fit.to_dict(),
        "odds_ratio": odds_ratio(fit).to_dict(),
        "absolute_distance_coefficient": absolute_distance_coefficient(predicted, y, K),
        "diagnostics": diagnostics.to_dict(),
    }
    print(fit.summary_table().to_string(index=False))
    print(
        f"OR = {report['odds_ratio']['or_value']:.4f}, delta = {report['absolute_distance_coefficient']:.3f}, "
        f"deviance = {diagnostics.deviance:.2f} on {diagnostics.df} df, chi-square p = {diagnostics.p_value:.4g}"
    )
    if args.out:
        write_json(args.out, report)
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    if args.spec:
        with open(args.spec, "r", encoding="utf-8") as f:
            spec = GeneratorSpec.load(yaml.safe_load(f) or {})
    elif args.preset in REFERENCE_PRESETS:
        spec = GeneratorSpec.reference_shaped(args.scale)
    else:
        spec = GeneratorSpec()
    spec.check()
    paths = write_synthetic(spec, args.out, seed=_seed(args, DEFAULT_SYNTH_SEED), progress=args.progress)
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


def cmd_pipeline(args: argparse.Namespace) -> int:
    config = load_config(
        args.config,
        overrides=args.set or (),
        corpus=args.corpus,
        dictionary=args.dictionary,
        output_dir=args.out,
        seed=args.seed,
        topics=args.topics,
        min_occurrences=args.min_occurrences,
        min_confidence=args.min_confidence,
        alpha=args.alpha,
        threshold=args.threshold,
        censor_horizon=args.censor_horizon,
    )
    report = run_pipeline(config, progress=args.progress)
    for stage in report["stages"]:
        flag = " (cached)" if stage.get("cache_hit") else ""
        print(f"{stage['stage']:<12} {stage['status']}{flag}")
    print(f"recomputed: {report['recomputed']}  report: {Path(config.output_dir) / 'run_report.json'}")
    return 0 if report["status"] == "ok" else 1


# ===
# Parser
# ===

def _common_parser() -> argparse.ArgumentParser:
    """Global flags repeated on every subcommand; unset ones leave the top-level value alone."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-level", default=argparse.SUPPRESS, help="DEBUG, INFO, WARNING or ERROR")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="Seed for every randomized step")
    common.add_argument("--topics", type=_names, default=argparse.SUPPRESS, help="Comma-separated topic labels")
    common.add_argument("--progress", action="store_true", default=argparse.SUPPRESS, help="Show progress bars")
    return common


def _add_source(p: argparse.ArgumentParser, dest: str, *flags: str, required: bool = True, help: str = "") -> None:
    """An input given either positionally or through named flags."""
    p.add_argument(dest, nargs="?", default=None, help=help)
    p.add_argument(*flags, dest=f"{dest}_flag", default=None, metavar="PATH", help=f"Same as the positional {dest}")
    sources = tuple(p.get_default("sources") or ())
    p.set_defaults(sources=sources + ((dest, required),))


def _resolve_sources(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    for dest, required in getattr(args, "sources", ()):
        value = getattr(args, dest) or getattr(args, f"{dest}_flag")
        if value is None and required:
            parser.error(f"{args.command}: {dest} is required")
        setattr(args, dest, value)


def _add_lexicon_args(p: argparse.ArgumentParser, dictionary_required: bool) -> None:
    p.add_argument("--dictionary", "--dict", "-d", required=dictionary_required,
                   help="Term dictionary CSV (term,label[,confidence])")
    p.add_argument("--min-occurrences", type=int, default=500, help="Keep terms occurring more than this (default: 500)")
    p.add_argument("--min-confidence", type=float, default=DEFAULT_MIN_CONFIDENCE,
                   help="Drop dictionary rows below this confidence (default: 0.9)")
    p.add_argument("--fold-accents", action="store_true", help="Strip accents before tokenizing")


def _add_user_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    _add_source(p, "corpus", "--corpus", required=required, help="Line-delimited post records")
    p.add_argument("--labels", "-l", required=required, help="post_labels.csv from label-posts")
    p.add_argument("--threshold", type=float, default=0.95, help="Polarization threshold (default: 0.95)")
    p.add_argument("--category", default=None, help="Only users liking pages of this category")


def _add_lifetime_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    _add_user_args(p, required)
    p.add_argument("--unit", choices=("post", "user"), default="post")
    p.add_argument("--by", choices=("topic",), default="topic", help="Grouping of the lifetimes")
    p.add_argument("--scope", default=None, help="One topic; default: every topic")
    p.add_argument("--censor-horizon", type=float, default=None, help="Seconds before window end counted as censored")
    p.add_argument("--exclude-zero", action="store_true", help="Drop zero-length lifetimes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="narrative-miner",
        description="Topic, engagement and lifetime analytics for post/like/comment corpora",
    )
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR (env: NARRATIVE_MINER_LOG_LEVEL)")
    parser.add_argument("--seed", type=int, default=None, help="Seed for every randomized step")
    parser.add_argument("--topics", type=_names, default=None, help="Comma-separated topic labels")
    parser.add_argument("--progress", action="store_true", help="Show progress bars")
    sub = parser.add_subparsers(dest="command", required=True)
    common = [_common_parser()]

    p = sub.add_parser("ingest", parents=common, help="Validate a corpus and optionally cache it normalized")
    _add_source(p, "corpus", "--input", "-i")
    p.add_argument("--cache", "--out", "-o", dest="cache", default=None, help="Write the normalized corpus here")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("summary", parents=common, help="Entity breakdown of a corpus")
    _add_source(p, "corpus", "--corpus")
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_summary)

    p = sub.add_parser("dtm", parents=common, help="Document-term matrix as triplets")
    _add_source(p, "corpus", "--corpus")
    _add_lexicon_args(p, dictionary_required=False)
    p.add_argument("--on-empty", choices=("error", "empty"), default="error")
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_dtm)

    p = sub.add_parser("cooccur", parents=common, help="Term co-occurrence network from DTM triplets")
    _add_source(p, "dtm", "--dtm")
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_cooccur)

    p = sub.add_parser("backbone", parents=common, help="Disparity-filter backbone of an edge list")
    _add_source(p, "edges", "--net")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--mode", choices=("either", "both"), default="either")
    p.add_argument("--sweep", default=None, help="Comma-separated alphas to report edge counts for")
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_backbone)

    p = sub.add_parser("communities", parents=common, help="Community detection on a (backbone) edge list")
    _add_source(p, "edges", "--net")
    p.add_argument("--algorithms", "--algo", default=",".join(ALGORITHMS))
    p.add_argument("--walk-length", type=int, default=DEFAULT_WALK_LENGTH)
    p.add_argument("--dictionary", "--reference", "-d", default=None, help="Reference labels for concordance")
    p.add_argument("--min-confidence", type=float, default=DEFAULT_MIN_CONFIDENCE)
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_communities)

    p = sub.add_parser("label-posts", parents=common, help="Majority-rule topic label per post")
    _add_source(p, "corpus", "--corpus")
    _add_lexicon_args(p, dictionary_required=True)
    p.add_argument("--mode", choices=("presence", "occurrence"), default="presence")
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_label_posts)

    p = sub.add_parser("classify-users", parents=common, help="User profiles and polarization")
    _add_user_args(p)
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_classify_users)

    p = sub.add_parser("mobility-stats", parents=common, help="Topic correlations and engagement by topics liked")
    _add_user_args(p)
    p.add_argument("--min-likes", type=int, default=4)
    p.add_argument("--restrict-polarized", action="store_true")
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_mobility_stats)

    p = sub.add_parser("fit-tail", parents=common, help="Discrete power-law fits of a count column")
    _add_source(p, "samples", "--input", help="CSV with a count column, or path.csv:column")
    p.add_argument("--column", "-c", default=None)
    p.add_argument("--group-by", "-g", default=None)
    p.add_argument("--bootstrap", type=int, default=0, help="KS bootstrap replicates (default: off)")
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_fit_tail)

    p = sub.add_parser("survival", parents=common, help="Kaplan-Meier lifetime curves")
    _add_lifetime_args(p)
    p.add_argument("--level", type=float, default=0.95, help="Confidence band level")
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_survival)

    p = sub.add_parser("survtest", parents=common, help="Gehan-Wilcoxon (weighted log-rank) test across topics")
    _add_lifetime_args(p, required=False)
    p.add_argument("--groups", default=None, help="CSV of group,duration[,observed]; replaces corpus and labels")
    p.add_argument("--weighting", choices=("gehan", "peto", "logrank"), default="gehan")
    p.add_argument("--method", choices=("asymptotic", "permutation"), default="asymptotic")
    p.add_argument("--permutations", type=int, default=10_000)
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_survtest)

    p = sub.add_parser("pom", parents=common, help="Proportional odds model of topics liked vs likes")
    p.add_argument("users", nargs="?", default=None, help="users.csv from classify-users")
    p.add_argument("--input", "-i", default=None, help="CSV with x (likes) and y (topics liked) columns")
    p.add_argument("--min-likes", type=int, default=4)
    p.add_argument("--K", type=int, default=None)
    p.add_argument("--log-transform", action="store_true")
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_pom)

    p = sub.add_parser("synth", parents=common, help="Synthetic corpus with a ground-truth ledger")
    p.add_argument("--preset", choices=REFERENCE_PRESETS + ("default",), default="reference-shaped")
    p.add_argument("--scale", type=float, default=0.01)
    p.add_argument("--spec", default=None, help="YAML generator spec (overrides --preset)")
    p.add_argument("--out", "-o", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("pipeline", parents=common, help="Run every stage with caching and a manifest")
    p.add_argument("--config", "-c", default=None, help="YAML or TOML config file")
    p.add_argument("--corpus", default=None)
    p.add_argument("--dictionary", default=None)
    p.add_argument("--out", "-o", default=None)
    p.add_argument("--min-occurrences", type=int, default=None)
    p.add_argument("--min-confidence", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--censor-horizon", type=float, default=None)
    p.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE", help="Override any config key")
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """CLI entry point."""
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)
    _resolve_sources(parser, args)
    configure_logging(args.log_level)
    handler: Callable[[argparse.Namespace], int] = args.func
    try:
        return handler(args)
    except (NarrativeMinerError, ValueError, FileNotFoundError) as e:
        logger.error("{}: {}", args.command, e)
        return 1


if __name__ == "__main__":
    sys.exit(main())
