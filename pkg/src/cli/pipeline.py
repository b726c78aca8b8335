"""
Pipeline Orchestration - LangGraph Stage Graph

Runs the full analysis over one corpus and one dictionary:

    ingest -> lexicon -> cooccur -> backbone -> communities -> label
           -> classify -> (tailfit | survival | pom) -> finalize

Key techniques:
- LangGraph StateGraph with a MemorySaver checkpointer
- Conditional routing to the report node as soon as a stage fails
- Parallel fan-out of the three statistical stages after classification
- Content-hash cache per stage under <output_dir>/.cache
- Atomic report writes and a sha256 manifest of every emitted file
"""

import asyncio
import json
import operator
import pickle
from dataclasses import dataclass, field
from pathlib import Path
from typing import Annotated, Any, Dict, List, Mapping, Optional, Sequence, Tuple, TypedDict

import pandas as pd
from langgraph.checkpoint.memory import MemorySaver
from langgraph.graph import END, StateGraph
from loguru import logger

from .. import __version__
from ..attribution import (
    classify_users,
    engagement_by_topic_count,
    label_counts,
    label_posts,
    labels_to_frame,
    mobility_observations,
    polarization_table,
    profiles_to_frame,
    topic_correlations,
)
from ..community import concordance, detect_all, reference_partition
from ..corpus import ingest_file, summarize
from ..errors import StageError
from ..lexicon import Normalization, build_dtm, load_dictionary, restrict_to_dictionary
from ..netcore import backbone_sweep, extract_backbone, project_cooccurrence
from ..ordinal import (
    absolute_distance_coefficient,
    fit_diagnostics,
    fit_pom,
    odds_ratio,
    predict_category,
)
from ..survival import gehan_wilcoxon, kaplan_meier, lifetimes_by_topic
from ..tailfit import bootstrap_pvalue, ccdf_frame, fit_grid, fits_to_frame, fits_to_wide
from .artifacts import CACHE_DIR, MANIFEST_NAME, sha256_bytes, sha256_file, to_jsonable, write_json, write_manifest, write_table
from .config import PipelineConfig

STAGES = (
    "ingest", "lexicon", "cooccur", "backbone", "communities",
    "label", "classify", "tailfit", "survival", "pom",
)
PARALLEL_STAGES = ("tailfit", "survival", "pom")

# Upstream stages whose cache keys feed a stage's key.
DEPENDS: Dict[str, Tuple[str, ...]] = {
    "ingest": (),
    "lexicon": ("ingest",),
    "cooccur": ("lexicon",),
    "backbone": ("cooccur",),
    "communities": ("backbone", "lexicon"),
    "label": ("ingest", "lexicon"),
    "classify": ("ingest", "label"),
    "tailfit": ("ingest", "label", "classify"),
    "survival": ("ingest", "label", "classify"),
    "pom": ("classify",),
}
SETTINGS: Dict[str, Tuple[str, ...]] = {
    "ingest": (),
    "lexicon": ("lexicon",),
    "cooccur": (),
    "backbone": ("backbone",),
    "communities": ("community",),
    "label": ("lexicon",),
    "classify": ("attribution",),
    "tailfit": ("tailfit",),
    "survival": ("survival",),
    "pom": ("pom", "attribution"),
}

POST_METRICS = ("likes", "comments", "shares")
USER_METRICS = ("likes", "comments")

# Row-level tables stay out of the JSON bundle.
BUNDLE_EXCLUDE = frozenset({
    "vocabulary.csv", "dtm.csv", "cooccurrence.csv", "backbone.csv", "communities.csv",
    "post_labels.csv", "users.csv", "ccdf_posts.csv", "ccdf_users.csv",
    "km_posts.csv", "km_users.csv",
})
RUN_REPORT_NAME = "run_report.json"
BUNDLE_NAME = "report_bundle.json"


def _latest(_old: str, new: str) -> str:
    return new


class PipelineState(TypedDict):
    """State passed between pipeline nodes; heavy results stay on the runner."""
    run_id: str
    current_step: Annotated[str, _latest]
    completed_steps: Annotated[List[str], operator.add]
    errors: Annotated[List[str], operator.add]
    stage_reports: Annotated[List[Dict[str, Any]], operator.add]
    report: Dict[str, Any]


@dataclass
class StageOutput:
    """What a stage hands downstream (``result``) and writes to disk (``tables``)."""
    result: Any
    tables: Dict[str, Any] = field(default_factory=dict)


class StageCache:
    """
    Per-stage result cache keyed by content hash.

    ``<stage>.json`` holds the key and the sha256 of every artifact the stage
    wrote; ``<stage>.pkl`` holds the pickled StageOutput. A hit requires the
    key to match and every artifact to be present with the recorded hash.
    """

    def __init__(self, output_dir: Path):
        self.output_dir = Path(output_dir)
        self.root = self.output_dir / CACHE_DIR

    def load(self, stage: str, key: str) -> Optional[StageOutput]:
        meta_path = self.root / f"{stage}.json"
        blob_path = self.root / f"{stage}.pkl"
        if not meta_path.exists() or not blob_path.exists():
            return None
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        if meta.get("key") != key:
            return None
        for name, digest in meta.get("artifacts", {}).items():
            path = self.output_dir / name
            if not path.exists() or sha256_file(path) != digest:
                logger.info("Cache for {} invalid: {} changed on disk", stage, name)
                return None
        with open(blob_path, "rb") as f:
            return pickle.load(f)

    def store(self, stage: str, key: str, output: StageOutput, artifacts: Sequence[str]) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        with open(self.root / f"{stage}.pkl", "wb") as f:
            pickle.dump(output, f, protocol=pickle.HIGHEST_PROTOCOL)
        hashes = {name: sha256_file(self.output_dir / name) for name in artifacts}
        write_json(self.root / f"{stage}.json", {"key": key, "artifacts": hashes})


def _input_hash(path: Path, what: str) -> str:
    if not path.exists():
        raise FileNotFoundError(f"{what} file not found: {path}")
    return sha256_file(path)


def _stage_node(runner: "PipelineRunner", stage: str):
    async def node(state: PipelineState) -> Dict[str, Any]:
        return await runner.run_stage(stage)
    node.__name__ = f"{stage}_node"
    return node


def _route_to(next_stage):
    def route(state: PipelineState):
        if state["errors"]:
            return "finalize"
        return next_stage
    return route


def create_pipeline_workflow(runner: "PipelineRunner"):
    """
    Create the LangGraph workflow over the analysis stages.

    Sequential stages route to the next stage, or to ``finalize`` once any
    error is recorded. After ``classify`` the tail-fit, survival and POM
    stages run in parallel and join at ``finalize``.
    """
    workflow = StateGraph(PipelineState)

    for stage in STAGES:
        workflow.add_node(stage, _stage_node(runner, stage))
    workflow.add_node("finalize", runner.finalize)

    workflow.set_entry_point(STAGES[0])
    sequential = STAGES[: STAGES.index("classify") + 1]
    for current, following in zip(sequential, sequential[1:]):
        workflow.add_conditional_edges(current, _route_to(following))
    workflow.add_conditional_edges("classify", _route_to(list(PARALLEL_STAGES)))
    workflow.add_edge(list(PARALLEL_STAGES), "finalize")
    workflow.add_edge("finalize", END)

    return workflow.compile(checkpointer=MemorySaver())


class PipelineRunner:
    """
    Runs the stage graph for one PipelineConfig.

    Stage results (corpus, matrices, partitions, profiles) live on the
    runner; the graph state carries only statuses and artifact names.
    """

    def __init__(self, config: PipelineConfig, progress: bool = False):
        self.config = config
        self.progress = progress
        self.output_dir = Path(config.output_dir)
        self.cache = StageCache(self.output_dir)
        self.results: Dict[str, Any] = {}
        self.tables: Dict[str, Dict[str, Any]] = {}
        self.keys: Dict[str, str] = {}
        self.workflow = create_pipeline_workflow(self)
        logger.info("Pipeline runner ready (output: {})", self.output_dir)

    def _config_digest(self) -> str:
        return sha256_bytes(self.config.model_dump_json(exclude={"paths"}).encode("utf-8"))

    def _create_initial_state(self) -> PipelineState:
        return PipelineState(
            run_id=f"run-{self._config_digest()[:12]}",
            current_step=STAGES[0],
            completed_steps=[],
            errors=[],
            stage_reports=[],
            report={},
        )

    async def run(self) -> Dict[str, Any]:
        """
        Execute the pipeline.

        Returns:
            Run report (also written to run_report.json)
        """
        initial_state = self._create_initial_state()
        config = {"configurable": {"thread_id": initial_state["run_id"]}}
        final_state = await self.workflow.ainvoke(initial_state, config)
        return final_state["report"]

    # ===
    # Cache keys
    # ===

    def cache_key(self, stage: str) -> str:
        """sha256 over the stage name, code version, settings, upstream keys and input bytes."""
        payload: Dict[str, Any] = {
            "stage": stage,
            "version": __version__,
            "topics": list(self.config.topics),
            "seed": self.config.seed,
            "settings": {name: self.config.section(name) for name in SETTINGS[stage]},
            "upstream": {dep: self.keys[dep] for dep in DEPENDS[stage]},
        }
        if stage == "ingest":
            payload["corpus"] = _input_hash(Path(self.config.paths.corpus), "Corpus")
        elif stage == "lexicon":
            payload["dictionary"] = _input_hash(Path(self.config.paths.dictionary), "Dictionary")
        text = json.dumps(payload, sort_keys=True)
        return sha256_bytes(text.encode("utf-8"))

    # ===
    # Stage execution
    # ===

    async def run_stage(self, stage: str) -> Dict[str, Any]:
        """
        Run one stage (or reuse its cached output) and write its tables.

        Any exception becomes a StageError entry in the state's errors.
        """
        try:
            key = self.cache_key(stage)
            output = self.cache.load(stage, key)
            cache_hit = output is not None
            if output is None:
                logger.info("Stage {}: computing", stage)
                output = await getattr(self, f"_stage_{stage}")()
                for name, table in output.tables.items():
                    write_table(self.output_dir / name, table)
                self.cache.store(stage, key, output, list(output.tables))
            else:
                logger.info("Stage {}: cache hit", stage)

            self.results[stage] = output.result
            self.tables[stage] = output.tables
            self.keys[stage] = key
            return {
                "current_step": stage,
                "completed_steps": [stage],
                "stage_reports": [{
                    "stage": stage,
                    "status": "ok",
                    "cache_key": key,
                    "cache_hit": cache_hit,
                    "artifacts": sorted(output.tables),
                }],
            }
        except Exception as e:
            error = StageError(stage, e)
            logger.error(str(error))
            return {
                "current_step": stage,
                "errors": [str(error)],
                "stage_reports": [{"stage": stage, "status": "failed", "error": str(error)}],
            }

    async def _stage_ingest(self) -> StageOutput:
        corpus = await asyncio.to_thread(ingest_file, self.config.paths.corpus)
        return StageOutput(corpus, {"summary.csv": summarize(corpus).to_frame()})

    async def _stage_lexicon(self) -> StageOutput:
        settings = self.config.lexicon
        normalization = Normalization(fold_accents=settings.fold_accents)
        dictionary = load_dictionary(
            self.config.paths.dictionary,
            labels=self.config.topics,
            min_confidence=settings.min_confidence,
            normalization=normalization,
        )
        phrases = dictionary.phrases if settings.merge_phrases else ()
        dtm = await asyncio.to_thread(
            build_dtm, self.results["ingest"], settings.min_occurrences,
            normalization, phrases, settings.on_empty, self.progress,
        )
        restricted = restrict_to_dictionary(dtm, dictionary)

        vocabulary = pd.DataFrame({
            "term": list(dtm.cols),
            "occurrences": dtm.marginals.astype("int64"),
            "label": [dictionary.label_of(t) or "" for t in dtm.cols],
        })
        return StageOutput(
            {"dictionary": dictionary, "dtm": restricted},
            {"vocabulary.csv": vocabulary, "dtm.csv": restricted.to_frame()},
        )

    async def _stage_cooccur(self) -> StageOutput:
        lexicon = self.results["lexicon"]
        net = project_cooccurrence(lexicon["dtm"]).with_labels(lexicon["dictionary"])
        return StageOutput(net, {"cooccurrence.csv": net.to_frame()})

    async def _stage_backbone(self) -> StageOutput:
        settings = self.config.backbone
        net = self.results["cooccur"]
        backbone = extract_backbone(net, settings.alpha, settings.mode)
        sweep = backbone_sweep(net, settings.sweep, settings.mode)
        return StageOutput(backbone, {"backbone.csv": backbone.to_frame(), "backbone_sweep.csv": sweep})

    async def _stage_communities(self) -> StageOutput:
        settings = self.config.community
        net = self.results["backbone"].network()
        graph = net.to_networkx()
        labels = dict(net.labels)
        partitions = await detect_all(graph, settings.algorithms, settings.walk_length)
        reference = reference_partition(graph, labels)

        frames, summary = [], []
        for algorithm, partition in partitions.items():
            frame = partition.to_frame(reference_labels=labels)
            frame.insert(0, "algorithm", algorithm)
            frames.append(frame)
            summary.append({
                "algorithm": algorithm,
                "communities": partition.n_communities,
                "modularity": partition.modularity,
                "concordance": concordance(partition, reference),
            })
        summary.append({
            "algorithm": "reference",
            "communities": reference.n_communities,
            "modularity": reference.modularity,
            "concordance": 1.0,
        })
        return StageOutput(
            {"partitions": partitions, "reference": reference},
            {"communities.csv": pd.concat(frames, ignore_index=True),
             "community_summary.csv": pd.DataFrame(summary)},
        )

    async def _stage_label(self) -> StageOutput:
        lexicon = self.results["lexicon"]
        labels = label_posts(
            self.results["ingest"], lexicon["dtm"], lexicon["dictionary"], self.config.lexicon.label_mode
        )
        return StageOutput(labels, {
            "post_labels.csv": labels_to_frame(labels),
            "label_counts.csv": label_counts(labels, self.config.topics),
        })

    async def _stage_classify(self) -> StageOutput:
        settings = self.config.attribution
        topics = self.config.topics
        profiles = await asyncio.to_thread(
            classify_users, self.results["ingest"], self.results["label"],
            settings.threshold, topics, settings.eligible_category,
        )
        correlations = topic_correlations(profiles, topics, settings.restrict_polarized)
        correlations = correlations.reset_index().rename(columns={"index": "topic"})
        return StageOutput(profiles, {
            "users.csv": profiles_to_frame(profiles, topics),
            "polarization.csv": polarization_table(profiles, topics),
            "topic_correlations.csv": correlations,
            "engagement_by_topics.csv": engagement_by_topic_count(profiles, topics, settings.min_likes),
        })

    def _engagement_samples(self) -> Tuple[Dict, Dict]:
        corpus = self.results["ingest"]
        labels = self.results["label"]
        profiles = self.results["classify"]
        topics = self.config.topics

        posts: Dict[Tuple[str, str], List[int]] = {(t, m): [] for t in topics for m in POST_METRICS}
        for post in corpus.posts.values():
            topic = labels.get(post.post_id)
            if topic not in topics:
                continue
            posts[(topic, "likes")].append(len(post.like_events))
            posts[(topic, "comments")].append(len(post.comment_events))
            posts[(topic, "shares")].append(post.share_count)

        users: Dict[Tuple[str, str], List[int]] = {(t, m): [] for t in topics for m in USER_METRICS}
        for profile in profiles.values():
            if profile.polarization in topics:
                users[(profile.polarization, "likes")].append(profile.total_likes)
                users[(profile.polarization, "comments")].append(profile.total_comments)
        return posts, users

    def _bootstrap(self, samples: Mapping, fits) -> List[Optional[float]]:
        n = self.config.tailfit.bootstrap
        out: List[Optional[float]] = []
        for cell in fits:
            if cell.fit is None or n == 0:
                out.append(None)
                continue
            positive = [v for v in samples[(cell.group, cell.metric)] if v > 0]
            out.append(bootstrap_pvalue(positive, cell.fit, n, self.config.seed, self.progress))
        return out

    @staticmethod
    def _ccdf_table(samples: Mapping[Tuple[str, str], Sequence[int]]) -> pd.DataFrame:
        frames = [
            ccdf_frame([v for v in values if v > 0], group, metric)
            for (group, metric), values in samples.items()
            if any(v > 0 for v in values)
        ]
        if not frames:
            return pd.DataFrame(columns=["group", "metric", "x", "ccdf"])
        return pd.concat(frames, ignore_index=True)

    async def _stage_tailfit(self) -> StageOutput:
        post_samples, user_samples = self._engagement_samples()
        post_fits, user_fits = await asyncio.gather(fit_grid(post_samples), fit_grid(user_samples))

        post_frame = fits_to_frame(post_fits)
        user_frame = fits_to_frame(user_fits)
        if self.config.tailfit.bootstrap > 0:
            post_frame["p_value"] = await asyncio.to_thread(self._bootstrap, post_samples, post_fits)
            user_frame["p_value"] = await asyncio.to_thread(self._bootstrap, user_samples, user_fits)

        return StageOutput(
            {"posts": post_fits, "users": user_fits},
            {
                "post_fits.csv": post_frame,
                "post_fits_wide.csv": fits_to_wide(post_frame, POST_METRICS),
                "user_fits.csv": user_frame,
                "user_fits_wide.csv": fits_to_wide(user_frame, USER_METRICS),
                "ccdf_posts.csv": self._ccdf_table(post_samples),
                "ccdf_users.csv": self._ccdf_table(user_samples),
            },
        )

    def _group_tests(self, unit: str, samples: Mapping) -> List[Dict[str, Any]]:
        settings = self.config.survival
        groups = list(samples)
        rows = []

        def add(selected: List[str], method: str) -> None:
            result = gehan_wilcoxon(
                [samples[g] for g in selected], settings.weighting, method,
                settings.n_permutations, self.config.seed,
            )
            rows.append({
                "unit": unit,
                "groups": "|".join(selected),
                "statistic": result.statistic,
                "df": result.df,
                "p_value": result.p_value,
                "weighting": result.weighting,
                "method": result.method,
            })

        if len(groups) > 2:
            add(groups, "asymptotic")
        for i, a in enumerate(groups):
            for b in groups[i + 1:]:
                add([a, b], settings.method)
        return rows

    def _survival_tables(self, unit: str, samples: Mapping) -> Tuple[pd.DataFrame, List[Dict], List[Dict]]:
        curves = {topic: kaplan_meier(sample) for topic, sample in samples.items()}
        km = pd.concat([c.to_frame() for c in curves.values()], ignore_index=True)
        summary = [
            {"unit": unit, "group": topic, "n": len(samples[topic]),
             "events": samples[topic].n_events, "median": curve.median}
            for topic, curve in curves.items()
        ]
        tests = self._group_tests(unit, samples) if len(samples) >= 2 else []
        return km, summary, tests

    async def _stage_survival(self) -> StageOutput:
        settings = self.config.survival
        corpus = self.results["ingest"]
        labels = self.results["label"]
        topics = self.config.topics

        post_samples = lifetimes_by_topic(
            corpus, labels, topics, unit="post",
            censor_horizon=settings.censor_horizon, exclude_zero=settings.exclude_zero,
        )
        user_samples = lifetimes_by_topic(
            corpus, labels, topics, unit="user", profiles=self.results["classify"],
            censor_horizon=settings.censor_horizon, exclude_zero=settings.exclude_zero,
        )
        km_posts, summary_posts, tests_posts = await asyncio.to_thread(self._survival_tables, "post", post_samples)
        km_users, summary_users, tests_users = await asyncio.to_thread(self._survival_tables, "user", user_samples)

        return StageOutput(
            {"posts": post_samples, "users": user_samples},
            {
                "km_posts.csv": km_posts,
                "km_users.csv": km_users,
                "km_summary.csv": pd.DataFrame(summary_posts + summary_users),
                "survival_tests.csv": pd.DataFrame(tests_posts + tests_users),
            },
        )

    async def _stage_pom(self) -> StageOutput:
        settings = self.config.pom
        K = settings.K or len(self.config.topics)
        x, y = mobility_observations(self.results["classify"], self.config.attribution.min_likes)
        fit = await asyncio.to_thread(
            fit_pom, x, y, K, settings.log_transform, settings.max_iter, settings.tol, ("likes",),
        )
        _, predicted = predict_category(fit, x)
        delta = absolute_distance_coefficient(predicted, y, K)
        diagnostics = fit_diagnostics(fit, x, y)
        report = {
            "fit": fit.to_dict(),
            "odds_ratio": odds_ratio(fit).to_dict(),
            "absolute_distance_coefficient": delta,
            "diagnostics": diagnostics.to_dict(),
        }
        return StageOutput(fit, {"pom.json": report, "pom_summary.csv": fit.summary_table()})

    # ===
    # Reporting
    # ===

    def _bundle(self) -> Dict[str, Any]:
        bundle: Dict[str, Any] = {}
        for stage in STAGES:
            tables = self.tables.get(stage)
            if tables is None:
                continue
            bundle[stage] = {
                Path(name).stem: to_jsonable(table)
                for name, table in sorted(tables.items())
                if name not in BUNDLE_EXCLUDE
            }
        return bundle

    async def finalize(self, state: PipelineState) -> Dict[str, Any]:
        """Write the JSON bundle, the run report and the manifest."""
        by_stage = {r["stage"]: r for r in state["stage_reports"]}
        stages = [by_stage.get(s, {"stage": s, "status": "skipped"}) for s in STAGES]
        ok = [r for r in stages if r["status"] == "ok"]
        status = "failed" if state["errors"] else "ok"

        write_json(self.output_dir / BUNDLE_NAME, self._bundle())
        report = {
            "run_id": state["run_id"],
            "version": __version__,
            "status": status,
            "stages": stages,
            "recomputed": sum(1 for r in ok if not r["cache_hit"]),
            "cache_hits": sum(1 for r in ok if r["cache_hit"]),
            "errors": list(state["errors"]),
            "config": self.config.model_dump(mode="json", exclude={"paths"}),
            "bundle": BUNDLE_NAME,
            "manifest": MANIFEST_NAME,
        }
        write_json(self.output_dir / RUN_REPORT_NAME, report)
        write_manifest(self.output_dir)

        if status == "ok":
            logger.info("Pipeline finished: {} stages, {} recomputed", len(ok), report["recomputed"])
        else:
            logger.error("Pipeline failed: {}", "; ".join(state["errors"]))
        return {"current_step": "completed" if status == "ok" else "failed", "report": report}


async def arun_pipeline(config: PipelineConfig, progress: bool = False) -> Dict[str, Any]:
    """Run the pipeline inside an existing event loop."""
    return await PipelineRunner(config, progress).run()


def run_pipeline(config: PipelineConfig, progress: bool = False) -> Dict[str, Any]:
    """
    Run every stage for ``config``.

    Returns:
        Run report with per-stage status, cache keys and artifact names;
        ``status`` is "failed" when any stage raised
    """
    return asyncio.run(arun_pipeline(config, progress))
