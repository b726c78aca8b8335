"""
Synthetic Corpus Generator

Builds a corpus with planted ground truth for every downstream estimator:

- Posts: topic posts whose messages carry a majority of their topic's
  dictionary terms, tie posts (two topics, equal counts), plain posts
  (filler words only) and posts without a message
- Users: topic users draw a like total x from a power law and the number of
  topics they like from a planted proportional odds model; single-topic users
  are the polarized ones, spread over topics by exact largest-remainder
  shares. Background users like only untopical posts.
- Likes and comments land on posts in proportion to heavy-tailed per-post
  weights; share counts are drawn directly from the planted laws.
- Commenting users comment on one topic between T0 and T0 + L with
  L ~ Exp(topic mean).

Every random draw comes from a stream derived from (seed, entity, index), so
output depends only on the spec and the seed.
"""

from pathlib import Path
from typing import Dict, List, Mapping, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from scipy.special import expit
from tqdm import tqdm

from ..corpus.ingest import dump_corpus
from ..corpus.models import Corpus, EventRecord, Post, PostRecord
from ..errors import GeneratorSpecError
from ..lexicon.dictionary import TermDictionary
from ..rng import derive_rng
from ..tailfit.powerlaw import sample_discrete_power_law
from .spec import GeneratorLedger, GeneratorSpec, PowerLawParams

TERM_PREFIX_LENGTH = 3
FOREIGN_TERM_PROBABILITY = 0.3
MAX_POLARIZED_SHARE = 0.95


def largest_remainder(total: int, shares: Mapping[str, float], order: Sequence[str]) -> Dict[str, int]:
    """Split ``total`` into integers proportional to ``shares`` (Hamilton method)."""
    weights = np.array([float(shares[k]) for k in order])
    quotas = total * weights / weights.sum()
    base = np.floor(quotas).astype(np.int64)
    remainder = total - int(base.sum())
    fractions = quotas - base
    for idx in sorted(range(len(order)), key=lambda i: (-fractions[i], i))[:remainder]:
        base[idx] += 1
    return {k: int(n) for k, n in zip(order, base)}


def topic_terms(spec: GeneratorSpec) -> Dict[str, List[str]]:
    """Planted dictionary terms per topic, e.g. env001, env002, ..."""
    return {
        topic: [f"{topic[:TERM_PREFIX_LENGTH]}{i + 1:03d}" for i in range(spec.dictionary_sizes[topic])]
        for topic in spec.topics
    }


def planted_dictionary(spec: GeneratorSpec) -> TermDictionary:
    pairs = [(term, topic) for topic, terms in topic_terms(spec).items() for term in terms]
    return TermDictionary.from_pairs(pairs, labels=spec.topics)


def scaled_law(params: PowerLawParams, scale: float) -> PowerLawParams:
    return PowerLawParams(alpha=params.alpha, x_min=max(2, int(round(params.x_min * scale))))


def draw_mixture(law: PowerLawParams, tail_fraction: float, rng: np.random.Generator, low: int = 1) -> int:
    """Body uniform on [low, x_min), tail from the power law."""
    if rng.random() < tail_fraction or law.x_min <= low:
        return int(sample_discrete_power_law(law.alpha, law.x_min, 1, rng)[0])
    return int(rng.integers(low, law.x_min))


def _split_likes(total: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """At least one like per topic, no topic at or above the polarization share."""
    counts = np.ones(k, dtype=np.int64)
    counts += rng.multinomial(total - k, np.full(k, 1.0 / k))
    while counts.max() >= MAX_POLARIZED_SHARE * total:
        counts[int(np.argmax(counts))] -= 1
        counts[int(np.argmin(counts))] += 1
    return counts


def _pick_posts(pool: np.ndarray, weights: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    p = weights / weights.sum()
    return rng.choice(pool, size=count, replace=count > len(pool), p=p)


class CorpusGenerator:
    """
    Generates one corpus and its ledger from a spec and a seed.

    Usage:
        corpus, ledger = CorpusGenerator(GeneratorSpec.reference_shaped(0.01), seed=7).generate()
    """

    def __init__(self, spec: GeneratorSpec, seed: int = 7, progress: bool = False):
        spec.check()
        self.spec = spec
        self.seed = int(seed)
        self.progress = progress
        self.terms = topic_terms(spec)
        self.filler = [f"w{i + 1:04d}" for i in range(spec.filler_vocabulary)]
        self.laws = {
            topic: {m: scaled_law(p, spec.engagement_scale) for m, p in metrics.items()}
            for topic, metrics in spec.post_engagement.items()
        }

    # -------------------------------------------------------------------------
    # posts
    # -------------------------------------------------------------------------

    def _post_kinds(self) -> List[str]:
        spec = self.spec
        n = spec.n_posts
        n_empty = int(round(spec.empty_message_fraction * n))
        n_labeled = min(int(round(spec.labeled_fraction * n)), n - n_empty)
        n_tie = min(int(round(spec.tie_fraction * n)), n - n_empty - n_labeled)
        n_plain = n - n_empty - n_labeled - n_tie
        per_topic = largest_remainder(n_labeled, spec.topic_post_shares, spec.topics)
        if spec.n_topic_users > 0 and any(c == 0 for c in per_topic.values()):
            raise GeneratorSpecError("n_posts", f"too few posts to give every topic one: {per_topic}")
        if spec.n_users > spec.n_topic_users and n_tie + n_plain + n_empty == 0:
            raise GeneratorSpecError("labeled_fraction", "background users need untopical posts")
        kinds = [t for t in spec.topics for _ in range(per_topic[t])]
        kinds += ["tie"] * n_tie + ["plain"] * n_plain + ["empty"] * n_empty
        order = derive_rng(self.seed, "post-kinds").permutation(len(kinds))
        return [kinds[i] for i in order]

    def _message(self, kind: str, rng: np.random.Generator) -> str:
        spec = self.spec
        if kind == "empty":
            return ""
        lo, hi = spec.filler_words
        words = list(rng.choice(self.filler, size=max(1 if kind == "plain" else 0, int(rng.integers(lo, hi + 1)))))
        if kind == "tie":
            a, b = rng.choice(len(spec.topics), size=2, replace=False)
            for t in (spec.topics[a], spec.topics[b]):
                words += list(rng.choice(self.terms[t], size=2, replace=False))
        elif kind != "plain":
            m = int(rng.integers(spec.terms_per_post[0], spec.terms_per_post[1] + 1))
            foreign = 1 if rng.random() < FOREIGN_TERM_PROBABILITY else 0
            words += list(rng.choice(self.terms[kind], size=m - foreign, replace=False))
            if foreign:
                others = [t for t in spec.topics if t != kind]
                other = others[int(rng.integers(len(others)))]
                words.append(str(rng.choice(self.terms[other])))
        rng.shuffle(words)
        return " ".join(str(w) for w in words)

    def _generate_posts(self, kinds: List[str]):
        spec = self.spec
        rows = []
        for i, kind in enumerate(tqdm(kinds, desc="Posts", disable=not self.progress)):
            rng = derive_rng(self.seed, "post", i)
            laws = self.laws.get(kind)
            if laws is not None:
                like_w = draw_mixture(laws["likes"], spec.tail_fraction, rng)
                comment_w = draw_mixture(laws["comments"], spec.tail_fraction, rng)
                shares = draw_mixture(laws["shares"], spec.tail_fraction, rng, low=0)
            else:
                like_w = draw_mixture(spec.background_likes, spec.tail_fraction, rng)
                comment_w = 1
                shares = draw_mixture(spec.background_likes, spec.tail_fraction, rng, low=0)
            rows.append({
                "post_id": f"p{i + 1:06d}",
                "page_id": f"page{int(rng.integers(spec.n_pages)) + 1:02d}",
                "created_at": int(rng.integers(spec.window_start, spec.window_end)),
                "message": self._message(kind, rng),
                "kind": kind,
                "like_weight": float(like_w),
                "comment_weight": float(comment_w),
                "shares": shares,
            })
        return rows

    # -------------------------------------------------------------------------
    # users
    # -------------------------------------------------------------------------

    def _topic_counts(self, x: int, rng: np.random.Generator) -> int:
        spec = self.spec
        cumulative = expit(np.asarray(spec.pom_intercepts) - spec.pom_beta * x)
        proba = np.diff(np.concatenate([[0.0], cumulative, [1.0]]))
        return min(int(rng.choice(len(proba), p=proba)) + 1, x)

    def generate(self) -> Tuple[Corpus, GeneratorLedger]:
        """Build the corpus and its ledger."""
        spec = self.spec
        topics = list(spec.topics)
        kinds = self._post_kinds()
        rows = self._generate_posts(kinds)
        likes: List[List[Tuple[str, int]]] = [[] for _ in rows]
        comments: List[List[Tuple[str, int]]] = [[] for _ in rows]

        pools = {t: np.array([i for i, r in enumerate(rows) if r["kind"] == t], dtype=np.int64) for t in topics}
        background_pool = np.array([i for i, r in enumerate(rows) if r["kind"] not in pools], dtype=np.int64)
        like_w = np.array([r["like_weight"] for r in rows])
        comment_w = np.array([r["comment_weight"] for r in rows])

        # Step 1: like totals and topic counts of topic users
        n_topic = spec.n_topic_users
        user_ids = [f"u{i + 1:06d}" for i in range(spec.n_users)]
        totals: List[int] = []
        k_values: List[int] = []
        for i in range(n_topic):
            rng = derive_rng(self.seed, "user-size", i)
            x = int(sample_discrete_power_law(spec.user_likes.alpha, spec.user_likes.x_min, 1, rng)[0])
            totals.append(x)
            k_values.append(self._topic_counts(x, rng))

        # Step 2: exact polarized shares over the single-topic users
        singles = [i for i in range(n_topic) if k_values[i] == 1]
        polarized_counts = largest_remainder(len(singles), spec.user_topic_shares, topics)
        assigned = [t for t in topics for _ in range(polarized_counts[t])]
        assigned = [assigned[j] for j in derive_rng(self.seed, "polarized-topics").permutation(len(assigned))]
        polarized = {user_ids[i]: t for i, t in zip(singles, assigned)}

        # Step 3: likes and comments of topic users
        lifetimes: Dict[str, float] = {}
        lifetime_topics: Dict[str, str] = {}
        topics_liked: Dict[str, int] = {}
        span = spec.window_end - spec.window_start
        for i in tqdm(range(n_topic), desc="Topic users", disable=not self.progress):
            user = user_ids[i]
            rng = derive_rng(self.seed, "user", i)
            x, k = totals[i], k_values[i]
            if k == 1:
                chosen = [polarized[user]]
                split = np.array([x])
            else:
                chosen = [topics[j] for j in sorted(rng.choice(len(topics), size=k, replace=False))]
                split = _split_likes(x, k, rng)
            topics_liked[user] = k
            for topic, count in zip(chosen, split):
                for post in _pick_posts(pools[topic], like_w[pools[topic]], int(count), rng):
                    likes[post].append((user, int(rng.integers(spec.window_start, spec.window_end))))

            if rng.random() >= spec.commenter_fraction:
                continue
            n_comments = int(sample_discrete_power_law(spec.user_comments.alpha, spec.user_comments.x_min, 1, rng)[0])
            n_comments = max(2, n_comments)
            topic = chosen[int(np.argmax(split))]
            duration = min(int(round(rng.exponential(spec.lifetime_means[topic]))), span - 1)
            t_first = int(rng.integers(spec.window_start, spec.window_end - duration))
            t_last = t_first + duration
            times = [t_first, t_last] + [int(t) for t in rng.integers(t_first, t_last + 1, size=n_comments - 2)]
            for post, t in zip(_pick_posts(pools[topic], comment_w[pools[topic]], n_comments, rng), times):
                comments[post].append((user, t))
            lifetimes[user] = float(duration)
            lifetime_topics[user] = topic

        # Step 4: background likes on untopical posts
        for i in tqdm(range(n_topic, spec.n_users), desc="Background users", disable=not self.progress):
            rng = derive_rng(self.seed, "user", i)
            x = int(sample_discrete_power_law(spec.background_likes.alpha, spec.background_likes.x_min, 1, rng)[0])
            for post in _pick_posts(background_pool, like_w[background_pool], x, rng):
                likes[post].append((user_ids[i], int(rng.integers(spec.window_start, spec.window_end))))

        # Step 5: assemble records; a post exists before its first event
        posts: List[Post] = []
        counts = {"pages": 0, "posts": 0, "likes": 0, "comments": 0, "shares": 0, "likers": 0, "commenters": 0}
        pages = set()
        likers = set()
        commenters = set()
        for i, row in enumerate(rows):
            events = [t for _, t in likes[i]] + [t for _, t in comments[i]]
            created_at = min([row["created_at"]] + events)
            record = PostRecord(
                post_id=row["post_id"],
                page_id=row["page_id"],
                created_at=created_at,
                message=row["message"],
                likes=[EventRecord(user=u, t=t) for u, t in likes[i]],
                comments=[EventRecord(user=u, t=t) for u, t in comments[i]],
                shares=row["shares"],
                category=spec.page_category,
            )
            posts.append(Post.from_record(record))
            pages.add(row["page_id"])
            likers.update(u for u, _ in likes[i])
            commenters.update(u for u, _ in comments[i])
            counts["likes"] += len(likes[i])
            counts["comments"] += len(comments[i])
            counts["shares"] += row["shares"]
        counts.update(pages=len(pages), posts=len(rows), likers=len(likers), commenters=len(commenters))

        corpus = Corpus.from_posts(posts)
        post_topics = {
            row["post_id"]: (row["kind"] if row["kind"] in pools else "unlabeled") for row in rows
        }
        ledger = GeneratorLedger(
            seed=self.seed,
            spec=spec,
            dictionary={term: topic for topic, terms in self.terms.items() for term in terms},
            post_topics=post_topics,
            post_counts={t: int(len(pools[t])) for t in topics},
            polarized_users=polarized,
            polarized_counts=polarized_counts,
            topics_liked=topics_liked,
            user_lifetimes=lifetimes,
            user_lifetime_topics=lifetime_topics,
            post_weight_laws=self.laws,
            pom_intercepts=list(spec.pom_intercepts),
            pom_beta=spec.pom_beta,
            counts=counts,
        )
        logger.info(
            "Generated {} posts, {} likes, {} comments from {} users (seed {})",
            counts["posts"], counts["likes"], counts["comments"], counts["likers"], self.seed,
        )
        return corpus, ledger


def generate_corpus(spec: GeneratorSpec, seed: int = 7, progress: bool = False) -> Tuple[Corpus, GeneratorLedger]:
    """Generate a corpus and its ledger; see CorpusGenerator."""
    return CorpusGenerator(spec, seed=seed, progress=progress).generate()


def write_synthetic(
    spec: GeneratorSpec,
    out_dir: Union[str, Path],
    seed: int = 7,
    progress: bool = False,
    corpus_name: str = "corpus.jsonl",
) -> Dict[str, Path]:
    """
    Write corpus.jsonl, dictionary.csv and ledger.json into ``out_dir``.

    Returns:
        Artifact name -> path
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus, ledger = generate_corpus(spec, seed=seed, progress=progress)

    paths = {
        "corpus": out / corpus_name,
        "dictionary": out / "dictionary.csv",
        "ledger": out / "ledger.json",
    }
    with open(paths["corpus"], "w", encoding="utf-8") as f:
        dump_corpus(corpus, f)
    frame = planted_dictionary(spec).to_frame()
    frame["confidence"] = 1.0
    frame.to_csv(paths["dictionary"], index=False, lineterminator="\n")
    paths["ledger"].write_text(ledger.model_dump_json(indent=2), encoding="utf-8")
    logger.info("Synthetic corpus written to {}", out)
    return paths


def load_ledger(path: Union[str, Path]) -> GeneratorLedger:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Ledger file not found: {path}")
    return GeneratorLedger.model_validate_json(path.read_text(encoding="utf-8"))