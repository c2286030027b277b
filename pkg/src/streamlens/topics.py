"""Topic modeling and account similarity search.

Two distinct corpora by design: topic models run over per-account hashtag
documents, while similarity search runs over a document-term matrix of all
account text. The LDA sampler is written out longhand (collapsed Gibbs)
because reproducibility matters more than speed here: a fixed seed gives a
bit-identical model.
"""
from __future__ import annotations

import csv
import re
import warnings
from collections import Counter, defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from random import Random

import numpy as np
from scipy import sparse

from .ingest import TweetRecord

__all__ = [
    "HashtagDocument",
    "TopicModel",
    "TopicSummary",
    "DocTermMatrix",
    "ExpansionSession",
    "build_hashtag_documents",
    "lda_fit",
    "topic_report",
    "build_dtm",
    "cosine_similarity",
    "bot_match_query",
    "new_session",
    "expand",
    "Accept",
    "Reject",
    "Step",
    "write_topic_model",
    "write_dtm",
    "read_dtm",
]

_URL = re.compile(r"https?://\S+|www\.\S+", re.IGNORECASE)
_WORD = re.compile(r"\w+", re.UNICODE)


@dataclass(frozen=True)
class HashtagDocument:
    """One account's hashtag usage, expanded and sorted for determinism."""

    account_id: str
    tokens: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.tokens:
            raise ValueError("hashtag documents must hold at least one token")


def build_hashtag_documents(
    records: Sequence[TweetRecord], lang_filter: str | None = None
) -> list[HashtagDocument]:
    """Per-account hashtag multisets from tweets passing the language filter.

    Accounts without hashtags are absent. Documents come back sorted by
    account id with tokens sorted inside each document.
    """
    per_account: dict[str, list[str]] = defaultdict(list)
    for r in records:
        if lang_filter is not None and r.lang != lang_filter:
            continue
        per_account[r.author_id].extend(r.hashtags)
    return [
        HashtagDocument(account_id=a, tokens=tuple(sorted(tags)))
        for a, tags in sorted(per_account.items())
        if tags
    ]


@dataclass(frozen=True)
class TopicModel:
    """A fitted topic model: phi rows are topics, theta rows are documents."""

    k: int
    alpha: float
    beta: float
    iterations: int
    seed: int
    vocab: tuple[str, ...]
    doc_ids: tuple[str, ...]
    phi: tuple[tuple[float, ...], ...]
    theta: tuple[tuple[float, ...], ...]


def lda_fit(
    docs: Sequence[HashtagDocument],
    k: int,
    alpha: float | None = None,
    beta: float = 0.01,
    iterations: int = 1000,
    seed: int = 0,
) -> TopicModel:
    """Collapsed Gibbs sampling with symmetric priors.

    alpha defaults to 50/k. phi and theta come from the final-state counts
    with prior smoothing, so both are strictly positive and row-stochastic.
    Identical inputs and seed give a bit-identical model.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not docs:
        raise ValueError("no documents to fit")
    if alpha is None:
        alpha = 50.0 / k
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    if iterations < 0:
        raise ValueError("iterations must be >= 0")

    vocab = tuple(sorted({tok for d in docs for tok in d.tokens}))
    if not vocab:
        raise ValueError("empty vocabulary")
    if k > len(vocab):
        warnings.warn(
            f"k={k} exceeds vocabulary size {len(vocab)}; proceeding anyway",
            stacklevel=2,
        )
    vocab_index = {tok: i for i, tok in enumerate(vocab)}
    v = len(vocab)

    # Flattened corpus: per position a (doc, word) pair plus its topic.
    doc_of: list[int] = []
    word_of: list[int] = []
    for d, doc in enumerate(docs):
        for tok in doc.tokens:
            doc_of.append(d)
            word_of.append(vocab_index[tok])

    rng = Random(seed)
    n_positions = len(doc_of)
    z = [rng.randrange(k) for _ in range(n_positions)]

    n_dt = [[0] * k for _ in docs]
    n_wt = [[0] * k for _ in range(v)]
    n_t = [0] * k
    for pos in range(n_positions):
        t = z[pos]
        n_dt[doc_of[pos]][t] += 1
        n_wt[word_of[pos]][t] += 1
        n_t[t] += 1

    v_beta = v * beta
    weights = [0.0] * k
    for _ in range(iterations):
        for pos in range(n_positions):
            d, w, t = doc_of[pos], word_of[pos], z[pos]
            row_d = n_dt[d]
            row_w = n_wt[w]
            row_d[t] -= 1
            row_w[t] -= 1
            n_t[t] -= 1

            total = 0.0
            for tt in range(k):
                total += (
                    (row_w[tt] + beta) / (n_t[tt] + v_beta) * (row_d[tt] + alpha)
                )
                weights[tt] = total
            u = rng.random() * total
            t = 0
            while weights[t] < u:
                t += 1

            z[pos] = t
            row_d[t] += 1
            row_w[t] += 1
            n_t[t] += 1

    phi = tuple(
        tuple((n_wt[w][t] + beta) / (n_t[t] + v_beta) for w in range(v))
        for t in range(k)
    )
    theta = tuple(
        tuple(
            (n_dt[d][t] + alpha) / (len(docs[d].tokens) + k * alpha)
            for t in range(k)
        )
        for d in range(len(docs))
    )
    return TopicModel(
        k=k,
        alpha=alpha,
        beta=beta,
        iterations=iterations,
        seed=seed,
        vocab=vocab,
        doc_ids=tuple(d.account_id for d in docs),
        phi=phi,
        theta=theta,
    )


@dataclass(frozen=True)
class TopicSummary:
    topic: int
    top_words: tuple[str, ...]
    account_count: int
    bot_percentage: float | None


def topic_report(
    model: TopicModel,
    scores: Mapping[str, float],
    t: float,
    top_words: int = 10,
) -> list[TopicSummary]:
    """Per-topic top words, assigned accounts, and bot percentage.

    An account goes to the argmax of its theta row (ties to the lowest
    topic index); the bot percentage is over its scored members.
    """
    assigned: dict[int, list[str]] = defaultdict(list)
    for account, row in zip(model.doc_ids, model.theta):
        best = max(range(model.k), key=lambda tt: (row[tt], -tt))
        assigned[best].append(account)

    out = []
    for topic in range(model.k):
        members = assigned.get(topic, [])
        ranked = sorted(
            range(len(model.vocab)),
            key=lambda w: (-model.phi[topic][w], model.vocab[w]),
        )[:top_words]
        scored = [scores[a] for a in members if a in scores]
        pct = None
        if scored:
            pct = sum(1 for s in scored if s >= t) / len(scored)
        out.append(
            TopicSummary(
                topic=topic,
                top_words=tuple(model.vocab[w] for w in ranked),
                account_count=len(members),
                bot_percentage=pct,
            )
        )
    return out


@dataclass(eq=False)
class DocTermMatrix:
    """Account-by-token counts over the top-V corpus tokens (CSR)."""

    matrix: sparse.csr_matrix
    account_ids: tuple[str, ...]
    vocab: tuple[str, ...]
    zero_rows: tuple[str, ...]
    _row_index: dict[str, int] = field(init=False, repr=False)
    _normalized: sparse.csr_matrix | None = field(
        init=False, repr=False, default=None
    )

    def __post_init__(self) -> None:
        self._row_index = {a: i for i, a in enumerate(self.account_ids)}

    def row_of(self, account_id: str) -> int:
        if account_id not in self._row_index:
            raise KeyError(f"unknown account {account_id!r}")
        return self._row_index[account_id]

    def normalized(self) -> sparse.csr_matrix:
        """Rows scaled to unit L2 norm; zero rows stay zero."""
        if self._normalized is None:
            norms = np.sqrt(np.asarray(self.matrix.multiply(self.matrix).sum(axis=1)))
            norms = norms.ravel()
            inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
            self._normalized = (sparse.diags(inv) @ self.matrix).tocsr()
        return self._normalized


def tokenize_text(text: str) -> list[str]:
    """Case-folded Unicode word tokens with URLs removed first."""
    return _WORD.findall(_URL.sub(" ", text).casefold())


def build_dtm(
    records: Sequence[TweetRecord],
    v: int = 4000,
    lang_filter: str | None = None,
) -> DocTermMatrix:
    """Aggregate text per account and count the top-v corpus tokens.

    Frequency ties at the vocabulary boundary break lexicographically.
    Accounts whose text holds no in-vocabulary token keep an all-zero row
    and are listed in ``zero_rows``.
    """
    if v < 1:
        raise ValueError("vocabulary cap must be >= 1")
    per_account: dict[str, Counter[str]] = defaultdict(Counter)
    corpus_counts: Counter[str] = Counter()
    for r in records:
        if lang_filter is not None and r.lang != lang_filter:
            continue
        tokens = tokenize_text(r.text)
        per_account[r.author_id].update(tokens)
        corpus_counts.update(tokens)

    vocab = tuple(
        tok
        for tok, _ in sorted(corpus_counts.items(), key=lambda kv: (-kv[1], kv[0]))[:v]
    )
    vocab_index = {tok: i for i, tok in enumerate(vocab)}
    account_ids = tuple(sorted(per_account))

    rows: list[int] = []
    cols: list[int] = []
    data: list[float] = []
    zero_rows = []
    for i, account in enumerate(account_ids):
        hit = False
        for tok, count in per_account[account].items():
            j = vocab_index.get(tok)
            if j is not None:
                rows.append(i)
                cols.append(j)
                data.append(float(count))
                hit = True
        if not hit:
            zero_rows.append(account)

    matrix = sparse.csr_matrix(
        (data, (rows, cols)), shape=(len(account_ids), len(vocab)), dtype=np.float64
    )
    return DocTermMatrix(
        matrix=matrix,
        account_ids=account_ids,
        vocab=vocab,
        zero_rows=tuple(zero_rows),
    )


def cosine_similarity(dtm: DocTermMatrix, a: str, b: str) -> float:
    """dot(a,b)/(|a||b|); zero-norm rows give 0 (they appear in dtm.zero_rows)."""
    norm = dtm.normalized()
    ra, rb = dtm.row_of(a), dtm.row_of(b)
    return float(norm[ra].multiply(norm[rb]).sum())


def bot_match_query(
    dtm: DocTermMatrix, seed: str, top_n: int
) -> list[tuple[str, float]]:
    """Nearest accounts to the seed by cosine similarity.

    The seed itself is excluded; similarity ties order by account id.
    """
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    norm = dtm.normalized()
    seed_row = norm[dtm.row_of(seed)]
    sims = np.asarray((norm @ seed_row.T).todense()).ravel()
    ranked = sorted(
        (
            (account, float(sims[i]))
            for i, account in enumerate(dtm.account_ids)
            if account != seed
        ),
        key=lambda kv: (-kv[1], kv[0]),
    )
    return ranked[:top_n]


@dataclass(frozen=True)
class Accept:
    ids: tuple[str, ...]


@dataclass(frozen=True)
class Reject:
    ids: tuple[str, ...]


@dataclass(frozen=True)
class Step:
    top_n: int = 20


@dataclass(frozen=True)
class ExpansionSession:
    """State of one analyst-driven similarity expansion.

    The frontier holds candidates ranked by maximum similarity to any seed
    or accepted account; accept/reject only ever move frontier members, and
    the frontier never overlaps seeds, accepted, or rejected.
    """

    dtm: DocTermMatrix
    seed_accounts: frozenset[str]
    accepted: frozenset[str] = frozenset()
    rejected: frozenset[str] = frozenset()
    frontier: tuple[tuple[str, float], ...] = ()
    round: int = 0


def new_session(dtm: DocTermMatrix, seed_accounts: Iterable[str]) -> ExpansionSession:
    seeds = frozenset(seed_accounts)
    if not seeds:
        raise ValueError("a session needs at least one seed account")
    for account in seeds:
        dtm.row_of(account)  # raises on unknown accounts
    return ExpansionSession(dtm=dtm, seed_accounts=seeds)


def expand(session: ExpansionSession, action: Accept | Reject | Step) -> ExpansionSession:
    """Apply one session action, returning the new session state.

    step ranks every account outside seeds/accepted/rejected by its best
    similarity to the reference set (seeds plus accepted) and keeps top_n;
    zero-similarity candidates still rank, so repeated rejection drains a
    finite corpus. accept/reject require their ids to be frontier members.
    """
    if isinstance(action, (Accept, Reject)):
        frontier_ids = {a for a, _ in session.frontier}
        outside = [i for i in action.ids if i not in frontier_ids]
        if outside:
            verb = "accept" if isinstance(action, Accept) else "reject"
            raise ValueError(f"cannot {verb} accounts outside the frontier: {outside[:3]}")
        moved = set(action.ids)
        remaining = tuple((a, s) for a, s in session.frontier if a not in moved)
        if isinstance(action, Accept):
            return ExpansionSession(
                dtm=session.dtm,
                seed_accounts=session.seed_accounts,
                accepted=session.accepted | moved,
                rejected=session.rejected,
                frontier=remaining,
                round=session.round,
            )
        return ExpansionSession(
            dtm=session.dtm,
            seed_accounts=session.seed_accounts,
            accepted=session.accepted,
            rejected=session.rejected | moved,
            frontier=remaining,
            round=session.round,
        )

    if not isinstance(action, Step):
        raise TypeError(f"unknown session action {action!r}")
    if action.top_n < 1:
        raise ValueError("top_n must be >= 1")

    dtm = session.dtm
    norm = dtm.normalized()
    references = sorted(session.seed_accounts | session.accepted)
    excluded = session.seed_accounts | session.accepted | session.rejected
    candidates = [
        (i, a) for i, a in enumerate(dtm.account_ids) if a not in excluded
    ]
    if candidates:
        ref_rows = norm[[dtm.row_of(a) for a in references]]
        cand_rows = norm[[i for i, _ in candidates]]
        best = np.asarray((cand_rows @ ref_rows.T).todense()).max(axis=1).ravel()
        ranked = sorted(
            ((a, float(best[j])) for j, (_, a) in enumerate(candidates)),
            key=lambda kv: (-kv[1], kv[0]),
        )[: action.top_n]
    else:
        ranked = []
    return ExpansionSession(
        dtm=dtm,
        seed_accounts=session.seed_accounts,
        accepted=session.accepted,
        rejected=session.rejected,
        frontier=tuple(ranked),
        round=session.round + 1,
    )


def write_topic_model(model: TopicModel, directory: str | Path) -> None:
    """phi/theta as CSV matrices plus vocabulary and document-id files."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / "phi.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        for row in model.phi:
            writer.writerow([f"{x:.17g}" for x in row])
    with open(directory / "theta.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        for row in model.theta:
            writer.writerow([f"{x:.17g}" for x in row])
    with open(directory / "vocab.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "token"])
        for i, tok in enumerate(model.vocab):
            writer.writerow([i, tok])
    with open(directory / "docs.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "account_id"])
        for i, account in enumerate(model.doc_ids):
            writer.writerow([i, account])
    meta = [
        f"k={model.k}",
        f"alpha={model.alpha!r}",
        f"beta={model.beta!r}",
        f"iterations={model.iterations}",
        f"seed={model.seed}",
    ]
    (directory / "model.txt").write_text("\n".join(meta) + "\n", encoding="utf-8")


def write_dtm(dtm: DocTermMatrix, directory: str | Path, stem: str = "dtm") -> None:
    """Sparse triplet CSV plus row/column id sidecars."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    coo = dtm.matrix.tocoo()
    with open(directory / f"{stem}_triplets.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "col", "value"])
        order = np.lexsort((coo.col, coo.row))
        for idx in order:
            writer.writerow([coo.row[idx], coo.col[idx], f"{coo.data[idx]:.17g}"])
    with open(directory / f"{stem}_rows.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "account_id", "zero"])
        zero = set(dtm.zero_rows)
        for i, account in enumerate(dtm.account_ids):
            writer.writerow([i, account, int(account in zero)])
    with open(directory / f"{stem}_cols.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["col", "token"])
        for j, tok in enumerate(dtm.vocab):
            writer.writerow([j, tok])


def read_dtm(directory: str | Path, stem: str = "dtm") -> DocTermMatrix:
    directory = Path(directory)
    account_ids: list[str] = []
    zero_rows: list[str] = []
    with open(directory / f"{stem}_rows.csv", newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0] == "row":
                continue
            account_ids.append(row[1])
            if row[2] == "1":
                zero_rows.append(row[1])
    vocab: list[str] = []
    with open(directory / f"{stem}_cols.csv", newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0] == "col":
                continue
            vocab.append(row[1])
    rows: list[int] = []
    cols: list[int] = []
    data: list[float] = []
    with open(directory / f"{stem}_triplets.csv", newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0] == "row":
                continue
            rows.append(int(row[0]))
            cols.append(int(row[1]))
            data.append(float(row[2]))
    matrix = sparse.csr_matrix(
        (data, (rows, cols)), shape=(len(account_ids), len(vocab)), dtype=np.float64
    )
    return DocTermMatrix(
        matrix=matrix,
        account_ids=tuple(account_ids),
        vocab=tuple(vocab),
        zero_rows=tuple(zero_rows),
    )
