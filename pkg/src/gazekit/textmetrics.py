"""Caption quality metrics: BLEU, ROUGE-L, and corpus TF-IDF (CIDEr-style).

Conventions, pinned here because every one of them changes scores:

* Tokenization lowercases, splits on whitespace, and strips leading and
  trailing ASCII punctuation from each token (interior punctuation such
  as hyphens survives). Empty tokens are dropped.
* BLEU uses clipped n-gram precisions with no smoothing: a zero
  precision at any order zeroes the score. Orders run from 1 to
  min(max_n, candidate length), so a short candidate is never punished
  for orders it cannot have. The length penalty is two-sided,
  exp(-|r - c| / c) with c the candidate length and r the
  closest-length reference, which equals the classic exp(1 - r/c)
  penalty for short candidates and mirrors it for long ones.
* ROUGE-L is the longest-common-subsequence F-score with beta = 1.2.
* The CIDEr-style score is the base TF-IDF form: per-order cosine
  between candidate and reference TF-IDF vectors, averaged over
  references and orders, times 10. Document frequency counts each
  reference set once, IDF is ln(corpus size / df) with df clamped to at
  least 1, and no length penalty of any kind is applied.
"""

from __future__ import annotations

import math
import string
from collections import Counter
from dataclasses import dataclass

from .captions import FIELD_LABELS, parse_caption
from .errors import CaptionError, EmptyCorpus

__all__ = [
    "CaptionScore",
    "ScoredCaption",
    "CaptionSetReport",
    "tokenize",
    "bleu",
    "rouge_l",
    "cider",
    "score_captions",
]

_STRIP = string.punctuation


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace, and trim ASCII punctuation per token."""
    tokens = []
    for raw in text.lower().split():
        token = raw.strip(_STRIP)
        if token:
            tokens.append(token)
    return tokens


def _ngrams(tokens, n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate, references, max_n: int = 4) -> float:
    """Corpus-free BLEU of one candidate against one or more references.

    Arguments are token lists. An empty candidate scores 0 by
    convention. Equality with any reference scores exactly 1.
    """
    if not references:
        raise ValueError("bleu needs at least one reference")
    cand = list(candidate)
    refs = [list(r) for r in references]
    c = len(cand)
    if c == 0:
        return 0.0
    log_sum = 0.0
    orders = min(max_n, c)
    for n in range(1, orders + 1):
        counts = _ngrams(cand, n)
        ref_counts = [_ngrams(r, n) for r in refs]
        total = c - n + 1
        clipped = sum(
            min(count, max(rc[gram] for rc in ref_counts)) for gram, count in counts.items()
        )
        if clipped == 0:
            return 0.0
        log_sum += math.log(clipped / total)
    geo_mean = math.exp(log_sum / orders)
    r = min((abs(len(ref) - c), len(ref)) for ref in refs)[1]
    penalty = math.exp(-abs(r - c) / c)
    return geo_mean * penalty


def _lcs_length(a, b) -> int:
    # Classic O(len(a) * len(b)) dynamic program, one rolling row.
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[-1]))
        prev = cur
    return prev[-1]


def rouge_l(candidate, reference, beta: float = 1.2) -> float:
    """LCS-based F-score of a candidate against a single reference."""
    cand = list(candidate)
    ref = list(reference)
    if not cand or not ref:
        return 0.0
    lcs = _lcs_length(cand, ref)
    if lcs == 0:
        return 0.0
    precision = lcs / len(cand)
    recall = lcs / len(ref)
    b2 = beta * beta
    return (1.0 + b2) * precision * recall / (recall + b2 * precision)


def _doc_frequencies(corpus, max_n: int) -> Counter:
    df = Counter()
    for ref_set in corpus:
        seen = set()
        for ref in ref_set:
            for n in range(1, max_n + 1):
                seen.update(_ngrams(ref, n))
        df.update(seen)
    return df


def _tfidf(tokens, n: int, df: Counter, n_docs: int) -> dict:
    return {
        gram: count * math.log(n_docs / max(1, df[gram]))
        for gram, count in _ngrams(tokens, n).items()
    }


def _cosine(a: dict, b: dict) -> float:
    na = math.sqrt(sum(v * v for v in a.values()))
    nb = math.sqrt(sum(v * v for v in b.values()))
    if na == 0.0 or nb == 0.0:
        return 0.0
    dot = sum(v * b[g] for g, v in a.items() if g in b)
    return dot / (na * nb)


def cider(candidate, references, corpus, max_n: int = 4) -> float:
    """Base TF-IDF consensus score of a candidate against its references.

    ``corpus`` is the list of reference sets that defines document
    frequencies; it normally contains every reference set in the
    evaluation split. When the corpus has a single document, every IDF
    is zero and so is the score. Token lists throughout.
    """
    if not corpus:
        raise EmptyCorpus("document frequencies need a non-empty corpus")
    if not references:
        raise ValueError("cider needs at least one reference")
    refs = [list(r) for r in references]
    cand = list(candidate)
    n_docs = len(corpus)
    df = _doc_frequencies(corpus, max_n)
    total = 0.0
    for n in range(1, max_n + 1):
        cand_vec = _tfidf(cand, n, df, n_docs)
        total += sum(_cosine(cand_vec, _tfidf(r, n, df, n_docs)) for r in refs) / len(refs)
    return 10.0 * total / max_n


@dataclass(frozen=True)
class CaptionScore:
    """The three text metrics for one scored unit."""

    bleu: float
    rouge_l: float
    cider: float


@dataclass(frozen=True)
class ScoredCaption:
    """Scores (or the failure reason) for one candidate/reference pair."""

    index: int
    score: CaptionScore | None
    error: str | None = None


@dataclass(frozen=True)
class CaptionSetReport:
    """Per-pair scores plus arithmetic-mean aggregates over scored rows."""

    rows: tuple[ScoredCaption, ...]
    means: CaptionScore | None


def _score_one(cand_tokens, ref_token_lists, corpus_tokens, max_n) -> CaptionScore:
    return CaptionScore(
        bleu=bleu(cand_tokens, ref_token_lists, max_n),
        rouge_l=max(rouge_l(cand_tokens, r) for r in ref_token_lists),
        cider=cider(cand_tokens, ref_token_lists, corpus_tokens, max_n),
    )


def _field_corpora(corpus):
    corpora = {label: [] for label in FIELD_LABELS}
    for ref_set in corpus:
        parsed = []
        for ref in ref_set:
            try:
                parsed.append(parse_caption(ref))
            except CaptionError:
                continue
        if not parsed:
            continue
        for label in FIELD_LABELS:
            corpora[label].append([tokenize(getattr(c, label)) for c in parsed])
    if not corpora[FIELD_LABELS[0]]:
        raise EmptyCorpus("no corpus rows parse as structured captions")
    return corpora


def score_captions(pairs, corpus, max_n: int = 4, per_field: bool = False) -> CaptionSetReport:
    """Score (candidate, references) string pairs against a shared corpus.

    ``pairs`` is a sequence of (candidate, list-of-references) strings
    and ``corpus`` a list of reference-set string lists for document
    frequencies. In whole-string mode each pair is tokenized and scored
    directly. In per-field mode both sides must parse as structured
    captions; the metrics are computed per field and macro-averaged, and
    rows that fail to parse are reported as data with their error. Means
    are arithmetic over successfully scored rows.
    """
    rows: list[ScoredCaption] = []
    if per_field:
        corpora = _field_corpora(corpus)
        for index, (cand, refs) in enumerate(pairs):
            try:
                cand_parsed = parse_caption(cand)
                refs_parsed = [parse_caption(r) for r in refs]
            except CaptionError as exc:
                rows.append(ScoredCaption(index, None, f"{type(exc).__name__}: {exc}"))
                continue
            field_scores = []
            for label in FIELD_LABELS:
                field_scores.append(
                    _score_one(
                        tokenize(getattr(cand_parsed, label)),
                        [tokenize(getattr(r, label)) for r in refs_parsed],
                        corpora[label],
                        max_n,
                    )
                )
            rows.append(
                ScoredCaption(
                    index,
                    CaptionScore(
                        bleu=sum(s.bleu for s in field_scores) / len(field_scores),
                        rouge_l=sum(s.rouge_l for s in field_scores) / len(field_scores),
                        cider=sum(s.cider for s in field_scores) / len(field_scores),
                    ),
                )
            )
    else:
        corpus_tokens = [[tokenize(r) for r in ref_set] for ref_set in corpus]
        for index, (cand, refs) in enumerate(pairs):
            rows.append(
                ScoredCaption(
                    index,
                    _score_one(tokenize(cand), [tokenize(r) for r in refs], corpus_tokens, max_n),
                )
            )
    scored = [r.score for r in rows if r.score is not None]
    means = None
    if scored:
        means = CaptionScore(
            bleu=sum(s.bleu for s in scored) / len(scored),
            rouge_l=sum(s.rouge_l for s in scored) / len(scored),
            cider=sum(s.cider for s in scored) / len(scored),
        )
    return CaptionSetReport(rows=tuple(rows), means=means)
