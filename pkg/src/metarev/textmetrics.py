"""Text statistics and reference-based scoring.

Pure functions over whitespace token sequences: n-gram novelty, unigram
entropy, normalized inverse diversity (NID), LCS-based ROUGE-L, and
whole-corpus aggregates. All token counts use lowercase whitespace
tokenization so results are reproducible without model downloads.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, asdict
from typing import Iterable, Sequence

import numpy as np

from . import _kernels


class EmptyInput(ValueError):
    """Both sides of a pairwise metric must be non-empty."""


class EmptyCorpus(ValueError):
    """Corpus-level statistic requested on an empty collection."""


class TargetTooShort(ValueError):
    """Target sequence has fewer than n tokens."""


class DegenerateVocabulary(ValueError):
    """NID is undefined when the vocabulary has fewer than 2 types."""


@dataclass
class CorpusStats:
    """Aggregate statistics for one document collection."""

    count_src: int
    count_trg: int
    mean_len_src: float
    mean_len_trg: float
    novel_ngram_ratio: float
    nid: float

    def to_dict(self) -> dict:
        return asdict(self)


def tokenize(text: str) -> list[str]:
    """Lowercase maximal non-whitespace runs."""
    return text.lower().split()


def ngrams(tokens: Sequence[str], n: int) -> list[tuple]:
    """All contiguous n-grams of `tokens`, in order (may repeat)."""
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def novel_ngram_ratio(target: Sequence[str], sources: Iterable[Sequence[str]], n: int = 4) -> float:
    """Fraction of target n-gram occurrences absent from all source n-grams.

    Target n-grams are counted per occurrence; source n-grams form a set,
    so repeated source material does not change the result.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if len(target) < n:
        raise TargetTooShort(f"target has {len(target)} tokens, needs at least {n}")
    source_grams: set = set()
    for src in sources:
        source_grams.update(ngrams(src, n))
    target_grams = ngrams(target, n)
    novel = sum(1 for g in target_grams if g not in source_grams)
    return novel / len(target_grams)


def entropy(tokens: Sequence[str]) -> float:
    """Shannon entropy of the unigram distribution, in nats."""
    if not tokens:
        raise EmptyCorpus("entropy of an empty token sequence is undefined")
    counts = np.fromiter(Counter(tokens).values(), dtype=np.float64)
    p = counts / counts.sum()
    return float(-(p * np.log(p)).sum())


def nid(tokens: Sequence[str]) -> float:
    """Normalized inverse diversity: 1 - entropy / ln(vocabulary size).

    0 for a uniform distribution over its support, approaching 1 as the
    collection grows more redundant.
    """
    vocab = len(set(tokens))
    if vocab <= 1:
        raise DegenerateVocabulary(f"need >= 2 distinct tokens, got {vocab}")
    value = 1.0 - entropy(tokens) / math.log(vocab)
    return min(1.0, max(0.0, value))


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Longest common subsequence length between two token sequences."""
    table: dict = {}
    a_ids = _kernels.as_id_array(a, table)
    b_ids = _kernels.as_id_array(b, table)
    return int(_kernels.lcs_length(a_ids, b_ids))


def rouge_l(candidate: Sequence[str], reference: Sequence[str]) -> tuple[float, float, float]:
    """ROUGE-L (precision, recall, F1) from the LCS of the two sequences."""
    if not candidate or not reference:
        raise EmptyInput("rouge_l requires non-empty candidate and reference")
    lcs = lcs_length(candidate, reference)
    precision = lcs / len(candidate)
    recall = lcs / len(reference)
    if precision + recall == 0:
        return (0.0, 0.0, 0.0)
    f1 = 2 * precision * recall / (precision + recall)
    return (precision, recall, f1)


def corpus_stats(corpus, n: int = 4) -> CorpusStats:
    """Counts, mean token lengths, mean novel n-gram ratio, and source NID.

    Expects a filtered corpus: every record carries at least one review and
    a meta-review. The novelty ratio averages per record; NID is computed
    over the concatenation of all review tokens.
    """
    records = getattr(corpus, "records", corpus)
    if not records:
        raise EmptyCorpus("corpus has no records")
    src_lens: list[int] = []
    trg_lens: list[int] = []
    ratios: list[float] = []
    all_src_tokens: list[str] = []
    for rec in records:
        review_tokens = [tokenize(rv.text) for rv in rec.reviews]
        for toks in review_tokens:
            src_lens.append(len(toks))
            all_src_tokens.extend(toks)
        if rec.metareview is None:
            continue
        target = tokenize(rec.metareview)
        trg_lens.append(len(target))
        if review_tokens and len(target) >= n:
            ratios.append(novel_ngram_ratio(target, review_tokens, n))
    if not src_lens or not trg_lens:
        raise EmptyCorpus("corpus has no reviews or no meta-reviews")
    return CorpusStats(
        count_src=len(src_lens),
        count_trg=len(trg_lens),
        mean_len_src=sum(src_lens) / len(src_lens),
        mean_len_trg=sum(trg_lens) / len(trg_lens),
        novel_ngram_ratio=sum(ratios) / len(ratios) if ratios else 0.0,
        nid=nid(all_src_tokens),
    )
