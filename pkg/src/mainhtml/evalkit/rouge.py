from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Callable, Optional

from mainhtml.tokens import WORD_OR_CJK


def rouge_tokenize(text: str) -> list[str]:
    """Lowercased word runs, with every CJK character as its own token.

    Punctuation, Markdown syntax and underscores separate tokens and are dropped.
    """
    return WORD_OR_CJK.findall(text.lower())


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float
    n: int
    matched: int = 0
    pred_ngrams: int = 0
    gold_ngrams: int = 0


def ngram_counts(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def f1_from_counts(matched: int, pred_total: int, gold_total: int) -> tuple[float, float, float]:
    precision = matched / pred_total if pred_total else 0.0
    recall = matched / gold_total if gold_total else 0.0
    if precision + recall == 0:
        return precision, recall, 0.0
    return precision, recall, 2 * precision * recall / (precision + recall)


def rouge_n_f1(
    pred: str,
    gold: str,
    n: int = 5,
    tokenizer: Optional[Callable[[str], list[str]]] = None,
) -> RougeScore:
    """Clipped n-gram overlap between ``pred`` and ``gold``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    tokenize = tokenizer or rouge_tokenize
    pred_counts = ngram_counts(tokenize(pred), n)
    gold_counts = ngram_counts(tokenize(gold), n)
    matched = sum((pred_counts & gold_counts).values())
    pred_total = sum(pred_counts.values())
    gold_total = sum(gold_counts.values())
    precision, recall, f1 = f1_from_counts(matched, pred_total, gold_total)
    return RougeScore(precision, recall, f1, n, matched, pred_total, gold_total)
