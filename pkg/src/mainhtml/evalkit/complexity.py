"""Page difficulty profiling and rich-content tagging."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from mainhtml.dom import DomTree, NodeKind, parse_html, text_content
from mainhtml.labeler.heuristic import link_stats

DEFAULT_WEIGHTS = (0.25, 0.25, 0.25, 0.25)
LEVELS = ("simple", "mid", "hard")

_LATEX = re.compile(r"\$\$.+?\$\$|\\\(|\\\[", re.DOTALL)
_LIST_TAGS = frozenset({"ul", "ol", "dl"})
_IMAGE_TAGS = frozenset({"img", "picture"})
_MEDIA_TAGS = frozenset({"video", "audio", "iframe", "embed", "object"})


def _as_tree(page: str | bytes | DomTree) -> DomTree:
    return page if isinstance(page, DomTree) else parse_html(page)


def rich_content_tags(raw_html: str | bytes | DomTree) -> dict[str, bool]:
    tree = _as_tree(raw_html)
    tags = {tree.tag[n] for n in tree.iter_subtree(tree.root) if tree.kind[n] is NodeKind.ELEMENT}
    equation = "math" in tags or bool(_LATEX.search(text_content(tree)))
    return {"table": "table" in tags, "code": "code" in tags, "equation": equation}


@dataclass(frozen=True)
class ComplexityProfile:
    dom_structural: float
    text_sparsity: float
    content_diversity: float
    link_density: float
    overall: Optional[float] = None
    level: Optional[str] = None

    @property
    def raw(self) -> tuple[float, float, float, float]:
        return (self.dom_structural, self.text_sparsity, self.content_diversity, self.link_density)


def complexity_profile(raw_html: str | bytes | DomTree) -> ComplexityProfile:
    """Raw (corpus-unnormalized) complexity metrics of one page.

    * structure: max element depth below ``body`` times log2(1 + widest fan-out)
    * sparsity: switches between text-bearing and text-free elements in document order
    * diversity: how many of table, code, equation, list, image, media occur
    * link density: share of visible characters inside links
    """
    tree = _as_tree(raw_html)
    body = tree.body()
    base = tree.depth(body)
    max_depth = 0
    max_width = 0
    switches = 0
    previous: Optional[bool] = None
    for node in tree.iter_subtree(body):
        if tree.kind[node] is not NodeKind.ELEMENT:
            continue
        if tree.tag[node] in ("script", "style"):
            continue
        element_children = [c for c in tree.children[node] if tree.kind[c] is NodeKind.ELEMENT]
        max_width = max(max_width, len(element_children))
        max_depth = max(max_depth, tree.depth(node) - base)
        has_text = any(
            tree.kind[c] is NodeKind.TEXT and tree.data[c].strip() for c in tree.children[node]
        )
        if previous is not None and has_text != previous:
            switches += 1
        previous = has_text

    flags = rich_content_tags(tree)
    tags = {tree.tag[n] for n in tree.iter_subtree(body) if tree.kind[n] is NodeKind.ELEMENT}
    diversity = sum(flags.values()) + sum(
        bool(tags & group) for group in (_LIST_TAGS, _IMAGE_TAGS, _MEDIA_TAGS)
    )
    linked, total = link_stats(tree, body)
    return ComplexityProfile(
        dom_structural=max_depth * math.log2(1 + max_width),
        text_sparsity=float(switches),
        content_diversity=float(diversity),
        link_density=linked / total if total else 0.0,
    )


def nearest_rank(sorted_values: Sequence[float], pct: float) -> float:
    rank = max(1, math.ceil(pct / 100 * len(sorted_values)))
    return sorted_values[rank - 1]


def finalize_profiles(
    profiles: Sequence[ComplexityProfile],
    weights: Sequence[float] = DEFAULT_WEIGHTS,
    cuts: tuple[float, float] = (30.0, 70.0),
) -> list[ComplexityProfile]:
    """Corpus-level step: min-max normalize, weight, and assign levels at percentile cuts."""
    if len(weights) != 4 or abs(sum(weights) - 1.0) > 1e-9:
        raise ValueError("need four weights summing to 1")
    if not profiles:
        return []
    columns = list(zip(*(p.raw for p in profiles)))
    lows = [min(c) for c in columns]
    spans = [max(c) - lo for c, lo in zip(columns, lows)]
    scores = []
    for p in profiles:
        normalized = [
            (value - lo) / span if span > 0 else 0.0 for value, lo, span in zip(p.raw, lows, spans)
        ]
        scores.append(sum(w * v for w, v in zip(weights, normalized)))
    ordered = sorted(scores)
    low_cut = nearest_rank(ordered, cuts[0])
    high_cut = nearest_rank(ordered, cuts[1])
    finished = []
    for p, score in zip(profiles, scores):
        level = "simple" if score <= low_cut else "hard" if score > high_cut else "mid"
        finished.append(replace(p, overall=score, level=level))
    return finished
