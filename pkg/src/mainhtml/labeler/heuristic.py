"""Offline link-density classifier.

A block is main content when little of its text sits inside links and it
carries at least a few characters of text. Crude, but deterministic and
dependency-free, which is what the pipeline needs when no model is around.
"""

from __future__ import annotations

from dataclasses import dataclass

from mainhtml.dom import DomTree, NodeHandle, NodeKind
from mainhtml.labeler.labels import BlockLabel, LabelSequence
from mainhtml.preprocess import DocumentPair

MAX_LINK_RATIO = 0.5
MIN_TEXT_CHARS = 10


def link_stats(tree: DomTree, node: NodeHandle) -> tuple[int, int]:
    """Return ``(linked_chars, total_chars)`` counting non-whitespace characters."""
    linked = total = 0
    stack = [(node, False)]
    while stack:
        current, in_link = stack.pop()
        kind = tree.kind[current]
        if kind is NodeKind.TEXT:
            size = sum(1 for ch in tree.data[current] if not ch.isspace())
            total += size
            if in_link:
                linked += size
        elif kind is NodeKind.ELEMENT or kind is NodeKind.DOCUMENT:
            if tree.tag[current] in ("script", "style"):
                continue
            inner = in_link or tree.tag[current] == "a"
            stack.extend((child, inner) for child in tree.children[current])
    return linked, total


def is_main_block(
    tree: DomTree,
    node: NodeHandle,
    max_link_ratio: float = MAX_LINK_RATIO,
    min_text_chars: int = MIN_TEXT_CHARS,
) -> bool:
    linked, total = link_stats(tree, node)
    if total == 0 or total < min_text_chars:
        return False
    return linked / total < max_link_ratio


def classify_heuristic(
    doc: DocumentPair,
    max_link_ratio: float = MAX_LINK_RATIO,
    min_text_chars: int = MIN_TEXT_CHARS,
) -> LabelSequence:
    return LabelSequence(
        tuple(
            BlockLabel.MAIN
            if is_main_block(doc.simplified, block.simplified_node, max_link_ratio, min_text_chars)
            else BlockLabel.OTHER
            for block in doc.blocks
        )
    )


@dataclass
class HeuristicClassifier:
    max_link_ratio: float = MAX_LINK_RATIO
    min_text_chars: int = MIN_TEXT_CHARS

    def classify(self, doc: DocumentPair) -> LabelSequence:
        return classify_heuristic(doc, self.max_link_ratio, self.min_text_chars)
