"""Checks that extracted Markdown contains only text taken from the page."""

from __future__ import annotations

from mainhtml.dom import DomTree, NodeKind, normalize_ws, text_content
from mainhtml.markdown import markdown_text_runs


def page_text(tree: DomTree) -> str:
    """Page text searched by :func:`fidelity_violations`.

    Text content plus image alt text, which the Markdown renderer emits for
    images. Link brackets are removed to match :func:`markdown_text_runs`.
    """
    alts = [
        tree.attrs[n].get("alt", "")
        for n in tree.iter_subtree(tree.root)
        if tree.kind[n] is NodeKind.ELEMENT and tree.tag[n] == "img"
    ]
    text = normalize_ws(text_content(tree)) + "\n" + "\n".join(normalize_ws(a) for a in alts)
    return text.replace("[", "").replace("]", "")


def fidelity_violations(markdown: str, raw_tree: DomTree) -> list[str]:
    """Markdown text runs that do not occur in the raw page."""
    haystack = page_text(raw_tree)
    return [run for run in markdown_text_runs(markdown) if run not in haystack]
