"""Deterministic HTML to Markdown conversion.

The rule set is deliberately small: ATX headings, paragraphs, ``-`` and
numbered lists, pipe tables, fenced ``pre`` blocks, ``[text](href)`` links,
image alt text, and plain text for everything else. No Markdown escaping is
applied, so every word of output is a word of the page.
"""

from __future__ import annotations

import re
from typing import Optional

from mainhtml.dom import DomTree, NodeHandle, NodeKind, parse_html, text_content

SKIPPED = frozenset({"script", "style", "noscript", "template", "head", "title", "meta", "link"})
HEADINGS = {f"h{i}": i for i in range(1, 7)}
BLOCK_TAGS = frozenset(
    "address article aside blockquote body center dd details dialog div dl dt fieldset"
    " figcaption figure footer form header hgroup html main nav p section summary".split()
)
STRUCTURAL_TAGS = BLOCK_TAGS | HEADINGS.keys() | {"ul", "ol", "li", "table", "pre", "hr"}
_BR = "\x00"
_MAX_DEPTH = 400


def _inline(parts: list[str]) -> str:
    lines = [" ".join(line.split()) for line in "".join(parts).split(_BR)]
    return "\n".join(line for line in lines if line)


def _url(href: str) -> str:
    return href.strip().replace(" ", "%20").replace("(", "%28").replace(")", "%29")


class _Renderer:
    def __init__(self, tree: DomTree, depth: int = 0) -> None:
        self.tree = tree
        self.depth = depth
        self.blocks: list[str] = []
        self.parts: list[str] = []

    def flush(self) -> None:
        text = _inline(self.parts)
        if text:
            self.blocks.append(text)
        self.parts = []

    def result(self) -> list[str]:
        self.flush()
        return self.blocks

    def sub(self, node: NodeHandle) -> list[str]:
        renderer = _Renderer(self.tree, self.depth + 1)
        renderer.children(node)
        return renderer.result()

    def inline_of(self, node: NodeHandle) -> str:
        return " ".join(" ".join(block.split()) for block in self.sub(node))

    def children(self, node: NodeHandle) -> None:
        tree = self.tree
        if self.depth > _MAX_DEPTH:
            self.parts.append(text_content(tree, node))
            return
        for child in tree.children[node]:
            kind = tree.kind[child]
            if kind is NodeKind.TEXT:
                self.parts.append(tree.data[child])
            elif kind is NodeKind.ELEMENT:
                self.element(child)

    def element(self, node: NodeHandle) -> None:
        tree = self.tree
        tag = tree.tag[node]
        attrs = tree.attrs[node]
        if tag in SKIPPED:
            self.parts.append(" ")
        elif tag == "br":
            self.parts.append(_BR)
        elif tag == "hr":
            self.flush()
            self.blocks.append("---")
        elif tag in HEADINGS:
            self.flush()
            text = self.inline_of(node)
            if text:
                self.blocks.append("#" * HEADINGS[tag] + " " + text)
        elif tag in ("ul", "ol"):
            self.flush()
            lines = self.list_lines(node, ordered=tag == "ol")
            if lines:
                self.blocks.append("\n".join(lines))
        elif tag == "table":
            self.flush()
            self.blocks.extend(self.table(node))
        elif tag == "pre":
            self.flush()
            code = text_content(tree, node).strip("\n")
            if code.strip():
                self.blocks.append(f"```\n{code}\n```")
        elif tag == "img":
            alt = " ".join(attrs.get("alt", "").split())
            if alt:
                self.parts.append(f" {alt} ")
        elif tag == "a" and self.has_block_content(node):
            # link syntax cannot wrap headings, lists or tables; keep the blocks
            self.flush()
            self.children(node)
            self.flush()
        elif tag == "a":
            text = self.inline_of(node)
            href = attrs.get("href", "").strip()
            if text and href:
                self.parts.append(f"[{text}]({_url(href)})")
            else:
                self.parts.append(text)
        elif tag in BLOCK_TAGS or tag == "li":
            self.flush()
            self.children(node)
            self.flush()
        else:
            self.children(node)

    def has_block_content(self, node: NodeHandle) -> bool:
        tree = self.tree
        return any(
            tree.kind[n] is NodeKind.ELEMENT and tree.tag[n] in STRUCTURAL_TAGS
            for n in tree.iter_subtree(node)
            if n != node
        )

    def list_lines(self, node: NodeHandle, ordered: bool) -> list[str]:
        tree = self.tree
        start = 1
        if ordered:
            try:
                start = int(tree.attrs[node].get("start", "1"))
            except ValueError:
                start = 1
        lines: list[str] = []
        number = start
        loose: list[str] = []
        for child in tree.children[node]:
            if tree.is_element(child, "li"):
                if loose:
                    lines.extend(_item(loose, "- " if not ordered else f"{number}. "))
                    number += ordered
                    loose = []
                blocks = self.sub(child)
                if blocks:
                    lines.extend(_item(blocks, f"{number}. " if ordered else "- "))
                    number += ordered
            elif tree.kind[child] is NodeKind.TEXT:
                if tree.data[child].strip():
                    loose.append(" ".join(tree.data[child].split()))
            elif tree.kind[child] is NodeKind.ELEMENT:
                loose.extend(self.sub(child) if tree.tag[child] not in SKIPPED else [])
        if loose:
            lines.extend(_item(loose, f"{number}. " if ordered else "- "))
        return lines

    def table(self, node: NodeHandle) -> list[str]:
        tree = self.tree
        blocks: list[str] = []
        rows: list[list[str]] = []
        stack = list(reversed(tree.children[node]))
        while stack:
            current = stack.pop()
            if tree.kind[current] is not NodeKind.ELEMENT:
                continue
            tag = tree.tag[current]
            if tag == "caption":
                caption = self.inline_of(current)
                if caption:
                    blocks.append(caption)
            elif tag == "tr":
                cells = [
                    self.inline_of(cell)
                    for cell in tree.children[current]
                    if tree.kind[cell] is NodeKind.ELEMENT and tree.tag[cell] in ("td", "th")
                ]
                if cells:
                    rows.append(cells)
            elif tag in ("thead", "tbody", "tfoot"):
                stack.extend(reversed(tree.children[current]))
        if not any(cell for row in rows for cell in row):
            return blocks
        width = max(len(row) for row in rows)
        lines = []
        for i, row in enumerate(rows):
            padded = row + [""] * (width - len(row))
            lines.append("| " + " | ".join(padded) + " |")
            if i == 0:
                lines.append("| " + " | ".join(["---"] * width) + " |")
        blocks.append("\n".join(lines))
        return blocks


def _item(blocks: list[str], marker: str) -> list[str]:
    indent = " " * len(marker)
    lines: list[str] = []
    for block in blocks:
        for line in block.split("\n"):
            lines.append((indent if lines else marker) + line)
    return lines


def html_to_markdown(main_html: str | DomTree, node: Optional[NodeHandle] = None) -> str:
    """Render HTML (a string or an already parsed tree) as Markdown."""
    if isinstance(main_html, str):
        if not main_html.strip():
            return ""
        tree = parse_html(main_html)
    else:
        tree = main_html
    renderer = _Renderer(tree)
    renderer.children(tree.root if node is None else node)
    return "\n\n".join(renderer.result()).strip()


_LINK_TARGET = re.compile(r"\]\([^)\s]*\)")
_SYNTAX_RUN = re.compile(r"#{1,6}|[-*]|\d+\.|\|+|-{3,}|`{3,}")


def markdown_text_runs(markdown: str) -> list[str]:
    """Whitespace-separated runs of page text in ``markdown``, syntax removed.

    Link targets are dropped and heading/list/table/fence markers skipped.
    Link brackets end a run: the renderer adds them at element boundaries,
    where the page text may have no whitespace.
    """
    runs = []
    for run in _LINK_TARGET.sub("]", markdown).split():
        if _SYNTAX_RUN.fullmatch(run):
            continue
        runs.extend(piece for piece in run.replace("[", "]").split("]") if piece)
    return runs
