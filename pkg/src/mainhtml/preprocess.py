"""Turn a raw page into aligned simplified and mapping documents.

The simplified side is what a classifier reads: non-content tags removed,
attributes pruned to ``class``/``id``, whitespace collapsed, one numbered
wrapper per block, long blocks truncated. The mapping side is the parsed page
itself, untouched; each block records which of its nodes it covers. Both
sides share node handles (the simplified tree is a copy of the raw tree), so
block ``i`` on one side is block ``i`` on the other by construction.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Optional

from mainhtml.dom import (
    DomTree,
    NodeHandle,
    NodeKind,
    normalize_ws,
    parse_fragment,
    parse_html,
    serialize,
    text_content,
)
from mainhtml.errors import EmptyDocument
from mainhtml.tokens import ApproxTokenizer, Tokenizer, count_tokens

log = logging.getLogger(__name__)

DEFAULT_REMOVED_TAGS = frozenset(
    "script style noscript header footer nav aside iframe svg form button link meta".split()
)
DEFAULT_BLOCK_TAGS = frozenset(
    "p div h1 h2 h3 h4 h5 h6 table ul ol dl pre blockquote article section figure hr li"
    " main address figcaption dt dd center".split()
)
ATOMIC_TAGS = frozenset({"table", "ul", "ol"})
TABLE_SECTIONS = frozenset({"thead", "tbody", "tfoot", "tr"})
TABLE_CELLS = frozenset({"td", "th", "caption"})
LIST_TAGS = frozenset({"ul", "ol"})
_PREFORMATTED = frozenset({"pre", "textarea"})

# a <form> holding this share of the body text is a page wrapper, not a widget
_WRAPPER_FORM_SHARE = 0.8


def _tagset(value: Iterable[str]) -> frozenset[str]:
    if isinstance(value, str):
        value = value.replace(",", " ").split()
    return frozenset(str(v).lower() for v in value)


@dataclass(frozen=True)
class SimplifyConfig:
    removed_tags: frozenset[str] = DEFAULT_REMOVED_TAGS
    kept_attributes: frozenset[str] = frozenset({"class", "id"})
    paragraph_truncation_chars: int = 200
    table_cell_keep: int = 12
    list_item_keep: int = 10
    block_level_tags: frozenset[str] = DEFAULT_BLOCK_TAGS
    item_attribute_name: str = "item-id"

    def __post_init__(self) -> None:
        object.__setattr__(self, "removed_tags", _tagset(self.removed_tags))
        kept = _tagset(self.kept_attributes) | {"class", "id"}
        object.__setattr__(self, "kept_attributes", kept)
        object.__setattr__(self, "block_level_tags", _tagset(self.block_level_tags))
        if self.paragraph_truncation_chars < 1:
            raise ValueError("paragraph_truncation_chars must be >= 1")
        if self.table_cell_keep < 1 or self.list_item_keep < 1:
            raise ValueError("table_cell_keep and list_item_keep must be >= 1")
        if not self.item_attribute_name:
            raise ValueError("item_attribute_name must be non-empty")

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> "SimplifyConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"unknown SimplifyConfig keys: {sorted(unknown)}")
        return cls(**dict(values))

    @classmethod
    def from_file(cls, path: str | Path) -> "SimplifyConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        section = data.get("simplify", data)
        known = {f.name for f in fields(cls)}
        return cls.from_mapping({k: v for k, v in section.items() if k in known})


@dataclass
class Block:
    id: int
    simplified_html: str
    mapping_nodes: tuple[NodeHandle, ...]
    char_count: int
    truncated: bool
    simplified_node: NodeHandle
    tag: str


@dataclass
class DocumentPair:
    blocks: list[Block]
    simplified_html: str
    simplified: DomTree
    mapping: DomTree
    simplified_token_count: int
    config: SimplifyConfig = field(repr=False, default_factory=SimplifyConfig)

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def mapping_text(self, block: Block) -> str:
        return "".join(text_content(self.mapping, n) for n in block.mapping_nodes)

    def simplified_text(self, block: Block) -> str:
        return text_content(self.simplified, block.simplified_node)

    def unannotated_html(self) -> str:
        """The simplified rendering without block ids or synthetic wrappers."""
        tree = self.simplified.copy()
        attr = self.config.item_attribute_name
        for block in self.blocks:
            node = block.simplified_node
            if node >= len(self.mapping):
                for child in list(tree.children[node]):
                    tree.insert_before(node, child)
                tree.detach(node)
            else:
                tree.attrs[node].pop(attr, None)
        return serialize(tree)


# -- stage 1: tag removal -------------------------------------------------


def strip_non_content(tree: DomTree, config: SimplifyConfig) -> DomTree:
    """Delete removable elements with their subtrees, plus comments and doctypes.

    Mutates and returns ``tree``.
    """
    body_text = None
    doomed: list[NodeHandle] = []
    for node in tree.iter_subtree(tree.root):
        kind = tree.kind[node]
        if kind is NodeKind.COMMENT or kind is NodeKind.DOCTYPE:
            doomed.append(node)
        elif kind is NodeKind.ELEMENT and tree.tag[node] in config.removed_tags:
            if tree.tag[node] == "form":
                if body_text is None:
                    body_text = len(normalize_ws(text_content(tree, tree.body())))
                share = len(normalize_ws(text_content(tree, node)))
                if body_text and share >= _WRAPPER_FORM_SHARE * body_text:
                    continue
            doomed.append(node)
    for node in doomed:
        tree.detach(node)
    return tree


# -- stage 2: attribute pruning -------------------------------------------


def simplify_attributes(tree: DomTree, config: SimplifyConfig) -> DomTree:
    """Keep only ``config.kept_attributes`` on every element. Mutates and returns ``tree``."""
    kept = config.kept_attributes
    for node in tree.iter_subtree(tree.root):
        attrs = tree.attrs[node]
        if attrs and any(name not in kept for name in attrs):
            tree.attrs[node] = {k: v for k, v in attrs.items() if k in kept}
    return tree


# -- stage 3: chunking ----------------------------------------------------


def _block_containment(tree: DomTree, start: NodeHandle, config: SimplifyConfig) -> dict[NodeHandle, bool]:
    """For each element under ``start``: does it have a block-level descendant?"""
    block_tags = config.block_level_tags
    order = [n for n in tree.iter_subtree(start) if tree.kind[n] is NodeKind.ELEMENT]
    contains: dict[NodeHandle, bool] = {}
    for node in reversed(order):
        found = False
        for child in tree.children[node]:
            if tree.kind[child] is NodeKind.ELEMENT and (
                tree.tag[child] in block_tags or contains.get(child, False)
            ):
                found = True
                break
        contains[node] = found
    return contains


def _is_layout_table(
    tree: DomTree, table: NodeHandle, contains: dict[NodeHandle, bool], config: SimplifyConfig
) -> bool:
    if contains.get(table, False):
        return True
    limit = 2 * config.paragraph_truncation_chars
    for node in tree.iter_subtree(table):
        if tree.tag[node] in ("td", "th"):
            if len(normalize_ws(text_content(tree, node))) > limit:
                return True
    return False


def _group_text(tree: DomTree, group: list[NodeHandle]) -> str:
    return normalize_ws("".join(text_content(tree, n) for n in group))


def chunk_blocks(tree: DomTree, config: SimplifyConfig) -> list[list[NodeHandle]]:
    """Partition the body into blocks of sibling nodes.

    Block-level elements without block-level descendants are single blocks;
    tables and lists are indivisible unless a table looks like page layout;
    runs of adjacent inline and text nodes form one block. Blocks without
    visible text are dropped.
    """
    start = tree.body()
    contains = _block_containment(tree, start, config)
    block_tags = config.block_level_tags
    groups: list[list[NodeHandle]] = []
    run: list[NodeHandle] = []

    def flush() -> None:
        if run:
            groups.append(list(run))
            run.clear()

    stack = [iter(list(tree.children[start]))]
    while stack:
        child = next(stack[-1], None)
        if child is None:
            stack.pop()
            flush()
            continue
        kind = tree.kind[child]
        if kind is NodeKind.TEXT:
            run.append(child)
            continue
        if kind is not NodeKind.ELEMENT:
            continue
        tag = tree.tag[child]
        if tag in ATOMIC_TAGS and not (
            tag == "table" and _is_layout_table(tree, child, contains, config)
        ):
            flush()
            groups.append([child])
        elif contains[child] or tag in TABLE_SECTIONS or tag == "table":
            flush()
            stack.append(iter(list(tree.children[child])))
        elif tag in block_tags or tag in TABLE_CELLS:
            flush()
            groups.append([child])
        else:
            run.append(child)

    groups = [g for g in groups if _group_text(tree, g)]
    if not groups:
        raise EmptyDocument("no block contains visible text")
    return groups


# -- stage 4: truncation --------------------------------------------------


def _clip_text(tree: DomTree, unit: NodeHandle, limit: int) -> bool:
    """Keep the first ``limit`` text characters under ``unit``; drop what follows."""
    used = 0
    cut = False
    removed: set[NodeHandle] = set()
    order = list(tree.iter_subtree(unit))
    parents = {n: tree.parent[n] for n in order}
    for node in order[1:]:
        if cut:
            if parents[node] in removed:
                removed.add(node)
            else:
                tree.detach(node)
                removed.add(node)
            continue
        if tree.kind[node] is NodeKind.TEXT:
            text = tree.data[node]
            if used + len(text) > limit:
                tree.data[node] = text[: limit - used]
                used = limit
                cut = True
            else:
                used += len(text)
    return cut


def _truncate_subtree(tree: DomTree, top: NodeHandle, config: SimplifyConfig) -> bool:
    truncated = False
    for table in [n for n in tree.iter_subtree(top) if tree.tag[n] == "table"]:
        if not tree.is_attached(table) and table != top:
            continue
        cells = [n for n in tree.iter_subtree(table) if tree.tag[n] in ("td", "th")]
        if len(cells) > config.table_cell_keep:
            truncated = True
            for cell in cells[config.table_cell_keep :]:
                tree.detach(cell)
            for row in [n for n in tree.iter_subtree(table) if tree.tag[n] == "tr"]:
                if not any(tree.tag[c] in ("td", "th") for c in tree.children[row]):
                    tree.detach(row)
    for lst in [n for n in tree.iter_subtree(top) if tree.tag[n] in LIST_TAGS]:
        items = [c for c in tree.children[lst] if tree.tag[c] == "li"]
        if len(items) > config.list_item_keep:
            truncated = True
            for item in items[config.list_item_keep :]:
                tree.detach(item)
    units = [n for n in tree.iter_subtree(top) if tree.tag[n] in ("td", "th", "li")]
    limit = config.paragraph_truncation_chars
    if units:
        # deepest first so nested units are clipped before their containers
        for unit in sorted(units, key=tree.depth, reverse=True):
            truncated |= _clip_text(tree, unit, limit)
    else:
        truncated |= _clip_text(tree, top, limit)
    return truncated


def truncate_block(block_html: str, config: SimplifyConfig) -> tuple[str, bool]:
    """Truncate one simplified block given as HTML; returns ``(html, truncated)``."""
    tree, top = parse_fragment(block_html)
    holder = tree.new_element("div")
    for node in top:
        tree.append(holder, node)
    tree.append(tree.root, holder)
    for node in tree.iter_subtree(holder):
        if tree.kind[node] is NodeKind.TEXT:
            tree.data[node] = _collapse(tree.data[node])
    truncated = _truncate_subtree(tree, holder, config)
    return "".join(serialize(tree, c) for c in tree.children[holder]), truncated


# -- assembly -------------------------------------------------------------


def _collapse(text: str) -> str:
    return " ".join(text.split()) if text.strip() else " "


def _collapse_whitespace(tree: DomTree) -> None:
    for node in tree.iter_subtree(tree.root):
        if tree.kind[node] is NodeKind.TEXT:
            parent = tree.parent[node]
            if parent is not None and tree.tag[parent] in _PREFORMATTED:
                continue
            text = tree.data[node]
            collapsed = " ".join(text.split())
            if text[:1].isspace() and collapsed:
                collapsed = " " + collapsed
            if text[-1:].isspace() and collapsed:
                collapsed += " "
            tree.data[node] = collapsed or " "


def _prune_skeleton(tree: DomTree, groups: list[list[NodeHandle]]) -> None:
    """Drop everything that is neither inside a block nor an ancestor of one."""
    keep: set[NodeHandle] = set()
    spine: set[NodeHandle] = {tree.root}
    for group in groups:
        for node in group:
            keep.add(node)
            spine.update(tree.ancestors(node))
    stack = [tree.root]
    while stack:
        node = stack.pop()
        for child in list(tree.children[node]):
            if child in keep:
                continue
            if child in spine:
                stack.append(child)
            else:
                tree.detach(child)


def build_document_pair(
    raw_html: bytes | str | DomTree,
    config: Optional[SimplifyConfig] = None,
    tokenizer: Optional[Tokenizer] = None,
    encoding_hint: Optional[str] = None,
) -> DocumentPair:
    config = config or SimplifyConfig()
    tokenizer = tokenizer or ApproxTokenizer()
    mapping = raw_html if isinstance(raw_html, DomTree) else parse_html(raw_html, encoding_hint)

    simplified = strip_non_content(mapping.copy(), config)
    groups = chunk_blocks(simplified, config)
    simplify_attributes(simplified, config)
    _collapse_whitespace(simplified)
    _prune_skeleton(simplified, groups)

    attr = config.item_attribute_name
    blocks: list[Block] = []
    for index, group in enumerate(groups, start=1):
        if len(group) == 1 and simplified.kind[group[0]] is NodeKind.ELEMENT:
            wrapper = group[0]
            tag = simplified.tag[wrapper]
        else:
            wrapper = simplified.new_element("span")
            simplified.insert_before(group[0], wrapper)
            for node in group:
                simplified.append(wrapper, node)
            first = group[0]
            tag = simplified.tag[first] if simplified.kind[first] is NodeKind.ELEMENT else "text"
        simplified.attrs[wrapper][attr] = str(index)
        truncated = _truncate_subtree(simplified, wrapper, config)
        blocks.append(
            Block(
                id=index,
                simplified_html=serialize(simplified, wrapper),
                mapping_nodes=tuple(group),
                char_count=len(normalize_ws(text_content(simplified, wrapper))),
                truncated=truncated,
                simplified_node=wrapper,
                tag=tag,
            )
        )

    rendering = serialize(simplified)
    return DocumentPair(
        blocks=blocks,
        simplified_html=rendering,
        simplified=simplified,
        mapping=mapping,
        simplified_token_count=count_tokens(tokenizer, rendering),
        config=config,
    )
