"""Handle-based DOM tree built on an error-tolerant HTML5 parser.

Nodes live in flat storage inside a :class:`DomTree` and are addressed by
integer handles. Handles stay valid for the lifetime of the tree, and
:meth:`DomTree.copy` preserves them, so two copies of one document can be
modified independently while still referring to the same nodes by the same
numbers.
"""

from __future__ import annotations

import codecs
import enum
import re
from collections.abc import Iterator
from typing import Optional

import html5lib

from mainhtml.errors import EncodingUndecodable

NodeHandle = int


class NodeKind(enum.Enum):
    DOCUMENT = "document"
    ELEMENT = "element"
    TEXT = "text"
    COMMENT = "comment"
    DOCTYPE = "doctype"


VOID_ELEMENTS = frozenset(
    "area base br col embed hr img input link meta param source track wbr".split()
)
RAW_TEXT_ELEMENTS = frozenset({"script", "style"})
# html5lib keeps these as unescaped character data
_LITERAL_TEXT_PARENTS = frozenset(
    {"script", "style", "xmp", "iframe", "noembed", "noframes", "plaintext", "noscript"}
)

_META_CHARSET = re.compile(
    rb"""<meta[^>]+charset\s*=\s*["']?\s*([A-Za-z0-9_:.\-]+)""", re.IGNORECASE
)
_WS = re.compile(r"\s+")


def normalize_ws(text: str) -> str:
    return _WS.sub(" ", text).strip()


class DomTree:
    """A mutable HTML document tree.

    Each node has a kind, a tag name (elements only), an attribute dict
    (elements only), a text payload (text, comment and doctype nodes), a
    parent handle and an ordered list of child handles.
    """

    __slots__ = ("kind", "tag", "attrs", "data", "parent", "children", "root")

    def __init__(self) -> None:
        self.kind: list[NodeKind] = []
        self.tag: list[Optional[str]] = []
        self.attrs: list[Optional[dict[str, str]]] = []
        self.data: list[Optional[str]] = []
        self.parent: list[Optional[NodeHandle]] = []
        self.children: list[list[NodeHandle]] = []
        self.root: NodeHandle = self._new(NodeKind.DOCUMENT)

    def _new(
        self,
        kind: NodeKind,
        tag: Optional[str] = None,
        attrs: Optional[dict[str, str]] = None,
        data: Optional[str] = None,
    ) -> NodeHandle:
        self.kind.append(kind)
        self.tag.append(tag)
        self.attrs.append(attrs)
        self.data.append(data)
        self.parent.append(None)
        self.children.append([])
        return len(self.kind) - 1

    # -- construction -----------------------------------------------------

    def new_element(self, tag: str, attrs: Optional[dict[str, str]] = None) -> NodeHandle:
        return self._new(NodeKind.ELEMENT, tag.lower(), dict(attrs or {}))

    def new_text(self, text: str) -> NodeHandle:
        return self._new(NodeKind.TEXT, data=text)

    def new_comment(self, text: str) -> NodeHandle:
        return self._new(NodeKind.COMMENT, data=text)

    def new_doctype(self, name: str) -> NodeHandle:
        return self._new(NodeKind.DOCTYPE, data=name)

    def append(self, parent: NodeHandle, child: NodeHandle) -> None:
        if self.kind[parent] is NodeKind.TEXT:
            raise ValueError("text nodes cannot have children")
        self.detach(child)
        self.parent[child] = parent
        self.children[parent].append(child)

    def insert_before(self, ref: NodeHandle, node: NodeHandle) -> None:
        parent = self.parent[ref]
        if parent is None:
            raise ValueError("reference node is detached")
        self.detach(node)
        siblings = self.children[parent]
        siblings.insert(siblings.index(ref), node)
        self.parent[node] = parent

    def detach(self, node: NodeHandle) -> None:
        """Remove ``node`` (and its subtree) from its parent.

        The subtree stays in storage, so every handle remains valid.
        """
        parent = self.parent[node]
        if parent is not None:
            self.children[parent].remove(node)
            self.parent[node] = None

    def copy(self) -> "DomTree":
        other = DomTree.__new__(DomTree)
        other.kind = list(self.kind)
        other.tag = list(self.tag)
        other.attrs = [dict(a) if a is not None else None for a in self.attrs]
        other.data = list(self.data)
        other.parent = list(self.parent)
        other.children = [list(c) for c in self.children]
        other.root = self.root
        return other

    # -- navigation -------------------------------------------------------

    def __len__(self) -> int:
        return len(self.kind)

    def is_element(self, node: NodeHandle, tag: Optional[str] = None) -> bool:
        if self.kind[node] is not NodeKind.ELEMENT:
            return False
        return tag is None or self.tag[node] == tag

    def is_attached(self, node: NodeHandle) -> bool:
        while node != self.root:
            parent = self.parent[node]
            if parent is None:
                return False
            node = parent
        return True

    def ancestors(self, node: NodeHandle) -> Iterator[NodeHandle]:
        parent = self.parent[node]
        while parent is not None:
            yield parent
            parent = self.parent[parent]

    def next_sibling(self, node: NodeHandle) -> Optional[NodeHandle]:
        parent = self.parent[node]
        if parent is None:
            return None
        siblings = self.children[parent]
        i = siblings.index(node)
        return siblings[i + 1] if i + 1 < len(siblings) else None

    def previous_sibling(self, node: NodeHandle) -> Optional[NodeHandle]:
        parent = self.parent[node]
        if parent is None:
            return None
        siblings = self.children[parent]
        i = siblings.index(node)
        return siblings[i - 1] if i > 0 else None

    def iter_subtree(self, node: NodeHandle) -> Iterator[NodeHandle]:
        """Pre-order traversal of ``node`` and its descendants."""
        stack = [node]
        children = self.children
        while stack:
            current = stack.pop()
            yield current
            stack.extend(reversed(children[current]))

    def find_all(self, tag: str, node: Optional[NodeHandle] = None) -> list[NodeHandle]:
        start = self.root if node is None else node
        return [n for n in self.iter_subtree(start) if self.tag[n] == tag]

    def find(self, tag: str, node: Optional[NodeHandle] = None) -> Optional[NodeHandle]:
        start = self.root if node is None else node
        for n in self.iter_subtree(start):
            if self.tag[n] == tag:
                return n
        return None

    def body(self) -> NodeHandle:
        """The ``body`` element, or the document root when there is none."""
        found = self.find("body")
        return self.root if found is None else found

    def depth(self, node: NodeHandle) -> int:
        return sum(1 for _ in self.ancestors(node))


# -- parsing --------------------------------------------------------------


def _lookup_codec(name: Optional[str]) -> Optional[str]:
    if not name:
        return None
    try:
        return codecs.lookup(name.strip()).name
    except LookupError:
        return None


def decode_html(data: bytes, encoding_hint: Optional[str] = None) -> str:
    """Decode raw page bytes: hint, then meta charset, then lossy UTF-8."""
    candidates = [_lookup_codec(encoding_hint)]
    match = _META_CHARSET.search(data[:4096])
    if match:
        candidates.append(_lookup_codec(match.group(1).decode("ascii", "ignore")))
    for codec in candidates:
        if codec is None:
            continue
        try:
            return data.decode(codec)
        except (UnicodeDecodeError, LookupError):
            continue
    text = data.decode("utf-8", errors="replace")
    if text and all(ch == "�" for ch in text):
        raise EncodingUndecodable("no decodable characters in input")
    return text


def parse_html(data: bytes | str, encoding_hint: Optional[str] = None) -> DomTree:
    """Parse HTML into a :class:`DomTree`. Broken markup is repaired, never rejected."""
    if isinstance(data, bytes):
        if not data:
            raise ValueError("empty input")
        text = decode_html(data, encoding_hint)
    else:
        if not data:
            raise ValueError("empty input")
        text = data
    document = html5lib.parse(text, treebuilder="dom", namespaceHTMLElements=False)
    tree = DomTree()
    _convert(document, tree.root, tree)
    return tree


def parse_fragment(html: str) -> tuple[DomTree, list[NodeHandle]]:
    """Parse an HTML fragment; returns the tree and the top-level nodes."""
    fragment = html5lib.parseFragment(html, treebuilder="dom", namespaceHTMLElements=False)
    tree = DomTree()
    _convert(fragment, tree.root, tree)
    return tree, list(tree.children[tree.root])


def _convert(src, root: NodeHandle, tree: DomTree) -> None:
    # iterative: real pages nest deeper than the interpreter's recursion limit
    stack = [(src, root)]
    while stack:
        node, parent = stack.pop()
        pending: list[str] = []
        nested = []
        for child in node.childNodes:
            node_type = child.nodeType
            if node_type == child.TEXT_NODE:
                pending.append(child.data)
                continue
            if pending:
                tree.append(parent, tree.new_text("".join(pending)))
                pending = []
            if node_type == child.ELEMENT_NODE:
                attrs = dict(child.attributes.items()) if child.attributes else {}
                handle = tree.new_element(child.nodeName, attrs)
                tree.append(parent, handle)
                nested.append((child, handle))
            elif node_type == child.COMMENT_NODE:
                tree.append(parent, tree.new_comment(child.data))
            elif node_type == child.DOCUMENT_TYPE_NODE:
                tree.append(parent, tree.new_doctype(child.name or "html"))
        if pending:
            tree.append(parent, tree.new_text("".join(pending)))
        stack.extend(reversed(nested))


# -- serialization --------------------------------------------------------


def escape_text(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def escape_attr(value: str) -> str:
    return value.replace("&", "&amp;").replace('"', "&quot;")


def serialize(tree: DomTree, node: Optional[NodeHandle] = None) -> str:
    """Serialize the subtree rooted at ``node`` (default: whole document)."""
    out: list[str] = []
    _serialize(tree, tree.root if node is None else node, out)
    return "".join(out)


def _serialize(tree: DomTree, start: NodeHandle, out: list[str]) -> None:
    # string items on the stack are pending end tags
    stack: list = [start]
    while stack:
        node = stack.pop()
        if isinstance(node, str):
            out.append(node)
            continue
        kind = tree.kind[node]
        if kind is NodeKind.TEXT:
            parent = tree.parent[node]
            if parent is not None and tree.tag[parent] in _LITERAL_TEXT_PARENTS:
                out.append(tree.data[node])
            else:
                out.append(escape_text(tree.data[node]))
        elif kind is NodeKind.COMMENT:
            out.append(f"<!--{tree.data[node]}-->")
        elif kind is NodeKind.DOCTYPE:
            out.append(f"<!DOCTYPE {tree.data[node]}>")
        elif kind is NodeKind.DOCUMENT:
            stack.extend(reversed(tree.children[node]))
        else:
            tag = tree.tag[node]
            out.append("<" + tag)
            for name, value in tree.attrs[node].items():
                out.append(f' {name}="{escape_attr(value)}"')
            out.append(">")
            if tag not in VOID_ELEMENTS:
                stack.append(f"</{tag}>")
                stack.extend(reversed(tree.children[node]))


def text_content(tree: DomTree, node: Optional[NodeHandle] = None) -> str:
    """Concatenated descendant text in document order, skipping script and style."""
    start = tree.root if node is None else node
    parts: list[str] = []
    stack = [start]
    kinds, tags, children, data = tree.kind, tree.tag, tree.children, tree.data
    while stack:
        current = stack.pop()
        kind = kinds[current]
        if kind is NodeKind.TEXT:
            parts.append(data[current])
        elif kind is NodeKind.ELEMENT or kind is NodeKind.DOCUMENT:
            if tags[current] in RAW_TEXT_ELEMENTS:
                continue
            stack.extend(reversed(children[current]))
    return "".join(parts)
