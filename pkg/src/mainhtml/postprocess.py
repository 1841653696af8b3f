"""Block selection, Markdown rendering and the end-to-end extract pipeline."""

from __future__ import annotations

import logging
import subprocess
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any, Optional

from mainhtml.dom import DomTree, NodeHandle, NodeKind, decode_html, serialize
from mainhtml.errors import EmptyDocument, FallbackFailed, LabelMismatch, OversizeInput
from mainhtml.labeler.fsm import DEFAULT_CONTEXT_LIMIT
from mainhtml.labeler.heuristic import HeuristicClassifier
from mainhtml.labeler.labels import Classifier, LabelSequence
from mainhtml.markdown import STRUCTURAL_TAGS, html_to_markdown
from mainhtml.preprocess import DocumentPair, SimplifyConfig, build_document_pair
from mainhtml.tokens import Tokenizer

log = logging.getLogger(__name__)


@dataclass
class ExtractOptions:
    context_limit: int = DEFAULT_CONTEXT_LIMIT
    fallback: bool = False
    fallback_cmd: Optional[Sequence[str]] = None
    fallback_timeout: float = 60.0
    simplify: SimplifyConfig = field(default_factory=SimplifyConfig)
    tokenizer: Optional[Tokenizer] = None
    encoding_hint: Optional[str] = None

    def __post_init__(self) -> None:
        if self.context_limit < 1:
            raise ValueError("context_limit must be >= 1")


@dataclass
class ExtractionResult:
    main_html: str = ""
    markdown: str = ""
    labels: LabelSequence = field(default_factory=lambda: LabelSequence(()))
    oversize: bool = False
    used_fallback: bool = False
    n_blocks: int = 0
    simplified_token_count: int = 0
    diagnostics: list[str] = field(default_factory=list)
    document: Optional[DocumentPair] = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "main_html": self.main_html,
            "markdown": self.markdown,
            "labels": self.labels.to_dict(),
            "oversize": self.oversize,
            "used_fallback": self.used_fallback,
            "n_blocks": self.n_blocks,
            "simplified_token_count": self.simplified_token_count,
            "diagnostics": list(self.diagnostics),
        }


def prune_mapping(pair: DocumentPair, labels: LabelSequence) -> DomTree:
    """Copy of the mapping tree keeping main blocks and their ancestor chains.

    Where dropped nodes separated two kept ones, or sat at the edge of an
    inline element, a newline text node takes their place so that
    neighbouring inline text does not fuse.
    """
    if labels.n != pair.n_blocks:
        raise LabelMismatch(f"{labels.n} labels for {pair.n_blocks} blocks")
    tree = pair.mapping.copy()
    keep: set[NodeHandle] = set()
    spine: set[NodeHandle] = {tree.root}
    body = tree.body()
    spine.add(body)
    spine.update(tree.ancestors(body))
    spine_roots = set(spine)
    for block, label in zip(pair.blocks, labels):
        if label.is_main:
            for node in block.mapping_nodes:
                keep.add(node)
                spine.update(tree.ancestors(node))
    stack = [tree.root]
    while stack:
        node = stack.pop()
        children = tree.children[node]
        survivors: list[NodeHandle] = []
        gap = False
        # an inline parent lets edge gaps fuse with text outside it
        inline = tree.kind[node] is NodeKind.ELEMENT and tree.tag[node] not in STRUCTURAL_TAGS and node not in spine_roots
        for child in children:
            if child in keep or child in spine:
                if gap and (survivors or inline):
                    survivors.append(_gap_node(tree, node))
                survivors.append(child)
                gap = False
                if child not in keep:
                    stack.append(child)
            else:
                tree.parent[child] = None
                gap = True
        if gap and survivors and inline:
            survivors.append(_gap_node(tree, node))
        tree.children[node] = survivors
    return tree


def _gap_node(tree: DomTree, parent: NodeHandle) -> NodeHandle:
    node = tree.new_text("\n")
    tree.parent[node] = parent
    return node


def select_blocks(pair: DocumentPair, labels: LabelSequence) -> str:
    """Serialize the mapping document pruned to the blocks labelled main."""
    return serialize(prune_mapping(pair, labels))


def _raw_text(raw_html: bytes | str, options: ExtractOptions) -> str:
    if isinstance(raw_html, bytes):
        return decode_html(raw_html, options.encoding_hint)
    return raw_html


def _looks_like_html(text: str) -> bool:
    head = text.lstrip()[:200].lower()
    return head.startswith("<") and ("<html" in head or "<body" in head or "<div" in head or "<p" in head)


def _run_fallback_command(raw_html: bytes | str, options: ExtractOptions) -> ExtractionResult:
    payload = _raw_text(raw_html, options).encode("utf-8")
    proc = subprocess.run(
        list(options.fallback_cmd),
        input=payload,
        capture_output=True,
        timeout=options.fallback_timeout,
        check=False,
    )
    if proc.returncode != 0:
        stderr = proc.stderr.decode("utf-8", "replace").strip()
        raise subprocess.CalledProcessError(proc.returncode, proc.args, stderr=stderr)
    out = proc.stdout.decode("utf-8", "replace").rstrip("\n")
    if _looks_like_html(out):
        return ExtractionResult(main_html=out, markdown=html_to_markdown(out), used_fallback=True)
    return ExtractionResult(markdown=out, used_fallback=True)


def _builtin_fallback(raw_html: bytes | str, options: ExtractOptions) -> ExtractionResult:
    pair = build_document_pair(raw_html, options.simplify, options.tokenizer, options.encoding_hint)
    labels = HeuristicClassifier().classify(pair)
    notes = []
    if labels.all_other:
        richest = max(pair.blocks, key=lambda b: b.char_count)
        labels = LabelSequence.from_main_ids(pair.n_blocks, [richest.id])
        notes.append(f"heuristic found no main block; kept block {richest.id}")
    tree = prune_mapping(pair, labels)
    return ExtractionResult(
        main_html=serialize(tree),
        markdown=html_to_markdown(tree),
        used_fallback=True,
        n_blocks=pair.n_blocks,
        simplified_token_count=pair.simplified_token_count,
        diagnostics=notes,
        document=pair,
    )


def fallback_extract(raw_html: bytes | str, options: Optional[ExtractOptions] = None) -> ExtractionResult:
    """Secondary extraction: the configured external command, else the built-in heuristic.

    The external command reads UTF-8 HTML on stdin and writes Markdown, text or
    HTML on stdout. When it fails, the built-in path runs instead.
    """
    options = options or ExtractOptions()
    notes: list[str] = []
    command_failed = False
    if options.fallback_cmd:
        try:
            result = _run_fallback_command(raw_html, options)
            result.diagnostics.append("fallback command succeeded")
            return result
        except subprocess.CalledProcessError as exc:
            notes.append(f"fallback command exited {exc.returncode}: {exc.stderr}")
        except (OSError, subprocess.TimeoutExpired) as exc:
            notes.append(f"fallback command failed: {exc}")
        command_failed = True
        log.warning(notes[-1])
    try:
        result = _builtin_fallback(raw_html, options)
    except EmptyDocument as exc:
        if command_failed:
            raise FallbackFailed("; ".join(notes + [str(exc)])) from exc
        raise
    if command_failed and not result.markdown.strip():
        raise FallbackFailed("; ".join(notes + ["built-in fallback produced no text"]))
    result.diagnostics = notes + ["built-in heuristic fallback"] + result.diagnostics
    return result


def extract(
    raw_html: bytes | str,
    classifier: Optional[Classifier] = None,
    options: Optional[ExtractOptions] = None,
) -> ExtractionResult:
    """Run the full pipeline on one page."""
    options = options or ExtractOptions()
    classifier = classifier or HeuristicClassifier()
    pair = build_document_pair(raw_html, options.simplify, options.tokenizer, options.encoding_hint)
    tokens = pair.simplified_token_count

    def gated(note: str) -> ExtractionResult:
        if options.fallback:
            result = fallback_extract(raw_html, options)
            result.oversize = True
            result.labels = LabelSequence(())
            result.n_blocks = pair.n_blocks
            result.simplified_token_count = tokens
            result.diagnostics.insert(0, note)
            return result
        return ExtractionResult(
            oversize=True,
            n_blocks=pair.n_blocks,
            simplified_token_count=tokens,
            diagnostics=[note],
            document=pair,
        )

    if tokens > options.context_limit:
        return gated(f"simplified input has {tokens} tokens, limit {options.context_limit}")
    try:
        labels = classifier.classify(pair)
    except OversizeInput as exc:
        return gated(str(exc))

    tree = prune_mapping(pair, labels)
    result = ExtractionResult(
        main_html=serialize(tree),
        markdown=html_to_markdown(tree),
        labels=labels,
        n_blocks=pair.n_blocks,
        simplified_token_count=tokens,
        diagnostics=list(labels.diagnostics),
        document=pair,
    )
    if options.fallback and (labels.all_other or not result.markdown.strip()):
        backup = fallback_extract(raw_html, options)
        backup.labels = labels
        backup.n_blocks = pair.n_blocks
        backup.simplified_token_count = tokens
        backup.diagnostics.insert(0, "classifier produced no main content")
        return backup
    return result
