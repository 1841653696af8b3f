"""Constrained decoding of block labels.

The output grammar is the fixed template ``{"1": "<c>", "2": "<c>", ...}``
with ``<c>`` in {main, other}. A small state machine forces every syntactic
fragment and hands control to the model only where a label is chosen, so the
emitted string is well-formed JSON with exactly the keys ``"1".."n"`` no
matter what the model scores.

The machine works on string fragments rather than token ids. A model adapter
that needs token-level masking maps each allowed fragment through its own
tokenizer.
"""

from __future__ import annotations

import enum
from functools import lru_cache
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Protocol

from mainhtml.errors import InvalidState, OversizeInput
from mainhtml.labeler.labels import BlockLabel, LabelSequence
from mainhtml.labeler.prompt import build_prompt
from mainhtml.preprocess import DocumentPair

DEFAULT_CONTEXT_LIMIT = 32768

CHOICES = ("main", "other")
DECISION_SET = frozenset(CHOICES)


class Phase(enum.Enum):
    STRUCTURAL = "structural"
    DECISION = "decision"
    DONE = "done"


@dataclass(slots=True)
class DecodeState:
    """Per-request decoding state.

    ``block_index`` is the block whose label is chosen at (or next after)
    the current position; ``decided`` counts labels already emitted.
    """

    block_index: int = 1
    phase: Phase = Phase.STRUCTURAL
    decided: int = 0
    fragments: list[str] = field(default_factory=list)
    prompt: str = ""

    @property
    def step(self) -> int:
        """Position in the compiled grammar."""
        return 2 * self.decided + (self.phase is Phase.DECISION) + (self.phase is Phase.DONE)

    @property
    def emitted(self) -> str:
        return "".join(self.fragments)


class TokenModel(Protocol):
    """What the decoder needs from a language model.

    ``score`` returns one relative score per candidate continuation; higher
    is better. ``context`` is the live :class:`DecodeState`, which exposes the
    prompt and the text emitted so far.
    """

    def score(self, context: DecodeState, candidates: Sequence[str]) -> Sequence[float]: ...

    def tokenize(self, text: str) -> list[str]: ...


def structural_fragment(decided: int, n: int) -> str:
    if decided == 0:
        return '{"1": "'
    if decided < n:
        return f'", "{decided + 1}": "'
    return '"}'


class LabelGrammar:
    """Transition table of the label template for ``n`` blocks.

    Steps alternate structural and decision positions: step ``2k`` forces the
    fragment that precedes label ``k + 1`` (or closes the object when
    ``k == n``), step ``2k + 1`` chooses label ``k + 1``.
    """

    __slots__ = ("n", "allowed", "phase", "following", "forced")

    def __init__(self, n: int) -> None:
        if n < 1:
            raise InvalidState("need at least one block")
        self.n = n
        allowed: list[frozenset[str]] = []
        phase: list[Phase] = []
        for decided in range(n + 1):
            allowed.append(frozenset((structural_fragment(decided, n),)))
            phase.append(Phase.STRUCTURAL)
            if decided < n:
                allowed.append(DECISION_SET)
                phase.append(Phase.DECISION)
        self.allowed = tuple(allowed)
        self.phase = tuple(phase)
        self.following = self.phase[1:] + (Phase.DONE,)
        self.forced = tuple(next(iter(a)) for a, p in zip(self.allowed, self.phase) if p is Phase.STRUCTURAL)


@lru_cache(maxsize=1024)
def label_grammar(n: int) -> LabelGrammar:
    return LabelGrammar(n)


def fsm_next(state: DecodeState, n: int) -> tuple[frozenset[str], Phase]:
    """Allowed continuations from ``state`` and the phase reached after taking one."""
    if state.phase is Phase.DONE:
        raise InvalidState("decode already finished")
    grammar = label_grammar(n)
    return grammar.allowed[state.step], grammar.following[state.step]


def advance(state: DecodeState, fragment: str, n: int) -> DecodeState:
    """Append ``fragment`` if the machine allows it. Mutates and returns ``state``."""
    allowed, following = fsm_next(state, n)
    if fragment not in allowed:
        raise InvalidState(f"{fragment!r} not allowed in phase {state.phase.value}")
    state.fragments.append(fragment)
    if state.phase is Phase.DECISION:
        state.decided += 1
    elif following is Phase.DECISION:
        state.block_index = state.decided + 1
    state.phase = following
    return state


def pick(scores: Sequence[float]) -> str:
    """Greedy choice between main and other; ties go to ``other``."""
    return "main" if scores[0] > scores[1] else "other"


def decode_labels(model: TokenModel, n: int, prompt: str = "") -> tuple[LabelSequence, str]:
    """Run the machine to completion for ``n`` blocks.

    Returns the labels and the emitted string. The model is consulted once
    per block, at decision points only; every other fragment is forced.
    """
    grammar = label_grammar(n)
    forced = grammar.forced
    state = DecodeState(prompt=prompt)
    fragments = state.fragments
    append = fragments.append
    score = model.score
    chosen: list[BlockLabel] = []
    keep = chosen.append
    main, other = BlockLabel.MAIN, BlockLabel.OTHER
    # walks the same table fsm_next reads: forced fragment, then one decision;
    # the model only ever observes decision states
    state.phase = Phase.DECISION
    for k in range(n):
        append(forced[k])
        state.decided = k
        state.block_index = k + 1
        scores = score(state, CHOICES)
        if scores[0] > scores[1]:
            append("main")
            keep(main)
        else:
            append("other")
            keep(other)
    append(forced[n])
    state.decided = n
    state.phase = Phase.DONE
    return LabelSequence(tuple(chosen)), "".join(fragments)


def constrained_decode(
    model: TokenModel,
    doc: DocumentPair,
    context_limit: int = DEFAULT_CONTEXT_LIMIT,
) -> LabelSequence:
    return constrained_decode_text(model, doc, context_limit)[0]


def constrained_decode_text(
    model: TokenModel,
    doc: DocumentPair,
    context_limit: int = DEFAULT_CONTEXT_LIMIT,
) -> tuple[LabelSequence, str]:
    """Like :func:`constrained_decode`, also returning the emitted JSON text."""
    if doc.n_blocks < 1:
        raise InvalidState("document has no blocks")
    if doc.simplified_token_count > context_limit:
        raise OversizeInput(doc.simplified_token_count, context_limit)
    prompt = build_prompt(doc.simplified_html, doc.config.item_attribute_name)
    labels, emitted = decode_labels(model, doc.n_blocks, prompt)
    if labels.n != doc.n_blocks:
        raise InvalidState("decoder emitted the wrong number of labels")
    return labels, emitted


@dataclass
class ConstrainedClassifier:
    """Classifier adapter around :func:`constrained_decode`."""

    model: TokenModel
    context_limit: int = DEFAULT_CONTEXT_LIMIT

    def classify(self, doc: DocumentPair) -> LabelSequence:
        return constrained_decode(self.model, doc, self.context_limit)
