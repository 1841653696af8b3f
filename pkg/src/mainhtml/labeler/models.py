"""Token models that need no neural runtime.

They drive the constrained decoder in tests, in offline CLI runs and in
benchmarks of the decoding machinery itself.
"""

from __future__ import annotations

import random
import re
import threading
from collections.abc import Sequence

from mainhtml.dom import parse_html
from mainhtml.labeler.fsm import DecodeState
from mainhtml.labeler.heuristic import MAX_LINK_RATIO, MIN_TEXT_CHARS, is_main_block
from mainhtml.labeler.prompt import prompt_html_section
from mainhtml.tokens import ApproxTokenizer

_tokenizer = ApproxTokenizer()


class ConstantModel:
    """Always prefers one label."""

    def __init__(self, prefer: str = "main") -> None:
        if prefer not in ("main", "other"):
            raise ValueError(prefer)
        self.prefer = prefer
        self.calls = 0

    def score(self, context: DecodeState, candidates: Sequence[str]) -> list[float]:
        self.calls += 1
        return [1.0 if c == self.prefer else 0.0 for c in candidates]

    def tokenize(self, text: str) -> list[str]:
        return _tokenizer.tokenize(text)


class RandomModel:
    """Uniformly random scores from a seeded generator."""

    def __init__(self, seed: int) -> None:
        self._random = random.Random(seed).random

    def score(self, context: DecodeState, candidates: Sequence[str]) -> tuple[float, ...]:
        r = self._random
        if len(candidates) == 2:
            return r(), r()
        return tuple(r() for _ in candidates)

    def tokenize(self, text: str) -> list[str]:
        return _tokenizer.tokenize(text)


class ScriptedModel:
    """Replays a fixed label per block; used as a perfect classifier."""

    def __init__(self, labels: Sequence[str]) -> None:
        self.labels = list(labels)

    def score(self, context: DecodeState, candidates: Sequence[str]) -> list[float]:
        wanted = self.labels[context.block_index - 1]
        return [1.0 if c == wanted else 0.0 for c in candidates]

    def tokenize(self, text: str) -> list[str]:
        return _tokenizer.tokenize(text)


class HeuristicModel:
    """Scores blocks by link density, reading the page HTML out of the prompt.

    Stands in for the fine-tuned classifier so the full prompt-and-decode
    path can run offline.
    """

    def __init__(
        self,
        item_attribute_name: str = "item-id",
        max_link_ratio: float = MAX_LINK_RATIO,
        min_text_chars: int = MIN_TEXT_CHARS,
    ) -> None:
        self.item_attribute_name = item_attribute_name
        self.max_link_ratio = max_link_ratio
        self.min_text_chars = min_text_chars
        self._cache: dict[str, dict[int, bool]] = {}
        self._lock = threading.Lock()

    def __getstate__(self) -> dict:
        state = dict(self.__dict__)
        state["_cache"] = {}
        del state["_lock"]
        return state

    def __setstate__(self, state: dict) -> None:
        self.__dict__.update(state)
        self._lock = threading.Lock()

    def _verdicts(self, prompt: str) -> dict[int, bool]:
        with self._lock:
            cached = self._cache.get(prompt)
        if cached is not None:
            return cached
        verdicts: dict[int, bool] = {}
        html = prompt_html_section(prompt)
        if html.strip():
            tree = parse_html(html)
            attr = self.item_attribute_name
            for node in tree.iter_subtree(tree.root):
                attrs = tree.attrs[node]
                if attrs and attr in attrs and re.fullmatch(r"\d+", attrs[attr]):
                    verdicts[int(attrs[attr])] = is_main_block(
                        tree, node, self.max_link_ratio, self.min_text_chars
                    )
        with self._lock:
            self._cache = {prompt: verdicts}
        return verdicts

    def score(self, context: DecodeState, candidates: Sequence[str]) -> list[float]:
        main = self._verdicts(context.prompt).get(context.block_index, False)
        return [(1.0 if main else 0.0) if c == "main" else 0.5 for c in candidates]

    def tokenize(self, text: str) -> list[str]:
        return _tokenizer.tokenize(text)
