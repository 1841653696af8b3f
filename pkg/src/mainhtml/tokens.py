"""Dependency-free tokenizers.

``ApproxTokenizer`` stands in for a model tokenizer when only a length
estimate is needed (context-window gating, overhead reports). Anything with a
``tokenize(str) -> list`` method can replace it.
"""

from __future__ import annotations

import re
from typing import Protocol

CJK_CLASS = (
    "\u3040-\u30ff"  # hiragana, katakana
    "\u3400-\u4dbf"  # CJK extension A
    "\u4e00-\u9fff"  # CJK unified ideographs
    "\uac00-\ud7af"  # hangul syllables
    "\uf900-\ufaff"  # CJK compatibility ideographs
)
_CJK = f"[{CJK_CLASS}]"
WORD_OR_CJK = re.compile(rf"{_CJK}|(?:(?!{_CJK})[^\W_])+")
_APPROX = re.compile(rf"{_CJK}|(?:(?!{_CJK})[^\W_])+|[^\s\w]|_")


class Tokenizer(Protocol):
    def tokenize(self, text: str) -> list[str]: ...


class ApproxTokenizer:
    """Word runs, single CJK characters and single punctuation marks.

    Markup-heavy text tokenizes into roughly as many pieces as a byte-pair
    vocabulary would produce, which is what the context gate cares about.
    """

    def tokenize(self, text: str) -> list[str]:
        return _APPROX.findall(text)

    def count(self, text: str) -> int:
        return sum(1 for _ in _APPROX.finditer(text))


def count_tokens(tokenizer: Tokenizer, text: str) -> int:
    counter = getattr(tokenizer, "count", None)
    if counter is not None:
        return counter(text)
    return len(tokenizer.tokenize(text))
