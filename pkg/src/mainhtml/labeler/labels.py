from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Protocol

from mainhtml.preprocess import DocumentPair


class BlockLabel(enum.Enum):
    MAIN = "main"
    OTHER = "other"

    @property
    def is_main(self) -> bool:
        return self is BlockLabel.MAIN


@dataclass(frozen=True)
class LabelSequence:
    labels: tuple[BlockLabel, ...]
    diagnostics: tuple[str, ...] = field(default=(), compare=False)

    @property
    def n(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __getitem__(self, index: int) -> BlockLabel:
        return self.labels[index]

    @property
    def main_ids(self) -> list[int]:
        return [i for i, label in enumerate(self.labels, start=1) if label.is_main]

    @property
    def all_other(self) -> bool:
        return not any(label.is_main for label in self.labels)

    def to_json(self) -> str:
        """The canonical ``{"1": "main", "2": "other"}`` rendering."""
        return render_label_json(self.labels)

    def to_dict(self) -> dict[str, str]:
        return {str(i): label.value for i, label in enumerate(self.labels, start=1)}

    @classmethod
    def from_values(cls, values) -> "LabelSequence":
        return cls(tuple(BlockLabel(v) if isinstance(v, str) else v for v in values))

    @classmethod
    def from_main_ids(cls, n: int, main_ids) -> "LabelSequence":
        chosen = set(main_ids)
        return cls(tuple(BlockLabel.MAIN if i in chosen else BlockLabel.OTHER for i in range(1, n + 1)))


def render_label_json(labels) -> str:
    if not labels:
        return "{}"
    body = ", ".join(f'"{i}": "{label.value}"' for i, label in enumerate(labels, start=1))
    return "{" + body + "}"


def parse_label_json(text: str, n: int) -> LabelSequence:
    """Strictly parse a canonical label object with keys exactly ``"1"..str(n)``."""
    data = json.loads(text)
    if not isinstance(data, dict) or set(data) != {str(i) for i in range(1, n + 1)}:
        raise ValueError("label object keys do not match 1..n")
    return LabelSequence(tuple(BlockLabel(data[str(i)]) for i in range(1, n + 1)))


class Classifier(Protocol):
    def classify(self, doc: DocumentPair) -> LabelSequence: ...
