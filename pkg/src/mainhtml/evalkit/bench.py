"""Benchmark files: one record per page, JSONL or a JSON array."""

from __future__ import annotations

import json
import logging
from collections.abc import Iterator
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from mainhtml.errors import UnreadableFile

log = logging.getLogger(__name__)

LEVEL_ALIASES = {
    "easy": "simple",
    "simple": "simple",
    "mid": "mid",
    "medium": "mid",
    "hard": "hard",
}
META_KEYS = ("language", "style", "level", "table", "code", "equation")


class SchemaError(ValueError):
    pass


@dataclass
class BenchmarkRecord:
    track_id: str
    html: str
    main_html: str = ""
    convert_main_content: str = ""
    meta: dict[str, str] = field(default_factory=dict)

    @property
    def level(self) -> Optional[str]:
        return self.meta.get("level")

    def has(self, flag: str) -> Optional[bool]:
        """Rich-content flag from metadata (``with``/``without``), if annotated."""
        value = self.meta.get(flag)
        if value is None:
            return None
        return str(value).strip().lower() in ("with", "true", "yes", "1")

    @property
    def conversational(self) -> bool:
        return str(self.meta.get("style", "")).strip().lower() == "conversational"

    @classmethod
    def from_json(cls, obj: Any) -> "BenchmarkRecord":
        if not isinstance(obj, dict):
            raise SchemaError("record is not an object")
        html = obj.get("html")
        if not isinstance(html, str) or not html.strip():
            raise SchemaError("missing or empty 'html'")
        meta_in = obj.get("meta") or {}
        if not isinstance(meta_in, dict):
            raise SchemaError("'meta' is not an object")
        meta = {str(k): str(v) for k, v in meta_in.items() if v is not None}
        if "level" in meta:
            level = LEVEL_ALIASES.get(meta["level"].strip().lower())
            if level is None:
                raise SchemaError(f"unknown level {meta['level']!r}")
            meta["level"] = level
        for key in ("main_html", "convert_main_content"):
            if obj.get(key) is not None and not isinstance(obj[key], str):
                raise SchemaError(f"'{key}' is not a string")
        return cls(
            track_id=str(obj.get("track_id", "")),
            html=html,
            main_html=obj.get("main_html") or "",
            convert_main_content=obj.get("convert_main_content") or "",
            meta=meta,
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "track_id": self.track_id,
            "html": self.html,
            "main_html": self.main_html,
            "convert_main_content": self.convert_main_content,
            "meta": dict(self.meta),
        }


class BenchmarkReader:
    """Iterates validated records; invalid ones are skipped and counted."""

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self.skipped = 0
        self.errors: list[str] = []
        try:
            self._text = self.path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise UnreadableFile(f"{self.path}: {exc}") from exc

    def _objects(self) -> Iterator[tuple[int, Any]]:
        text = self._text
        if text.lstrip().startswith("["):
            try:
                items = json.loads(text)
            except json.JSONDecodeError as exc:
                raise UnreadableFile(f"{self.path}: {exc}") from exc
            yield from enumerate(items, start=1)
            return
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                yield lineno, exc

    def __iter__(self) -> Iterator[BenchmarkRecord]:
        for where, obj in self._objects():
            try:
                if isinstance(obj, Exception):
                    raise SchemaError(f"invalid JSON: {obj}")
                yield BenchmarkRecord.from_json(obj)
            except SchemaError as exc:
                self.skipped += 1
                self.errors.append(f"{self.path}:{where}: {exc}")
                log.warning("skipping record %s:%s: %s", self.path, where, exc)


def load_benchmark(path: str | Path) -> BenchmarkReader:
    return BenchmarkReader(path)


def write_benchmark(records, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.to_json(), ensure_ascii=False) + "\n")
