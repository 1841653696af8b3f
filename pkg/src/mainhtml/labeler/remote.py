"""Block classification through a chat-completion HTTP endpoint."""

from __future__ import annotations

import json
import logging
import os
import time
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any, Optional

import httpx

from mainhtml.errors import MalformedReply, RemoteUnavailable
from mainhtml.labeler.labels import BlockLabel, LabelSequence
from mainhtml.labeler.prompt import build_prompt
from mainhtml.preprocess import DocumentPair

log = logging.getLogger(__name__)

DEFAULT_API_KEY_ENV = "MAINHTML_API_KEY"
_RETRY_STATUS = {408, 409, 425, 429}


@dataclass
class RemoteConfig:
    endpoint: str = "https://api.deepseek.com/v1"
    model: str = "deepseek-chat"
    api_key_env: str = DEFAULT_API_KEY_ENV
    timeout: float = 120.0
    max_retries: int = 3
    backoff_base: float = 1.0
    backoff_max: float = 30.0
    temperature: float = 0.0

    @property
    def url(self) -> str:
        base = self.endpoint.rstrip("/")
        return base if base.endswith("/chat/completions") else base + "/chat/completions"

    @classmethod
    def from_mapping(cls, values: dict[str, Any]) -> "RemoteConfig":
        known = set(cls.__dataclass_fields__)
        return cls(**{k: v for k, v in values.items() if k in known})


def extract_json_object(text: str) -> dict:
    """Return the first balanced ``{...}`` in ``text`` that parses as a JSON object."""
    start = text.find("{")
    while start >= 0:
        depth = 0
        in_string = False
        escaped = False
        for pos in range(start, len(text)):
            ch = text[pos]
            if in_string:
                if escaped:
                    escaped = False
                elif ch == "\\":
                    escaped = True
                elif ch == '"':
                    in_string = False
            elif ch == '"':
                in_string = True
            elif ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
                if depth == 0:
                    try:
                        value = json.loads(text[start : pos + 1])
                    except json.JSONDecodeError:
                        break
                    if isinstance(value, dict):
                        return value
                    break
        start = text.find("{", start + 1)
    raise MalformedReply("no JSON object found in reply")


def repair_labels(reply: dict, n: int) -> LabelSequence:
    """Map a reply object onto labels ``1..n``.

    Missing ids and unrecognised values become ``other``; ids outside
    ``1..n`` are ignored. Each repair is recorded in ``diagnostics``.
    """
    labels: list[BlockLabel] = []
    notes: list[str] = []
    for i in range(1, n + 1):
        value = reply.get(str(i))
        if value is None:
            notes.append(f"block {i}: missing, set to other")
            labels.append(BlockLabel.OTHER)
            continue
        word = value.strip().lower() if isinstance(value, str) else None
        if word in ("main", "other"):
            labels.append(BlockLabel(word))
        else:
            notes.append(f"block {i}: unrecognised value {value!r}, set to other")
            labels.append(BlockLabel.OTHER)
    expected = {str(i) for i in range(1, n + 1)}
    extra = sorted(k for k in reply if k not in expected)
    if extra:
        notes.append(f"ignored unknown ids: {', '.join(extra)}")
    return LabelSequence(tuple(labels), tuple(notes))


class RemoteClassifier:
    """Sends the classification prompt to a chat-completion endpoint.

    One ``httpx.Client`` is shared across calls; it is safe to use from
    several threads.
    """

    def __init__(
        self,
        config: Optional[RemoteConfig] = None,
        *,
        api_key: Optional[str] = None,
        transport: Optional[httpx.BaseTransport] = None,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        self.config = config or RemoteConfig()
        self.api_key = api_key if api_key is not None else os.environ.get(self.config.api_key_env, "")
        self._sleep = sleep
        self._client = httpx.Client(timeout=self.config.timeout, transport=transport)

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "RemoteClassifier":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def complete(self, prompt: str) -> str:
        cfg = self.config
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = {
            "model": cfg.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": cfg.temperature,
        }
        last_error = "no attempt made"
        for attempt in range(cfg.max_retries + 1):
            if attempt:
                delay = min(cfg.backoff_max, cfg.backoff_base * 2 ** (attempt - 1))
                log.warning("retrying in %.1fs after: %s", delay, last_error)
                self._sleep(delay)
            try:
                response = self._client.post(cfg.url, headers=headers, json=payload)
            except httpx.TransportError as exc:
                last_error = f"{type(exc).__name__}: {exc}"
                continue
            if response.status_code >= 500 or response.status_code in _RETRY_STATUS:
                last_error = f"HTTP {response.status_code}"
                continue
            if response.status_code >= 400:
                raise RemoteUnavailable(f"HTTP {response.status_code}: {response.text[:200]}")
            try:
                return response.json()["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise MalformedReply(f"unexpected response body: {exc}") from exc
        raise RemoteUnavailable(f"gave up after {cfg.max_retries + 1} attempts: {last_error}")

    def classify(self, doc: DocumentPair) -> LabelSequence:
        prompt = build_prompt(doc.simplified_html, doc.config.item_attribute_name)
        reply = self.complete(prompt)
        labels = repair_labels(extract_json_object(reply), doc.n_blocks)
        for note in labels.diagnostics:
            log.info("reply repair: %s", note)
        return labels


def classify_remote(config: RemoteConfig, doc: DocumentPair, **kwargs) -> LabelSequence:
    with RemoteClassifier(config, **kwargs) as classifier:
        return classifier.classify(doc)
