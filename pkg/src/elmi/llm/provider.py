"""Chat-completion providers: a strict deterministic mock, and an
OpenAI-compatible HTTP client (see docs/http-provider.md)."""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Optional, Protocol, Sequence

from .ratelimit import TokenBucket

__all__ = [
    "TemperatureClass",
    "ChatExchange",
    "ProviderError",
    "MockMiss",
    "ChatProvider",
    "MockProvider",
    "HttpProvider",
    "mock_key",
    "exchange_from_rendered",
    "truncate_history",
    "complete",
]


class TemperatureClass(str, Enum):
    DETERMINISTIC = "deterministic"
    CREATIVE = "creative"


class ProviderError(Exception):
    def __init__(self, message: str, transient: bool = False):
        super().__init__(message)
        self.transient = transient


class MockMiss(ProviderError):
    """The strict mock has no scripted response for this key."""

    def __init__(self, key: str):
        super().__init__(f"mock table has no entry for key {key!r}", transient=False)
        self.key = key


@dataclass(frozen=True)
class ChatExchange:
    system: str
    history: tuple[tuple[str, str], ...] = ()  # (role, text), alternating from user
    temperature_class: TemperatureClass = TemperatureClass.DETERMINISTIC
    mock_key: Optional[str] = None  # set by exchange_from_rendered for table lookups

    def __post_init__(self) -> None:
        for position, (role, _) in enumerate(self.history):
            expected = "user" if position % 2 == 0 else "assistant"
            if role != expected:
                raise ValueError(
                    f"history must alternate roles starting with user; "
                    f"turn {position} is {role!r}"
                )


def stable_hash(values: Any) -> str:
    canonical = json.dumps(values, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def mock_key(template_id: str, values: dict[str, Any]) -> str:
    return f"{template_id}#{stable_hash(values)}"


def exchange_from_rendered(
    template_id: str,
    values: dict[str, Any],
    system: str,
    history: Sequence[tuple[str, str]] = (),
    temperature_class: TemperatureClass = TemperatureClass.DETERMINISTIC,
) -> ChatExchange:
    """Build an exchange carrying the deterministic mock lookup key."""
    return ChatExchange(
        system=system,
        history=tuple(history),
        temperature_class=temperature_class,
        mock_key=mock_key(template_id, values),
    )


class ChatProvider(Protocol):
    def complete(self, exchange: ChatExchange) -> str: ...


class MockProvider:
    """Pure function of its inputs: key -> scripted text (or a sequence of
    texts consumed call by call). Unknown keys fail loudly with MockMiss.
    Records every call for call-order and call-count assertions."""

    def __init__(self, table: dict[str, str | list[str]] | None = None):
        self._table: dict[str, str | list[str]] = dict(table or {})
        self._cursor: dict[str, int] = {}
        self._lock = threading.Lock()
        self.calls: list[str] = []

    def add(self, key: str, response: str | list[str]) -> None:
        with self._lock:
            self._table[key] = response

    def add_rendered(self, template_id: str, values: dict[str, Any], response: str | list[str]) -> None:
        self.add(mock_key(template_id, values), response)

    def complete(self, exchange: ChatExchange) -> str:
        key = exchange.mock_key or f"#{stable_hash([exchange.system, list(exchange.history)])}"
        with self._lock:
            self.calls.append(key)
            if key not in self._table:
                raise MockMiss(key)
            entry = self._table[key]
            if isinstance(entry, str):
                return entry
            position = self._cursor.get(key, 0)
            # a scripted sequence sticks at its last response
            position = min(position, len(entry) - 1)
            self._cursor[key] = position + 1
            return entry[position]

    def calls_for(self, template_id: str) -> list[str]:
        prefix = f"{template_id}#"
        return [k for k in self.calls if k.startswith(prefix)]

    @classmethod
    def from_json(cls, path) -> "MockProvider":
        with open(path, "r", encoding="utf-8") as fh:
            return cls(json.load(fh))


class HttpProvider:
    """OpenAI-compatible chat-completions client. Requests are rate limited
    with a token bucket; the deterministic class pins temperature to 0."""

    def __init__(
        self,
        base_url: str,
        api_key: str = "",
        model: str = "gpt-4o",
        requests_per_minute: int = 60,
        timeout: float = 60.0,
    ):
        import httpx

        self._client = httpx.Client(base_url=base_url, timeout=timeout)
        self._api_key = api_key
        self._model = model
        self._bucket = TokenBucket(rate_per_minute=requests_per_minute)

    def complete(self, exchange: ChatExchange) -> str:
        import httpx

        self._bucket.acquire()
        messages = [{"role": "system", "content": exchange.system}]
        messages += [
            {"role": role, "content": text} for role, text in exchange.history
        ]
        temperature = (
            0.0
            if exchange.temperature_class is TemperatureClass.DETERMINISTIC
            else 0.7
        )
        headers = {}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"
        try:
            response = self._client.post(
                "/v1/chat/completions",
                json={
                    "model": self._model,
                    "messages": messages,
                    "temperature": temperature,
                },
                headers=headers,
            )
        except httpx.TransportError as exc:
            raise ProviderError(str(exc), transient=True) from exc
        if response.status_code in (429, 500, 502, 503, 504):
            raise ProviderError(f"HTTP {response.status_code}", transient=True)
        if response.status_code != 200:
            raise ProviderError(f"HTTP {response.status_code}: {response.text[:200]}")
        body = response.json()
        try:
            return body["choices"][0]["message"]["content"]
        except (KeyError, IndexError) as exc:
            raise ProviderError(f"malformed completion payload: {body}") from exc


def complete(provider: ChatProvider, exchange: ChatExchange) -> str:
    """One completion; a single retry on transient failure."""
    try:
        return provider.complete(exchange)
    except ProviderError as exc:
        if not exc.transient:
            raise
        return provider.complete(exchange)


_SUMMARY_PREFIX = "Earlier discussion (summarized):"


def truncate_history(
    exchange: ChatExchange, max_turns: int = 20
) -> ChatExchange:
    """Keep the system prompt plus the most recent turns; older turns are
    folded into a deterministic extractive summary appended to the system
    prompt, so role alternation is preserved."""
    if len(exchange.history) <= max_turns:
        return exchange
    keep = max_turns
    # the kept window must start with a user turn
    while keep > 0 and exchange.history[len(exchange.history) - keep][0] != "user":
        keep -= 1
    dropped = exchange.history[: len(exchange.history) - keep]
    lines = [_SUMMARY_PREFIX]
    for role, text in dropped:
        snippet = " ".join(text.split())
        if len(snippet) > 80:
            snippet = snippet[:77] + "..."
        lines.append(f"- {role}: {snippet}")
    return replace(
        exchange,
        system=exchange.system + "\n\n" + "\n".join(lines),
        history=exchange.history[len(exchange.history) - keep :],
    )
