from .provider import (
    ChatExchange,
    ChatProvider,
    HttpProvider,
    MockMiss,
    MockProvider,
    ProviderError,
    TemperatureClass,
    complete,
    exchange_from_rendered,
    mock_key,
    truncate_history,
)
from .ratelimit import TokenBucket
from .structured import (
    FieldSpec,
    StructuredResult,
    StructuredSpec,
    ValidationExhausted,
    complete_structured,
)
from .templates import MissingPlaceholder, PromptTemplate, render

__all__ = [
    "ChatExchange",
    "ChatProvider",
    "FieldSpec",
    "HttpProvider",
    "MissingPlaceholder",
    "MockMiss",
    "MockProvider",
    "PromptTemplate",
    "ProviderError",
    "StructuredResult",
    "StructuredSpec",
    "TemperatureClass",
    "TokenBucket",
    "ValidationExhausted",
    "complete",
    "complete_structured",
    "exchange_from_rendered",
    "mock_key",
    "render",
    "truncate_history",
]
