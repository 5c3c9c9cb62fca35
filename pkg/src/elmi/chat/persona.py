"""Post-validation of assistant replies.

Prompt-level instructions alone are unreliable, so replies are checked and
repaired: at most two question marks per reply, and timing replies carry no
digits (timing advice stays qualitative).
"""

from __future__ import annotations

import re

from ..llm import ChatExchange, ChatProvider, ProviderError
from .models import Intent

__all__ = ["MAX_QUESTIONS", "enforce_persona", "limit_questions", "strip_digit_sentences"]

MAX_QUESTIONS = 2

_SENTENCE_RE = re.compile(r"[^.!?\n]*[.!?]?\s*", re.DOTALL)

FALLBACK_TIMING_REPLY = (
    "Try signing the line along with the loop: the shorter variant should "
    "feel quick, the longer one more stretched. Which pacing feels closest "
    "to the music to you?"
)


def _sentences(text: str) -> list[str]:
    out = []
    for match in _SENTENCE_RE.finditer(text):
        chunk = match.group(0)
        if chunk.strip():
            out.append(chunk)
    return out


def limit_questions(text: str, limit: int = MAX_QUESTIONS) -> str:
    """Keep the first ``limit`` question sentences plus every non-question."""
    if text.count("?") <= limit:
        return text
    kept: list[str] = []
    questions = 0
    for sentence in _sentences(text):
        marks = sentence.count("?")
        if marks == 0:
            kept.append(sentence)
        elif questions + marks <= limit:
            kept.append(sentence)
            questions += marks
    result = "".join(kept).strip()
    return result if result else text.split("?")[0].strip() + "?"


def strip_digit_sentences(text: str) -> str:
    """Drop sentences containing digits; empty results get a canned reply."""
    if not re.search(r"\d", text):
        return text
    kept = [s for s in _sentences(text) if not re.search(r"\d", s)]
    result = "".join(kept).strip()
    return result if result else FALLBACK_TIMING_REPLY


def enforce_persona(
    provider: ChatProvider,
    exchange: ChatExchange,
    reply: str,
    intent: Intent | None,
) -> str:
    """Regenerate once on a violation, then repair deterministically."""
    needs_retry = reply.count("?") > MAX_QUESTIONS or (
        intent is Intent.TIMING and re.search(r"\d", reply)
    )
    if needs_retry:
        try:
            reply = provider.complete(exchange)
        except ProviderError:
            pass  # keep the first reply and repair it below
    if reply.count("?") > MAX_QUESTIONS:
        reply = limit_questions(reply)
    if intent is Intent.TIMING:
        reply = strip_digit_sentences(reply)
    if reply.count("?") > MAX_QUESTIONS:
        reply = limit_questions(reply)
    return reply
