"""Per-line discussion engine: intent routing, gloss-aware prompt selection,
proactive openers, and inline gloss suggestions."""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass
from importlib import resources
from typing import TYPE_CHECKING, Any, Optional

from ..analysis.models import LineAnnotation
from ..core import ProjectStatus
from ..core.textnorm import normalize_text, normalized_tokens
from ..llm import (
    ChatExchange,
    ChatProvider,
    PromptTemplate,
    ProviderError,
    TemperatureClass,
    complete,
    mock_key,
    render,
    truncate_history,
)
from ..llm.provider import exchange_from_rendered
from .models import ChatMessage, ChatThread, Intent, MessageOrigin, MessageRole, ThreadOpener
from .persona import enforce_persona

if TYPE_CHECKING:
    from ..store import Store

logger = logging.getLogger(__name__)

__all__ = [
    "Busy",
    "NotReady",
    "NotNoteworthy",
    "TurnResult",
    "ChatEngine",
    "classifier_values",
    "turn_values",
    "opener_values",
    "load_prompt_catalog",
]

APOLOGY_REPLY = (
    "Sorry, I could not reach the assistant just now. Your message is saved; "
    "please try again in a moment."
)

_TEMPLATE_IDS = (
    "meaning",
    "glossing_base",
    "glossing_refine",
    "emoting_base",
    "emoting_refine",
    "timing_base",
    "timing_refine",
    "proactive_opener",
    "intent_classifier",
)

_REQUIRED = {
    "meaning": frozenset({"title", "artist", "lyric line", "user name", "sign language"}),
    "glossing_base": frozenset({"title", "artist", "lyric line", "user name", "sign language"}),
    "glossing_refine": frozenset({"title", "artist", "lyric line", "user name", "sign language"}),
    "emoting_base": frozenset({"title", "artist", "lyric line", "user name", "sign language"}),
    "emoting_refine": frozenset({"title", "artist", "lyric line", "user name", "sign language"}),
    "timing_base": frozenset({"title", "artist", "lyric line", "user name", "sign language"}),
    "timing_refine": frozenset({"title", "artist", "lyric line", "user name", "sign language"}),
    "proactive_opener": frozenset({"title", "artist", "lyric line", "user name", "challenge summary"}),
    "intent_classifier": frozenset({"message"}),
}


class Busy(Exception):
    """A turn is already in flight for this thread."""


class NotReady(Exception):
    """Preprocessing has not produced the required artifacts yet."""


class NotNoteworthy(Exception):
    """Proactive threads are only allowed on flagged lines."""


def load_prompt_catalog() -> dict[str, PromptTemplate]:
    catalog: dict[str, PromptTemplate] = {}
    root = resources.files("elmi.chat") / "prompts"
    for template_id in _TEMPLATE_IDS:
        body = (root / f"{template_id}.txt").read_text(encoding="utf-8")
        catalog[template_id] = PromptTemplate(template_id, body, _REQUIRED[template_id])
    return catalog


def classifier_values(message: str) -> dict[str, Any]:
    return {"message": message}


def turn_values(
    template_id: str,
    line_index: int,
    line_text: str,
    message: str,
    turn: int,
    user_gloss: str,
) -> dict[str, Any]:
    """The deterministic identity of one chat turn, for mock keying."""
    return {
        "template": template_id,
        "line_index": line_index,
        "line": line_text,
        "message": message,
        "turn": turn,
        "user_gloss": user_gloss,
    }


def opener_values(line_index: int, line_text: str, summary: str) -> dict[str, Any]:
    return {"line_index": line_index, "line": line_text, "summary": summary}


@dataclass(frozen=True)
class TurnResult:
    message: ChatMessage
    intent: Intent
    classifier_fallback: bool = False
    retryable: bool = False


class ChatEngine:
    """Turns within a thread are strictly serialized; threads are independent."""

    def __init__(self, store: "Store", provider: ChatProvider):
        self.store = store
        self.provider = provider
        self.catalog = load_prompt_catalog()
        self._turn_locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    # -- helpers ---------------------------------------------------------------

    def _lock_for(self, thread_id: str) -> threading.Lock:
        with self._locks_guard:
            if thread_id not in self._turn_locks:
                self._turn_locks[thread_id] = threading.Lock()
            return self._turn_locks[thread_id]

    def _annotation(self, project_id: str, line_index: int) -> LineAnnotation:
        annotations = {a.line_index: a for a in self.store.load_annotations(project_id)}
        if line_index not in annotations:
            raise NotReady(f"line {line_index} has no analysis yet")
        return annotations[line_index]

    def _line_text(self, project_id: str, line_index: int) -> str:
        timed = self.store.load_timed_lyric(project_id)
        return timed.line(line_index).text

    def _base_values(self, project_id: str, line_index: int) -> dict[str, str]:
        project = self.store.load_project(project_id)
        return {
            "title": project.title,
            "artist": project.artist,
            "user name": project.user_profile.nickname,
            "sign language": project.sign_language.value,
            "lyric line": self._line_text(project_id, line_index),
        }

    def _context_block(
        self,
        annotation: Optional[LineAnnotation],
        user_gloss: str,
    ) -> str:
        parts = ["Context for this line:"]
        if annotation is not None:
            note = annotation.challenge
            if note.noteworthy:
                parts.append(f"- Inspection note ({note.kind.value}): {note.summary}")
                if note.needs_fingerspelling_hint:
                    parts.append("- A proper noun here may need fingerspelling.")
            parts.append(f"- Draft gloss: {annotation.base_gloss}")
            parts.append(
                "- Length variants: shorter "
                f"{annotation.alt_glosses.shorter!r}, alternative "
                f"{annotation.alt_glosses.base_alt!r}, longer "
                f"{annotation.alt_glosses.longer!r}"
            )
            if annotation.mood_hashtags:
                parts.append("- Mood: " + " ".join(annotation.mood_hashtags))
        if user_gloss:
            parts.append(f"- The user's own gloss: {user_gloss}")
        return "\n".join(parts)

    @staticmethod
    def _fold_history(messages: tuple[ChatMessage, ...]) -> tuple[tuple[str, str], ...]:
        """Thread messages as alternating provider turns starting with user.

        A leading assistant opener becomes part of the first user turn's
        preamble; consecutive same-role messages merge.
        """
        turns: list[tuple[str, str]] = []
        preamble = ""
        for message in messages:
            role = message.role.value
            if not turns:
                if role == "assistant":
                    preamble += message.text + "\n\n"
                    continue
                text = (
                    f"(You previously opened this discussion with:\n{preamble.strip()})\n\n"
                    + message.text
                    if preamble
                    else message.text
                )
                turns.append(("user", text))
                preamble = ""
                continue
            if turns[-1][0] == role:
                turns[-1] = (role, turns[-1][1] + "\n\n" + message.text)
            else:
                turns.append((role, message.text))
        if turns and turns[-1][0] == "assistant":
            turns.pop()
        return tuple(turns)

    # -- operations ------------------------------------------------------------

    def classify_intent(self, message: str) -> tuple[Intent, bool]:
        """One provider call; any failure falls back to Meaning with a flag."""
        template = self.catalog["intent_classifier"]
        values = classifier_values(message)
        rendered = render(template, {"message": message})
        exchange = exchange_from_rendered(
            "intent_classifier",
            values,
            system=rendered,
            history=(("user", message),),
        )
        try:
            raw = self.provider.complete(exchange)
        except ProviderError as exc:
            logger.warning("intent classifier unavailable (%s); defaulting to Meaning", exc)
            return Intent.MEANING, True
        parsed = _parse_intent(raw)
        if parsed is None:
            logger.warning("unparseable classifier output %r; defaulting to Meaning", raw)
            return Intent.MEANING, True
        return parsed, False

    def noteworthy_lines(self, project_id: str) -> set[int]:
        artifact = self.store.load_stage_artifact(project_id, "line_inspector")
        if artifact is None:
            raise NotReady("line inspection has not completed")
        _, notes = artifact
        return {n["line_index"] for n in notes if n["kind"] != "none"}

    def open_thread(self, project_id: str, line_index: int, proactive: bool) -> ChatThread:
        """Proactive threads require a flagged line and seed a Meaning opener."""
        if not proactive:
            return self.store.create_thread(project_id, line_index, ThreadOpener.USER)

        annotation = self._annotation(project_id, line_index)
        note = annotation.challenge
        if not note.noteworthy:
            raise NotNoteworthy(f"line {line_index} has no challenge note")
        thread = self.store.create_thread(project_id, line_index, ThreadOpener.PROACTIVE)
        values = opener_values(line_index, self._line_text(project_id, line_index), note.summary)
        base = self._base_values(project_id, line_index)
        rendered = render(
            self.catalog["proactive_opener"],
            {**base, "challenge summary": note.summary},
        )
        exchange = exchange_from_rendered(
            "proactive_opener",
            values,
            system=rendered + "\n\n" + self._context_block(annotation, ""),
            history=(("user", "Please open the discussion for this line."),),
            temperature_class=TemperatureClass.CREATIVE,
        )
        text = complete(self.provider, exchange)
        text = enforce_persona(self.provider, exchange, text, Intent.MEANING)
        self.store.append_message(
            thread.id, MessageRole.ASSISTANT, text, MessageOrigin.PROACTIVE, Intent.MEANING
        )
        return self.store.load_thread(thread.id)

    def handle_turn(
        self,
        thread_id: str,
        text: Optional[str] = None,
        shortcut_intent: Optional[Intent] = None,
    ) -> TurnResult:
        """One user turn in, one persisted assistant reply out."""
        if (text is None) == (shortcut_intent is None):
            raise ValueError("provide exactly one of text or shortcut_intent")
        lock = self._lock_for(thread_id)
        if not lock.acquire(blocking=False):
            raise Busy(thread_id)
        try:
            return self._handle_turn_locked(thread_id, text, shortcut_intent)
        finally:
            lock.release()

    def _handle_turn_locked(
        self,
        thread_id: str,
        text: Optional[str],
        shortcut_intent: Optional[Intent],
    ) -> TurnResult:
        thread = self.store.load_thread(thread_id)
        project_id, line_index = thread.project_id, thread.line_index

        fallback = False
        if shortcut_intent is not None:
            intent = shortcut_intent
            user_text = f"[{intent.value}] Let's discuss this line."
            origin = MessageOrigin.SHORTCUT
        else:
            assert text is not None
            intent, fallback = self.classify_intent(text)
            user_text = text
            origin = MessageOrigin.MANUAL

        user_message = self.store.append_message(
            thread.id, MessageRole.USER, user_text, origin, intent
        )

        annotation: Optional[LineAnnotation]
        try:
            annotation = self._annotation(project_id, line_index)
        except NotReady:
            annotation = None
        gloss = self.store.latest_gloss(project_id, line_index)
        user_gloss = gloss.raw if gloss else ""

        template_id = _select_template(intent, bool(user_gloss))
        base = self._base_values(project_id, line_index)
        rendered = render(self.catalog[template_id], base)
        system = rendered + "\n\n" + self._context_block(annotation, user_gloss)

        values = turn_values(
            template_id,
            line_index,
            base["lyric line"],
            user_text,
            user_message.seq,
            user_gloss,
        )
        history = self._fold_history(self.store.load_thread(thread_id).messages)
        exchange = truncate_history(
            ChatExchange(
                system=system,
                history=history,
                temperature_class=TemperatureClass.CREATIVE,
                mock_key=mock_key(template_id, values),
            )
        )
        try:
            reply = complete(self.provider, exchange)
        except ProviderError:
            message = self.store.append_message(
                thread.id, MessageRole.ASSISTANT, APOLOGY_REPLY, MessageOrigin.REPLY, intent
            )
            return TurnResult(message, intent, fallback, retryable=True)
        reply = enforce_persona(self.provider, exchange, reply, intent)
        message = self.store.append_message(
            thread.id, MessageRole.ASSISTANT, reply, MessageOrigin.REPLY, intent
        )
        return TurnResult(message, intent, fallback)

    def suggest_inline(self, project_id: str, line_index: int, partial: str) -> list[str]:
        """One or two alternative glosses for the editor's current input.

        Callers should debounce to at most two calls per second per line;
        the method itself is cheap (precomputed alternatives only).
        """
        project = self.store.load_project(project_id)
        if project.status is ProjectStatus.FAILED:
            raise NotReady("preprocessing failed")
        annotation = self._annotation(project_id, line_index)
        alt = annotation.alt_glosses
        pool = [alt.base_alt, alt.shorter, alt.longer, annotation.base_gloss]
        # drop duplicates inside the pool itself, keeping rank
        seen: set[str] = set()
        unique_pool = []
        for candidate in pool:
            key = normalize_text(candidate)
            if key and key not in seen:
                seen.add(key)
                unique_pool.append(candidate)
        if not partial.strip():
            return unique_pool[:2]
        partial_tokens = normalized_tokens(partial)
        partial_key = normalize_text(partial)
        ranked = sorted(
            (c for c in unique_pool if normalize_text(c) != partial_key),
            key=lambda c: -_token_similarity(partial_tokens, normalized_tokens(c)),
        )
        return ranked[:2]

    def thread_summaries(self, project_id: str) -> list[dict[str, Any]]:
        """Condensed view of every thread, for the global-mode panel."""
        out = []
        for thread in self.store.list_threads(project_id):
            last = thread.messages[-1] if thread.messages else None
            out.append(
                {
                    "id": thread.id,
                    "line_index": thread.line_index,
                    "opened_by": thread.opened_by.value,
                    "message_count": len(thread.messages),
                    "last_text": (last.text[:120] if last else ""),
                    "last_intent": (last.intent.value if last and last.intent else None),
                }
            )
        return out


def _token_similarity(a: list[str], b: list[str]) -> float:
    if not a and not b:
        return 0.0
    from collections import Counter

    inter = sum((Counter(a) & Counter(b)).values())
    return 2 * inter / (len(a) + len(b))


def _select_template(intent: Intent, has_user_gloss: bool) -> str:
    if intent is Intent.MEANING:
        return "meaning"
    suffix = "refine" if has_user_gloss else "base"
    return f"{intent.value.lower()}_{suffix}"


def _parse_intent(raw: str) -> Optional[Intent]:
    stripped = raw.strip()
    try:
        record = json.loads(stripped if not stripped.startswith("```") else stripped.strip("`"))
        if isinstance(record, dict) and "intent" in record:
            stripped = str(record["intent"])
    except (json.JSONDecodeError, ValueError):
        pass
    for intent in Intent:
        if stripped.strip().strip('"').lower() == intent.value.lower():
            return intent
    return None
