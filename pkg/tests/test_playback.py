import random

import pytest

from elmi.core import LyricLine, TimedLyric, TimedWord
from elmi.service.playback import PlayMode, PlaybackState, resolve_playback


def make_timed():
    return TimedLyric(
        (
            LyricLine(
                0,
                "Verse 1",
                "first line here",
                (1000, 3500),
                (
                    TimedWord("first", 1000, 300),
                    TimedWord("line", 2000, 300),
                    TimedWord("here", 2600, 300),
                ),
            ),
            LyricLine(
                1,
                "Verse 1",
                "second line",
                (3500, 5000),
                (TimedWord("second", 3500, 400), TimedWord("line", 4200, 400)),
            ),
        )
    )


def test_t_before_first_span():
    state = resolve_playback("p", make_timed(), 500)
    assert state.active_line is None
    assert state.active_word is None


def test_active_word_is_last_started():
    state = resolve_playback("p", make_timed(), 2100)
    assert state.active_line == 0
    assert state.active_word == 1


def test_boundary_tie_goes_to_later_line():
    state = resolve_playback("p", make_timed(), 3500)
    assert state.active_line == 1
    assert state.active_word == 0


def test_t_past_end_resolves_to_nothing():
    state = resolve_playback("p", make_timed(), 9000)
    assert state.active_line is None


def test_loop_wrap_example():
    # ((4000 - 1000) mod 2500) + 1000 = 1500
    state = resolve_playback(
        "p", make_timed(), 4000, PlayMode.LINE_LOOP, loop_line=0
    )
    assert state.t_ms == 1500
    assert state.active_line == 0
    assert state.active_word == 0


def test_line_loop_requires_loop_line():
    with pytest.raises(ValueError):
        resolve_playback("p", make_timed(), 0, PlayMode.LINE_LOOP, None)
    with pytest.raises(ValueError):
        PlaybackState("p", 0, None, None, PlayMode.LINE_LOOP, None)


def random_timed(rng):
    lines = []
    t = rng.randint(0, 500)
    for i in range(rng.randint(1, 6)):
        start = t
        words = []
        wt = start
        for _ in range(rng.randint(1, 6)):
            duration = rng.randint(50, 300)
            words.append(TimedWord(f"w{wt}", wt, duration))
            wt += duration + rng.randint(0, 100)
        end = wt + rng.randint(1, 200)
        lines.append(LyricLine(i, "S", "x " * len(words), (start, end), tuple(words)))
        t = end + rng.randint(0, 400)
    return TimedLyric(tuple(lines))


def test_active_word_property_random():
    rng = random.Random(5)
    for _ in range(200):
        timed = random_timed(rng)
        total_span = (timed.lines[0].span[0], timed.lines[-1].span[1])
        for _ in range(20):
            t = rng.randint(total_span[0] - 100, total_span[1] + 100)
            state = resolve_playback("p", timed, t)
            if state.active_word is None:
                continue
            words = timed.line(state.active_line).words
            word = words[state.active_word]
            assert word.start_ms <= t
            if state.active_word + 1 < len(words):
                assert t < words[state.active_word + 1].start_ms


def test_emphasis_monotone_within_line():
    timed = make_timed()
    previous = -1
    for t in range(1000, 3500, 25):
        state = resolve_playback("p", timed, t)
        assert state.active_line == 0
        word = state.active_word if state.active_word is not None else -1
        assert word >= previous
        previous = word
