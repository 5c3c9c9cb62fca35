"""Matcher tests: exhaustive-search equivalence and monotonicity."""

import random
from fractions import Fraction

from elmi.alignment.matcher import (
    LineMatch,
    MatchMethod,
    match_cues_to_lines,
    optimal_monotone_assignment,
    token_set_ratio,
)
from elmi.textsources import SubtitleCue, parse_lyrics


def brute_force_best_total(line_tokens, cue_tokens):
    """Enumerate every monotone assignment; no shared machinery with the DP."""
    n, m = len(line_tokens), len(cue_tokens)
    sims = {}
    for i in range(n):
        for a in range(m):
            merged = []
            for b in range(a, m):
                merged = merged + list(cue_tokens[b])
                sims[(i, a, b)] = token_set_ratio(line_tokens[i], merged)

    best = Fraction(0)

    def recurse(i, next_cue, total):
        nonlocal best
        if i == n:
            if total > best:
                best = total
            return
        recurse(i + 1, next_cue, total)
        for a in range(next_cue, m):
            for b in range(a, m):
                recurse(i + 1, b + 1, total + sims[(i, a, b)])

    recurse(0, 0, Fraction(0))
    return best


def _cues(texts, start=0, width=1000, gap=500):
    cues = []
    t = start
    for i, text in enumerate(texts):
        cues.append(SubtitleCue(i + 1, t, t + width, text))
        t += width + gap
    return cues


def test_token_set_ratio_examples():
    assert token_set_ratio(["a", "b"], ["a", "b"]) == 1
    assert token_set_ratio(["a"], ["b"]) == 0
    assert token_set_ratio(["a", "b"], ["a"]) == Fraction(2, 3)
    assert token_set_ratio([], []) == 0


def test_identical_cue_is_exact():
    doc = parse_lyrics("Smooth like butter")
    matches = match_cues_to_lines(_cues(["Smooth like butter"]), doc)
    assert matches[0].method == MatchMethod.EXACT
    assert matches[0].similarity == 1.0
    assert matches[0].cue_indices == (0,)


def test_noisy_cue_matches_first_line_only():
    doc = parse_lyrics("Smooth like butter\nLike a criminal undercover")
    matches = match_cues_to_lines(_cues(["smooth like butter smooth like"]), doc)
    assert matches[0].method == MatchMethod.FUZZY
    assert matches[0].cue_indices == (0,)
    assert matches[1].method == MatchMethod.INTERPOLATED


def test_repeated_chorus_monotone():
    doc = parse_lyrics("Break it down\nOther line\nBreak it down")
    matches = match_cues_to_lines(
        _cues(["Break it down", "Other line", "Break it down"]), doc
    )
    assert [m.cue_indices for m in matches] == [(0,), (1,), (2,)]


def test_line_spanning_two_cues():
    doc = parse_lyrics("High like the moon rock with me baby")
    matches = match_cues_to_lines(
        _cues(["High like the moon", "rock with me baby"]), doc
    )
    assert matches[0].cue_indices == (0, 1)
    assert matches[0].method == MatchMethod.EXACT


def test_monotonicity_invariant_on_random_instances():
    rng = random.Random(7)
    vocab = ["sun", "moon", "dance", "beat", "glow", "night", "fire", "cold"]
    for _ in range(50):
        lines = [
            " ".join(rng.choices(vocab, k=rng.randint(1, 4)))
            for _ in range(rng.randint(1, 8))
        ]
        cue_texts = [
            " ".join(rng.choices(vocab, k=rng.randint(1, 4)))
            for _ in range(rng.randint(1, 8))
        ]
        doc = parse_lyrics("\n".join(lines))
        matches = match_cues_to_lines(_cues(cue_texts), doc)
        used = [m for m in matches if m.cue_indices]
        for earlier, later in zip(used, used[1:]):
            assert max(earlier.cue_indices) < min(later.cue_indices)
        for m in used:
            ordered = list(m.cue_indices)
            assert ordered == list(range(ordered[0], ordered[-1] + 1))


def test_dp_equals_brute_force_on_random_instances():
    rng = random.Random(2024)
    vocab = ["ab", "cd", "ef", "gh", "ij", "kl"]
    instances = 0
    while instances < 500:
        n, m = rng.randint(1, 6), rng.randint(1, 6)
        line_tokens = [
            tuple(rng.choices(vocab, k=rng.randint(0, 4))) for _ in range(n)
        ]
        cue_tokens = [
            tuple(rng.choices(vocab, k=rng.randint(0, 4))) for _ in range(m)
        ]
        _, dp_total = optimal_monotone_assignment(line_tokens, cue_tokens)
        oracle = brute_force_best_total(line_tokens, cue_tokens)
        assert dp_total == oracle, (line_tokens, cue_tokens)
        instances += 1


def test_dp_equals_brute_force_on_adversarial_repeats():
    # Repeated identical lines and cues force heavy tie-breaking.
    line_tokens = [("a", "b")] * 4 + [("c",)] * 2
    cue_tokens = [("a",), ("a", "b"), ("c",), ("a", "b"), ("c",), ("b",)]
    _, dp_total = optimal_monotone_assignment(line_tokens, cue_tokens)
    assert dp_total == brute_force_best_total(line_tokens, cue_tokens)


def test_llm_fallback_applied_to_ambiguous_region():
    doc = parse_lyrics("Clear opening line\nxxxx yyyy\nClear closing line")
    cues = _cues(["Clear opening line", "zzzz wwww", "Clear closing line"])

    def fallback(lines, window):
        assert [idx for idx, _ in lines] == [1]
        assert [idx for idx, _ in window] == [1]
        return {1: [1]}

    matches = match_cues_to_lines(cues, doc, llm_fallback=fallback)
    assert matches[1].method == MatchMethod.LLM_FALLBACK
    assert matches[1].cue_indices == (1,)


def test_llm_fallback_invalid_mapping_discarded():
    doc = parse_lyrics("Clear opening line\nxxxx yyyy\nClear closing line")
    cues = _cues(["Clear opening line", "zzzz wwww", "Clear closing line"])

    def bad_fallback(lines, window):
        return {1: [0]}  # cue 0 belongs to an accepted neighbour

    matches = match_cues_to_lines(cues, doc, llm_fallback=bad_fallback)
    assert matches[1].method == MatchMethod.INTERPOLATED


def test_all_lines_interpolated_when_nothing_matches():
    doc = parse_lyrics("aaa bbb\nccc ddd")
    matches = match_cues_to_lines(_cues(["zzz yyy"]), doc)
    assert all(m.method == MatchMethod.INTERPOLATED for m in matches)
    assert all(isinstance(m, LineMatch) for m in matches)
