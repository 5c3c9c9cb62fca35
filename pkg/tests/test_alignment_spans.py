from elmi.alignment.matcher import LineMatch, MatchMethod
from elmi.alignment.spans import derive_line_spans
from elmi.textsources import SubtitleCue


def matched(i, cues, sim=1.0):
    return LineMatch(i, tuple(cues), sim, MatchMethod.FUZZY)


def interp(i):
    return LineMatch(i, (), 0.0, MatchMethod.INTERPOLATED)


def test_single_line_single_cue():
    cues = [SubtitleCue(1, 1000, 3500, "x")]
    spans = derive_line_spans([matched(0, [0])], cues, ["x"])
    assert spans == [(1000, 3500)]


def test_multi_cue_line_takes_envelope():
    cues = [SubtitleCue(1, 1000, 2000, "a"), SubtitleCue(2, 2500, 4000, "b")]
    spans = derive_line_spans([matched(0, [0, 1])], cues, ["a b"])
    assert spans == [(1000, 4000)]


def test_single_gap_occupant_takes_whole_gap():
    cues = [SubtitleCue(1, 1000, 2000, "a"), SubtitleCue(2, 6000, 7000, "b")]
    matches = [matched(0, [0]), interp(1), matched(2, [1])]
    spans = derive_line_spans(matches, cues, ["a", "0123456789", "b"])
    assert spans[1] == (2000, 6000)


def test_proportional_split_one_to_three():
    cues = [SubtitleCue(1, 1000, 2000, "a"), SubtitleCue(2, 6000, 7000, "b")]
    matches = [matched(0, [0]), interp(1), interp(2), matched(3, [1])]
    texts = ["a", "0123456789", "0" * 30, "b"]
    spans = derive_line_spans(matches, cues, texts)
    assert spans[1] == (2000, 3000)
    assert spans[2] == (3000, 6000)


def test_overlapping_matched_spans_split_at_midpoint():
    cues = [SubtitleCue(1, 1000, 3000, "a"), SubtitleCue(2, 2000, 4000, "b")]
    matches = [matched(0, [0]), matched(1, [1])]
    spans = derive_line_spans(matches, cues, ["a", "b"])
    assert spans == [(1000, 2500), (2500, 4000)]


def test_leading_and_trailing_runs_get_spans():
    cues = [SubtitleCue(1, 5000, 7000, "a")]
    matches = [interp(0), matched(1, [0]), interp(2)]
    spans = derive_line_spans(matches, cues, ["intro", "a", "outro"])
    assert spans[0] is not None and spans[0][1] == 5000
    assert spans[2] is not None and spans[2][0] == 7000


def test_no_matches_spreads_over_cue_range():
    cues = [SubtitleCue(1, 1000, 2000, "x"), SubtitleCue(2, 8000, 9000, "y")]
    matches = [interp(0), interp(1)]
    spans = derive_line_spans(matches, cues, ["aa", "bb"])
    assert spans[0] == (1000, 5000)
    assert spans[1] == (5000, 9000)


def test_spans_ordered_and_disjoint():
    cues = [
        SubtitleCue(1, 0, 1000, "a"),
        SubtitleCue(2, 900, 2000, "b"),
        SubtitleCue(3, 1900, 2800, "c"),
    ]
    matches = [matched(0, [0]), interp(1), matched(2, [1]), matched(3, [2])]
    spans = derive_line_spans(matches, cues, ["a", "gap", "b", "c"])
    flat = [s for s in spans if s]
    for (a1, b1), (a2, b2) in zip(flat, flat[1:]):
        assert b1 <= a2
        assert a1 < b1 and a2 < b2
