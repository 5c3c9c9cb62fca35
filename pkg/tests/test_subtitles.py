import pytest

from elmi.textsources import (
    EmptyDocument,
    MalformedTimestamp,
    SubtitleFormat,
    parse_subtitles,
    serialize_cues,
)

VTT_BASIC = b"""WEBVTT

00:00:01.000 --> 00:00:03.500
Smooth like butter

00:00:04.000 --> 00:00:06.000
Like a criminal undercover
"""

SRT_BASIC = b"""1
00:00:01,000 --> 00:00:03,500
Smooth like butter

2
00:00:04,000 --> 00:00:06,000
Like a criminal undercover
"""


def test_vtt_block():
    result = parse_subtitles(VTT_BASIC, SubtitleFormat.VTT)
    assert len(result.cues) == 2
    first = result.cues[0]
    assert (first.start_ms, first.end_ms, first.text) == (1000, 3500, "Smooth like butter")
    assert result.warnings == ()


def test_srt_block():
    result = parse_subtitles(SRT_BASIC, SubtitleFormat.SRT)
    first = result.cues[0]
    assert (first.start_ms, first.end_ms, first.text) == (1000, 3500, "Smooth like butter")


def test_styling_tags_stripped():
    data = b"WEBVTT\n\n00:00:01.000 --> 00:00:02.000\n<i>Break it down</i>\n"
    result = parse_subtitles(data, SubtitleFormat.VTT)
    assert result.cues[0].text == "Break it down"


def test_multirow_text_joined_with_space():
    data = b"WEBVTT\n\n00:00:01.000 --> 00:00:02.000\nBreak it\ndown\n"
    result = parse_subtitles(data, SubtitleFormat.VTT)
    assert result.cues[0].text == "Break it down"


def test_rollup_duplicates_merged():
    data = (
        b"WEBVTT\n\n"
        b"00:00:01.000 --> 00:00:03.000\nSame text\n\n"
        b"00:00:02.000 --> 00:00:04.000\nSame text\n\n"
        b"00:00:04.000 --> 00:00:05.000\nOther text\n"
    )
    result = parse_subtitles(data, SubtitleFormat.VTT)
    assert len(result.cues) == 2
    assert (result.cues[0].start_ms, result.cues[0].end_ms) == (1000, 4000)


def test_overlap_flagged_not_merged():
    data = (
        b"WEBVTT\n\n"
        b"00:00:01.000 --> 00:00:03.000\nFirst\n\n"
        b"00:00:02.000 --> 00:00:04.000\nSecond\n"
    )
    result = parse_subtitles(data, SubtitleFormat.VTT)
    assert len(result.cues) == 2
    assert len(result.warnings) == 1


def test_malformed_timestamp_reports_line():
    data = b"WEBVTT\n\n00:00:xx.000 --> 00:00:02.000\nText\n"
    with pytest.raises(MalformedTimestamp) as exc:
        parse_subtitles(data, SubtitleFormat.VTT)
    assert exc.value.line_number == 3


def test_empty_document():
    with pytest.raises(EmptyDocument):
        parse_subtitles(b"WEBVTT\n", SubtitleFormat.VTT)


def test_cue_settings_dropped():
    data = b"WEBVTT\n\n00:00:01.000 --> 00:00:02.000 position:50% line:0\nHi there\n"
    result = parse_subtitles(data, SubtitleFormat.VTT)
    assert (result.cues[0].start_ms, result.cues[0].end_ms) == (1000, 2000)


@pytest.mark.parametrize("fmt", [SubtitleFormat.VTT, SubtitleFormat.SRT])
def test_serialize_parse_fixed_point(fmt):
    source = VTT_BASIC if fmt is SubtitleFormat.VTT else SRT_BASIC
    first = parse_subtitles(source, fmt)
    text = serialize_cues(list(first.cues), fmt)
    second = parse_subtitles(text.encode("utf-8"), fmt)
    assert second.cues == first.cues
    # serializing again is byte-identical
    assert serialize_cues(list(second.cues), fmt) == text


def test_cues_sorted_by_start():
    data = (
        b"WEBVTT\n\n"
        b"00:00:05.000 --> 00:00:06.000\nLater\n\n"
        b"00:00:01.000 --> 00:00:02.000\nEarlier\n"
    )
    result = parse_subtitles(data, SubtitleFormat.VTT)
    assert [c.text for c in result.cues] == ["Earlier", "Later"]
    assert [c.index for c in result.cues] == [1, 2]
