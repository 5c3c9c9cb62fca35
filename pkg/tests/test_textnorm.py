import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elmi.core import normalize_text, normalized_tokens


@pytest.mark.parametrize(
    "raw,expected",
    [
        ("Smooth like butter", "smooth like butter"),
        ("Gon' pop like trouble", "gon' pop like trouble"),
        ("  Break   it down!! ", "break it down"),
        ("I'm makin' you sweat", "i'm makin' you sweat"),
        ("SAME-AS", "same-as"),
        ("well - known", "well known"),
        ("'Cause I, I, I'm in it", "'cause i i i'm in it"),
        ("", ""),
        ("’Cause it’s hot", "'cause it's hot"),
        ("end.Start", "end start"),
    ],
)
def test_normalize_examples(raw, expected):
    assert normalize_text(raw) == expected


def test_tokens():
    assert normalized_tokens("Break it down!!") == ["break", "it", "down"]
    assert normalized_tokens("") == []


@settings(max_examples=500, deadline=None)
@given(st.text(max_size=60))
def test_idempotent(raw):
    once = normalize_text(raw)
    assert normalize_text(once) == once


@settings(max_examples=200, deadline=None)
@given(st.text(max_size=60))
def test_output_shape(raw):
    out = normalize_text(raw)
    assert out == out.strip()
    assert "  " not in out
    assert out == out.lower()
