from fractions import Fraction
from itertools import combinations, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elmi.core import BothEmpty, manual_sign_set, overlap_coefficient, tokenize_gloss


def brute_force_overlap(a, b):
    """Independent oracle: count intersection by nested membership scan."""
    a, b = set(a), set(b)
    if not a or not b:
        return Fraction(0)
    inter = sum(1 for x in a if x in b)
    return Fraction(inter, min(len(a), len(b)))


def test_identical_sets():
    assert overlap_coefficient({"X", "Y"}, {"X", "Y"}) == 1


def test_disjoint_sets():
    assert overlap_coefficient({"X"}, {"Y"}) == 0


def test_two_thirds_pair():
    a = {"ME", "SAME-AS", "BUTTER", "SMOOTH"}
    b = {"SMOOTH", "LIKE", "BUTTER"}
    assert overlap_coefficient(a, b) == Fraction(2, 3)
    assert overlap_coefficient(b, a) == Fraction(2, 3)


def test_both_empty_raises():
    with pytest.raises(BothEmpty):
        overlap_coefficient(set(), set())


def test_one_empty_is_zero():
    assert overlap_coefficient(set(), {"X"}) == 0


def test_subset_gives_one():
    assert overlap_coefficient({"A"}, {"A", "B", "C"}) == 1


def test_exhaustive_small_alphabet_against_oracle():
    # Every pair of subsets (size <= 5) of a 6-word alphabet.
    alphabet = ["ART", "BEAT", "CALM", "DRUM", "ECHO", "FLOW"]
    subsets = [
        frozenset(c)
        for size in range(0, 6)
        for c in combinations(alphabet, size)
    ]
    for a, b in product(subsets, repeat=2):
        if not a and not b:
            continue
        assert overlap_coefficient(a, b) == brute_force_overlap(a, b)


_words = st.frozensets(st.sampled_from("abcdefgh"), max_size=8)


@settings(max_examples=300, deadline=None)
@given(_words, _words)
def test_symmetry_and_bounds(a, b):
    if not a and not b:
        return
    value = overlap_coefficient(a, b)
    assert value == overlap_coefficient(b, a)
    assert 0 <= value <= 1
    assert (value == 0) == (not (a & b))
    if a and b and (a <= b or b <= a):
        assert value == 1


def test_manual_sign_set_excludes_nms_and_classifiers():
    tokens = tokenize_gloss('GUN [LCL"shoot"] CL-5 (x) F-S \'A-B\'')
    surfaces = manual_sign_set(tokens)
    assert "gun" in surfaces
    assert "f-s 'a-b'" in surfaces
    assert len(surfaces) == 2
