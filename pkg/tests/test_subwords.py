import random

import pytest
from hypothesis import given, strategies as st

from phonebias.errors import FormatError, UnsegmentableWord
from phonebias.lexicon import Lexicon
from phonebias.subwords import (
    SamplerConfig,
    WordpieceInventory,
    is_word_initial,
    loads_wordpieces,
    phoneme_presentation_prob,
    sample_target_sequence,
    strip_markers,
    tokenize_wordpieces,
    wordpiece_ids,
)
from phonebias.symbols import SymbolTable

import helpers


def make_inv(pieces: list[str]) -> WordpieceInventory:
    t = SymbolTable()
    t.add("<eow>", "special")
    for p in pieces:
        t.add(p, "wordpiece")
    return WordpieceInventory(t, frozenset(pieces))


def test_markers():
    assert strip_markers("_cré") == "cré"
    assert strip_markers("##teil") == "teil"
    assert strip_markers("teil") == "teil"
    assert is_word_initial("_cré")
    assert not is_word_initial("##teil")
    assert not is_word_initial("teil")
    # The continuation marker wins even if the text starts with "_".
    assert strip_markers("##_x") == "_x"


def test_tokenize_prefers_longest_word_initial_piece():
    inv = make_inv(["_cré", "teil", "_c", "r", "é", "t", "e", "i", "l"])
    assert tokenize_wordpieces("créteil", inv) == ["_cré", "teil"]


def test_tokenize_single_char_pieces():
    inv = make_inv(["_a", "a", "b"])
    assert tokenize_wordpieces("ab", inv) == ["_a", "b"]


def test_tokenize_uncovered_char():
    inv = make_inv(["_a", "a", "b"])
    with pytest.raises(UnsegmentableWord):
        tokenize_wordpieces("aΩ", inv)
    with pytest.raises(UnsegmentableWord):
        tokenize_wordpieces("", inv)


def test_tokenize_position_zero_falls_back_to_continuations():
    # No word-initial piece covers "ba"; bare pieces still segment it.
    inv = make_inv(["_a", "a", "b"])
    assert tokenize_wordpieces("ba", inv) == ["b", "a"]


def test_tokenize_bare_beats_hash_marked_at_equal_length():
    inv = make_inv(["_x", "y", "##y"])
    assert tokenize_wordpieces("xy", inv) == ["_x", "y"]
    inv2 = make_inv(["_x", "##y"])
    assert tokenize_wordpieces("xy", inv2) == ["_x", "##y"]


def test_tokenize_longer_continuation_wins():
    inv = make_inv(["_a", "a", "b", "##ab", "bab"])
    # pos 1: "bab" (len 3) beats "##ab" (len 2) and "b".
    assert tokenize_wordpieces("abab", inv) == ["_a", "bab"]


def test_tokenize_normalizes():
    inv = make_inv(["_cré", "teil", "r", "é", "t", "e", "i", "l", "c"])
    assert tokenize_wordpieces("CRÉTEIL", inv) == ["_cré", "teil"]


def test_wordpiece_ids_match_symbols():
    inv = make_inv(["_a", "a", "b"])
    ids = wordpiece_ids("ab", inv)
    assert [inv.symtab.symbol(i) for i in ids] == ["_a", "b"]


def test_inventory_validation():
    t = SymbolTable()
    t.add("<eow>", "special")
    t.add("_a", "wordpiece")
    t.add("a", "phoneme")
    with pytest.raises(FormatError):
        WordpieceInventory(t, frozenset())
    with pytest.raises(FormatError):
        WordpieceInventory(t, frozenset(["_a", "##"]))  # empty text
    with pytest.raises(FormatError):
        WordpieceInventory(t, frozenset(["_a", "b"]))  # b not in table
    with pytest.raises(FormatError):
        WordpieceInventory(t, frozenset(["_a", "a"]))  # a is phoneme-kind


def test_covered_alphabet():
    inv = make_inv(["_cré", "teil", "_c", "r", "é", "t", "e", "i", "l"])
    assert inv.covered_alphabet() == frozenset("rétil" "e")
    assert "c" not in inv.covered_alphabet()


def test_loads_wordpieces_rejects_duplicates():
    t = SymbolTable()
    t.add("<eow>", "special")
    t.add("_a", "wordpiece")
    with pytest.raises(FormatError):
        loads_wordpieces("_a\n_a\n", t)
    inv = loads_wordpieces("_a\n\n", t)
    assert "_a" in inv and len(inv) == 1


@given(st.text(alphabet="uv", min_size=1, max_size=12))
def test_segmentation_roundtrip_property(word):
    symtab, inv, _ = helpers.tiny_world()
    pieces = tokenize_wordpieces(word, inv)
    assert "".join(strip_markers(p) for p in pieces) == word
    assert is_word_initial(pieces[0])
    for p in pieces[1:]:
        assert not is_word_initial(p)


def test_sampler_config_validation():
    with pytest.raises(FormatError):
        SamplerConfig(p0=1.5)
    with pytest.raises(FormatError):
        SamplerConfig(p0=-0.1)
    with pytest.raises(FormatError):
        SamplerConfig(threshold=0)


def test_presentation_prob_formula():
    cfg = SamplerConfig(p0=0.5, threshold=10)
    assert phoneme_presentation_prob(10, cfg) == 0.5
    assert phoneme_presentation_prob(40, cfg) == 0.125
    assert phoneme_presentation_prob(1, cfg) == 0.5
    assert phoneme_presentation_prob(0, cfg) == 0.5
    assert phoneme_presentation_prob(1000, cfg) == 0.005


@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_presentation_prob_non_increasing_in_count(c1, c2):
    cfg = SamplerConfig(p0=0.5, threshold=10)
    lo, hi = sorted((c1, c2))
    if lo == 0 or hi == 0:
        return
    assert phoneme_presentation_prob(lo, cfg) >= phoneme_presentation_prob(hi, cfg)


@given(st.floats(0, 1), st.floats(0, 1), st.integers(1, 100), st.integers(1, 100), st.integers(1, 5000))
def test_presentation_prob_monotone_in_p0_and_threshold(p0a, p0b, ta, tb, c):
    lo_p, hi_p = sorted((p0a, p0b))
    lo_t, hi_t = sorted((ta, tb))
    assert phoneme_presentation_prob(c, SamplerConfig(lo_p, lo_t)) <= phoneme_presentation_prob(
        c, SamplerConfig(hi_p, lo_t)
    )
    assert phoneme_presentation_prob(c, SamplerConfig(lo_p, lo_t)) <= phoneme_presentation_prob(
        c, SamplerConfig(lo_p, hi_t)
    )


def _sampling_world():
    symtab, inv, lex = helpers.tiny_world()
    return symtab, inv, lex


def test_sample_target_sequence_p0_zero_is_pure_wordpieces():
    symtab, inv, lex = _sampling_world()
    cfg = SamplerConfig(p0=0.0, threshold=10)
    seq = sample_target_sequence(["uv", "vu"], lex, inv, cfg, random.Random(0))
    names = [symtab.symbol(i) for i in seq]
    assert names == ["_uv", "<eow>", "_vu"]


def test_sample_target_sequence_p0_one_uses_pronunciations():
    symtab, inv, lex = _sampling_world()
    cfg = SamplerConfig(p0=1.0, threshold=10)
    seq = sample_target_sequence(["uv", "vu"], lex, inv, cfg, random.Random(0))
    names = [symtab.symbol(i) for i in seq]
    assert names == ["a", "b", "<eow>", "c"]


def test_sample_target_sequence_oov_word_always_wordpieces():
    symtab, inv, lex = _sampling_world()
    cfg = SamplerConfig(p0=1.0, threshold=10)
    seq = sample_target_sequence(["uvu"], lex, inv, cfg, random.Random(0))
    names = [symtab.symbol(i) for i in seq]
    assert names == ["_uv", "##u"]


def test_sample_target_sequence_deterministic_under_seed():
    _, inv, lex = _sampling_world()
    cfg = SamplerConfig(p0=0.5, threshold=10)
    words = ["uv", "vu", "uv", "uv", "vu"] * 4
    a = sample_target_sequence(words, lex, inv, cfg, random.Random(7))
    b = sample_target_sequence(words, lex, inv, cfg, random.Random(7))
    c = sample_target_sequence(words, lex, inv, cfg, random.Random(8))
    assert a == b
    assert a != c  # one draw in 2^20 flips all 20 coins the same way


def test_sample_target_kinds_never_grapheme():
    symtab, inv, lex = _sampling_world()
    cfg = SamplerConfig(p0=0.5, threshold=10)
    seq = sample_target_sequence(["uv", "vu"] * 10, lex, inv, cfg, random.Random(3))
    for i in seq:
        assert symtab.kind(i) in ("phoneme", "wordpiece", "special")


def test_sample_frequency_dependence():
    # Frequency far above threshold makes phoneme presentation rare.
    symtab, inv, _ = _sampling_world()
    lex = Lexicon(symtab)
    lex.add("uv", 1_000_000, [symtab.index("a"), symtab.index("b")])
    cfg = SamplerConfig(p0=0.5, threshold=10)
    rng = random.Random(11)
    phoneme_draws = 0
    for _ in range(2000):
        seq = sample_target_sequence(["uv"], lex, inv, cfg, rng)
        if symtab.kind(seq[0]) == "phoneme":
            phoneme_draws += 1
    # p = 0.5 * 10/1e6 = 5e-6; 2000 draws almost surely stay at zero.
    assert phoneme_draws <= 2
