import pytest

from phonebias.bias import BiasConfig, build_parallel_bias, expand_word
from phonebias.errors import EmptyPool, FormatError
from phonebias.lexicon import map_phonemes
from phonebias.resources import (
    DATA_FILES,
    PoolEntry,
    ResourceSet,
    load_pool,
    loads_pool,
    pool_to_lexicon,
    write_pool,
)
from phonebias.subwords import tokenize_wordpieces, wordpiece_ids
from phonebias.symbols import PHI


def test_inventory_sizes(res):
    assert len(res.symtab.ids_of_kind("phoneme")) == 41
    assert len(res.foreign_symtab.ids_of_kind("phoneme")) == 37
    assert len(res.symtab.ids_of_kind("wordpiece")) > 100
    assert len(res.grapheme_symtab.ids_of_kind("grapheme")) >= 26
    assert len(res.pool) >= 50
    assert len(res.english_lex) >= 30


def test_creteil_pronunciation_mapping(res):
    entry = next(e for e in res.pool if e.word == "créteil")
    assert entry.pron == ("k", "R", "e", "t", "E", "j")
    mapped = [res.symtab.symbol(i) for i in map_phonemes(entry.pron, res.pmap)]
    assert mapped == ["k", "r\\", "E", "t", "E", "j"]


def test_creteil_tokenization(res):
    assert tokenize_wordpieces("créteil", res.inv) == ["_cré", "##teil"]


def test_pool_words_fully_expandable(res):
    """Every pool entry must survive all three unit expansions."""
    seen_prons = set()
    for entry in res.pool:
        mapped = tuple(map_phonemes(entry.pron, res.pmap))
        assert mapped, entry.word
        assert mapped not in seen_prons, f"{entry.word} shares a mapped pronunciation"
        seen_prons.add(mapped)
        assert wordpiece_ids(entry.word, res.inv), entry.word
        assert expand_word(entry.word, "grapheme", symtab=res.grapheme_symtab), entry.word


def test_english_lexicon_trimmed_and_segmentable(res):
    covered = res.inv.covered_alphabet()
    for word in res.english_lex.words():
        assert len(res.english_lex.entry(word).pron) > 0
        assert wordpiece_ids(word, res.inv), word
        assert set(word) <= covered, word


def test_pool_spellings_inside_covered_alphabet(res):
    covered = res.inv.covered_alphabet()
    for entry in res.pool:
        assert set(entry.word) <= covered, entry.word


def test_parallel_machine_for_creteil(res):
    cfg = BiasConfig(unit="phoneme", bonus=1.5)
    cfst = build_parallel_bias(
        ["créteil"], cfg, lex=res.foreign_lex, inv=res.inv, pmap=res.pmap
    )
    fst = cfst.fst
    start_arcs = [a for a in fst.arcs(fst.start) if a.ilabel != PHI]
    assert len(start_arcs) == 2  # one phoneme branch, one wordpiece branch
    # 6 phoneme states + 2 wordpiece states hang off the start.
    assert fst.num_states == 9
    depths = sorted(
        a.weight for s in fst.states() for a in fst.arcs(s) if a.ilabel == PHI and fst.is_final(s)
    )
    assert depths == [2 * 1.5, 6 * 1.5]


def test_load_from_data_dir(res):
    from importlib import resources as importlib_resources

    data_dir = importlib_resources.files("phonebias") / "data"
    again = ResourceSet.load(data_dir=str(data_dir))
    assert list(again.symtab) == list(res.symtab)
    assert again.pool == res.pool
    assert sorted(again.english_lex.words()) == sorted(res.english_lex.words())


def test_data_files_exist():
    from importlib import resources as importlib_resources

    data_dir = importlib_resources.files("phonebias") / "data"
    for name in DATA_FILES.values():
        assert (data_dir / name).is_file(), name


# -- pool parsing ------------------------------------------------------


def test_loads_pool_errors(res):
    ft = res.foreign_symtab
    with pytest.raises(FormatError):
        loads_pool("word-without-pron\n", ft)
    with pytest.raises(FormatError):
        loads_pool("lyon\tl i\nlyon\tl i\n", ft)
    with pytest.raises(FormatError):
        loads_pool("lyon\t\n", ft)
    with pytest.raises(FormatError):
        loads_pool("lyon\tl zz\n", ft)
    with pytest.raises(FormatError):
        loads_pool("\tl i\n", ft)
    with pytest.raises(EmptyPool):
        loads_pool("\n\n", ft)


def test_pool_file_roundtrip(tmp_path, res):
    pool = [PoolEntry("lyon", ("l", "j", "o~")), PoolEntry("paris", ("p", "a", "R", "i"))]
    path = tmp_path / "pool.tsv"
    write_pool(pool, path)
    assert load_pool(path, res.foreign_symtab) == pool


def test_pool_to_lexicon(res):
    lex = pool_to_lexicon(res.pool[:3], res.foreign_symtab)
    assert len(lex) == 3
    for entry in res.pool[:3]:
        assert lex.frequency(entry.word) == 1
        assert lex.pron_symbols(entry.word) == list(entry.pron)
