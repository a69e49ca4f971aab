"""Bundled default resources and the files they load from.

The package ships a self-contained resource set: a model symbol table
(phonemes, wordpieces, graphemes, specials), a wordpiece inventory, a
small English lexicon with corpus frequencies, a source-language symbol
table and lexicon-style name pool, and the phoneme map that rewrites
source pronunciations into the model's phoneme inventory. A ResourceSet
bundles the loaded objects; everything downstream takes one explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources as importlib_resources
from pathlib import Path

from .errors import EmptyPool, FormatError
from .lexicon import (
    Lexicon,
    PhonemeMap,
    loads_lexicon,
    loads_phoneme_map,
    normalize_word,
    trim_lexicon,
)
from .subwords import WordpieceInventory, loads_wordpieces
from .symbols import SymbolTable, loads_symbols

DATA_FILES = {
    "symtab": "symbols.tsv",
    "wordpieces": "wordpieces.txt",
    "english_lexicon": "lexicon_en.tsv",
    "foreign_symtab": "symbols_fr.tsv",
    "grapheme_symtab": "symbols_graphemes.tsv",
    "phoneme_map": "phoneme_map_fr_en.tsv",
    "pool": "pool.tsv",
}


@dataclass(frozen=True)
class PoolEntry:
    """A biasing-pool word with its source-language pronunciation."""

    word: str
    pron: tuple[str, ...]  # source phoneme symbols


def loads_pool(text: str, foreign_symtab: SymbolTable, origin: str = "<string>") -> list[PoolEntry]:
    """Parse ``word<TAB>source pronunciation`` rows; EmptyPool if none."""
    entries: list[PoolEntry] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise FormatError(f"{origin}:{lineno}: expected 2 tab-separated fields, got {len(fields)}")
        word, pron_text = normalize_word(fields[0]), fields[1]
        if not word:
            raise FormatError(f"{origin}:{lineno}: empty word")
        if word in seen:
            raise FormatError(f"{origin}:{lineno}: duplicate pool word {word!r}")
        seen.add(word)
        pron = tuple(pron_text.split())
        if not pron:
            raise FormatError(f"{origin}:{lineno}: empty pronunciation for {word!r}")
        for sym in pron:
            if sym not in foreign_symtab or foreign_symtab.kind_of(sym) != "phoneme":
                raise FormatError(f"{origin}:{lineno}: {sym!r} is not a source phoneme")
        entries.append(PoolEntry(word, pron))
    if not entries:
        raise EmptyPool(f"{origin}: pool has no entries")
    return entries


def load_pool(path: str | Path, foreign_symtab: SymbolTable) -> list[PoolEntry]:
    p = Path(path)
    return loads_pool(p.read_text(encoding="utf-8"), foreign_symtab, origin=str(p))


def pool_to_lexicon(pool: list[PoolEntry], foreign_symtab: SymbolTable) -> Lexicon:
    """View a name pool as a unit-frequency source-language lexicon."""
    lex = Lexicon(foreign_symtab)
    for entry in pool:
        lex.add(entry.word, 1, [foreign_symtab.index(s) for s in entry.pron])
    return lex


def write_pool(pool: list[PoolEntry], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for entry in pool:
            fh.write(f"{entry.word}\t{' '.join(entry.pron)}\n")


@dataclass
class ResourceSet:
    """Everything needed to build graphs, bias machines, and emissions."""

    symtab: SymbolTable
    inv: WordpieceInventory
    english_lex: Lexicon
    foreign_symtab: SymbolTable
    grapheme_symtab: SymbolTable
    pmap: PhonemeMap
    pool: list[PoolEntry]
    foreign_lex: Lexicon

    @classmethod
    def load(cls, data_dir: str | Path | None = None) -> "ResourceSet":
        """Load from a directory, or from the packaged defaults."""

        def read(name: str) -> str:
            if data_dir is not None:
                return (Path(data_dir) / DATA_FILES[name]).read_text(encoding="utf-8")
            ref = importlib_resources.files("phonebias") / "data" / DATA_FILES[name]
            return ref.read_text(encoding="utf-8")

        symtab = loads_symbols(read("symtab"), origin=DATA_FILES["symtab"])
        inv = loads_wordpieces(read("wordpieces"), symtab, origin=DATA_FILES["wordpieces"])
        raw_lex = loads_lexicon(read("english_lexicon"), symtab, origin=DATA_FILES["english_lexicon"])
        english_lex, _ = trim_lexicon(raw_lex)
        foreign_symtab = loads_symbols(read("foreign_symtab"), origin=DATA_FILES["foreign_symtab"])
        grapheme_symtab = loads_symbols(read("grapheme_symtab"), origin=DATA_FILES["grapheme_symtab"])
        pmap = loads_phoneme_map(read("phoneme_map"), foreign_symtab, symtab, origin=DATA_FILES["phoneme_map"])
        pool = loads_pool(read("pool"), foreign_symtab, origin=DATA_FILES["pool"])
        return cls(
            symtab=symtab,
            inv=inv,
            english_lex=english_lex,
            foreign_symtab=foreign_symtab,
            grapheme_symtab=grapheme_symtab,
            pmap=pmap,
            pool=pool,
            foreign_lex=pool_to_lexicon(pool, foreign_symtab),
        )
