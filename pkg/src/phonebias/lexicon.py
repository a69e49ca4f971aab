"""Pronunciation lexicons and cross-inventory phoneme maps.

A lexicon row associates a written word with a corpus frequency and a
space-separated phoneme pronunciation. Raw lexicons may carry several
rows per word (pronunciation variants, homographs) and several words
per pronunciation (homophones); :func:`trim_lexicon` removes both kinds
of ambiguity so that later stages can treat word and pronunciation as
interchangeable keys.

A phoneme map rewrites pronunciations from a source inventory into a
target inventory, symbol by symbol, where one source phoneme may expand
to several target phonemes.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import (
    BadFrequency,
    DuplicateSource,
    FormatError,
    OutOfLexicon,
    UnmappedPhoneme,
)
from .symbols import SymbolTable


def normalize_word(word: str) -> str:
    """Canonical written form used as a lexicon / pool key (NFC, lowercase)."""
    return unicodedata.normalize("NFC", word).lower()


@dataclass(frozen=True)
class LexiconEntry:
    frequency: int
    pron: tuple[int, ...]  # phoneme ids in the bound symbol table


@dataclass
class Lexicon:
    """Word table bound to the symbol table its pronunciations refer to.

    ``entries`` keeps every raw row, so an untrimmed lexicon can hold
    several entries per word. :meth:`pron` is the single-pronunciation
    accessor most callers want; it refuses ambiguous words.
    """

    symtab: SymbolTable
    entries: dict[str, list[LexiconEntry]] = field(default_factory=dict)

    def add(self, word: str, frequency: int, pron: Sequence[int]) -> None:
        if not isinstance(frequency, int) or frequency <= 0:
            raise BadFrequency(f"word {word!r}: frequency must be a positive integer, got {frequency!r}")
        self.entries.setdefault(normalize_word(word), []).append(
            LexiconEntry(frequency, tuple(pron))
        )

    def __contains__(self, word: str) -> bool:
        return normalize_word(word) in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def entry(self, word: str) -> LexiconEntry:
        key = normalize_word(word)
        rows = self.entries.get(key)
        if not rows:
            raise OutOfLexicon(f"word {word!r} has no lexicon entry")
        if len(rows) > 1:
            raise OutOfLexicon(f"word {word!r} has {len(rows)} pronunciation entries; trim the lexicon first")
        return rows[0]

    def pron(self, word: str) -> tuple[int, ...]:
        return self.entry(word).pron

    def frequency(self, word: str) -> int:
        return self.entry(word).frequency

    def pron_symbols(self, word: str) -> list[str]:
        return [self.symtab.symbol(i) for i in self.pron(word)]

    def words(self) -> list[str]:
        return list(self.entries)


def loads_lexicon(text: str, symtab: SymbolTable, origin: str = "<string>") -> Lexicon:
    """Parse ``word<TAB>frequency<TAB>phonemes`` rows against a symbol table.

    Every pronunciation symbol must resolve to a phoneme-kind id;
    anything else is a FormatError naming the offending row.
    """
    lex = Lexicon(symtab)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise FormatError(f"{origin}:{lineno}: expected 3 tab-separated fields, got {len(fields)}")
        word, freq_text, pron_text = fields
        if not word:
            raise FormatError(f"{origin}:{lineno}: empty word field")
        try:
            freq = int(freq_text)
        except ValueError:
            raise BadFrequency(f"{origin}:{lineno}: frequency {freq_text!r} is not an integer") from None
        if freq <= 0:
            raise BadFrequency(f"{origin}:{lineno}: frequency must be positive, got {freq}")
        pron_syms = pron_text.split()
        if not pron_syms:
            raise FormatError(f"{origin}:{lineno}: empty pronunciation")
        pron = []
        for sym in pron_syms:
            if sym not in symtab or symtab.kind_of(sym) != "phoneme":
                raise FormatError(f"{origin}:{lineno}: {sym!r} is not a phoneme in the symbol table")
            pron.append(symtab.index(sym))
        lex.add(word, freq, pron)
    return lex


def load_lexicon(path: str | Path, symtab: SymbolTable) -> Lexicon:
    p = Path(path)
    return loads_lexicon(p.read_text(encoding="utf-8"), symtab, origin=str(p))


@dataclass
class TrimReport:
    """What trim_lexicon removed and why."""

    variant_words: list[str] = field(default_factory=list)
    homophone_groups: list[list[str]] = field(default_factory=list)

    @property
    def removed(self) -> set[str]:
        out = set(self.variant_words)
        for group in self.homophone_groups:
            out.update(group)
        return out


def trim_lexicon(lex: Lexicon) -> tuple[Lexicon, TrimReport]:
    """Drop every ambiguous word from a raw lexicon.

    Removes words with more than one pronunciation entry, and removes
    every member of each homophone group (distinct words sharing one
    pronunciation). Both rules apply to the raw table, so a word can be
    removed for either reason independently. Idempotent.
    """
    report = TrimReport()
    for word, rows in lex.entries.items():
        if len(rows) > 1:
            report.variant_words.append(word)
    by_pron: dict[tuple[int, ...], list[str]] = {}
    for word, rows in lex.entries.items():
        for row in rows:
            group = by_pron.setdefault(row.pron, [])
            if word not in group:
                group.append(word)
    for group in by_pron.values():
        if len(group) > 1:
            report.homophone_groups.append(sorted(group))
    removed = report.removed
    trimmed = Lexicon(lex.symtab)
    for word, rows in lex.entries.items():
        if word not in removed:
            trimmed.entries[word] = list(rows)
    return trimmed, report


@dataclass
class PhonemeMap:
    """Symbol-by-symbol rewrite from a source to a target phoneme inventory."""

    source_symtab: SymbolTable
    target_symtab: SymbolTable
    rules: dict[str, tuple[int, ...]] = field(default_factory=dict)

    def targets(self, source_symbol: str) -> tuple[int, ...]:
        try:
            return self.rules[source_symbol]
        except KeyError:
            raise UnmappedPhoneme(f"no map rule for source phoneme {source_symbol!r}") from None

    def covers(self, source_symbol: str) -> bool:
        return source_symbol in self.rules


def loads_phoneme_map(
    text: str,
    source_symtab: SymbolTable,
    target_symtab: SymbolTable,
    origin: str = "<string>",
) -> PhonemeMap:
    """Parse ``source<TAB>target [target ...]`` rows.

    Each source symbol may appear once (DuplicateSource otherwise) and
    every target must resolve to a phoneme in the target table.
    """
    pmap = PhonemeMap(source_symtab, target_symtab)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise FormatError(f"{origin}:{lineno}: expected 2 tab-separated fields, got {len(fields)}")
        src, tgt_text = fields
        if src in pmap.rules:
            raise DuplicateSource(f"{origin}:{lineno}: source phoneme {src!r} mapped twice")
        if src not in source_symtab or source_symtab.kind_of(src) != "phoneme":
            raise FormatError(f"{origin}:{lineno}: {src!r} is not a phoneme in the source table")
        tgt_syms = tgt_text.split()
        if not tgt_syms:
            raise FormatError(f"{origin}:{lineno}: no target symbols for {src!r}")
        ids = []
        for sym in tgt_syms:
            if sym not in target_symtab or target_symtab.kind_of(sym) != "phoneme":
                raise FormatError(f"{origin}:{lineno}: target {sym!r} is not a phoneme in the target table")
            ids.append(target_symtab.index(sym))
        pmap.rules[src] = tuple(ids)
    return pmap


def load_phoneme_map(path: str | Path, source_symtab: SymbolTable, target_symtab: SymbolTable) -> PhonemeMap:
    p = Path(path)
    return loads_phoneme_map(p.read_text(encoding="utf-8"), source_symtab, target_symtab, origin=str(p))


def map_phonemes(source_symbols: Iterable[str], pmap: PhonemeMap) -> list[int]:
    """Rewrite a source pronunciation into target phoneme ids.

    Concatenates the per-symbol target expansions in order; raises
    UnmappedPhoneme naming the first uncovered source symbol.
    """
    out: list[int] = []
    for sym in source_symbols:
        out.extend(pmap.targets(sym))
    return out
