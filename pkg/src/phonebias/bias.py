"""Compiling phrase lists into weighted biasing machines.

A biasing machine is a deterministic trie over unit sequences (phonemes,
wordpieces, or graphemes) in which every arc carries a negative cost, so
partially matching a phrase makes a hypothesis cheaper. Each non-start
state carries one failure arc back to the start whose weight exactly
cancels the bonuses collected on the way in; a match that dies part-way
therefore contributes nothing. Multi-word phrases spell their words
separated by the boundary marker.

Two constructions are provided. The direct one inserts expanded phrases
into a trie and assigns the uniform per-arc bonus. The reference one
builds a word-level phrase acceptor, composes it with a speller that
transduces unit sequences to words, determinizes, minimizes, and then
applies the same uniform bonus; both yield the same scored language,
which the test suite checks by path enumeration.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field

from .errors import (
    EmptyPhrase,
    ExpansionFailure,
    FormatError,
    OutOfLexicon,
    UnknownSymbol,
    UnmappedPhoneme,
    UnsegmentableWord,
)
from .lexicon import Lexicon, PhonemeMap, map_phonemes, normalize_word
from .subwords import WordpieceInventory, wordpiece_ids
from .symbols import EPS, PHI, SymbolTable
from .wfst import Wfst, compose, determinize_acyclic, minimize_acyclic, step_with_failure

UNITS = ("phoneme", "wordpiece", "grapheme")


@dataclass(frozen=True)
class BiasConfig:
    """Unit choice and scoring knobs for a biasing machine."""

    unit: str = "phoneme"
    bonus: float = 2.0  # per-arc score, applied as cost -bonus
    lam: float = 1.0  # shallow-fusion interpolation weight

    def __post_init__(self) -> None:
        if self.unit not in UNITS:
            raise FormatError(f"unknown biasing unit {self.unit!r}")
        if not self.bonus > 0:
            raise FormatError(f"bonus must be positive, got {self.bonus}")
        if self.lam < 0:
            raise FormatError(f"lambda must be non-negative, got {self.lam}")


@dataclass
class ContextualFst:
    """A failure-decorated biasing trie plus the stepping interface.

    ``step`` consumes one real symbol and returns the follow state and
    the cost contribution; completing a phrase resets to the start so
    consecutive phrase matches chain. ``cancel_cost`` is the end-of-
    stream settlement for a hypothesis parked mid-phrase.
    """

    fst: Wfst
    unit: str
    phrase_count: int

    @property
    def start(self) -> int:
        return self.fst.start

    def step(self, state: int, label: int) -> tuple[int, float]:
        nxt, cost = step_with_failure(self.fst, state, label)
        if self.fst.is_final(nxt):
            nxt = self.fst.start
        return nxt, cost

    def cancel_cost(self, state: int) -> float:
        """Cost of abandoning a partial match at ``state`` (0 at start)."""
        if state == self.fst.start:
            return 0.0
        for arc in self.fst.arcs(state):
            if arc.ilabel == PHI:
                return arc.weight
        return 0.0

    @classmethod
    def from_fst(cls, fst: Wfst, unit: str = "unknown", phrase_count: int = -1) -> "ContextualFst":
        return cls(fst, unit, phrase_count)


def normalize_phrase(phrase: str) -> list[str]:
    """Split a raw phrase line into normalized words; EmptyPhrase if none."""
    words = [normalize_word(w) for w in unicodedata.normalize("NFC", phrase).split()]
    if not words or any(not w for w in words):
        raise EmptyPhrase(f"phrase {phrase!r} has no usable words")
    return words


def expand_word(
    word: str,
    unit: str,
    lex: Lexicon | None = None,
    inv: WordpieceInventory | None = None,
    pmap: PhonemeMap | None = None,
    symtab: SymbolTable | None = None,
) -> list[int]:
    """Rewrite one word as unit ids in the target symbol table.

    phoneme: lexicon pronunciation, passed through the phoneme map when
    one is given (source-inventory lexicon). wordpiece: greedy
    segmentation. grapheme: NFC character ids. Any underlying failure
    is wrapped as ExpansionFailure naming the word and unit.
    """
    try:
        if unit == "phoneme":
            if lex is None:
                raise OutOfLexicon("no lexicon supplied")
            if pmap is not None:
                return map_phonemes(lex.pron_symbols(word), pmap)
            return list(lex.pron(word))
        if unit == "wordpiece":
            if inv is None:
                raise UnsegmentableWord("no wordpiece inventory supplied")
            return wordpiece_ids(word, inv)
        if unit == "grapheme":
            table = _resolve_symtab(symtab, inv, pmap, lex)
            out = []
            for ch in normalize_word(word):
                if ch not in table or table.kind_of(ch) != "grapheme":
                    raise UnknownSymbol(f"character {ch!r} has no grapheme symbol")
                out.append(table.index(ch))
            return out
    except (OutOfLexicon, UnmappedPhoneme, UnsegmentableWord, UnknownSymbol) as exc:
        raise ExpansionFailure(f"cannot expand word {word!r} as {unit} units: {exc}") from exc
    raise FormatError(f"unknown biasing unit {unit!r}")


def _resolve_symtab(
    symtab: SymbolTable | None,
    inv: WordpieceInventory | None,
    pmap: PhonemeMap | None,
    lex: Lexicon | None,
) -> SymbolTable:
    if symtab is not None:
        return symtab
    if inv is not None:
        return inv.symtab
    if pmap is not None:
        return pmap.target_symtab
    if lex is not None:
        return lex.symtab
    raise FormatError("no symbol table available for unit expansion")


def expand_phrase(
    phrase: str,
    unit: str,
    lex: Lexicon | None = None,
    inv: WordpieceInventory | None = None,
    pmap: PhonemeMap | None = None,
    symtab: SymbolTable | None = None,
) -> list[int]:
    """Unit ids for a whole phrase, boundary marker between words."""
    table = _resolve_symtab(symtab, inv, pmap, lex)
    eow = table.eow
    out: list[int] = []
    for i, word in enumerate(normalize_phrase(phrase)):
        if i:
            out.append(eow)
        out.extend(expand_word(word, unit, lex, inv, pmap, table))
    return out


def _trie_from_sequences(sequences: list[list[int]], bonus: float, symtab: SymbolTable | None) -> Wfst:
    fst = Wfst(isyms=symtab, osyms=symtab)
    start = fst.add_state()
    fst.set_start(start)
    next_of: list[dict[int, int]] = [{}]
    for seq in sequences:
        cur = start
        for label in seq:
            nxt = next_of[cur].get(label)
            if nxt is None:
                nxt = fst.add_state()
                next_of.append({})
                next_of[cur][label] = nxt
                fst.add_arc(cur, label, label, -bonus, nxt)
            cur = nxt
        fst.set_final(cur, 0.0)
    return fst


def build_unit_trie(
    phrases: list[str],
    cfg: BiasConfig,
    lex: Lexicon | None = None,
    inv: WordpieceInventory | None = None,
    pmap: PhonemeMap | None = None,
    symtab: SymbolTable | None = None,
) -> Wfst:
    """Deterministic phrase trie with the uniform per-arc bonus, before
    failure decoration. Phrase-end states are final with weight 0."""
    table = _resolve_symtab(symtab, inv, pmap, lex)
    seqs = [expand_phrase(p, cfg.unit, lex, inv, pmap, table) for p in phrases]
    return _trie_from_sequences(seqs, cfg.bonus, table)


def add_failure_arcs(fst: Wfst, bonus: float) -> None:
    """Attach one failure arc per non-start state, weighted to cancel
    the arc bonuses accumulated on the path from the start."""
    depth = {fst.start: 0}
    frontier = [fst.start]
    while frontier:
        state = frontier.pop()
        for arc in fst.arcs(state):
            if arc.ilabel == PHI:
                continue
            if arc.nextstate not in depth:
                depth[arc.nextstate] = depth[state] + 1
                frontier.append(arc.nextstate)
    for state in fst.states():
        if state != fst.start:
            fst.add_arc(state, PHI, EPS, depth[state] * bonus, fst.start)


def build_contextual_fst(
    phrases: list[str],
    cfg: BiasConfig,
    lex: Lexicon | None = None,
    inv: WordpieceInventory | None = None,
    pmap: PhonemeMap | None = None,
    symtab: SymbolTable | None = None,
) -> ContextualFst:
    """Compile a phrase list into a failure-decorated biasing machine.

    An empty phrase list yields the single-state machine whose step is
    the identity at zero cost.
    """
    fst = build_unit_trie(phrases, cfg, lex, inv, pmap, symtab)
    add_failure_arcs(fst, cfg.bonus)
    return ContextualFst(fst, cfg.unit, len(phrases))


def build_parallel_bias(
    phrases: list[str],
    cfg: BiasConfig,
    lex: Lexicon,
    inv: WordpieceInventory,
    pmap: PhonemeMap | None = None,
    symtab: SymbolTable | None = None,
) -> ContextualFst:
    """One biasing machine matching each phrase both as phonemes and as
    wordpieces, sharing the start state; both branches use the same
    bonus, so whichever rendition the decoder consumes gets biased."""
    table = _resolve_symtab(symtab, inv, pmap, lex)
    seqs = []
    for phrase in phrases:
        seqs.append(expand_phrase(phrase, "phoneme", lex, inv, pmap, table))
        seqs.append(expand_phrase(phrase, "wordpiece", lex, inv, pmap, table))
    fst = _trie_from_sequences(seqs, cfg.bonus, table)
    add_failure_arcs(fst, cfg.bonus)
    return ContextualFst(fst, "parallel", len(phrases))


# -- reference construction ------------------------------------------


def phrase_word_table(phrases: list[list[str]]) -> SymbolTable:
    """Fresh word-level symbol table covering every word in the phrases."""
    table = SymbolTable()
    table.add("<eow>", "special")
    for words in phrases:
        for w in words:
            if w not in table:
                table.add(w, "word")
    return table


def build_phrase_acceptor(phrases: list[str], word_table: SymbolTable | None = None) -> Wfst:
    """Word-level phrase trie acceptor with zero weights.

    Shares prefixes; phrase-end states are final. The attached symbol
    tables map arc ids to words.
    """
    word_lists = [normalize_phrase(p) for p in phrases]
    if word_table is None:
        word_table = phrase_word_table(word_lists)
    seqs = [[word_table.index(w) for w in words] for words in word_lists]
    fst = _trie_from_sequences(seqs, 0.0, word_table)
    return fst


def build_speller(
    words: list[str],
    unit: str,
    word_table: SymbolTable,
    lex: Lexicon | None = None,
    inv: WordpieceInventory | None = None,
    pmap: PhonemeMap | None = None,
    symtab: SymbolTable | None = None,
) -> Wfst:
    """Transducer from unit sequences to word label sequences.

    Each word is a linear path consuming its units, emitting epsilon
    everywhere except the last unit arc, which emits the word label.
    Word paths loop: after a word, a boundary-marker arc (consuming
    ``<eow>``, emitting epsilon) returns to the start. Only the state
    after a completed word is final, so the machine accepts one or more
    boundary-separated words with no trailing marker.
    """
    table = _resolve_symtab(symtab, inv, pmap, lex)
    fst = Wfst(isyms=table, osyms=word_table)
    start = fst.add_state()
    fst.set_start(start)
    done = fst.add_state()
    fst.set_final(done, 0.0)
    fst.add_arc(done, table.eow, EPS, 0.0, start)
    for word in words:
        units = expand_word(word, unit, lex, inv, pmap, table)
        if not units:
            raise ExpansionFailure(f"word {word!r} expands to no {unit} units")
        cur = start
        for i, u in enumerate(units):
            last = i == len(units) - 1
            nxt = done if last else fst.add_state()
            fst.add_arc(cur, u, word_table.index(word) if last else EPS, 0.0, nxt)
            cur = nxt
    return fst


def reference_contextual_fst(
    phrases: list[str],
    cfg: BiasConfig,
    lex: Lexicon | None = None,
    inv: WordpieceInventory | None = None,
    pmap: PhonemeMap | None = None,
    symtab: SymbolTable | None = None,
) -> Wfst:
    """Phrase trie derived the long way round, without failure arcs.

    Composes the unit-to-word speller with the word-level phrase
    acceptor, determinizes and minimizes, then assigns the uniform
    per-arc bonus. Serves as the independently constructed reference
    for build_unit_trie's scored language.
    """
    word_lists = [normalize_phrase(p) for p in phrases]
    word_table = phrase_word_table(word_lists)
    acceptor = build_phrase_acceptor(phrases, word_table)
    vocab = sorted({w for words in word_lists for w in words})
    speller = build_speller(vocab, cfg.unit, word_table, lex, inv, pmap, symtab)
    composed = compose(speller, acceptor)
    det = determinize_acyclic(composed)
    small = minimize_acyclic(det)
    # Uniform bonus per consumed unit. Determinization may leave
    # input-epsilon flush arcs that emit delayed word labels; those
    # consume nothing and stay free.
    reweighted = Wfst(small.isyms, small.osyms)
    reweighted.add_states(small.num_states)
    if small.start != -1:
        reweighted.set_start(small.start)
    for state in small.states():
        for arc in small.arcs(state):
            w = 0.0 if arc.ilabel == EPS else -cfg.bonus
            reweighted.add_arc(state, arc.ilabel, arc.olabel, w, arc.nextstate)
        if small.is_final(state):
            reweighted.set_final(state, 0.0)
    return reweighted


def build_dynamic_class_lm(lexicon_fst: Wfst, class_acceptor: Wfst) -> Wfst:
    """Expand a word-class acceptor into unit space.

    Determinizes the lexicon transducer (units in, words out), then
    composes it with the word acceptor, yielding a machine that
    consumes unit sequences and emits the accepted word sequences.
    """
    det = determinize_acyclic(lexicon_fst)
    return compose(det, class_acceptor)


def build_lexicon_transducer(
    words: list[str],
    word_table: SymbolTable,
    lex: Lexicon | None = None,
    pmap: PhonemeMap | None = None,
    inv: WordpieceInventory | None = None,
    unit: str = "phoneme",
    symtab: SymbolTable | None = None,
) -> Wfst:
    """Acyclic union of one linear unit path per word (no looping), the
    left operand expected by build_dynamic_class_lm."""
    table = _resolve_symtab(symtab, inv, pmap, lex)
    fst = Wfst(isyms=table, osyms=word_table)
    start = fst.add_state()
    fst.set_start(start)
    done = fst.add_state()
    fst.set_final(done, 0.0)
    for word in words:
        units = expand_word(word, unit, lex, inv, pmap, table)
        cur = start
        for i, u in enumerate(units):
            last = i == len(units) - 1
            nxt = done if last else fst.add_state()
            fst.add_arc(cur, u, word_table.index(word) if last else EPS, 0.0, nxt)
            cur = nxt
    return fst
