"""Wordpiece segmentation and frequency-aware target sampling.

A piece starting with the marker ``_`` may only appear word-initially.
Continuation pieces are written either bare ("teil") or with the
explicit continuation marker ``##`` ("##teil"); both match the same
text, and the marker exists so piece spellings can never collide with
phoneme spellings when both kinds share one symbol table. Greedy
longest-match segmentation is total over words whose every character
has a single-character continuation piece; ``covered_alphabet`` names
that character set, and segmenting past it raises UnsegmentableWord.

The sampler decides, per word, whether a training target presents the
word as phonemes or as wordpieces, favouring phonemes for rare words.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import FormatError, UnsegmentableWord
from .lexicon import Lexicon, normalize_word
from .symbols import SymbolTable

MARKER = "_"
CONT_MARKER = "##"


def strip_markers(piece: str) -> str:
    """The text a piece matches, with position markers removed."""
    if piece.startswith(CONT_MARKER):
        return piece[len(CONT_MARKER):]
    if piece.startswith(MARKER):
        return piece[len(MARKER):]
    return piece


def is_word_initial(piece: str) -> bool:
    return piece.startswith(MARKER) and not piece.startswith(CONT_MARKER)


@dataclass
class WordpieceInventory:
    """Wordpiece set bound to the symbol table defining the piece ids."""

    symtab: SymbolTable
    pieces: frozenset[str]
    _max_text_len: int = 0

    def __post_init__(self) -> None:
        validate_inventory(self.pieces, self.symtab)
        self._max_text_len = max(len(strip_markers(p)) for p in self.pieces)

    def __contains__(self, piece: str) -> bool:
        return piece in self.pieces

    def __len__(self) -> int:
        return len(self.pieces)

    def covered_alphabet(self) -> frozenset[str]:
        """Characters with a single-character continuation piece; words
        over this alphabet are guaranteed to segment."""
        out = set()
        for p in self.pieces:
            text = strip_markers(p)
            if len(text) == 1 and not is_word_initial(p):
                out.add(text)
        return frozenset(out)


def validate_inventory(pieces: frozenset[str], symtab: SymbolTable) -> None:
    if not pieces:
        raise FormatError("empty wordpiece inventory")
    for p in pieces:
        if not p or not strip_markers(p):
            raise FormatError(f"invalid wordpiece {p!r}")
        if p not in symtab or symtab.kind_of(p) != "wordpiece":
            raise FormatError(f"wordpiece {p!r} is not a wordpiece symbol in the table")


def loads_wordpieces(text: str, symtab: SymbolTable, origin: str = "<string>") -> WordpieceInventory:
    """Parse a one-piece-per-line inventory file."""
    pieces = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        piece = raw.strip()
        if not piece:
            continue
        pieces.append(piece)
    if len(pieces) != len(set(pieces)):
        raise FormatError(f"{origin}: duplicate wordpiece entries")
    return WordpieceInventory(symtab, frozenset(pieces))


def load_wordpieces(path: str | Path, symtab: SymbolTable) -> WordpieceInventory:
    p = Path(path)
    return loads_wordpieces(p.read_text(encoding="utf-8"), symtab, origin=str(p))


def tokenize_wordpieces(word: str, inv: WordpieceInventory) -> list[str]:
    """Segment a word by greedy longest match.

    At position 0 a word-initial piece (``_`` + prefix) of any length is
    preferred over a continuation piece; elsewhere only continuation
    pieces (bare or ``##``-marked, longer text winning and bare winning
    at equal length) are considered. Raises UnsegmentableWord when no
    piece matches at some position.
    """
    word = normalize_word(word)
    if not word:
        raise UnsegmentableWord("empty word")
    out: list[str] = []
    pos = 0
    while pos < len(word):
        best = None
        if pos == 0:
            for end in range(min(len(word), inv._max_text_len), pos, -1):
                cand = MARKER + word[:end]
                if cand in inv:
                    best = (cand, end)
                    break
        if best is None:
            for end in range(min(len(word), pos + inv._max_text_len), pos, -1):
                bare = word[pos:end]
                if bare in inv and not is_word_initial(bare):
                    best = (bare, end)
                    break
                if CONT_MARKER + bare in inv:
                    best = (CONT_MARKER + bare, end)
                    break
        if best is None:
            raise UnsegmentableWord(f"no wordpiece matches {word!r} at position {pos}")
        out.append(best[0])
        pos = best[1]
    return out


def wordpiece_ids(word: str, inv: WordpieceInventory) -> list[int]:
    return [inv.symtab.index(p) for p in tokenize_wordpieces(word, inv)]


@dataclass(frozen=True)
class SamplerConfig:
    """Knobs for the phoneme-presentation coin flip.

    p0 is the probability assigned to words at or below the frequency
    threshold T; above the threshold the probability decays as T/c.
    """

    p0: float = 0.5
    threshold: int = 10

    def __post_init__(self) -> None:
        if not 0.0 <= self.p0 <= 1.0:
            raise FormatError(f"p0 must lie in [0, 1], got {self.p0}")
        if self.threshold < 1:
            raise FormatError(f"threshold must be >= 1, got {self.threshold}")


def phoneme_presentation_prob(count: int, cfg: SamplerConfig) -> float:
    """Probability that a word with corpus count ``count`` is shown as phonemes."""
    if count <= 0:
        return cfg.p0
    return cfg.p0 * min(cfg.threshold / count, 1.0)


def sample_target_sequence(
    words: Sequence[str],
    lex: Lexicon,
    inv: WordpieceInventory,
    cfg: SamplerConfig,
    rng: random.Random,
) -> list[int]:
    """Render a transcript as one target id sequence.

    Each in-lexicon word independently comes out as its phoneme ids
    with probability phoneme_presentation_prob(frequency), otherwise as
    its wordpiece ids; out-of-lexicon words always use wordpieces.
    Words are separated by the boundary marker id.
    """
    eow = inv.symtab.eow
    out: list[int] = []
    for i, word in enumerate(words):
        if i:
            out.append(eow)
        use_phonemes = False
        if word in lex:
            p = phoneme_presentation_prob(lex.frequency(word), cfg)
            use_phonemes = rng.random() < p
        if use_phonemes:
            out.extend(lex.pron(word))
        else:
            out.extend(wordpiece_ids(word, inv))
    return out
