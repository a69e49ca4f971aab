"""Decoding graphs: wordpiece loops joined to a pronunciation prefix tree.

The graph is a transducer the decoder walks while consuming emission
symbols. A hub state accepts any wordpiece (and the word boundary
marker) through zero-cost self-loops that emit the consumed symbol
unchanged. Each biasing word additionally contributes a phoneme path
through a shared prefix tree; consuming a complete pronunciation leads
into a chain of epsilon-input arcs that emit the word's wordpiece ids
and rejoin the hub, so a phoneme rendition of the word comes out
spelled exactly like a wordpiece rendition would.

Epsilon arcs here are never optional for the decoder: a hypothesis must
run every epsilon-input arc to exhaustion immediately after consuming a
real symbol. epsilon_closure_outputs implements that eager closure and
the builder precomputes it for every state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DuplicatePronunciation, ExpansionFailure, MalformedGraph
from .lexicon import Lexicon, PhonemeMap, normalize_word
from .subwords import WordpieceInventory
from .symbols import EPS, SymbolTable
from .wfst import Arc, Wfst
from .bias import expand_word


@dataclass
class DecodingGraph:
    """A built graph plus the lookup structures the decoder needs.

    ``step_map`` indexes real-label arcs per state; ``closure`` maps
    every state to (resting state, emitted output ids) under eager
    epsilon consumption; ``word_table`` records each biasing word's
    (pronunciation ids, wordpiece ids).
    """

    fst: Wfst
    hub: int
    word_table: dict[str, tuple[tuple[int, ...], tuple[int, ...]]]
    step_map: list[dict[int, Arc]] = field(default_factory=list)
    closure: dict[int, tuple[int, tuple[int, ...]]] = field(default_factory=dict)
    eps_states: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        if not self.step_map:
            self.step_map = self.fst.input_arc_map()
        if not self.closure:
            self.closure = {s: epsilon_closure_outputs(self.fst, s) for s in self.fst.states()}
        self.eps_states = frozenset(
            s for s in self.fst.states() if any(a.ilabel == EPS for a in self.fst.arcs(s))
        )

    @property
    def num_states(self) -> int:
        return self.fst.num_states

    @classmethod
    def from_fst(cls, fst: Wfst) -> "DecodingGraph":
        """Rehydrate a graph from its serialized automaton; the word
        table is not recoverable from the text form and stays empty."""
        if fst.start == -1:
            raise MalformedGraph("serialized graph has no start state")
        return cls(fst, hub=fst.start, word_table={})


def epsilon_closure_outputs(fst: Wfst, state: int) -> tuple[int, tuple[int, ...]]:
    """Follow epsilon-input arcs from ``state`` to exhaustion.

    Returns the resting state and the output ids collected along the
    way. Graph states carry at most one epsilon arc; anything else, or
    an epsilon cycle, raises MalformedGraph.
    """
    outputs: list[int] = []
    cur = state
    seen = {state}
    while True:
        eps_arcs = [a for a in fst.arcs(cur) if a.ilabel == EPS]
        if not eps_arcs:
            return cur, tuple(outputs)
        if len(eps_arcs) > 1:
            raise MalformedGraph(f"state {cur} has {len(eps_arcs)} epsilon arcs; expected at most one")
        arc = eps_arcs[0]
        if arc.olabel != EPS:
            outputs.append(arc.olabel)
        cur = arc.nextstate
        if cur in seen:
            raise MalformedGraph(f"epsilon cycle through state {cur}")
        seen.add(cur)


def build_decoding_graph(
    bias_words: list[str],
    symtab: SymbolTable,
    inv: WordpieceInventory,
    lex: Lexicon | None = None,
    pmap: PhonemeMap | None = None,
) -> DecodingGraph:
    """Assemble the hub plus one pronunciation-tree branch per word.

    Every wordpiece symbol in the table, and the boundary marker, gets
    a hub self-loop. Bias words are expanded to phonemes through the
    lexicon (and map, when given) and to wordpieces through the
    inventory; duplicate words collapse silently, but two distinct
    words arriving at the same pronunciation raise
    DuplicatePronunciation, since the tree could not tell them apart.
    """
    fst = Wfst(isyms=symtab, osyms=symtab)
    hub = fst.add_state()
    fst.set_start(hub)
    fst.set_final(hub, 0.0)
    for wp in symtab.ids_of_kind("wordpiece"):
        fst.add_arc(hub, wp, wp, 0.0, hub)
    eow = symtab.eow
    fst.add_arc(hub, eow, eow, 0.0, hub)

    word_table: dict[str, tuple[tuple[int, ...], tuple[int, ...]]] = {}
    by_pron: dict[tuple[int, ...], str] = {}
    next_of: dict[int, dict[int, int]] = {hub: {}}
    for raw in bias_words:
        word = normalize_word(raw)
        if word in word_table:
            continue
        pron = tuple(expand_word(word, "phoneme", lex=lex, pmap=pmap, symtab=symtab))
        pieces = tuple(expand_word(word, "wordpiece", inv=inv, symtab=symtab))
        if not pron or not pieces:
            raise ExpansionFailure(f"word {word!r} expands to an empty unit sequence")
        clash = by_pron.get(pron)
        if clash is not None:
            raise DuplicatePronunciation(
                f"words {clash!r} and {word!r} share one pronunciation; the tree cannot distinguish them"
            )
        by_pron[pron] = word
        word_table[word] = (pron, pieces)
        cur = hub
        for ph in pron:
            nxt = next_of[cur].get(ph)
            if nxt is None:
                nxt = fst.add_state()
                next_of[cur][ph] = nxt
                next_of[nxt] = {}
                fst.add_arc(cur, ph, EPS, 0.0, nxt)
            cur = nxt
        for i, piece in enumerate(pieces):
            last = i == len(pieces) - 1
            nxt = hub if last else fst.add_state()
            fst.add_arc(cur, EPS, piece, 0.0, nxt)
            cur = nxt
    return DecodingGraph(fst, hub, word_table)
