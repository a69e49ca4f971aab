"""Label-synchronous beam decoding over symbol-posterior streams.

An emission stream is a sequence of steps; each step is a log-posterior
distribution over model symbols (phonemes, wordpieces, and the word
boundary marker), one symbol consumed per step. The decoder walks the
decoding graph: at each step a hypothesis may consume any symbol that
both has probability mass and labels an arc out of its graph state.
After consuming, the hypothesis eagerly runs the graph's epsilon
closure, so it never rests on a state with pending epsilon arcs.

Shallow fusion: a biasing machine is stepped with every consumed
symbol, and its (negative) cost contribution is added with weight
lambda. Hypotheses with equal output, graph state, and bias state are
recombined by summing their probabilities and assigning the total to
the best member. At end of stream any partial biasing match is
cancelled through its failure arc before hypotheses are compared.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

from .bias import ContextualFst, expand_word
from .errors import FormatError, MalformedGraph, NoCompleteHypothesis
from .graph import DecodingGraph
from .lexicon import Lexicon, PhonemeMap, normalize_word
from .subwords import WordpieceInventory, is_word_initial, strip_markers
from .symbols import EPS, SymbolTable


@dataclass
class EmissionSequence:
    """One utterance's stream of per-step log-posterior distributions."""

    utt_id: str
    steps: list[dict[int, float]]

    def validate(self) -> None:
        for t, step in enumerate(self.steps):
            if not step:
                raise FormatError(f"{self.utt_id}: step {t} is empty")
            total = 0.0
            for sym, logp in step.items():
                if logp > 1e-9:
                    raise FormatError(f"{self.utt_id}: step {t} has log-probability {logp} > 0")
                total += math.exp(logp)
            if abs(total - 1.0) > 1e-6:
                raise FormatError(f"{self.utt_id}: step {t} probabilities sum to {total}")

    def to_json(self, symtab: SymbolTable) -> str:
        steps = [{symtab.symbol(sym): logp for sym, logp in step.items()} for step in self.steps]
        return json.dumps({"utt_id": self.utt_id, "steps": steps}, ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str, symtab: SymbolTable) -> "EmissionSequence":
        try:
            obj = json.loads(line)
            utt_id = obj["utt_id"]
            raw_steps = obj["steps"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise FormatError(f"malformed emission line: {exc}") from exc
        steps = []
        for step in raw_steps:
            steps.append({symtab.index(sym): float(logp) for sym, logp in step.items()})
        seq = cls(utt_id, steps)
        seq.validate()
        return seq


def write_emissions(seqs: Iterable[EmissionSequence], path: str | Path, symtab: SymbolTable) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for seq in seqs:
            fh.write(seq.to_json(symtab) + "\n")


def read_emissions(path: str | Path, symtab: SymbolTable) -> list[EmissionSequence]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(EmissionSequence.from_json(line, symtab))
    return out


def generate_synthetic_emissions(
    words: Sequence[str],
    bias_words: Iterable[str],
    inv: WordpieceInventory,
    lex: Lexicon | None = None,
    pmap: PhonemeMap | None = None,
    noise: float = 0.0,
    seed: int | str = 0,
    utt_id: str = "utt",
) -> EmissionSequence:
    """Render a transcript as a noisy emission stream.

    Words in ``bias_words`` are rendered as phoneme steps (through the
    lexicon and map); all others as wordpiece steps; the boundary
    marker separates words. Per step, with probability ``noise`` the
    peak moves to a uniformly drawn same-kind confusable; the peak gets
    probability 1 - noise and every other same-kind symbol shares the
    rest, so the argmax disagrees with the reference on a ``noise``
    fraction of steps in expectation. Boundary steps stay exact.
    """
    if not 0.0 <= noise < 1.0:
        raise FormatError(f"noise must lie in [0, 1), got {noise}")
    symtab = inv.symtab
    bias_set = {normalize_word(w) for w in bias_words}
    ref: list[int] = []
    for i, word in enumerate(words):
        if i:
            ref.append(symtab.eow)
        if normalize_word(word) in bias_set:
            ref.extend(expand_word(word, "phoneme", lex=lex, pmap=pmap, symtab=symtab))
        else:
            ref.extend(expand_word(word, "wordpiece", inv=inv, symtab=symtab))
    rng = random.Random(seed)
    pools = {
        "phoneme": symtab.ids_of_kind("phoneme"),
        "wordpiece": symtab.ids_of_kind("wordpiece"),
    }
    steps: list[dict[int, float]] = []
    for sym in ref:
        pool = pools.get(symtab.kind(sym), [sym])
        if noise == 0.0 or len(pool) < 2:
            steps.append({sym: 0.0})
            continue
        peak = sym
        if rng.random() < noise:
            peak = rng.choice([s for s in pool if s != sym])
        share = math.log(noise / (len(pool) - 1))
        step = {s: share for s in pool}
        step[peak] = math.log1p(-noise)
        steps.append(step)
    return EmissionSequence(utt_id, steps)


# -- hypotheses ------------------------------------------------------


@dataclass(frozen=True)
class Hypothesis:
    """One partial decode: consumed inputs, emitted outputs, and the
    model/bias cost split (costs are negative log probabilities)."""

    out: tuple[int, ...]
    inp: tuple[int, ...]
    g_state: int
    b_state: int
    model_cost: float
    bias_cost: float

    def total(self, lam: float) -> float:
        return self.model_cost + lam * self.bias_cost


@dataclass(frozen=True)
class DecoderConfig:
    beam_size: int = 8
    lam: float = 1.0
    bias: ContextualFst | None = None
    finalize_partial: bool = False

    def __post_init__(self) -> None:
        if self.beam_size < 1:
            raise FormatError(f"beam_size must be >= 1, got {self.beam_size}")
        if self.lam < 0:
            raise FormatError(f"lambda must be non-negative, got {self.lam}")


class DecodeResult(NamedTuple):
    transcript: list[str]
    cost: float
    flags: tuple[str, ...]


def neg_log_sum_exp(costs: Sequence[float]) -> float:
    """Combined cost of alternative hypotheses: -ln(sum of exp(-c)).

    Summation order is canonicalized by sorting so recombination gives
    bit-identical results regardless of hypothesis arrival order.
    """
    m = min(costs)
    return m - math.log(sum(math.exp(m - c) for c in sorted(costs)))


def recombine(hyps: Sequence[Hypothesis], lam: float) -> list[Hypothesis]:
    """Merge hypotheses with identical (output, graph state, bias state).

    The merged hypothesis carries the probability mass of the whole
    group and everything else (inputs, cost split) from its most likely
    member, ties broken toward the smallest input sequence.
    """
    groups: dict[tuple[tuple[int, ...], int, int], list[Hypothesis]] = {}
    for h in hyps:
        groups.setdefault((h.out, h.g_state, h.b_state), []).append(h)
    out: list[Hypothesis] = []
    for group in groups.values():
        if len(group) == 1:
            out.append(group[0])
            continue
        best = min(group, key=lambda h: (h.total(lam), h.inp))
        total = neg_log_sum_exp([h.total(lam) for h in group])
        out.append(
            Hypothesis(
                best.out,
                best.inp,
                best.g_state,
                best.b_state,
                total - lam * best.bias_cost,
                best.bias_cost,
            )
        )
    return out


def assemble_transcript(out_ids: Sequence[int], symtab: SymbolTable) -> list[str]:
    """Join emitted wordpiece ids into words.

    The boundary marker closes the current word; a word-initial piece
    closes the current word and starts the next; empty fragments are
    dropped.
    """
    eow = symtab.eow
    words: list[str] = []
    cur: list[str] = []
    for i in out_ids:
        if i == eow:
            if cur:
                words.append("".join(cur))
                cur = []
            continue
        sym = symtab.symbol(i)
        if is_word_initial(sym):
            if cur:
                words.append("".join(cur))
            cur = [strip_markers(sym)]
        else:
            cur.append(strip_markers(sym))
    if cur:
        words.append("".join(cur))
    return words


def decode(em: EmissionSequence, graph: DecodingGraph, cfg: DecoderConfig) -> DecodeResult:
    """Beam search one emission stream through the decoding graph.

    Returns the best hypothesis's transcript, its combined cost
    (model + lambda * bias), and flags; ``truncated`` marks a result
    finalized off the hub or from a mid-stream dead beam, which is only
    allowed when cfg.finalize_partial is set.
    """
    symtab = graph.fst.isyms
    if symtab is None:
        raise MalformedGraph("decoding graph has no symbol table attached")
    bias = cfg.bias
    b0 = bias.start if bias is not None else 0
    beam: list[Hypothesis] = [Hypothesis((), (), graph.hub, b0, 0.0, 0.0)]
    truncated = False
    for t, step in enumerate(em.steps):
        cand: list[Hypothesis] = []
        for h in beam:
            for label, arc in graph.step_map[h.g_state].items():
                logp = step.get(label)
                if logp is None:
                    continue
                b2, bc = h.b_state, h.bias_cost
                if bias is not None:
                    b2, delta = bias.step(h.b_state, label)
                    bc += delta
                rest, extra = graph.closure[arc.nextstate]
                emitted = () if arc.olabel == EPS else (arc.olabel,)
                cand.append(
                    Hypothesis(
                        h.out + emitted + extra,
                        h.inp + (label,),
                        rest,
                        b2,
                        h.model_cost - logp,
                        bc,
                    )
                )
        if not cand:
            if not cfg.finalize_partial:
                raise NoCompleteHypothesis(f"{em.utt_id}: beam died at step {t}")
            truncated = True
            break
        for h in cand:
            # Eager closure must leave no hypothesis on an epsilon state.
            if h.g_state in graph.eps_states:
                raise MalformedGraph(
                    f"hypothesis rests on state {h.g_state}, which has epsilon arcs"
                )
        beam = recombine(cand, cfg.lam)
        beam.sort(key=lambda h: (h.total(cfg.lam), h.out, h.inp))
        beam = beam[: cfg.beam_size]
    final: list[Hypothesis] = []
    for h in beam:
        if h.g_state != graph.hub and not cfg.finalize_partial:
            continue
        if bias is not None:
            settle = bias.cancel_cost(h.b_state)
            h = Hypothesis(h.out, h.inp, h.g_state, b0, h.model_cost, h.bias_cost + settle)
        final.append(h)
    if not final:
        raise NoCompleteHypothesis(f"{em.utt_id}: no hypothesis ended on the hub")
    final = recombine(final, cfg.lam)
    final.sort(key=lambda h: (h.total(cfg.lam), h.out, h.inp))
    best = final[0]
    flags = ("truncated",) if truncated or best.g_state != graph.hub else ()
    return DecodeResult(assemble_transcript(best.out, symtab), best.total(cfg.lam), flags)
