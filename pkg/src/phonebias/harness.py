"""Synthetic evaluation: corpora, experiments, sweeps, and WER.

The standard corpus is "directions to X" where X is drawn from a pool
of foreign place names. Per utterance, the truth name plus a sampled
set of distractor names form the biasing list; emissions render the
truth name as (mapped) phonemes and everything else as wordpieces, with
controllable label noise. Distractor draws depend only on the base seed
and the utterance, not on the list size, so rerunning at another list
size replays the same per-utterance randomness.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .bias import BiasConfig, ContextualFst, build_contextual_fst, build_parallel_bias
from .decoder import DecoderConfig, decode, generate_synthetic_emissions
from .errors import EmptyPool, FormatError
from .graph import build_decoding_graph
from .lexicon import Lexicon, map_phonemes, normalize_word
from .resources import PoolEntry, ResourceSet, pool_to_lexicon

# Decode-time biasing conditions. Grapheme machines live on their own
# alphabet and never see decoder symbols, so they are compile-only.
BIAS_UNITS = ("none", "phoneme", "wordpiece", "parallel")


# -- word error rate -------------------------------------------------


def edit_distance(ref: Sequence[str], hyp: Sequence[str]) -> int:
    """Word-level Levenshtein distance."""
    prev = list(range(len(hyp) + 1))
    for i, r in enumerate(ref, start=1):
        cur = [i] + [0] * len(hyp)
        for j, h in enumerate(hyp, start=1):
            cur[j] = min(
                prev[j] + 1,
                cur[j - 1] + 1,
                prev[j - 1] + (0 if r == h else 1),
            )
        prev = cur
    return prev[-1]


def wer(ref: Sequence[str], hyp: Sequence[str]) -> float:
    """Edit distance normalized by reference length.

    The empty-reference case is degenerate: by convention it scores 0
    for an empty hypothesis and len(hyp) otherwise (each insertion
    counted against a nominal reference length of 1).
    """
    if not ref:
        return 0.0 if not hyp else float(len(hyp))
    return edit_distance(ref, hyp) / len(ref)


# -- corpora ---------------------------------------------------------


@dataclass(frozen=True)
class Utterance:
    utt_id: str
    words: tuple[str, ...]
    truth: str  # the pool word this utterance targets; "" for none


@dataclass
class EvalSet:
    utterances: list[Utterance]
    pool: list[PoolEntry]

    def dumps(self) -> str:
        lines = [f"{u.utt_id}\t{' '.join(u.words)}\t{u.truth}" for u in self.utterances]
        return "\n".join(lines) + ("\n" if lines else "")

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def loads(cls, text: str, pool: list[PoolEntry], origin: str = "<string>") -> "EvalSet":
        pool_words = {e.word for e in pool}
        utts = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise FormatError(f"{origin}:{lineno}: expected 3 tab-separated fields, got {len(fields)}")
            utt_id, words_text, truth = fields
            words = tuple(words_text.split())
            if not words:
                raise FormatError(f"{origin}:{lineno}: empty utterance")
            if truth and truth not in pool_words:
                raise FormatError(f"{origin}:{lineno}: truth word {truth!r} is not in the pool")
            utts.append(Utterance(utt_id, words, truth))
        return cls(utts, pool)

    @classmethod
    def read(cls, path: str | Path, pool: list[PoolEntry]) -> "EvalSet":
        p = Path(path)
        return cls.loads(p.read_text(encoding="utf-8"), pool, origin=str(p))


def make_directions_set(pool: list[PoolEntry], n_utts: int, seed: int | str) -> EvalSet:
    """``directions to X`` utterances with X drawn uniformly (with
    replacement) from the pool."""
    if not pool:
        raise EmptyPool("cannot sample utterances from an empty pool")
    rng = random.Random(f"{seed}:make-set")
    utts = []
    for i in range(n_utts):
        entry = rng.choice(pool)
        utts.append(Utterance(f"utt{i:04d}", ("directions", "to", entry.word), entry.word))
    return EvalSet(utts, pool)


def make_english_set(words: Sequence[str], n_utts: int, seed: int | str) -> EvalSet:
    """All-English utterances of 3 to 6 words, no pool targets."""
    if not words:
        raise EmptyPool("no words to sample from")
    rng = random.Random(f"{seed}:make-english")
    vocab = sorted(words)
    utts = []
    for i in range(n_utts):
        n = rng.randint(3, 6)
        utts.append(Utterance(f"eng{i:04d}", tuple(rng.choice(vocab) for _ in range(n)), ""))
    return EvalSet(utts, [])


# -- pool expansion --------------------------------------------------

# Syllables pair a spelling with its source-language phonemes; generated
# names concatenate both sides, so spellings stay segmentable and every
# pronunciation stays inside the source inventory.
SYLLABLES: tuple[tuple[str, str], ...] = (
    ("mont", "m o~"), ("ville", "v i l"), ("bour", "b u R"), ("sain", "s e~"),
    ("cler", "k l E R"), ("fon", "f o~"), ("tai", "t E"), ("beau", "b o"),
    ("mar", "m a R"), ("ly", "l i"), ("ro", "R o"), ("che", "S @"),
    ("vau", "v o"), ("gre", "g R @"), ("nan", "n a~"), ("tou", "t u"),
    ("pe", "p @"), ("ri", "R i"), ("sur", "s y R"), ("lac", "l a k"),
    ("bre", "b R @"), ("jo", "Z o"), ("cha", "S a"), ("neu", "n 2"),
    ("pont", "p o~"), ("gny", "J i"), ("teuil", "t 9 j"), ("zé", "z e"),
    ("mi", "m i"), ("dor", "d O R"),
)


def expand_pool(pool: list[PoolEntry], n_total: int, seed: int | str, res: ResourceSet) -> list[PoolEntry]:
    """Grow a pool to ``n_total`` entries with generated pseudo-names.

    Names are 2 to 4 syllables; both the written forms and the mapped
    (target-inventory) pronunciations are kept collision-free, so the
    decoding graph can always tell pool members apart.
    """
    if n_total <= len(pool):
        return list(pool)
    rng = random.Random(f"{seed}:expand-pool")
    words = {e.word for e in pool}
    prons = {tuple(map_phonemes(e.pron, res.pmap)) for e in pool}
    out = list(pool)
    attempts = 0
    while len(out) < n_total:
        attempts += 1
        if attempts > 100 * n_total:
            raise FormatError(f"could not generate {n_total} distinct pool entries")
        parts = [rng.choice(SYLLABLES) for _ in range(rng.randint(2, 4))]
        word = "".join(p[0] for p in parts)
        pron = tuple(" ".join(p[1] for p in parts).split())
        mapped = tuple(map_phonemes(pron, res.pmap))
        if word in words or mapped in prons:
            continue
        words.add(word)
        prons.add(mapped)
        out.append(PoolEntry(word, pron))
    return out


# -- experiments -----------------------------------------------------


@dataclass
class UttResult:
    utt_id: str
    ref: tuple[str, ...]
    hyp: tuple[str, ...]
    wer: float
    edits: int
    flags: tuple[str, ...]


@dataclass
class ExperimentReport:
    unit: str
    n_bias: int
    noise: float
    bonus: float
    lam: float
    beam_size: int
    seed: str
    rows: list[UttResult] = field(default_factory=list)

    @property
    def corpus_wer(self) -> float:
        ref_len = sum(len(r.ref) for r in self.rows)
        if ref_len == 0:
            return 0.0
        return sum(r.edits for r in self.rows) / ref_len

    @property
    def n_utts(self) -> int:
        return len(self.rows)

    def dumps(self) -> str:
        lines = ["utt_id\tref\thyp\twer\tflags"]
        for r in self.rows:
            flags = ",".join(r.flags) if r.flags else "-"
            lines.append(f"{r.utt_id}\t{' '.join(r.ref)}\t{' '.join(r.hyp)}\t{r.wer:.6f}\t{flags}")
        lines.append(f"# corpus_wer\t{self.corpus_wer:.6f}")
        return "\n".join(lines) + "\n"

    def dumps_json(self) -> str:
        """The TSV report as JSON lines: one object per utterance, then
        a summary object carrying the run configuration."""
        lines = []
        for r in self.rows:
            lines.append(json.dumps({
                "utt_id": r.utt_id,
                "ref": list(r.ref),
                "hyp": list(r.hyp),
                "wer": r.wer,
                "edits": r.edits,
                "flags": list(r.flags),
            }, ensure_ascii=False))
        lines.append(json.dumps({
            "corpus_wer": self.corpus_wer,
            "n_utts": self.n_utts,
            "unit": self.unit,
            "n_bias": self.n_bias,
            "noise": self.noise,
            "bonus": self.bonus,
            "lam": self.lam,
            "beam_size": self.beam_size,
            "seed": self.seed,
        }))
        return "\n".join(lines) + "\n"


def _bias_for(
    unit: str,
    bias_list: list[str],
    pool_lex: Lexicon,
    res: ResourceSet,
    bonus: float,
    lam: float,
) -> ContextualFst | None:
    if unit == "none":
        return None
    if unit == "parallel":
        return build_parallel_bias(
            bias_list,
            BiasConfig(unit="phoneme", bonus=bonus, lam=lam),
            lex=pool_lex,
            inv=res.inv,
            pmap=res.pmap,
        )
    return build_contextual_fst(
        bias_list,
        BiasConfig(unit=unit, bonus=bonus, lam=lam),
        lex=pool_lex,
        inv=res.inv,
        pmap=res.pmap,
        symtab=res.symtab,
    )


def run_bias_experiment(
    dset: EvalSet,
    res: ResourceSet,
    n_bias: int,
    unit: str = "phoneme",
    bonus: float = 2.0,
    lam: float = 1.0,
    noise: float = 0.2,
    seed: int | str = 0,
    beam_size: int = 8,
) -> ExperimentReport:
    """Decode a directions set under one biasing condition.

    ``unit`` picks the biasing machine ("none" decodes with a bare hub
    graph and no bias). Each utterance's biasing list is its truth word
    plus n_bias - 1 distractors drawn from the pool without
    replacement; emissions render the truth word as phonemes.
    """
    if unit not in BIAS_UNITS:
        raise FormatError(f"unknown biasing unit {unit!r}")
    if n_bias < 1:
        raise FormatError(f"n_bias must be >= 1, got {n_bias}")
    pool_lex = pool_to_lexicon(dset.pool, res.foreign_symtab) if dset.pool else res.foreign_lex
    report = ExperimentReport(unit, n_bias, noise, bonus, lam, beam_size, str(seed))
    # Graphs and bias machines depend only on the word set; with the
    # list size at the pool size every utterance shares one set.
    cache: dict[frozenset[str], tuple] = {}
    for utt in dset.utterances:
        urng = random.Random(f"{seed}:{utt.utt_id}:distractors")
        others = [e.word for e in dset.pool if e.word != utt.truth]
        if n_bias - 1 > len(others):
            raise EmptyPool(f"pool of {len(dset.pool)} cannot supply {n_bias - 1} distractors")
        # No truth word means no guaranteed entry; at n_bias=1 over an
        # empty pool this decodes with an empty (neutral) bias list.
        bias_list = ([utt.truth] if utt.truth else []) + urng.sample(others, n_bias - 1)
        key = frozenset(bias_list) if unit != "none" else frozenset()
        if key in cache:
            graph, bias = cache[key]
        elif unit == "none":
            graph = build_decoding_graph([], res.symtab, res.inv)
            bias = None
            cache[key] = (graph, bias)
        else:
            graph = build_decoding_graph(
                sorted(bias_list), res.symtab, res.inv, lex=pool_lex, pmap=res.pmap
            )
            bias = _bias_for(unit, sorted(bias_list), pool_lex, res, bonus, lam)
            cache[key] = (graph, bias)
        em = generate_synthetic_emissions(
            utt.words,
            {utt.truth} if utt.truth else set(),
            inv=res.inv,
            lex=pool_lex,
            pmap=res.pmap,
            noise=noise,
            seed=f"{seed}:{utt.utt_id}:emissions",
            utt_id=utt.utt_id,
        )
        result = decode(em, graph, DecoderConfig(beam_size, lam, bias, finalize_partial=True))
        ref = tuple(normalize_word(w) for w in utt.words)
        hyp = tuple(result.transcript)
        report.rows.append(
            UttResult(utt.utt_id, ref, hyp, wer(ref, hyp), edit_distance(ref, hyp), result.flags)
        )
    return report


@dataclass
class SweepRow:
    n_bias: int
    wer: float
    n_utts: int
    seed: str


@dataclass
class SweepReport:
    rows: list[SweepRow] = field(default_factory=list)

    def dumps(self) -> str:
        lines = ["n_bias\twer\tn_utts\tseed"]
        for r in self.rows:
            lines.append(f"{r.n_bias}\t{r.wer:.6f}\t{r.n_utts}\t{r.seed}")
        return "\n".join(lines) + "\n"

    def dumps_json(self) -> str:
        lines = [
            json.dumps({"n_bias": r.n_bias, "wer": r.wer, "n_utts": r.n_utts, "seed": r.seed})
            for r in self.rows
        ]
        return "\n".join(lines) + "\n"

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")


def distractor_sweep(
    dset: EvalSet,
    res: ResourceSet,
    n_list: Sequence[int],
    unit: str = "phoneme",
    bonus: float = 2.0,
    lam: float = 1.0,
    noise: float = 0.2,
    seed: int | str = 0,
    beam_size: int = 8,
) -> SweepReport:
    """Run the biasing experiment at each list size in ``n_list``.

    Distractor draws derive from (seed, utterance) only, so every list
    size replays the same per-utterance random stream.
    """
    report = SweepReport()
    for n_bias in n_list:
        run = run_bias_experiment(
            dset, res, n_bias, unit=unit, bonus=bonus, lam=lam,
            noise=noise, seed=seed, beam_size=beam_size,
        )
        report.rows.append(SweepRow(n_bias, run.corpus_wer, run.n_utts, str(seed)))
    return report
