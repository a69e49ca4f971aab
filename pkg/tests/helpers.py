"""Shared generators and independent oracles for the test suite.

The oracles here deliberately avoid the library's own algorithm code
paths: path enumeration uses the library's enumerate_paths (itself a
brute-force reference), but bias scoring, shortest path, and the full
decoder are reimplemented from scratch so agreement is meaningful.
"""

from __future__ import annotations

import math
import random

from phonebias import EPS, SymbolTable, Wfst
from phonebias.bias import (
    BiasConfig,
    ContextualFst,
    build_contextual_fst,
    build_unit_trie,
    reference_contextual_fst,
)
from phonebias.decoder import EmissionSequence
from phonebias.graph import DecodingGraph, build_decoding_graph
from phonebias.lexicon import Lexicon
from phonebias.subwords import WordpieceInventory
from phonebias.symbols import PHI

INF = math.inf


# -- tiny symbol worlds ------------------------------------------------


def make_symtab(
    phonemes: tuple[str, ...] = ("a", "b", "c"),
    pieces: tuple[str, ...] = (),
    graphemes: tuple[str, ...] = (),
) -> SymbolTable:
    table = SymbolTable()
    table.add("<eow>", "special")
    for p in phonemes:
        table.add(p, "phoneme")
    for p in pieces:
        table.add(p, "wordpiece")
    for g in graphemes:
        table.add(g, "grapheme")
    return table


def tiny_world():
    """A minimal decoding world: 3 phonemes, pieces over {u, v}, and a
    2-word lexicon whose prons live directly in the model inventory."""
    symtab = make_symtab(
        phonemes=("a", "b", "c"),
        pieces=("_u", "_v", "##u", "##v", "_uv", "_vu"),
    )
    inv = WordpieceInventory(symtab, frozenset(("_u", "_v", "##u", "##v", "_uv", "_vu")))
    lex = Lexicon(symtab)
    lex.add("uv", 5, [symtab.index("a"), symtab.index("b")])
    lex.add("vu", 5, [symtab.index("c")])
    return symtab, inv, lex


# -- random machine generators ----------------------------------------


def random_acyclic_wfst(
    rng: random.Random,
    n_states: int = 6,
    n_labels: int = 3,
    arc_density: float = 0.5,
    eps_eps_prob: float = 0.0,
    out_eps_prob: float = 0.25,
    functional: bool = False,
    acceptor: bool = False,
    deterministic: bool = False,
    int_weights: bool = False,
) -> Wfst:
    """A random acyclic transducer with forward-only arcs.

    Labels are 2..n_labels+1 (0 and 1 are reserved). ``functional``
    fixes one output (or epsilon) per input label so each input string
    has exactly one output string. ``deterministic`` keeps input labels
    unique per state. ``eps_eps_prob`` mixes in arcs that are epsilon
    on both sides.
    """
    fst = Wfst()
    fst.add_states(n_states)
    fst.set_start(0)
    labels = list(range(2, 2 + n_labels))
    out_of = {}
    if functional:
        for lb in labels:
            out_of[lb] = EPS if rng.random() < out_eps_prob else rng.choice(labels)
    for src in range(n_states - 1):
        used: set[int] = set()
        for dst in range(src + 1, n_states):
            if rng.random() >= arc_density:
                continue
            w = float(rng.randint(0, 6)) if int_weights else round(rng.uniform(0.0, 4.0), 3)
            if eps_eps_prob and rng.random() < eps_eps_prob:
                fst.add_arc(src, EPS, EPS, w, dst)
                continue
            il = rng.choice(labels)
            if deterministic:
                if il in used:
                    continue
                used.add(il)
            if acceptor:
                ol = il
            elif functional:
                ol = out_of[il]
            else:
                ol = EPS if rng.random() < out_eps_prob else rng.choice(labels)
            fst.add_arc(src, il, ol, w, dst)
    fst.set_final(n_states - 1, float(rng.randint(0, 3)) if int_weights else round(rng.uniform(0.0, 2.0), 3))
    for state in range(1, n_states - 1):
        if rng.random() < 0.25:
            fst.set_final(state, float(rng.randint(0, 3)) if int_weights else round(rng.uniform(0.0, 2.0), 3))
    return fst


def random_cyclic_wfst(rng: random.Random, n_states: int = 5, n_labels: int = 3) -> Wfst:
    """Random machine with non-negative weights and some back arcs."""
    fst = random_acyclic_wfst(rng, n_states=n_states, n_labels=n_labels)
    labels = list(range(2, 2 + n_labels))
    for _ in range(rng.randint(1, 3)):
        src = rng.randrange(1, n_states)
        dst = rng.randrange(0, src + 1)  # src -> earlier state closes a cycle
        fst.add_arc(src, rng.choice(labels), rng.choice(labels), round(rng.uniform(0.0, 3.0), 3), dst)
    return fst


# -- per-algorithm randomized equivalence checks -----------------------


def assert_pathmaps_match(got: dict, want: dict, tol: float = 1e-9) -> None:
    assert set(got) == set(want)
    for key, cost in want.items():
        assert abs(got[key] - cost) <= tol, (key, got[key], cost)


def check_compose_case(rng: random.Random) -> None:
    from phonebias.wfst import compose, enumerate_paths, path_map

    a = random_acyclic_wfst(rng, n_states=5, n_labels=3, out_eps_prob=0.3)
    b = random_acyclic_wfst(rng, n_states=5, n_labels=3, out_eps_prob=0.3)
    want: dict = {}
    for pa in enumerate_paths(a):
        for pb in enumerate_paths(b):
            if pa.outputs != pb.inputs:
                continue
            key = (pa.inputs, pb.outputs)
            cost = pa.cost + pb.cost
            if cost < want.get(key, INF):
                want[key] = cost
    got = path_map(enumerate_paths(compose(a, b)))
    assert_pathmaps_match(got, want)


def check_remove_epsilons_case(rng: random.Random) -> None:
    from phonebias.wfst import enumerate_paths, path_map, remove_epsilons

    fst = random_acyclic_wfst(
        rng, n_states=6, n_labels=3, eps_eps_prob=0.35, out_eps_prob=0.4
    )
    want = path_map(enumerate_paths(fst))
    out = remove_epsilons(fst)
    assert not out.has_input_epsilons()
    assert_pathmaps_match(path_map(enumerate_paths(out)), want)


def check_determinize_case(rng: random.Random) -> None:
    from phonebias.wfst import determinize_acyclic, enumerate_paths, path_map

    fst = random_acyclic_wfst(
        rng, n_states=6, n_labels=3, arc_density=0.6, functional=True, out_eps_prob=0.35
    )
    want = path_map(enumerate_paths(fst))
    out = determinize_acyclic(fst)
    out.input_arc_map()  # at most one arc per (state, real label)
    assert_pathmaps_match(path_map(enumerate_paths(out)), want)


def check_minimize_case(rng: random.Random) -> None:
    from phonebias.wfst import (
        determinize_acyclic,
        enumerate_paths,
        minimize_acyclic,
        path_map,
    )

    src = random_acyclic_wfst(
        rng, n_states=6, n_labels=3, arc_density=0.6, functional=True, out_eps_prob=0.35
    )
    det = determinize_acyclic(src)
    out = minimize_acyclic(det)
    assert out.num_states <= det.num_states
    assert_pathmaps_match(path_map(enumerate_paths(out)), path_map(enumerate_paths(det)))
    again = minimize_acyclic(out)
    assert again.num_states == out.num_states


def check_shortest_path_case(rng: random.Random) -> None:
    from phonebias.errors import EmptyLanguage
    from phonebias.wfst import enumerate_paths, shortest_path

    acyclic = random_acyclic_wfst(rng, n_states=6, n_labels=3, out_eps_prob=0.3)
    paths = enumerate_paths(acyclic)
    if not paths:
        try:
            shortest_path(acyclic)
        except EmptyLanguage:
            pass
        else:
            raise AssertionError("expected EmptyLanguage")
    else:
        want = min(paths, key=lambda p: (p.cost, p.outputs, p.inputs))
        assert shortest_path(acyclic) == want

    cyclic = random_cyclic_wfst(rng, n_states=5, n_labels=3)
    want_cost = brute_min_cost_simple_paths(cyclic)
    if want_cost == INF:
        try:
            shortest_path(cyclic)
        except EmptyLanguage:
            pass
        else:
            raise AssertionError("expected EmptyLanguage")
    else:
        assert abs(shortest_path(cyclic).cost - want_cost) <= 1e-9


# -- independent oracles ----------------------------------------------


def brute_min_cost_simple_paths(fst: Wfst) -> float:
    """Minimum accepting-path cost by DFS over simple paths.

    With non-negative weights any walk is a simple path plus cycles of
    non-negative extra cost, so this equals the true shortest path.
    """
    best = INF
    stack = [(fst.start, 0.0, frozenset({fst.start}))]
    while stack:
        state, cost, visited = stack.pop()
        w = fst.final_weight(state)
        if w < INF:
            best = min(best, cost + w)
        for arc in fst.arcs(state):
            if arc.nextstate not in visited:
                stack.append((arc.nextstate, cost + arc.weight, visited | {arc.nextstate}))
    return best


class TrieBiasOracle:
    """Reference semantics for a failure-decorated phrase trie, kept as
    plain prefix sets instead of an automaton.

    step() consumes one symbol and returns its cost contribution under
    the rules: extending a known prefix costs -bonus (and completing a
    phrase resets the prefix); otherwise the held prefix is cancelled at
    +len*bonus and the symbol retries from the root.
    """

    def __init__(self, phrases: list[tuple[int, ...]], bonus: float):
        self.bonus = bonus
        self.full = {tuple(p) for p in phrases if p}
        self.prefixes: set[tuple[int, ...]] = set()
        for p in self.full:
            for i in range(1, len(p) + 1):
                self.prefixes.add(p[:i])
        self.cur: tuple[int, ...] = ()
        self.completed: list[tuple[int, ...]] = []

    def step(self, label: int) -> float:
        ext = self.cur + (label,)
        if ext in self.prefixes:
            cost = -self.bonus
            if ext in self.full:
                self.completed.append(ext)
                self.cur = ()
            else:
                self.cur = ext
            return cost
        cost = len(self.cur) * self.bonus
        self.cur = ()
        if (label,) in self.prefixes:
            cost -= self.bonus
            if (label,) in self.full:
                self.completed.append((label,))
            else:
                self.cur = (label,)
        return cost

    def cancel(self) -> float:
        cost = len(self.cur) * self.bonus
        self.cur = ()
        return cost


class OracleNoHypothesis(Exception):
    """The exhaustive decoder found no usable hypothesis."""


def _oracle_closure(fst: Wfst, state: int) -> tuple[int, tuple[int, ...]]:
    outs: list[int] = []
    cur = state
    for _ in range(fst.num_states + 1):
        eps = [a for a in fst.arcs(cur) if a.ilabel == EPS]
        if not eps:
            return cur, tuple(outs)
        (arc,) = eps
        if arc.olabel != EPS:
            outs.append(arc.olabel)
        cur = arc.nextstate
    raise AssertionError("epsilon chain too long")


def _oracle_bias_step(fst: Wfst, state: int, label: int) -> tuple[int, float]:
    cur, acc = state, 0.0
    for _ in range(fst.num_states + 1):
        match = next((a for a in fst.arcs(cur) if a.ilabel == label), None)
        if match is not None:
            nxt = match.nextstate
            if fst.is_final(nxt):
                nxt = fst.start
            return nxt, acc + match.weight
        fail = next((a for a in fst.arcs(cur) if a.ilabel == PHI), None)
        if fail is not None:
            acc += fail.weight
            cur = fail.nextstate
            continue
        return fst.start, acc
    raise AssertionError("failure chain too long")


def _oracle_cancel(fst: Wfst, state: int) -> float:
    if state == fst.start:
        return 0.0
    for arc in fst.arcs(state):
        if arc.ilabel == PHI:
            return arc.weight
    return 0.0


def exhaustive_decode(
    em: EmissionSequence,
    graph: DecodingGraph,
    bias: ContextualFst | None,
    lam: float,
    finalize_partial: bool = False,
) -> tuple[tuple[int, ...], float, bool]:
    """Unpruned reference decoder: expands every consumable label at
    every step, merges duplicate (output, graph state, bias state)
    triples by probability mass, and applies end-of-stream settlement.
    Returns (output ids, combined cost, truncated)."""
    gfst = graph.fst
    bfst = bias.fst if bias is not None else None
    b0 = bfst.start if bfst is not None else 0
    # hypothesis: (out, inp, g, b) -> (model_cost, bias_cost)
    hyps: dict[tuple, tuple[float, float]] = {((), (), graph.hub, b0): (0.0, 0.0)}
    died = False
    for step in em.steps:
        cand: list[tuple[tuple, float, float]] = []
        for (out, inp, g, b), (mc, bc) in hyps.items():
            for arc in gfst.arcs(g):
                if arc.ilabel == EPS or arc.ilabel not in step:
                    continue
                b2, delta = (b, 0.0) if bfst is None else _oracle_bias_step(bfst, b, arc.ilabel)
                rest, extra = _oracle_closure(gfst, arc.nextstate)
                emitted = () if arc.olabel == EPS else (arc.olabel,)
                key = (out + emitted + extra, inp + (arc.ilabel,), rest, b2)
                cand.append((key, mc - step[arc.ilabel], bc + delta))
        if not cand:
            if not finalize_partial:
                raise OracleNoHypothesis("beam died")
            died = True
            break
        hyps = _oracle_merge(cand, lam)
    final: list[tuple[tuple, float, float]] = []
    for (out, inp, g, b), (mc, bc) in hyps.items():
        if g != graph.hub and not finalize_partial:
            continue
        settle = _oracle_cancel(bfst, b) if bfst is not None else 0.0
        final.append(((out, inp, g, b0), mc, bc + settle))
    if not final:
        raise OracleNoHypothesis("no hypothesis on the hub")
    merged = _oracle_merge(final, lam)
    ranked = sorted(
        ((mc + lam * bc, out, inp, g) for (out, inp, g, b), (mc, bc) in merged.items())
    )
    total, out, _, g = ranked[0]
    return out, total, (died or g != graph.hub)


def _oracle_merge(
    cand: list[tuple[tuple, float, float]], lam: float
) -> dict[tuple, tuple[float, float]]:
    groups: dict[tuple, list[tuple[tuple, float, float]]] = {}
    for key, mc, bc in cand:
        out, inp, g, b = key
        groups.setdefault((out, g, b), []).append((key, mc, bc))
    merged: dict[tuple, tuple[float, float]] = {}
    for members in groups.values():
        if len(members) == 1:
            key, mc, bc = members[0]
            merged[key] = (mc, bc)
            continue
        totals = sorted(mc + lam * bc for _, mc, bc in members)
        m = totals[0]
        combined = m - math.log(sum(math.exp(m - t) for t in totals))
        best_key, best_mc, best_bc = min(members, key=lambda x: (x[1] + lam * x[2], x[0][1]))
        merged[best_key] = (combined - lam * best_bc, best_bc)
    return merged


# -- random phrase worlds ----------------------------------------------


def random_phrase_world(rng: random.Random, n_words: int = 6, n_phrases: int = 4, max_phrase_words: int = 3):
    """A synthetic lexicon plus random phrases over it.

    Pronunciations are kept distinct (the trimmed-lexicon precondition;
    homophones would make the unit-to-word relation non-functional).
    Returns (symtab, lex, phrases, unit_seqs) where unit_seqs[i] is the
    independently computed phoneme-id expansion of phrases[i] (words
    joined by the boundary marker id).
    """
    symtab = make_symtab(phonemes=("a", "b", "c"))
    lex = Lexicon(symtab)
    words = []
    used_prons: set[tuple[int, ...]] = set()
    for i in range(n_words):
        word = f"w{i}"
        while True:
            pron = tuple(symtab.index(rng.choice("abc")) for _ in range(rng.randint(1, 3)))
            if pron not in used_prons:
                used_prons.add(pron)
                break
        lex.add(word, rng.randint(1, 50), pron)
        words.append(word)
    eow = symtab.eow
    phrases = []
    unit_seqs = []
    for _ in range(n_phrases):
        picks = [rng.choice(words) for _ in range(rng.randint(1, max_phrase_words))]
        phrases.append(" ".join(picks))
        seq: list[int] = []
        for j, w in enumerate(picks):
            if j:
                seq.append(eow)
            seq.extend(lex.pron(w))
        unit_seqs.append(tuple(seq))
    return symtab, lex, phrases, unit_seqs


def check_cancellation_case(rng: random.Random, n_seqs: int, seq_len: int = 30) -> None:
    """Property: stepping random label traffic through a biasing
    machine scores exactly -bonus per unit of completed phrase matches
    and nets zero for everything else, in agreement with the prefix-set
    oracle at every step."""
    symtab, lex, phrases, unit_seqs = random_phrase_world(rng)
    bonus = rng.choice([0.5, 1.0, 2.0])
    cfst = build_contextual_fst(
        phrases, BiasConfig(unit="phoneme", bonus=bonus), lex=lex, symtab=symtab
    )
    oracle_phrases = [tuple(s) for s in unit_seqs]
    alphabet = [symtab.index(s) for s in "abc"] + [symtab.eow]
    for _ in range(n_seqs):
        oracle = TrieBiasOracle(oracle_phrases, bonus)
        state = cfst.start
        total = 0.0
        labels = [rng.choice(alphabet) for _ in range(rng.randint(1, seq_len))]
        # Splice in some exact phrase renditions so completions happen.
        if rng.random() < 0.7 and unit_seqs:
            at = rng.randrange(len(labels) + 1)
            labels[at:at] = list(rng.choice(unit_seqs))
        for label in labels:
            state, cost = cfst.step(state, label)
            want = oracle.step(label)
            assert cost == want, (label, cost, want)
            total += cost
        settle = cfst.cancel_cost(state)
        assert settle == oracle.cancel()
        matched_units = sum(len(p) for p in oracle.completed)
        assert total + settle == -bonus * matched_units


def check_pipeline_equivalence_case(rng: random.Random, max_phrases: int = 20) -> None:
    """Property: the direct phrase trie and the reference construction
    (speller composed with a word acceptor, determinized, minimized,
    reweighted) assign identical minimum costs to identical inputs."""
    from phonebias.wfst import enumerate_paths, input_cost_map

    n_phrases = rng.randint(1, max_phrases)
    symtab, lex, phrases, unit_seqs = random_phrase_world(
        rng, n_words=rng.randint(2, 8), n_phrases=n_phrases
    )
    cfg = BiasConfig(unit="phoneme", bonus=rng.choice([1.0, 2.0]))
    trie = build_unit_trie(phrases, cfg, lex=lex, symtab=symtab)
    ref = reference_contextual_fst(phrases, cfg, lex=lex, symtab=symtab)
    got = input_cost_map(enumerate_paths(trie))
    want = input_cost_map(enumerate_paths(ref))
    assert_pathmaps_match(got, want)
    # Both must score each phrase at -bonus per consumed unit.
    for seq in unit_seqs:
        assert got[seq] == -cfg.bonus * len(seq)


# -- random decode instances ------------------------------------------


def random_decode_instance(rng: random.Random):
    """A small random decoding problem over the tiny world.

    Returns (emissions, graph, bias or None, lam). Streams mix faithful
    word renditions with uniform-noise steps so some instances die and
    ties are exercised.
    """
    symtab, inv, lex = tiny_world()
    words = ["uv", "vu"]
    graph = build_decoding_graph(words, symtab, inv, lex=lex)
    bias = None
    if rng.random() < 0.7:
        phrases = rng.sample(words, rng.randint(1, 2))
        bias = build_contextual_fst(
            phrases, BiasConfig(unit="phoneme", bonus=rng.choice([1.0, 2.0])), lex=lex, symtab=symtab
        )
    lam = rng.choice([0.5, 1.0, 2.0])
    support = [symtab.index(s) for s in ("a", "b", "c", "_u", "_v", "##u", "##v", "<eow>")]
    steps: list[dict[int, float]] = []
    n_steps = rng.randint(1, 6)
    word_ids = {
        "uv": list(lex.pron("uv")),
        "vu": list(lex.pron("vu")),
    }
    plan: list[int] = []
    while len(plan) < n_steps:
        if plan:
            plan.append(symtab.eow)
        plan.extend(word_ids[rng.choice(words)])
    plan = plan[:n_steps]
    for sym in plan:
        kind = rng.random()
        if kind < 0.5:
            steps.append({sym: 0.0})
        elif kind < 0.8:
            chosen = rng.sample(support, rng.randint(2, 4))
            if sym not in chosen:
                chosen[0] = sym
            logp = math.log(1.0 / len(chosen))
            steps.append({s: logp for s in chosen})
        else:
            chosen = rng.sample(support, rng.randint(1, 3))
            raw = [rng.uniform(0.1, 1.0) for _ in chosen]
            z = sum(raw)
            steps.append({s: math.log(p / z) for s, p in zip(chosen, raw)})
    return EmissionSequence("rnd", steps), graph, bias, lam
