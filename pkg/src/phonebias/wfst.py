"""Weighted finite-state transducers over the (min, +) cost semiring.

Costs are negative log probabilities: lower is better, 0 is free, and
path cost is the sum of arc costs plus the final weight. Label id 0 is
epsilon (consumes/emits nothing) and id 1 is the failure label, which
is not a real input symbol but a fallback taken by
:func:`step_with_failure` when a state has no arc for the query label.

The module keeps the machine representation deliberately small: dense
integer states, per-state arc lists, and a dict of final weights.
Algorithms are free functions. Machines are built by mutation and
treated as immutable once handed to an algorithm.
"""

from __future__ import annotations

import heapq
import math
import pathlib
from typing import Iterable, Iterator, NamedTuple

from .errors import (
    AlphabetMismatch,
    DivergentEpsilonCycle,
    EmptyLanguage,
    FormatError,
    MalformedGraph,
    NoTransition,
    NotAcyclic,
    NotDeterministic,
    NotFunctional,
    TooManyPaths,
    UnsupportedArcKind,
)
from .symbols import EPS, PHI, SymbolTable

INF = math.inf

NO_STATE = -1


class Arc(NamedTuple):
    ilabel: int
    olabel: int
    weight: float
    nextstate: int


class Path(NamedTuple):
    """One accepting path, with epsilon labels dropped from both sides."""

    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    cost: float


class Wfst:
    """Mutable weighted transducer with dense integer states.

    Symbol tables may be attached on either side purely as metadata;
    they never affect the label ids stored on arcs but let composition
    detect mismatched alphabets.
    """

    def __init__(self, isyms: SymbolTable | None = None, osyms: SymbolTable | None = None) -> None:
        self._arcs: list[list[Arc]] = []
        self._finals: dict[int, float] = {}
        self.start: int = NO_STATE
        self.isyms = isyms
        self.osyms = osyms

    # -- construction ------------------------------------------------

    def add_state(self) -> int:
        self._arcs.append([])
        return len(self._arcs) - 1

    def add_states(self, n: int) -> None:
        for _ in range(n):
            self.add_state()

    def set_start(self, state: int) -> None:
        self._check_state(state)
        self.start = state

    def add_arc(self, src: int, ilabel: int, olabel: int, weight: float, dst: int) -> None:
        self._check_state(src)
        self._check_state(dst)
        self._arcs[src].append(Arc(ilabel, olabel, float(weight), dst))

    def set_final(self, state: int, weight: float = 0.0) -> None:
        self._check_state(state)
        self._finals[state] = float(weight)

    def _check_state(self, state: int) -> None:
        if not 0 <= state < len(self._arcs):
            raise ValueError(f"state {state} out of range (num_states={len(self._arcs)})")

    # -- inspection --------------------------------------------------

    @property
    def num_states(self) -> int:
        return len(self._arcs)

    @property
    def num_arcs(self) -> int:
        return sum(len(a) for a in self._arcs)

    def states(self) -> range:
        return range(len(self._arcs))

    def arcs(self, state: int) -> tuple[Arc, ...]:
        self._check_state(state)
        return tuple(self._arcs[state])

    def is_final(self, state: int) -> bool:
        return state in self._finals

    def final_weight(self, state: int) -> float:
        return self._finals.get(state, INF)

    def final_states(self) -> Iterator[tuple[int, float]]:
        yield from sorted(self._finals.items())

    def has_failure_arcs(self) -> bool:
        return any(arc.ilabel == PHI for arcs in self._arcs for arc in arcs)

    def has_input_epsilons(self) -> bool:
        return any(arc.ilabel == EPS for arcs in self._arcs for arc in arcs)

    def input_arc_map(self) -> list[dict[int, Arc]]:
        """Per-state ilabel -> arc index for deterministic machines.

        Raises NotDeterministic if some state carries two arcs with the
        same non-epsilon input label.
        """
        out: list[dict[int, Arc]] = []
        for state in self.states():
            index: dict[int, Arc] = {}
            for arc in self._arcs[state]:
                if arc.ilabel != EPS and arc.ilabel in index:
                    raise NotDeterministic(
                        f"state {state} has two arcs with input label {arc.ilabel}"
                    )
                if arc.ilabel != EPS:
                    index[arc.ilabel] = arc
            out.append(index)
        return out

    # -- serialization -----------------------------------------------

    def dumps(self) -> str:
        """Text form: arc lines ``src dst ilabel olabel cost`` then final
        lines ``state cost``, tab-separated, start state's lines first so
        the first line's leading field names the start."""
        lines: list[str] = []

        def arc_lines(state: int) -> None:
            for arc in self._arcs[state]:
                lines.append(
                    f"{state}\t{arc.nextstate}\t{arc.ilabel}\t{arc.olabel}\t{_fmt(arc.weight)}"
                )

        if self.start != NO_STATE:
            if not self._arcs[self.start] and self.start in self._finals:
                lines.append(f"{self.start}\t{_fmt(self._finals[self.start])}")
            arc_lines(self.start)
        for state in self.states():
            if state != self.start:
                arc_lines(state)
        for state, weight in sorted(self._finals.items()):
            if state == self.start and not self._arcs[self.start]:
                continue  # already written as the leading line
            lines.append(f"{state}\t{_fmt(weight)}")
        return "\n".join(lines) + ("\n" if lines else "")

    def write(self, path: str | pathlib.Path) -> None:
        pathlib.Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def loads(cls, text: str, origin: str = "<string>") -> "Wfst":
        fst = cls()
        rows: list[tuple[int, ...]] = []
        max_state = -1
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) not in (2, 5):
                raise FormatError(f"{origin}:{lineno}: expected 2 or 5 fields, got {len(fields)}")
            try:
                if len(fields) == 5:
                    src, dst, il, ol = (int(f) for f in fields[:4])
                    w = float(fields[4])
                    rows.append((5, src, dst, il, ol, w))
                    max_state = max(max_state, src, dst)
                else:
                    state = int(fields[0])
                    w = float(fields[1])
                    rows.append((2, state, w))
                    max_state = max(max_state, state)
            except ValueError:
                raise FormatError(f"{origin}:{lineno}: malformed numeric field") from None
        if not rows:
            return fst
        fst.add_states(max_state + 1)
        fst.set_start(rows[0][1])
        for row in rows:
            if row[0] == 5:
                _, src, dst, il, ol, w = row
                fst.add_arc(src, il, ol, w, dst)
            else:
                _, state, w = row
                fst.set_final(state, w)
        return fst

    @classmethod
    def read(cls, path: str | pathlib.Path) -> "Wfst":
        p = pathlib.Path(path)
        return cls.loads(p.read_text(encoding="utf-8"), origin=str(p))


def _fmt(weight: float) -> str:
    # repr round-trips floats exactly and keeps integral costs short.
    if math.isfinite(weight) and weight == int(weight) and abs(weight) < 1e15:
        return str(int(weight))
    return repr(weight)


# -- structural helpers ---------------------------------------------


def topological_order(fst: Wfst) -> list[int]:
    """States in topological order; raises NotAcyclic on any cycle."""
    order: list[int] = []
    color = [0] * fst.num_states  # 0 white, 1 grey, 2 black
    for root in fst.states():
        if color[root]:
            continue
        stack: list[tuple[int, int]] = [(root, 0)]
        color[root] = 1
        while stack:
            state, i = stack[-1]
            if i < len(fst._arcs[state]):
                stack[-1] = (state, i + 1)
                nxt = fst._arcs[state][i].nextstate
                if color[nxt] == 1:
                    raise NotAcyclic(f"cycle through state {nxt}")
                if color[nxt] == 0:
                    color[nxt] = 1
                    stack.append((nxt, 0))
            else:
                color[state] = 2
                order.append(state)
                stack.pop()
    order.reverse()
    return order


def is_acyclic(fst: Wfst) -> bool:
    try:
        topological_order(fst)
    except NotAcyclic:
        return False
    return True


def connect(fst: Wfst) -> Wfst:
    """Keep only states on some start-to-final path (accessible and
    co-accessible); state ids are renumbered densely."""
    if fst.start == NO_STATE:
        return Wfst(fst.isyms, fst.osyms)
    forward: set[int] = set()
    frontier = [fst.start]
    forward.add(fst.start)
    while frontier:
        state = frontier.pop()
        for arc in fst._arcs[state]:
            if arc.nextstate not in forward:
                forward.add(arc.nextstate)
                frontier.append(arc.nextstate)
    rev: dict[int, list[int]] = {s: [] for s in fst.states()}
    for state in fst.states():
        for arc in fst._arcs[state]:
            rev[arc.nextstate].append(state)
    backward: set[int] = set()
    frontier = [s for s in fst._finals if s in forward]
    backward.update(frontier)
    while frontier:
        state = frontier.pop()
        for prev in rev[state]:
            if prev not in backward:
                backward.add(prev)
                frontier.append(prev)
    keep = sorted(forward & backward)
    out = Wfst(fst.isyms, fst.osyms)
    remap = {old: out.add_state() for old in keep}
    if fst.start not in remap:
        return Wfst(fst.isyms, fst.osyms)
    out.set_start(remap[fst.start])
    for old in keep:
        for arc in fst._arcs[old]:
            if arc.nextstate in remap:
                out.add_arc(remap[old], arc.ilabel, arc.olabel, arc.weight, remap[arc.nextstate])
        if old in fst._finals:
            out.set_final(remap[old], fst._finals[old])
    return out


def _reject_failure_arcs(fst: Wfst, op: str) -> None:
    if fst.has_failure_arcs():
        raise UnsupportedArcKind(f"{op} does not handle failure arcs")


# -- path enumeration (the reference semantics) ----------------------


def enumerate_paths(fst: Wfst, max_paths: int = 200_000) -> list[Path]:
    """All accepting paths of an acyclic machine, depth-first.

    This is the oracle the optimized algorithms are tested against:
    every transformation in this module must preserve the mapping from
    (input sequence, output sequence) to minimum path cost that this
    enumeration defines. Raises TooManyPaths beyond ``max_paths``.
    """
    _reject_failure_arcs(fst, "enumerate_paths")
    if fst.start == NO_STATE:
        return []
    topological_order(fst)  # NotAcyclic guard
    paths: list[Path] = []
    stack: list[tuple[int, tuple[int, ...], tuple[int, ...], float]] = [
        (fst.start, (), (), 0.0)
    ]
    while stack:
        state, ins, outs, cost = stack.pop()
        w = fst.final_weight(state)
        if w < INF:
            paths.append(Path(ins, outs, cost + w))
            if len(paths) > max_paths:
                raise TooManyPaths(f"more than {max_paths} accepting paths")
        for arc in reversed(fst._arcs[state]):
            nins = ins if arc.ilabel == EPS else ins + (arc.ilabel,)
            nouts = outs if arc.olabel == EPS else outs + (arc.olabel,)
            stack.append((arc.nextstate, nins, nouts, cost + arc.weight))
    return paths


def path_map(paths: Iterable[Path]) -> dict[tuple[tuple[int, ...], tuple[int, ...]], float]:
    """Minimum cost per (input, output) pair; the machine's observable behavior."""
    out: dict[tuple[tuple[int, ...], tuple[int, ...]], float] = {}
    for p in paths:
        key = (p.inputs, p.outputs)
        if p.cost < out.get(key, INF):
            out[key] = p.cost
    return out


def input_cost_map(paths: Iterable[Path]) -> dict[tuple[int, ...], float]:
    """Minimum cost per input sequence, ignoring outputs."""
    out: dict[tuple[int, ...], float] = {}
    for p in paths:
        if p.cost < out.get(p.inputs, INF):
            out[p.inputs] = p.cost
    return out


# -- composition -----------------------------------------------------


def compose(a: Wfst, b: Wfst) -> Wfst:
    """Relational composition: paths of ``a`` whose output matches an
    input path of ``b``, with costs added.

    Epsilon interleavings are canonicalized (all of ``a``'s epsilon
    output moves before ``b``'s epsilon input moves between matches) so
    each pair of compatible paths is represented exactly once. Raises
    AlphabetMismatch when both machines carry symbol tables on the
    shared side and they disagree, and UnsupportedArcKind on failure
    arcs.
    """
    _reject_failure_arcs(a, "compose")
    _reject_failure_arcs(b, "compose")
    if a.osyms is not None and b.isyms is not None and a.osyms is not b.isyms:
        if list(a.osyms) != list(b.isyms):
            raise AlphabetMismatch("output table of left operand differs from input table of right operand")
    out = Wfst(a.isyms, b.osyms)
    if a.start == NO_STATE or b.start == NO_STATE:
        return out
    # Filter states: 0 after a match, 1 in an epsilon run on a's side,
    # 2 in an epsilon run on b's side. 2 cannot return to 1, which pins
    # the canonical interleaving.
    key0 = (a.start, b.start, 0)
    ids: dict[tuple[int, int, int], int] = {key0: out.add_state()}
    out.set_start(0)
    frontier = [key0]
    while frontier:
        key = frontier.pop()
        sa, sb, f = key
        src = ids[key]

        def goto(ka: int, kb: int, kf: int) -> int:
            k = (ka, kb, kf)
            if k not in ids:
                ids[k] = out.add_state()
                frontier.append(k)
            return ids[k]

        for arc_a in a._arcs[sa]:
            if arc_a.olabel == EPS:
                if f != 2:
                    dst = goto(arc_a.nextstate, sb, 1)
                    out.add_arc(src, arc_a.ilabel, EPS, arc_a.weight, dst)
            else:
                for arc_b in b._arcs[sb]:
                    if arc_b.ilabel == arc_a.olabel:
                        dst = goto(arc_a.nextstate, arc_b.nextstate, 0)
                        out.add_arc(src, arc_a.ilabel, arc_b.olabel, arc_a.weight + arc_b.weight, dst)
        for arc_b in b._arcs[sb]:
            if arc_b.ilabel == EPS:
                dst = goto(sa, arc_b.nextstate, 2)
                out.add_arc(src, EPS, arc_b.olabel, arc_b.weight, dst)
        wa = a.final_weight(sa)
        wb = b.final_weight(sb)
        if wa < INF and wb < INF:
            out.set_final(src, wa + wb)
    return connect(out)


# -- epsilon removal -------------------------------------------------


def _epsilon_closure(fst: Wfst) -> list[dict[int, float]]:
    """Shortest epsilon-only distance from each state to its closure.

    Only arcs that are epsilon on both sides participate. A reachable
    negative-total epsilon cycle raises DivergentEpsilonCycle.
    """
    n = fst.num_states
    eps_adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for state in fst.states():
        for arc in fst._arcs[state]:
            if arc.ilabel == EPS and arc.olabel == EPS:
                eps_adj[state].append((arc.nextstate, arc.weight))
    closures: list[dict[int, float]] = []
    for source in fst.states():
        dist = {source: 0.0}
        # Bellman-Ford over the epsilon subgraph reachable from source.
        for _ in range(n):
            changed = False
            for state, d in list(dist.items()):
                for nxt, w in eps_adj[state]:
                    nd = d + w
                    if nd < dist.get(nxt, INF) - 1e-15:
                        dist[nxt] = nd
                        changed = True
            if not changed:
                break
        else:
            raise DivergentEpsilonCycle(f"negative epsilon cycle reachable from state {source}")
        closures.append(dist)
    return closures


def remove_epsilons(fst: Wfst) -> Wfst:
    """Fold epsilon:epsilon arcs into adjacent arcs and final weights.

    Arcs that consume epsilon but emit a real symbol are rejected with
    UnsupportedArcKind: folding them would require output buffering
    that this pipeline never needs (no builder here produces them).
    Output-epsilon arcs with a real input label are untouched.
    """
    _reject_failure_arcs(fst, "remove_epsilons")
    for state in fst.states():
        for arc in fst._arcs[state]:
            if arc.ilabel == EPS and arc.olabel != EPS:
                raise UnsupportedArcKind(
                    f"state {state}: input-epsilon arc with non-epsilon output cannot be folded"
                )
    if fst.start == NO_STATE:
        return Wfst(fst.isyms, fst.osyms)
    closures = _epsilon_closure(fst)
    out = Wfst(fst.isyms, fst.osyms)
    out.add_states(fst.num_states)
    out.set_start(fst.start)
    for state in fst.states():
        best_final = INF
        seen: dict[tuple[int, int, int], float] = {}
        for member, d in sorted(closures[state].items()):
            best_final = min(best_final, d + fst.final_weight(member))
            for arc in fst._arcs[member]:
                if arc.ilabel == EPS and arc.olabel == EPS:
                    continue
                key = (arc.ilabel, arc.olabel, arc.nextstate)
                w = d + arc.weight
                if w < seen.get(key, INF):
                    seen[key] = w
        for (il, ol, dst), w in sorted(seen.items()):
            out.add_arc(state, il, ol, w, dst)
        if best_final < INF:
            out.set_final(state, best_final)
    return connect(out)


# -- determinization -------------------------------------------------


def determinize_acyclic(fst: Wfst) -> Wfst:
    """Weighted subset determinization for acyclic, input-epsilon-free
    transducers.

    The result has at most one arc per (state, input label). Output
    emission may be delayed relative to the input machine: an arc emits
    a symbol only when every residual path already agrees on it, and
    any outputs still pending at a final subset are flushed through a
    chain of input-epsilon arcs. Acceptors (output always equal to
    input or epsilon) come out epsilon-free and strictly deterministic.

    Raises NotAcyclic on cyclic input, UnsupportedArcKind on input
    epsilons or failure arcs, and NotFunctional when one input sequence
    would have to emit two different output sequences.
    """
    _reject_failure_arcs(fst, "determinize_acyclic")
    if fst.has_input_epsilons():
        raise UnsupportedArcKind("determinize_acyclic requires input-epsilon-free machines")
    topological_order(fst)  # NotAcyclic guard
    out = Wfst(fst.isyms, fst.osyms)
    if fst.start == NO_STATE:
        return out

    # Subset members are (state, residual cost, pending outputs).
    Start = frozenset({(fst.start, 0.0, ())})
    ids: dict[frozenset, int] = {Start: out.add_state()}
    out.set_start(0)
    frontier = [Start]
    while frontier:
        subset = frontier.pop()
        src = ids[subset]
        _flush_finals(fst, out, src, subset)
        by_label: dict[int, dict[tuple[int, tuple[int, ...]], float]] = {}
        for state, residual, pending in subset:
            for arc in fst._arcs[state]:
                ext = pending if arc.olabel == EPS else pending + (arc.olabel,)
                group = by_label.setdefault(arc.ilabel, {})
                key = (arc.nextstate, ext)
                cand = residual + arc.weight
                if cand < group.get(key, INF):
                    group[key] = cand
        for label in sorted(by_label):
            group = by_label[label]
            w_min = min(group.values())
            emit = EPS
            firsts = {ext[0] for (_, ext) in group if ext}
            if len(firsts) == 1 and all(ext for (_, ext) in group):
                emit = firsts.pop()
            members = []
            for (state, ext), cand in group.items():
                if emit != EPS:
                    ext = ext[1:]
                members.append((state, cand - w_min, ext))
            nxt_subset = frozenset(members)
            if nxt_subset not in ids:
                ids[nxt_subset] = out.add_state()
                frontier.append(nxt_subset)
            out.add_arc(src, label, emit, w_min, ids[nxt_subset])
    return connect(out)


def _flush_finals(fst: Wfst, out: Wfst, src: int, subset: frozenset) -> None:
    """Make ``src`` accepting for the subset's final members, flushing
    pending outputs through epsilon-input chain arcs."""
    pendings: dict[tuple[int, ...], float] = {}
    for state, residual, pending in subset:
        w = fst.final_weight(state)
        if w < INF:
            cand = residual + w
            if cand < pendings.get(pending, INF):
                pendings[pending] = cand
    if not pendings:
        return
    if len(pendings) > 1:
        rendered = sorted(pendings)
        raise NotFunctional(f"one input reaches distinct pending outputs {rendered[0]} and {rendered[1]}")
    (pending, weight), = pendings.items()
    if not pending:
        out.set_final(src, weight)
        return
    cur = src
    for i, olabel in enumerate(pending):
        nxt = out.add_state()
        out.add_arc(cur, EPS, olabel, 0.0 if i else weight, nxt)
        cur = nxt
    out.set_final(cur, 0.0)


# -- minimization ----------------------------------------------------


def minimize_acyclic(fst: Wfst) -> Wfst:
    """Merge states with identical suffix behavior.

    Works bottom-up over the reverse topological order, hashing each
    state by its final weight and its outgoing (ilabel, olabel, weight,
    successor class) set. Requires an acyclic, input-deterministic
    machine; weights take part in the signature, so only exactly-equal
    suffixes merge. Idempotent.
    """
    _reject_failure_arcs(fst, "minimize_acyclic")
    fst.input_arc_map()  # NotDeterministic guard
    order = topological_order(fst)
    out = Wfst(fst.isyms, fst.osyms)
    if fst.start == NO_STATE:
        return out
    classes: dict[tuple, int] = {}
    class_of: dict[int, int] = {}
    class_arcs: list[list[tuple[int, int, float, int]]] = []
    class_final: list[float] = []
    for state in reversed(order):
        arcs = sorted(
            (a.ilabel, a.olabel, a.weight, class_of[a.nextstate]) for a in fst._arcs[state]
        )
        sig = (fst.final_weight(state), tuple(arcs))
        if sig not in classes:
            classes[sig] = len(class_arcs)
            class_arcs.append(arcs)
            class_final.append(fst.final_weight(state))
        class_of[state] = classes[sig]
    remap = {}
    frontier = [class_of[fst.start]]
    remap[class_of[fst.start]] = out.add_state()
    out.set_start(0)
    while frontier:
        cls = frontier.pop()
        src = remap[cls]
        for il, ol, w, nxt_cls in class_arcs[cls]:
            if nxt_cls not in remap:
                remap[nxt_cls] = out.add_state()
                frontier.append(nxt_cls)
            out.add_arc(src, il, ol, w, remap[nxt_cls])
        if class_final[cls] < INF:
            out.set_final(src, class_final[cls])
    return out


# -- search ----------------------------------------------------------


def shortest_path(fst: Wfst) -> Path:
    """Minimum-cost accepting path.

    Ties break toward the lexicographically smallest output id
    sequence, then input sequence. Exact for acyclic machines (full
    enumeration); cyclic machines with non-negative costs use Dijkstra,
    where the tie-break is applied among equal-cost settled paths only.
    Raises EmptyLanguage when nothing is accepted.
    """
    _reject_failure_arcs(fst, "shortest_path")
    if fst.start == NO_STATE or not fst._finals:
        raise EmptyLanguage("machine has no accepting path")
    if is_acyclic(fst):
        paths = enumerate_paths(fst)
        if not paths:
            raise EmptyLanguage("machine has no accepting path")
        return min(paths, key=lambda p: (p.cost, p.outputs, p.inputs))
    for state in fst.states():
        for arc in fst._arcs[state]:
            if arc.weight < 0:
                raise UnsupportedArcKind("cyclic machine with negative arc costs")
    # Dijkstra; each state settles once, at its smallest (cost, outputs,
    # inputs) heap entry, so the per-state tie-break is best-effort only.
    best: Path | None = None
    seen: set[int] = set()
    heap: list[tuple[float, tuple[int, ...], tuple[int, ...], int]] = [
        (0.0, (), (), fst.start)
    ]
    while heap:
        cost, outs, ins, state = heapq.heappop(heap)
        if best is not None and cost > best.cost:
            break
        if state in seen:
            continue
        seen.add(state)
        w = fst.final_weight(state)
        if w < INF:
            cand = Path(ins, outs, cost + w)
            if best is None or (cand.cost, cand.outputs, cand.inputs) < (best.cost, best.outputs, best.inputs):
                best = cand
        for arc in fst._arcs[state]:
            if arc.nextstate not in seen:
                nouts = outs if arc.olabel == EPS else outs + (arc.olabel,)
                nins = ins if arc.ilabel == EPS else ins + (arc.ilabel,)
                heapq.heappush(heap, (cost + arc.weight, nouts, nins, arc.nextstate))
    if best is None:
        raise EmptyLanguage("machine has no accepting path")
    return best


def step_with_failure(fst: Wfst, state: int, label: int) -> tuple[int, float]:
    """Advance one real input symbol through a failure-arc machine.

    Looks for a matching arc at ``state``; if none exists, follows the
    state's failure arc (adding its weight) and retries from the
    failure target. A state may carry at most one failure arc. When no
    match exists and no failure arc remains, the start state absorbs
    the symbol at zero additional cost; any other dead end raises
    NoTransition. Returns (next state, accumulated weight).
    """
    if label in (EPS, PHI):
        raise UnsupportedArcKind(f"step label must be a real symbol, got {label}")
    cur = state
    acc = 0.0
    for _ in range(fst.num_states + 1):
        match = None
        fail = None
        for arc in fst._arcs[cur]:
            if arc.ilabel == label:
                if match is not None:
                    raise NotDeterministic(f"state {cur} has two arcs for label {label}")
                match = arc
            elif arc.ilabel == PHI:
                if fail is not None:
                    raise MalformedGraph(f"state {cur} has more than one failure arc")
                fail = arc
        if match is not None:
            return match.nextstate, acc + match.weight
        if fail is not None:
            acc += fail.weight
            cur = fail.nextstate
            continue
        if cur == fst.start:
            return fst.start, acc
        raise NoTransition(f"no arc or failure fallback for label {label} at state {cur}")
    raise MalformedGraph("failure arcs form a loop")
