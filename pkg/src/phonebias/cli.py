"""Command-line front end.

Every subcommand is a thin wrapper over the library: it loads inputs,
calls one core entry point, and serializes the result. Resource flags
(--symbols, --lexicon, --wordpieces, --map, --pool) default to the
packaged data set; overriding one file is fine as long as it stays
consistent with the others, and the loaders reject mismatches.

Exit codes: 0 success, 2 malformed input (format or machine errors),
3 decode failure.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from importlib import resources as importlib_resources
from pathlib import Path

from .bias import BiasConfig, ContextualFst, build_contextual_fst, build_parallel_bias
from .decoder import DecoderConfig, decode, read_emissions
from .errors import DecodeFailure, FormatError, WfstError
from .graph import DecodingGraph, build_decoding_graph
from .harness import (
    BIAS_UNITS,
    EvalSet,
    distractor_sweep,
    edit_distance,
    expand_pool,
    make_directions_set,
    run_bias_experiment,
    wer,
)
from .lexicon import load_lexicon, load_phoneme_map
from .resources import ResourceSet, load_pool, write_pool
from .subwords import SamplerConfig, load_wordpieces, loads_wordpieces, sample_target_sequence
from .symbols import load_symbols
from .wfst import Wfst


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _read_lines(path: str) -> list[str]:
    raw = Path(path).read_text(encoding="utf-8")
    return [line for line in raw.splitlines() if line.strip()]


class _Inputs:
    """Resolves per-command resource files against the packaged set."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.res = ResourceSet.load(getattr(args, "data_dir", None))

    @property
    def symtab(self):
        path = getattr(self.args, "symbols", None)
        return load_symbols(path) if path else self.res.symtab

    @property
    def inv(self):
        path = getattr(self.args, "wordpieces", None)
        if path:
            return load_wordpieces(path, self.symtab)
        if getattr(self.args, "symbols", None) is None:
            return self.res.inv
        # Custom symbol table without a custom piece list: rebind the
        # packaged list against it and let the loader check coverage.
        text = importlib_resources.files("phonebias").joinpath(
            "data/wordpieces.txt").read_text(encoding="utf-8")
        return loads_wordpieces(text, self.symtab, origin="packaged wordpieces.txt")

    @property
    def lexicon(self):
        # Corpus lexicon in the decoder's own phoneme inventory.
        path = getattr(self.args, "lexicon", None)
        return load_lexicon(path, self.symtab) if path else self.res.english_lex

    def bias_lex_pmap(self):
        """(lexicon, map) pair for phoneme expansion of bias words.

        Defaults to the packaged foreign-name lexicon plus its map to
        the decoder inventory. A custom --lexicon without --map must
        already be in the decoder inventory; with --map it is read
        against the packaged source inventory.
        """
        lex_path = getattr(self.args, "lexicon", None)
        map_path = getattr(self.args, "map", None)
        if lex_path and map_path:
            return (
                load_lexicon(lex_path, self.res.foreign_symtab),
                load_phoneme_map(map_path, self.res.foreign_symtab, self.symtab),
            )
        if lex_path:
            return load_lexicon(lex_path, self.symtab), None
        if map_path:
            return (
                self.res.foreign_lex,
                load_phoneme_map(map_path, self.res.foreign_symtab, self.symtab),
            )
        return self.res.foreign_lex, self.res.pmap

    @property
    def pool(self):
        path = getattr(self.args, "pool", None)
        return load_pool(path, self.res.foreign_symtab) if path else self.res.pool


# -- subcommand bodies ------------------------------------------------


def cmd_sample_targets(args: argparse.Namespace) -> int:
    inputs = _Inputs(args)
    symtab, lex, inv = inputs.symtab, inputs.lexicon, inputs.inv
    cfg = SamplerConfig(p0=args.p0, threshold=args.T)
    rng = random.Random(args.seed)
    out_lines = []
    for i, line in enumerate(_read_lines(args.corpus)):
        if "\t" in line:
            utt_id, text = line.split("\t", 1)
        else:
            utt_id, text = f"u{i:04d}", line
        words = text.split()
        ids = sample_target_sequence(words, lex, inv, cfg, rng)
        out_lines.append(f"{utt_id}\t{' '.join(symtab.symbol(s) for s in ids)}")
    _write_text(args.out, "\n".join(out_lines) + ("\n" if out_lines else ""))
    return 0


def cmd_build_bias_fst(args: argparse.Namespace) -> int:
    inputs = _Inputs(args)
    phrases = _read_lines(args.phrases)
    cfg = BiasConfig(unit=args.unit if args.unit != "parallel" else "phoneme", bonus=args.bonus)
    if args.unit == "grapheme":
        # Grapheme machines live on the grapheme alphabet, not the
        # decoder's phoneme/wordpiece table.
        symtab = load_symbols(args.symbols) if args.symbols else inputs.res.grapheme_symtab
        bias = build_contextual_fst(phrases, cfg, symtab=symtab)
    else:
        lex, pmap = inputs.bias_lex_pmap()
        if args.unit == "parallel":
            bias = build_parallel_bias(phrases, cfg, lex=lex, inv=inputs.inv, pmap=pmap)
        else:
            bias = build_contextual_fst(
                phrases, cfg, lex=lex, inv=inputs.inv, pmap=pmap, symtab=inputs.symtab
            )
    _write_text(args.out, bias.fst.dumps())
    return 0


def cmd_build_decode_graph(args: argparse.Namespace) -> int:
    inputs = _Inputs(args)
    words = _read_lines(args.bias_words)
    lex, pmap = inputs.bias_lex_pmap()
    graph = build_decoding_graph(words, inputs.symtab, inputs.inv, lex=lex, pmap=pmap)
    _write_text(args.out, graph.fst.dumps())
    return 0


def cmd_decode(args: argparse.Namespace) -> int:
    inputs = _Inputs(args)
    symtab = inputs.symtab
    # The text format carries integer labels only; rebind the table.
    graph_fst = Wfst.read(args.graph)
    graph_fst.isyms = graph_fst.osyms = symtab
    graph = DecodingGraph.from_fst(graph_fst)
    bias = None
    if args.bias:
        bias = ContextualFst.from_fst(Wfst.read(args.bias))
    cfg = DecoderConfig(
        beam_size=args.beam, lam=args.lam, bias=bias,
        finalize_partial=args.finalize_partial,
    )
    rows = []
    for em in read_emissions(args.emissions, symtab):
        result = decode(em, graph, cfg)
        flags = ",".join(result.flags) if result.flags else "-"
        rows.append(f"{em.utt_id}\t{' '.join(result.transcript)}\t{result.cost:.6f}\t{flags}")
    _write_text(args.out, "\n".join(rows) + ("\n" if rows else ""))
    return 0


def cmd_make_set(args: argparse.Namespace) -> int:
    inputs = _Inputs(args)
    pool = inputs.pool
    if args.pool_size and args.pool_size > len(pool):
        pool = expand_pool(pool, args.pool_size, args.seed, inputs.res)
    dset = make_directions_set(pool, args.n, args.seed)
    _write_text(args.out, dset.dumps())
    if args.pool_out:
        write_pool(pool, args.pool_out)
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    inputs = _Inputs(args)
    pool = inputs.pool
    dset = EvalSet.read(args.set, pool)
    bonuses = [float(b) for b in args.bonus_grid.split(",")] if args.bonus_grid else [args.bonus]
    if len(bonuses) == 1:
        report = run_bias_experiment(
            dset, inputs.res, args.n_bias, unit=args.unit, bonus=bonuses[0],
            lam=args.lam, noise=args.noise, seed=args.seed, beam_size=args.beam,
        )
        _write_text(args.out, report.dumps_json() if args.json else report.dumps())
        return 0
    # Grid mode: one summary row per bonus value.
    lines = [] if args.json else ["bonus\twer\tn_utts\tseed"]
    for bonus in bonuses:
        report = run_bias_experiment(
            dset, inputs.res, args.n_bias, unit=args.unit, bonus=bonus,
            lam=args.lam, noise=args.noise, seed=args.seed, beam_size=args.beam,
        )
        if args.json:
            lines.append(json.dumps({
                "bonus": bonus, "wer": report.corpus_wer,
                "n_utts": report.n_utts, "seed": str(args.seed),
            }))
        else:
            lines.append(f"{bonus}\t{report.corpus_wer:.6f}\t{report.n_utts}\t{args.seed}")
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    inputs = _Inputs(args)
    pool = inputs.pool
    dset = EvalSet.read(args.set, pool)
    n_list = [int(n) for n in args.n_list.split(",")]
    report = distractor_sweep(
        dset, inputs.res, n_list, unit=args.unit, bonus=args.bonus,
        lam=args.lam, noise=args.noise, seed=args.seed,
        beam_size=args.beam,
    )
    _write_text(args.out, report.dumps_json() if args.json else report.dumps())
    return 0


def _transcripts(path: str) -> list[tuple[str | None, list[str]]]:
    """Each line is either `utt_id<TAB>words...` or bare words."""
    rows = []
    for line in _read_lines(path):
        if "\t" in line:
            fields = line.split("\t")
            rows.append((fields[0], fields[1].split()))
        else:
            rows.append((None, line.split()))
    return rows


def cmd_wer(args: argparse.Namespace) -> int:
    refs = _transcripts(args.ref)
    hyps = _transcripts(args.hyp)
    if all(r[0] for r in refs) and all(h[0] for h in hyps):
        hyp_by_id = {h[0]: h[1] for h in hyps}
        missing = [r[0] for r in refs if r[0] not in hyp_by_id]
        if missing:
            raise FormatError(f"hypothesis file lacks utterances: {', '.join(missing[:5])}")
        pairs = [(r[1], hyp_by_id[r[0]], r[0]) for r in refs]
    else:
        if len(refs) != len(hyps):
            raise FormatError(
                f"line counts differ ({len(refs)} refs, {len(hyps)} hyps) and "
                "not every line carries an utterance id"
            )
        pairs = [(r[1], h[1], r[0] or f"line{i}") for i, (r, h) in enumerate(zip(refs, hyps))]
    total_edits = sum(edit_distance(r, h) for r, h, _ in pairs)
    total_ref = sum(len(r) for r, _, _ in pairs)
    corpus = (total_edits / total_ref) if total_ref else (0.0 if total_edits == 0 else float(total_edits))
    if args.per_utt:
        for r, h, utt_id in pairs:
            sys.stdout.write(f"{utt_id}\t{wer(r, h):.6f}\n")
    sys.stdout.write(f"{corpus:.6f}\n")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(data_dir=getattr(args, "data_dir", None)),
                host=args.host, port=args.port)
    return 0


# -- parser -----------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", default="0", help="base seed (string or int)")
    p.add_argument("--noise", type=float, default=0.2, help="emission label-noise rate")
    p.add_argument("--bonus", type=float, default=2.0, help="per-unit bias bonus w")
    p.add_argument("--lambda", type=float, default=1.0, dest="lam",
                   help="shallow-fusion scale")
    p.add_argument("--beam", type=int, default=8, help="beam size")


def _add_resources(p: argparse.ArgumentParser, *names: str) -> None:
    p.add_argument("--data-dir", default=None,
                   help="directory of resource files (default: packaged data)")
    if "symbols" in names:
        p.add_argument("--symbols", default=None, help="symbol table (symbol<TAB>id<TAB>kind)")
    if "lexicon" in names:
        p.add_argument("--lexicon", default=None, help="lexicon (word<TAB>freq<TAB>phonemes)")
    if "wordpieces" in names:
        p.add_argument("--wordpieces", default=None, help="wordpiece list, one per line")
    if "map" in names:
        p.add_argument("--map", default=None, help="phoneme map (src<TAB>tgt [tgt...])")
    if "pool" in names:
        p.add_argument("--pool", default=None, help="name pool (word<TAB>source pron)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phonebias",
        description="Phrase biasing for symbol-stream decoding: compile bias machines, "
                    "build decoding graphs, decode emissions, and run synthetic evaluations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample-targets", help="render transcripts as mixed target symbols")
    p.add_argument("--corpus", required=True, help="lines of `utt_id<TAB>text` or bare text")
    p.add_argument("--p0", type=float, default=0.5, help="base phoneme-presentation probability")
    p.add_argument("--T", type=int, default=10, help="frequency threshold")
    p.add_argument("--seed", default="0")
    p.add_argument("--out", default="-")
    _add_resources(p, "symbols", "lexicon", "wordpieces")
    p.set_defaults(func=cmd_sample_targets)

    p = sub.add_parser("build-bias-fst", help="compile a phrase list into a biasing machine")
    p.add_argument("--phrases", required=True, help="one phrase per line, UTF-8")
    p.add_argument("--unit", default="phoneme",
                   choices=["phoneme", "wordpiece", "grapheme", "parallel"])
    p.add_argument("--bonus", type=float, default=2.0)
    p.add_argument("--out", default="-")
    _add_resources(p, "symbols", "lexicon", "wordpieces", "map")
    p.set_defaults(func=cmd_build_bias_fst)

    p = sub.add_parser("build-decode-graph",
                       help="hub + pronunciation-tree decoding graph for a word list")
    p.add_argument("--bias-words", required=True, help="one word per line")
    p.add_argument("--out", default="-")
    _add_resources(p, "symbols", "lexicon", "wordpieces", "map")
    p.set_defaults(func=cmd_build_decode_graph)

    p = sub.add_parser("decode", help="beam-decode emission streams over a graph")
    p.add_argument("--graph", required=True, help="decoding graph in FST text format")
    p.add_argument("--emissions", required=True, help="JSONL emission streams")
    p.add_argument("--bias", default=None, help="biasing machine in FST text format")
    p.add_argument("--lambda", type=float, default=1.0, dest="lam")
    p.add_argument("--beam", type=int, default=8)
    p.add_argument("--finalize-partial", action="store_true",
                   help="emit best partial instead of failing on dead streams")
    p.add_argument("--out", default="-")
    _add_resources(p, "symbols")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("make-set", help="sample a synthetic directions test set")
    p.add_argument("--n", type=int, required=True, help="number of utterances")
    p.add_argument("--seed", default="0")
    p.add_argument("--pool-size", type=int, default=0,
                   help="grow the pool to this many names first (0 = as-is)")
    p.add_argument("--pool-out", default=None, help="write the (grown) pool here")
    p.add_argument("--out", default="-")
    _add_resources(p, "pool")
    p.set_defaults(func=cmd_make_set)

    p = sub.add_parser("run", help="decode a test set under one biasing condition")
    p.add_argument("--set", required=True, help="test set TSV from make-set")
    p.add_argument("--n-bias", type=int, default=100, help="biasing-list size per utterance")
    p.add_argument("--unit", default="phoneme", choices=list(BIAS_UNITS))
    p.add_argument("--json", action="store_true", help="JSON lines instead of TSV")
    p.add_argument("--bonus-grid", default=None,
                   help="comma-separated bonus values; emits one summary row each")
    p.add_argument("--out", default="-")
    _add_common(p)
    _add_resources(p, "pool")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run the experiment across biasing-list sizes")
    p.add_argument("--set", required=True)
    p.add_argument("--n-list", default="1,10,100,500,1000",
                   help="comma-separated biasing-list sizes")
    p.add_argument("--unit", default="phoneme", choices=list(BIAS_UNITS))
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", default="-")
    _add_common(p)
    _add_resources(p, "pool")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("wer", help="corpus word error rate between two transcript files")
    p.add_argument("ref", help="reference file: `utt_id<TAB>words` or bare words per line")
    p.add_argument("hyp", help="hypothesis file, same format")
    p.add_argument("--per-utt", action="store_true", help="also print one rate per utterance")
    p.set_defaults(func=cmd_wer)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--data-dir", default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DecodeFailure as exc:
        print(f"decode failure: {exc}", file=sys.stderr)
        return 3
    except (FormatError, WfstError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
