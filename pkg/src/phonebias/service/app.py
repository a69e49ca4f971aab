"""FastAPI application wrapping the core library.

The resource set (symbol tables, lexicon, wordpieces, phoneme map,
name pool) is loaded once at application creation. Malformed inputs
map to 400, decode failures to 409.
"""

from __future__ import annotations

import json
import random

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..bias import BiasConfig, ContextualFst, build_contextual_fst, build_parallel_bias
from ..decoder import DecoderConfig, EmissionSequence, decode
from ..errors import DecodeFailure, FormatError, WfstError
from ..graph import DecodingGraph, build_decoding_graph
from ..harness import (
    distractor_sweep,
    edit_distance,
    expand_pool,
    make_directions_set,
    run_bias_experiment,
    wer,
)
from ..lexicon import map_phonemes
from ..resources import ResourceSet
from ..subwords import SamplerConfig, sample_target_sequence, tokenize_wordpieces
from ..wfst import Wfst
from . import schemas as s


def create_app(data_dir: str | None = None) -> FastAPI:
    res = ResourceSet.load(data_dir)
    app = FastAPI(
        title="phonebias",
        version=__version__,
        description="Phrase biasing for symbol-stream decoding.",
    )

    @app.exception_handler(DecodeFailure)
    async def _decode_failure(request: Request, exc: DecodeFailure) -> JSONResponse:
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(FormatError)
    async def _format_error(request: Request, exc: FormatError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(WfstError)
    async def _wfst_error(request: Request, exc: WfstError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=s.HealthResponse)
    async def health() -> s.HealthResponse:
        return s.HealthResponse(status="ok", version=__version__)

    @app.post("/tokenize", response_model=s.TokenizeResponse)
    async def tokenize(req: s.TokenizeRequest) -> s.TokenizeResponse:
        return s.TokenizeResponse(
            pieces=[tokenize_wordpieces(w, res.inv) for w in req.words]
        )

    @app.post("/phonemes/map", response_model=s.MapPhonemesResponse)
    async def phonemes_map(req: s.MapPhonemesRequest) -> s.MapPhonemesResponse:
        for p in req.phonemes:
            res.foreign_symtab.index(p)  # membership check, raises on unknowns
        mapped = map_phonemes(req.phonemes, res.pmap)
        return s.MapPhonemesResponse(phonemes=[res.symtab.symbol(i) for i in mapped])

    @app.post("/bias/compile", response_model=s.CompileBiasResponse)
    async def bias_compile(req: s.CompileBiasRequest) -> s.CompileBiasResponse:
        bias = _compile_bias(req.phrases, req.unit, req.bonus)
        return s.CompileBiasResponse(
            fst=bias.fst.dumps(), states=bias.fst.num_states, arcs=bias.fst.num_arcs,
            unit=bias.unit, phrases=bias.phrase_count,
        )

    @app.post("/graph/build", response_model=s.BuildGraphResponse)
    async def graph_build(req: s.BuildGraphRequest) -> s.BuildGraphResponse:
        graph = build_decoding_graph(
            req.bias_words, res.symtab, res.inv, lex=res.foreign_lex, pmap=res.pmap
        )
        return s.BuildGraphResponse(
            fst=graph.fst.dumps(), states=graph.fst.num_states,
            arcs=graph.fst.num_arcs, words=len(graph.word_table),
        )

    @app.post("/decode", response_model=s.DecodeResponse)
    async def decode_endpoint(req: s.DecodeRequest) -> s.DecodeResponse:
        if req.graph_fst is not None:
            fst = Wfst.loads(req.graph_fst)
            fst.isyms = fst.osyms = res.symtab
            graph = DecodingGraph.from_fst(fst)
        else:
            graph = build_decoding_graph(
                req.bias_words, res.symtab, res.inv, lex=res.foreign_lex, pmap=res.pmap
            )
        bias = None
        if req.bias_fst is not None:
            bias = ContextualFst.from_fst(Wfst.loads(req.bias_fst))
        elif req.phrases is not None:
            bias = _compile_bias(req.phrases, req.unit, req.bonus)
        em = EmissionSequence.from_json(
            json.dumps({"utt_id": req.emissions.utt_id, "steps": req.emissions.steps}),
            res.symtab,
        )
        cfg = DecoderConfig(req.beam, req.lam, bias, req.finalize_partial)
        result = decode(em, graph, cfg)
        return s.DecodeResponse(
            utt_id=em.utt_id, transcript=list(result.transcript),
            cost=result.cost, flags=list(result.flags),
        )

    @app.post("/wer", response_model=s.WerResponse)
    async def wer_endpoint(req: s.WerRequest) -> s.WerResponse:
        return s.WerResponse(
            wer=wer(req.ref, req.hyp),
            edits=edit_distance(req.ref, req.hyp),
            ref_len=len(req.ref),
        )

    @app.post("/sample-targets", response_model=s.SampleTargetsResponse)
    async def sample_targets(req: s.SampleTargetsRequest) -> s.SampleTargetsResponse:
        cfg = SamplerConfig(p0=req.p0, threshold=req.threshold)
        rng = random.Random(req.seed)
        targets = []
        for text in req.texts:
            ids = sample_target_sequence(text.split(), res.english_lex, res.inv, cfg, rng)
            targets.append([res.symtab.symbol(i) for i in ids])
        return s.SampleTargetsResponse(targets=targets)

    @app.post("/experiments/run", response_model=s.RunExperimentResponse)
    async def experiments_run(req: s.RunExperimentRequest) -> s.RunExperimentResponse:
        dset = _make_set(req.n_utts, req.pool_size, req.seed)
        report = run_bias_experiment(
            dset, res, req.n_bias, unit=req.unit, bonus=req.bonus, lam=req.lam,
            noise=req.noise, seed=req.seed, beam_size=req.beam,
        )
        return s.RunExperimentResponse(
            corpus_wer=report.corpus_wer, n_utts=report.n_utts,
            unit=report.unit, n_bias=report.n_bias,
            rows=[
                s.UttRow(utt_id=r.utt_id, ref=list(r.ref), hyp=list(r.hyp),
                         wer=r.wer, edits=r.edits, flags=list(r.flags))
                for r in report.rows
            ],
        )

    @app.post("/experiments/sweep", response_model=s.SweepResponse)
    async def experiments_sweep(req: s.SweepRequest) -> s.SweepResponse:
        dset = _make_set(req.n_utts, req.pool_size, req.seed)
        report = distractor_sweep(
            dset, res, req.n_list, unit=req.unit, bonus=req.bonus, lam=req.lam,
            noise=req.noise, seed=req.seed, beam_size=req.beam,
        )
        return s.SweepResponse(
            rows=[
                s.SweepRowOut(n_bias=r.n_bias, wer=r.wer, n_utts=r.n_utts, seed=r.seed)
                for r in report.rows
            ]
        )

    def _compile_bias(phrases: list[str], unit: str, bonus: float) -> ContextualFst:
        if unit == "parallel":
            return build_parallel_bias(
                phrases, BiasConfig(unit="phoneme", bonus=bonus),
                lex=res.foreign_lex, inv=res.inv, pmap=res.pmap,
            )
        if unit == "grapheme":
            return build_contextual_fst(
                phrases, BiasConfig(unit=unit, bonus=bonus), symtab=res.grapheme_symtab
            )
        return build_contextual_fst(
            phrases, BiasConfig(unit=unit, bonus=bonus),
            lex=res.foreign_lex, inv=res.inv, pmap=res.pmap, symtab=res.symtab,
        )

    def _make_set(n_utts: int, pool_size: int, seed: str):
        pool = res.pool
        if pool_size and pool_size > len(pool):
            pool = expand_pool(pool, pool_size, seed, res)
        return make_directions_set(pool, n_utts, seed)

    return app
