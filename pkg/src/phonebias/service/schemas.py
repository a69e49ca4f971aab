"""Request and response bodies for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class TokenizeRequest(BaseModel):
    words: list[str]


class TokenizeResponse(BaseModel):
    # One piece list per input word, markers intact.
    pieces: list[list[str]]


class MapPhonemesRequest(BaseModel):
    phonemes: list[str]


class MapPhonemesResponse(BaseModel):
    phonemes: list[str]


class FstResponse(BaseModel):
    fst: str
    states: int
    arcs: int


class CompileBiasRequest(BaseModel):
    phrases: list[str]
    unit: str = "phoneme"
    bonus: float = Field(default=2.0, gt=0.0)


class CompileBiasResponse(FstResponse):
    unit: str
    phrases: int


class BuildGraphRequest(BaseModel):
    bias_words: list[str] = []


class BuildGraphResponse(FstResponse):
    words: int


class EmissionsIn(BaseModel):
    utt_id: str = "utt"
    # Per step: symbol string -> log probability; absent symbols are
    # probability zero.
    steps: list[dict[str, float]]


class DecodeRequest(BaseModel):
    emissions: EmissionsIn
    # Graph: either a serialized machine or a bias word list to build
    # one from (empty list = bare hub).
    graph_fst: str | None = None
    bias_words: list[str] = []
    # Bias: either a serialized machine or phrases to compile.
    bias_fst: str | None = None
    phrases: list[str] | None = None
    unit: str = "phoneme"
    bonus: float = Field(default=2.0, gt=0.0)
    lam: float = Field(default=1.0, ge=0.0)
    beam: int = Field(default=8, ge=1)
    finalize_partial: bool = False


class DecodeResponse(BaseModel):
    utt_id: str
    transcript: list[str]
    cost: float
    flags: list[str]


class WerRequest(BaseModel):
    ref: list[str]
    hyp: list[str]


class WerResponse(BaseModel):
    wer: float
    edits: int
    ref_len: int


class SampleTargetsRequest(BaseModel):
    texts: list[str]
    p0: float = Field(default=0.5, ge=0.0, le=1.0)
    threshold: int = Field(default=10, ge=1)
    seed: str = "0"


class SampleTargetsResponse(BaseModel):
    # One symbol sequence per input text.
    targets: list[list[str]]


class RunExperimentRequest(BaseModel):
    n_utts: int = Field(default=50, ge=1)
    n_bias: int = Field(default=10, ge=1)
    unit: str = "phoneme"
    noise: float = Field(default=0.2, ge=0.0, lt=1.0)
    bonus: float = Field(default=2.0, gt=0.0)
    lam: float = Field(default=1.0, ge=0.0)
    beam: int = Field(default=8, ge=1)
    seed: str = "0"
    pool_size: int = Field(default=0, ge=0)


class UttRow(BaseModel):
    utt_id: str
    ref: list[str]
    hyp: list[str]
    wer: float
    edits: int
    flags: list[str]


class RunExperimentResponse(BaseModel):
    corpus_wer: float
    n_utts: int
    unit: str
    n_bias: int
    rows: list[UttRow]


class SweepRequest(BaseModel):
    n_utts: int = Field(default=50, ge=1)
    n_list: list[int] = [1, 10, 100]
    unit: str = "phoneme"
    noise: float = Field(default=0.2, ge=0.0, lt=1.0)
    bonus: float = Field(default=2.0, gt=0.0)
    lam: float = Field(default=1.0, ge=0.0)
    beam: int = Field(default=8, ge=1)
    seed: str = "0"
    pool_size: int = Field(default=0, ge=0)


class SweepRowOut(BaseModel):
    n_bias: int
    wer: float
    n_utts: int
    seed: str


class SweepResponse(BaseModel):
    rows: list[SweepRowOut]
