"""Phrase biasing with weighted FSTs and shallow-fusion beam decoding.

The toolkit compiles biasing phrase lists into weighted failure-arc
tries at the phoneme, wordpiece, or grapheme level, builds decoding
graphs that join wordpiece self-loops with a pronunciation prefix tree,
and decodes symbol-posterior emission streams against those graphs with
a recombining beam search. A synthetic emission generator and an
evaluation harness support end-to-end experiments without a trained
acoustic model.
"""

from .bias import (
    BiasConfig,
    ContextualFst,
    build_contextual_fst,
    build_dynamic_class_lm,
    build_parallel_bias,
    build_phrase_acceptor,
    build_speller,
    build_unit_trie,
    reference_contextual_fst,
)
from .decoder import (
    DecodeResult,
    DecoderConfig,
    EmissionSequence,
    Hypothesis,
    decode,
    generate_synthetic_emissions,
    read_emissions,
    recombine,
    write_emissions,
)
from .errors import DecodeFailure, FormatError, PhonebiasError, WfstError
from .graph import DecodingGraph, build_decoding_graph, epsilon_closure_outputs
from .harness import (
    EvalSet,
    ExperimentReport,
    SweepReport,
    Utterance,
    distractor_sweep,
    edit_distance,
    expand_pool,
    make_directions_set,
    make_english_set,
    run_bias_experiment,
    wer,
)
from .lexicon import Lexicon, PhonemeMap, load_lexicon, load_phoneme_map, map_phonemes, trim_lexicon
from .resources import PoolEntry, ResourceSet, load_pool, pool_to_lexicon, write_pool
from .subwords import (
    SamplerConfig,
    WordpieceInventory,
    load_wordpieces,
    phoneme_presentation_prob,
    sample_target_sequence,
    tokenize_wordpieces,
)
from .symbols import EPS, PHI, SymbolTable, load_symbols
from .wfst import (
    Arc,
    Path,
    Wfst,
    compose,
    determinize_acyclic,
    enumerate_paths,
    minimize_acyclic,
    remove_epsilons,
    shortest_path,
    step_with_failure,
)

__version__ = "0.1.0"
