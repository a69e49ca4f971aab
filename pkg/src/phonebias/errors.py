"""Exception types shared across the toolkit.

Two branches matter for callers: FormatError covers malformed or
inconsistent input data (the CLI maps it to exit code 2), and
DecodeFailure covers searches that cannot produce a usable hypothesis
(exit code 3). Everything else signals a violated algorithmic
precondition and indicates a bug in the calling code.
"""


class PhonebiasError(Exception):
    """Base class for every error raised by this package."""


class FormatError(PhonebiasError):
    """Input data is malformed or internally inconsistent."""


class DuplicateSymbol(FormatError):
    """A symbol string or id appears more than once in a symbol table."""


class MissingReserved(FormatError):
    """A symbol table lacks one of the reserved entries."""


class UnknownSymbol(FormatError):
    """A symbol string or id is not present in the table it was looked up in."""


class BadFrequency(FormatError):
    """A lexicon row carries a non-positive or non-integer frequency."""


class DuplicateSource(FormatError):
    """A phoneme map lists the same source symbol twice."""


class UnmappedPhoneme(FormatError):
    """A source phoneme has no row in the phoneme map."""


class UnsegmentableWord(FormatError):
    """A word cannot be covered by the wordpiece inventory."""


class OutOfLexicon(FormatError):
    """A word has no usable pronunciation entry in the lexicon."""


class EmptyPhrase(FormatError):
    """A biasing phrase contains no words."""


class ExpansionFailure(FormatError):
    """A word could not be expanded into the requested unit sequence."""


class DuplicatePronunciation(FormatError):
    """Two distinct words share one pronunciation where uniqueness is required."""


class EmptyPool(FormatError):
    """A sampling pool has no entries."""


class WfstError(PhonebiasError):
    """An automaton violates a precondition of the requested operation."""


class AlphabetMismatch(WfstError):
    """Composition was attempted across incompatible symbol tables."""


class UnsupportedArcKind(WfstError):
    """The machine contains arc kinds the operation does not handle."""


class DivergentEpsilonCycle(WfstError):
    """Epsilon removal hit a cycle whose total cost is negative."""


class NotAcyclic(WfstError):
    """The operation requires an acyclic machine."""


class NotFunctional(WfstError):
    """Determinization found one input mapped to two distinct outputs."""


class NotDeterministic(WfstError):
    """The operation requires an input-deterministic machine."""


class EmptyLanguage(WfstError):
    """The machine accepts no path at all."""


class TooManyPaths(WfstError):
    """Path enumeration exceeded the caller's limit."""


class NoTransition(WfstError):
    """Failure-aware stepping got stuck off the start state."""


class MalformedGraph(WfstError):
    """A decoding graph breaks a structural invariant."""


class DecodeFailure(PhonebiasError):
    """Decoding could not produce a hypothesis the caller may use."""


class NoCompleteHypothesis(DecodeFailure):
    """No hypothesis survived to the end of the emission stream."""
