"""Symbol tables mapping unit strings to dense integer ids.

Every automaton in this package carries integer labels. A SymbolTable
fixes the meaning of those integers: id 0 is always the epsilon label
``<eps>`` and id 1 the failure label ``<phi>``. Model-facing tables
additionally reserve the word-boundary marker ``<eow>``. Each symbol is
tagged with a kind so downstream code can pick out, say, all phonemes
or all wordpieces without parsing the strings themselves.
"""

from __future__ import annotations

import io
from pathlib import Path
from typing import Iterable, Iterator

from .errors import DuplicateSymbol, FormatError, MissingReserved, UnknownSymbol

EPS = 0
PHI = 1

EPS_SYM = "<eps>"
PHI_SYM = "<phi>"
EOW_SYM = "<eow>"

KINDS = ("special", "phoneme", "wordpiece", "grapheme", "word")


class SymbolTable:
    """Bidirectional map between symbol strings and dense ids.

    Ids are assigned in insertion order starting at 0. A freshly
    constructed table already contains ``<eps>`` at id 0 and ``<phi>``
    at id 1; everything else is added through :meth:`add`.
    """

    def __init__(self) -> None:
        self._syms: list[str] = []
        self._kinds: list[str] = []
        self._index: dict[str, int] = {}
        self.add(EPS_SYM, "special")
        self.add(PHI_SYM, "special")

    def add(self, symbol: str, kind: str) -> int:
        """Insert a symbol and return its id.

        Raises DuplicateSymbol if the string is already present and
        FormatError for empty strings, embedded whitespace, or an
        unknown kind tag.
        """
        if kind not in KINDS:
            raise FormatError(f"unknown symbol kind {kind!r} for {symbol!r}")
        if not symbol or any(c.isspace() for c in symbol):
            raise FormatError(f"symbol must be non-empty and whitespace-free: {symbol!r}")
        if symbol in self._index:
            raise DuplicateSymbol(f"symbol {symbol!r} defined twice")
        idx = len(self._syms)
        self._syms.append(symbol)
        self._kinds.append(kind)
        self._index[symbol] = idx
        return idx

    def index(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise UnknownSymbol(f"symbol {symbol!r} not in table") from None

    def symbol(self, idx: int) -> str:
        if not 0 <= idx < len(self._syms):
            raise UnknownSymbol(f"id {idx} not in table of size {len(self._syms)}")
        return self._syms[idx]

    def kind(self, idx: int) -> str:
        if not 0 <= idx < len(self._kinds):
            raise UnknownSymbol(f"id {idx} not in table of size {len(self._kinds)}")
        return self._kinds[idx]

    def kind_of(self, symbol: str) -> str:
        return self._kinds[self.index(symbol)]

    def ids_of_kind(self, kind: str) -> list[int]:
        return [i for i, k in enumerate(self._kinds) if k == kind]

    def symbols_of_kind(self, kind: str) -> list[str]:
        return [s for s, k in zip(self._syms, self._kinds) if k == kind]

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._index

    def __len__(self) -> int:
        return len(self._syms)

    def __iter__(self) -> Iterator[tuple[str, int, str]]:
        for i, (s, k) in enumerate(zip(self._syms, self._kinds)):
            yield s, i, k

    @property
    def eow(self) -> int:
        """Id of the word-boundary marker; raises if the table has none."""
        return self.index(EOW_SYM)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    def dumps(self) -> str:
        buf = io.StringIO()
        for sym, idx, kind in self:
            buf.write(f"{sym}\t{idx}\t{kind}\n")
        return buf.getvalue()


def _parse_rows(lines: Iterable[str], origin: str) -> list[tuple[str, int, str]]:
    rows = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise FormatError(f"{origin}:{lineno}: expected 3 tab-separated fields, got {len(fields)}")
        sym, id_text, kind = fields
        try:
            idx = int(id_text)
        except ValueError:
            raise FormatError(f"{origin}:{lineno}: id {id_text!r} is not an integer") from None
        rows.append((sym, idx, kind))
    return rows


def loads_symbols(text: str, origin: str = "<string>") -> SymbolTable:
    """Parse a symbol table from ``symbol<TAB>id<TAB>kind`` lines.

    Validates that ids are a dense 0..N-1 range, that the string-to-id
    mapping is a bijection, and that the reserved entries are present:
    ``<eps>`` at 0, ``<phi>`` at 1, and ``<eow>`` tagged special.
    """
    rows = _parse_rows(text.splitlines(), origin)
    if not rows:
        raise MissingReserved(f"{origin}: empty symbol table")
    by_id: dict[int, tuple[str, str]] = {}
    seen: set[str] = set()
    for sym, idx, kind in rows:
        if sym in seen:
            raise DuplicateSymbol(f"{origin}: symbol {sym!r} defined twice")
        if idx in by_id:
            raise DuplicateSymbol(f"{origin}: id {idx} assigned twice")
        seen.add(sym)
        by_id[idx] = (sym, kind)
    if set(by_id) != set(range(len(by_id))):
        raise FormatError(f"{origin}: ids must form a dense 0..{len(by_id) - 1} range")
    if by_id[EPS] != (EPS_SYM, "special"):
        raise MissingReserved(f"{origin}: id 0 must be {EPS_SYM} tagged special")
    if by_id[PHI] != (PHI_SYM, "special"):
        raise MissingReserved(f"{origin}: id 1 must be {PHI_SYM} tagged special")
    table = SymbolTable()
    for idx in range(2, len(by_id)):
        sym, kind = by_id[idx]
        table.add(sym, kind)
    if EOW_SYM not in table or table.kind_of(EOW_SYM) != "special":
        raise MissingReserved(f"{origin}: {EOW_SYM} must be present and tagged special")
    for sym in table.symbols_of_kind("phoneme"):
        # X-SAMPA tokens are printable ASCII; catches stray Unicode early.
        if not all(33 <= ord(c) <= 126 for c in sym):
            raise FormatError(f"{origin}: phoneme {sym!r} is not a printable-ASCII X-SAMPA token")
    return table


def load_symbols(path: str | Path) -> SymbolTable:
    p = Path(path)
    return loads_symbols(p.read_text(encoding="utf-8"), origin=str(p))
