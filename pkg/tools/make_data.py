"""Regenerate the packaged data files under src/phonebias/data/.

Keeps the shipped resources mutually consistent: every wordpiece is a
symbol, every grapheme used by a wordpiece or pool spelling has a
symbol, the phoneme map covers the full source inventory, and pool
entries stay unique in both written form and mapped pronunciation.
Run from the repository root: python tools/make_data.py
"""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "src" / "phonebias" / "data"
sys.path.insert(0, str(ROOT / "src"))

ENGLISH_PHONEMES = [
    # consonants
    "p", "b", "t", "d", "k", "g", "tS", "dZ", "f", "v", "T", "D",
    "s", "z", "S", "Z", "h", "m", "n", "N", "l", "r\\", "w", "j",
    # monophthongs
    "i:", "I", "E", "{", "A:", "Q", "O:", "U", "u:", "V", "@", "3:",
    # diphthongs
    "eI", "aI", "OI", "@U", "aU",
]

FRENCH_PHONEMES = [
    "i", "e", "E", "a", "A", "O", "o", "u", "y", "2", "9", "@",
    "e~", "a~", "o~", "9~",
    "j", "w", "H",
    "p", "b", "t", "d", "k", "g", "f", "v", "s", "z", "S", "Z",
    "m", "n", "J", "N", "l", "R",
]

# Source phoneme -> target phoneme sequence. One row per source symbol.
FR_EN_MAP = {
    "i": "i:", "e": "E", "E": "E", "a": "{", "A": "A:", "O": "O:",
    "o": "@U", "u": "u:", "y": "u:", "2": "3:", "9": "3:", "@": "@",
    "e~": "E", "a~": "A:", "o~": "O:", "9~": "3:",
    "j": "j", "w": "w", "H": "w",
    "p": "p", "b": "b", "t": "t", "d": "d", "k": "k", "g": "g",
    "f": "f", "v": "v", "s": "s", "z": "z", "S": "S", "Z": "Z",
    "m": "m", "n": "n", "J": "n j", "N": "N", "l": "l", "R": "r\\",
}

ALPHABET = "abcdefghijklmnopqrstuvwxyz" + "àâçéèêëîïôûùœ" + "-"

ENGLISH_LEXICON = [
    ("directions", 1200, "d @ r\\ E k S @ n z"),
    ("to", 90000, "t u:"),
    ("the", 100000, "D @"),
    ("a", 95000, "@"),
    ("show", 4000, "S @U"),
    ("me", 30000, "m i:"),
    ("take", 6000, "t eI k"),
    ("navigate", 150, "n { v I g eI t"),
    ("go", 20000, "g @U"),
    ("route", 800, "r\\ u: t"),
    ("near", 3000, "n I r\\"),
    ("find", 5000, "f aI n d"),
    ("best", 7000, "b E s t"),
    ("way", 9000, "w eI"),
    ("from", 40000, "f r\\ V m"),
    ("home", 8000, "h @U m"),
    ("work", 10000, "w 3: k"),
    ("school", 5000, "s k u: l"),
    ("store", 2000, "s t O: r\\"),
    ("north", 1500, "n O: r\\ T"),
    ("south", 1500, "s aU T"),
    ("east", 1200, "i: s t"),
    ("west", 1200, "w E s t"),
    ("park", 2500, "p A: r\\ k"),
    ("street", 3000, "s t r\\ i: t"),
    ("river", 900, "r\\ I v @ r\\"),
    ("lake", 700, "l eI k"),
    ("city", 4000, "s I t i:"),
    ("village", 400, "v I l I dZ"),
    ("old", 6000, "@U l d"),
    ("new", 12000, "n u:"),
    ("play", 5000, "p l eI"),
    ("music", 4000, "m j u: z I k"),
    ("call", 7000, "k O: l"),
    ("weather", 1800, "w E D @ r\\"),
    ("today", 9000, "t @ d eI"),
    ("left", 4000, "l E f t"),
    ("right", 11000, "r\\ aI t"),
    ("turn", 3500, "t 3: n"),
    ("main", 2200, "m eI n"),
]

# Matches harness.SYLLABLES so generated pseudo-names segment cleanly.
SYLLABLE_SPELLINGS = [
    "mont", "ville", "bour", "sain", "cler", "fon", "tai", "beau",
    "mar", "ly", "ro", "che", "vau", "gre", "nan", "tou",
    "pe", "ri", "sur", "lac", "bre", "jo", "cha", "neu",
    "pont", "gny", "teuil", "zé", "mi", "dor",
]

POOL = [
    ("créteil", "k R e t E j"),
    ("paris", "p a R i"),
    ("marseille", "m a R s E j"),
    ("lyon", "l j o~"),
    ("toulouse", "t u l u z"),
    ("nice", "n i s"),
    ("nantes", "n a~ t"),
    ("strasbourg", "s t R a z b u R"),
    ("montpellier", "m o~ p e l j e"),
    ("bordeaux", "b O R d o"),
    ("lille", "l i l"),
    ("rennes", "R E n"),
    ("reims", "R e~ s"),
    ("toulon", "t u l o~"),
    ("grenoble", "g R @ n O b l"),
    ("dijon", "d i Z o~"),
    ("angers", "a~ Z e"),
    ("nîmes", "n i m"),
    ("villeurbanne", "v i l 9 R b a n"),
    ("clermont", "k l E R m o~"),
    ("annecy", "a n s i"),
    ("avignon", "a v i J o~"),
    ("poitiers", "p w a t j e"),
    ("calais", "k a l E"),
    ("arles", "a R l"),
    ("brest", "b R E s t"),
    ("tours", "t u R"),
    ("amiens", "a m j e~"),
    ("limoges", "l i m O Z"),
    ("metz", "m E s"),
    ("besançon", "b @ z a~ s o~"),
    ("perpignan", "p E R p i J a~"),
    ("orléans", "O R l e a~"),
    ("rouen", "R w a~"),
    ("mulhouse", "m y l u z"),
    ("caen", "k a~"),
    ("nancy", "n a~ s i"),
    ("argenteuil", "a R Z a~ t 9 j"),
    ("roubaix", "R u b E"),
    ("tourcoing", "t u R k w e~"),
    ("avranches", "a v R a~ S"),
    ("cognac", "k O J a k"),
    ("bayonne", "b a j O n"),
    ("biarritz", "b j a R i t s"),
    ("chamonix", "S a m O n i"),
    ("megève", "m @ Z E v"),
    ("courchevel", "k u R S @ v E l"),
    ("ardèche", "a R d E S"),
    ("provence", "p R O v a~ s"),
    ("gordes", "g O R d"),
    ("cassis", "k a s i s"),
]


def wordpiece_list() -> list[str]:
    # Every shipped piece carries a marker ("_" word-initial, "##"
    # continuation) so piece spellings never collide with the bare
    # X-SAMPA phoneme spellings sharing the table.
    pieces = ["##" + c for c in ALPHABET]
    pieces += ["##" + s for s in SYLLABLE_SPELLINGS]
    pieces += ["_" + s for s in SYLLABLE_SPELLINGS]
    pieces += ["_" + word for word, _, _ in ENGLISH_LEXICON]
    pieces += ["_cré", "##teil"]
    seen = set()
    out = []
    for p in pieces:
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def build_symbols() -> list[tuple[str, str]]:
    rows = [("<eps>", "special"), ("<phi>", "special"), ("<eow>", "special")]
    rows += [(p, "phoneme") for p in ENGLISH_PHONEMES]
    rows += [(p, "wordpiece") for p in wordpiece_list()]
    return rows


def build_french_symbols() -> list[tuple[str, str]]:
    rows = [("<eps>", "special"), ("<phi>", "special"), ("<eow>", "special")]
    rows += [(p, "phoneme") for p in FRENCH_PHONEMES]
    return rows


def build_grapheme_symbols() -> list[tuple[str, str]]:
    rows = [("<eps>", "special"), ("<phi>", "special"), ("<eow>", "special")]
    rows += [(c, "grapheme") for c in ALPHABET]
    return rows


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)

    sym_rows = build_symbols()
    (DATA / "symbols.tsv").write_text(
        "".join(f"{s}\t{i}\t{k}\n" for i, (s, k) in enumerate(sym_rows)), encoding="utf-8"
    )
    fr_rows = build_french_symbols()
    (DATA / "symbols_fr.tsv").write_text(
        "".join(f"{s}\t{i}\t{k}\n" for i, (s, k) in enumerate(fr_rows)), encoding="utf-8"
    )
    gr_rows = build_grapheme_symbols()
    (DATA / "symbols_graphemes.tsv").write_text(
        "".join(f"{s}\t{i}\t{k}\n" for i, (s, k) in enumerate(gr_rows)), encoding="utf-8"
    )
    (DATA / "wordpieces.txt").write_text(
        "".join(p + "\n" for p in wordpiece_list()), encoding="utf-8"
    )
    (DATA / "lexicon_en.tsv").write_text(
        "".join(f"{w}\t{f}\t{p}\n" for w, f, p in ENGLISH_LEXICON), encoding="utf-8"
    )
    (DATA / "phoneme_map_fr_en.tsv").write_text(
        "".join(f"{src}\t{FR_EN_MAP[src]}\n" for src in FRENCH_PHONEMES), encoding="utf-8"
    )
    (DATA / "pool.tsv").write_text(
        "".join(f"{w}\t{p}\n" for w, p in POOL), encoding="utf-8"
    )

    # Cross-checks: load everything through the package and assert the
    # invariants the shipped data must satisfy.
    from phonebias.lexicon import map_phonemes
    from phonebias.resources import ResourceSet
    from phonebias.subwords import tokenize_wordpieces

    res = ResourceSet.load(DATA)
    assert len(res.symtab.ids_of_kind("phoneme")) == 41
    for word, _, _ in ENGLISH_LEXICON:
        tokenize_wordpieces(word, res.inv)
    mapped = {}
    for entry in res.pool:
        tokenize_wordpieces(entry.word, res.inv)
        key = tuple(map_phonemes(entry.pron, res.pmap))
        if key in mapped:
            raise SystemExit(f"mapped pronunciation collision: {mapped[key]} vs {entry.word}")
        mapped[key] = entry.word
    creteil = map_phonemes(["k", "R", "e", "t", "E", "j"], res.pmap)
    assert [res.symtab.symbol(i) for i in creteil] == ["k", "r\\", "E", "t", "E", "j"]
    print(f"wrote {len(sym_rows)} symbols, {len(res.pool)} pool entries to {DATA}")


if __name__ == "__main__":
    main()
