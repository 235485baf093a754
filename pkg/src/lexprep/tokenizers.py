"""Tokenizer interface and the bundled deterministic reference tokenizer.

Chunking and masking only require the behavioral interface below; any
production subword tokenizer can be adapted to it. The bundled
VocabTokenizer splits on whitespace and punctuation, then segments each
word by greedy longest-match against a fixed vocabulary, so tests and
pipeline runs are reproducible with no model download.
"""

from __future__ import annotations

import json
from typing import NamedTuple, Protocol, Sequence, runtime_checkable


class Token(NamedTuple):
    """One subword token.

    `piece` is the exact surface text and `start` its character offset in
    the tokenized string; together they let the chunker slice oversized
    sentences at token boundaries without a separate detokenizer.
    """

    id: int
    is_word_start: bool
    piece: str
    start: int


@runtime_checkable
class TokenizerInterface(Protocol):
    """What the chunker and masker need from a tokenizer.

    tokenize("") must return []. Concatenation stability is not assumed:
    chunk token counts are always measured by tokenizing the chunk text
    as a whole. `reserved_special_count` is how many special tokens the
    tokenizer adds per sequence (0 for the reference tokenizer); chunk
    packing budgets content tokens against max_tokens minus this count.
    """

    vocab_size: int
    mask_token_id: int
    special_token_ids: frozenset[int]
    reserved_special_count: int

    def tokenize(self, text: str) -> list[Token]: ...


PAD, UNK, CLS, SEP, MASK = 0, 1, 2, 3, 4
SPECIAL_PIECES = ("[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]")

_SINGLE_CHARS = (
    "abcdefghijklmnopqrstuvwxyz"
    "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    "0123456789"
    "áéíóúüñçàèìòùâêîôûëïäöãõ"
    "ÁÉÍÓÚÜÑÇÀÈÌÒÙÂÊÎÔÛËÏÄÖÃÕ"
    "ºª"
    ".,;:!?¿¡()[]{}«»\"'`´‘’“”%&+-*/=<>|_#@€$§·…–—"
)

# Frequent Spanish (and shared Romance) character chunks, longest first in
# effect via greedy matching. Kept to <= 4 chars so lookup stays bounded.
_CHUNKS = (
    "ción sión ment ente idad ador edad ible able ario aria "
    "ión ció cio nte ent ado ada ido ida aci ici oci los las del con por par "
    "que est pre pro com tra ter tor dad tad men res ser era ara ura ore ant "
    "end and ond ist ust ons ien ier ial ual cia cía ría tic tiv dis des sub "
    "per ver vol val gen leg jur art nor bol "
    "de la el en es os as al ar er ir or ón an on ad id ic ci ca co cu ce da "
    "do du di le lo li lu ma me mi mo mu na ne ni no nu pa pe pi po pu ra re "
    "ri ro ru sa se si so su ta te ti to tu ba be bi bo bu ga ge gi go gu ha "
    "he hi ho hu ja je jo ju va ve vi vo za zo ue ui ia io iu ea eo st tr pr "
    "pl bl br cr dr fr gr fl gl cl qu ll rr ch nt nd ns mb mp ct sc sp"
).split()


def default_pieces() -> list[str]:
    """The bundled vocabulary, in canonical id order (dedup keeps first)."""
    seen: dict[str, None] = {}
    for piece in list(_SINGLE_CHARS) + _CHUNKS:
        seen.setdefault(piece, None)
    return list(seen)


class VocabTokenizer:
    """Greedy longest-match subword tokenizer over a fixed vocabulary.

    Words are whitespace-delimited; punctuation characters split off as
    words of their own. Characters not covered by any piece map to [UNK]
    (the surface character is still carried in the token's piece field).
    Instances are safe for concurrent read-only use.
    """

    reserved_special_count = 0

    def __init__(self, pieces: Sequence[str] | None = None):
        if pieces is None:
            pieces = default_pieces()
        if len(set(pieces)) != len(pieces):
            raise ValueError("vocabulary pieces must be unique")
        if any(p in SPECIAL_PIECES for p in pieces):
            raise ValueError("special tokens are implicit; do not list them")
        self._piece_ids = {p: i + len(SPECIAL_PIECES) for i, p in enumerate(pieces)}
        self._max_piece_len = max((len(p) for p in pieces), default=1)
        self.vocab_size = len(SPECIAL_PIECES) + len(pieces)
        self.mask_token_id = MASK
        self.special_token_ids = frozenset(range(len(SPECIAL_PIECES)))
        self._word_cache: dict[str, tuple[tuple[int, str], ...]] = {}

    @classmethod
    def from_file(cls, path) -> "VocabTokenizer":
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
        if not isinstance(data, dict) or "pieces" not in data:
            raise ValueError(f"{path}: not a serialized vocabulary")
        return cls(data["pieces"])

    def save(self, path) -> None:
        pieces = sorted(self._piece_ids, key=self._piece_ids.get)
        data = {"special_tokens": list(SPECIAL_PIECES), "pieces": pieces}
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(data, handle, ensure_ascii=False, indent=1)
            handle.write("\n")

    def tokenize(self, text: str) -> list[Token]:
        tokens: list[Token] = []
        pos = 0
        length = len(text)
        while pos < length:
            ch = text[pos]
            if ch.isspace():
                pos += 1
                continue
            if ch.isalnum():
                end = pos + 1
                while end < length and text[end].isalnum():
                    end += 1
                word = text[pos:end]
                for offset, (piece_id, piece) in enumerate_pieces(
                    word, self._segment_word(word)
                ):
                    tokens.append(Token(piece_id, offset == 0, piece, pos + offset))
                pos = end
            else:
                piece_id = self._piece_ids.get(ch, UNK)
                tokens.append(Token(piece_id, True, ch, pos))
                pos += 1
        return tokens

    def _segment_word(self, word: str) -> tuple[tuple[int, str], ...]:
        cached = self._word_cache.get(word)
        if cached is not None:
            return cached
        pieces: list[tuple[int, str]] = []
        i = 0
        n = len(word)
        while i < n:
            for take in range(min(self._max_piece_len, n - i), 0, -1):
                candidate = word[i : i + take]
                piece_id = self._piece_ids.get(candidate)
                if piece_id is not None:
                    pieces.append((piece_id, candidate))
                    i += take
                    break
            else:
                pieces.append((UNK, word[i]))
                i += 1
        result = tuple(pieces)
        if len(self._word_cache) >= 65536:
            self._word_cache.clear()
        self._word_cache[word] = result
        return result


def enumerate_pieces(word: str, pieces: tuple[tuple[int, str], ...]):
    """Yield (char_offset_in_word, (piece_id, piece)) for a segmented word."""
    offset = 0
    for piece_id, piece in pieces:
        yield offset, (piece_id, piece)
        offset += len(piece)
