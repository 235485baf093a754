"""Sentence splitting and greedy packing into token-budgeted chunks.

Texts are split into sentences, then consecutive sentences are appended
into one training unit for as long as the re-tokenized unit stays within
the token budget, so sequences are dense without mid-sentence truncation.
A single sentence longer than the whole budget is hard-split at token
boundaries into maximal pieces rather than dropped.
"""

from __future__ import annotations

import re
from collections.abc import Iterable
from dataclasses import dataclass

from .corpus import RawDocument
from .errors import TokenizerFailure
from .tokenizers import Token, TokenizerInterface

DEFAULT_MAX_TOKENS = 512

# Spanish legal/administrative abbreviations after which a period never ends
# the sentence. Matched case-insensitively against the preceding word.
ABBREVIATIONS = frozenset(
    abbr.lower()
    for abbr in (
        "art. arts. núm. núms. nº no. pág. págs. p. pp. cap. apdo. ap. "
        "disp. ss. vid. cfr. cf. etc. Sr. Sra. Sres. Sras. D. Dña. Dª. "
        "Dr. Dra. Ldo. Lda. Excmo. Excma. Ilmo. Ilma. Avda. Ud. Uds. "
        "S.A. S.L. EE.UU."
    ).split()
)

# Characters that may open a sentence in Spanish besides an uppercase letter.
_OPENERS = "¿¡«“\"'‘(["

# Sentence-final punctuation, the following whitespace, and a peek at the
# next non-space character.
_BOUNDARY = re.compile(r"([.!?…]+)(\s+)(?=(\S))")

_LAST_WORD = re.compile(r"\S+$")


def _opens_sentence(ch: str) -> bool:
    return ch.isupper() or ch in _OPENERS


def _split_line(line: str) -> list[str]:
    sentences = []
    start = 0
    for match in _BOUNDARY.finditer(line):
        if not _opens_sentence(match.group(3)):
            continue
        word = _LAST_WORD.search(line[: match.end(1)])
        if word and word.group().lstrip(_OPENERS).lower() in ABBREVIATIONS:
            continue
        sentence = line[start : match.end(1)].strip()
        if sentence:
            sentences.append(sentence)
        start = match.end(2)
    tail = line[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def split_sentences(text: str) -> list[str]:
    """Split cleaned text into sentences.

    Boundaries occur at sentence-final punctuation (. ! ? …) followed by
    whitespace and an uppercase or opening character, except after known
    abbreviations; a line break is always a boundary. Ordinal forms such
    as "1.º" never split because the period is not followed by whitespace.
    Joining the result with single separators preserves the non-whitespace
    content in order.
    """
    sentences: list[str] = []
    for line in text.split("\n"):
        if line.strip():
            sentences.extend(_split_line(line))
    return sentences


@dataclass(frozen=True)
class Chunk:
    """A packed training unit of at most max_tokens tokens.

    word_boundaries partitions [0, token_count) into contiguous ranges,
    one (start, end) pair per word; identity within a run is (doc_id, seq).
    """

    doc_id: str
    seq: int
    text: str
    token_count: int
    word_boundaries: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.token_count <= 0:
            raise ValueError("a chunk must contain at least one token")
        expected = 0
        for start, end in self.word_boundaries:
            if start != expected or end <= start:
                raise ValueError("word_boundaries must partition the token range")
            expected = end
        if expected != self.token_count:
            raise ValueError("word_boundaries must cover exactly token_count tokens")

    def to_record(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "seq": self.seq,
            "text": self.text,
            "token_count": self.token_count,
        }


def word_ranges(tokens: list[Token]) -> tuple[tuple[int, int], ...]:
    """Group token indices into word ranges via the word-start flags.

    A leading continuation token (possible after a hard split) counts as
    starting its own word.
    """
    if not tokens:
        return ()
    starts = [i for i, tok in enumerate(tokens) if tok.is_word_start]
    if not starts or starts[0] != 0:
        starts.insert(0, 0)
    starts.append(len(tokens))
    return tuple((starts[i], starts[i + 1]) for i in range(len(starts) - 1))


def _make_chunk(doc_id: str, seq: int, text: str, tokens: list[Token]) -> Chunk:
    return Chunk(
        doc_id=doc_id,
        seq=seq,
        text=text,
        token_count=len(tokens),
        word_boundaries=word_ranges(tokens),
    )


def _tokenize(tokenizer: TokenizerInterface, text: str, doc_id: str) -> list[Token]:
    try:
        return tokenizer.tokenize(text)
    except Exception as exc:
        raise TokenizerFailure(doc_id, f"{exc} (text starts {text[:40]!r})") from exc


def _hard_split(
    sentence: str,
    tokens: list[Token],
    budget: int,
    tokenizer: TokenizerInterface,
    doc_id: str,
) -> list[tuple[str, list[Token]]]:
    """Cut an oversized sentence at token boundaries into maximal pieces.

    Cuts land on word starts whenever one exists within the budget: both
    sides of such a cut re-tokenize exactly as in the original sentence,
    so the document's token stream is preserved. Only a single word wider
    than the whole budget forces a mid-word cut, where the re-tokenized
    piece is authoritative and shrinks until it fits.
    """
    pieces = []
    start = 0
    total = len(tokens)
    while start < total:
        take = min(budget, total - start)
        cut = take
        while cut > 0 and start + cut < total and not tokens[start + cut].is_word_start:
            cut -= 1
        if cut == 0:
            cut = take
        while cut > 0:
            last = tokens[start + cut - 1]
            piece_text = sentence[tokens[start].start : last.start + len(last.piece)]
            piece_tokens = _tokenize(tokenizer, piece_text, doc_id)
            if len(piece_tokens) <= budget:
                break
            cut -= 1
        if cut == 0:
            raise TokenizerFailure(
                doc_id, f"cannot fit a single token within budget {budget}"
            )
        pieces.append((piece_text, piece_tokens))
        start += cut
    return pieces


def pack_chunks(
    sentences: Iterable[str],
    tokenizer: TokenizerInterface,
    max_tokens: int = DEFAULT_MAX_TOKENS,
    doc_id: str = "",
) -> list[Chunk]:
    """Greedily pack sentences left-to-right into token-budgeted chunks.

    The next sentence joins the current chunk iff the re-tokenized joined
    text stays within budget (per-sentence counts are never summed, since
    subword tokenizers are not concatenation-stable); otherwise the chunk
    is emitted and a new one starts. Sentence order is preserved and
    chunks never cross document boundaries.

    The budget is max_tokens minus the tokenizer's reserved special-token
    count, so stored counts are content tokens only.
    """
    reserved = getattr(tokenizer, "reserved_special_count", 0)
    budget = max_tokens - reserved
    if budget <= 0:
        raise ValueError(
            f"max_tokens={max_tokens} leaves no room after {reserved} reserved tokens"
        )
    chunks: list[Chunk] = []
    current_sents: list[str] = []
    current_tokens: list[Token] = []

    def emit(text: str, tokens: list[Token]) -> None:
        chunks.append(_make_chunk(doc_id, len(chunks), text, tokens))

    for sentence in sentences:
        sentence = sentence.strip()
        if not sentence:
            continue
        candidate = " ".join(current_sents + [sentence]) if current_sents else sentence
        tokens = _tokenize(tokenizer, candidate, doc_id)
        if tokens and len(tokens) <= budget:
            current_sents.append(sentence)
            current_tokens = tokens
            continue
        if not tokens:
            continue
        if current_sents:
            emit(" ".join(current_sents), current_tokens)
            current_sents, current_tokens = [], []
            tokens = _tokenize(tokenizer, sentence, doc_id)
            if len(tokens) <= budget:
                current_sents, current_tokens = [sentence], tokens
                continue
        pieces = _hard_split(sentence, tokens, budget, tokenizer, doc_id)
        for text, piece_tokens in pieces[:-1]:
            emit(text, piece_tokens)
        # The final piece stays open so following sentences can pack onto it.
        tail_text, tail_tokens = pieces[-1]
        current_sents, current_tokens = [tail_text], tail_tokens
    if current_sents:
        emit(" ".join(current_sents), current_tokens)
    return chunks


def chunk_document(
    doc: RawDocument,
    tokenizer: TokenizerInterface,
    max_tokens: int = DEFAULT_MAX_TOKENS,
) -> list[Chunk]:
    """Split one document into sentences and pack them into chunks."""
    return pack_chunks(
        split_sentences(doc.text), tokenizer, max_tokens=max_tokens, doc_id=doc.id
    )


def chunk_from_record(record: dict, tokenizer: TokenizerInterface) -> Chunk:
    """Rebuild a Chunk (with word boundaries) from its serialized record.

    The stored token_count must match what the supplied tokenizer produces;
    a mismatch means the record was written with a different tokenizer.
    """
    tokens = tokenizer.tokenize(record["text"])
    chunk = _make_chunk(record["doc_id"], int(record["seq"]), record["text"], tokens)
    stored = record.get("token_count")
    if stored is not None and int(stored) != chunk.token_count:
        raise ValueError(
            f"chunk {chunk.doc_id}:{chunk.seq} token_count {stored} does not match "
            f"this tokenizer ({chunk.token_count}); wrong --tokenizer?"
        )
    return chunk
