"""Sentence splitting and token-budgeted packing."""

import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lexprep.chunking import (
    Chunk,
    chunk_document,
    chunk_from_record,
    pack_chunks,
    split_sentences,
    word_ranges,
)
from lexprep.errors import TokenizerFailure
from lexprep.tokenizers import VocabTokenizer

from .conftest import make_doc

# Words with known reference-tokenizer behavior: the short ones are one
# token, the long ones several.
_WORD_POOL = (
    "de la ley el en artículo normativa información publicación jurídico "
    "administración procedimiento responsabilidad extraordinario qwzkj"
).split()


def _sentence_of(n_tokens: int) -> str:
    return " ".join(["de"] * n_tokens)


def token_multiset(tokenizer, texts) -> Counter:
    counts: Counter = Counter()
    for text in texts:
        counts.update(token.id for token in tokenizer.tokenize(text))
    return counts


class TestSplitSentences:
    def test_single_sentence(self):
        assert split_sentences("Una frase.") == ["Una frase."]

    def test_abbreviation_does_not_split(self):
        text = "Visto el art. 5 de la Ley. Se acuerda su publicación."
        assert split_sentences(text) == [
            "Visto el art. 5 de la Ley.",
            "Se acuerda su publicación.",
        ]

    def test_line_break_always_splits(self):
        assert split_sentences("Primera línea\nSegunda línea") == [
            "Primera línea",
            "Segunda línea",
        ]

    def test_empty_input(self):
        assert split_sentences("") == []

    def test_more_abbreviations(self):
        text = "El Sr. García y la Sra. Ruiz firman. La pág. 3 lo recoge."
        assert split_sentences(text) == [
            "El Sr. García y la Sra. Ruiz firman.",
            "La pág. 3 lo recoge.",
        ]

    def test_ordinal_period_does_not_split(self):
        assert split_sentences("El punto 1.º queda aprobado.") == [
            "El punto 1.º queda aprobado."
        ]

    def test_lowercase_continuation_does_not_split(self):
        assert split_sentences("La norma n. 5 sigue vigente.") == [
            "La norma n. 5 sigue vigente."
        ]

    def test_boundary_before_opener(self):
        text = "Se aprueba. ¿Procede su publicación?"
        assert split_sentences(text) == ["Se aprueba.", "¿Procede su publicación?"]

    def test_question_and_exclamation(self):
        text = "¿Está vigente? Sí. ¡Publíquese!"
        assert split_sentences(text) == ["¿Está vigente?", "Sí.", "¡Publíquese!"]

    @given(
        st.text(
            alphabet=st.sampled_from(list("abcA. !?\n¿«(é")),
            max_size=80,
        )
    )
    def test_non_whitespace_content_preserved(self, text):
        joined = "".join("".join(s.split()) for s in split_sentences(text))
        assert joined == "".join(text.split())


class TestChunkType:
    def test_word_boundaries_must_partition(self):
        with pytest.raises(ValueError):
            Chunk("d", 0, "x", token_count=2, word_boundaries=((0, 1),))
        with pytest.raises(ValueError):
            Chunk("d", 0, "x", token_count=2, word_boundaries=((0, 1), (0, 2)))
        with pytest.raises(ValueError):
            Chunk("d", 0, "x", token_count=2, word_boundaries=((0, 2), (2, 2)))

    def test_token_count_positive(self):
        with pytest.raises(ValueError):
            Chunk("d", 0, "", token_count=0, word_boundaries=())

    def test_word_ranges_groups_by_start_flags(self, tokenizer):
        tokens = tokenizer.tokenize("información de")
        ranges = word_ranges(tokens)
        assert ranges[-1] == (len(tokens) - 1, len(tokens))
        assert ranges[0][0] == 0
        assert all(end > start for start, end in ranges)


class TestPackChunks:
    def test_example_three_sentences(self, tokenizer):
        sentences = [_sentence_of(200)] * 3
        chunks = pack_chunks(sentences, tokenizer, max_tokens=512, doc_id="d")
        assert [c.token_count for c in chunks] == [400, 200]

    def test_example_exact_budget(self, tokenizer):
        chunks = pack_chunks([_sentence_of(512)], tokenizer, max_tokens=512)
        assert [c.token_count for c in chunks] == [512]

    def test_example_hard_split(self, tokenizer):
        chunks = pack_chunks([_sentence_of(1030)], tokenizer, max_tokens=512)
        assert [c.token_count for c in chunks] == [512, 512, 6]

    def test_seq_numbers_consecutive(self, tokenizer):
        chunks = pack_chunks(
            [_sentence_of(30)] * 5, tokenizer, max_tokens=64, doc_id="d"
        )
        assert [c.seq for c in chunks] == list(range(len(chunks)))
        assert all(c.doc_id == "d" for c in chunks)

    def test_order_preserved(self, tokenizer):
        sentences = [f"{w} {w}" for w in ("de", "la", "el", "en", "ley")]
        chunks = pack_chunks(sentences, tokenizer, max_tokens=4)
        assert " ".join(c.text for c in chunks) == " ".join(sentences)

    def test_budget_unusable_raises(self, tokenizer):
        with pytest.raises(ValueError):
            pack_chunks(["de"], tokenizer, max_tokens=0)

    def test_reserved_specials_shrink_budget(self, tokenizer):
        class Reserving:
            reserved_special_count = 2
            vocab_size = tokenizer.vocab_size
            mask_token_id = tokenizer.mask_token_id
            special_token_ids = tokenizer.special_token_ids

            def tokenize(self, text):
                return tokenizer.tokenize(text)

        chunks = pack_chunks([_sentence_of(511)], Reserving(), max_tokens=512)
        assert [c.token_count for c in chunks] == [510, 1]

    def test_tokenizer_failure_carries_doc_id(self):
        class Broken:
            reserved_special_count = 0

            def tokenize(self, text):
                raise RuntimeError("boom")

        with pytest.raises(TokenizerFailure) as excinfo:
            pack_chunks(["una frase"], Broken(), max_tokens=16, doc_id="doc-9")
        assert "doc-9" in str(excinfo.value)

    def test_empty_and_blank_sentences_skipped(self, tokenizer):
        assert pack_chunks([], tokenizer) == []
        assert pack_chunks(["", "   "], tokenizer) == []

    def test_word_boundaries_cover_all_tokens(self, tokenizer):
        for chunk in pack_chunks(
            ["información de la administración"], tokenizer, max_tokens=8
        ):
            assert chunk.word_boundaries[0][0] == 0
            assert chunk.word_boundaries[-1][1] == chunk.token_count

    @settings(deadline=None)
    @given(st.data())
    def test_budget_and_conservation(self, tokenizer, data):
        rng_words = data.draw(
            st.lists(st.sampled_from(_WORD_POOL), min_size=1, max_size=60)
        )
        n_sentences = data.draw(st.integers(1, 6))
        max_tokens = data.draw(st.integers(8, 64))
        per = max(1, len(rng_words) // n_sentences)
        sentences = [
            " ".join(rng_words[i : i + per]) for i in range(0, len(rng_words), per)
        ]
        sentences = [s for s in sentences if s]
        chunks = pack_chunks(sentences, tokenizer, max_tokens=max_tokens, doc_id="p")
        assert all(c.token_count <= max_tokens for c in chunks)
        assert all(
            c.token_count == len(tokenizer.tokenize(c.text)) for c in chunks
        )
        assert token_multiset(tokenizer, (c.text for c in chunks)) == token_multiset(
            tokenizer, sentences
        )

    def test_greedy_no_chunk_could_absorb_next_sentence(self, tokenizer):
        rng = random.Random(3)
        sentences = [
            _sentence_of(rng.randint(1, 40)) for _ in range(30)
        ]
        budget = 64
        chunks = pack_chunks(sentences, tokenizer, max_tokens=budget, doc_id="g")
        # Recover which sentences each chunk holds: no hard splits occur
        # here, so chunk texts are joins of consecutive sentences.
        remaining = list(sentences)
        groups = []
        for chunk in chunks:
            group = []
            text = chunk.text
            while text:
                sentence = remaining.pop(0)
                assert text.startswith(sentence)
                group.append(sentence)
                text = text[len(sentence) :].lstrip()
            groups.append(group)
        assert not remaining
        for chunk, next_group in zip(chunks, groups[1:]):
            candidate = chunk.text + " " + next_group[0]
            assert len(tokenizer.tokenize(candidate)) > budget


class TestChunkDocument:
    def test_splits_then_packs(self, tokenizer):
        doc = make_doc("d1", "Una frase corta. Otra frase corta.")
        chunks = chunk_document(doc, tokenizer, max_tokens=512)
        assert len(chunks) == 1
        assert chunks[0].doc_id == "d1"
        assert chunks[0].text == "Una frase corta. Otra frase corta."

    def test_empty_document_yields_nothing(self, tokenizer):
        assert chunk_document(make_doc("d2", ""), tokenizer) == []

    def test_conservation_with_hard_splits(self, tokenizer):
        rng = random.Random(11)
        for trial in range(30):
            words = [rng.choice(_WORD_POOL) for _ in range(rng.randint(5, 150))]
            doc = make_doc(f"d{trial}", " ".join(words) + ".")
            budget = rng.randint(8, 48)
            chunks = chunk_document(doc, tokenizer, max_tokens=budget)
            assert all(c.token_count <= budget for c in chunks)
            expected = token_multiset(tokenizer, split_sentences(doc.text))
            assert token_multiset(tokenizer, (c.text for c in chunks)) == expected


class TestChunkRecords:
    def test_round_trip(self, tokenizer):
        (chunk,) = pack_chunks(["de la ley"], tokenizer, max_tokens=16, doc_id="r")
        restored = chunk_from_record(chunk.to_record(), tokenizer)
        assert restored == chunk

    def test_token_count_mismatch_rejected(self, tokenizer):
        (chunk,) = pack_chunks(["de la ley"], tokenizer, max_tokens=16, doc_id="r")
        record = chunk.to_record()
        record["token_count"] = record["token_count"] + 1
        with pytest.raises(ValueError):
            chunk_from_record(record, tokenizer)
