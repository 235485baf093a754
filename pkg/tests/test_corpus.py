"""Ingestion, stats, and validation-split behavior."""

import itertools
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lexprep.corpus import (
    CorpusStats,
    DocKind,
    RawDocument,
    compute_stats,
    document_to_line,
    ingest_stream,
    read_documents,
    split_validation,
    write_documents,
)
from lexprep.errors import DuplicateId, InsufficientDocuments, MalformedRecord

from .conftest import doc_record, make_doc


def test_ingest_single_record_identity():
    line = json.dumps(doc_record("boe-2020-1", "texto"))
    docs = list(ingest_stream([line]))
    assert len(docs) == 1
    assert docs[0].id == "boe-2020-1"
    assert docs[0].text == "texto"


def test_ingest_empty_input():
    errors: list[MalformedRecord] = []
    assert list(ingest_stream([], error_sink=errors)) == []
    assert errors == []


def test_ingest_lenient_skips_malformed_and_counts():
    lines = [
        json.dumps(doc_record("a", "uno")),
        "{not json",
        json.dumps(doc_record("b", "dos")),
    ]
    errors: list[MalformedRecord] = []
    docs = list(ingest_stream(lines, strict=False, error_sink=errors))
    assert [d.id for d in docs] == ["a", "b"]
    assert len(errors) == 1
    assert errors[0].line_number == 2


def test_ingest_strict_raises_on_malformed():
    lines = [json.dumps(doc_record("a", "uno")), "{not json"]
    with pytest.raises(MalformedRecord) as excinfo:
        list(ingest_stream(lines, strict=True))
    assert excinfo.value.line_number == 2


def test_ingest_strict_raises_on_duplicate_id():
    lines = [json.dumps(doc_record("a", "uno")), json.dumps(doc_record("a", "dos"))]
    with pytest.raises(DuplicateId):
        list(ingest_stream(lines, strict=True))
    # lenient mode admits the duplicate and keeps memory flat
    assert len(list(ingest_stream(lines, strict=False))) == 2


def test_ingest_rejects_missing_or_empty_id():
    errors: list[MalformedRecord] = []
    lines = [json.dumps({"text": "sin id"}), json.dumps(doc_record("", "vacío"))]
    assert list(ingest_stream(lines, error_sink=errors)) == []
    assert len(errors) == 2


def test_ingest_blank_lines_skipped():
    lines = ["", "   ", json.dumps(doc_record("a", "uno")), "\n"]
    assert [d.id for d in ingest_stream(lines)] == ["a"]


def test_ingest_is_lazy():
    # An endless stream must be consumable prefix-wise: single pass,
    # bounded memory.
    lines = (json.dumps(doc_record(f"d{i}", "x")) for i in itertools.count())
    stream = ingest_stream(lines)
    first_three = [next(stream) for _ in range(3)]
    assert [d.id for d in first_three] == ["d0", "d1", "d2"]


def test_unknown_doc_kind_maps_to_other():
    record = doc_record("a", "uno")
    record["doc_kind"] = "press-release"
    docs = list(ingest_stream([json.dumps(record)]))
    assert docs[0].doc_kind is DocKind.OTHER


def test_bad_published_date_is_malformed():
    record = doc_record("a", "uno")
    record["published_date"] = "not-a-date"
    errors: list[MalformedRecord] = []
    assert list(ingest_stream([json.dumps(record)], error_sink=errors)) == []
    assert len(errors) == 1


def test_document_line_round_trip():
    doc = RawDocument(
        id="x-1",
        source="boe",
        region="estado",
        doc_kind=DocKind.RULE,
        language_hint="es",
        text="artículo único",
    )
    restored = list(ingest_stream([document_to_line(doc)]))[0]
    assert restored == doc


def test_compute_stats_empty():
    stats = compute_stats([])
    assert stats.document_count == 0
    assert stats.total_bytes == 0
    assert stats.total_tokens is None
    assert stats.per_region_counts == {}


def test_compute_stats_counts_bytes_and_regions():
    docs = [make_doc("1", "ab", region="A"), make_doc("2", "cde", region="B")]
    stats = compute_stats(docs)
    assert stats.document_count == 2
    assert stats.total_bytes == 5
    assert stats.per_region_counts == {"A": 1, "B": 1}


def test_compute_stats_bytes_are_utf8():
    stats = compute_stats([make_doc("1", "ñ")])
    assert stats.total_bytes == 2


def test_compute_stats_with_tokenizer(tokenizer):
    stats = compute_stats([make_doc("1", "de la ley")], tokenizer=tokenizer)
    assert stats.total_tokens == len(tokenizer.tokenize("de la ley"))


@given(
    st.lists(
        st.tuples(st.sampled_from(["A", "B", "C"]), st.text(max_size=20)), max_size=30
    )
)
def test_stats_region_sum_matches_count(pairs):
    docs = [make_doc(str(i), text, region) for i, (region, text) in enumerate(pairs)]
    stats = compute_stats(docs)
    assert stats.document_count == sum(stats.per_region_counts.values())
    assert stats.total_bytes == sum(len(t.encode("utf-8")) for _, t in pairs)


def test_stats_merge_is_associative_and_commutative():
    a = compute_stats([make_doc("1", "ab", region="A")])
    b = compute_stats([make_doc("2", "cde", region="B")])
    c = compute_stats([make_doc("3", "f", region="A")])
    assert a.merge(b).to_record() == b.merge(a).to_record()
    assert a.merge(b).merge(c).to_record() == a.merge(b.merge(c)).to_record()
    assert a.merge(b).merge(c).to_record() == compute_stats(
        [make_doc("1", "ab", region="A"), make_doc("2", "cde", region="B"),
         make_doc("3", "f", region="A")]
    ).to_record()


def test_split_validation_zero():
    docs = [make_doc(str(i), "x") for i in range(5)]
    train, validation = split_validation(docs, 0, seed=1)
    assert validation == []
    assert train == docs


def test_split_validation_all():
    docs = [make_doc(str(i), "x") for i in range(5)]
    train, validation = split_validation(docs, 5, seed=1)
    assert train == []
    assert sorted(d.id for d in validation) == sorted(d.id for d in docs)


def test_split_validation_deterministic():
    docs = [make_doc(str(i), "x") for i in range(10)]
    first = split_validation(docs, 3, seed=42)
    second = split_validation(docs, 3, seed=42)
    assert [d.id for d in first[1]] == [d.id for d in second[1]]
    assert [d.id for d in first[0]] == [d.id for d in second[0]]


def test_split_validation_seed_changes_sample():
    docs = [make_doc(str(i), "x") for i in range(50)]
    picks = {tuple(d.id for d in split_validation(docs, 5, seed=s)[1]) for s in range(8)}
    assert len(picks) > 1


def test_split_validation_insufficient():
    with pytest.raises(InsufficientDocuments):
        split_validation([make_doc("1", "x")], 2, seed=0)


def test_split_validation_rejects_negative():
    with pytest.raises(ValueError):
        split_validation([], -1, seed=0)


@given(st.integers(0, 20), st.integers(0, 2**32 - 1))
def test_split_validation_partitions(n, seed):
    docs = [make_doc(str(i), "x") for i in range(20)]
    train, validation = split_validation(docs, n, seed)
    assert len(validation) == n
    train_ids = {d.id for d in train}
    valid_ids = {d.id for d in validation}
    assert train_ids.isdisjoint(valid_ids)
    assert train_ids | valid_ids == {d.id for d in docs}


def test_write_read_round_trip(tmp_path):
    docs = [make_doc("1", "uno"), make_doc("2", "dos", region="galicia")]
    path = tmp_path / "docs.jsonl"
    assert write_documents(path, docs) == 2
    assert list(read_documents(path)) == docs


def test_corpus_stats_invariant_in_to_record():
    stats = CorpusStats()
    stats.add(make_doc("1", "abc", region="B"))
    stats.add(make_doc("2", "d", region="A"))
    record = stats.to_record()
    assert list(record["per_region_counts"]) == ["A", "B"]
    assert record["document_count"] == 2
    assert record["total_bytes"] == 4
