"""Shared fixtures: one reference tokenizer and document builders."""

import json

import pytest

from lexprep.corpus import RawDocument
from lexprep.tokenizers import VocabTokenizer


@pytest.fixture(scope="session")
def tokenizer():
    return VocabTokenizer()


def make_doc(doc_id: str, text: str, region: str = "estado") -> RawDocument:
    return RawDocument(id=doc_id, source="test", region=region, text=text)


def write_jsonl(path, records) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")


def doc_record(doc_id: str, text: str, region: str = "estado") -> dict:
    return {
        "id": doc_id,
        "source": "test",
        "region": region,
        "doc_kind": "rule",
        "language_hint": None,
        "published_date": None,
        "text": text,
    }
