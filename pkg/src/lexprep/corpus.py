"""Document data model and streaming ingestion of pre-extracted legal texts.

Documents arrive as line-delimited JSON records, one per line, with field
names matching :class:`RawDocument`. Ingestion is single-pass and never
materializes the corpus; all yielded documents are immutable values.
"""

from __future__ import annotations

import json
import random
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from datetime import date
from enum import Enum

from .errors import DuplicateId, InsufficientDocuments, MalformedRecord


class DocKind(Enum):
    """Kind of source document. Unknown values map to OTHER: bulletins vary."""

    NOTICE = "notice"
    RULE = "rule"
    TRANSCRIPT = "transcript"
    RULING = "ruling"
    OTHER = "other"

    @classmethod
    def parse(cls, value: object) -> "DocKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            return cls.OTHER


@dataclass(frozen=True)
class RawDocument:
    """One source legal text with provenance metadata.

    Attributes:
        id: Unique identifier within one ingestion run (non-empty).
        source: Bulletin or publisher name.
        region: Autonomous community, or "estado" for state-level sources.
        doc_kind: What the document is (notice, rule, transcript, ruling, other).
        language_hint: Optional 2-letter code from the source metadata.
        published_date: Optional publication date.
        text: Document body. May be empty at ingest; empty documents are
            rejected by downstream stages, not here.
    """

    id: str
    source: str = ""
    region: str = ""
    doc_kind: DocKind = DocKind.OTHER
    language_hint: str | None = None
    published_date: date | None = None
    text: str = ""

    def __post_init__(self):
        if not self.id:
            raise ValueError("document id must be non-empty")

    @property
    def byte_length(self) -> int:
        return len(self.text.encode("utf-8"))

    def replace_text(self, text: str) -> "RawDocument":
        """Return a copy with a new body (documents are immutable)."""
        return RawDocument(
            id=self.id,
            source=self.source,
            region=self.region,
            doc_kind=self.doc_kind,
            language_hint=self.language_hint,
            published_date=self.published_date,
            text=text,
        )

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "source": self.source,
            "region": self.region,
            "doc_kind": self.doc_kind.value,
            "language_hint": self.language_hint,
            "published_date": (
                self.published_date.isoformat() if self.published_date else None
            ),
            "text": self.text,
        }

    @classmethod
    def from_record(cls, record: dict) -> "RawDocument":
        """Build a document from a parsed record, validating field types.

        Raises:
            ValueError: on a missing or ill-typed field.
        """
        if not isinstance(record, dict):
            raise ValueError("record must be a JSON object")
        doc_id = record.get("id")
        if not isinstance(doc_id, str) or not doc_id:
            raise ValueError("field 'id' must be a non-empty string")
        text = record.get("text", "")
        if not isinstance(text, str):
            raise ValueError("field 'text' must be a string")
        hint = record.get("language_hint")
        if hint is not None:
            if not isinstance(hint, str) or len(hint) != 2:
                raise ValueError("field 'language_hint' must be a 2-letter code")
            hint = hint.lower()
        raw_date = record.get("published_date")
        published = None
        if raw_date is not None and raw_date != "":
            try:
                published = date.fromisoformat(str(raw_date))
            except ValueError as exc:
                raise ValueError(f"field 'published_date' is not ISO-8601: {exc}")
        return cls(
            id=doc_id,
            source=str(record.get("source", "") or ""),
            region=str(record.get("region", "") or ""),
            doc_kind=DocKind.parse(record.get("doc_kind", "other")),
            language_hint=hint,
            published_date=published,
            text=text,
        )


def document_to_line(doc: RawDocument) -> str:
    """Serialize one document to its canonical JSONL line (no newline)."""
    return json.dumps(doc.to_record(), ensure_ascii=False)


def ingest_stream(
    lines: Iterable[str],
    strict: bool = False,
    error_sink: list[MalformedRecord] | None = None,
) -> Iterator[RawDocument]:
    """Yield one RawDocument per input line, in input order.

    Single-pass and bounded-memory: nothing is retained between lines except,
    in strict mode, the set of ids seen so far (needed to detect duplicates;
    lenient mode skips the check to keep memory independent of corpus size).

    Args:
        lines: Readable sequence of serialized records, one per line.
            Blank lines are skipped.
        strict: If True, raise MalformedRecord / DuplicateId on the first
            problem. If False, skip bad lines, appending the error to
            error_sink when one is given.
        error_sink: Optional list collecting MalformedRecord errors in
            lenient mode (the skip-and-count side of the contract).
    """
    seen_ids: set[str] | None = set() if strict else None
    for line_number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            doc = RawDocument.from_record(record)
        except (json.JSONDecodeError, ValueError) as exc:
            err = MalformedRecord(line_number, str(exc))
            if strict:
                raise err
            if error_sink is not None:
                error_sink.append(err)
            continue
        if seen_ids is not None:
            if doc.id in seen_ids:
                raise DuplicateId(doc.id, line_number)
            seen_ids.add(doc.id)
        yield doc


def read_documents(
    path,
    strict: bool = False,
    error_sink: list[MalformedRecord] | None = None,
) -> Iterator[RawDocument]:
    """Stream documents from a JSONL file."""
    with open(path, encoding="utf-8") as handle:
        yield from ingest_stream(handle, strict=strict, error_sink=error_sink)


def write_documents(path, docs: Iterable[RawDocument]) -> int:
    """Write documents to a JSONL file. Returns the number written."""
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for doc in docs:
            handle.write(document_to_line(doc) + "\n")
            count += 1
    return count


@dataclass
class CorpusStats:
    """Streaming corpus totals.

    Invariants: document_count equals the sum of per_region_counts, and
    total_bytes is the sum of UTF-8 byte lengths of all texts.
    """

    document_count: int = 0
    total_bytes: int = 0
    total_tokens: int | None = None
    per_region_counts: dict[str, int] = field(default_factory=dict)

    def add(self, doc: RawDocument, token_count: int | None = None) -> None:
        self.document_count += 1
        self.total_bytes += doc.byte_length
        region = doc.region or ""
        self.per_region_counts[region] = self.per_region_counts.get(region, 0) + 1
        if token_count is not None:
            self.total_tokens = (self.total_tokens or 0) + token_count

    def merge(self, other: "CorpusStats") -> "CorpusStats":
        """Combine shard stats; associative and commutative."""
        merged_regions = dict(self.per_region_counts)
        for region, count in other.per_region_counts.items():
            merged_regions[region] = merged_regions.get(region, 0) + count
        if self.total_tokens is None and other.total_tokens is None:
            tokens = None
        else:
            tokens = (self.total_tokens or 0) + (other.total_tokens or 0)
        return CorpusStats(
            document_count=self.document_count + other.document_count,
            total_bytes=self.total_bytes + other.total_bytes,
            total_tokens=tokens,
            per_region_counts=merged_regions,
        )

    def to_record(self) -> dict:
        return {
            "document_count": self.document_count,
            "total_bytes": self.total_bytes,
            "total_tokens": self.total_tokens,
            "per_region_counts": dict(sorted(self.per_region_counts.items())),
        }


def compute_stats(docs: Iterable[RawDocument], tokenizer=None) -> CorpusStats:
    """Aggregate CorpusStats over a document stream.

    O(1) memory beyond the per-region map. When a tokenizer is given,
    total_tokens counts tokens of each text; otherwise it stays None.
    """
    stats = CorpusStats()
    for doc in docs:
        token_count = len(tokenizer.tokenize(doc.text)) if tokenizer else None
        stats.add(doc, token_count)
    return stats


def split_validation(
    docs: Iterable[RawDocument], n: int, seed: int
) -> tuple[list[RawDocument], list[RawDocument]]:
    """Partition documents into (train, validation) with |validation| = n.

    The validation set is a uniform sample without replacement, drawn by
    reservoir over a single pass so the selection also works when `docs`
    is a stream. Both partitions keep the input order; they are disjoint
    and their union is the input. Deterministic for fixed (docs, n, seed).

    Raises:
        InsufficientDocuments: if n exceeds the number of documents.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = random.Random(seed)
    reservoir: list[int] = []
    everything: list[RawDocument] = []
    for i, doc in enumerate(docs):
        everything.append(doc)
        if i < n:
            reservoir.append(i)
        else:
            j = rng.randint(0, i)
            if j < n:
                reservoir[j] = i
    if len(everything) < n:
        raise InsufficientDocuments(
            f"requested a validation split of {n} from {len(everything)} documents"
        )
    chosen = set(reservoir)
    validation = [doc for i, doc in enumerate(everything) if i in chosen]
    train = [doc for i, doc in enumerate(everything) if i not in chosen]
    return train, validation
