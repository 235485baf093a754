"""Corpus preparation for masked-language-model pretraining.

The package covers the path from raw document streams to training-ready
examples: ingestion of line-delimited document records, an n-gram
language gate, whitespace/control cleaning, sentence packing into
token-budgeted chunks, whole-word masking, learning-rate schedule math,
and benchmark scoring (F1, learning-curve AUC, model reports).
"""

from .chunking import Chunk, chunk_document, pack_chunks, split_sentences
from .cleaning import CleanPolicy, clean_text
from .corpus import (
    CorpusStats,
    DocKind,
    RawDocument,
    compute_stats,
    ingest_stream,
    read_documents,
    split_validation,
    write_documents,
)
from .errors import LexprepError
from .langid import (
    LanguageProfile,
    LanguageVerdict,
    builtin_profiles,
    filter_spanish,
    gate,
    identify_language,
)
from .masking import (
    IGNORE_LABEL,
    MaskingConfig,
    MlmExample,
    apply_mask,
    mask_chunk,
    select_words,
)
from .metrics import (
    BenchmarkReport,
    LearningCurve,
    PredictionRecord,
    build_report,
    curve_auc,
    f1_scores,
    max_f1,
)
from .pipeline import PipelineManifest, run_pipeline
from .schedule import TrainConfig, effective_batch, emit_schedule, lr_at
from .tokenizers import Token, TokenizerInterface, VocabTokenizer

__version__ = "0.1.0"

__all__ = [
    "BenchmarkReport",
    "Chunk",
    "CleanPolicy",
    "CorpusStats",
    "DocKind",
    "IGNORE_LABEL",
    "LanguageProfile",
    "LanguageVerdict",
    "LearningCurve",
    "LexprepError",
    "MaskingConfig",
    "MlmExample",
    "PipelineManifest",
    "PredictionRecord",
    "RawDocument",
    "Token",
    "TokenizerInterface",
    "TrainConfig",
    "VocabTokenizer",
    "apply_mask",
    "build_report",
    "builtin_profiles",
    "chunk_document",
    "clean_text",
    "compute_stats",
    "curve_auc",
    "effective_batch",
    "emit_schedule",
    "f1_scores",
    "filter_spanish",
    "gate",
    "identify_language",
    "ingest_stream",
    "lr_at",
    "mask_chunk",
    "max_f1",
    "pack_chunks",
    "read_documents",
    "select_words",
    "run_pipeline",
    "split_sentences",
    "split_validation",
    "write_documents",
]
