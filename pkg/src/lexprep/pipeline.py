"""Manifest-driven composition of the corpus stages.

A manifest file names the input, the output directory, and an ordered
subset of stages (filter-lang, clean, chunk, mask) with their settings,
so a full preparation run is a single auditable artifact. Stages execute
sequentially and each stage's output is fully materialized (one numbered
file per stage) before the next begins, which keeps the per-stage tallies
in the summary exact. Re-running a manifest over the same input writes
byte-identical files.
"""

from __future__ import annotations

import json
import shutil
from dataclasses import dataclass, field, replace
from pathlib import Path

from .chunking import DEFAULT_MAX_TOKENS, chunk_document, chunk_from_record
from .cleaning import CleanPolicy, clean_text
from .corpus import compute_stats, document_to_line, read_documents
from .errors import ManifestError, StageFailure
from .langid import (
    DEFAULT_THRESHOLD,
    builtin_profiles,
    gate,
    load_profiles,
)
from .masking import IGNORE_LABEL, MaskingConfig, mask_chunk
from .tokenizers import VocabTokenizer

STAGE_NAMES = ("filter-lang", "clean", "chunk", "mask")
_DOC_STAGES = ("filter-lang", "clean")

SUMMARY_NAME = "summary.json"


def validate_stages(stages: tuple[str, ...]) -> None:
    """Check stage names, uniqueness, and ordering dependencies.

    Document-level stages must precede chunk (their input is documents);
    mask consumes chunks, so it requires chunk and must follow it.
    """
    for name in stages:
        if name not in STAGE_NAMES:
            raise ManifestError(
                f"unknown stage {name!r}; expected a subset of {STAGE_NAMES}"
            )
    if len(set(stages)) != len(stages):
        raise ManifestError(f"stages listed twice in {stages}")
    if "chunk" in stages:
        chunk_at = stages.index("chunk")
        for name in _DOC_STAGES:
            if name in stages and stages.index(name) > chunk_at:
                raise ManifestError(f"stage {name!r} must come before 'chunk'")
    if "mask" in stages:
        if "chunk" not in stages:
            raise ManifestError("stage 'mask' requires 'chunk' before it")
        if stages.index("mask") < stages.index("chunk"):
            raise ManifestError("stage 'mask' must come after 'chunk'")


@dataclass(frozen=True)
class PipelineManifest:
    """Everything that determines a run: input, stages, settings, seed."""

    input_path: Path
    output_dir: Path
    stages: tuple[str, ...]
    seed: int = 0
    language: str = "es"
    threshold: float = DEFAULT_THRESHOLD
    profiles_path: Path | None = None
    clean_policy: CleanPolicy = field(default=CleanPolicy())
    max_tokens: int = DEFAULT_MAX_TOKENS
    tokenizer_path: Path | None = None
    masking: MaskingConfig = field(default=MaskingConfig())

    def __post_init__(self):
        validate_stages(self.stages)

    @classmethod
    def from_record(cls, record: dict, base: Path | None = None) -> "PipelineManifest":
        """Build a manifest from its JSON record.

        Relative paths resolve against `base` (the manifest's directory),
        so a manifest stays valid wherever it is invoked from. Unknown
        keys are rejected: a typo must not silently change a run.
        """

        def resolve(value: str | None) -> Path | None:
            if value is None:
                return None
            path = Path(value)
            if base is not None and not path.is_absolute():
                path = base / path
            return path

        known = {"input_path", "output_dir", "stages", "seed", *STAGE_NAMES}
        unknown = set(record) - known
        if unknown:
            raise ManifestError(f"unknown manifest keys: {sorted(unknown)}")
        try:
            input_path = resolve(record["input_path"])
            output_dir = resolve(record["output_dir"])
            stages = tuple(record["stages"])
        except KeyError as exc:
            raise ManifestError(f"manifest is missing required key {exc}") from exc
        seed = int(record.get("seed", 0))

        lang_cfg = dict(record.get("filter-lang", {}))
        clean_cfg = dict(record.get("clean", {}))
        chunk_cfg = dict(record.get("chunk", {}))
        mask_cfg = dict(record.get("mask", {}))
        try:
            manifest = cls(
                input_path=input_path,
                output_dir=output_dir,
                stages=stages,
                seed=seed,
                language=lang_cfg.pop("language", "es"),
                threshold=float(lang_cfg.pop("threshold", DEFAULT_THRESHOLD)),
                profiles_path=resolve(lang_cfg.pop("profiles", None)),
                clean_policy=CleanPolicy(**clean_cfg),
                max_tokens=int(chunk_cfg.pop("max_tokens", DEFAULT_MAX_TOKENS)),
                tokenizer_path=resolve(chunk_cfg.pop("tokenizer", None)),
                masking=MaskingConfig(seed=seed, **mask_cfg),
            )
        except (TypeError, ValueError) as exc:
            raise ManifestError(f"bad manifest settings: {exc}") from exc
        if lang_cfg:
            raise ManifestError(f"unknown filter-lang settings: {sorted(lang_cfg)}")
        if chunk_cfg:
            raise ManifestError(f"unknown chunk settings: {sorted(chunk_cfg)}")
        return manifest

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineManifest":
        path = Path(path)
        try:
            record = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ManifestError(f"{path} is not valid JSON: {exc}") from exc
        if not isinstance(record, dict):
            raise ManifestError(f"{path} must hold a JSON object")
        return cls.from_record(record, base=path.parent)


def _stage_filter_lang(
    manifest: PipelineManifest, in_path: Path, out_path: Path, rej_path: Path, strict: bool
) -> dict:
    if manifest.profiles_path is not None:
        profiles = load_profiles(manifest.profiles_path)
    else:
        profiles = list(builtin_profiles())
    kept = rejected = 0
    with open(out_path, "w", encoding="utf-8") as out_handle, open(
        rej_path, "w", encoding="utf-8"
    ) as rej_handle:
        for doc in read_documents(in_path, strict=strict):
            ok, verdict = gate(
                doc.text,
                profiles,
                language=manifest.language,
                threshold=manifest.threshold,
            )
            if ok:
                out_handle.write(document_to_line(doc) + "\n")
                kept += 1
            else:
                record = doc.to_record()
                record["verdict_language"] = verdict.language
                record["verdict_confidence"] = round(verdict.confidence, 6)
                rej_handle.write(json.dumps(record, ensure_ascii=False) + "\n")
                rejected += 1
    return {"in": kept + rejected, "out": kept, "rejected": rejected}


def _stage_clean(
    manifest: PipelineManifest, in_path: Path, out_path: Path, rej_path: Path, strict: bool
) -> dict:
    count = 0
    with open(out_path, "w", encoding="utf-8") as out_handle:
        for doc in read_documents(in_path, strict=strict):
            cleaned = doc.replace_text(clean_text(doc.text, manifest.clean_policy))
            out_handle.write(document_to_line(cleaned) + "\n")
            count += 1
    rej_path.write_text("", encoding="utf-8")
    return {"in": count, "out": count, "rejected": 0}


def _stage_chunk(
    manifest: PipelineManifest, in_path: Path, out_path: Path, rej_path: Path, strict: bool
) -> dict:
    tokenizer = _load_tokenizer(manifest)
    docs = chunks = rejected = tokens_total = 0
    with open(out_path, "w", encoding="utf-8") as out_handle, open(
        rej_path, "w", encoding="utf-8"
    ) as rej_handle:
        for doc in read_documents(in_path, strict=strict):
            docs += 1
            produced = chunk_document(doc, tokenizer, max_tokens=manifest.max_tokens)
            if not produced:
                record = doc.to_record()
                record["reject_reason"] = "no sentences to pack"
                rej_handle.write(json.dumps(record, ensure_ascii=False) + "\n")
                rejected += 1
                continue
            for chunk in produced:
                out_handle.write(
                    json.dumps(chunk.to_record(), ensure_ascii=False) + "\n"
                )
                chunks += 1
                tokens_total += chunk.token_count
    return {
        "in": docs,
        "out": chunks,
        "rejected": rejected,
        "tokens_total": tokens_total,
    }


def _stage_mask(
    manifest: PipelineManifest, in_path: Path, out_path: Path, rej_path: Path, strict: bool
) -> dict:
    tokenizer = _load_tokenizer(manifest)
    config = replace(manifest.masking, seed=manifest.seed)
    rej_path.write_text("", encoding="utf-8")
    examples = masked_positions = 0
    with open(in_path, encoding="utf-8") as in_handle, open(
        out_path, "w", encoding="utf-8"
    ) as out_handle:
        for line in in_handle:
            if not line.strip():
                continue
            chunk = chunk_from_record(json.loads(line), tokenizer)
            example = mask_chunk(chunk, tokenizer, config)
            out_handle.write(json.dumps(example.to_record(), ensure_ascii=False) + "\n")
            examples += 1
            masked_positions += sum(
                1 for label in example.labels if label != IGNORE_LABEL
            )
    return {
        "in": examples,
        "out": examples,
        "rejected": 0,
        "masked_positions": masked_positions,
    }


_STAGE_RUNNERS = {
    "filter-lang": _stage_filter_lang,
    "clean": _stage_clean,
    "chunk": _stage_chunk,
    "mask": _stage_mask,
}


def _load_tokenizer(manifest: PipelineManifest) -> VocabTokenizer:
    if manifest.tokenizer_path is not None:
        return VocabTokenizer.from_file(manifest.tokenizer_path)
    return VocabTokenizer()


def run_pipeline(manifest: PipelineManifest, strict: bool = False) -> dict:
    """Execute the manifest and return (and persist) the run summary.

    Every stage writes `NN-<name>.jsonl` plus `NN-<name>.rejected.jsonl`
    in the output directory; the summary records in/out/rejected per
    stage and corpus stats before and after the document-level stages.
    With zero stages the input is copied through unchanged.
    """
    manifest.output_dir.mkdir(parents=True, exist_ok=True)
    stats_before = compute_stats(read_documents(manifest.input_path, strict=strict))

    stage_reports = []
    current = manifest.input_path
    last_doc_output = manifest.input_path
    for index, name in enumerate(manifest.stages, start=1):
        out_path = manifest.output_dir / f"{index:02d}-{name}.jsonl"
        rej_path = manifest.output_dir / f"{index:02d}-{name}.rejected.jsonl"
        runner = _STAGE_RUNNERS[name]
        try:
            tallies = runner(manifest, current, out_path, rej_path, strict)
        except StageFailure:
            raise
        except Exception as exc:
            raise StageFailure(name, exc) from exc
        stage_reports.append(
            {"name": name, "output": out_path.name, **tallies}
        )
        current = out_path
        if name in _DOC_STAGES:
            last_doc_output = out_path

    if not manifest.stages:
        current = manifest.output_dir / "00-input.jsonl"
        shutil.copyfile(manifest.input_path, current)
        stage_reports = []

    if last_doc_output == manifest.input_path:
        stats_after = stats_before
    else:
        stats_after = compute_stats(read_documents(last_doc_output, strict=strict))

    summary = {
        "input_path": str(manifest.input_path),
        "seed": manifest.seed,
        "documents_in": stats_before.document_count,
        "stages": stage_reports,
        "stats_before": stats_before.to_record(),
        "stats_after": stats_after.to_record(),
        "final_output": current.name,
    }
    summary_path = manifest.output_dir / SUMMARY_NAME
    summary_path.write_text(
        json.dumps(summary, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    return summary
