"""Data augmentation: dictionary-based code-mixing over scored English
sentences, and ingestion of machine-translated sentence files."""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .corpus import (
    TASK_A_LANGUAGES,
    Dataset,
    DatasetVariant,
    Example,
    SentimentLabel,
    concat_shuffle,
    validate_language,
)

# Languages the offline translation source covers. The remaining Task-A
# languages (twi, pt, pcm, ma, dz) have no MT-augmented data.
MT_SUPPORTED_LANGUAGES: frozenset[str] = frozenset({"am", "ha", "ig", "kr", "sw", "ts", "yo"})

_WS_SPLIT_RE = re.compile(r"(\s+)")


@dataclass(frozen=True)
class BilingualDictionary:
    """English-to-target word map; lookups are case-insensitive."""

    language: str
    entries: dict[str, tuple[str, ...]]

    def __post_init__(self) -> None:
        validate_language(self.language)
        for word, translations in self.entries.items():
            if not word or word != word.lower():
                raise ValueError(f"dictionary key {word!r} must be non-empty lowercase")
            if not translations or any(not t for t in translations):
                raise ValueError(f"dictionary entry {word!r} has an empty translation")

    def lookup(self, word: str) -> str | None:
        """First-listed translation for a word, or None."""
        translations = self.entries.get(word.lower())
        return translations[0] if translations else None


@dataclass(frozen=True)
class ScoredSentence:
    text: str
    score: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"sentiment score {self.score} outside [0, 1]")


@dataclass(frozen=True)
class AugmentConfig:
    neg_threshold: float = 0.35
    pos_threshold: float = 0.65

    def __post_init__(self) -> None:
        if not 0.0 < self.neg_threshold < self.pos_threshold < 1.0:
            raise ValueError("thresholds must satisfy 0 < neg < pos < 1")


def label_sst(score: float, cfg: AugmentConfig = AugmentConfig()) -> SentimentLabel:
    """Map a [0, 1] sentiment score to a label.

    Scores at most neg_threshold are negative, scores at least pos_threshold
    are positive, and everything in between is neutral.
    """
    if not 0.0 <= score <= 1.0:
        raise ValueError(f"sentiment score {score} outside [0, 1]")
    if score <= cfg.neg_threshold:
        return SentimentLabel.NEGATIVE
    if score >= cfg.pos_threshold:
        return SentimentLabel.POSITIVE
    return SentimentLabel.NEUTRAL


def _split_core(token: str) -> tuple[str, str, str]:
    # Leading/trailing punctuation (Unicode category P) around the token.
    start, end = 0, len(token)
    while start < end and unicodedata.category(token[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(token[end - 1]).startswith("P"):
        end -= 1
    return token[:start], token[start:end], token[end:]


def dict_translate(sentence: str, dictionary: BilingualDictionary) -> str:
    """Replace every word whose lowercased core is in the dictionary.

    Punctuation around a word and all whitespace are kept as-is, so a
    sentence with no dictionary hits comes back unchanged.
    """
    chunks = _WS_SPLIT_RE.split(sentence)
    out = []
    for chunk in chunks:
        if not chunk or chunk.isspace():
            out.append(chunk)
            continue
        prefix, core, suffix = _split_core(chunk)
        translation = dictionary.lookup(core) if core else None
        out.append(chunk if translation is None else prefix + translation + suffix)
    return "".join(out)


def build_dict_augmented(
    sst: Sequence[ScoredSentence],
    dictionary: BilingualDictionary,
    cfg: AugmentConfig = AugmentConfig(),
) -> Dataset:
    """Word-to-word translate scored sentences into labeled training data.

    Untranslated words stay English, which deliberately produces code-mixed
    text; morphology and word order are left naive on purpose.
    """
    if dictionary.language not in TASK_A_LANGUAGES:
        raise ValueError(
            f"dictionary language {dictionary.language!r} has no training track"
        )
    examples = tuple(
        Example(
            id=f"dict-{dictionary.language}-{i}",
            text=dict_translate(s.text, dictionary),
            label=label_sst(s.score, cfg),
            language=dictionary.language,
        )
        for i, s in enumerate(sst)
    )
    return Dataset(examples=examples, variant=DatasetVariant.CLEAN_PLUS_DICT, tagged=False)


def load_dictionary(path: str | Path, language: str) -> BilingualDictionary:
    """Read a two-column (english, translation) TSV without a header.

    Repeated source words accumulate translations; the first row wins at
    lookup time.
    """
    entries: dict[str, tuple[str, ...]] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise ValueError(f"{path} line {lineno}: expected 2 columns, got {len(fields)}")
        word, translation = fields[0].strip().lower(), fields[1].strip()
        if not word or not translation:
            raise ValueError(f"{path} line {lineno}: empty word or translation")
        entries[word] = entries.get(word, ()) + (translation,)
    return BilingualDictionary(language=language, entries=entries)


def load_scored_sentences(path: str | Path) -> list[ScoredSentence]:
    """Read a two-column (sentence, score) TSV without a header."""
    sentences = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise ValueError(f"{path} line {lineno}: expected 2 columns, got {len(fields)}")
        try:
            score = float(fields[1])
        except ValueError:
            raise ValueError(f"{path} line {lineno}: bad score {fields[1]!r}") from None
        try:
            sentences.append(ScoredSentence(text=fields[0], score=score))
        except ValueError as exc:
            raise ValueError(f"{path} line {lineno}: {exc}") from None
    return sentences


def load_mt_augmented(path: str | Path, language: str) -> Dataset:
    """Read pre-translated (text, label) rows for an MT-covered language."""
    validate_language(language)
    if language not in MT_SUPPORTED_LANGUAGES:
        raise ValueError(
            f"no MT augmentation for {language!r}; supported languages: "
            f"{', '.join(sorted(MT_SUPPORTED_LANGUAGES))}"
        )
    examples = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise ValueError(f"{path} line {lineno}: expected 2 columns, got {len(fields)}")
        try:
            label = SentimentLabel.parse(fields[1])
        except ValueError as exc:
            raise ValueError(f"{path} line {lineno}: {exc}") from None
        examples.append(
            Example(id=f"mt-{language}-{lineno}", text=fields[0], label=label, language=language)
        )
    return Dataset(examples=tuple(examples), variant=DatasetVariant.CLEAN_PLUS_MT, tagged=False)


def build_variant(
    clean: Dataset,
    dict_aug: Dataset | None,
    mt_aug: Dataset | None,
    variant: DatasetVariant,
    seed: int,
) -> Dataset:
    """Mix the clean data with the augmentation sources a variant calls for."""
    required = {
        DatasetVariant.CLEAN: (),
        DatasetVariant.CLEAN_PLUS_DICT: ("dict_aug",),
        DatasetVariant.CLEAN_PLUS_MT: ("mt_aug",),
        DatasetVariant.CLEAN_PLUS_BOTH: ("dict_aug", "mt_aug"),
    }
    if variant not in required:
        raise ValueError("the best-combination dataset is compiled per language, not built here")
    parts = [clean]
    available = {"dict_aug": dict_aug, "mt_aug": mt_aug}
    for name in required[variant]:
        if available[name] is None:
            raise ValueError(f"variant {variant} requires the {name} dataset")
        parts.append(available[name])
    mixed = concat_shuffle(parts, seed)
    return Dataset(examples=mixed.examples, variant=variant, tagged=mixed.tagged)
