"""Datasets of labeled/unlabeled multilingual texts: loading, splitting,
language-id tagging, mixing, and best-variant compilation."""

from __future__ import annotations

import dataclasses
import enum
import random
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Mapping, Sequence

# Languages with monolingual training data, in canonical order.
TASK_A_LANGUAGES: tuple[str, ...] = (
    "am", "dz", "ha", "ig", "kr", "ma", "pcm", "pt", "sw", "ts", "twi", "yo",
)
# Zero-shot evaluation languages: they never carry training data.
ZERO_SHOT_LANGUAGES: tuple[str, ...] = ("tg", "or")
KNOWN_LANGUAGES: tuple[str, ...] = TASK_A_LANGUAGES + ZERO_SHOT_LANGUAGES
# Sentinel for multilingual inference where no language id is available.
UNKNOWN_LANGUAGE = "unknown"

_TAG_PREFIX_RE = re.compile(r"^\[(%s)\] " % "|".join(KNOWN_LANGUAGES))


def language_tag(code: str) -> str:
    """Single-token language-id marker prepended to tagged sentences."""
    if code not in KNOWN_LANGUAGES:
        raise ValueError(f"no language tag for {code!r}")
    return f"[{code}]"


def validate_language(code: str) -> str:
    if code not in KNOWN_LANGUAGES and code != UNKNOWN_LANGUAGE:
        raise ValueError(
            f"unknown language code {code!r}; expected one of "
            f"{', '.join(KNOWN_LANGUAGES)} or {UNKNOWN_LANGUAGE!r}"
        )
    return code


class SentimentLabel(enum.Enum):
    NEGATIVE = "negative"
    NEUTRAL = "neutral"
    POSITIVE = "positive"

    @classmethod
    def parse(cls, value: str) -> "SentimentLabel":
        try:
            return cls(value.strip().lower())
        except ValueError:
            raise ValueError(f"unknown sentiment label {value!r}") from None

    def __str__(self) -> str:
        return self.value


# Canonical class order; also the classifier's output index order.
LABELS: tuple[SentimentLabel, ...] = (
    SentimentLabel.NEGATIVE,
    SentimentLabel.NEUTRAL,
    SentimentLabel.POSITIVE,
)
LABEL_RANK: dict[SentimentLabel, int] = {lab: i for i, lab in enumerate(LABELS)}


class DatasetVariant(enum.Enum):
    CLEAN = "clean"
    CLEAN_PLUS_DICT = "clean+dict"
    CLEAN_PLUS_MT = "clean+mt"
    CLEAN_PLUS_BOTH = "clean+both"
    BEST = "best"

    @classmethod
    def parse(cls, value: str) -> "DatasetVariant":
        key = value.strip().lower().replace(" ", "")
        aliases = {
            "clean": cls.CLEAN,
            "clean+dict": cls.CLEAN_PLUS_DICT,
            "clean+dictionary-based": cls.CLEAN_PLUS_DICT,
            "clean+mt": cls.CLEAN_PLUS_MT,
            "clean+mt-based": cls.CLEAN_PLUS_MT,
            "clean+both": cls.CLEAN_PLUS_BOTH,
            "best": cls.BEST,
        }
        if key not in aliases:
            raise ValueError(f"unknown dataset variant {value!r}")
        return aliases[key]

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Example:
    """One text with optional sentiment label and a language code."""

    id: str
    text: str
    label: SentimentLabel | None
    language: str

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError(f"example {self.id!r} has empty text")
        validate_language(self.language)


@dataclass(frozen=True)
class Dataset:
    examples: tuple[Example, ...]
    variant: DatasetVariant = DatasetVariant.CLEAN
    tagged: bool = False

    def __post_init__(self) -> None:
        labeled = [ex.label is not None for ex in self.examples]
        if any(labeled) and not all(labeled):
            raise ValueError("dataset mixes labeled and unlabeled examples")
        for ex in self.examples:
            if self.tagged:
                want = language_tag(ex.language) + " "
                if not ex.text.startswith(want):
                    raise ValueError(
                        f"tagged dataset: example {ex.id!r} does not start "
                        f"with {want!r}"
                    )
            elif _TAG_PREFIX_RE.match(ex.text):
                raise ValueError(
                    f"untagged dataset: example {ex.id!r} starts with a "
                    "language tag"
                )

    def __len__(self) -> int:
        return len(self.examples)

    def __iter__(self) -> Iterator[Example]:
        return iter(self.examples)

    def __getitem__(self, i: int) -> Example:
        return self.examples[i]

    @property
    def labeled(self) -> bool:
        return bool(self.examples) and self.examples[0].label is not None

    def languages(self) -> tuple[str, ...]:
        return tuple(sorted({ex.language for ex in self.examples}))


@dataclass(frozen=True)
class DevScoreTable:
    """Dev-set weighted-F1 scores per (language, variant); entries optional."""

    scores: Mapping[tuple[str, DatasetVariant], float]

    def __post_init__(self) -> None:
        for (lang, variant), score in self.scores.items():
            validate_language(lang)
            if variant is DatasetVariant.BEST:
                raise ValueError("dev score table cannot contain the compiled best variant")
            if not 0.0 <= score <= 100.0:
                raise ValueError(f"score {score} for ({lang}, {variant}) outside [0, 100]")

    def for_language(self, lang: str) -> dict[DatasetVariant, float]:
        return {v: s for (code, v), s in self.scores.items() if code == lang}


def load_tsv(
    path: str | Path,
    has_labels: bool,
    language: str,
    id_col: str = "id",
    text_col: str = "text",
    label_col: str = "label",
    variant: DatasetVariant = DatasetVariant.CLEAN,
) -> Dataset:
    """Read a header-first TSV of examples.

    Column names are taken from the header row. If every row's text starts
    with a language tag ("[am] ..."), the dataset is loaded as tagged and
    each example's language comes from its tag; otherwise `language` applies
    to all rows.
    """
    validate_language(language)
    lines = Path(path).read_text(encoding="utf-8").split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ValueError(f"{path}: empty file, expected a header row")
    header = lines[0].rstrip("\r").split("\t")
    try:
        id_idx = header.index(id_col)
        text_idx = header.index(text_col)
    except ValueError:
        raise ValueError(
            f"{path}: header {header} is missing column "
            f"{id_col!r} or {text_col!r}"
        ) from None
    label_idx = None
    if has_labels:
        try:
            label_idx = header.index(label_col)
        except ValueError:
            raise ValueError(f"{path}: header {header} is missing column {label_col!r}") from None

    examples = []
    tag_hits = 0
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.rstrip("\r").split("\t")
        if len(fields) != len(header):
            raise ValueError(
                f"{path} line {lineno}: expected {len(header)} columns, got {len(fields)}"
            )
        text = fields[text_idx]
        if not text:
            raise ValueError(f"{path} line {lineno}: empty text")
        label = None
        if label_idx is not None:
            try:
                label = SentimentLabel.parse(fields[label_idx])
            except ValueError as exc:
                raise ValueError(f"{path} line {lineno}: {exc}") from None
        m = _TAG_PREFIX_RE.match(text)
        if m:
            tag_hits += 1
            lang = m.group(1)
        else:
            lang = language
        examples.append(Example(id=fields[id_idx], text=text, label=label, language=lang))

    if 0 < tag_hits < len(examples):
        raise ValueError(f"{path}: {tag_hits} of {len(examples)} rows carry a language tag; expected all or none")
    tagged = tag_hits > 0 and tag_hits == len(examples)
    return Dataset(examples=tuple(examples), variant=variant, tagged=tagged)


def save_tsv(ds: Dataset, path: str | Path) -> None:
    """Write a dataset as header-first TSV (label column only when labeled)."""
    rows = ["id\ttext\tlabel" if ds.labeled else "id\ttext"]
    for ex in ds:
        for field in (ex.id, ex.text):
            if "\t" in field or "\n" in field:
                raise ValueError(f"example {ex.id!r}: field contains a tab or newline")
        if ds.labeled:
            rows.append(f"{ex.id}\t{ex.text}\t{ex.label}")
        else:
            rows.append(f"{ex.id}\t{ex.text}")
    Path(path).write_text("\n".join(rows) + "\n", encoding="utf-8")


def split_dataset(
    ds: Dataset, ratios: tuple[float, float, float], seed: int
) -> tuple[Dataset, Dataset, Dataset]:
    """Deterministic shuffle-then-slice split.

    First two part sizes are floored; the remainder goes to the third part.
    """
    if len(ds) == 0:
        raise ValueError("cannot split an empty dataset")
    if len(ratios) != 3:
        raise ValueError("expected exactly three ratios")
    if any(r < 0 for r in ratios):
        raise ValueError("ratios must be nonnegative")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios sum to {sum(ratios)}, expected 1")
    order = list(ds.examples)
    random.Random(seed).shuffle(order)
    n = len(order)
    n1 = int(n * ratios[0])
    n2 = int(n * ratios[1])
    parts = (order[:n1], order[n1 : n1 + n2], order[n1 + n2 :])
    return tuple(
        Dataset(examples=tuple(part), variant=ds.variant, tagged=ds.tagged) for part in parts
    )


def tag_dataset(ds: Dataset) -> Dataset:
    """Prepend each example's language-id token to its text."""
    if ds.tagged:
        raise ValueError("dataset is already tagged")
    tagged = []
    for ex in ds:
        if ex.language == UNKNOWN_LANGUAGE:
            raise ValueError(f"example {ex.id!r} has unknown language; cannot tag")
        tagged.append(dataclasses.replace(ex, text=f"{language_tag(ex.language)} {ex.text}"))
    return Dataset(examples=tuple(tagged), variant=ds.variant, tagged=True)


def concat_shuffle(parts: Sequence[Dataset], seed: int) -> Dataset:
    """Concatenate datasets and deterministically shuffle the result.

    All parts must agree on the tagged flag. The variant is kept when the
    parts agree on it; a mixture compiles to the best-combination variant.
    """
    if not parts:
        return Dataset(examples=(), variant=DatasetVariant.CLEAN, tagged=False)
    tagged_flags = {p.tagged for p in parts}
    if len(tagged_flags) > 1:
        raise ValueError("cannot concatenate tagged with untagged datasets")
    variants = {p.variant for p in parts}
    variant = variants.pop() if len(variants) == 1 else DatasetVariant.BEST
    merged = [ex for p in parts for ex in p]
    random.Random(seed).shuffle(merged)
    return Dataset(examples=tuple(merged), variant=variant, tagged=tagged_flags.pop())


# Tie-break preference: augmented variants beat Clean; among augmented ones
# dictionary-based beats MT-based beats the combination.
_TIE_PREFERENCE = {
    DatasetVariant.CLEAN_PLUS_DICT: 3,
    DatasetVariant.CLEAN_PLUS_MT: 2,
    DatasetVariant.CLEAN_PLUS_BOTH: 1,
    DatasetVariant.CLEAN: 0,
}


def compile_best(table: DevScoreTable) -> dict[str, DatasetVariant]:
    """Pick the highest-scoring variant per language from dev scores."""
    mapping: dict[str, DatasetVariant] = {}
    for lang in TASK_A_LANGUAGES:
        entries = table.for_language(lang)
        if not entries:
            raise ValueError(f"no dev scores for language {lang!r}")
        mapping[lang] = max(entries, key=lambda v: (entries[v], _TIE_PREFERENCE[v]))
    return mapping


def load_dev_scores(path: str | Path) -> DevScoreTable:
    """Read a (language, variant, score) TSV with a header row."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValueError(f"{path}: empty file, expected a header row")
    scores: dict[tuple[str, DatasetVariant], float] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        if len(fields) != 3:
            raise ValueError(f"{path} line {lineno}: expected 3 columns, got {len(fields)}")
        lang, variant_s, score_s = fields
        try:
            score = float(score_s)
        except ValueError:
            raise ValueError(f"{path} line {lineno}: bad score {score_s!r}") from None
        scores[(validate_language(lang), DatasetVariant.parse(variant_s))] = score
    return DevScoreTable(scores=scores)


def save_best_mapping(mapping: Mapping[str, DatasetVariant], path: str | Path) -> None:
    rows = ["language\tvariant"]
    rows += [f"{lang}\t{mapping[lang]}" for lang in TASK_A_LANGUAGES if lang in mapping]
    Path(path).write_text("\n".join(rows) + "\n", encoding="utf-8")
