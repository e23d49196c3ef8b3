"""Weighted-F1 scoring, leaderboard macro-averaging, and majority-vote
ensembling with seeded tie-breaks."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .corpus import LABELS, SentimentLabel


@dataclass(frozen=True)
class PredictionSet:
    """One model's labels, aligned to the evaluated dataset's order."""

    model_id: str
    labels: tuple[SentimentLabel, ...]


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    """Per-class metrics in percent, plus support-weighted F1."""

    per_class: Mapping[SentimentLabel, ClassMetrics]
    weighted_f1: float
    total: int

    def __post_init__(self) -> None:
        supports = 0
        for m in self.per_class.values():
            supports += m.support
            for score in (m.precision, m.recall, m.f1):
                if not 0.0 <= score <= 100.0:
                    raise ValueError(f"score {score} outside [0, 100]")
        if supports != self.total or not 0.0 <= self.weighted_f1 <= 100.0:
            raise ValueError("inconsistent evaluation report")

    def render_lines(self) -> list[str]:
        lines = []
        for label in LABELS:
            m = self.per_class[label]
            lines.append(f"{label}\t{m.precision:.1f}\t{m.recall:.1f}\t{m.f1:.1f}\t{m.support}")
        lines.append(f"weighted_f1\t\t\t{self.weighted_f1:.1f}\t{self.total}")
        return lines


def weighted_f1(
    gold: Sequence[SentimentLabel], pred: Sequence[SentimentLabel]
) -> EvalReport:
    """Per-class precision/recall/F1 and support-weighted F1, in percent.

    Empty denominators score 0 rather than raising, so degenerate
    predictions still evaluate.
    """
    if len(gold) != len(pred):
        raise ValueError(f"gold has {len(gold)} labels but predictions have {len(pred)}")
    if not gold:
        raise ValueError("cannot evaluate zero examples")
    per_class = {}
    weighted = 0.0
    n = len(gold)
    for label in LABELS:
        tp = sum(1 for g, p in zip(gold, pred) if g == label and p == label)
        fp = sum(1 for g, p in zip(gold, pred) if g != label and p == label)
        fn = sum(1 for g, p in zip(gold, pred) if g == label and p != label)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        support = tp + fn
        per_class[label] = ClassMetrics(
            precision=100.0 * precision, recall=100.0 * recall, f1=100.0 * f1, support=support
        )
        weighted += (support / n) * f1
    return EvalReport(per_class=per_class, weighted_f1=100.0 * weighted, total=n)


def macro_average(track_scores: Sequence[float]) -> float:
    """Unweighted mean of per-track scores (reported to two decimals)."""
    if not track_scores:
        raise ValueError("cannot average zero track scores")
    return float(sum(track_scores)) / len(track_scores)


def majority_vote(preds: Sequence[PredictionSet], seed: int) -> tuple[SentimentLabel, ...]:
    """Modal label per position across prediction sets.

    Ties draw uniformly from the tied labels with a generator seeded from
    (seed, position), so each position's outcome is reproducible and
    independent of how many positions precede it.
    """
    if not preds:
        raise ValueError("need at least one prediction set")
    lengths = {len(p.labels) for p in preds}
    if len(lengths) != 1:
        raise ValueError(f"prediction sets disagree on length: {sorted(lengths)}")
    out = []
    for pos in range(lengths.pop()):
        votes = Counter(p.labels[pos] for p in preds)
        top = max(votes.values())
        tied = [label for label in LABELS if votes.get(label, 0) == top]
        if len(tied) == 1:
            out.append(tied[0])
        else:
            rng = np.random.default_rng([seed, pos])
            out.append(tied[int(rng.integers(len(tied)))])
    return tuple(out)


def write_predictions(
    path: str | Path, ids: Sequence[str], labels: Sequence[SentimentLabel]
) -> None:
    if len(ids) != len(labels):
        raise ValueError("ids and labels differ in length")
    rows = ["id\tlabel"] + [f"{i}\t{lab}" for i, lab in zip(ids, labels)]
    Path(path).write_text("\n".join(rows) + "\n", encoding="utf-8")


def read_predictions(path: str | Path) -> tuple[tuple[str, ...], tuple[SentimentLabel, ...]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].split("\t") != ["id", "label"]:
        raise ValueError(f"{path}: expected an 'id<TAB>label' header")
    ids, labels = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        if len(fields) != 2:
            raise ValueError(f"{path} line {lineno}: expected 2 columns, got {len(fields)}")
        ids.append(fields[0])
        try:
            labels.append(SentimentLabel.parse(fields[1]))
        except ValueError as exc:
            raise ValueError(f"{path} line {lineno}: {exc}") from None
    return tuple(ids), tuple(labels)


def write_report(
    path: str | Path, tracks: Sequence[tuple[str, EvalReport]], macro: float | None = None
) -> None:
    """Write per-class rows plus summary rows as TSV.

    Single-track reports use (class, precision, recall, f1, support)
    columns; multi-track reports prepend a track column and append the
    macro-average row.
    """
    if not tracks:
        raise ValueError("no evaluation results to write")
    lines: list[str] = []
    if len(tracks) == 1:
        lines.append("class\tprecision\trecall\tf1\tsupport")
        lines.extend(tracks[0][1].render_lines())
    else:
        lines.append("track\tclass\tprecision\trecall\tf1\tsupport")
        for name, report in tracks:
            lines.extend(f"{name}\t{row}" for row in report.render_lines())
        if macro is not None:
            lines.append(f"all\tmacro_average\t\t\t{macro:.2f}\t")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
