"""Adam training loops: joint masked-LM adapter-tuning routed through the
phylogeny tree, and frozen-backbone task fine-tuning."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field as dataclasses_field
from typing import Mapping, Sequence

import numpy as np

from .corpus import LABEL_RANK, ZERO_SHOT_LANGUAGES, Dataset
from .model import CLS_ID, FIRST_CORPUS_ID, MASK_ID, PAD_ID, EncoderModel, encode, pad_batch
from .phylogeny import AdapterStack, PhylogenyTree, phylogeny_path

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-4
    epochs: int = 5
    batch_size: int = 32
    seed: int = 0
    mask_ratio: float = 0.15
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not 0.0 < self.mask_ratio < 1.0:
            raise ValueError("mask_ratio must be in (0, 1)")
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be at least 1")


@dataclass(frozen=True)
class TrainReport:
    epoch_losses: tuple[float, ...]
    updated: tuple[str, ...]
    step_count: int
    duration_seconds: float
    # Adam update count per parameter; parameters outside the trained
    # selector never appear here.
    step_counts: Mapping[str, int] = dataclasses_field(default_factory=dict)

    def __post_init__(self) -> None:
        if any(not np.isfinite(x) for x in self.epoch_losses):
            raise ValueError("training produced a non-finite epoch loss")


def adam_step(
    params: Mapping[str, np.ndarray],
    grads: Mapping[str, np.ndarray],
    state: dict[str, dict[str, np.ndarray]],
    t: int,
    cfg: TrainConfig,
) -> None:
    """One bias-corrected Adam update, in place, on a named parameter view.

    `state` holds first/second moment arrays per name and is created lazily;
    `t` is the 1-based step index used for bias correction.
    """
    if t < 1:
        raise ValueError("step index t must be at least 1")
    for name, param in params.items():
        grad = grads[name]
        if grad.shape != param.shape:
            raise ValueError(f"gradient shape {grad.shape} != parameter shape {param.shape} for {name}")
        if not np.all(np.isfinite(grad)):
            raise ValueError(f"non-finite gradient for {name}")
        slot = state.setdefault(
            name, {"m": np.zeros_like(param), "v": np.zeros_like(param)}
        )
        slot["m"] = cfg.adam_beta1 * slot["m"] + (1.0 - cfg.adam_beta1) * grad
        slot["v"] = cfg.adam_beta2 * slot["v"] + (1.0 - cfg.adam_beta2) * grad * grad
        m_hat = slot["m"] / (1.0 - cfg.adam_beta1**t)
        v_hat = slot["v"] / (1.0 - cfg.adam_beta2**t)
        param -= cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.adam_eps)


class AdamOptimizer:
    """Adam with an independent step counter per parameter.

    Parameters updated only on some batches (a genus adapter, say) keep
    their own bias-correction clock; `step_counts` exposes how many updates
    each parameter received.
    """

    def __init__(self, cfg: TrainConfig):
        self.cfg = cfg
        self.state: dict[str, dict[str, np.ndarray]] = {}
        self.step_counts: dict[str, int] = {}

    def step(self, params: Mapping[str, np.ndarray], grads: Mapping[str, np.ndarray]) -> None:
        for name, param in params.items():
            t = self.step_counts.get(name, 0) + 1
            adam_step({name: param}, {name: grads[name]}, self.state, t, self.cfg)
            self.step_counts[name] = t


def _encode_dataset(model: EncoderModel, ds: Dataset) -> list[list[int]]:
    return [encode(model.vocab, ex.text, model.config.max_seq_len) for ex in ds]


def _mask_batch(ids: np.ndarray, rng: np.random.Generator, cfg: TrainConfig, vocab_size: int):
    """BERT-style corruption: of the chosen positions, 80% become [MASK],
    10% a random corpus token, 10% stay unchanged."""
    maskable = (ids != PAD_ID) & (ids != CLS_ID) & (ids != MASK_ID)
    select = maskable & (rng.random(ids.shape) < cfg.mask_ratio)
    if not select.any():
        rows, cols = np.nonzero(maskable)
        if rows.size == 0:
            raise ValueError("batch contains no maskable tokens")
        pick = int(rng.integers(rows.size))
        select = np.zeros_like(maskable)
        select[rows[pick], cols[pick]] = True
    action = rng.random(ids.shape)
    corrupted = ids.copy()
    corrupted[select & (action < 0.8)] = MASK_ID
    random_slots = select & (action >= 0.8) & (action < 0.9)
    n_random = int(random_slots.sum())
    if n_random and vocab_size > FIRST_CORPUS_ID:
        corrupted[random_slots] = rng.integers(FIRST_CORPUS_ID, vocab_size, size=n_random)
    return corrupted, select


def mlm_adapter_tune(
    model: EncoderModel,
    corpora: Mapping[str, Dataset],
    tree: PhylogenyTree,
    cfg: TrainConfig,
) -> TrainReport:
    """Train family/genus/language adapters with masked language modeling.

    Batches are monolingual and interleaved round-robin across languages.
    Each batch updates exactly the three adapters on its language's tree
    path; the backbone, both heads, and task adapters stay frozen.
    """
    start = time.monotonic()
    langs = sorted(corpora)
    if not langs:
        raise ValueError("no training corpora given")
    paths = {}
    for lang in langs:
        if lang not in tree:
            raise ValueError(f"language {lang!r} is not in the phylogeny tree")
        for ex in corpora[lang]:
            if ex.language != lang:
                raise ValueError(
                    f"corpus for {lang!r} contains an example in {ex.language!r}"
                )
        paths[lang] = phylogeny_path(tree, lang)
        for aid in paths[lang]:
            if not model.has_adapter(aid):
                model.register_adapter(aid)

    encoded = {lang: _encode_dataset(model, corpora[lang]) for lang in langs}
    if all(len(seqs) == 0 for seqs in encoded.values()):
        raise ValueError("all corpora are empty")

    rng = np.random.default_rng([cfg.seed, 1])
    optimizer = AdamOptimizer(cfg)
    epoch_losses = []
    steps = 0
    for epoch in range(1, cfg.epochs + 1):
        batches: dict[str, list[list[list[int]]]] = {}
        for lang in langs:
            seqs = encoded[lang]
            order = rng.permutation(len(seqs))
            batches[lang] = [
                [seqs[i] for i in order[s : s + cfg.batch_size]]
                for s in range(0, len(seqs), cfg.batch_size)
            ]
        losses = []
        rounds = max((len(b) for b in batches.values()), default=0)
        for r in range(rounds):
            for lang in langs:
                if r >= len(batches[lang]):
                    continue
                ids = pad_batch(batches[lang][r])
                corrupted, select = _mask_batch(ids, rng, cfg, len(model.vocab))
                loss, grads = model.loss_and_grads(
                    corrupted, paths[lang], "mlm", mlm_targets=ids, mlm_select=select
                )
                optimizer.step(model.trainable_params(adapter_ids=paths[lang]), grads)
                losses.append(loss)
                steps += 1
                logger.info("mlm epoch=%d step=%d lang=%s loss=%.6f", epoch, steps, lang, loss)
        epoch_losses.append(float(np.mean(losses)))
        logger.info("mlm epoch=%d mean_loss=%.6f", epoch, epoch_losses[-1])

    updated = sorted({aid.key for lang in langs for aid in paths[lang]})
    return TrainReport(
        epoch_losses=tuple(epoch_losses),
        updated=tuple(updated),
        step_count=steps,
        duration_seconds=time.monotonic() - start,
        step_counts=dict(optimizer.step_counts),
    )


def finetune_task(
    model: EncoderModel, ds: Dataset, stack: AdapterStack, cfg: TrainConfig
) -> TrainReport:
    """Train the task adapter and classification head on labeled data.

    Phylogeny adapters named by the stack stay active but frozen; they must
    already be registered. The task adapter is registered on first use.
    """
    start = time.monotonic()
    if len(ds) == 0:
        raise ValueError("cannot fine-tune on an empty dataset")
    for ex in ds:
        if ex.label is None:
            raise ValueError(f"unlabeled example {ex.id!r} in fine-tuning data")
        if ex.language in ZERO_SHOT_LANGUAGES:
            raise ValueError(f"zero-shot language {ex.language!r} cannot carry training data")
    task = stack.entries[-1]
    for aid in stack.without_task():
        if not model.has_adapter(aid):
            raise ValueError(
                f"adapter {aid.key!r} is not registered; run adapter-tuning first "
                "or use the task-only stack"
            )
    if not model.has_adapter(task):
        model.register_adapter(task)

    encoded = _encode_dataset(model, ds)
    targets = np.array([LABEL_RANK[ex.label] for ex in ds], dtype=np.int64)
    rng = np.random.default_rng([cfg.seed, 2])
    optimizer = AdamOptimizer(cfg)
    view = model.trainable_params(adapter_ids=[task], heads=["classifier"])

    epoch_losses = []
    steps = 0
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(len(encoded))
        losses = []
        for s in range(0, len(order), cfg.batch_size):
            pick = order[s : s + cfg.batch_size]
            ids = pad_batch([encoded[i] for i in pick])
            loss, grads = model.loss_and_grads(
                ids, stack, "classify", class_targets=targets[pick]
            )
            optimizer.step(view, grads)
            losses.append(loss)
            steps += 1
            logger.info("finetune epoch=%d step=%d loss=%.6f", epoch, steps, loss)
        epoch_losses.append(float(np.mean(losses)))
        logger.info("finetune epoch=%d mean_loss=%.6f", epoch, epoch_losses[-1])

    return TrainReport(
        epoch_losses=tuple(epoch_losses),
        updated=tuple([task.key, "classifier"]),
        step_count=steps,
        duration_seconds=time.monotonic() - start,
        step_counts=dict(optimizer.step_counts),
    )
