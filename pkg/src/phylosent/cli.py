"""Subcommand CLI driving the full pipeline.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error. Every
command takes --seed and --config (flat key=value file); flags beat config
file entries, which beat built-in defaults. Each command writes a JSON
manifest next to its primary output recording the resolved configuration.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
import traceback
from pathlib import Path

from . import __version__
from .augment import (
    AugmentConfig,
    build_dict_augmented,
    build_variant,
    load_dictionary,
    load_mt_augmented,
    load_scored_sentences,
)
from .corpus import (
    KNOWN_LANGUAGES,
    UNKNOWN_LANGUAGE,
    Dataset,
    DatasetVariant,
    compile_best,
    concat_shuffle,
    load_dev_scores,
    load_tsv,
    save_best_mapping,
    save_tsv,
    tag_dataset,
)
from .evaluate import (
    PredictionSet,
    macro_average,
    majority_vote,
    read_predictions,
    weighted_f1,
    write_predictions,
    write_report,
)
from .model import (
    EncoderModel,
    ModelConfig,
    build_vocab,
    load_checkpoint,
    predict_dataset,
    save_checkpoint,
)
from .phylogeny import StackConfig, default_tree, load_tree, resolve_stack
from .preprocess import CleanConfig, clean_dataset
from .train import TrainConfig, finetune_task, mlm_adapter_tune

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage by default; the contract reserves 2 for
    # data errors, so remap.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("true", "1", "yes"):
        return True
    if value in ("false", "0", "no"):
        return False
    raise ValueError(f"bad boolean {text!r}")


def _load_config_file(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    entries: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{path} line {lineno}: expected key=value")
        key, _, value = stripped.partition("=")
        entries[key.strip()] = value.strip()
    return entries


class _Config:
    """Resolves option values with precedence: flag > config file > default."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.file = _load_config_file(args.config)
        self.resolved: dict[str, object] = {}

    def get(self, name: str, cast, default):
        flag = getattr(self.args, name, None)
        if flag is not None:
            value = flag
        elif name in self.file:
            value = cast(self.file[name])
        else:
            value = default
        self.resolved[name] = value
        return value


def _write_manifest(output: str, command: str, cfg: _Config, inputs: dict, outputs: dict) -> None:
    manifest = {
        "command": command,
        "version": __version__,
        "seed": cfg.resolved.get("seed"),
        "config": {k: v for k, v in sorted(cfg.resolved.items())},
        "inputs": inputs,
        "outputs": outputs,
    }
    path = Path(str(output) + ".manifest.json")
    path.write_text(json.dumps(manifest, sort_keys=True, indent=2, default=str) + "\n")


def _parse_lang_path(spec: str) -> tuple[str, str]:
    head, sep, tail = spec.partition("=")
    if sep and (head in KNOWN_LANGUAGES or head == UNKNOWN_LANGUAGE):
        return head, tail
    return UNKNOWN_LANGUAGE, spec


def _load_dataset_auto(path: str, language: str) -> Dataset:
    """Load a TSV, inferring from the header whether it carries labels."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
    return load_tsv(path, has_labels="label" in header, language=language)


def _load_group(specs: list[str], seed: int) -> Dataset | None:
    if not specs:
        return None
    parts = [_load_dataset_auto(path, lang) for lang, path in map(_parse_lang_path, specs)]
    return parts[0] if len(parts) == 1 else concat_shuffle(parts, seed)


def _train_config(cfg: _Config, seed: int) -> TrainConfig:
    return TrainConfig(
        learning_rate=cfg.get("lr", float, 1e-4),
        epochs=cfg.get("epochs", int, 5),
        batch_size=cfg.get("batch_size", int, 32),
        seed=seed,
        mask_ratio=cfg.get("mask_ratio", float, 0.15),
    )


def _resolve_tree(args: argparse.Namespace):
    return load_tree(args.tree) if getattr(args, "tree", None) else default_tree()


# -- command handlers ---------------------------------------------------------


def cmd_preprocess(args: argparse.Namespace) -> int:
    cfg = _Config(args)
    seed = cfg.get("seed", int, 0)
    clean_cfg = CleanConfig(
        collapse_char_run_to=cfg.get("collapse_chars", int, 2),
        collapse_punct_run_to=cfg.get("collapse_punct", int, 1),
        remove_rt=not cfg.get("keep_rt", _parse_bool, False),
    )
    ds = _load_dataset_auto(args.input, args.language)
    cleaned = clean_dataset(ds, clean_cfg)
    save_tsv(cleaned, args.output)
    _write_manifest(
        args.output, "preprocess", cfg,
        inputs={"input": args.input},
        outputs={"output": args.output, "rows": len(cleaned)},
    )
    return EXIT_OK


def cmd_augment(args: argparse.Namespace) -> int:
    cfg = _Config(args)
    cfg.get("seed", int, 0)
    if args.method == "dict":
        if not args.sst or not args.dictionary:
            raise UsageError("--method dict needs --sst and --dictionary")
        aug_cfg = AugmentConfig(
            neg_threshold=cfg.get("neg_threshold", float, 0.35),
            pos_threshold=cfg.get("pos_threshold", float, 0.65),
        )
        dictionary = load_dictionary(args.dictionary, args.language)
        sentences = load_scored_sentences(args.sst)
        ds = build_dict_augmented(sentences, dictionary, aug_cfg)
        inputs = {"sst": args.sst, "dictionary": args.dictionary}
    else:
        if not args.mt_file:
            raise UsageError("--method mt needs --mt-file")
        ds = load_mt_augmented(args.mt_file, args.language)
        inputs = {"mt_file": args.mt_file}
    save_tsv(ds, args.output)
    _write_manifest(args.output, "augment", cfg, inputs=inputs,
                    outputs={"output": args.output, "rows": len(ds)})
    return EXIT_OK


def cmd_build_dataset(args: argparse.Namespace) -> int:
    cfg = _Config(args)
    seed = cfg.get("seed", int, 0)
    tag = cfg.get("tag", _parse_bool, False)
    variant = DatasetVariant.parse(args.variant)
    clean = _load_group(args.clean, seed)
    if clean is None:
        raise UsageError("at least one --clean input is required")
    ds = build_variant(
        clean=clean,
        dict_aug=_load_group(args.dict_aug, seed),
        mt_aug=_load_group(args.mt_aug, seed),
        variant=variant,
        seed=seed,
    )
    if tag:
        ds = tag_dataset(ds)
    save_tsv(ds, args.output)
    _write_manifest(
        args.output, "build-dataset", cfg,
        inputs={"clean": args.clean, "dict_aug": args.dict_aug, "mt_aug": args.mt_aug},
        outputs={"output": args.output, "rows": len(ds), "variant": str(variant), "tagged": tag},
    )
    return EXIT_OK


def cmd_compile_best(args: argparse.Namespace) -> int:
    cfg = _Config(args)
    cfg.get("seed", int, 0)
    mapping = compile_best(load_dev_scores(args.scores))
    save_best_mapping(mapping, args.output)
    _write_manifest(args.output, "compile-best", cfg,
                    inputs={"scores": args.scores}, outputs={"output": args.output})
    return EXIT_OK


def _group_by_language(specs: list[str]) -> dict[str, Dataset]:
    by_lang: dict[str, list] = {}
    tagged_flags = set()
    for lang, path in map(_parse_lang_path, specs):
        ds = _load_dataset_auto(path, lang)
        tagged_flags.add(ds.tagged)
        for ex in ds:
            if ex.language == UNKNOWN_LANGUAGE:
                raise ValueError(
                    f"{path}: language unknown; use CODE=PATH or a tagged dataset"
                )
            by_lang.setdefault(ex.language, []).append(ex)
    if len(tagged_flags) > 1:
        raise ValueError("cannot mix tagged and untagged training files")
    tagged = tagged_flags.pop()
    return {
        lang: Dataset(examples=tuple(examples), tagged=tagged)
        for lang, examples in by_lang.items()
    }


def cmd_adapter_tune(args: argparse.Namespace) -> int:
    cfg = _Config(args)
    seed = cfg.get("seed", int, 0)
    corpora = _group_by_language(args.train)
    vocab = build_vocab(list(corpora.values()), min_freq=cfg.get("min_freq", int, 1))
    model_cfg = ModelConfig(
        vocab_size=len(vocab),
        embed_dim=cfg.get("embed_dim", int, 64),
        num_layers=cfg.get("num_layers", int, 2),
        num_heads=cfg.get("num_heads", int, 2),
        ffn_dim=cfg.get("ffn_dim", int, 128),
        adapter_bottleneck=cfg.get("bottleneck", int, 16),
        max_seq_len=cfg.get("max_seq_len", int, 128),
    )
    model = EncoderModel.build(model_cfg, vocab, seed=seed)
    report = mlm_adapter_tune(model, corpora, _resolve_tree(args), _train_config(cfg, seed))
    save_checkpoint(model, args.model_out)
    _write_manifest(
        args.model_out, "adapter-tune", cfg,
        inputs={"train": args.train, "tree": args.tree},
        outputs={
            "model_out": args.model_out,
            "epoch_losses": [round(x, 6) for x in report.epoch_losses],
            "updated": list(report.updated),
        },
    )
    return EXIT_OK


def cmd_finetune(args: argparse.Namespace) -> int:
    cfg = _Config(args)
    seed = cfg.get("seed", int, 0)
    model = load_checkpoint(args.model)
    parts = [
        _load_dataset_auto(path, lang) for lang, path in map(_parse_lang_path, args.train)
    ]
    ds = parts[0] if len(parts) == 1 else concat_shuffle(parts, seed)
    stack = resolve_stack(
        _resolve_tree(args), args.language, StackConfig(args.stack_config), args.task_id
    )
    report = finetune_task(model, ds, stack, _train_config(cfg, seed))
    save_checkpoint(model, args.model_out)
    _write_manifest(
        args.model_out, "finetune", cfg,
        inputs={"model": args.model, "train": args.train},
        outputs={
            "model_out": args.model_out,
            "epoch_losses": [round(x, 6) for x in report.epoch_losses],
            "updated": list(report.updated),
        },
    )
    return EXIT_OK


def cmd_predict(args: argparse.Namespace) -> int:
    cfg = _Config(args)
    cfg.get("seed", int, 0)
    model = load_checkpoint(args.model)
    ds = _load_dataset_auto(args.input, args.language)
    stack = resolve_stack(
        _resolve_tree(args), args.language, StackConfig(args.stack_config), args.task_id
    )
    labels = predict_dataset(model, ds, stack, batch_size=cfg.get("batch_size", int, 32))
    write_predictions(args.output, [ex.id for ex in ds], labels)
    _write_manifest(
        args.output, "predict", cfg,
        inputs={"model": args.model, "input": args.input},
        outputs={"output": args.output, "rows": len(labels)},
    )
    return EXIT_OK


def cmd_ensemble(args: argparse.Namespace) -> int:
    cfg = _Config(args)
    seed = cfg.get("seed", int, 0)
    sets = []
    ids_ref: tuple[str, ...] | None = None
    for path in args.inputs:
        ids, labels = read_predictions(path)
        if ids_ref is None:
            ids_ref = ids
        elif ids != ids_ref:
            raise ValueError(f"{path}: prediction ids do not match {args.inputs[0]}")
        sets.append(PredictionSet(model_id=path, labels=labels))
    voted = majority_vote(sets, seed)
    write_predictions(args.output, list(ids_ref or ()), voted)
    _write_manifest(args.output, "ensemble", cfg,
                    inputs={"inputs": args.inputs}, outputs={"output": args.output})
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _Config(args)
    cfg.get("seed", int, 0)
    if len(args.gold) != len(args.pred):
        raise UsageError("--gold and --pred must be given the same number of times")
    tracks = []
    for gold_path, pred_path in zip(args.gold, args.pred):
        gold = load_tsv(gold_path, has_labels=True, language=UNKNOWN_LANGUAGE)
        ids, labels = read_predictions(pred_path)
        if ids != tuple(ex.id for ex in gold):
            raise ValueError(f"{pred_path}: prediction ids do not align with {gold_path}")
        tracks.append((Path(gold_path).stem, weighted_f1([ex.label for ex in gold], labels)))
    macro = macro_average([r.weighted_f1 for _, r in tracks]) if len(tracks) > 1 else None
    write_report(args.report, tracks, macro)
    for name, report in tracks:
        print(f"{name}\tweighted_f1\t{report.weighted_f1:.1f}")
    if macro is not None:
        print(f"all\tmacro_average\t{macro:.2f}")
    _write_manifest(args.report, "evaluate", cfg,
                    inputs={"gold": args.gold, "pred": args.pred},
                    outputs={"report": args.report})
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="seed for all randomness (default 0)")
    p.add_argument("--config", default=None, help="flat key=value config file")


def _add_train_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lr", type=float, default=None, help="learning rate (default 1e-4)")
    p.add_argument("--epochs", type=int, default=None, help="training epochs (default 5)")
    p.add_argument("--batch-size", dest="batch_size", type=int, default=None,
                   help="batch size (default 32)")


def _add_stack_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--language", default=UNKNOWN_LANGUAGE,
                   help="language code, or 'unknown' for multilingual inference")
    p.add_argument("--stack-config", dest="stack_config", default="T",
                   choices=[c.value for c in StackConfig])
    p.add_argument("--task-id", dest="task_id", default="sentiment")
    p.add_argument("--tree", default=None, help="optional (family, genus, language) TSV")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="phylosent", description=__doc__)
    parser.add_argument("--version", action="version", version=f"phylosent {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="clean tweet text")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--language", default=UNKNOWN_LANGUAGE)
    p.add_argument("--collapse-chars", dest="collapse_chars", type=int, default=None)
    p.add_argument("--collapse-punct", dest="collapse_punct", type=int, default=None)
    p.add_argument("--keep-rt", dest="keep_rt", action="store_const", const=True, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("augment", help="build augmentation data")
    p.add_argument("--method", required=True, choices=["dict", "mt"])
    p.add_argument("--language", required=True)
    p.add_argument("--sst", default=None, help="scored (sentence, score) TSV")
    p.add_argument("--dictionary", default=None, help="(english, translation) TSV")
    p.add_argument("--mt-file", dest="mt_file", default=None, help="(text, label) TSV")
    p.add_argument("--neg-threshold", dest="neg_threshold", type=float, default=None)
    p.add_argument("--pos-threshold", dest="pos_threshold", type=float, default=None)
    p.add_argument("--output", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("build-dataset", help="mix clean and augmented data into one variant")
    p.add_argument("--variant", required=True)
    p.add_argument("--clean", action="append", default=[], metavar="[CODE=]PATH")
    p.add_argument("--dict-aug", dest="dict_aug", action="append", default=[], metavar="[CODE=]PATH")
    p.add_argument("--mt-aug", dest="mt_aug", action="append", default=[], metavar="[CODE=]PATH")
    p.add_argument("--tag", action="store_const", const=True, default=None,
                   help="prepend language-id tokens after mixing")
    p.add_argument("--output", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_build_dataset)

    p = sub.add_parser("compile-best", help="pick the best variant per language from dev scores")
    p.add_argument("--scores", required=True, help="(language, variant, score) TSV with header")
    p.add_argument("--output", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_compile_best)

    p = sub.add_parser("adapter-tune", help="train phylogeny adapters with masked-LM")
    p.add_argument("--train", action="append", required=True, metavar="[CODE=]PATH")
    p.add_argument("--model-out", dest="model_out", required=True)
    p.add_argument("--tree", default=None)
    p.add_argument("--embed-dim", dest="embed_dim", type=int, default=None)
    p.add_argument("--num-layers", dest="num_layers", type=int, default=None)
    p.add_argument("--num-heads", dest="num_heads", type=int, default=None)
    p.add_argument("--ffn-dim", dest="ffn_dim", type=int, default=None)
    p.add_argument("--bottleneck", type=int, default=None)
    p.add_argument("--max-seq-len", dest="max_seq_len", type=int, default=None)
    p.add_argument("--min-freq", dest="min_freq", type=int, default=None)
    p.add_argument("--mask-ratio", dest="mask_ratio", type=float, default=None)
    _add_train_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_adapter_tune)

    p = sub.add_parser("finetune", help="train the task adapter and classifier head")
    p.add_argument("--model", required=True)
    p.add_argument("--train", action="append", required=True, metavar="[CODE=]PATH")
    p.add_argument("--model-out", dest="model_out", required=True)
    _add_stack_flags(p)
    _add_train_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_finetune)

    p = sub.add_parser("predict", help="label a dataset with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--batch-size", dest="batch_size", type=int, default=None)
    _add_stack_flags(p)
    _add_common(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("ensemble", help="majority-vote prediction files")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--output", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("evaluate", help="weighted-F1 report for gold vs predictions")
    p.add_argument("--gold", action="append", required=True)
    p.add_argument("--pred", action="append", required=True)
    p.add_argument("--report", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_evaluate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError, KeyError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
