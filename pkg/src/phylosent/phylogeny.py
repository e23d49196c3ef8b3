"""Language family/genus hierarchy and adapter-stack resolution."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Mapping

from .corpus import UNKNOWN_LANGUAGE, validate_language

ADAPTER_LEVELS: tuple[str, ...] = ("family", "genus", "language", "task")


@dataclass(frozen=True)
class AdapterId:
    level: str
    name: str

    def __post_init__(self) -> None:
        if self.level not in ADAPTER_LEVELS:
            raise ValueError(f"unknown adapter level {self.level!r}")
        if not self.name:
            raise ValueError("adapter name must be non-empty")

    @property
    def key(self) -> str:
        return f"{self.level}:{self.name}"


class StackConfig(enum.Enum):
    """Which tree levels join a forward pass, smallest to largest."""

    T = "T"
    LT = "LT"
    GLT = "GLT"
    FGLT = "FGLT"

    @property
    def levels(self) -> tuple[str, ...]:
        return {
            StackConfig.T: ("task",),
            StackConfig.LT: ("language", "task"),
            StackConfig.GLT: ("genus", "language", "task"),
            StackConfig.FGLT: ("family", "genus", "language", "task"),
        }[self]


@dataclass(frozen=True)
class AdapterStack:
    """Adapters in application order: family, genus, language, then task."""

    entries: tuple[AdapterId, ...]

    def __post_init__(self) -> None:
        if not self.entries or self.entries[-1].level != "task":
            raise ValueError("a stack must end with a task adapter")
        order = [ADAPTER_LEVELS.index(e.level) for e in self.entries]
        if order != sorted(order) or len(set(order)) != len(order):
            raise ValueError("stack levels must be unique and ordered family/genus/language/task")

    def __iter__(self) -> Iterator[AdapterId]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def without_task(self) -> tuple[AdapterId, ...]:
        return self.entries[:-1]


@dataclass(frozen=True)
class PhylogenyTree:
    """family -> genus -> languages; each language sits under exactly one pair."""

    families: Mapping[str, Mapping[str, frozenset[str]]]
    _paths: dict[str, tuple[str, str]] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        paths: dict[str, tuple[str, str]] = {}
        for family, genera in self.families.items():
            for genus, languages in genera.items():
                for lang in languages:
                    validate_language(lang)
                    if lang == UNKNOWN_LANGUAGE or lang in paths:
                        raise ValueError(f"language {lang!r} appears more than once or is reserved")
                    paths[lang] = (family, genus)
        object.__setattr__(self, "_paths", paths)

    def __contains__(self, lang: str) -> bool:
        return lang in self._paths

    def languages(self) -> tuple[str, ...]:
        return tuple(sorted(self._paths))


def default_tree() -> PhylogenyTree:
    """The hierarchy for the twelve training languages."""
    return PhylogenyTree(
        families={
            "Afroasiatic": {
                "Ethiopic": frozenset({"am"}),
                "Chadic": frozenset({"ha"}),
                "Arabic": frozenset({"dz", "ma"}),
            },
            "Niger–Congo": {
                "Volta–Congo": frozenset({"ig", "yo"}),
                "Bantu": frozenset({"kr", "sw", "ts"}),
                "Central Tano": frozenset({"twi"}),
            },
            "Creole": {
                "Creole Portuguese": frozenset({"pcm"}),
            },
            "Indo-European": {
                "Romance": frozenset({"pt"}),
            },
        }
    )


def load_tree(path: str | Path) -> PhylogenyTree:
    """Read a (family, genus, language) TSV without a header."""
    families: dict[str, dict[str, set[str]]] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ValueError(f"{path} line {lineno}: expected 3 columns, got {len(fields)}")
        family, genus, lang = (f.strip() for f in fields)
        if not family or not genus or not lang:
            raise ValueError(f"{path} line {lineno}: empty field")
        families.setdefault(family, {}).setdefault(genus, set()).add(lang)
    return PhylogenyTree(
        families={
            fam: {g: frozenset(langs) for g, langs in genera.items()}
            for fam, genera in families.items()
        }
    )


def path_for(tree: PhylogenyTree, lang: str) -> tuple[str, str]:
    """The (family, genus) pair a language belongs to."""
    try:
        return tree._paths[lang]
    except KeyError:
        raise ValueError(f"language {lang!r} is not in the phylogeny tree") from None


def resolve_stack(
    tree: PhylogenyTree, lang: str, cfg: StackConfig, task_id: str
) -> AdapterStack:
    """Resolve which adapters a forward pass stacks for a language.

    The task-only configuration works for any language, including the
    unknown sentinel; the deeper configurations need the language's tree
    path and therefore reject languages without one.
    """
    if cfg is StackConfig.T:
        return AdapterStack(entries=(AdapterId("task", task_id),))
    if lang == UNKNOWN_LANGUAGE or lang not in tree:
        raise ValueError(
            f"stack {cfg.value} needs a tree path for language {lang!r}; "
            "only the task-only stack works without one"
        )
    family, genus = path_for(tree, lang)
    by_level = {
        "family": AdapterId("family", family),
        "genus": AdapterId("genus", genus),
        "language": AdapterId("language", lang),
        "task": AdapterId("task", task_id),
    }
    return AdapterStack(entries=tuple(by_level[level] for level in cfg.levels))


def phylogeny_path(tree: PhylogenyTree, lang: str) -> tuple[AdapterId, AdapterId, AdapterId]:
    """Family, genus and language adapters for a language (no task)."""
    family, genus = path_for(tree, lang)
    return (
        AdapterId("family", family),
        AdapterId("genus", genus),
        AdapterId("language", lang),
    )
