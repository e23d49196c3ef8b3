"""Tweet-text normalization: strip mentions, retweet markers and URLs,
collapse repeated punctuation/letters and whitespace. Emoji pass through."""

from __future__ import annotations

import dataclasses
import re
import unicodedata
from dataclasses import dataclass

from .corpus import Dataset

_MENTION_RE = re.compile(r"@\w*")
_RT_RE = re.compile(r"(?<!\S)RT(?!\S)")
_URL_RE = re.compile(r"https?://\S*|www\.\S*")
_WS_RE = re.compile(r"\s+")

# Pictograph blocks treated as emoji by tests and docs; the cleaner itself
# never matches these as letters or punctuation, so they survive untouched.
EMOJI_RANGES: tuple[tuple[int, int], ...] = (
    (0x1F1E6, 0x1F1FF),
    (0x1F300, 0x1F5FF),
    (0x1F600, 0x1F64F),
    (0x1F680, 0x1F6FF),
    (0x1F900, 0x1F9FF),
    (0x1FA70, 0x1FAFF),
    (0x2600, 0x26FF),
    (0x2700, 0x27BF),
)


def is_emoji(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in EMOJI_RANGES)


def iter_emoji(text: str) -> list[str]:
    return [ch for ch in text if is_emoji(ch)]


@dataclass(frozen=True)
class CleanConfig:
    collapse_char_run_to: int = 2
    collapse_punct_run_to: int = 1
    remove_rt: bool = True

    def __post_init__(self) -> None:
        if self.collapse_char_run_to < 1 or self.collapse_punct_run_to < 1:
            raise ValueError("collapse targets must be >= 1")


def _collapse_runs(text: str, max_letters: int, max_punct: int) -> str:
    # One pass over runs of identical characters. Letters are Unicode
    # category L, punctuation category P; anything else is kept verbatim.
    out: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        j = i + 1
        while j < n and text[j] == ch:
            j += 1
        run = j - i
        cat = unicodedata.category(ch)
        if cat.startswith("L"):
            run = min(run, max_letters)
        elif cat.startswith("P"):
            run = min(run, max_punct)
        out.append(ch * run)
        i = j
    return "".join(out)


def _clean_once(text: str, cfg: CleanConfig) -> str:
    text = _MENTION_RE.sub("", text)
    if cfg.remove_rt:
        text = _RT_RE.sub("", text)
    text = _URL_RE.sub("", text)
    text = _collapse_runs(text, cfg.collapse_char_run_to, cfg.collapse_punct_run_to)
    return _WS_RE.sub(" ", text).strip()


def clean_text(raw: str, cfg: CleanConfig = CleanConfig()) -> str:
    """Apply the cleaning rules until the text stops changing.

    One pass applies, in order: mention removal, standalone-RT removal, URL
    removal, punctuation-run and letter-run collapsing, and whitespace
    normalization. A second pass is needed only in contrived cases where
    collapsing a run re-creates a removable form (e.g. "htttp://x"), and the
    loop makes the function idempotent for every input.
    """
    current = raw
    for _ in range(len(raw) + 1):
        cleaned = _clean_once(current, cfg)
        if cleaned == current:
            return cleaned
        current = cleaned
    return current


def clean_dataset(ds: Dataset, cfg: CleanConfig = CleanConfig()) -> Dataset:
    """Clean every example's text, dropping rows that become empty.

    Tags must be added after cleaning, so tagged input is rejected.
    """
    if ds.tagged:
        raise ValueError("cannot clean a tagged dataset; tag after cleaning")
    kept = []
    for ex in ds:
        cleaned = clean_text(ex.text, cfg)
        if cleaned:
            kept.append(dataclasses.replace(ex, text=cleaned))
    return Dataset(examples=tuple(kept), variant=ds.variant, tagged=False)
