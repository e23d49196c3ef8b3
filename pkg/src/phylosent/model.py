"""Small transformer encoder with insertable bottleneck adapters.

Everything is plain numpy with explicit forward/backward passes so that runs
are bitwise reproducible from a seed and gradients can be verified against
finite differences. The backbone (embeddings + attention/FFN layers) is
randomly initialized and stays frozen during training; per-layer adapters and
the two heads carry all task-specific parameters.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import KNOWN_LANGUAGES, LABELS, Dataset, SentimentLabel, language_tag
from .phylogeny import AdapterId, AdapterStack

PAD_TOKEN = "[PAD]"
UNK_TOKEN = "[UNK]"
MASK_TOKEN = "[MASK]"
CLS_TOKEN = "[CLS]"

# Stable id layout: 4 structural tokens, then one tag per known language.
RESERVED_TOKENS: tuple[str, ...] = (PAD_TOKEN, UNK_TOKEN, MASK_TOKEN, CLS_TOKEN) + tuple(
    language_tag(code) for code in KNOWN_LANGUAGES
)
PAD_ID, UNK_ID, MASK_ID, CLS_ID = 0, 1, 2, 3
FIRST_CORPUS_ID = len(RESERVED_TOKENS)

_CKPT_MAGIC = b"PHYLOSENT-CKPT-1\n"


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int
    embed_dim: int = 64
    num_layers: int = 2
    num_heads: int = 2
    ffn_dim: int = 128
    adapter_bottleneck: int = 16
    max_seq_len: int = 128
    num_classes: int = 3

    def __post_init__(self) -> None:
        if self.embed_dim % self.num_heads != 0:
            raise ValueError("embed_dim must be divisible by num_heads")
        if self.max_seq_len < 2:
            raise ValueError("max_seq_len must be at least 2")
        if not 0 < self.adapter_bottleneck < self.embed_dim:
            raise ValueError("adapter_bottleneck must be in (0, embed_dim)")
        if self.vocab_size < FIRST_CORPUS_ID:
            raise ValueError(f"vocab_size must cover the {FIRST_CORPUS_ID} reserved tokens")


@dataclass(frozen=True)
class Vocabulary:
    """Whitespace-token vocabulary with fixed reserved ids."""

    tokens: tuple[str, ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.tokens[: len(RESERVED_TOKENS)] != RESERVED_TOKENS:
            raise ValueError("vocabulary must start with the reserved tokens")
        index = {tok: i for i, tok in enumerate(self.tokens)}
        if len(index) != len(self.tokens):
            raise ValueError("vocabulary contains duplicate tokens")
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.tokens)

    def id_or_unk(self, token: str) -> int:
        return self._index.get(token, UNK_ID)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def tag_id(self, code: str) -> int:
        return self._index[language_tag(code)]


def build_vocab(corpora: Sequence[Dataset], min_freq: int = 1) -> Vocabulary:
    """Count whitespace tokens across datasets and keep the frequent ones.

    Ids are assigned by descending frequency, ties broken lexicographically,
    so the result is independent of dataset iteration order.
    """
    if not corpora:
        raise ValueError("cannot build a vocabulary from an empty corpus list")
    counts: dict[str, int] = {}
    for ds in corpora:
        for ex in ds:
            for token in ex.text.split():
                counts[token] = counts.get(token, 0) + 1
    reserved = set(RESERVED_TOKENS)
    kept = sorted(
        (tok for tok, c in counts.items() if c >= min_freq and tok not in reserved),
        key=lambda tok: (-counts[tok], tok),
    )
    return Vocabulary(tokens=RESERVED_TOKENS + tuple(kept))


def encode(vocab: Vocabulary, text: str, max_len: int) -> list[int]:
    """Token ids with a leading [CLS], truncated to max_len."""
    if max_len < 2:
        raise ValueError("max_len must be at least 2")
    ids = [CLS_ID] + [vocab.id_or_unk(tok) for tok in text.split()]
    return ids[:max_len]


def pad_batch(sequences: Sequence[Sequence[int]]) -> np.ndarray:
    """Stack id sequences into a (batch, width) array padded with [PAD]."""
    if not sequences:
        raise ValueError("cannot batch zero sequences")
    width = max(len(s) for s in sequences)
    out = np.full((len(sequences), width), PAD_ID, dtype=np.int64)
    for i, seq in enumerate(sequences):
        out[i, : len(seq)] = seq
    return out


def adapter_apply(h: np.ndarray, down: np.ndarray, up: np.ndarray) -> np.ndarray:
    """Residual bottleneck: h + relu(h @ down) @ up."""
    if h.shape[-1] != down.shape[0]:
        raise ValueError(f"hidden width {h.shape[-1]} does not match down-projection {down.shape}")
    if down.shape[1] != up.shape[0] or up.shape[1] != h.shape[-1]:
        raise ValueError(f"projection shapes {down.shape} and {up.shape} do not compose")
    return h + np.maximum(h @ down, 0.0) @ up


def _softmax(x: np.ndarray) -> np.ndarray:
    e = np.exp(x - x.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def _layer_norm(x: np.ndarray, gamma: np.ndarray, beta: np.ndarray, eps: float = 1e-5):
    mu = x.mean(axis=-1, keepdims=True)
    var = ((x - mu) ** 2).mean(axis=-1, keepdims=True)
    inv_sigma = 1.0 / np.sqrt(var + eps)
    xhat = (x - mu) * inv_sigma
    return xhat * gamma + beta, (xhat, inv_sigma)


def _layer_norm_backward(dy: np.ndarray, cache, gamma: np.ndarray):
    xhat, inv_sigma = cache
    dgamma = (dy * xhat).sum(axis=tuple(range(dy.ndim - 1)))
    dbeta = dy.sum(axis=tuple(range(dy.ndim - 1)))
    dxhat = dy * gamma
    m1 = dxhat.mean(axis=-1, keepdims=True)
    m2 = (dxhat * xhat).mean(axis=-1, keepdims=True)
    dx = (dxhat - m1 - xhat * m2) * inv_sigma
    return dx, dgamma, dbeta


def _split_heads(x: np.ndarray, num_heads: int) -> np.ndarray:
    b, t, d = x.shape
    return x.reshape(b, t, num_heads, d // num_heads).transpose(0, 2, 1, 3)


def _merge_heads(x: np.ndarray) -> np.ndarray:
    b, h, t, dk = x.shape
    return x.transpose(0, 2, 1, 3).reshape(b, t, h * dk)


def _fold(x: np.ndarray) -> np.ndarray:
    return x.reshape(-1, x.shape[-1])


class EncoderModel:
    """Transformer encoder plus adapter registry, MLM and classify heads.

    A forward pass touches only the adapters named in its stack; registering
    more adapters never changes the backbone or other stacks' outputs.
    """

    def __init__(
        self,
        config: ModelConfig,
        vocab: Vocabulary,
        seed: int,
        dtype=np.float32,
        params: dict[str, np.ndarray] | None = None,
        adapters: dict[str, AdapterId] | None = None,
    ):
        if config.vocab_size != len(vocab):
            raise ValueError(f"config vocab_size {config.vocab_size} != vocabulary size {len(vocab)}")
        self.config = config
        self.vocab = vocab
        self.seed = seed
        self.dtype = np.dtype(dtype)
        self._rng = np.random.default_rng([seed, 0])
        self.adapters: dict[str, AdapterId] = dict(adapters or {})
        self.params: dict[str, np.ndarray] = params if params is not None else {}
        if params is None:
            self._init_backbone_and_heads()

    # -- construction -------------------------------------------------------

    @classmethod
    def build(cls, config: ModelConfig, vocab: Vocabulary, seed: int, dtype=np.float32):
        return cls(config=config, vocab=vocab, seed=seed, dtype=dtype)

    def _xavier(self, fan_in: int, fan_out: int) -> np.ndarray:
        # The backbone stays frozen at its random values, so keep the usual
        # Glorot scale: it gives non-degenerate attention patterns for the
        # adapters to exploit.
        scale = np.sqrt(2.0 / (fan_in + fan_out))
        return self._rng.normal(0.0, scale, (fan_in, fan_out)).astype(self.dtype)

    def _init_backbone_and_heads(self) -> None:
        c = self.config
        p = self.params
        emb_scale = 1.0 / np.sqrt(c.embed_dim)
        p["embeddings.token"] = self._rng.normal(
            0.0, emb_scale, (c.vocab_size, c.embed_dim)
        ).astype(self.dtype)
        p["embeddings.position"] = self._rng.normal(
            0.0, emb_scale, (c.max_seq_len, c.embed_dim)
        ).astype(self.dtype)
        for l in range(c.num_layers):
            pre = f"layers.{l}."
            for name in ("wq", "wk", "wv", "wo"):
                p[pre + f"attn.{name}"] = self._xavier(c.embed_dim, c.embed_dim)
                p[pre + f"attn.{name.replace('w', 'b')}"] = np.zeros(c.embed_dim, self.dtype)
            for ln in ("ln1", "ln2"):
                p[pre + f"{ln}.gamma"] = np.ones(c.embed_dim, self.dtype)
                p[pre + f"{ln}.beta"] = np.zeros(c.embed_dim, self.dtype)
            p[pre + "ffn.w1"] = self._xavier(c.embed_dim, c.ffn_dim)
            p[pre + "ffn.b1"] = np.zeros(c.ffn_dim, self.dtype)
            p[pre + "ffn.w2"] = self._xavier(c.ffn_dim, c.embed_dim)
            p[pre + "ffn.b2"] = np.zeros(c.embed_dim, self.dtype)
        p["mlm.bias"] = np.zeros(c.vocab_size, self.dtype)
        p["classifier.weight"] = self._xavier(c.embed_dim, c.num_classes)
        p["classifier.bias"] = np.zeros(c.num_classes, self.dtype)

    def register_adapter(self, adapter_id: AdapterId) -> None:
        """Create per-layer bottleneck weights for a new adapter.

        The up-projection starts at zero, so a freshly registered adapter is
        exactly the identity until trained.
        """
        if adapter_id.key in self.adapters:
            raise ValueError(f"adapter {adapter_id.key!r} is already registered")
        c = self.config
        for l in range(c.num_layers):
            self.params[f"adapter.{adapter_id.key}.{l}.down"] = self._xavier(
                c.embed_dim, c.adapter_bottleneck
            )
            self.params[f"adapter.{adapter_id.key}.{l}.up"] = np.zeros(
                (c.adapter_bottleneck, c.embed_dim), self.dtype
            )
        self.adapters[adapter_id.key] = adapter_id

    def has_adapter(self, adapter_id: AdapterId) -> bool:
        return adapter_id.key in self.adapters

    # -- parameter bookkeeping ----------------------------------------------

    def adapter_param_names(self, adapter_id: AdapterId) -> list[str]:
        if adapter_id.key not in self.adapters:
            raise KeyError(f"adapter {adapter_id.key!r} is not registered")
        return [
            f"adapter.{adapter_id.key}.{l}.{m}"
            for l in range(self.config.num_layers)
            for m in ("down", "up")
        ]

    def backbone_param_names(self) -> list[str]:
        return [n for n in self.params if n.startswith(("embeddings.", "layers."))]

    def trainable_params(
        self, adapter_ids: Iterable[AdapterId] = (), heads: Iterable[str] = ()
    ) -> dict[str, np.ndarray]:
        """A named view of exactly the selected adapters' and heads' arrays."""
        names: list[str] = []
        for aid in adapter_ids:
            names.extend(self.adapter_param_names(aid))
        for head in heads:
            if head == "classifier":
                names.extend(["classifier.weight", "classifier.bias"])
            elif head == "mlm_head":
                names.append("mlm.bias")
            else:
                raise KeyError(f"unknown head {head!r}; expected 'classifier' or 'mlm_head'")
        return {n: self.params[n] for n in names}

    def param_hash(self, names: Iterable[str]) -> str:
        digest = hashlib.sha256()
        for name in sorted(names):
            digest.update(name.encode("utf-8"))
            digest.update(self.params[name].tobytes())
        return digest.hexdigest()

    def backbone_hash(self) -> str:
        return self.param_hash(self.backbone_param_names())

    # -- forward ------------------------------------------------------------

    def _check_stack(self, adapters: Sequence[AdapterId]) -> tuple[AdapterId, ...]:
        entries = tuple(adapters.entries if isinstance(adapters, AdapterStack) else adapters)
        for aid in entries:
            if aid.key not in self.adapters:
                raise ValueError(f"adapter {aid.key!r} is not registered on this model")
        return entries

    def _layer_forward(self, l: int, x0: np.ndarray, key_pad: np.ndarray, entries):
        p = self.params
        pre = f"layers.{l}."
        dk = self.config.embed_dim // self.config.num_heads
        q = _split_heads(x0 @ p[pre + "attn.wq"] + p[pre + "attn.bq"], self.config.num_heads)
        k = _split_heads(x0 @ p[pre + "attn.wk"] + p[pre + "attn.bk"], self.config.num_heads)
        v = _split_heads(x0 @ p[pre + "attn.wv"] + p[pre + "attn.bv"], self.config.num_heads)
        scores = q @ k.transpose(0, 1, 3, 2) / np.sqrt(np.array(dk, dtype=self.dtype))
        scores = np.where(key_pad[:, None, None, :], -np.inf, scores)
        attn = _softmax(scores)
        ctx = _merge_heads(attn @ v)
        attn_out = ctx @ p[pre + "attn.wo"] + p[pre + "attn.bo"]
        r1 = x0 + attn_out
        x1, ln1c = _layer_norm(r1, p[pre + "ln1.gamma"], p[pre + "ln1.beta"])
        u = x1 @ p[pre + "ffn.w1"] + p[pre + "ffn.b1"]
        g = np.maximum(u, 0.0)
        f = g @ p[pre + "ffn.w2"] + p[pre + "ffn.b2"]
        r2 = x1 + f
        x2, ln2c = _layer_norm(r2, p[pre + "ln2.gamma"], p[pre + "ln2.beta"])
        h = x2
        adapter_caches = []
        for aid in entries:
            down = p[f"adapter.{aid.key}.{l}.down"]
            up = p[f"adapter.{aid.key}.{l}.up"]
            z = h @ down
            rz = np.maximum(z, 0.0)
            adapter_caches.append((h, z, rz))
            h = h + rz @ up
        cache = {
            "x0": x0, "q": q, "k": k, "v": v, "attn": attn, "ctx": ctx,
            "ln1": ln1c, "x1": x1, "u": u, "g": g, "ln2": ln2c,
            "adapters": adapter_caches,
        }
        return h, cache

    def _hidden(self, ids: np.ndarray, entries):
        c = self.config
        ids = np.asarray(ids)
        if ids.ndim != 2:
            raise ValueError(f"expected a (batch, width) id array, got shape {ids.shape}")
        if ids.shape[1] > c.max_seq_len:
            raise ValueError(f"batch width {ids.shape[1]} exceeds max_seq_len {c.max_seq_len}")
        key_pad = ids == PAD_ID
        h = self.params["embeddings.token"][ids] + self.params["embeddings.position"][: ids.shape[1]]
        caches = []
        for l in range(c.num_layers):
            h, cache = self._layer_forward(l, h, key_pad, entries)
            caches.append(cache)
        return h, caches

    def forward(self, ids: np.ndarray, adapters, mode: str) -> np.ndarray:
        """Logits for a padded id batch.

        mode "classify" gives (batch, num_classes) from the [CLS] position;
        mode "mlm" gives per-position vocabulary logits (batch, width, vocab).
        """
        entries = self._check_stack(adapters)
        h, _ = self._hidden(ids, entries)
        if mode == "classify":
            return h[:, 0, :] @ self.params["classifier.weight"] + self.params["classifier.bias"]
        if mode == "mlm":
            return h @ self.params["embeddings.token"].T + self.params["mlm.bias"]
        raise ValueError(f"unknown mode {mode!r}")

    def predict_proba(self, ids: np.ndarray, adapters) -> np.ndarray:
        return _softmax(self.forward(ids, adapters, "classify"))

    # -- backward -----------------------------------------------------------

    def _layer_backward(self, l: int, dh: np.ndarray, cache, entries, grads):
        p = self.params
        pre = f"layers.{l}."
        dk = self.config.embed_dim // self.config.num_heads

        def acc(name: str, value: np.ndarray) -> None:
            if name in grads:
                grads[name] += value
            else:
                grads[name] = value

        for aid, (a_in, z, rz) in zip(reversed(entries), reversed(cache["adapters"])):
            down = p[f"adapter.{aid.key}.{l}.down"]
            up = p[f"adapter.{aid.key}.{l}.up"]
            acc(f"adapter.{aid.key}.{l}.up", _fold(rz).T @ _fold(dh))
            dz = (dh @ up.T) * (z > 0)
            acc(f"adapter.{aid.key}.{l}.down", _fold(a_in).T @ _fold(dz))
            dh = dh + dz @ down.T

        dr2, dg2, db2 = _layer_norm_backward(dh, cache["ln2"], p[pre + "ln2.gamma"])
        acc(pre + "ln2.gamma", dg2)
        acc(pre + "ln2.beta", db2)
        df = dr2
        acc(pre + "ffn.w2", _fold(cache["g"]).T @ _fold(df))
        acc(pre + "ffn.b2", df.sum(axis=(0, 1)))
        du = (df @ p[pre + "ffn.w2"].T) * (cache["u"] > 0)
        acc(pre + "ffn.w1", _fold(cache["x1"]).T @ _fold(du))
        acc(pre + "ffn.b1", du.sum(axis=(0, 1)))
        dx1 = dr2 + du @ p[pre + "ffn.w1"].T

        dr1, dg1, db1 = _layer_norm_backward(dx1, cache["ln1"], p[pre + "ln1.gamma"])
        acc(pre + "ln1.gamma", dg1)
        acc(pre + "ln1.beta", db1)
        dattn_out = dr1
        acc(pre + "attn.wo", _fold(cache["ctx"]).T @ _fold(dattn_out))
        acc(pre + "attn.bo", dattn_out.sum(axis=(0, 1)))
        dctx = _split_heads(dattn_out @ p[pre + "attn.wo"].T, self.config.num_heads)

        attn, q, k, v = cache["attn"], cache["q"], cache["k"], cache["v"]
        dattn = dctx @ v.transpose(0, 1, 3, 2)
        dv = attn.transpose(0, 1, 3, 2) @ dctx
        ds = attn * (dattn - (dattn * attn).sum(axis=-1, keepdims=True))
        scale = np.sqrt(np.array(dk, dtype=self.dtype))
        dq = ds @ k / scale
        dkh = ds.transpose(0, 1, 3, 2) @ q / scale

        dx0 = dr1
        x0 = cache["x0"]
        for dproj, w in ((dq, "wq"), (dkh, "wk"), (dv, "wv")):
            dflat = _merge_heads(dproj)
            acc(pre + f"attn.{w}", _fold(x0).T @ _fold(dflat))
            acc(pre + f"attn.{w.replace('w', 'b')}", dflat.sum(axis=(0, 1)))
            dx0 = dx0 + dflat @ p[pre + f"attn.{w}"].T
        return dx0

    def loss_and_grads(
        self,
        ids: np.ndarray,
        adapters,
        mode: str,
        class_targets: np.ndarray | None = None,
        mlm_targets: np.ndarray | None = None,
        mlm_select: np.ndarray | None = None,
    ) -> tuple[float, dict[str, np.ndarray]]:
        """Mean cross-entropy loss and gradients for every touched parameter.

        Classification scores the [CLS] position against class_targets; MLM
        scores only the positions flagged in mlm_select against mlm_targets.
        """
        entries = self._check_stack(adapters)
        ids = np.asarray(ids)
        h, caches = self._hidden(ids, entries)
        grads: dict[str, np.ndarray] = {}
        token_emb = self.params["embeddings.token"]

        if mode == "classify":
            if class_targets is None:
                raise ValueError("classify mode needs class_targets")
            cls = h[:, 0, :]
            logits = cls @ self.params["classifier.weight"] + self.params["classifier.bias"]
            probs = _softmax(logits)
            n = ids.shape[0]
            loss = float(-np.log(probs[np.arange(n), class_targets]).mean())
            dlogits = probs.copy()
            dlogits[np.arange(n), class_targets] -= 1.0
            dlogits /= n
            grads["classifier.weight"] = cls.T @ dlogits
            grads["classifier.bias"] = dlogits.sum(axis=0)
            dh = np.zeros_like(h)
            dh[:, 0, :] = dlogits @ self.params["classifier.weight"].T
        elif mode == "mlm":
            if mlm_targets is None or mlm_select is None:
                raise ValueError("mlm mode needs mlm_targets and mlm_select")
            rows, cols = np.nonzero(mlm_select)
            if rows.size == 0:
                raise ValueError("mlm_select flags no positions")
            h_sel = h[rows, cols]
            logits = h_sel @ token_emb.T + self.params["mlm.bias"]
            probs = _softmax(logits)
            targets = np.asarray(mlm_targets)[rows, cols]
            n = rows.size
            loss = float(-np.log(probs[np.arange(n), targets]).mean())
            dlogits = probs.copy()
            dlogits[np.arange(n), targets] -= 1.0
            dlogits /= n
            grads["mlm.bias"] = dlogits.sum(axis=0)
            grads["embeddings.token"] = dlogits.T @ h_sel
            dh = np.zeros_like(h)
            dh[rows, cols] = dlogits @ token_emb
        else:
            raise ValueError(f"unknown mode {mode!r}")

        for l in range(self.config.num_layers - 1, -1, -1):
            dh = self._layer_backward(l, dh, caches[l], entries, grads)

        if "embeddings.token" not in grads:
            grads["embeddings.token"] = np.zeros_like(token_emb)
        np.add.at(grads["embeddings.token"], ids, dh)
        dpos = np.zeros_like(self.params["embeddings.position"])
        dpos[: ids.shape[1]] = dh.sum(axis=0)
        grads["embeddings.position"] = dpos
        return loss, grads


def predict_dataset(
    model: EncoderModel, ds: Dataset, adapters, batch_size: int = 32
) -> tuple[SentimentLabel, ...]:
    """Argmax sentiment labels for every example, in dataset order."""
    out: list[SentimentLabel] = []
    encoded = [encode(model.vocab, ex.text, model.config.max_seq_len) for ex in ds]
    for start in range(0, len(encoded), batch_size):
        batch = pad_batch(encoded[start : start + batch_size])
        logits = model.forward(batch, adapters, "classify")
        out.extend(LABELS[i] for i in logits.argmax(axis=1))
    return tuple(out)


# -- checkpointing ----------------------------------------------------------


def save_checkpoint(model: EncoderModel, path: str | Path) -> None:
    """Write a self-describing binary checkpoint.

    Layout: magic, 8-byte little-endian manifest length, JSON manifest
    (config, vocabulary, adapter registry, seed, per-parameter shapes and
    dtypes), then raw row-major parameter bytes in manifest order. The file
    contains no timestamps, so identical models produce identical bytes.
    """
    names = sorted(model.params)
    manifest = {
        "config": dataclasses.asdict(model.config),
        "tokens": list(model.vocab.tokens),
        "adapters": [{"level": a.level, "name": a.name} for a in model.adapters.values()],
        "seed": model.seed,
        "dtype": model.dtype.name,
        "params": [
            {"name": n, "shape": list(model.params[n].shape), "dtype": model.params[n].dtype.name}
            for n in names
        ],
    }
    blob = json.dumps(manifest, sort_keys=True, ensure_ascii=False).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_CKPT_MAGIC)
        fh.write(len(blob).to_bytes(8, "little"))
        fh.write(blob)
        for name in names:
            fh.write(np.ascontiguousarray(model.params[name]).tobytes())


def load_checkpoint(path: str | Path) -> EncoderModel:
    """Rebuild a model whose forward outputs match the saved one bitwise."""
    raw = Path(path).read_bytes()
    if not raw.startswith(_CKPT_MAGIC):
        raise ValueError(f"{path}: not a model checkpoint")
    offset = len(_CKPT_MAGIC)
    manifest_len = int.from_bytes(raw[offset : offset + 8], "little")
    offset += 8
    manifest = json.loads(raw[offset : offset + manifest_len].decode("utf-8"))
    offset += manifest_len
    params: dict[str, np.ndarray] = {}
    for entry in manifest["params"]:
        shape = tuple(entry["shape"])
        dtype = np.dtype(entry["dtype"])
        nbytes = dtype.itemsize * int(np.prod(shape, dtype=np.int64)) if shape else dtype.itemsize
        arr = np.frombuffer(raw[offset : offset + nbytes], dtype=dtype).reshape(shape).copy()
        params[entry["name"]] = arr
        offset += nbytes
    adapters = {
        f"{a['level']}:{a['name']}": AdapterId(a["level"], a["name"]) for a in manifest["adapters"]
    }
    return EncoderModel(
        config=ModelConfig(**manifest["config"]),
        vocab=Vocabulary(tokens=tuple(manifest["tokens"])),
        seed=manifest["seed"],
        dtype=np.dtype(manifest["dtype"]),
        params=params,
        adapters=adapters,
    )
