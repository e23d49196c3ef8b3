"""Low-resource multilingual tweet sentiment with phylogeny-informed
adapter stacks over a small, fully reproducible transformer encoder."""

__version__ = "0.1.0"

from .augment import (
    AugmentConfig,
    BilingualDictionary,
    MT_SUPPORTED_LANGUAGES,
    ScoredSentence,
    build_dict_augmented,
    build_variant,
    dict_translate,
    label_sst,
    load_mt_augmented,
)
from .corpus import (
    KNOWN_LANGUAGES,
    LABELS,
    TASK_A_LANGUAGES,
    UNKNOWN_LANGUAGE,
    ZERO_SHOT_LANGUAGES,
    Dataset,
    DatasetVariant,
    DevScoreTable,
    Example,
    SentimentLabel,
    compile_best,
    concat_shuffle,
    load_tsv,
    save_tsv,
    split_dataset,
    tag_dataset,
)
from .evaluate import (
    EvalReport,
    PredictionSet,
    macro_average,
    majority_vote,
    weighted_f1,
)
from .model import (
    EncoderModel,
    ModelConfig,
    Vocabulary,
    adapter_apply,
    build_vocab,
    encode,
    load_checkpoint,
    pad_batch,
    predict_dataset,
    save_checkpoint,
)
from .phylogeny import (
    AdapterId,
    AdapterStack,
    PhylogenyTree,
    StackConfig,
    default_tree,
    path_for,
    resolve_stack,
)
from .preprocess import CleanConfig, clean_dataset, clean_text
from .train import TrainConfig, TrainReport, adam_step, finetune_task, mlm_adapter_tune
