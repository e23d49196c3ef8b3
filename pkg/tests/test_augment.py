import numpy as np
import pytest

from phylosent.augment import (
    AugmentConfig,
    BilingualDictionary,
    MT_SUPPORTED_LANGUAGES,
    ScoredSentence,
    build_dict_augmented,
    build_variant,
    dict_translate,
    label_sst,
    load_dictionary,
    load_mt_augmented,
    load_scored_sentences,
)
from phylosent.corpus import LABEL_RANK, Dataset, DatasetVariant, Example, SentimentLabel

NEG, NEU, POS = SentimentLabel.NEGATIVE, SentimentLabel.NEUTRAL, SentimentLabel.POSITIVE
CFG = AugmentConfig()


class TestLabelSst:
    def test_boundaries(self):
        assert label_sst(0.35, CFG) is NEG
        assert label_sst(0.50, CFG) is NEU
        assert label_sst(0.90, CFG) is POS
        assert label_sst(0.65, CFG) is POS

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            label_sst(1.2, CFG)
        with pytest.raises(ValueError):
            label_sst(-0.1, CFG)

    def test_monotone_in_score(self):
        rng = np.random.default_rng(4)
        scores = np.sort(rng.random(1000))
        ranks = [LABEL_RANK[label_sst(float(s), CFG)] for s in scores]
        assert all(a <= b for a, b in zip(ranks, ranks[1:]))

    def test_threshold_config_validated(self):
        with pytest.raises(ValueError):
            AugmentConfig(neg_threshold=0.7, pos_threshold=0.3)


@pytest.fixture
def yo_dict():
    return BilingualDictionary(language="yo", entries={"good": ("dara",), "film": ("fiimu",)})


class TestDictTranslate:
    def test_single_replacement(self, yo_dict):
        assert dict_translate("a good movie", yo_dict) == "a dara movie"

    def test_empty_dictionary_is_identity(self):
        empty = BilingualDictionary(language="yo", entries={})
        for s in ("a good movie", "Weird   spacing!", ""):
            assert dict_translate(s, empty) == s

    def test_case_insensitive_with_punctuation_kept(self, yo_dict):
        assert dict_translate("Good!", yo_dict) == "dara!"
        assert dict_translate("(GOOD)", yo_dict) == "(dara)"

    def test_token_count_preserved(self, yo_dict):
        rng = np.random.default_rng(8)
        words = ["good", "film", "the", "a", "plot!", '"twist"']
        for _ in range(200):
            sent = " ".join(rng.choice(words) for _ in range(int(rng.integers(1, 10))))
            assert len(dict_translate(sent, yo_dict).split()) == len(sent.split())

    def test_misses_untouched(self, yo_dict):
        assert dict_translate("the plot thickens", yo_dict) == "the plot thickens"

    def test_identity_dictionary_fixes_cores(self):
        sentence = "a good film with a twist"
        identity = BilingualDictionary(
            language="yo", entries={w: (w,) for w in sentence.split()}
        )
        assert dict_translate(sentence, identity) == sentence

    def test_first_translation_wins(self):
        d = BilingualDictionary(language="yo", entries={"good": ("dara", "rere")})
        assert dict_translate("good", d) == "dara"


class TestBuildDictAugmented:
    SST = [
        ScoredSentence(text="a good movie", score=0.9),
        ScoredSentence(text="a bad film", score=0.2),
        ScoredSentence(text="just a film", score=0.5),
    ]

    def test_cardinality_and_order(self, yo_dict):
        ds = build_dict_augmented(self.SST, yo_dict, CFG)
        assert len(ds) == 3
        assert [ex.label for ex in ds] == [POS, NEG, NEU]
        assert all(ex.language == "yo" for ex in ds)
        assert ds.variant is DatasetVariant.CLEAN_PLUS_DICT

    def test_low_score_labeled_negative(self, yo_dict):
        ds = build_dict_augmented([ScoredSentence(text="x y", score=0.2)], yo_dict, CFG)
        assert ds[0].label is NEG

    def test_no_overlap_keeps_english(self):
        disjoint = BilingualDictionary(language="yo", entries={"zzz": ("q",)})
        ds = build_dict_augmented(self.SST, disjoint, CFG)
        assert [ex.text for ex in ds] == [s.text for s in self.SST]

    def test_zero_shot_language_rejected(self):
        d = BilingualDictionary(language="tg", entries={})
        with pytest.raises(ValueError, match="training track"):
            build_dict_augmented(self.SST, d, CFG)

    def test_label_distribution_matches_scores(self, yo_dict):
        rng = np.random.default_rng(3)
        scores = rng.random(500)
        sst = [ScoredSentence(text="w x", score=float(s)) for s in scores]
        ds = build_dict_augmented(sst, yo_dict, CFG)
        produced = [ex.label for ex in ds]
        expected = [label_sst(float(s), CFG) for s in scores]
        assert produced == expected


class TestLoadMtAugmented:
    def test_valid_file(self, tmp_path):
        p = tmp_path / "mt.tsv"
        p.write_text("nzuri sana\tpositive\nmbaya\tnegative\n")
        ds = load_mt_augmented(p, "sw")
        assert len(ds) == 2 and ds[0].language == "sw"
        assert ds.variant is DatasetVariant.CLEAN_PLUS_MT

    def test_unsupported_language_lists_supported(self, tmp_path):
        p = tmp_path / "mt.tsv"
        p.write_text("x\tpositive\n")
        for lang in ("twi", "pt", "pcm", "ma", "dz"):
            with pytest.raises(ValueError) as err:
                load_mt_augmented(p, lang)
            assert "supported" in str(err.value)
            assert "sw" in str(err.value)

    def test_supported_set(self):
        assert MT_SUPPORTED_LANGUAGES == {"am", "ha", "ig", "kr", "sw", "ts", "yo"}

    def test_empty_file(self, tmp_path):
        p = tmp_path / "mt.tsv"
        p.write_text("")
        assert len(load_mt_augmented(p, "sw")) == 0


class TestBuildVariant:
    def _clean(self, n):
        return Dataset(
            examples=tuple(
                Example(id=f"c{i}", text=f"clean {i}", label=POS, language="sw") for i in range(n)
            )
        )

    def _aug(self, n, variant, prefix):
        return Dataset(
            examples=tuple(
                Example(id=f"{prefix}{i}", text=f"{prefix} {i}", label=NEG, language="sw")
                for i in range(n)
            ),
            variant=variant,
        )

    def test_both_union_cardinality(self):
        ds = build_variant(
            self._clean(100),
            self._aug(40, DatasetVariant.CLEAN_PLUS_DICT, "d"),
            self._aug(60, DatasetVariant.CLEAN_PLUS_MT, "m"),
            DatasetVariant.CLEAN_PLUS_BOTH,
            seed=1,
        )
        assert len(ds) == 200
        assert ds.variant is DatasetVariant.CLEAN_PLUS_BOTH

    def test_missing_part_named(self):
        with pytest.raises(ValueError, match="dict_aug"):
            build_variant(self._clean(3), None, None, DatasetVariant.CLEAN_PLUS_DICT, seed=0)

    def test_clean_is_reordered_clean(self):
        clean = self._clean(10)
        ds = build_variant(clean, None, None, DatasetVariant.CLEAN, seed=5)
        assert sorted(ex.id for ex in ds) == sorted(ex.id for ex in clean)
        assert ds.variant is DatasetVariant.CLEAN


class TestLoaders:
    def test_dictionary_multi_row_order(self, tmp_path):
        p = tmp_path / "d.tsv"
        p.write_text("good\tdara\ngood\trere\nFilm\tfiimu\n")
        d = load_dictionary(p, "yo")
        assert d.lookup("good") == "dara"
        assert d.lookup("FILM") == "fiimu"

    def test_dictionary_empty_field_rejected(self, tmp_path):
        p = tmp_path / "d.tsv"
        p.write_text("good\t\n")
        with pytest.raises(ValueError, match="line 1"):
            load_dictionary(p, "yo")

    def test_scored_sentences(self, tmp_path):
        p = tmp_path / "s.tsv"
        p.write_text("a fine film\t0.8\nterrible\t0.1\n")
        sst = load_scored_sentences(p)
        assert [s.score for s in sst] == [0.8, 0.1]

    def test_scored_sentences_bad_score(self, tmp_path):
        p = tmp_path / "s.tsv"
        p.write_text("x\tnotanumber\n")
        with pytest.raises(ValueError, match="line 1"):
            load_scored_sentences(p)

    def test_scored_sentences_range(self, tmp_path):
        p = tmp_path / "s.tsv"
        p.write_text("x\t1.5\n")
        with pytest.raises(ValueError, match="line 1"):
            load_scored_sentences(p)
