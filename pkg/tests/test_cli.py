import json
import subprocess
import sys

import pytest

from conftest import DEV_SCORES, keyword_dataset
from phylosent.cli import main
from phylosent.corpus import SentimentLabel, load_tsv, save_tsv
from phylosent.evaluate import read_predictions, write_predictions

POS, NEG, NEU = SentimentLabel.POSITIVE, SentimentLabel.NEGATIVE, SentimentLabel.NEUTRAL


def write_noisy_corpus(path, language="am", n=12, seed=0):
    save_tsv(keyword_dataset(language, n, seed=seed, noisy=True), path)


def write_scores_tsv(path):
    rows = ["language\tvariant\tscore"]
    rows += [f"{lang}\t{variant}\t{score}" for (lang, variant), score in DEV_SCORES.items()]
    path.write_text("\n".join(rows) + "\n")


class TestPreprocessCommand:
    def test_cleans_and_writes_manifest(self, tmp_path):
        src = tmp_path / "raw.tsv"
        out = tmp_path / "clean.tsv"
        write_noisy_corpus(src)
        assert main(["preprocess", "--input", str(src), "--output", str(out), "--language", "am"]) == 0
        cleaned = load_tsv(out, has_labels=True, language="am")
        assert 0 < len(cleaned) <= 12
        assert all("@" not in ex.text for ex in cleaned)
        manifest = json.loads((tmp_path / "clean.tsv.manifest.json").read_text())
        assert manifest["command"] == "preprocess"
        assert manifest["seed"] == 0

    def test_rerun_on_own_output_is_identity(self, tmp_path):
        src = tmp_path / "raw.tsv"
        first = tmp_path / "clean1.tsv"
        second = tmp_path / "clean2.tsv"
        write_noisy_corpus(src)
        main(["preprocess", "--input", str(src), "--output", str(first), "--language", "am"])
        assert main(["preprocess", "--input", str(first), "--output", str(second), "--language", "am"]) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_missing_file_data_error(self, tmp_path, capsys):
        rc = main(["preprocess", "--input", str(tmp_path / "nope.tsv"),
                   "--output", str(tmp_path / "o.tsv"), "--language", "am"])
        assert rc == 2
        assert "error" in capsys.readouterr().err

    def test_usage_error_exit_one(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["preprocess", "--input"])
        assert exc.value.code == 1

    def test_byte_identical_reruns(self, tmp_path):
        src = tmp_path / "raw.tsv"
        write_noisy_corpus(src)
        outs = []
        for name in ("a.tsv", "b.tsv"):
            out = tmp_path / name
            main(["preprocess", "--input", str(src), "--output", str(out),
                  "--language", "am", "--seed", "5"])
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
        a = json.loads((tmp_path / "a.tsv.manifest.json").read_text())
        b = json.loads((tmp_path / "b.tsv.manifest.json").read_text())
        a["outputs"]["output"] = b["outputs"]["output"] = ""
        assert a == b

    def test_config_file_precedence(self, tmp_path):
        src = tmp_path / "raw.tsv"
        save_tsv(keyword_dataset("am", 1, seed=3), src)
        raw = load_tsv(src, has_labels=True, language="am")[0].text
        noisy = tmp_path / "n.tsv"
        noisy.write_text(f"id\ttext\tlabel\nx\t{raw} yesssss\tpositive\n")
        cfg = tmp_path / "run.cfg"
        cfg.write_text("collapse_chars = 4\n")
        out_cfg = tmp_path / "via_config.tsv"
        main(["preprocess", "--input", str(noisy), "--output", str(out_cfg),
              "--language", "am", "--config", str(cfg)])
        # config file allows letter runs of 4
        assert load_tsv(out_cfg, has_labels=True, language="am")[0].text.endswith("yessss")
        out_flag = tmp_path / "via_flag.tsv"
        main(["preprocess", "--input", str(noisy), "--output", str(out_flag),
              "--language", "am", "--config", str(cfg), "--collapse-chars", "2"])
        # the flag overrides the config file back down to runs of 2
        assert load_tsv(out_flag, has_labels=True, language="am")[0].text.endswith("yess")
        assert "yesss" not in load_tsv(out_flag, has_labels=True, language="am")[0].text


class TestCompileBestCommand:
    def test_reproduces_published_mapping(self, tmp_path):
        scores = tmp_path / "scores.tsv"
        write_scores_tsv(scores)
        out = tmp_path / "best.tsv"
        assert main(["compile-best", "--scores", str(scores), "--output", str(out)]) == 0
        mapping = dict(
            line.split("\t") for line in out.read_text().splitlines()[1:]
        )
        assert mapping == {
            "ha": "clean", "yo": "clean+mt", "ig": "clean+both", "pcm": "clean+dict",
            "am": "clean+dict", "dz": "clean+dict", "ma": "clean+dict", "sw": "clean+mt",
            "kr": "clean+dict", "twi": "clean+dict", "pt": "clean", "ts": "clean+mt",
        }

    def test_incomplete_scores_data_error(self, tmp_path):
        scores = tmp_path / "scores.tsv"
        scores.write_text("language\tvariant\tscore\nam\tclean\t50\n")
        assert main(["compile-best", "--scores", str(scores), "--output", str(tmp_path / "o.tsv")]) == 2


class TestAugmentCommand:
    def test_dict_method(self, tmp_path):
        sst = tmp_path / "sst.tsv"
        sst.write_text("a good movie\t0.9\na bad movie\t0.1\n")
        dictionary = tmp_path / "dict.tsv"
        dictionary.write_text("good\tnzuri\nbad\tmbaya\n")
        out = tmp_path / "aug.tsv"
        rc = main(["augment", "--method", "dict", "--language", "sw",
                   "--sst", str(sst), "--dictionary", str(dictionary), "--output", str(out)])
        assert rc == 0
        ds = load_tsv(out, has_labels=True, language="sw")
        assert [ex.text for ex in ds] == ["a nzuri movie", "a mbaya movie"]
        assert [ex.label for ex in ds] == [POS, NEG]

    def test_mt_method_unsupported_language(self, tmp_path):
        mt = tmp_path / "mt.tsv"
        mt.write_text("ok\tneutral\n")
        rc = main(["augment", "--method", "mt", "--language", "twi",
                   "--mt-file", str(mt), "--output", str(tmp_path / "o.tsv")])
        assert rc == 2

    def test_dict_method_requires_inputs(self, tmp_path):
        rc = main(["augment", "--method", "dict", "--language", "sw",
                   "--output", str(tmp_path / "o.tsv")])
        assert rc == 1


class TestBuildDatasetCommand:
    def test_mix_and_tag(self, tmp_path):
        clean = tmp_path / "clean.tsv"
        save_tsv(keyword_dataset("sw", 6, seed=1), clean)
        aug = tmp_path / "aug.tsv"
        save_tsv(keyword_dataset("sw", 4, seed=2), aug)
        out = tmp_path / "mixed.tsv"
        rc = main(["build-dataset", "--variant", "clean+dict",
                   "--clean", f"sw={clean}", "--dict-aug", f"sw={aug}",
                   "--tag", "--seed", "3", "--output", str(out)])
        assert rc == 0
        ds = load_tsv(out, has_labels=True, language="unknown")
        assert len(ds) == 10
        assert ds.tagged
        assert all(ex.text.startswith("[sw] ") for ex in ds)

    def test_missing_aug_part_is_data_error(self, tmp_path):
        clean = tmp_path / "clean.tsv"
        save_tsv(keyword_dataset("sw", 2, seed=1), clean)
        rc = main(["build-dataset", "--variant", "clean+mt", "--clean", f"sw={clean}",
                   "--output", str(tmp_path / "o.tsv")])
        assert rc == 2


class TestEnsembleAndEvaluate:
    def test_ensemble_majority(self, tmp_path):
        ids = [f"e{i}" for i in range(4)]
        votes = [
            [POS, NEG, NEU, POS],
            [POS, NEG, NEG, POS],
            [POS, NEU, NEG, NEG],
        ]
        paths = []
        for i, labels in enumerate(votes):
            p = tmp_path / f"pred{i}.tsv"
            write_predictions(p, ids, labels)
            paths.append(str(p))
        out = tmp_path / "vote.tsv"
        assert main(["ensemble", "--inputs", *paths, "--output", str(out), "--seed", "1"]) == 0
        got_ids, got_labels = read_predictions(out)
        assert got_ids == tuple(ids)
        assert got_labels[0] is POS and got_labels[1] is NEG and got_labels[3] is POS

    def test_ensemble_id_mismatch(self, tmp_path):
        a, b = tmp_path / "a.tsv", tmp_path / "b.tsv"
        write_predictions(a, ["x"], [POS])
        write_predictions(b, ["y"], [POS])
        assert main(["ensemble", "--inputs", str(a), str(b), "--output", str(tmp_path / "o.tsv")]) == 2

    def test_evaluate_single_track(self, tmp_path, capsys):
        gold = tmp_path / "gold.tsv"
        save_tsv(keyword_dataset("am", 8, seed=4), gold)
        ds = load_tsv(gold, has_labels=True, language="am")
        pred = tmp_path / "pred.tsv"
        write_predictions(pred, [ex.id for ex in ds], [ex.label for ex in ds])
        report = tmp_path / "report.tsv"
        rc = main(["evaluate", "--gold", str(gold), "--pred", str(pred), "--report", str(report)])
        assert rc == 0
        assert "100.0" in capsys.readouterr().out
        lines = report.read_text().splitlines()
        assert lines[0] == "class\tprecision\trecall\tf1\tsupport"

    def test_evaluate_multi_track_macro(self, tmp_path):
        reports = []
        for lang, seed in (("am", 5), ("sw", 6)):
            gold = tmp_path / f"gold_{lang}.tsv"
            save_tsv(keyword_dataset(lang, 6, seed=seed), gold)
            ds = load_tsv(gold, has_labels=True, language=lang)
            pred = tmp_path / f"pred_{lang}.tsv"
            write_predictions(pred, [ex.id for ex in ds], [ex.label for ex in ds])
            reports.append((str(gold), str(pred)))
        out = tmp_path / "report.tsv"
        rc = main(["evaluate", "--gold", reports[0][0], "--pred", reports[0][1],
                   "--gold", reports[1][0], "--pred", reports[1][1], "--report", str(out)])
        assert rc == 0
        assert out.read_text().splitlines()[-1].startswith("all\tmacro_average\t")


class TestTrainingCommands:
    SMALL = ["--embed-dim", "16", "--num-heads", "2", "--ffn-dim", "24",
             "--bottleneck", "4", "--epochs", "1"]

    def test_adapter_tune_finetune_predict(self, tmp_path):
        train = tmp_path / "train.tsv"
        save_tsv(keyword_dataset("am", 40, seed=7), train)
        ckpt = tmp_path / "base.ckpt"
        rc = main(["adapter-tune", "--train", f"am={train}", "--model-out", str(ckpt),
                   "--seed", "1", *self.SMALL])
        assert rc == 0 and ckpt.exists()

        tuned = tmp_path / "tuned.ckpt"
        rc = main(["finetune", "--model", str(ckpt), "--train", f"am={train}",
                   "--model-out", str(tuned), "--stack-config", "FGLT",
                   "--language", "am", "--seed", "2", "--epochs", "1"])
        assert rc == 0

        preds = tmp_path / "preds.tsv"
        rc = main(["predict", "--model", str(tuned), "--input", str(train),
                   "--language", "am", "--stack-config", "FGLT", "--output", str(preds)])
        assert rc == 0
        ids, labels = read_predictions(preds)
        assert len(ids) == 40

    def test_finetune_missing_phylo_adapters_data_error(self, tmp_path):
        train = tmp_path / "train.tsv"
        save_tsv(keyword_dataset("sw", 8, seed=8), train)
        ckpt = tmp_path / "base.ckpt"
        main(["adapter-tune", "--train", f"sw={train}", "--model-out", str(ckpt),
              "--seed", "1", *self.SMALL])
        # am adapters were never tuned into this checkpoint
        rc = main(["finetune", "--model", str(ckpt), "--train", f"sw={train}",
                   "--model-out", str(tmp_path / "t.ckpt"), "--stack-config", "FGLT",
                   "--language", "am", "--epochs", "1"])
        assert rc == 2

    def test_checkpoints_reproducible(self, tmp_path):
        train = tmp_path / "train.tsv"
        save_tsv(keyword_dataset("am", 24, seed=9), train)
        blobs = []
        for name in ("one.ckpt", "two.ckpt"):
            out = tmp_path / name
            main(["adapter-tune", "--train", f"am={train}", "--model-out", str(out),
                  "--seed", "4", *self.SMALL])
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1]


def test_module_entrypoint_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "phylosent", "--version"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "phylosent" in proc.stdout
