import math

import pytest

from seqrank_service.engine import ScoringEngine, TargetWordError
from seqrank_service.finetune import FinetuneConfig, finetune, read_train_file
from seqrank_service.model import load_model


def write_pool(path, n_pos=8, n_neg=8, positive="true", negative="false"):
    lines = []
    for i in range(n_pos):
        lines.append(f"what is thing {i}\tthing {i} is the answer about water\t{positive}")
    for i in range(n_neg):
        lines.append(f"what is thing {i}\tcompletely unrelated text {i}\t{negative}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


class TestReadTrainFile:
    def test_target_word_labels(self, tmp_path):
        path = write_pool(tmp_path / "t.tsv", 2, 3)
        pos, neg = read_train_file(path, "true", "false")
        assert len(pos) == 2 and len(neg) == 3

    def test_canonical_labels_accepted(self, tmp_path):
        path = tmp_path / "t.tsv"
        path.write_text("q\td\tpositive\nq\td2\tnegative\n", encoding="utf-8")
        pos, neg = read_train_file(path, "hot", "cold")
        assert len(pos) == 1 and len(neg) == 1

    def test_label_outside_word_set_rejected(self, tmp_path):
        path = tmp_path / "t.tsv"
        path.write_text("q\td\tmaybe\n", encoding="utf-8")
        with pytest.raises(ValueError) as exc:
            read_train_file(path, "true", "false")
        assert "maybe" in str(exc.value)

    def test_swapped_target_words_take_precedence(self, tmp_path):
        # reversed config uses the literal words as labels
        path = tmp_path / "t.tsv"
        path.write_text("q\td\tfalse\nq\td2\ttrue\n", encoding="utf-8")
        pos, neg = read_train_file(path, "false", "true")
        assert pos == [("q", "d")]
        assert neg == [("q", "d2")]


class TestFinetuneConfig:
    def test_odd_batch_rejected(self):
        with pytest.raises(ValueError):
            FinetuneConfig(batch_size=5)

    def test_zero_steps_rejected(self):
        with pytest.raises(ValueError):
            FinetuneConfig(steps=0)


class TestFinetuneSmoke:
    def test_completes_and_checkpoint_reloads(self, tmp_path):
        train = write_pool(tmp_path / "train.tsv")
        out = finetune(
            train,
            FinetuneConfig(
                batch_size=4, steps=4, seed=7, output_dir=str(tmp_path / "ckpt")
            ),
        )
        model, tokenizer = load_model(str(out))
        engine = ScoringEngine(model, tokenizer)
        logits = engine.score_pairs(
            [("what is thing 1", "thing 1 is the answer about water")], "true", "false"
        )
        assert all(math.isfinite(v) for pair in logits for v in pair)

    def test_missing_class_rejected(self, tmp_path):
        train = tmp_path / "train.tsv"
        train.write_text("q\td\ttrue\n", encoding="utf-8")
        with pytest.raises(ValueError) as exc:
            finetune(train, FinetuneConfig(batch_size=2, steps=1, output_dir=str(tmp_path / "x")))
        assert "0 negative" in str(exc.value)

    def test_multi_token_target_rejected(self, tmp_path):
        train = write_pool(tmp_path / "train.tsv", positive="strawberry")
        with pytest.raises(TargetWordError):
            finetune(
                train,
                FinetuneConfig(
                    positive="strawberry",
                    batch_size=2,
                    steps=1,
                    output_dir=str(tmp_path / "x"),
                ),
            )
