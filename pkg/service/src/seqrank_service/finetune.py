"""Fine-tune a seq2seq checkpoint to emit the target words.

Training renders each (query, document) pair through the scoring prompt
and teaches the model to produce the positive or negative target word as
its single output token. Batches are class-balanced (half positive, half
negative), drawn from seeded shuffles that reshuffle each epoch, with a
constant learning rate of 1e-3 by default. The checkpoint written at the
end loads back into the scoring engine.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from pathlib import Path

import torch
from transformers.optimization import Adafactor

from .engine import ScoringEngine
from .model import TINY_MODEL, load_model

logger = logging.getLogger(__name__)

# canonical class names accepted in train files alongside the target words
_CANONICAL_POSITIVE = "positive"
_CANONICAL_NEGATIVE = "negative"


@dataclass(frozen=True)
class FinetuneConfig:
    model: str = TINY_MODEL
    positive: str = "true"
    negative: str = "false"
    batch_size: int = 128
    steps: int = 16
    learning_rate: float = 1e-3
    seed: int = 0
    max_input_tokens: int = 512
    output_dir: str = "checkpoint"

    def __post_init__(self):
        if self.batch_size < 2 or self.batch_size % 2:
            raise ValueError(
                f"batch_size must be an even number >= 2, got {self.batch_size}"
            )
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")


def read_train_file(path: str | Path, positive: str, negative: str):
    """Parse TSV (query, document, label) into positive/negative pools.

    Labels must be the configured target words; the canonical names
    "positive"/"negative" are also accepted (target words win on clashes).
    """
    pos_pool: list[tuple[str, str]] = []
    neg_pool: list[tuple[str, str]] = []
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(
                    f"line {line_no}: expected 3 tab-separated columns, got {len(parts)}"
                )
            query, document, label = parts
            if label == positive:
                pos_pool.append((query, document))
            elif label == negative:
                neg_pool.append((query, document))
            elif label == _CANONICAL_POSITIVE:
                pos_pool.append((query, document))
            elif label == _CANONICAL_NEGATIVE:
                neg_pool.append((query, document))
            else:
                raise ValueError(
                    f"line {line_no}: label {label!r} is outside the configured "
                    f"word set {{{positive!r}, {negative!r}}}"
                )
    return pos_pool, neg_pool


class _BalancedBatches:
    """Endless per-class round-robin over seeded shuffles."""

    def __init__(self, pool, rng):
        if not pool:
            raise ValueError("empty class pool")
        self._pool = list(pool)
        self._rng = rng
        self._queue: list = []

    def take(self, n):
        out = []
        while len(out) < n:
            if not self._queue:
                self._queue = list(self._pool)
                self._rng.shuffle(self._queue)
            out.append(self._queue.pop())
        return out


def finetune(train_path: str | Path, config: FinetuneConfig) -> Path:
    """Run the fine-tuning loop and return the checkpoint directory."""
    model, tokenizer = load_model(config.model)
    engine = ScoringEngine(model, tokenizer, max_input_tokens=config.max_input_tokens)
    pos_id, neg_id = engine.validate_target(config.positive, config.negative)

    pos_pool, neg_pool = read_train_file(train_path, config.positive, config.negative)
    if not pos_pool or not neg_pool:
        raise ValueError(
            "class-balanced batching needs both classes; got "
            f"{len(pos_pool)} positive and {len(neg_pool)} negative instances"
        )

    torch.manual_seed(config.seed)
    rng = random.Random(config.seed)
    half = config.batch_size // 2
    pos_iter = _BalancedBatches(pos_pool, rng)
    neg_iter = _BalancedBatches(neg_pool, rng)

    optimizer = Adafactor(
        model.parameters(),
        lr=config.learning_rate,
        scale_parameter=False,
        relative_step=False,
        warmup_init=False,
    )
    pad_id = tokenizer.pad_token_id
    model.train()
    for step in range(config.steps):
        batch = [(pair, pos_id) for pair in pos_iter.take(half)]
        batch += [(pair, neg_id) for pair in neg_iter.take(half)]
        rng.shuffle(batch)
        encoded = [engine.build_input_ids(q, d) for (q, d), _ in batch]
        width = max(len(ids) for ids in encoded)
        input_ids = torch.full((len(batch), width), pad_id, dtype=torch.long)
        attention_mask = torch.zeros((len(batch), width), dtype=torch.long)
        for row, ids in enumerate(encoded):
            input_ids[row, : len(ids)] = torch.tensor(ids, dtype=torch.long)
            attention_mask[row, : len(ids)] = 1
        labels = torch.tensor([[target] for _, target in batch], dtype=torch.long)
        output = model(input_ids=input_ids, attention_mask=attention_mask, labels=labels)
        output.loss.backward()
        optimizer.step()
        optimizer.zero_grad()
        logger.info("step %d/%d loss %.4f", step + 1, config.steps, output.loss.item())
    model.eval()

    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(out_dir)
    tokenizer.save_pretrained(out_dir)
    return out_dir
