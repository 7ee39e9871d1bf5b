"""Scoring core: prompt assembly, truncation, one decode step, two logits.

Each (query, document) pair becomes the prompt

    Query: {query} Document: {document} Relevant:

The document portion is trimmed so the tokenized prompt fits the input
budget; the scaffold and the query are never cut unless the query alone
overflows the budget. The model runs a single decode step and the logits
of the two validated target tokens are returned; the softmax is the
caller's job.
"""

from __future__ import annotations

import math
from typing import Sequence

import torch


class TargetWordError(ValueError):
    """A target word is not a single vocabulary token."""

    def __init__(self, word: str, n_tokens: int):
        detail = "is unknown to the tokenizer" if n_tokens == 0 else (
            f"splits into {n_tokens} tokens"
        )
        super().__init__(f"target word {word!r} {detail}; single-token targets required")
        self.word = word


class ScoringEngine:
    def __init__(self, model, tokenizer, max_input_tokens: int = 512, batch_limit: int = 64):
        self.model = model
        self.tokenizer = tokenizer
        self.max_input_tokens = max_input_tokens
        self.batch_limit = batch_limit
        self.model.eval()

    def validate_target(self, positive: str, negative: str) -> tuple[int, int]:
        """Map the two target words to their single token ids, or raise."""
        return self._single_token_id(positive), self._single_token_id(negative)

    def _single_token_id(self, word: str) -> int:
        ids = self.tokenizer.encode(word, add_special_tokens=False)
        if len(ids) != 1:
            raise TargetWordError(word, len(ids))
        if ids[0] == self.tokenizer.unk_token_id:
            raise TargetWordError(word, 0)
        return ids[0]

    def _encode(self, text: str) -> list[int]:
        return self.tokenizer.encode(text, add_special_tokens=False)

    def build_input_ids(self, query: str, document: str) -> list[int]:
        prefix = self._encode(f"Query: {query} Document:")
        suffix = self._encode("Relevant:")
        eos = [self.tokenizer.eos_token_id]
        budget = self.max_input_tokens - len(prefix) - len(suffix) - len(eos)
        doc_ids = self._encode(document)[: max(0, budget)]
        ids = prefix + doc_ids + suffix + eos
        # a pathologically long query can still overflow; hard cap
        return ids[: self.max_input_tokens]

    def score_pairs(
        self, pairs: Sequence[tuple[str, str]], positive: str, negative: str
    ) -> list[tuple[float, float]]:
        pos_id, neg_id = self.validate_target(positive, negative)
        if not pairs:
            return []
        # Identical pairs are scored once and share the result, and each
        # input is padded to a length bucket that depends only on itself,
        # so logits do not depend on what else is in the request.
        unique: dict[tuple[str, str], int] = {}
        order: list[tuple[str, str]] = []
        for pair in pairs:
            if pair not in unique:
                unique[pair] = len(order)
                order.append(pair)
        encoded = [self.build_input_ids(q, d) for q, d in order]
        buckets: dict[int, list[int]] = {}
        for i, ids in enumerate(encoded):
            bucket = min(self.max_input_tokens, ((len(ids) + 63) // 64) * 64)
            buckets.setdefault(bucket, []).append(i)
        results: list[tuple[float, float] | None] = [None] * len(order)
        for bucket, indices in sorted(buckets.items()):
            for start in range(0, len(indices), self.batch_limit):
                chunk = indices[start : start + self.batch_limit]
                logits = self._forward([encoded[i] for i in chunk], bucket)
                for row, i in enumerate(chunk):
                    lp = float(logits[row, pos_id])
                    ln = float(logits[row, neg_id])
                    if not (math.isfinite(lp) and math.isfinite(ln)):
                        raise RuntimeError(f"model produced non-finite logits ({lp}, {ln})")
                    results[i] = (lp, ln)
        return [results[unique[pair]] for pair in pairs]

    def _forward(self, id_lists: list[list[int]], padded_length: int) -> torch.Tensor:
        pad_id = self.tokenizer.pad_token_id
        batch = len(id_lists)
        input_ids = torch.full((batch, padded_length), pad_id, dtype=torch.long)
        attention_mask = torch.zeros((batch, padded_length), dtype=torch.long)
        for row, ids in enumerate(id_lists):
            input_ids[row, : len(ids)] = torch.tensor(ids, dtype=torch.long)
            attention_mask[row, : len(ids)] = 1
        decoder_start = self.model.config.decoder_start_token_id
        decoder_input_ids = torch.full((batch, 1), decoder_start, dtype=torch.long)
        with torch.no_grad():
            output = self.model(
                input_ids=input_ids,
                attention_mask=attention_mask,
                decoder_input_ids=decoder_input_ids,
            )
        return output.logits[:, 0, :]
