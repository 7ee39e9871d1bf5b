"""Model loading: the bundled tiny seq2seq model or any local checkpoint.

The tiny model is a small randomly-initialized encoder-decoder built with a
fixed seed over the built-in vocabulary; it exists so the service runs
hermetically at desk scale. Point ``model`` at a directory to load a real
pretrained checkpoint instead (anything AutoModelForSeq2SeqLM accepts).
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from transformers import (
    AutoModelForSeq2SeqLM,
    AutoTokenizer,
    PreTrainedTokenizerFast,
    T5Config,
    T5ForConditionalGeneration,
)

from .vocab import build_tokenizer

TINY_MODEL = "tiny"
_TINY_SEED = 1301


@dataclass(frozen=True)
class ServiceConfig:
    model: str = TINY_MODEL
    max_input_tokens: int = 512
    host: str = "127.0.0.1"
    port: int = 8390
    batch_limit: int = 64

    def __post_init__(self):
        if self.max_input_tokens < 8:
            raise ValueError(f"max_input_tokens too small: {self.max_input_tokens}")
        if self.batch_limit < 1:
            raise ValueError(f"batch_limit must be >= 1, got {self.batch_limit}")


def build_tiny() -> tuple[T5ForConditionalGeneration, PreTrainedTokenizerFast]:
    tokenizer = build_tokenizer()
    config = T5Config(
        vocab_size=len(tokenizer),
        d_model=64,
        d_kv=16,
        d_ff=128,
        num_layers=2,
        num_decoder_layers=2,
        num_heads=4,
        relative_attention_num_buckets=8,
        dropout_rate=0.0,
        pad_token_id=tokenizer.pad_token_id,
        eos_token_id=tokenizer.eos_token_id,
        decoder_start_token_id=tokenizer.pad_token_id,
    )
    torch.manual_seed(_TINY_SEED)
    model = T5ForConditionalGeneration(config)
    model.eval()
    return model, tokenizer


def load_model(name_or_path: str):
    """Return (model, tokenizer) for "tiny" or a checkpoint directory."""
    if name_or_path == TINY_MODEL:
        return build_tiny()
    model = AutoModelForSeq2SeqLM.from_pretrained(name_or_path)
    tokenizer = AutoTokenizer.from_pretrained(name_or_path)
    model.eval()
    return model, tokenizer
