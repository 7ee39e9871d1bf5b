"""Target-token logit scoring service and fine-tuning utility."""

from .engine import ScoringEngine, TargetWordError
from .finetune import FinetuneConfig, finetune
from .model import ServiceConfig, load_model
from .vocab import build_tokenizer

__version__ = "0.1.0"
