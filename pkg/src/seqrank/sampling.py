"""Deterministic class-balanced sampling of training instances.

Randomness comes from SplitMix64 driving a Fisher-Yates shuffle, so the
same seed reproduces the same sample on any platform. The positive class
is drawn first, then the negative class from the same stream; within each
class the selected instances keep their pool order.
"""

from __future__ import annotations

from typing import Sequence

from .corpus import LABEL_NEGATIVE, LABEL_POSITIVE, TrainInstance

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """The SplitMix64 generator (Steele, Lea & Flood)."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError(f"bound must be positive, got {n}")
        return self.next_u64() % n


def shuffled(items: Sequence[int], rng: SplitMix64) -> list[int]:
    """Fisher-Yates permutation driven by ``rng``."""
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = rng.randbelow(i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def sample_balanced(
    instances: Sequence[TrainInstance], n_pos: int, n_neg: int, seed: int
) -> list[TrainInstance]:
    """Draw n_pos positives and n_neg negatives uniformly without replacement.

    Output is the sampled positives (in pool order) followed by the sampled
    negatives (in pool order). Raises if either class pool is too small,
    naming the deficient class.
    """
    if n_pos < 0 or n_neg < 0:
        raise ValueError("sample sizes must be non-negative")
    pos_idx = [i for i, inst in enumerate(instances) if inst.label == LABEL_POSITIVE]
    neg_idx = [i for i, inst in enumerate(instances) if inst.label == LABEL_NEGATIVE]
    if len(pos_idx) < n_pos:
        raise ValueError(
            f"positive pool has {len(pos_idx)} instances, need {n_pos}"
        )
    if len(neg_idx) < n_neg:
        raise ValueError(
            f"negative pool has {len(neg_idx)} instances, need {n_neg}"
        )
    rng = SplitMix64(seed)
    chosen_pos = sorted(shuffled(pos_idx, rng)[:n_pos])
    chosen_neg = sorted(shuffled(neg_idx, rng)[:n_neg])
    return [instances[i] for i in chosen_pos] + [instances[i] for i in chosen_neg]
