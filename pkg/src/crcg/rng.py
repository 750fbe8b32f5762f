"""Seed derivation so every generated sample owns an independent stream.

A sample's stream depends only on ``(master_seed, split, index)``, never on
generation order, which is what makes threaded generation byte-identical to
serial generation.
"""

import numpy as np

SPLIT_TAGS = {"train": 0, "test": 1}


def derive_seed(master_seed: int, split: str, index: int) -> int:
    """64-bit seed for one sample; recorded in provenance for replay."""
    ss = np.random.SeedSequence([int(master_seed) & (2**64 - 1), SPLIT_TAGS[split], int(index)])
    return int(ss.generate_state(1, np.uint64)[0])


def stream(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


def sample_stream(master_seed: int, split: str, index: int) -> np.random.Generator:
    return stream(derive_seed(master_seed, split, index))
