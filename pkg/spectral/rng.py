"""Counter-based, splittable random streams.

Every stream is a Philox generator keyed by (master seed, label, index), so
trials are independent of scheduling order.
"""
import hashlib

import numpy as np

SEED_MASK = (1 << 64) - 1


def label_key(label: str) -> int:
    """Stable 32-bit key for a stream label"""
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=4).digest()
    return int.from_bytes(digest, "little")


def _sequence(seed: int, label: str, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=int(seed) & SEED_MASK,
                                  spawn_key=(label_key(label), int(index)))


def make_generator(seed: int, label: str = "root", index: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(_sequence(seed, label, index)))


def derive_seed(seed: int, label: str, index: int) -> int:
    """64-bit child seed; recorded in artifacts so a single trial can be replayed"""
    words = _sequence(seed, label, index).generate_state(2, dtype=np.uint32)
    return (int(words[1]) << 32) | int(words[0])


def complex_normal(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    """Centered complex Gaussian with E|X|^2 = variance"""
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
