"""Counter-based deterministic random streams.

Every random draw in this package is a pure function of
(seed, domain, coordinates), implemented as keyed BLAKE2b over a 16-byte
counter.  That makes results independent of scheduling: workers can split
a trial range any way they like and still produce the same numbers.

Counter layout (128 bits, little-endian):
    [ domain:8 | w0:40 | w1:40 | block:40 ]

Domains keep independent streams from colliding:
    0  multiplier draws inside the gcd engine   (w0=round, w1=trial)
    1  random input generation in the harness   (w0=stream, w1=index)
    2  derived sub-seeds                        (w0=label hash, w1=index)
"""

from __future__ import annotations

import hashlib

_MASK40 = (1 << 40) - 1
_MASK64 = (1 << 64) - 1

DOMAIN_TRIAL = 0
DOMAIN_INPUT = 1
DOMAIN_SEED = 2


def _key(seed: int) -> bytes:
    return (seed & _MASK64).to_bytes(8, "little")


def randbits(seed: int, domain: int, w0: int, w1: int, block0: int, k: int) -> int:
    """Return a k-bit integer (top bits zeroed) from the (domain, w0, w1)
    stream, consuming 512-bit blocks starting at index block0."""
    if k <= 0:
        return 0
    key = _key(seed)
    base = (domain << 120) | ((w0 & _MASK40) << 80) | ((w1 & _MASK40) << 40)
    nbytes = (k + 7) // 8
    if nbytes <= 64:
        d = hashlib.blake2b(
            (base | (block0 & _MASK40)).to_bytes(16, "little"),
            key=key, digest_size=nbytes,
        ).digest()
        return int.from_bytes(d, "little") >> (8 * nbytes - k)
    chunks = []
    blk = block0
    remaining = nbytes
    while remaining > 0:
        take = 64 if remaining >= 64 else remaining
        chunks.append(hashlib.blake2b(
            (base | (blk & _MASK40)).to_bytes(16, "little"),
            key=key, digest_size=take,
        ).digest())
        remaining -= take
        blk += 1
    return int.from_bytes(b"".join(chunks), "little") >> (8 * nbytes - k)


def uniform_int(seed: int, domain: int, w0: int, w1: int, lo: int, hi: int) -> int:
    """Uniform integer in [lo, hi] by rejection sampling on bit-length draws.

    Rejection keeps the distribution exactly uniform.  The attempt index
    advances the block counter, so the draw stays a pure function of the
    coordinates no matter how many rejections occur.
    """
    if lo > hi:
        raise ValueError(f"empty range [{lo}, {hi}]")
    span = hi - lo
    if span == 0:
        return lo
    k = span.bit_length()
    blocks_per = (k + 511) // 512
    attempt = 0
    while True:
        x = randbits(seed, domain, w0, w1, attempt * blocks_per, k)
        if x <= span:
            return lo + x
        attempt += 1


def uniform_multiplier(seed: int, round_i: int, trial_j: int, v: int) -> int:
    """Multiplier a drawn uniformly from [1, v-1] for one engine trial."""
    if v < 2:
        raise ValueError("need v >= 2 to draw a multiplier")
    return uniform_int(seed, DOMAIN_TRIAL, round_i, trial_j, 1, v - 1)


def random_nbits(seed: int, stream: int, index: int, bits: int) -> int:
    """Random integer of exactly `bits` bits (MSB forced to 1)."""
    if bits <= 0:
        raise ValueError("bits must be positive")
    x = randbits(seed, DOMAIN_INPUT, stream, index, 0, bits)
    return x | (1 << (bits - 1))


def derive_seed(seed: int, label: str, index: int = 0) -> int:
    """Stable 64-bit sub-seed for a named purpose (per-run seeds etc.)."""
    tag = int.from_bytes(hashlib.blake2b(label.encode(), digest_size=5).digest(), "little")
    return randbits(seed, DOMAIN_SEED, tag, index, 0, 64)
