"""Receivers for the parity check code over a fading channel.

``hard_decide`` slices each sample, ``flip_decode`` repairs a parity failure
by flipping the bit with the weakest fade, and ``soft_ml_decode`` searches
all 2^k codewords for the one closest to the received samples.
"""

import statistics
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .code import CodeParams
from .errors import CapacityError

SOFT_ML_CAP = 24

#: Names accepted wherever a decoder is selected, mapped to kernel codes.
DECODERS = {"hard": _kernels.HARD, "flip": _kernels.FLIP, "soft_ml": _kernels.SOFT_ML}
ALIASES = {"soft": "soft_ml", "fd": "flip", "ml": "soft_ml"}


def decoder_name(name: str) -> str:
    """Canonical decoder name for ``name`` (``"soft"`` -> ``"soft_ml"``)."""
    key = ALIASES.get(name, name)
    if key not in DECODERS:
        raise ValueError(f"unknown decoder {name!r}; choose from {sorted(DECODERS)}")
    return key


@dataclass(frozen=True)
class DecodeResult:
    """Decoded codeword, its data part, and the 0-based index the flip decoder changed."""

    codeword: np.ndarray
    flipped_index: Optional[int] = None

    @property
    def data(self) -> np.ndarray:
        return self.codeword[:-1]


def hard_decide(obs) -> np.ndarray:
    """Bit 1 where ``r < 0``, else 0 (so ``r == 0`` reads as 0)."""
    return (np.asarray(obs.r) < 0).astype(np.uint8)


def flip_decode(obs) -> DecodeResult:
    """Hard-decide, then on a parity failure flip the bit with the smallest CSI.

    Only the minimum of ``h`` is needed, so a single argmin pass replaces a
    sort. Ties go to the lowest index.
    """
    if len(obs) < 2:
        raise ValueError("flip decoding needs at least 2 symbols")
    b = hard_decide(obs)
    if not int(b.sum()) & 1:
        return DecodeResult(b)
    j = int(np.argmin(obs.h))
    b[j] ^= 1
    return DecodeResult(b, j)


def soft_ml_decode(obs, params: Optional[CodeParams] = None, cap: int = SOFT_ML_CAP) -> DecodeResult:
    """Maximum-likelihood decoding by exhaustive search over all codewords.

    Maximises ``sum(h * r * x(c))``, which is the same as minimising the
    squared distance ``sum((r - h * x(c))**2)``. Ties go to the data word
    that comes first in lexicographic order.
    """
    n = len(obs) if params is None else params.n
    if n != len(obs):
        raise ValueError(f"observation has {len(obs)} symbols, code has n={n}")
    if n > cap:
        raise CapacityError("n", n, cap)
    cw = _kernels.soft_batch(obs.r[None, :], obs.h[None, :])[0]
    return DecodeResult(cw)


def decode_batch(decoder: str, r, h, cap: int = SOFT_ML_CAP) -> np.ndarray:
    """Decode many observations at once; ``r`` and ``h`` have shape (blocks, n)."""
    decoder = decoder_name(decoder)
    r = np.ascontiguousarray(r, dtype=np.float64)
    h = np.ascontiguousarray(h, dtype=np.float64)
    if decoder == "hard":
        return _kernels.hard_batch(r)
    if decoder == "flip":
        return _kernels.flip_batch(r, h)[0]
    if r.shape[1] > cap:
        raise CapacityError("n", r.shape[1], cap)
    return _kernels.soft_batch(r, h)


def decode_throughput_probe(decoder: str, n: int, trials: int = 10_000, repeats: int = 5, seed: int = 0) -> float:
    """Median wall-clock nanoseconds to decode one block of length ``n``."""
    if trials < 10_000:
        raise ValueError("use at least 10^4 trials per timing")
    rng = np.random.default_rng(seed)
    h = np.sqrt(rng.standard_exponential((trials, n)))
    r = h * rng.choice([-1.0, 1.0], size=(trials, n)) + 0.3 * rng.standard_normal((trials, n))
    decode_batch(decoder, r[:2], h[:2])  # compile outside the timed region
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter_ns()
        decode_batch(decoder, r, h)
        times.append((time.perf_counter_ns() - t0) / trials)
    return statistics.median(times)
