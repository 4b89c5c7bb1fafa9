"""BPSK over a flat Rayleigh fading channel with ideal interleaving.

Each symbol sees an independent real fading gain ``h`` (Rayleigh, E[h^2] = 1)
and real Gaussian noise of variance ``1 / (2 * gamma_c)``, so a symbol with
instantaneous SNR ``h^2 gamma_c`` is received in error with probability
``Q(sqrt(2 h^2 gamma_c))``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .code import CodeParams, as_bits


@dataclass(frozen=True)
class SnrPoint:
    """Average SNR per information bit (dB) tied to a code rate."""

    gamma_b_db: float
    rate: float = 1.0

    def __post_init__(self):
        if not 0 < self.rate <= 1:
            raise ValueError(f"rate must lie in (0, 1], got {self.rate}")
        if math.isnan(self.gamma_b_db):
            raise ValueError("SNR is NaN")

    @classmethod
    def for_code(cls, gamma_b_db, params: CodeParams):
        return cls(float(gamma_b_db), params.rate)

    @property
    def gamma_b(self) -> float:
        return 10.0 ** (self.gamma_b_db / 10.0)

    @property
    def gamma_c(self) -> float:
        """Average SNR per code bit, ``rate * gamma_b``."""
        return self.rate * self.gamma_b

    @property
    def noise_std(self) -> float:
        return math.sqrt(0.5 / self.gamma_c)


@dataclass(frozen=True)
class ChannelObservation:
    """Received samples ``r`` and the fading magnitudes ``h`` known at the receiver."""

    r: np.ndarray
    h: np.ndarray
    gamma_c: float = math.nan

    def __post_init__(self):
        r = np.asarray(self.r, dtype=np.float64)
        h = np.asarray(self.h, dtype=np.float64)
        if r.ndim != 1 or r.shape != h.shape:
            raise ValueError("r and h must be 1-D arrays of equal length")
        if not (h > 0).all():
            raise ValueError("fading magnitudes must be strictly positive")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "h", h)

    def __len__(self):
        return self.r.size

    @property
    def inst_snr(self) -> np.ndarray:
        """Per-symbol instantaneous SNR ``h^2 * gamma_c``."""
        return self.h**2 * self.gamma_c


def bpsk_map(word) -> np.ndarray:
    """Bit 0 maps to +1, bit 1 to -1."""
    return 1.0 - 2.0 * as_bits(word)


def rayleigh_sample(rng) -> float:
    """One Rayleigh magnitude with unit mean square, ``sqrt(-ln u)`` for u in (0, 1]."""
    while True:
        u = 1.0 - rng.random()
        if u < 1.0:
            return math.sqrt(-math.log(u))


def rayleigh_samples(rng, size) -> np.ndarray:
    """Vectorised :func:`rayleigh_sample`; ``u == 1`` draws are redrawn."""
    u = 1.0 - rng.random(size)
    bad = u == 1.0
    while bad.any():
        u[bad] = 1.0 - rng.random(int(bad.sum()))
        bad = u == 1.0
    return np.sqrt(-np.log(u))


def transmit(codeword, snr: SnrPoint, rng) -> ChannelObservation:
    """Send ``codeword`` through one independent fade and noise draw per symbol.

    An infinite SNR gives a noiseless channel.
    """
    x = bpsk_map(codeword)
    h = rayleigh_samples(rng, x.size)
    w = rng.standard_normal(x.size) * snr.noise_std
    return ChannelObservation(h * x + w, h, snr.gamma_c)
