"""Single-parity-check (SPC) code with even parity.

An (n, n-1) code: the codeword is the data word followed by one bit that
makes the total weight even. Bits are stored as ``numpy.uint8`` arrays.
"""

from dataclasses import dataclass

import numpy as np

MAX_N = 64


@dataclass(frozen=True)
class CodeParams:
    """Parameters of the (n, n-1) even parity code."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"block length must be an integer >= 2, got {self.n!r}")

    @property
    def k(self) -> int:
        return self.n - 1

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def d_min(self) -> int:
        return 2

    @property
    def t(self) -> int:
        return (self.d_min - 1) // 2


def as_bits(bits) -> np.ndarray:
    """Return ``bits`` as a 1-D uint8 array, checking every entry is 0 or 1."""
    arr = np.asarray(bits)
    if arr.ndim != 1:
        raise ValueError("a bit block must be one-dimensional")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("a bit block may only contain 0 and 1")
    return arr.astype(np.uint8)


def encode(data) -> np.ndarray:
    """Append the even-parity bit to ``data``.

    >>> encode([1, 0, 0]).tolist()
    [1, 0, 0, 1]
    """
    d = as_bits(data)
    if d.size == 0:
        raise ValueError("cannot encode an empty data word")
    return np.append(d, np.uint8(d.sum() & 1))


def parity_ok(word) -> bool:
    """True when ``word`` has even weight, i.e. its syndrome ``word . 1_n`` is zero."""
    w = as_bits(word)
    if w.size < 2:
        raise ValueError(f"a codeword has at least 2 bits, got {w.size}")
    return not (int(w.sum()) & 1)


def generator_matrix(params: CodeParams) -> np.ndarray:
    """Systematic generator ``G = [I_k | 1_k]`` of shape (k, n)."""
    return np.hstack([np.eye(params.k, dtype=np.uint8), np.ones((params.k, 1), dtype=np.uint8)])


def parity_check_matrix(params: CodeParams) -> np.ndarray:
    """Parity-check matrix ``H``: one all-ones row of length n."""
    return np.ones((1, params.n), dtype=np.uint8)


def codebook(params: CodeParams) -> np.ndarray:
    """All 2^k codewords, row m being the encoding of ``m`` written MSB first."""
    k = params.k
    m = np.arange(2**k, dtype=np.int64)
    shifts = np.arange(k - 1, -1, -1, dtype=np.int64)
    data = ((m[:, None] >> shifts) & 1).astype(np.uint8)
    return np.hstack([data, (data.sum(axis=1, keepdims=True) & 1).astype(np.uint8)])
