"""Monte Carlo BER / BLER estimation for the three decoders.

Random numbers come from Philox (a counter-based generator) keyed on
``(seed, n, decoder, snr index, chunk index)``. A cell is simulated in
fixed-size chunks until enough bit errors are seen, so its counts depend
only on the configuration and never on how cells are scheduled.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .bounds import diversity_slope
from .channel import SnrPoint, rayleigh_samples
from .code import MAX_N, CodeParams
from .decoders import DECODERS, SOFT_ML_CAP, decoder_name
from .errors import CapacityError, UnderSampledError

DECODER_KEYS = {"hard": 0, "flip": 1, "soft_ml": 2}

OK, CAPPED, SKIPPED, ERROR = "ok", "capped", "skipped", "error"


@dataclass(frozen=True)
class SimulationConfig:
    code_lengths: tuple = (2, 4, 8)
    snr_grid_db: tuple = tuple(range(0, 41, 2))
    decoders: tuple = ("hard", "flip", "soft_ml")
    min_bit_errors: int = 200
    max_blocks: int = 10**8
    seed: int = 0
    workers: int = 1
    chunk_blocks: int = 1 << 16
    # skip the rest of a curve once a cell is capped or projected to be capped
    early_stop: bool = True

    def __post_init__(self):
        object.__setattr__(self, "code_lengths", tuple(int(n) for n in self.code_lengths))
        object.__setattr__(self, "snr_grid_db", tuple(float(s) for s in self.snr_grid_db))
        object.__setattr__(self, "decoders", tuple(decoder_name(d) for d in self.decoders))
        if not self.code_lengths or any(n < 2 for n in self.code_lengths):
            raise ValueError("every code length must be >= 2")
        if any(n > MAX_N for n in self.code_lengths):
            raise CapacityError("n", max(self.code_lengths), MAX_N)
        if not self.snr_grid_db:
            raise ValueError("empty SNR grid")
        if any(b <= a for a, b in zip(self.snr_grid_db, self.snr_grid_db[1:])):
            raise ValueError("SNR grid must be strictly increasing")
        if self.min_bit_errors < 1 or self.max_blocks < 1 or self.chunk_blocks < 1:
            raise ValueError("min_bit_errors, max_blocks and chunk_blocks must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class BerEstimate:
    """Error counts for one (n, decoder, SNR) cell.

    ``bits`` and ``bit_errors`` cover information bits only; ``bit_errors_all``
    also counts the parity bit.
    """

    n: int
    decoder: str
    gamma_b_db: float
    gamma_c: float
    blocks: int = 0
    bit_errors: int = 0
    bit_errors_all: int = 0
    block_errors: int = 0
    status: str = OK
    message: str = field(default="", compare=False)

    @property
    def bits(self):
        return (self.n - 1) * self.blocks

    @property
    def ber(self):
        return self.bit_errors / self.bits if self.blocks else math.nan

    @property
    def ber_all(self):
        return self.bit_errors_all / (self.n * self.blocks) if self.blocks else math.nan

    @property
    def bler(self):
        return self.block_errors / self.blocks if self.blocks else math.nan

    @property
    def ci95_halfwidth(self):
        """Normal-approximation 95% half-width on ``ber``."""
        if not self.blocks:
            return math.nan
        p = self.ber
        return 1.96 * math.sqrt(p * (1.0 - p) / self.bits)

    @property
    def bler_stderr(self):
        p = self.bler
        return math.sqrt(p * (1.0 - p) / self.blocks) if self.blocks else math.nan


def cell_rng(seed, n, decoder, snr_index, chunk):
    ss = np.random.SeedSequence(seed, spawn_key=(n, DECODER_KEYS[decoder], snr_index, chunk))
    return np.random.Generator(np.random.Philox(ss))


def run_cell(n, decoder, gamma_b_db, config=SimulationConfig(), snr_index=0, noiseless=False):
    """Simulate one cell until ``min_bit_errors`` data-bit errors or ``max_blocks`` blocks."""
    decoder = decoder_name(decoder)
    params = CodeParams(n)
    if decoder == "soft_ml" and n > SOFT_ML_CAP:
        raise CapacityError("n", n, SOFT_ML_CAP)
    snr = SnrPoint.for_code(gamma_b_db, params)
    sigma = 0.0 if noiseless else snr.noise_std
    code = DECODERS[decoder]
    blocks = data_err = all_err = block_err = 0
    chunk = 0
    while data_err < config.min_bit_errors and blocks < config.max_blocks:
        size = min(config.chunk_blocks, config.max_blocks - blocks)
        rng = cell_rng(config.seed, n, decoder, snr_index, chunk)
        data = rng.integers(0, 2, (size, params.k), dtype=np.uint8)
        h = rayleigh_samples(rng, (size, n))
        w = rng.standard_normal((size, n))
        w *= sigma
        d, a, b = _kernels.count_errors(data, h, w, code)
        blocks += size
        data_err += d
        all_err += a
        block_err += b
        chunk += 1
    status = OK if data_err >= config.min_bit_errors else CAPPED
    return BerEstimate(n, decoder, float(gamma_b_db), snr.gamma_c, blocks, data_err, all_err, block_err, status)


def _projected_ber(done, db):
    """Extrapolate the BER at ``db`` from the last two completed cells (log-log linear)."""
    (x0, p0), (x1, p1) = done[-2:] if len(done) > 1 else (done[-1], done[-1])
    if x0 == x1 or p0 <= p1:
        return p1
    return p1 * (p1 / p0) ** ((db - x1) / (x1 - x0))


def _run_curve(n, decoder, config, progress):
    out = []
    done = []
    stop_reason = ""
    for i, db in enumerate(config.snr_grid_db):
        gc = SnrPoint.for_code(db, CodeParams(n)).gamma_c
        if config.early_stop and not stop_reason and done:
            if _projected_ber(done, db) * (n - 1) * config.max_blocks < config.min_bit_errors:
                stop_reason = "projected to fall short of min_bit_errors within max_blocks"
        if stop_reason:
            cell = BerEstimate(n, decoder, db, gc, status=SKIPPED, message=stop_reason)
        else:
            try:
                cell = run_cell(n, decoder, db, config, snr_index=i)
            except CapacityError as exc:
                cell = BerEstimate(n, decoder, db, gc, status=ERROR, message=str(exc))
            if cell.status == OK and cell.bit_errors:
                done.append((db, cell.ber))
            elif config.early_stop:
                stop_reason = "an earlier cell on this curve did not reach min_bit_errors"
        if progress is not None:
            progress(cell)
        out.append(cell)
    return out


@dataclass
class SweepResult:
    config: SimulationConfig
    cells: list

    def curve(self, decoder, n):
        decoder = decoder_name(decoder)
        return [c for c in self.cells if c.decoder == decoder and c.n == n]

    @property
    def complete(self):
        return all(c.status != ERROR for c in self.cells)


def run_sweep(config: SimulationConfig, progress=None) -> SweepResult:
    """Evaluate every (n, decoder, SNR) cell; curves run on a thread pool."""
    curves = [(n, d) for n in config.code_lengths for d in config.decoders]
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        parts = list(pool.map(lambda nd: _run_curve(nd[0], nd[1], config, progress), curves))
    return SweepResult(config, [c for part in parts for c in part])


def measure_diversity(result: SweepResult, decoder, n, window_db=20.0):
    """BLER diversity slope over the top ``window_db`` of adequately sampled cells.

    Cells that stopped short of ``min_bit_errors`` are left out; the window is
    anchored at the highest SNR that did reach it.
    """
    need = result.config.min_bit_errors
    good = [c for c in result.curve(decoder, n) if c.status == OK and c.bit_errors >= need and c.block_errors > 0]
    if len(good) < 2:
        raise UnderSampledError(f"{decoder} n={n}: fewer than two cells reached {need} bit errors")
    return diversity_slope([(c.gamma_b_db, c.bler) for c in good], window_db)


def snr_at_error_rate(cells, target, metric="ber"):
    """Interpolated SNR (dB) where a curve first crosses ``target``.

    Linear in log10(rate) between neighbouring grid points; None if the curve
    never crosses.
    """
    pts = [(c.gamma_b_db, getattr(c, metric)) for c in cells if c.blocks and getattr(c, metric) > 0]
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        if y0 >= target > y1:
            l0, l1, lt = math.log10(y0), math.log10(y1), math.log10(target)
            return x0 + (x1 - x0) * (l0 - lt) / (l0 - l1)
    return None


def with_workers(config: SimulationConfig, workers: int) -> SimulationConfig:
    return replace(config, workers=workers)
