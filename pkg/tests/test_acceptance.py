"""Exit criteria. The module-scoped sweep (0-40 dB, 200 bit errors per cell)
takes several minutes on one core and feeds criteria 1-5."""

import itertools
import math
import time

import numpy as np
import pytest
from scipy import integrate, stats

from pccsim import bounds as B
from pccsim import cli
from pccsim import montecarlo as mc
from pccsim.code import CodeParams, codebook
from pccsim.decoders import decode_batch, decode_throughput_probe

pytestmark = pytest.mark.slow

# One core, 15 minutes. A 2e8-block cap lets every flip/soft curve reach at
# least 28 dB with 200 bit errors; early stop skips cells that cannot.
SWEEP = mc.SimulationConfig(seed=20240601, max_blocks=2 * 10**8)
RUNTIME_LIMIT_S = 15 * 60


@pytest.fixture(scope="module")
def sweep():
    t0 = time.perf_counter()
    res = mc.run_sweep(SWEEP)
    return res, time.perf_counter() - t0


def _slopes(res, decoder):
    return {n: mc.measure_diversity(res, decoder, n) for n in SWEEP.code_lengths}


def _fmt(d):
    return ", ".join(f"n={n}: {v:.3f}" for n, v in d.items())


def test_1_flip_diversity(sweep, criterion):
    res, runtime = sweep
    s = _slopes(res, "flip")
    ok = all(1.8 <= v <= 2.2 for v in s.values()) and runtime < RUNTIME_LIMIT_S
    assert criterion("1 flip decoder diversity in [1.8, 2.2]", ok, f"{_fmt(s)}; sweep {runtime:.0f}s")


def test_2_hard_diversity(sweep, criterion):
    s = _slopes(sweep[0], "hard")
    assert criterion("2 hard decision diversity in [0.9, 1.1]", all(0.9 <= v <= 1.1 for v in s.values()), _fmt(s))


def test_3_soft_diversity(sweep, criterion):
    s = _slopes(sweep[0], "soft_ml")
    assert criterion("3 soft ML diversity in [1.8, 2.2]", all(1.8 <= v <= 2.2 for v in s.values()), _fmt(s))


BOUND_FOR = {"hard": B.hard_bound, "soft_ml": B.soft_bound, "flip": B.fd_bound}


def test_4_bound_dominance(sweep, criterion):
    res, _ = sweep
    checked, worst, bad = 0, -math.inf, []
    for c in res.cells:
        if c.status != mc.OK or c.bit_errors < 200:
            continue
        bound = BOUND_FOR[c.decoder](CodeParams(c.n), c.gamma_c)
        if c.decoder == "soft_ml" and bound > 1:
            continue
        checked += 1
        z = (c.bler - bound) / c.bler_stderr
        worst = max(worst, z)
        if z > 3:
            bad.append(f"{c.decoder} n={c.n} {c.gamma_b_db:g} dB")
    ok = checked > 0 and not bad
    detail = f"{checked} cells, worst (sim - bound)/stderr = {worst:.2f}" + (f"; violations: {bad}" if bad else "")
    assert criterion("4 simulated BLER under hard/soft/FD bounds (+3 stderr)", ok, detail)


def test_4b_decoder_ordering(sweep, criterion):
    res, _ = sweep
    bad = []
    for n in SWEEP.code_lengths:
        cells = {d: {c.gamma_b_db: c for c in res.curve(d, n) if c.status == mc.OK} for d in SWEEP.decoders}
        for db in cells["soft_ml"].keys() & cells["flip"].keys() & cells["hard"].keys():
            s, f, h = (cells[d][db] for d in ("soft_ml", "flip", "hard"))
            for lo, hi in ((s, f), (f, h)):
                if lo.ber - hi.ber > 3 * math.hypot(lo.ci95_halfwidth, hi.ci95_halfwidth) / 1.96:
                    bad.append(f"n={n} {db:g} dB {lo.decoder}>{hi.decoder}")
    assert criterion("4b soft <= flip <= hard BER per cell (3 sigma)", not bad, "ok" if not bad else str(bad))


def test_4c_block_error_ordering(sweep, criterion):
    res, _ = sweep
    bad = []
    checked = 0
    for n in SWEEP.code_lengths:
        cells = {d: {c.gamma_b_db: c for c in res.curve(d, n) if c.status == mc.OK} for d in SWEEP.decoders}
        for db in cells["soft_ml"].keys() & cells["flip"].keys() & cells["hard"].keys():
            s, f, h = (cells[d][db] for d in ("soft_ml", "flip", "hard"))
            checked += 1
            for lo, hi in ((s, f), (f, h)):
                if lo.bler - hi.bler > 3 * math.hypot(lo.bler_stderr, hi.bler_stderr):
                    bad.append(f"n={n} {db:g} dB {lo.decoder}>{hi.decoder}")
    ok = checked > 0 and not bad
    assert criterion("4c soft <= flip <= hard BLER per cell (3 stderr)", ok, f"{checked} cells" + (f"; {bad}" if bad else " ok"))


def test_5_gap_claims(sweep, criterion):
    res, _ = sweep
    at = lambda d, n: mc.snr_at_error_rate(res.curve(d, n), 1e-3)
    gap = at("flip", 8) - at("soft_ml", 8)
    shift = at("flip", 8) - at("flip", 2)
    ok = gap <= 2.5 and abs(shift - 2.0) <= 1.0
    assert criterion("5 FD-soft gap <= 2.5 dB (n=8); FD n=2->8 shift 2+-1 dB", ok,
                     f"gap {gap:.2f} dB, shift {shift:.2f} dB at BER 1e-3")


def _pdf_integral(order, n, g):
    pts = sorted({g, g * math.log(n), g / n})
    return integrate.quad(lambda x: float(B.order_stat_pdf(order, n, g, x)), 0, 60 * g * (1 + math.log(n)),
                          points=pts, limit=500, epsabs=0, epsrel=1e-12)[0]


def test_6_appendix_numerics(criterion):
    gammas = (0.1, 1.0, 10.0, 100.0, 1e4)
    rel = max(abs(B.pn_bar(n, g) / B.pn_bar_quadrature(n, g) - 1) for n in range(1, 33) for g in gammas)
    pdf_err = max(abs(_pdf_integral(o, n, g) - 1) for n in (2, 3, 4, 8, 16, 32) for o in (2, n) for g in gammas)
    rng = np.random.default_rng(6)
    pmin = 1.0
    for n in (2, 4, 8):
        draws = np.sort(rng.exponential(3.0, (20000, n)), axis=1)
        for order, col in ((2, 1), (n, n - 1)):
            p = stats.kstest(draws[:, col], lambda x: B.order_stat_cdf(order, n, 3.0, x)).pvalue
            pmin = min(pmin, p)
    ok = rel <= 1e-9 and pdf_err <= 1e-8 and pmin > 0.01
    assert criterion("6 pn_bar vs quadrature, pdf mass, KS", ok,
                     f"max rel {rel:.1e}, max |mass-1| {pdf_err:.1e}, min KS p {pmin:.3f}")


def test_7_complexity(criterion):
    flip8 = decode_throughput_probe("flip", 8, trials=200_000, repeats=7)
    flip64 = decode_throughput_probe("flip", 64, trials=200_000, repeats=7)
    soft = {n: decode_throughput_probe("soft_ml", n, trials=10_000, repeats=5) for n in range(8, 17)}
    steps = [soft[n + 1] / soft[n] for n in range(8, 16)]
    ok = flip64 / flip8 <= 12 and all(1.7 <= s <= 2.4 for s in steps)
    assert criterion("7 flip linear (n=64/n=8 <= 12), soft ML x1.7-2.4 per step", ok,
                     f"flip {flip8:.0f} -> {flip64:.0f} ns (x{flip64 / flip8:.2f}); soft steps "
                     + " ".join(f"{s:.2f}" for s in steps))


def test_8_property_suites(criterion, tmp_path):
    rng = np.random.default_rng(8)
    failures = 0
    total = 0
    for n, blocks in ((2, 200_000), (3, 200_000), (4, 200_000), (8, 200_000), (16, 100_000), (64, 100_000)):
        h = np.sqrt(rng.standard_exponential((blocks, n)))
        r = h * rng.choice([-1.0, 1.0], (blocks, n)) + rng.standard_normal((blocks, n))
        hard = (r < 0).astype(np.uint8)
        out = decode_batch("flip", r, h)
        changed = out != hard
        fails = hard.sum(axis=1) % 2 == 1
        expect = np.zeros_like(changed)
        expect[np.flatnonzero(fails), np.argmin(h, axis=1)[fails]] = True
        failures += int((out.sum(axis=1) % 2 != 0).sum()) + int((changed != expect).any(axis=1).sum())
        total += blocks

    # exhaustive squared-distance oracle, n = 4
    cw = np.array([list(d) + [sum(d) % 2] for d in itertools.product((0, 1), repeat=3)])
    assert (cw == codebook(CodeParams(4))).all()
    h = np.sqrt(rng.standard_exponential((10_000, 4)))
    r = h * (1 - 2 * cw[rng.integers(0, 8, 10_000)]) + rng.standard_normal((10_000, 4))
    dist = ((r[:, None, :] - h[:, None, :] * (1 - 2 * cw[None, :, :])) ** 2).sum(axis=2)
    oracle = cw[np.argmin(dist, axis=1)]
    soft_mismatch = int((decode_batch("soft_ml", r, h) != oracle).any(axis=1).sum())

    args = ["simulate", "--n", "2,4,8", "--snr-db", "0:5:15", "--decoders", "hard,flip,soft", "--seed", "99",
            "--min-errors", "100", "--max-blocks", "100000", "--quiet"]
    blobs = []
    for w in (1, 4, 16):
        out = tmp_path / f"w{w}.csv"
        assert cli.main(args + ["--workers", str(w), "--out", str(out)]) == 0
        blobs.append(out.read_bytes())
    same = blobs[0] == blobs[1] == blobs[2]

    ok = failures == 0 and total >= 10**6 and soft_mismatch == 0 and same
    assert criterion("8 flip fuzz, soft ML oracle, worker-count determinism", ok,
                     f"{total} fuzzed flip blocks, {failures} failures; soft mismatches {soft_mismatch}/10000; "
                     f"CSV identical across workers 1/4/16: {same}")
