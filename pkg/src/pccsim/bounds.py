"""Closed-form error-probability bounds for the parity check code on Rayleigh fading.

All functions take the average SNR per code bit ``gamma_c`` on a linear scale.
Bounds are returned raw and may exceed 1 at low SNR.

The alternating sums over order-statistic terms cancel catastrophically in
floating point (for n = 32 at gamma_c = 1e4 the terms are ~1e6 while the sum
is ~1e-93), so they are evaluated exactly over the rationals and rounded once.
"""

import math
from fractions import Fraction

import numpy as np
from scipy import integrate

from .code import MAX_N, CodeParams
from .errors import CapacityError

ALT_SUM_CAP = MAX_N


def _check_gamma(gamma_c):
    if not gamma_c > 0:
        raise ValueError(f"gamma_c must be positive, got {gamma_c}")


def _check_cap(n):
    if n > ALT_SUM_CAP:
        raise CapacityError("n", n, ALT_SUM_CAP)


def beta(gamma_c):
    """Fading-averaged BPSK reliability ``sqrt(gamma_c / (gamma_c + 1))``."""
    return math.sqrt(gamma_c / (gamma_c + 1.0))


def exact_bit_error(gamma_c):
    """Exact uncoded BPSK error probability on Rayleigh fading, ``(1 - beta) / 2``.

    Written as ``1 / (2 (1 + gamma_c + sqrt(gamma_c (gamma_c + 1))))`` to avoid
    cancellation at high SNR.
    """
    _check_gamma(gamma_c)
    return 0.5 / (1.0 + gamma_c + math.sqrt(gamma_c * (gamma_c + 1.0)))


def hard_bound(params: CodeParams, gamma_c):
    """Hard-decision block error bound: at least ``t + 1`` of ``n`` bits wrong."""
    _check_gamma(gamma_c)
    n = params.n
    p = exact_bit_error(gamma_c)
    q = 1.0 - p
    return math.fsum(math.comb(n, j) * p**j * q ** (n - j) for j in range(params.t + 1, n + 1))


def soft_bound(params: CodeParams, gamma_c):
    """Union bound for soft-decision ML decoding, ``(2^k - 1) [4 (1 + g) / (2 + g)^2]^d_min``."""
    _check_gamma(gamma_c)
    inner = 4.0 / (2.0 + gamma_c) * (1.0 + gamma_c) / (2.0 + gamma_c)
    return (2.0**params.k - 1.0) * inner**params.d_min


def chernoff_pbar(gamma_c):
    """Chernoff bound on the fading-averaged bit error probability, ``1 / (1 + gamma_c)``."""
    return 1.0 / (1.0 + gamma_c)


def two_or_more_bound(params: CodeParams, gamma_c):
    """Probability of two or more bit errors with per-bit probability ``chernoff_pbar``."""
    _check_gamma(gamma_c)
    n = params.n
    p = chernoff_pbar(gamma_c)
    q = gamma_c / (1.0 + gamma_c)
    return math.fsum(math.comb(n, m) * p**m * q ** (n - m) for m in range(2, n + 1))


def order_stat_pdf(order, params: CodeParams, gamma_c, x):
    """Density of the 2nd-smallest (``order=2``) or largest (``order=n``) of n
    i.i.d. exponential SNRs with mean ``gamma_c``.

    ``params`` may be a plain integer n; ``order="n"`` is accepted for the maximum.
    """
    n = params if isinstance(params, int) else params.n
    x = np.asarray(x, dtype=np.float64)
    if (x < 0).any():
        raise ValueError("order-statistic densities are defined for x >= 0")
    g = float(gamma_c)
    if order == "n" or order == n:
        return n / g * np.exp(-x / g) * (-np.expm1(-x / g)) ** (n - 1)
    if order == 2:
        if n < 2:
            raise ValueError("the second order statistic needs n >= 2")
        return n * (n - 1) / g * (np.exp(-x * (n - 1) / g) - np.exp(-x * n / g))
    raise ValueError(f"order must be 2 or n, got {order!r}")


def order_stat_cdf(order, params, gamma_c, x):
    """Distribution functions matching :func:`order_stat_pdf`."""
    n = params if isinstance(params, int) else params.n
    x = np.asarray(x, dtype=np.float64)
    g = float(gamma_c)
    if order == "n" or order == n:
        return (-np.expm1(-x / g)) ** n
    if order == 2:
        return 1.0 - n * np.exp(-x * (n - 1) / g) + (n - 1) * np.exp(-x * n / g)
    raise ValueError(f"order must be 2 or n, got {order!r}")


def p2_bar(params: CodeParams, gamma_c):
    """Chernoff bound on the error probability of the bit with the 2nd-smallest SNR."""
    _check_gamma(gamma_c)
    n = params.n
    return n * (n - 1) / ((gamma_c + n - 1) * (gamma_c + n))


def _alt_sum(n, gamma_c):
    # sum_{k=0}^{n-1} (-1)^k C(n-1, k) / (gamma_c + k + 1), exactly
    g = Fraction(gamma_c)
    return sum(Fraction((-1) ** k * math.comb(n - 1, k)) / (g + k + 1) for k in range(n))


def pn_bar(params, gamma_c):
    """Chernoff bound on the error probability of the bit with the largest SNR.

    ``sum_k n C(n-1, k) (-1)^k / (gamma_c + k + 1)``; n = 1 is allowed and
    reduces to :func:`chernoff_pbar`.
    """
    n = params if isinstance(params, int) else params.n
    if n < 1:
        raise ValueError("n must be >= 1")
    _check_gamma(gamma_c)
    _check_cap(n)
    return float(n * _alt_sum(n, gamma_c))


def pn_bar_quadrature(params, gamma_c):
    """``E[exp(-gamma_max)]`` by adaptive quadrature of the order-n density.

    Independent of the alternating sum; used to validate it.
    """
    n = params if isinstance(params, int) else params.n
    g = float(gamma_c)

    def f(x):
        return n / g * math.exp(-x / g - x) * (-math.expm1(-x / g)) ** (n - 1)

    # Integrand peaks near the mode of x^(n-1) e^-x when gamma_c >> n and near
    # gamma_c log(n) when gamma_c << 1.
    mode = min((n - 1) * g / (1.0 + g), g * math.log(n) + g) if n > 1 else 0.0
    width = math.sqrt(n) * min(1.0, g) + 1e-3
    pts = sorted({max(mode - 5 * width, 0.0), mode, mode + 5 * width})
    pts = [p for p in pts if p > 0]
    upper = max(pts + [1.0]) * 4
    total = 0.0
    while True:
        total, _ = integrate.quad(f, 0.0, upper, points=pts or None, limit=500, epsabs=0.0, epsrel=1e-13)
        # beyond ``upper`` the integrand is below n/g e^-(1 + 1/g) x
        tail = n / (g + 1.0) * math.exp(-upper * (1.0 + 1.0 / g))
        if tail <= 1e-12 * total:
            return total
        upper *= 2


def one_error_bound(params: CodeParams, gamma_c):
    """Bound on a single error outside the weakest bit, in its closed form.

    ``n^2 (n-1)^2 / ((g + n - 1)(g + n)) * sum_k (-1)^k C(n-1, k) / (g + k + 1)``.
    """
    _check_gamma(gamma_c)
    n = params.n
    _check_cap(n)
    lead = Fraction(n * n * (n - 1) ** 2) / ((Fraction(gamma_c) + n - 1) * (Fraction(gamma_c) + n))
    return float(lead * _alt_sum(n, gamma_c))


def one_error_bound_components(params: CodeParams, gamma_c):
    """The same term assembled from its parts, ``(n-1) p2_bar (1 - pn_bar)^(n-1)``."""
    n = params.n
    return (n - 1) * p2_bar(params, gamma_c) * (1.0 - pn_bar(params, gamma_c)) ** (n - 1)


def fd_bound(params: CodeParams, gamma_c):
    """Flip-decoder block error bound, evaluated term by term in its published layout.

    ``n^2(n-1)^2 / ((g+n-1)(g+n)(g+1)) {1 + sum_{k>=1} C(n-1,k)(-1)^k (g+1)/(g+k+1)}``
    plus :func:`two_or_more_bound`. Algebraically identical to
    ``one_error_bound + two_or_more_bound``.
    """
    _check_gamma(gamma_c)
    n = params.n
    _check_cap(n)
    g = Fraction(gamma_c)
    braced = 1 + sum(Fraction(math.comb(n - 1, k) * (-1) ** k) * (g + 1) / (g + k + 1) for k in range(1, n))
    first = Fraction(n * n * (n - 1) ** 2) / ((g + n - 1) * (g + n) * (g + 1)) * braced
    return float(first) + two_or_more_bound(params, gamma_c)


def fd_bound_components(params: CodeParams, gamma_c):
    """``one_error_bound_components + two_or_more_bound``.

    Not numerically equal to :func:`fd_bound`: the closed form replaces the
    factor ``(1 - pn_bar)^(n-1)`` with ``pn_bar``.
    """
    return one_error_bound_components(params, gamma_c) + two_or_more_bound(params, gamma_c)


def diversity_slope(curve, window_db=20.0):
    """Least-squares slope of ``-log10(P)`` against ``log10(gamma)``.

    ``curve`` holds ``(gamma_db, probability)`` pairs. Only points within
    ``window_db`` of the highest SNR are used.
    """
    pts = sorted((float(db), float(p)) for db, p in curve)
    if not pts:
        raise ValueError("empty curve")
    top = pts[-1][0]
    win = [(db, p) for db, p in pts if db >= top - window_db - 1e-9]
    if len(win) < 2:
        raise ValueError("need at least two points in the slope window")
    if any(not p > 0 for _, p in win):
        raise ValueError("zero or negative probability in the slope window (too few errors collected)")
    x = np.array([db / 10.0 for db, _ in win])
    y = -np.log10([p for _, p in win])
    return float(np.polyfit(x, y, 1)[0])
