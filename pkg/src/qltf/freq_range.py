"""Output frequency ranges of the nth-order subsystem.

Band-limited inputs (``a <= |w| <= b``) give interval unions built from the
endpoints ``a_k = k a - (n-k) b`` and ``b_k = k b - (n-k) a``. Multitone
inputs give finite sets built by a Kronecker-product recursion; a brute-force
enumeration of signed tone tuples is kept alongside as an oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .spectral_core import (
    DEFAULT_REL_TOL,
    FrequencySet,
    IntervalUnion,
    frequency_tolerance,
    normalize_interval_union,
)

MAX_TUPLES = 10**7


@dataclass(frozen=True)
class Band:
    """Input passband ``a <= |w| <= b`` in rad/s."""

    a: float
    b: float

    def __post_init__(self):
        if not (0 <= self.a <= self.b):
            raise ValueError(f"band requires 0 <= a <= b, got a={self.a}, b={self.b}")


def _check_order(n: int, minimum: int = 1) -> int:
    if int(n) != n or n < minimum:
        raise ValueError(f"order must be an integer >= {minimum}, got {n}")
    return int(n)


def band_endpoints(band: Band, n: int, ks=None) -> list[tuple[float, float]]:
    """``(a_k, b_k)`` for ``k`` in ``ks`` (default ``0..n``)."""
    n = _check_order(n)
    if ks is None:
        ks = range(n + 1)
    return [(k * band.a - (n - k) * band.b, k * band.b - (n - k) * band.a) for k in ks]


def band_output_range(band: Band, n: int) -> IntervalUnion:
    return normalize_interval_union(band_endpoints(band, n))


def band_output_range_nonneg(band: Band, n: int, paper_literal: bool = False) -> IntervalUnion:
    """Non-negative part of :func:`band_output_range`.

    With ``paper_literal=True`` the endpoints are clipped with ``max(., 0)``
    over ``k = 0..n-1`` only, exactly as the index range is printed in the
    original proposition. That variant drops the top interval ``[n a, n b]``
    and turns wholly negative intervals into the point ``{0}``; it is kept
    for auditing only.
    """
    n = _check_order(n)
    if paper_literal:
        pairs = [(max(lo, 0.0), max(hi, 0.0)) for lo, hi in band_endpoints(band, n, range(n))]
        return normalize_interval_union(pairs)
    return band_output_range(band, n).clip_nonnegative()


def _tone_vector(W) -> np.ndarray:
    W = np.asarray(W, dtype=float).ravel()
    if len(W) == 0:
        raise ValueError("need at least one tone frequency")
    if np.any(W <= 0):
        raise ValueError("tone frequencies must be positive")
    if np.any(np.diff(W) < 0):
        raise ValueError("tone frequencies must be sorted ascending")
    return W


def multitone_gamma(W, n: int) -> np.ndarray:
    """The vector Gamma_n of tone sums whose first addend is a positive tone.

    Gamma_1 = W, Gamma_n = Gamma_{n-1} (x) 1_{2K} + 1_{(2K)^{n-2}} (x) G,
    G = 1_K (x) V, V = [-w_K..-w_1, w_1..w_K]. Length K (2K)^{n-1}.
    """
    W = _tone_vector(W)
    n = _check_order(n, 2)
    K = len(W)
    if K * (2 * K) ** (n - 1) > MAX_TUPLES:
        raise ValueError("Gamma vector would exceed the enumeration guard")
    V = np.concatenate([-W[::-1], W])
    G = np.kron(np.ones(K), V)
    gamma = W
    for m in range(2, n + 1):
        gamma = np.kron(gamma, np.ones(2 * K)) + np.kron(np.ones((2 * K) ** (m - 2)), G)
    return gamma


def multitone_output_freqs(W, n: int, rel_tol: float = DEFAULT_REL_TOL) -> FrequencySet:
    """Non-negative output frequencies of order ``n`` for tones ``W``."""
    W = _tone_vector(W)
    n = _check_order(n)
    tol = frequency_tolerance([n * W[-1]], rel_tol)
    if n == 1:
        return FrequencySet.from_values(W, tol)
    gamma = multitone_gamma(W, n)
    return FrequencySet.from_values(gamma[gamma >= -tol], tol)


def multitone_output_freqs_full(W, n: int, rel_tol: float = DEFAULT_REL_TOL) -> FrequencySet:
    """Output frequencies of order ``n`` on both sides of the origin."""
    return multitone_output_freqs(W, n, rel_tol).mirrored()


def brute_force_multitone_freqs(W, n: int, rel_tol: float = DEFAULT_REL_TOL) -> FrequencySet:
    """Distinct non-negative sums over all ``(2K)^n`` signed tone tuples."""
    W = _tone_vector(W)
    n = _check_order(n)
    K = len(W)
    if (2 * K) ** n > MAX_TUPLES:
        raise ValueError(f"(2K)^n = {(2 * K) ** n} tuples exceeds the guard of {MAX_TUPLES}")
    signed = [*(-w for w in W), *W]
    sums = [sum(t) for t in itertools.product(signed, repeat=n)]
    tol = frequency_tolerance([n * W[-1]], rel_tol)
    return FrequencySet.from_values([s for s in sums if s >= -tol], tol)


def extremal_tuple(band: Band, n: int, k: int, upper: bool) -> list[float]:
    """An explicit n-tuple from the band whose sum equals ``b_k`` (upper) or ``a_k``.

    ``k`` entries come from the positive half-band, ``n-k`` from the negative.
    """
    if upper:
        return [band.b] * k + [-band.a] * (n - k)
    return [band.a] * k + [-band.b] * (n - k)
