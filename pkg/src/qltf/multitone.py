"""Quasi-linear transfer functions under multitone excitation.

For a K-tone input every nth-order quantity lives on a finite set of output
frequencies, the sums of n signed tone frequencies. All three functions are
built from one enumeration over the ordered signed index tuples
``(k_1..k_n) in {+-1..+-K}^n``:

    U_n(w) = pi / 2^(n-1) * sum B(w_k1)...B(w_kn)
    Y_n(w) = pi / 2^(n-1) * sum B(w_k1)...B(w_kn) H_n(w_k1, ..., w_kn)
    G_n(w) = Y_n(w) / U_n(w)

with each sum taken over the tuples whose frequencies add up to ``w``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gfrf import KernelTransferFunction, PoleError
from .spectral_core import MultitoneSignal, cluster_sorted, frequency_tolerance, phase_deg, wrap_deg

MAX_TUPLES = 10**7
DEFAULT_TAU = 1e-10


class BMap:
    """Tone amplitude lookup: ``A_k`` at ``+-w_k`` (conjugated at negative frequencies), 0 elsewhere."""

    def __init__(self, signal: MultitoneSignal):
        self.signal = signal
        self.frequencies, self.amplitudes = signal.signed_lines()
        self.tolerance = signal.tolerance

    def __call__(self, omega: float) -> complex:
        i = int(np.argmin(np.abs(self.frequencies - omega)))
        if abs(self.frequencies[i] - omega) <= self.tolerance:
            return complex(self.amplitudes[i])
        return 0j


@dataclass(frozen=True)
class SpectralCoefficients:
    """Line coefficients of one order, keyed by sorted output frequency."""

    order: int
    omega: np.ndarray
    values: np.ndarray

    def __getitem__(self, w: float) -> complex:
        i = np.flatnonzero(np.abs(self.omega - w) <= _key_tol(self.omega))
        return complex(self.values[i[0]]) if len(i) else 0j

    def as_dict(self) -> dict[float, complex]:
        return {float(w): complex(v) for w, v in zip(self.omega, self.values)}


def _key_tol(omega) -> float:
    return frequency_tolerance(omega)


def _enumerate(signal: MultitoneSignal, n: int):
    """All ordered signed tuples: (tuple frequencies (T, n), product of amplitudes (T,))."""
    if int(n) != n or n < 1:
        raise ValueError(f"order must be an integer >= 1, got {n}")
    w, a = signal.signed_lines()
    m = len(w)
    if m**n > MAX_TUPLES:
        raise ValueError(f"(2K)^n = {m ** n} tuples exceeds the guard of {MAX_TUPLES}")
    idx = np.indices((m,) * n).reshape(n, -1).T
    freqs = w[idx]
    prod = np.prod(a[idx], axis=1)
    return freqs, prod


def _accumulate(sums: np.ndarray, contrib: list[np.ndarray], tol: float):
    """Group tuple contributions by output frequency under ``tol``.

    The canonical key of a group is the sum of its first tuple in enumeration
    order; within a group contributions are added in enumeration order.
    """
    order = np.argsort(sums, kind="stable")
    labels_sorted = cluster_sorted(sums[order], tol)
    labels = np.empty_like(labels_sorted)
    labels[order] = labels_sorted
    # stable regroup by label keeps enumeration order inside each group
    regroup = np.argsort(labels, kind="stable")
    starts = np.flatnonzero(np.concatenate([[True], np.diff(labels[regroup]) != 0]))
    keys = sums[regroup][starts]
    keys = np.where(np.abs(keys) <= tol, 0.0, keys)
    out = [np.add.reduceat(c[regroup], starts) for c in contrib]
    return keys, out


def _spectral(signal: MultitoneSignal, h: KernelTransferFunction | None, n: int):
    freqs, prod = _enumerate(signal, n)
    scale = math.pi / 2 ** (n - 1)
    u = scale * prod
    contrib = [u]
    if h is not None:
        try:
            hv = h.evaluate_many(freqs)
        except PoleError:
            for row in freqs:
                try:
                    h(*row)
                except PoleError as exc:
                    raise PoleError(f"{exc} (tone tuple {tuple(float(x) for x in row)})", tuple(row)) from exc
            raise
        if not np.all(np.isfinite(hv)):
            bad = freqs[~np.isfinite(hv)][0]
            raise PoleError(f"non-finite GFRF value at tone tuple {tuple(bad)}", tuple(bad))
        contrib.append(u * hv)
    tol = signal.rel_tol * max(1.0, n * float(signal.frequencies[-1]))
    keys, out = _accumulate(freqs.sum(axis=1), contrib, tol)
    return keys, out


def input_spectral_coeffs(signal: MultitoneSignal, n: int) -> SpectralCoefficients:
    """nth-order input spectral function ``U_n`` as line coefficients."""
    keys, (u,) = _spectral(signal, None, n)
    return SpectralCoefficients(n, keys, u)


def output_spectral_coeffs(signal: MultitoneSignal, h: KernelTransferFunction) -> SpectralCoefficients:
    """nth-order input/output frequency function ``Y_n`` as line coefficients."""
    keys, (_, y) = _spectral(signal, h, h.order)
    return SpectralCoefficients(h.order, keys, y)


@dataclass(frozen=True)
class QltfTable:
    """Rows ``w -> (U_n, Y_n, G_n)`` over the valid output frequencies."""

    order: int
    omega: np.ndarray
    u: np.ndarray
    y: np.ndarray
    g: np.ndarray
    diagnostics: tuple[str, ...] = ()

    def __len__(self):
        return len(self.omega)

    def rows(self):
        return zip(self.omega, self.u, self.y, self.g)

    def row(self, w: float):
        i = np.flatnonzero(np.abs(self.omega - w) <= _key_tol(self.omega))
        if not len(i):
            raise KeyError(w)
        i = i[0]
        return complex(self.u[i]), complex(self.y[i]), complex(self.g[i])

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.g)

    @property
    def phase_deg(self) -> np.ndarray:
        return phase_deg(self.g)


def qltf(signal: MultitoneSignal, h: KernelTransferFunction, tau: float = DEFAULT_TAU) -> QltfTable:
    """QLTF table ``G_n = Y_n / U_n`` for the order of ``h``.

    Frequencies where ``|U_n| <= tau * max|U_n|`` are excluded; if ``Y_n`` is
    significant there, a diagnostic records that the ratio is undefined.
    """
    n = h.order
    keys, (u, y) = _spectral(signal, h, n)
    umax = float(np.max(np.abs(u))) if len(u) else 0.0
    ymax = float(np.max(np.abs(y))) if len(y) else 0.0
    valid = np.abs(u) > tau * umax
    diags = []
    for w, yv in zip(keys[~valid], y[~valid]):
        if abs(yv) > tau * ymax and ymax > 0:
            diags.append(f"QLTF undefined: input spectral cancellation at omega={w:g} (|Y_n|={abs(yv):.3e})")
    if umax == 0:
        diags.append("input has no spectral content; QLTF table is empty")
    return QltfTable(n, keys[valid], u[valid], y[valid], y[valid] / u[valid], tuple(diags))


@dataclass(frozen=True)
class OutputSpectrum:
    """Total output line spectrum, sum over orders of ``Y_n``."""

    omega: np.ndarray
    values: np.ndarray

    def __getitem__(self, w: float) -> complex:
        i = np.flatnonzero(np.abs(self.omega - w) <= _key_tol(self.omega))
        return complex(self.values[i[0]]) if len(i) else 0j


def output_spectrum(signal: MultitoneSignal, hs: list[KernelTransferFunction]) -> OutputSpectrum:
    orders = sorted(h.order for h in hs)
    if orders != list(range(1, len(hs) + 1)):
        raise ValueError(f"need each order 1..N exactly once, got {orders}")
    sums, vals = [], []
    for h in sorted(hs, key=lambda h: h.order):
        ycoef = output_spectral_coeffs(signal, h)
        sums.append(ycoef.omega)
        vals.append(ycoef.values)
    allw = np.concatenate(sums)
    tol = signal.rel_tol * max(1.0, float(np.max(np.abs(allw))))
    keys, (total,) = _accumulate(allw, [np.concatenate(vals)], tol)
    order = np.argsort(keys)
    return OutputSpectrum(keys[order], total[order])


@dataclass(frozen=True)
class FingerprintReport:
    """Per-frequency comparison of two QLTF tables of the same order."""

    order: int
    omega: np.ndarray
    mag_ratio: np.ndarray
    phase_delta_deg: np.ndarray
    unmatched: tuple[float, ...] = ()

    @property
    def max_mag_deviation(self) -> float:
        """Largest ``|ratio - 1|``."""
        return float(np.max(np.abs(self.mag_ratio - 1.0))) if len(self.omega) else 0.0

    @property
    def max_phase_deviation_deg(self) -> float:
        return float(np.max(np.abs(self.phase_delta_deg))) if len(self.omega) else 0.0


def compare_fingerprints(baseline: QltfTable, probe: QltfTable) -> FingerprintReport:
    """Magnitude ratio probe/baseline and wrapped phase difference at every common frequency."""
    if baseline.order != probe.order:
        raise ValueError(f"order mismatch: baseline {baseline.order}, probe {probe.order}")
    tol = _key_tol(np.concatenate([baseline.omega, probe.omega]))
    common, ib, ip = [], [], []
    for i, w in enumerate(baseline.omega):
        j = np.flatnonzero(np.abs(probe.omega - w) <= tol)
        if len(j):
            common.append(w)
            ib.append(i)
            ip.append(j[0])
    if not common:
        raise ValueError("baseline and probe share no frequencies")
    unmatched = sorted(
        {float(w) for k, w in enumerate(baseline.omega) if k not in ib}
        | {float(w) for k, w in enumerate(probe.omega) if k not in ip}
    )
    gb, gp = baseline.g[ib], probe.g[ip]
    ratio = np.abs(gp) / np.abs(gb)
    delta = wrap_deg(phase_deg(gp) - phase_deg(gb))
    return FingerprintReport(baseline.order, np.asarray(common), ratio, np.atleast_1d(delta), tuple(unmatched))
