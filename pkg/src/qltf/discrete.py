"""Discrete-time QLTF pipeline on N-point DFT grids.

Everything here is circular: signals are treated as one period of an
N-periodic sequence, and bin indices wrap modulo N. Under that convention
the chain

    y_n[k] = sum h_n[i_1..i_n] u[k-i_1]...u[k-i_n]
           = idft( Y_n[m] ),
    Y_n[m] = N^(1-n) sum_{m_1..m_{n-1}} H_n[m_1..m_n] U[m_1]...U[m_n],  m_n = m - sum m_i (mod N)

holds exactly. Bin ``m`` maps to ``w = 2 pi m / (N T)`` rad/s, with bins above
N/2 reported as negative frequencies.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .gfrf import KernelTransferFunction, PoleError
from .spectral_core import phase_deg

MAX_INNER = 10**7
DEFAULT_TAU = 1e-8


@dataclass(frozen=True)
class SampledSignal:
    samples: np.ndarray
    sample_interval: float = 1.0

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=float).ravel()
        if len(x) == 0:
            raise ValueError("a sampled signal needs at least one sample")
        if not np.all(np.isfinite(x)):
            raise ValueError("samples must be finite")
        if not self.sample_interval > 0:
            raise ValueError("sample interval must be positive")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)

    @property
    def N(self) -> int:
        return len(self.samples)

    def bin_frequencies(self) -> np.ndarray:
        return bin_frequencies(self.N, self.sample_interval)


def bin_frequencies(N: int, T: float) -> np.ndarray:
    """Real frequency (rad/s) of each bin, bins above N/2 mapped to negative."""
    m = np.arange(N)
    signed = np.where(m > N / 2, m - N, m)
    return 2.0 * np.pi * signed / (N * T)


@dataclass(frozen=True)
class DiscreteKernel:
    """Finite-support kernel ``h_n[i_1..i_n]``, indices ``0..L-1``."""

    values: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.values, dtype=float)
        if h.ndim < 1:
            raise ValueError("kernel needs at least one dimension")
        if len(set(h.shape)) != 1:
            raise ValueError(f"kernel must have equal extent in every dimension, got {h.shape}")
        if not np.all(np.isfinite(h)):
            raise ValueError("kernel entries must be finite")
        h = h.copy()
        h.setflags(write=False)
        object.__setattr__(self, "values", h)

    @property
    def order(self) -> int:
        return self.values.ndim

    @property
    def memory(self) -> int:
        return self.values.shape[0]

    def transfer_function(self, sample_interval: float = 1.0) -> KernelTransferFunction:
        """GFRF ``sum h[i] exp(-j T (w_1 i_1 + ... + w_n i_n))`` as a continuous-frequency evaluator."""
        h = self.values
        n, L = self.order, self.memory
        lags = np.arange(L)

        def H(*w):
            w = [np.atleast_1d(np.asarray(x, dtype=float)) for x in w]
            X = np.broadcast_to(h.astype(complex), (len(w[0]),) + h.shape)
            for wi in reversed(w):
                E = np.exp(-1j * sample_interval * np.outer(wi, lags))
                X = np.einsum("t...i,ti->t...", X, E)
            return X

        return KernelTransferFunction(n, H, vectorized=True, name=f"kernel(order={n}, L={L})")

    def to_dict(self) -> dict:
        return {"order": self.order, "memory": self.memory, "values": self.values.ravel().tolist()}

    @classmethod
    def from_dict(cls, doc: dict) -> "DiscreteKernel":
        try:
            n, L, vals = int(doc["order"]), int(doc["memory"]), doc["values"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"kernel document needs integer 'order', 'memory' and a 'values' list: {exc}") from exc
        if n < 1 or L < 1:
            raise ValueError("kernel order and memory must be >= 1")
        if len(vals) != L**n:
            raise ValueError(f"kernel of order {n}, memory {L} needs {L ** n} values, got {len(vals)}")
        return cls(np.asarray(vals, dtype=float).reshape((L,) * n))


def load_kernel(path) -> DiscreteKernel:
    """Read a kernel document (JSON object with ``order``, ``memory``, row-major ``values``)."""
    with open(path) as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: malformed kernel document: {exc}") from exc
    return DiscreteKernel.from_dict(doc)


def save_kernel(kernel: DiscreteKernel, path) -> None:
    Path(path).write_text(json.dumps(kernel.to_dict()) + "\n")


def load_signal(path) -> SampledSignal:
    """Single-column CSV whose header line is ``sample_interval=<T>``."""
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("sample_interval="):
        raise ValueError(f"{path}: first line must be 'sample_interval=<seconds>'")
    try:
        T = float(lines[0].split("=", 1)[1])
        x = [float(ln.split(",")[0]) for ln in lines[1:]]
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc
    return SampledSignal(np.array(x), T)


def save_signal(signal: SampledSignal, path) -> None:
    body = "\n".join(repr(float(x)) for x in signal.samples)
    Path(path).write_text(f"sample_interval={signal.sample_interval!r}\n{body}\n")


def dft(x) -> np.ndarray:
    """``X[m] = sum_k x[k] exp(-j 2 pi m k / N)``."""
    if isinstance(x, SampledSignal):
        x = x.samples
    return np.fft.fft(np.asarray(x))


def idft(X) -> np.ndarray:
    """``x[k] = (1/N) sum_m X[m] exp(j 2 pi m k / N)``."""
    return np.fft.ifft(np.asarray(X))


def _shift_matrix(u: np.ndarray, L: int) -> np.ndarray:
    N = len(u)
    k = np.arange(N)[:, None]
    i = np.arange(L)[None, :]
    return u[(k - i) % N]


def volterra_response(kernel: DiscreteKernel, u: SampledSignal) -> np.ndarray:
    """Order-n output with ``u`` extended N-periodically; length N."""
    N = u.N
    if kernel.memory > N:
        raise ValueError(f"kernel memory {kernel.memory} exceeds signal length {N}")
    S = _shift_matrix(u.samples, kernel.memory)
    X = np.broadcast_to(kernel.values, (N,) + kernel.values.shape)
    for _ in range(kernel.order):
        X = np.einsum("k...i,ki->k...", X, S)
    return X


def input_spectral_dft(u: SampledSignal, n: int) -> np.ndarray:
    """``U_n[m]``: DFT of the pointwise nth power of ``u``.

    Equal to the (n-1)-fold circular self-convolution of ``U`` scaled by ``N^(1-n)``.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"order must be an integer >= 1, got {n}")
    return dft(u.samples ** int(n))


def _bin_evaluator(h, u: SampledSignal):
    """Return (order, fn) with fn(bins (T, n) int array) -> H_n at those bins."""
    if isinstance(h, DiscreteKernel):
        if h.memory > u.N:
            raise ValueError(f"kernel memory {h.memory} exceeds signal length {u.N}")
        tf = h.transfer_function(u.sample_interval)
    elif isinstance(h, KernelTransferFunction):
        tf = h
    else:
        raise TypeError("expected a DiscreteKernel or KernelTransferFunction")
    freqs = u.bin_frequencies()
    return tf.order, lambda bins: tf.evaluate_many(freqs[bins])


def output_spectral_dft(h, u: SampledSignal) -> np.ndarray:
    """``Y_n[m]`` for every bin, from a kernel array or a continuous GFRF sampled at bin frequencies."""
    n, Hbins = _bin_evaluator(h, u)
    N = u.N
    if N ** (n - 1) > MAX_INNER:
        raise ValueError(f"N^(n-1) = {N ** (n - 1)} exceeds the guard of {MAX_INNER}")
    U = dft(u)
    if n == 1:
        return Hbins(np.arange(N)[:, None]) * U
    inner = np.indices((N,) * (n - 1)).reshape(n - 1, -1).T
    partial = np.prod(U[inner], axis=1)
    partial_sum = inner.sum(axis=1)
    Y = np.empty(N, dtype=complex)
    for m in range(N):
        last = (m - partial_sum) % N
        bins = np.column_stack([inner, last])
        try:
            Hv = Hbins(bins)
        except PoleError as exc:
            raise PoleError(f"{exc} (output bin {m})", exc.frequencies) from exc
        Y[m] = np.sum(Hv * partial * U[last]) / N ** (n - 1)
    return Y


@dataclass(frozen=True)
class DqltfTable:
    order: int
    N: int
    sample_interval: float
    bins: np.ndarray
    u: np.ndarray
    y: np.ndarray
    g: np.ndarray
    tau: float
    diagnostics: tuple[str, ...] = ()

    def __len__(self):
        return len(self.bins)

    @property
    def omega(self) -> np.ndarray:
        return bin_frequencies(self.N, self.sample_interval)[self.bins]

    @property
    def phase_deg(self) -> np.ndarray:
        return phase_deg(self.g)

    def at_bin(self, m: int) -> complex:
        i = np.flatnonzero(self.bins == m)
        if not len(i):
            raise KeyError(m)
        return complex(self.g[i[0]])


def leakage_report(freqs, N: int, T: float, rel_tol: float = 1e-9) -> list[str]:
    """Warnings for analysis frequencies that do not sit on a DFT bin."""
    step = 2.0 * np.pi / (N * T)
    out = []
    for w in freqs:
        m = round(w / step)
        err = abs(w - m * step)
        if err > rel_tol * max(1.0, abs(w)):
            out.append(f"leakage: {w:g} rad/s is off-bin; nearest bin {m} at {m * step:g} rad/s (error {err:.3g} rad/s)")
    return out


def dqltf(h, u: SampledSignal, tau: float = DEFAULT_TAU, analysis_freqs=()) -> DqltfTable:
    """DQLTF ``G_n[m] = Y_n[m] / U_n[m]`` on bins where ``|U_n| > tau * max|U_n|``."""
    n, _ = _bin_evaluator(h, u)
    diags = leakage_report(analysis_freqs, u.N, u.sample_interval)
    Un = input_spectral_dft(u, n)
    umax = float(np.max(np.abs(Un)))
    if umax == 0:
        diags.append("input has no spectral content; DQLTF table is empty")
        empty = np.zeros(0, dtype=complex)
        return DqltfTable(n, u.N, u.sample_interval, np.zeros(0, dtype=int), empty, empty, empty, tau, tuple(diags))
    Yn = output_spectral_dft(h, u)
    ymax = float(np.max(np.abs(Yn)))
    valid = np.abs(Un) > tau * umax
    for m in np.flatnonzero(~valid):
        if ymax > 0 and abs(Yn[m]) > tau * ymax:
            diags.append(f"DQLTF undefined at bin {m}: |U_n| below threshold but |Y_n|={abs(Yn[m]):.3e}")
    bins = np.flatnonzero(valid)
    return DqltfTable(n, u.N, u.sample_interval, bins, Un[bins], Yn[bins], Yn[bins] / Un[bins], tau, tuple(diags))


def sample_multitone(signal, N: int, T: float) -> SampledSignal:
    """Sample a :class:`~qltf.spectral_core.MultitoneSignal` at ``t = k T``, ``k = 0..N-1``."""
    return SampledSignal(np.asarray(signal(np.arange(N) * T)), T)
