"""Value types shared by the whole package.

Tones, multitone signals, line spectra, tolerance-aware frequency sets and
closed interval unions. Complex quantities are plain Python/numpy
``complex`` values; every constructor here rejects NaN and Inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

DEFAULT_REL_TOL = 1e-9


def frequency_tolerance(freqs: Iterable[float] = (), rel_tol: float | None = None) -> float:
    """Absolute tolerance for frequency comparison: ``rel_tol * max(1, max|w|)``."""
    if rel_tol is None:
        rel_tol = DEFAULT_REL_TOL
    scale = max((abs(float(w)) for w in freqs), default=0.0)
    return rel_tol * max(1.0, scale)


def check_finite(value: complex, what: str = "value") -> complex:
    z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"{what} is not finite: {z!r}")
    return z


def phase_deg(z: complex | np.ndarray, atol: float = 1e-9) -> float | np.ndarray:
    """Phase in degrees on (-180, 180]; -180 is reported as +180."""
    d = np.degrees(np.angle(z))
    d = np.where(d <= -180.0 + atol, d + 360.0, d)
    return float(d) if np.ndim(d) == 0 else d


def wrap_deg(d: float | np.ndarray, atol: float = 1e-9) -> float | np.ndarray:
    """Wrap an angle difference in degrees onto (-180, 180]."""
    w = np.mod(np.asarray(d, dtype=float) + 180.0, 360.0) - 180.0
    w = np.where(w <= -180.0 + atol, w + 360.0, w)
    return float(w) if np.ndim(w) == 0 else w


@dataclass(frozen=True)
class Tone:
    """One cosine component ``magnitude * cos(frequency * t + phase)``."""

    magnitude: float
    phase: float
    frequency: float

    def __post_init__(self):
        for name in ("magnitude", "phase", "frequency"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"tone {name} must be finite")
        if self.magnitude < 0:
            raise ValueError("tone magnitude must be non-negative")
        if self.frequency <= 0:
            raise ValueError("tone frequency must be strictly positive")

    @property
    def amplitude(self) -> complex:
        """Complex amplitude ``|A| e^{j angle(A)}``."""
        return self.magnitude * complex(math.cos(self.phase), math.sin(self.phase))


@dataclass(frozen=True)
class MultitoneSignal:
    """K-tone real input with strictly increasing positive frequencies.

    The conjugate extension (``A_{-k} = conj(A_k)`` at ``-w_k``) is implied
    and produced on demand by :meth:`signed_lines`.
    """

    tones: tuple[Tone, ...]
    rel_tol: float = DEFAULT_REL_TOL

    def __post_init__(self):
        tones = tuple(self.tones)
        object.__setattr__(self, "tones", tones)
        if not tones:
            raise ValueError("a multitone signal needs at least one tone")
        freqs = [t.frequency for t in tones]
        tol = frequency_tolerance(freqs, self.rel_tol)
        for lo, hi in zip(freqs, freqs[1:]):
            if hi - lo <= tol:
                raise ValueError("tone frequencies must be strictly increasing and distinct")

    @classmethod
    def from_arrays(cls, magnitudes, frequencies, phases=None, rel_tol: float = DEFAULT_REL_TOL):
        mags = np.atleast_1d(np.asarray(magnitudes, dtype=float))
        freqs = np.atleast_1d(np.asarray(frequencies, dtype=float))
        phs = np.zeros_like(freqs) if phases is None else np.atleast_1d(np.asarray(phases, dtype=float))
        if not (len(mags) == len(freqs) == len(phs)):
            raise ValueError("magnitudes, frequencies and phases must have equal length")
        order = np.argsort(freqs, kind="stable")
        tones = tuple(Tone(float(mags[i]), float(phs[i]), float(freqs[i])) for i in order)
        return cls(tones, rel_tol)

    @property
    def K(self) -> int:
        return len(self.tones)

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([t.frequency for t in self.tones])

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([t.amplitude for t in self.tones])

    @property
    def tolerance(self) -> float:
        return frequency_tolerance(self.frequencies, self.rel_tol)

    def signed_lines(self) -> tuple[np.ndarray, np.ndarray]:
        """Frequencies and amplitudes for indices ``-K..-1, 1..K``."""
        w = self.frequencies
        a = self.amplitudes
        return np.concatenate([-w[::-1], w]), np.concatenate([np.conj(a[::-1]), a])

    def scaled(self, c: float) -> "MultitoneSignal":
        """Every tone amplitude multiplied by the real constant ``c``.

        A negative ``c`` is absorbed as a phase shift of pi.
        """
        if c == 0:
            raise ValueError("scale factor must be nonzero")
        shift = math.pi if c < 0 else 0.0
        return MultitoneSignal(
            tuple(Tone(t.magnitude * abs(c), t.phase + shift, t.frequency) for t in self.tones),
            self.rel_tol,
        )

    def __call__(self, t):
        """Evaluate the time signal at ``t`` (scalar or array)."""
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for tone in self.tones:
            out = out + tone.magnitude * np.cos(tone.frequency * t + tone.phase)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class LineSpectrum:
    """Discrete measure: frequency (rad/s) -> finite complex line weight."""

    frequencies: tuple[float, ...]
    coefficients: tuple[complex, ...]
    tolerance: float

    def __post_init__(self):
        if len(self.frequencies) != len(self.coefficients):
            raise ValueError("frequencies and coefficients differ in length")
        for c in self.coefficients:
            check_finite(c, "line coefficient")
        for lo, hi in zip(self.frequencies, self.frequencies[1:]):
            if hi - lo <= self.tolerance:
                raise ValueError("line frequencies must be sorted and separated by more than the tolerance")

    def __len__(self):
        return len(self.frequencies)

    def __getitem__(self, omega: float) -> complex:
        i = _find(self.frequencies, omega, self.tolerance)
        if i is None:
            return 0j
        return self.coefficients[i]

    def items(self) -> Iterator[tuple[float, complex]]:
        return zip(self.frequencies, self.coefficients)


def line_spectrum(signal: MultitoneSignal) -> LineSpectrum:
    """Line spectrum of a multitone signal: weight ``pi*A_k`` at ``w_k``, conjugate at ``-w_k``."""
    w, a = signal.signed_lines()
    return LineSpectrum(tuple(float(x) for x in w), tuple(complex(math.pi * z) for z in a), signal.tolerance)


def _find(sorted_vals: Sequence[float], x: float, tol: float) -> int | None:
    i = int(np.searchsorted(sorted_vals, x))
    for j in (i - 1, i):
        if 0 <= j < len(sorted_vals) and abs(sorted_vals[j] - x) <= tol:
            return j
    return None


def cluster_sorted(values: np.ndarray, tol: float) -> np.ndarray:
    """Cluster labels for ascending ``values``: a new cluster starts where the gap exceeds ``tol``."""
    if len(values) == 0:
        return np.zeros(0, dtype=int)
    return np.concatenate([[0], np.cumsum(np.diff(values) > tol)])


@dataclass(frozen=True, eq=False)
class FrequencySet:
    """Sorted set of frequencies, deduplicated and compared under an absolute tolerance."""

    values: tuple[float, ...]
    tolerance: float

    @classmethod
    def from_values(cls, values: Iterable[float], tolerance: float | None = None) -> "FrequencySet":
        v = np.sort(np.asarray(list(values), dtype=float))
        if tolerance is None:
            tolerance = frequency_tolerance(v)
        if len(v):
            labels = cluster_sorted(v, tolerance)
            first = np.concatenate([[True], labels[1:] != labels[:-1]])
            v = v[first]
            v[np.abs(v) <= tolerance] = 0.0
        return cls(tuple(float(x) for x in v), float(tolerance))

    def __post_init__(self):
        for lo, hi in zip(self.values, self.values[1:]):
            if hi - lo <= self.tolerance:
                raise ValueError("frequency set entries must be sorted and separated by more than the tolerance")

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def __contains__(self, x: float) -> bool:
        return _find(self.values, float(x), self.tolerance) is not None

    def __eq__(self, other) -> bool:
        if not isinstance(other, FrequencySet):
            try:
                other = FrequencySet.from_values(other, self.tolerance)
            except TypeError:
                return NotImplemented
        if len(self) != len(other):
            return False
        tol = max(self.tolerance, other.tolerance)
        return all(abs(a - b) <= tol for a, b in zip(self.values, other.values))

    __hash__ = None

    def nonnegative(self) -> "FrequencySet":
        return FrequencySet(tuple(v for v in self.values if v >= 0), self.tolerance)

    def mirrored(self) -> "FrequencySet":
        """Union of the set with its negation."""
        return FrequencySet.from_values([*self.values, *(-v for v in self.values)], self.tolerance)

    def __repr__(self):
        return f"FrequencySet({list(self.values)})"


@dataclass(frozen=True)
class IntervalUnion:
    """Canonical union of closed intervals: sorted, disjoint, non-adjacent."""

    intervals: tuple[tuple[float, float], ...] = ()

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def contains(self, x: float, atol: float = 0.0) -> bool:
        return any(lo - atol <= x <= hi + atol for lo, hi in self.intervals)

    def contains_all(self, xs, atol: float = 0.0) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        hit = np.zeros(xs.shape, dtype=bool)
        for lo, hi in self.intervals:
            hit |= (xs >= lo - atol) & (xs <= hi + atol)
        return hit

    def __neg__(self) -> "IntervalUnion":
        return normalize_interval_union([(-hi, -lo) for lo, hi in self.intervals])

    def clip_nonnegative(self) -> "IntervalUnion":
        """Intersection with ``[0, inf)``."""
        return normalize_interval_union([(max(lo, 0.0), hi) for lo, hi in self.intervals if hi >= 0])


def normalize_interval_union(raw: Iterable[Sequence[float]]) -> IntervalUnion:
    """Sort and merge closed intervals; touching endpoints merge."""
    pairs = []
    for item in raw:
        lo, hi = (float(x) for x in item)
        if lo > hi:
            raise ValueError(f"interval has lo > hi: [{lo}, {hi}]")
        pairs.append((lo, hi))
    pairs.sort()
    merged: list[list[float]] = []
    for lo, hi in pairs:
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return IntervalUnion(tuple((lo + 0.0, hi + 0.0) for lo, hi in merged))
