"""Generalised frequency response functions (GFRFs).

A :class:`KernelTransferFunction` wraps an order-n evaluator
``H_n(jw_1, ..., jw_n)``. Built-in closed forms cover the quadratic/cubic
stiffness oscillator

    y'' + 2 zeta wn y' + wn^2 y + eps2 wn^2 y^2 + eps3 wn^2 y^3 = u(t)

up to third order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


class PoleError(ArithmeticError):
    """Raised when a transfer function is evaluated exactly on a pole."""

    def __init__(self, message: str, frequencies=None):
        super().__init__(message)
        self.frequencies = frequencies


@dataclass(frozen=True)
class KernelTransferFunction:
    """Order-n GFRF evaluator.

    Parameters
    ----------
    order : int
        Number of frequency arguments.
    evaluator : callable
        ``evaluator(w_1, ..., w_n) -> complex`` with frequencies in rad/s.
    vectorized : bool
        If True the evaluator accepts equal-shape numpy arrays for every
        argument and returns an array of that shape.
    """

    order: int
    evaluator: Callable[..., complex]
    vectorized: bool = False
    name: str = ""

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 1:
            raise ValueError("GFRF order must be an integer >= 1")

    def __call__(self, *w) -> complex:
        if len(w) != self.order:
            raise TypeError(f"order-{self.order} GFRF called with {len(w)} arguments")
        r = np.asarray(self.evaluator(*(float(x) for x in w)), dtype=complex)
        if r.size != 1:
            raise ValueError(f"GFRF evaluator returned {r.size} values for one frequency tuple")
        return complex(r.reshape(-1)[0])

    def evaluate_many(self, args: np.ndarray) -> np.ndarray:
        """Evaluate on an ``(m, order)`` array of frequency tuples."""
        args = np.asarray(args, dtype=float).reshape(-1, self.order)
        if self.vectorized:
            out = np.asarray(self.evaluator(*args.T), dtype=complex)
            return np.broadcast_to(out, (len(args),)).copy()
        return np.array([self(*row) for row in args], dtype=complex)


def constant_kernel(order: int, value: complex = 1.0) -> KernelTransferFunction:
    """``H_n`` identically equal to ``value``."""

    def h(*w):
        return np.full(np.shape(w[0]), complex(value))

    return KernelTransferFunction(order, h, vectorized=True, name=f"constant({value})")


@dataclass(frozen=True)
class PhysicalParams:
    M: float
    D: float
    K1: float
    K2: float = 0.0
    K3: float = 0.0


@dataclass(frozen=True)
class DuffingParams:
    """Standard-form oscillator parameters (natural frequency, damping ratio, stiffness ratios)."""

    wn: float
    zeta: float
    eps2: float = 0.0
    eps3: float = 0.0

    def __post_init__(self):
        if not self.wn > 0:
            raise ValueError("wn must be positive")
        if not self.zeta >= 0:
            raise ValueError("zeta must be non-negative")


def normalize(p: PhysicalParams) -> DuffingParams:
    if not p.M > 0 or not p.K1 > 0:
        raise ValueError("M and K1 must be positive")
    if p.D < 0:
        raise ValueError("D must be non-negative")
    return DuffingParams(
        wn=math.sqrt(p.K1 / p.M),
        zeta=p.D / (2.0 * math.sqrt(p.M * p.K1)),
        eps2=p.K2 / p.K1,
        eps3=p.K3 / p.K1,
    )


def _h1(dp: DuffingParams, w):
    jw = 1j * np.asarray(w, dtype=float)
    den = jw * jw + 2.0 * dp.zeta * dp.wn * jw + dp.wn**2
    if np.any(den == 0):
        bad = np.asarray(w)[den == 0] if np.ndim(den) else w
        raise PoleError(f"H1 evaluated on its pole at w = {np.ravel(bad)[0]:g} rad/s", np.ravel(bad))
    return 1.0 / den


def _h2(dp: DuffingParams, w1, w2):
    return -dp.eps2 * dp.wn**2 * _h1(dp, w1) * _h1(dp, w2) * _h1(dp, np.add(w1, w2))


def _h3(dp: DuffingParams, w1, w2, w3):
    h1a, h1b, h1c = _h1(dp, w1), _h1(dp, w2), _h1(dp, w3)
    quad = h1a * _h2(dp, w2, w3) + h1b * _h2(dp, w3, w1) + h1c * _h2(dp, w1, w2)
    cubic = h1a * h1b * h1c
    total = np.add(np.add(w1, w2), w3)
    return -(dp.wn**2 / 6.0) * (4.0 * dp.eps2 * quad + 6.0 * dp.eps3 * cubic) * _h1(dp, total)


def duffing_h1(dp: DuffingParams, w: float) -> complex:
    return complex(_h1(dp, w))


def duffing_h2(dp: DuffingParams, w1: float, w2: float) -> complex:
    return complex(_h2(dp, w1, w2))


def duffing_h3(dp: DuffingParams, w1: float, w2: float, w3: float) -> complex:
    return complex(_h3(dp, w1, w2, w3))


_DUFFING = {1: _h1, 2: _h2, 3: _h3}


def duffing_kernel(dp: DuffingParams, order: int) -> KernelTransferFunction:
    """Closed-form oscillator GFRF of the given order (1, 2 or 3)."""
    try:
        f = _DUFFING[order]
    except KeyError:
        raise ValueError(f"closed-form oscillator GFRFs exist for orders 1-3, not {order}") from None
    return KernelTransferFunction(order, lambda *w: f(dp, *w), vectorized=True, name=f"duffing_h{order}")


def symmetrize(h: KernelTransferFunction) -> KernelTransferFunction:
    """Average ``h`` over all permutations of its arguments."""
    n = h.order
    if n == 1:
        return h
    perms = list(itertools.permutations(range(n)))

    def sym(*w):
        acc = 0
        for p in perms:
            acc = acc + np.asarray(h.evaluator(*(w[i] for i in p)), dtype=complex)
        return acc / len(perms)

    return KernelTransferFunction(n, sym, vectorized=h.vectorized, name=f"sym({h.name})")
