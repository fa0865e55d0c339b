"""Shared generators and the acceptance-summary sink."""

import numpy as np

from qltf.gfrf import KernelTransferFunction
from qltf.spectral_core import MultitoneSignal

ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, ok: bool, detail: str) -> None:
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def random_signal(rng, K=None):
    K = K or int(rng.integers(1, 5))
    freqs = np.sort(rng.uniform(0.5, 20.0, K))
    while np.any(np.diff(freqs) < 1e-3):
        freqs = np.sort(rng.uniform(0.5, 20.0, K))
    return MultitoneSignal.from_arrays(rng.uniform(0.1, 2.0, K), freqs, rng.uniform(-np.pi, np.pi, K))


def random_smooth_kernel(rng, n):
    """Real-coefficient rational GFRF: conj(H(-w)) == H(w), not permutation symmetric."""
    tau = rng.uniform(0.05, 1.0, n)
    s = rng.uniform(0.01, 0.2, n)
    tau0 = rng.uniform(0.05, 1.0)
    gain = rng.uniform(-3, 3)

    def h(*w):
        out = gain / (1 + 1j * tau0 * sum(w))
        for wi, ti, si in zip(w, tau, s):
            out = out / (1 + 1j * ti * wi - si * wi * wi)
        return out

    return KernelTransferFunction(n, h, vectorized=True, name="random-smooth")

