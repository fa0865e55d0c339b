import itertools
import math

import numpy as np
import pytest

from qltf.discrete import (
    DiscreteKernel,
    SampledSignal,
    bin_frequencies,
    dft,
    dqltf,
    idft,
    input_spectral_dft,
    leakage_report,
    load_kernel,
    load_signal,
    output_spectral_dft,
    sample_multitone,
    save_kernel,
    save_signal,
    volterra_response,
)
from qltf.gfrf import DuffingParams, constant_kernel, duffing_kernel
from qltf.spectral_core import MultitoneSignal


def direct_dft(x):
    N = len(x)
    return np.array([sum(x[k] * np.exp(-2j * np.pi * m * k / N) for k in range(N)) for m in range(N)])


def loop_response(h, u):
    N, L, n = len(u), h.shape[0], h.ndim
    out = np.zeros(N)
    for k in range(N):
        for idx in itertools.product(range(L), repeat=n):
            out[k] += h[idx] * math.prod(u[(k - i) % N] for i in idx)
    return out


def loop_output_spectrum(h, u):
    """Y_n[m] from the multiple circular convolution, nested loops."""
    N, n = len(u), h.ndim
    U = direct_dft(u)
    H = lambda ms: sum(h[idx] * np.exp(-2j * np.pi * sum(mi * ii for mi, ii in zip(ms, idx)) / N)
                       for idx in itertools.product(range(h.shape[0]), repeat=n))
    Y = np.zeros(N, dtype=complex)
    for m in range(N):
        for ms in itertools.product(range(N), repeat=n - 1):
            last = (m - sum(ms)) % N
            full = ms + (last,)
            Y[m] += H(full) * math.prod(U[j] for j in full)
        Y[m] /= N ** (n - 1)
    return Y


def test_dft_matches_direct_sum():
    rng = np.random.default_rng(0)
    for N in (1, 5, 8, 13):
        x = rng.normal(size=N)
        assert np.allclose(dft(x), direct_dft(x), atol=1e-12)
        assert np.allclose(idft(dft(x)).real, x, atol=1e-13)


def test_dft_impulse_and_constant():
    x = np.zeros(8)
    x[0] = 1
    assert np.allclose(dft(x), 1)
    X = dft(np.full(8, 3.0))
    assert X[0] == pytest.approx(24) and np.allclose(X[1:], 0)


def test_bin_frequencies():
    w = bin_frequencies(8, 0.5)
    step = 2 * np.pi / 4
    assert np.allclose(w, step * np.array([0, 1, 2, 3, 4, -3, -2, -1]))


def test_volterra_examples():
    u = SampledSignal([1.0, 2.0, 0.0, 0.0])
    h2 = np.zeros((2, 2))
    h2[0, 1] = h2[1, 0] = 0.5
    assert np.allclose(volterra_response(DiscreteKernel(h2), u), [0, 2, 0, 0])
    assert np.allclose(volterra_response(DiscreteKernel([1.0, 0.0]), u), u.samples)
    assert np.allclose(volterra_response(DiscreteKernel([0.0, 1.0]), u), [0, 1, 2, 0])


def test_volterra_against_loops():
    rng = np.random.default_rng(1)
    for n in (1, 2, 3):
        h = rng.normal(size=(3,) * n)
        u = rng.normal(size=7)
        assert np.allclose(volterra_response(DiscreteKernel(h), SampledSignal(u)), loop_response(h, u), atol=1e-12)


def test_input_spectral_matches_convolution():
    rng = np.random.default_rng(2)
    u = rng.normal(size=6)
    U = direct_dft(u)
    for n in (1, 2, 3):
        ref = np.zeros(6, dtype=complex)
        for ms in itertools.product(range(6), repeat=n):
            ref[sum(ms) % 6] += math.prod(U[m] for m in ms)
        ref /= 6 ** (n - 1)
        assert np.allclose(input_spectral_dft(SampledSignal(u), n), ref, atol=1e-10)


def test_cos_squared_bins():
    N = 16
    u = SampledSignal(np.cos(2 * np.pi * np.arange(N) / N))
    U2 = input_spectral_dft(u, 2)
    assert U2[0] == pytest.approx(N / 2)
    assert U2[2] == pytest.approx(N / 4) and U2[N - 2] == pytest.approx(N / 4)
    others = np.delete(U2, [0, 2, N - 2])
    assert np.allclose(others, 0, atol=1e-12)


def test_output_spectrum_against_loops():
    rng = np.random.default_rng(3)
    for n in (1, 2, 3):
        h = rng.normal(size=(2,) * n)
        u = rng.normal(size=5)
        Y = output_spectral_dft(DiscreteKernel(h), SampledSignal(u))
        assert np.allclose(Y, loop_output_spectrum(h, u), atol=1e-10)


@pytest.mark.parametrize("seed", range(8))
def test_chain_identity(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    L = int(rng.integers(1, 5))
    N = int(rng.integers(max(L, 2), 17 if n == 3 else 33))
    h = DiscreteKernel(rng.normal(size=(L,) * n))
    u = SampledSignal(rng.normal(size=N), rng.uniform(0.01, 1))
    y = volterra_response(h, u)
    yr = idft(output_spectral_dft(h, u))
    assert np.max(np.abs(yr - y)) <= 1e-8 * max(1.0, np.max(np.abs(y)))
    assert np.max(np.abs(yr.imag)) <= 1e-8 * max(1.0, np.max(np.abs(y)))


def test_g1_equals_h1():
    rng = np.random.default_rng(4)
    h = DiscreteKernel(rng.normal(size=4))
    u = SampledSignal(rng.normal(size=12), 0.1)
    t = dqltf(h, u)
    H = h.transfer_function(0.1).evaluate_many(u.bin_frequencies()[t.bins][:, None])
    assert np.allclose(t.g, H, rtol=1e-12, atol=0)


def test_unit_kernel_gives_unit_dqltf():
    rng = np.random.default_rng(5)
    u = SampledSignal(rng.normal(size=10), 0.2)
    for n in (1, 2, 3):
        t = dqltf(constant_kernel(n, 1.0), u)
        assert np.allclose(t.g, 1.0, rtol=1e-10)
        # a delta kernel at the origin is the discrete counterpart of H = 1
        delta = np.zeros((2,) * n)
        delta[(0,) * n] = 1.0
        t = dqltf(DiscreteKernel(delta), u)
        assert np.allclose(t.g, 1.0, rtol=1e-10)


def test_conjugate_bin_symmetry():
    rng = np.random.default_rng(6)
    u = SampledSignal(rng.normal(size=11))
    h = DiscreteKernel(rng.normal(size=(3, 3)))
    Y = output_spectral_dft(h, u)
    for m in range(1, 11):
        assert Y[11 - m] == pytest.approx(Y[m].conjugate(), abs=1e-10)


def test_zero_input_gives_empty_table():
    t = dqltf(DiscreteKernel(np.ones((2, 2))), SampledSignal(np.zeros(8)))
    assert len(t) == 0
    assert any("no spectral content" in d for d in t.diagnostics)


def test_invalid_bins_are_dropped():
    N = 16
    u = SampledSignal(np.cos(2 * np.pi * np.arange(N) / N))
    t = dqltf(DiscreteKernel(np.eye(2)), u)
    assert t.bins.tolist() == [0, 2, 14]


def test_two_tone_cross_check(two_tone, paper_params):
    N, T = 16, 2 * np.pi / (2.5 * 16)
    u = sample_multitone(two_tone, N, T)
    t = dqltf(duffing_kernel(paper_params, 2), u)
    assert t.omega[t.bins.tolist().index(4)] == pytest.approx(10.0)
    assert abs(t.at_bin(4)) == pytest.approx(1.1515, rel=1e-3)
    # every analytic row is reproduced on the grid
    for m, mag in [(0, 0.4321), (2, 0.2820), (4, 1.1515), (6, 0.3637), (10, 0.3637), (12, 1.1515), (14, 0.2820)]:
        assert abs(t.at_bin(m)) == pytest.approx(mag, abs=5e-4)


def test_leakage():
    assert leakage_report([2.5, 7.5], 16, 2 * np.pi / 40) == []
    msgs = leakage_report([3.0], 16, 2 * np.pi / 40)
    assert len(msgs) == 1 and "off-bin" in msgs[0]
    s = MultitoneSignal.from_arrays([1.0], [3.0])
    t = dqltf(constant_kernel(1), sample_multitone(s, 16, 2 * np.pi / 40), analysis_freqs=[3.0])
    assert any("leakage" in d for d in t.diagnostics)


def test_kernel_validation():
    with pytest.raises(ValueError):
        DiscreteKernel(np.ones((2, 3)))
    with pytest.raises(ValueError):
        DiscreteKernel.from_dict({"order": 2, "memory": 2, "values": [1, 2, 3]})
    with pytest.raises(ValueError):
        volterra_response(DiscreteKernel(np.ones(5)), SampledSignal(np.ones(3)))


def test_signal_validation():
    with pytest.raises(ValueError):
        SampledSignal([])
    with pytest.raises(ValueError):
        SampledSignal([1.0, np.nan])
    with pytest.raises(ValueError):
        SampledSignal([1.0], 0.0)


def test_guard():
    u = SampledSignal(np.ones(4000))
    with pytest.raises(ValueError, match="guard"):
        output_spectral_dft(DiscreteKernel(np.ones((1, 1, 1))), u)


def test_file_round_trip(tmp_path):
    rng = np.random.default_rng(9)
    k = DiscreteKernel(rng.normal(size=(3, 3)))
    save_kernel(k, tmp_path / "k.json")
    assert np.array_equal(load_kernel(tmp_path / "k.json").values, k.values)
    s = SampledSignal(rng.normal(size=9), 0.125)
    save_signal(s, tmp_path / "u.csv")
    back = load_signal(tmp_path / "u.csv")
    assert back.sample_interval == 0.125 and np.array_equal(back.samples, s.samples)


def test_bad_files(tmp_path):
    (tmp_path / "k.json").write_text("{nope")
    with pytest.raises(ValueError):
        load_kernel(tmp_path / "k.json")
    (tmp_path / "u.csv").write_text("1.0\n2.0\n")
    with pytest.raises(ValueError):
        load_signal(tmp_path / "u.csv")
