import cmath
import itertools
import math

import numpy as np
import pytest

from helpers import random_signal, random_smooth_kernel
from qltf.freq_range import multitone_output_freqs_full
from qltf.gfrf import DuffingParams, KernelTransferFunction, PoleError, constant_kernel, duffing_kernel
from qltf.multitone import (
    BMap,
    compare_fingerprints,
    input_spectral_coeffs,
    output_spectral_coeffs,
    output_spectrum,
    qltf,
)
from qltf.spectral_core import FrequencySet, MultitoneSignal, line_spectrum

# order-3 G values of the two-tone example, from a plain-Python tuple loop
G3_FROZEN = {
    -22.5: complex(3.861790230462616, 3.2666842932647344),
    -17.5: complex(10.429918447076766, -12.568588018578206),
    -12.5: complex(-4.266534708278748, -9.719430707678002),
    -7.5: complex(2.0926946703414546, 8.509999032517864),
    -2.5: complex(3.8166881160496553, 14.624769939769706),
}


def brute(signal, h, n):
    """Dict frequency -> (U_n, Y_n) by explicit signed-tuple loops."""
    lines = []
    for tn in signal.tones:
        a = tn.magnitude * cmath.exp(1j * tn.phase)
        lines += [(tn.frequency, a), (-tn.frequency, a.conjugate())]
    out = {}
    for tup in itertools.product(lines, repeat=n):
        w = round(sum(x for x, _ in tup), 9) + 0.0
        amp = math.prod(a for _, a in tup) * math.pi / 2 ** (n - 1)
        hv = h(*(x for x, _ in tup)) if h is not None else 0
        u, y = out.get(w, (0, 0))
        out[w] = (u + amp, y + amp * hv)
    return out


def test_bmap_lookup(two_tone):
    b = BMap(two_tone)
    assert b(2.5) == 0.25 and b(-7.5) == 0.75 and b(5.0) == 0


def test_u2_known_values(two_tone):
    u2 = input_spectral_coeffs(two_tone, 2)
    assert abs(u2[15]) == pytest.approx(math.pi / 2 * 0.75**2, rel=1e-12)
    assert abs(u2[15]) == pytest.approx(0.8836, abs=1e-4)
    assert u2[0] == pytest.approx(0.625 * math.pi, rel=1e-12)
    assert u2[0] == pytest.approx(1.9635, abs=1e-4)


def test_order_one_matches_line_spectrum():
    rng = np.random.default_rng(3)
    for _ in range(5):
        s = random_signal(rng)
        u1 = input_spectral_coeffs(s, 1)
        ls = line_spectrum(s)
        assert np.allclose(u1.omega, ls.frequencies)
        assert np.allclose(u1.values, ls.coefficients, rtol=1e-14)


def test_constant_kernel_gives_constant_qltf(two_tone):
    for n in (1, 2, 3):
        t = qltf(two_tone, constant_kernel(n, 2.5 - 1j))
        assert np.allclose(t.g, 2.5 - 1j, rtol=1e-12)
        t1 = qltf(two_tone, constant_kernel(n, 1.0))
        assert np.allclose(t1.y, t1.u, rtol=1e-14)


def test_y2_at_dc_is_negative_real(two_tone, paper_params):
    y2 = output_spectral_coeffs(two_tone, duffing_kernel(paper_params, 2))
    u2 = input_spectral_coeffs(two_tone, 2)
    assert y2[0].real < 0 and abs(y2[0].imag) < 1e-12 * abs(y2[0])
    assert abs(y2[0]) / abs(u2[0]) == pytest.approx(0.4321, abs=5e-5)


TABLE3 = [
    (-15, 0.3637, 24.35),
    (-10, 1.1515, -68.02),
    (-5, 0.2820, -157.27),
    (0, 0.4321, 180.0),
    (5, 0.2820, 157.27),
    (10, 1.1515, 68.02),
    (15, 0.3637, -24.35),
]


def test_table3(two_tone, paper_params):
    t = qltf(two_tone, duffing_kernel(paper_params, 2))
    assert t.omega.tolist() == [w for w, _, _ in TABLE3]
    assert np.allclose(t.magnitude, [m for _, m, _ in TABLE3], atol=5e-4)
    assert np.allclose(t.phase_deg, [p for _, _, p in TABLE3], atol=0.05)


def test_matches_brute_force_oracle(two_tone, paper_params):
    for n in (2, 3):
        h = duffing_kernel(paper_params, n)
        ref = brute(two_tone, h, n)
        t = qltf(two_tone, h)
        assert len(t) == len(ref)
        for w, u, y, g in t.rows():
            ru, ry = ref[round(float(w), 9) + 0.0]
            assert u == pytest.approx(ru, rel=1e-12)
            assert y == pytest.approx(ry, rel=1e-12)


def test_order3_frozen(two_tone, paper_params):
    t = qltf(two_tone, duffing_kernel(paper_params, 3))
    assert len(t) == 10
    for w, g in G3_FROZEN.items():
        assert t.row(w)[2] == pytest.approx(g, rel=1e-10)
        assert t.row(-w)[2] == pytest.approx(g.conjugate(), rel=1e-10)


@pytest.mark.parametrize("seed", range(6))
def test_random_against_brute_force(seed):
    rng = np.random.default_rng(100 + seed)
    s = random_signal(rng, K=int(rng.integers(1, 4)))
    n = int(rng.integers(1, 4))
    h = random_smooth_kernel(rng, n)
    ref = brute(s, lambda *w: complex(h(*w)), n)
    u = input_spectral_coeffs(s, n)
    y = output_spectral_coeffs(s, h)
    for w, (ru, ry) in ref.items():
        assert abs(u[w] - ru) <= 1e-11 * max(1, abs(ru))
        assert abs(y[w] - ry) <= 1e-11 * max(1, abs(ry))


def test_output_spectrum_support(two_tone, paper_params):
    hs = [duffing_kernel(paper_params, n) for n in (1, 2, 3)]
    for N in (1, 2, 3):
        spec = output_spectrum(two_tone, hs[:N])
        expected = set()
        for n in range(1, N + 1):
            expected |= set(multitone_output_freqs_full([2.5, 7.5], n))
        assert FrequencySet.from_values(spec.omega) == sorted(expected)
    total = output_spectrum(two_tone, hs)
    y1 = output_spectral_coeffs(two_tone, hs[0])
    y3 = output_spectral_coeffs(two_tone, hs[2])
    for w in (-7.5, -2.5, 2.5, 7.5):
        assert total[w] == pytest.approx(y1[w] + y3[w], rel=1e-12)


def test_output_spectrum_requires_contiguous_orders(two_tone, paper_params):
    with pytest.raises(ValueError):
        output_spectrum(two_tone, [duffing_kernel(paper_params, 1), duffing_kernel(paper_params, 3)])


def test_domain_matches_frequency_set():
    rng = np.random.default_rng(7)
    for _ in range(10):
        s = random_signal(rng)
        n = int(rng.integers(1, 4))
        u = input_spectral_coeffs(s, n)
        assert FrequencySet.from_values(u.omega) == multitone_output_freqs_full(s.frequencies, n)


def test_compare_eps2_ratio(two_tone):
    hi = qltf(two_tone, duffing_kernel(DuffingParams(10, 0.1, 1e3, 5e5), 2))
    lo = qltf(two_tone, duffing_kernel(DuffingParams(10, 0.1, 1e2, 5e5), 2))
    rep = compare_fingerprints(hi, lo)
    assert np.allclose(rep.mag_ratio, 0.1, atol=1e-12)
    assert np.allclose(rep.phase_delta_deg, 0, atol=1e-9)
    assert rep.max_mag_deviation == pytest.approx(0.9)
    assert rep.unmatched == ()


def test_compare_errors(two_tone, paper_params):
    t2 = qltf(two_tone, duffing_kernel(paper_params, 2))
    t3 = qltf(two_tone, duffing_kernel(paper_params, 3))
    with pytest.raises(ValueError, match="order"):
        compare_fingerprints(t2, t3)
    other = qltf(MultitoneSignal.from_arrays([1.0], [100.0]), constant_kernel(3))
    with pytest.raises(ValueError, match="share no"):
        compare_fingerprints(t3, other)


def test_compare_records_unmatched(two_tone, paper_params):
    t = qltf(two_tone, duffing_kernel(paper_params, 2))
    s2 = MultitoneSignal.from_arrays([0.25, 0.75], [2.5, 12.5])
    rep = compare_fingerprints(t, qltf(s2, duffing_kernel(paper_params, 2)))
    assert rep.unmatched == (-25.0, 25.0)
    assert 10.0 in rep.omega


def test_cancellation_is_reported():
    # U_2 at 3 rad/s: 2*A1*A2 (tuples (1,2),(2,1)) + 2*A4*conj(A1) (tuples (4,-1),(-1,4))
    s = MultitoneSignal.from_arrays([1.0, 1.0, 1.0], [1.0, 2.0, 4.0], [0.0, 0.0, math.pi])
    u2 = input_spectral_coeffs(s, 2)
    assert abs(u2[3.0]) < 1e-12

    def h(w1, w2):
        return np.where(np.asarray(w1) * np.asarray(w2) > 0, 1.0, 2.0) + 0j

    t = qltf(s, KernelTransferFunction(2, h, vectorized=True))
    assert 3.0 not in FrequencySet.from_values(t.omega)
    assert any("omega=3" in d for d in t.diagnostics)


def test_pole_reports_tuple():
    s = MultitoneSignal.from_arrays([1.0], [2.0])

    def h(w1, w2):
        if w1 + w2 == 0:
            raise PoleError("pole at dc")
        return 1.0

    with pytest.raises(PoleError, match="tone tuple"):
        qltf(s, KernelTransferFunction(2, h))


def test_duffing_pole_at_resonance_undamped():
    s = MultitoneSignal.from_arrays([1.0], [10.0])
    with pytest.raises(PoleError):
        qltf(s, duffing_kernel(DuffingParams(10, 0.0, 1.0), 1))


def test_guard():
    s = MultitoneSignal.from_arrays(np.ones(8), np.arange(1, 9))
    with pytest.raises(ValueError, match="guard"):
        input_spectral_coeffs(s, 7)
