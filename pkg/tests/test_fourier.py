import numpy as np
import pytest

from ap3 import apcount
from ap3.fourier import (
    Spectrum,
    dft_forward,
    dft_inverse,
    lambda3_spectral,
    large_spectrum,
    spectrum_export_lines,
)
from ap3.gfspace import DensityFunction, GroupParams, PointSet
from ap3 import subspace as sub

from conftest import naive_dft, random_density


class TestForward:
    def test_constant(self):
        params = GroupParams(3, 2)
        c = dft_forward(DensityFunction.constant(params, 1.0)).coeffs
        assert c[0] == pytest.approx(9.0)
        assert np.abs(c[1:]).max() < 1e-12

    def test_delta(self):
        params = GroupParams(3, 2)
        vals = np.zeros(9)
        vals[0] = 1.0
        c = dft_forward(DensityFunction(params, vals)).coeffs
        assert np.abs(c - 1.0).max() < 1e-12

    def test_against_naive(self, rng):
        params = GroupParams(5, 2)
        f = random_density(params, rng)
        assert np.abs(dft_forward(f).coeffs - naive_dft(f)).max() < 1e-9

    def test_against_naive_p3_n3(self, rng):
        params = GroupParams(3, 3)
        f = random_density(params, rng)
        assert np.abs(dft_forward(f).coeffs - naive_dft(f)).max() < 1e-9

    def test_dc_coefficient(self, rng):
        params = GroupParams(3, 3)
        f = random_density(params, rng)
        c0 = dft_forward(f).coeffs[0]
        assert abs(c0 - f.values.sum()) < 1e-9 * params.size
        assert abs(c0.imag) < 1e-12

    def test_conjugate_symmetry(self, rng):
        from ap3.fourier import _neg_map

        params = GroupParams(5, 2)
        c = dft_forward(random_density(params, rng)).coeffs
        assert np.abs(c[_neg_map(5, 2)] - np.conj(c)).max() < 1e-10


class TestInverse:
    def test_roundtrip(self, rng):
        params = GroupParams(3, 3)
        f = random_density(params, rng)
        back = dft_inverse(dft_forward(f))
        assert np.abs(back.values - f.values).max() < 1e-10

    def test_dc_only(self):
        params = GroupParams(3, 2)
        c = np.zeros(9, dtype=complex)
        c[0] = 9.0
        f = dft_inverse(Spectrum(params, c))
        assert np.allclose(f.values, 1.0)

    def test_rejects_asymmetric(self):
        params = GroupParams(3, 1)
        c = np.array([1.0, 2.0j, 5.0], dtype=complex)
        with pytest.raises(ValueError, match="conjugate symmetry"):
            dft_inverse(Spectrum(params, c))


class TestParseval:
    @pytest.mark.parametrize("p,n", [(3, 2), (3, 4), (5, 3), (7, 2)])
    def test_parseval(self, p, n, rng):
        params = GroupParams(p, n)
        f = random_density(params, rng)
        lhs = float(np.sum(np.abs(dft_forward(f).coeffs) ** 2)) / params.size
        rhs = float(np.sum(f.values**2))
        assert lhs == pytest.approx(rhs, rel=1e-9)


class TestLambda3Spectral:
    def test_constant_one(self):
        f = DensityFunction.constant(GroupParams(3, 2), 1.0)
        assert lambda3_spectral(f) == pytest.approx(1.0)

    def test_single_point(self):
        params = GroupParams(3, 2)
        vals = np.zeros(9)
        vals[0] = 1.0
        assert lambda3_spectral(DensityFunction(params, vals)) == pytest.approx(1 / 81)

    def test_two_point_set(self):
        # {0, 1} in F_3: only d=0 progressions survive -> 2/9
        params = GroupParams(3, 1)
        f = PointSet(params, (0, 1)).density()
        assert lambda3_spectral(f) == pytest.approx(2 / 9, abs=1e-12)

    @pytest.mark.parametrize("p,n", [(3, 2), (3, 3), (5, 2)])
    def test_matches_direct(self, p, n, rng):
        params = GroupParams(p, n)
        for _ in range(5):
            f = random_density(params, rng)
            assert abs(lambda3_spectral(f) - apcount.lambda3_direct(f)) < 1e-9


class TestLargeSpectrum:
    def test_constant(self):
        f = DensityFunction.constant(GroupParams(3, 2), 1.0)
        assert large_spectrum(f, 0.5).members == (0,)

    def test_subspace_indicator(self):
        # indicator of span{(0,1)} in F_3^2: fhat is |W| on the annihilator
        params = GroupParams(3, 2)
        w = sub.span(params, [[0, 1]])
        f = PointSet(params, tuple(int(i) for i in w.elements())).density()
        a = large_spectrum(f, 0.2)
        annihilator = set(int(i) for i in sub.orthogonal_complement(w).elements())
        assert set(a.members) == annihilator
        assert len(a) == 3

    def test_above_max_is_empty(self, rng):
        f = random_density(GroupParams(3, 2), rng)
        assert large_spectrum(f, 1.01).members == ()

    def test_parseval_bound(self, rng):
        params = GroupParams(3, 3)
        for delta in [0.05, 0.1, 0.3]:
            for _ in range(5):
                f = random_density(params, rng)
                assert len(large_spectrum(f, delta)) <= delta**-2


class TestExport:
    def test_sorted_by_magnitude(self, rng):
        params = GroupParams(3, 2)
        f = random_density(params, rng)
        lines = spectrum_export_lines(dft_forward(f), 0.01)
        mags = []
        for line in lines:
            idx, re, im = line.split()
            mags.append(abs(complex(float(re), float(im))))
        assert mags == sorted(mags, reverse=True)
