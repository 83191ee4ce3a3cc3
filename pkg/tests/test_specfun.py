import math
import os
import subprocess
import sys

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from etstable.errors import DomainError, NonConvergence, PoleError
from etstable.specfun import (SpecFunResult, gamma, kummer_1f1, kummer_1f1_array, kummer_1f1_direct,
                              kummer_1f1m1_array, upper_incomplete_gamma)
from oracle_values import (GAMMA_M0001, GAMMA_M075, GAMMA_M150, KUMMER_LARGE_TABLE, KUMMER_M075_05_M2, KUMMER_TABLE,
                           UPPER_GAMMA_0_2, UPPER_GAMMA_13_07, UPPER_GAMMA_M05_1, UPPER_GAMMA_M15_05)


class TestGamma:
    def test_known_values(self):
        assert gamma(1.0) == 1.0
        assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-15)

    @pytest.mark.parametrize("x, ref", [(-0.75, GAMMA_M075), (-1.5, GAMMA_M150), (-0.001, GAMMA_M0001)])
    def test_negative_arguments(self, x, ref):
        assert gamma(x) == pytest.approx(ref, rel=1e-14)

    @pytest.mark.parametrize("x", [0.0, -1.0, -2.0, -7.0])
    def test_poles(self, x):
        with pytest.raises(PoleError):
            gamma(x)

    @given(st.floats(-5.9, 5.9).filter(lambda x: min(abs(x - round(x)), abs(x + 1 - round(x + 1))) > 1e-3))
    def test_recurrence(self, x):
        assert gamma(x + 1) == pytest.approx(x * gamma(x), rel=1e-13)


class TestUpperIncompleteGamma:
    def test_order_one_is_exponential(self):
        assert upper_incomplete_gamma(1.0, 2.0) == pytest.approx(math.exp(-2.0), rel=1e-15)

    def test_decreasing_in_x(self):
        vals = [upper_incomplete_gamma(-0.5, x) for x in (0.5, 1.0, 2.0)]
        assert vals[0] > vals[1] > vals[2] > 0

    @pytest.mark.parametrize("a, x, ref", [
        (-0.5, 1.0, UPPER_GAMMA_M05_1),
        (-1.5, 0.5, UPPER_GAMMA_M15_05),
        (0.0, 2.0, UPPER_GAMMA_0_2),
        (1.3, 0.7, UPPER_GAMMA_13_07),
    ])
    def test_quadrature_oracle(self, a, x, ref):
        assert upper_incomplete_gamma(a, x) == pytest.approx(ref, rel=1e-12)

    @pytest.mark.parametrize("a, x", [(0.5, 0.0), (0.5, -1.0), (2.0, 1.0), (-2.5, 1.0)])
    def test_domain(self, a, x):
        with pytest.raises(DomainError):
            upper_incomplete_gamma(a, x)


class TestKummer:
    def test_zero_argument(self):
        res = kummer_1f1(-0.3, 0.5, 0.0)
        assert res.value == 1.0 and res.terms_used == 1

    def test_exponential_case(self):
        assert kummer_1f1(1.0, 1.0, -1.0).value == pytest.approx(math.exp(-1.0), rel=1e-15)

    def test_high_precision_oracle(self):
        assert kummer_1f1(-0.75, 0.5, -2.0).value == pytest.approx(KUMMER_M075_05_M2, rel=1e-13)

    @pytest.mark.parametrize("a, b, z, ref", KUMMER_TABLE)
    def test_table(self, a, b, z, ref):
        res = kummer_1f1(a, b, z)
        assert res.value == pytest.approx(ref, rel=1e-11)
        assert res.est_error <= 1e-12 * abs(res.value) + 1e-300
        assert res.terms_used <= 500

    @settings(max_examples=60, deadline=None)
    @given(st.floats(-50.0, 0.0), st.sampled_from([(-0.25, 0.5), (-0.85, 0.5), (0.2, 1.5), (0.45, 1.5)]))
    def test_transformed_series_matches_mpmath(self, z, ab):
        a, b = ab
        ref = float(mp.hyp1f1(a, b, z))
        assert kummer_1f1(a, b, z).value == pytest.approx(ref, rel=1e-11)

    @given(st.floats(-10.0, 0.0))
    def test_direct_and_transformed_agree(self, z):
        direct = kummer_1f1_direct(-0.6, 0.5, z)
        assert kummer_1f1(-0.6, 0.5, z).value == pytest.approx(direct, rel=1e-10)

    def test_positive_argument_rejected(self):
        with pytest.raises(DomainError):
            kummer_1f1(0.5, 0.5, 1.0)

    def test_budget_exhaustion(self):
        with pytest.raises(NonConvergence):
            kummer_1f1(-0.5, 0.5, -30.0, max_terms=10)
        with pytest.raises(NonConvergence):
            kummer_1f1(-0.25, 0.5, -1.0e4, max_terms=2)

    @pytest.mark.parametrize("a, b, z, ref", KUMMER_LARGE_TABLE)
    def test_large_argument(self, a, b, z, ref, kernel_module):
        val = kernel_module.hyp1f1_neg(a, b, np.array([z]))[0][0]
        assert val == pytest.approx(ref, rel=1e-13)

    def test_large_argument_switch_is_continuous(self, kernel_module):
        z = np.array([-50.0 + 1e-9, -50.0, -50.0 - 1e-9])
        v = kernel_module.hyp1f1_neg(-0.75, 0.5, z)[0]
        assert abs(v[0] - 2 * v[1] + v[2]) <= 1e-13 * abs(v[1])

    def test_result_validation(self):
        with pytest.raises(NonConvergence):
            SpecFunResult(float("nan"), 0.0, 1)

    def test_minus_one_variant_has_no_cancellation(self):
        z = np.array([-1e-12, -1e-6, -0.3, -3.0])
        with mp.workdps(40):
            ref = np.array([float(mp.hyp1f1(-0.25, 0.5, x) - 1) for x in z])
        np.testing.assert_allclose(kummer_1f1m1_array(-0.25, 0.5, z), ref, rtol=1e-13)

    def test_array_matches_scalar(self):
        z = np.linspace(-150.0, 0.0, 31)
        arr = kummer_1f1_array(0.35, 1.5, z)
        scal = [kummer_1f1(0.35, 1.5, x).value for x in z]
        np.testing.assert_allclose(arr, scal, rtol=1e-14)


def test_backends_agree(kernel_module):
    z = -np.geomspace(1e-10, 200.0, 200)
    for a, b in [(-0.75, 0.5), (0.15, 1.5)]:
        val, err, n = kernel_module.hyp1f1_neg(a, b, z, 500)
        ref = np.array([float(mp.hyp1f1(a, b, x)) for x in z[::10]])
        np.testing.assert_allclose(val[::10], ref, rtol=1e-12)
        assert np.all(err >= 0) and np.all(n >= 1)


def test_pure_python_switch():
    env = dict(os.environ, ETSTABLE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import etstable; print(etstable.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
