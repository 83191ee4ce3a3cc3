import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from etstable.errors import DomainError, ParameterError
from etstable.measures import (SpectralMeasure, TemperingFamily, build_r_from_q, levy_tail_mass, symmetrize,
                               tempering_q_exp, tempering_q_gauss)
from oracle_values import UPPER_GAMMA_M05_1


def single(u, s, m):
    return TemperingFamily([(u, [(s, m)])])


class TestTemperingFunctions:
    def test_exp_small_r_limit(self):
        assert tempering_q_exp(single([1.0], 1.0, 1.0), 1e-12, 0) == pytest.approx(1.0, abs=1e-11)

    def test_exp_substitution(self):
        assert tempering_q_exp(single([1.0], 2.0, 3.0), 1.0, 0) == pytest.approx(3 * math.exp(-2), rel=1e-15)

    def test_exp_two_atoms(self):
        fam = TemperingFamily([([0.6, 0.8], [(0.5, 1.2), (3.0, 0.4)])])
        ref = math.fsum([1.2 * math.exp(-0.35), 0.4 * math.exp(-2.1)])
        assert tempering_q_exp(fam, 0.7, 0) == pytest.approx(ref, rel=1e-15)

    def test_gauss_values(self):
        assert tempering_q_gauss(single([1.0], 1.0, 1.0), 1e-9, 0) == pytest.approx(1.0, abs=1e-15)
        assert tempering_q_gauss(single([1.0], 2.0, 1.0), 1.0, 0) == pytest.approx(math.exp(-4), rel=1e-15)

    def test_gauss_completely_monotone_in_r_squared(self):
        fam = TemperingFamily([([1.0, 0.0], [(0.4, 1.0), (1.3, 2.0), (2.2, 0.5)])])
        r2 = np.array([0.5, 0.8, 1.1, 1.4])
        vals = np.array([tempering_q_gauss(fam, math.sqrt(x), 0) for x in r2])
        d1, d2, d3 = np.diff(vals), np.diff(vals, 2), np.diff(vals, 3)
        assert np.all(d1 < 0) and np.all(d2 > 0) and np.all(d3 < 0)

    def test_bad_index(self):
        with pytest.raises(IndexError):
            tempering_q_exp(single([1.0], 1.0, 1.0), 1.0, 3)

    def test_bad_direction(self):
        with pytest.raises(ParameterError):
            TemperingFamily([([1.0, 1.0], [(1.0, 1.0)])])

    def test_direction_renormalised(self):
        fam = TemperingFamily([([1.0 + 1e-11, 0.0], [(1.0, 1.0)])])
        assert np.linalg.norm(fam.directions[0]) == pytest.approx(1.0, abs=1e-15)

    def test_nonpositive_r(self):
        with pytest.raises(DomainError):
            tempering_q_gauss(single([1.0], 1.0, 1.0), 0.0, 0)

    def test_json_roundtrip(self):
        fam = TemperingFamily([([0.6, 0.8], [(0.5, 1.2)]), ([0.0, 1.0], [(2.0, 0.3)])])
        back = TemperingFamily.from_json(fam.to_json())
        np.testing.assert_array_equal(back.directions, fam.directions)
        assert all(np.array_equal(a, b) for a, b in zip(back.radial, fam.radial))


class TestBuildR:
    def test_unit_radius_fixed_point(self):
        r = build_r_from_q(single([0.0, 1.0], 1.0, 0.7), 1.2)
        assert r.atom_set() == {((0.0, 1.0), 0.7)}

    def test_substitution(self):
        r = build_r_from_q(single([1.0, 0.0, 0.0], 2.0, 1.0), 1.5)
        np.testing.assert_allclose(r.locations, [[0.5, 0.0, 0.0]])
        assert r.weights[0] == pytest.approx(2.8284271247461903, rel=1e-15)

    def test_brute_force_enumeration(self):
        alpha = 0.8
        entries = [([1.0, 0.0], [(0.5, 1.0), (2.0, 0.25)]), ([0.0, -1.0], [(1.5, 2.0)])]
        expected = set()
        for u, atoms in entries:
            for s, m in atoms:
                loc = tuple(np.round(np.array(u) / s, 12) + 0.0)
                expected.add((loc, round(s ** alpha * m, 12)))
        assert build_r_from_q(TemperingFamily(entries), alpha).atom_set() == expected

    def test_coincident_atoms_merge(self):
        fam = TemperingFamily([([1.0], [(2.0, 1.0)]), ([1.0], [(2.0, 3.0)])])
        r = build_r_from_q(fam, 1.0)
        assert len(r) == 1 and r.weights[0] == pytest.approx(8.0)


class TestSymmetrize:
    def test_symmetric_fixed_point(self):
        r = SpectralMeasure([[1.0, 2.0], [-1.0, -2.0]], [0.5, 0.5])
        assert symmetrize(r).atom_set() == r.atom_set()

    def test_single_atom_split(self):
        r = symmetrize(SpectralMeasure([[0.3]], [2.0]))
        assert r.atom_set() == {((0.3,), 1.0), ((-0.3,), 1.0)}

    @settings(max_examples=50)
    @given(st.integers(0, 2 ** 32 - 1))
    def test_mass_conserved(self, seed):
        rng = np.random.default_rng(seed)
        r = SpectralMeasure(rng.normal(size=(5, 3)), rng.uniform(0.1, 2.0, 5))
        assert symmetrize(r).total_mass == pytest.approx(r.total_mass, rel=1e-14)


class TestLevyTailMass:
    r = SpectralMeasure([[1.0]], [1.0])

    def test_vanishing_tail(self):
        assert 0 <= levy_tail_mass(self.r, 0.5, 0, 200.0) <= 1e-80

    def test_decreasing(self):
        vals = [levy_tail_mass(self.r, 1.3, 0, r0) for r0 in (0.5, 1.0, 3.0)]
        assert vals[0] > vals[1] > vals[2] > 0

    def test_quadrature_oracle(self):
        assert levy_tail_mass(self.r, 0.5, 0, 1.0) == pytest.approx(UPPER_GAMMA_M05_1, rel=1e-12)

    def test_errors(self):
        with pytest.raises(IndexError):
            levy_tail_mass(self.r, 0.5, 1, 1.0)
        with pytest.raises(DomainError):
            levy_tail_mass(self.r, 0.5, 0, 0.0)


class TestSpectralMeasure:
    def test_rejects_origin(self):
        with pytest.raises(ParameterError):
            SpectralMeasure([[0.0, 0.0]], [1.0])

    def test_rejects_nonpositive_weight(self):
        with pytest.raises(ParameterError):
            SpectralMeasure([[1.0]], [0.0])

    def test_zero_measure(self):
        r = SpectralMeasure(np.zeros((0, 2)), [])
        assert len(r) == 0 and r.dim == 2 and r.total_mass == 0.0

    def test_immutable(self):
        r = SpectralMeasure([[1.0]], [1.0])
        with pytest.raises(ValueError):
            r.weights[0] = 2.0

    def test_json_roundtrip(self):
        r = SpectralMeasure([[1.0, -0.5], [0.2, 3.0]], [0.4, 1.1])
        assert SpectralMeasure.from_json(r.to_json()).atom_set() == r.atom_set()

    def test_sphere_and_moment(self):
        r = SpectralMeasure([[0.6, 0.8], [2.0, 0.0]], [1.0, 1.0])
        assert not r.is_on_sphere()
        assert r.moment_condition(1.5) == pytest.approx(1.0 + 2.0 ** 1.5)
