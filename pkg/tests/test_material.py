"""Constitutive layer: invariants, energy, derivatives, calibration, scan."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strainsafe.material import (
    CalibrationError,
    MaterialParams,
    PrincipalTriplet,
    StretchPair,
    calibrate_mu_from_safe_energy,
    cauchy_stress,
    first_invariant,
    fit_mu_from_tensile_data,
    scan_safe_set,
    strain_energy,
    strain_energy_gradient,
    strain_energy_hessian,
    uniaxial_stress,
)

MU = 7900.0
P = MaterialParams(MU, 3200.0)

stretches = st.floats(min_value=0.5, max_value=2.5)


class TestTypes:
    def test_material_params_validation(self):
        with pytest.raises(ValueError):
            MaterialParams(0.0)
        with pytest.raises(ValueError):
            MaterialParams(-1.0)
        with pytest.raises(ValueError):
            MaterialParams(1.0, -0.1)
        with pytest.raises(ValueError):
            MaterialParams(math.nan)
        assert MaterialParams(1.0).eta == 0.0

    def test_stretch_pair_validation(self):
        with pytest.raises(ValueError):
            StretchPair(0.0, 1.0)
        with pytest.raises(ValueError):
            StretchPair(1.0, 1e-9)
        with pytest.raises(ValueError):
            StretchPair(math.inf, 1.0)
        assert StretchPair(2.0, 0.5).radial() == 1.0

    def test_triplet_constructors(self):
        t = PrincipalTriplet.incompressible(1.3, 1.1)
        assert t.lambda_1 * t.lambda_2 * t.lambda_3 == pytest.approx(1.0, rel=1e-12)
        u = PrincipalTriplet.uniaxial(2.0)
        assert (u.lambda_1, u.lambda_2, u.lambda_3) == (2.0, 2.0**-0.5, 2.0**-0.5)
        with pytest.raises(ValueError):
            PrincipalTriplet(1.0, -1.0, 1.0)


class TestFirstInvariant:
    def test_identity(self):
        assert first_invariant(PrincipalTriplet(1, 1, 1)) == 3.0

    def test_uniaxial_two(self):
        assert first_invariant(PrincipalTriplet.uniaxial(2.0)) == pytest.approx(5.0, rel=1e-15)

    def test_arithmetic_oracle(self):
        # 1.5^2 + 1.2^2 + (1/1.8)^2 computed independently
        t = PrincipalTriplet.incompressible(1.5, 1.2)
        assert first_invariant(t) == pytest.approx(3.998641975308642, rel=1e-14)

    @given(l1=stretches, l2=stretches)
    @settings(max_examples=50)
    def test_at_least_three_for_incompressible(self, l1, l2):
        assert first_invariant(PrincipalTriplet.incompressible(l1, l2)) >= 3.0 - 1e-12


class TestStrainEnergy:
    def test_undeformed_zero(self):
        assert strain_energy(P, StretchPair(1.0, 1.0)) == 0.0

    def test_uniaxial_boundary_energy(self):
        # Uniaxial stretch 2 stores exactly mu per unit volume.
        t = PrincipalTriplet.uniaxial(2.0)
        w = 0.5 * MU * (first_invariant(t) - 3.0)
        assert w == pytest.approx(MU, rel=1e-14)
        # Same state expressed in tube coordinates (hoop = 2, axial = 1/sqrt 2).
        assert strain_energy(P, StretchPair(2.0, 2.0**-0.5)) == pytest.approx(MU, rel=1e-12)

    def test_arithmetic_oracle(self):
        assert strain_energy(P, StretchPair(1.2, 1.1)) == pytest.approx(884.4880624426087, rel=1e-13)

    @given(lt=stretches, lz=stretches)
    @settings(max_examples=50)
    def test_nonnegative_with_unique_minimum(self, lt, lz):
        w = strain_energy(P, StretchPair(lt, lz))
        assert w >= 0.0
        if abs(lt - 1) > 1e-3 or abs(lz - 1) > 1e-3:
            assert w > 0.0


class TestDerivatives:
    def test_gradient_zero_at_rest(self):
        assert strain_energy_gradient(P, StretchPair(1, 1)) == pytest.approx((0.0, 0.0), abs=0.0)

    def test_gradient_oracle(self):
        g = strain_energy_gradient(P, StretchPair(2.0, 1.0))
        assert g == pytest.approx((14812.5, 5925.0), rel=1e-14)

    def test_hessian_at_rest(self):
        h1 = strain_energy_hessian(MaterialParams(1.0), StretchPair(1, 1))
        assert h1 == pytest.approx(np.array([[4.0, 2.0], [2.0, 4.0]]), rel=1e-15)
        h = strain_energy_hessian(P, StretchPair(1, 1))
        assert h == pytest.approx(MU * np.array([[4.0, 2.0], [2.0, 4.0]]), rel=1e-15)

    @given(lt=stretches, lz=stretches)
    @settings(max_examples=50)
    def test_gradient_matches_finite_differences(self, lt, lz):
        eps = 1e-6
        g = strain_energy_gradient(P, StretchPair(lt, lz))
        fd_t = (strain_energy(P, StretchPair(lt + eps, lz)) - strain_energy(P, StretchPair(lt - eps, lz))) / (2 * eps)
        fd_z = (strain_energy(P, StretchPair(lt, lz + eps)) - strain_energy(P, StretchPair(lt, lz - eps))) / (2 * eps)
        scale = max(abs(fd_t), abs(fd_z), MU * 1e-3)
        assert abs(g[0] - fd_t) / scale < 1e-6
        assert abs(g[1] - fd_z) / scale < 1e-6

    @given(lt=stretches, lz=stretches)
    @settings(max_examples=50)
    def test_hessian_symmetric_positive_definite(self, lt, lz):
        h = strain_energy_hessian(P, StretchPair(lt, lz))
        assert h[0, 1] == h[1, 0]
        assert h[0, 0] > 0 and np.linalg.det(h) > 0


class TestCauchyStress:
    def test_radial_traction_free_for_tube_triplets(self):
        for lt, lz in ((1.4, 1.2), (0.8, 1.6), (2.0, 0.7)):
            t = PrincipalTriplet(1.0 / (lt * lz), lt, lz)
            assert cauchy_stress(P, t, axis=0, free_axis=0) == 0.0

    def test_undeformed_zero_all_axes(self):
        t = PrincipalTriplet(1, 1, 1)
        for axis in range(3):
            assert cauchy_stress(P, t, axis) == 0.0

    def test_uniaxial_oracle(self):
        t = PrincipalTriplet.uniaxial(2.0)
        sigma = cauchy_stress(P, t, axis=0, free_axis=1)
        assert sigma == pytest.approx(27650.0, rel=1e-14)
        assert sigma == pytest.approx(uniaxial_stress(P, 2.0), rel=1e-14)
        # Lateral directions are traction free.
        assert cauchy_stress(P, t, axis=2, free_axis=1) == pytest.approx(0.0, abs=1e-9)

    def test_axis_validation(self):
        with pytest.raises(ValueError):
            cauchy_stress(P, PrincipalTriplet(1, 1, 1), axis=3)


class TestCalibration:
    def test_safe_energy_at_stretch_two(self):
        assert calibrate_mu_from_safe_energy(7900.0, 2.0) == pytest.approx(7900.0, rel=1e-15)

    @given(w=st.floats(min_value=1.0, max_value=1e6))
    @settings(max_examples=50)
    def test_identity_denominator_at_two(self, w):
        assert calibrate_mu_from_safe_energy(w, 2.0) == pytest.approx(w, rel=1e-12)

    def test_arithmetic_oracle(self):
        assert calibrate_mu_from_safe_energy(1000.0, 1.5) == pytest.approx(3428.5714285714303, rel=1e-12)

    def test_round_trip_with_uniaxial_energy(self):
        for lam in (1.3, 1.7, 2.4):
            w = 0.5 * MU * (first_invariant(PrincipalTriplet.uniaxial(lam)) - 3.0)
            assert calibrate_mu_from_safe_energy(w, lam) == pytest.approx(MU, rel=1e-12)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            calibrate_mu_from_safe_energy(7900.0, 1.0)
        with pytest.raises(ValueError):
            calibrate_mu_from_safe_energy(7900.0, 0.5)
        with pytest.raises(ValueError):
            calibrate_mu_from_safe_energy(-1.0, 2.0)


class TestTensileFit:
    def test_noiseless_recovery(self):
        samples = [(lam, uniaxial_stress(P, lam)) for lam in (1.2, 1.5, 2.0)]
        assert fit_mu_from_tensile_data(samples) == pytest.approx(MU, rel=1e-14)

    def test_single_sample(self):
        assert fit_mu_from_tensile_data([(2.0, 27650.0)]) == pytest.approx(7900.0, rel=1e-14)

    def test_noisy_recovery_within_bound(self):
        rng = np.random.default_rng(42)
        lams = np.linspace(1.1, 2.0, 20)
        sigma_noise = 500.0
        basis = lams**2 - 1.0 / lams
        bound = 5.0 * sigma_noise / math.sqrt(float(basis @ basis))
        for _ in range(20):
            noisy = [(lam, uniaxial_stress(P, lam) + rng.normal(0, sigma_noise)) for lam in lams]
            assert abs(fit_mu_from_tensile_data(noisy) - MU) < bound

    def test_degenerate_data(self):
        with pytest.raises(CalibrationError):
            fit_mu_from_tensile_data([])
        with pytest.raises(CalibrationError):
            fit_mu_from_tensile_data([(1.0, 0.0), (1.0, 5.0)])


class TestSafeSetScan:
    def test_rest_node_equals_w_safe(self):
        grid = scan_safe_set(P, 7900.0, (0.5, 2.5), (0.5, 2.5), 201)
        i = int(np.argmin(np.abs(grid.theta_axis - 1.0)))
        j = int(np.argmin(np.abs(grid.z_axis - 1.0)))
        assert grid.theta_axis[i] == 1.0 and grid.z_axis[j] == 1.0
        assert grid.h_values[i, j] == 7900.0

    def test_sign_pattern(self):
        grid = scan_safe_set(P, 7900.0, n=101)
        for i in range(0, 101, 10):
            for j in range(0, 101, 10):
                w = strain_energy(P, StretchPair(grid.theta_axis[i], grid.z_axis[j]))
                assert (grid.h_values[i, j] < 0) == (w > 7900.0)

    def test_pointwise_recomputable_independently(self):
        # Independent route: energy from the first invariant of the
        # incompressibility-completed triplet.
        grid = scan_safe_set(P, 7900.0, n=41)
        for i in range(41):
            for j in range(41):
                t = PrincipalTriplet.incompressible(grid.theta_axis[i], grid.z_axis[j])
                w = 0.5 * MU * (first_invariant(t) - 3.0)
                expect = 7900.0 - w
                assert grid.h_values[i, j] == pytest.approx(expect, rel=1e-12, abs=1e-9)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            scan_safe_set(P, 7900.0, theta_range=(-0.5, 2.5))
        with pytest.raises(ValueError):
            scan_safe_set(P, 7900.0, z_range=(1.0, 0.5))
        with pytest.raises(ValueError):
            scan_safe_set(P, 7900.0, n=1)
        with pytest.raises(ValueError):
            scan_safe_set(P, -7900.0)

    def test_grid_refinement_shares_nodes_bit_exactly(self):
        coarse = scan_safe_set(P, 7900.0, n=101)
        fine = scan_safe_set(P, 7900.0, n=201)
        assert np.array_equal(coarse.h_values, fine.h_values[::2, ::2])
