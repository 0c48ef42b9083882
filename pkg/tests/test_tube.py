"""Tube kinematics, mass matrix, forces and control-affine assembly."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strainsafe.material import MaterialParams, StretchPair
from strainsafe.tube import (
    StretchState,
    TubeGeometry,
    deformation_gradient,
    drift,
    elastic_force,
    enclosed_volume,
    external_force_vector,
    input_matrix,
    make_rhs,
    mass_matrix,
    state_derivative,
    viscous_force,
)

GEO = TubeGeometry(r_inner=0.01021, r_outer=0.01443, z_eff=0.090, cap_height=0.020, density=1070.0)
MAT = MaterialParams(7900.0, 3200.0)

stretches = st.floats(min_value=0.6, max_value=2.2)
rates = st.floats(min_value=-5.0, max_value=5.0)


class TestGeometry:
    def test_validation(self):
        with pytest.raises(ValueError):
            TubeGeometry(r_inner=0.02, r_outer=0.01, z_eff=0.09)
        with pytest.raises(ValueError):
            TubeGeometry(r_inner=0.0, r_outer=0.01, z_eff=0.09)
        with pytest.raises(ValueError):
            TubeGeometry(r_inner=0.01, r_outer=0.02, z_eff=-1.0)

    def test_derived_dimensions(self):
        assert GEO.wall_thickness == pytest.approx(0.00422, rel=1e-12)
        assert GEO.mean_radius == pytest.approx(0.01232, rel=1e-12)


class TestDeformationGradient:
    def test_identity(self):
        t = deformation_gradient(StretchPair(1, 1))
        assert t.as_array() == pytest.approx((1.0, 1.0, 1.0), abs=0.0)

    def test_constraint_arithmetic(self):
        t = deformation_gradient(StretchPair(2.0, 1.0))
        assert t.as_array() == pytest.approx((0.5, 2.0, 1.0), abs=0.0)

    def test_product_one(self):
        t = deformation_gradient(StretchPair(1.3, 1.1))
        assert t.lambda_1 == pytest.approx(1.0 / 1.43, rel=1e-15)
        assert t.lambda_1 * t.lambda_2 * t.lambda_3 == pytest.approx(1.0, abs=1e-15)


class TestMassMatrix:
    def test_golden_values(self):
        # Recomputed independently from the closed-form wall integrals.
        m = mass_matrix(GEO)
        assert m[0, 0] == pytest.approx(4.8137165530682635e-4, rel=1e-12)
        assert m[1, 1] == pytest.approx(9.437361019523914e-4, rel=1e-12)
        assert m[0, 1] == 0.0 and m[1, 0] == 0.0

    def test_positive_definite(self):
        m = mass_matrix(GEO)
        assert m[0, 0] > 0 and m[1, 1] > 0

    def test_linear_in_density(self):
        import dataclasses

        doubled = dataclasses.replace(GEO, density=2 * GEO.density)
        assert np.allclose(mass_matrix(doubled), 2 * mass_matrix(GEO), rtol=1e-15)

    def test_length_scaling_fourth_power(self):
        c = 1.7
        scaled = TubeGeometry(
            r_inner=c * GEO.r_inner,
            r_outer=c * GEO.r_outer,
            z_eff=c * GEO.z_eff,
            cap_height=c * GEO.cap_height,
            density=GEO.density,
        )
        assert np.allclose(mass_matrix(scaled), c**4 * mass_matrix(GEO), rtol=1e-12)


class TestForces:
    def test_elastic_zero_at_rest(self):
        assert elastic_force(MAT, GEO, StretchPair(1, 1)) == pytest.approx((0.0, 0.0), abs=0.0)

    def test_elastic_oracle(self):
        f = elastic_force(MAT, GEO, StretchPair(2.0, 1.0))
        assert f[0] == pytest.approx(11.251575, rel=1e-12)

    def test_elastic_hoop_root(self):
        # First component vanishes where lt^4 lz^2 = 1.
        lt = 0.9
        lz = 1.0 / (lt * lt)
        f = elastic_force(MAT, GEO, StretchPair(lt, lz))
        assert f[0] == pytest.approx(0.0, abs=1e-12)

    @given(lt=stretches, lz=stretches)
    @settings(max_examples=50)
    def test_elastic_hoop_sign(self, lt, lz):
        f = elastic_force(MAT, GEO, StretchPair(lt, lz))
        indicator = lt**4 * lz**2 - 1.0
        if abs(indicator) > 1e-9:
            assert math.copysign(1.0, f[0]) == math.copysign(1.0, indicator)

    def test_viscous_zero_at_rest(self):
        st_ = StretchState(StretchPair(1.7, 0.8), (0.0, 0.0))
        assert viscous_force(MAT, GEO, st_) == pytest.approx((0.0, 0.0), abs=0.0)

    def test_viscous_oracle_and_linearity(self):
        p = MaterialParams(7900.0, 100.0)
        st_ = StretchState(StretchPair(1.2, 1.2), (1.0, 0.0))
        f = viscous_force(p, GEO, st_)
        assert f == pytest.approx((0.03798, 0.0), rel=1e-12)
        st3 = StretchState(StretchPair(1.2, 1.2), (3.0, 0.0))
        assert viscous_force(p, GEO, st3) == pytest.approx(3 * f, rel=1e-15)

    def test_external_oracle(self):
        f = external_force_vector(GEO, StretchPair(1, 1))
        assert f[0] == pytest.approx(5.773618978767322e-3, rel=1e-12)
        assert f[1] == pytest.approx(3.2749249874007975e-4, rel=1e-12)

    def test_external_structure(self):
        base = external_force_vector(GEO, StretchPair(1, 1))
        f = external_force_vector(GEO, StretchPair(1.5, 1.2))
        assert f[0] == pytest.approx(base[0] * 1.5 * 1.2, rel=1e-14)
        assert f[1] == pytest.approx(base[1] * 1.5**2, rel=1e-14)
        # Axial component independent of the axial stretch.
        f2 = external_force_vector(GEO, StretchPair(1.5, 2.0))
        assert f2[1] == f[1]

    @given(lt=stretches, lz=stretches)
    @settings(max_examples=50)
    def test_external_is_mapped_volume_gradient(self, lt, lz):
        eps = 1e-7
        s = StretchPair(lt, lz)
        dv_dt = (enclosed_volume(GEO, StretchPair(lt + eps, lz)) - enclosed_volume(GEO, StretchPair(lt - eps, lz))) / (2 * eps)
        dv_dz = (enclosed_volume(GEO, StretchPair(lt, lz + eps)) - enclosed_volume(GEO, StretchPair(lt, lz - eps))) / (2 * eps)
        f = external_force_vector(GEO, s)
        assert f[0] == pytest.approx(dv_dt / GEO.r_inner, rel=1e-6)
        assert f[1] == pytest.approx(dv_dz / GEO.z_eff, rel=1e-6)


class TestControlAffineForm:
    def test_drift_zero_at_equilibrium(self):
        assert drift(MAT, GEO, StretchState.rest()) == pytest.approx((0, 0, 0, 0), abs=0.0)

    def test_rate_passthrough(self):
        st_ = StretchState(StretchPair(1.2, 0.9), (0.7, -0.3))
        d = drift(MAT, GEO, st_)
        assert (d[0], d[1]) == (0.7, -0.3)

    def test_acceleration_opposes_elastic_force(self):
        st_ = StretchState(StretchPair(2.0, 1.0), (0.0, 0.0))
        d = drift(MAT, GEO, st_)
        f = elastic_force(MAT, GEO, st_.stretch)
        assert d[2] < 0 and f[0] > 0
        assert math.copysign(1.0, d[3]) == -math.copysign(1.0, f[1])

    def test_input_matrix_structure(self):
        for lt, lz in ((1.0, 1.0), (1.8, 0.7), (0.6, 1.9)):
            col = input_matrix(GEO, StretchPair(lt, lz))
            assert col[0] == 0.0 and col[1] == 0.0
            assert col[2] > 0.0 and col[3] > 0.0

    def test_input_matrix_inverts_to_external_force(self):
        s = StretchPair(1.4, 1.1)
        col = input_matrix(GEO, s)
        m = mass_matrix(GEO)
        assert m @ col[2:] == pytest.approx(external_force_vector(GEO, s), rel=1e-14)

    @given(lt=stretches, lz=stretches, rt=rates, rz=rates, u=st.floats(min_value=-2e4, max_value=2e4))
    @settings(max_examples=100)
    def test_dynamics_reconstruction_identity(self, lt, lz, rt, rz, u):
        # M lddot + F_v + F_e = F_ext u, reassembled from the affine form.
        st_ = StretchState(StretchPair(lt, lz), (rt, rz))
        deriv = state_derivative(MAT, GEO, st_, u)
        m = mass_matrix(GEO)
        lhs = m @ deriv[2:] + viscous_force(MAT, GEO, st_) + elastic_force(MAT, GEO, st_.stretch)
        rhs = external_force_vector(GEO, st_.stretch) * u
        scale = max(1.0, float(np.max(np.abs(rhs))))
        assert np.max(np.abs(lhs - rhs)) / scale < 1e-12

    @given(lt=stretches, lz=stretches, rt=rates, rz=rates, u=st.floats(min_value=-2e4, max_value=2e4))
    @settings(max_examples=50)
    def test_fast_rhs_matches_reference(self, lt, lz, rt, rz, u):
        st_ = StretchState(StretchPair(lt, lz), (rt, rz))
        ref = state_derivative(MAT, GEO, st_, u)
        fast = np.array(make_rhs(MAT, GEO)(lt, lz, rt, rz, u))
        assert fast == pytest.approx(ref, rel=1e-13, abs=1e-10)
