"""Barrier chain: h, its derivatives, psi sequence and the QP row."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strainsafe.barrier import (
    SafetySpec,
    barrier,
    barrier_rate,
    constraint_coefficients,
    evaluate,
    psi_sequence,
)
from strainsafe.checks import barrier_acceleration
from strainsafe.material import MaterialParams, StretchPair, strain_energy
from strainsafe.sim import NominalControlSpec, SimulationConfig, simulate
from strainsafe.tube import StretchState, TubeGeometry

SPEC = SafetySpec(w_safe=7900.0, alpha1=2500.0, alpha2=2500.0)
MAT = MaterialParams(7900.0, 3200.0)
GEO = TubeGeometry(0.01021, 0.01443, 0.090)

stretches = st.floats(min_value=0.7, max_value=1.9)
rates = st.floats(min_value=-3.0, max_value=3.0)


class TestSafetySpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            SafetySpec(w_safe=-1.0)
        with pytest.raises(ValueError):
            SafetySpec(w_safe=7900.0, alpha1=0.0)
        with pytest.raises(ValueError):
            SafetySpec(w_safe=7900.0, alpha2=-2500.0)


class TestBarrier:
    def test_rest_value(self):
        assert barrier(SPEC, MAT, StretchPair(1, 1)) == 7900.0

    def test_zero_on_boundary(self):
        # Uniaxial stretch 2 in tube coordinates stores exactly w_safe.
        assert barrier(SPEC, MAT, StretchPair(2.0, 2.0**-0.5)) == pytest.approx(0.0, abs=1e-9)

    def test_unsafe_sign(self):
        s = StretchPair(2.4, 1.3)
        w = strain_energy(MAT, s)
        assert w > SPEC.w_safe
        assert barrier(SPEC, MAT, s) == pytest.approx(SPEC.w_safe - w, rel=1e-15)


class TestBarrierRate:
    def test_zero_at_zero_rate(self):
        assert barrier_rate(SPEC, MAT, StretchState(StretchPair(1.5, 1.2), (0.0, 0.0))) == 0.0

    def test_zero_at_rest_any_rate(self):
        assert barrier_rate(SPEC, MAT, StretchState(StretchPair(1, 1), (2.3, -1.7))) == 0.0

    def test_matches_trajectory_finite_difference(self):
        # Fine-step open-loop run; compare central differences of the h
        # column with the analytic rate at interior samples.
        cfg = SimulationConfig(
            t_end=0.02,
            dt=1e-6,
            nominal=NominalControlSpec(kind="constant", amplitude=2000.0),
            filter_enabled=False,
        )
        tr = simulate(cfg, SPEC, MAT, GEO)
        fd = (tr.h[2:] - tr.h[:-2]) / (2 * cfg.dt)
        analytic = np.array(
            [
                barrier_rate(SPEC, MAT, StretchState(StretchPair(lt, lz), (rt, rz)))
                for lt, lz, rt, rz in zip(
                    tr.lambda_theta[1:-1], tr.lambda_z[1:-1], tr.dlambda_theta[1:-1], tr.dlambda_z[1:-1]
                )
            ]
        )
        scale = np.abs(analytic).max()
        assert scale > 0
        assert np.abs(fd - analytic).max() / scale < 1e-4


class TestPsiSequence:
    def test_rest_values(self):
        psi0, psi1 = psi_sequence(SPEC, MAT, StretchState.rest())
        assert psi0 == SPEC.w_safe
        assert psi1 == SPEC.alpha1 * SPEC.w_safe

    @given(lt=stretches, lz=stretches, rt=rates, rz=rates)
    @settings(max_examples=50)
    def test_recomputable_bit_exactly(self, lt, lz, rt, rz):
        st_ = StretchState(StretchPair(lt, lz), (rt, rz))
        psi0, psi1 = psi_sequence(SPEC, MAT, st_)
        assert psi0 == barrier(SPEC, MAT, st_.stretch)
        assert psi1 == barrier_rate(SPEC, MAT, st_) + SPEC.alpha1 * psi0

    def test_sign_flip(self):
        st_ = StretchState(StretchPair(1.6, 1.0), (4.0, 0.0))
        psi0, psi1 = psi_sequence(SPEC, MAT, st_)
        assert barrier_rate(SPEC, MAT, st_) < -SPEC.alpha1 * psi0
        assert psi1 < 0


class TestConstraintCoefficients:
    def test_vacuous_at_rest(self):
        a, b = constraint_coefficients(SPEC, MAT, GEO, StretchState.rest())
        assert a == 0.0
        assert b == pytest.approx(SPEC.alpha1 * SPEC.alpha2 * SPEC.w_safe, rel=1e-15)
        assert b > 0

    def test_bundled_eval_consistency(self):
        st_ = StretchState(StretchPair(1.5, 1.1), (1.0, -0.5))
        ev = evaluate(SPEC, MAT, GEO, st_)
        assert (ev.a_coeff, ev.b_coeff) == constraint_coefficients(SPEC, MAT, GEO, st_)
        assert ev.psi1 == ev.h_dot + SPEC.alpha1 * ev.h

    @given(lt=stretches, lz=stretches, rt=rates, rz=rates)
    @settings(max_examples=100)
    def test_boundary_control_zeroes_psi2(self, lt, lz, rt, rz):
        # Substituting u = b/a into the expanded chain must give
        # hddot + alpha1 hdot + alpha2 psi1 = 0.
        st_ = StretchState(StretchPair(lt, lz), (rt, rz))
        ev = evaluate(SPEC, MAT, GEO, st_)
        if abs(ev.a_coeff) < 1e-6:
            return
        u = ev.b_coeff / ev.a_coeff
        hddot = barrier_acceleration(MAT, GEO, st_, u)
        psi2 = hddot + SPEC.alpha1 * ev.h_dot + SPEC.alpha2 * ev.psi1
        scale = max(abs(hddot), abs(SPEC.alpha2 * ev.psi1), 1.0)
        assert abs(psi2) / scale < 1e-9

    def test_homogeneity_in_mu_and_w_safe(self):
        st_ = StretchState(StretchPair(1.4, 1.2), (0.8, -0.2))
        a1, b1 = constraint_coefficients(SPEC, MAT, GEO, st_)
        doubled = constraint_coefficients(
            SafetySpec(2 * SPEC.w_safe, SPEC.alpha1, SPEC.alpha2),
            MaterialParams(2 * MAT.mu, MAT.eta),
            GEO,
            st_,
        )
        assert doubled[0] == pytest.approx(2 * a1, rel=1e-12)
        assert doubled[1] == pytest.approx(2 * b1, rel=1e-12)

    def test_relative_degree_two_structure(self):
        # u is absent from h and hdot; the constraint row is affine in u
        # with a independent of u by construction, so a single evaluation
        # determines the feasible half-space.
        st_ = StretchState(StretchPair(1.6, 1.2), (1.5, 0.5))
        a, b = constraint_coefficients(SPEC, MAT, GEO, st_)
        for u in (-5e3, 0.0, 5e3):
            hddot = barrier_acceleration(MAT, GEO, st_, u)
            ev = evaluate(SPEC, MAT, GEO, st_)
            residual = (b - a * u) - (hddot + SPEC.alpha1 * ev.h_dot + SPEC.alpha2 * ev.psi1)
            assert abs(residual) / max(abs(b), 1.0) < 1e-12
