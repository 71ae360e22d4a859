import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eit_memory import (BandwidthError, BathGrid, ControlSchedule, PulseEnvelope, RecurrenceError,
                        StepSizeError, SystemParams, TimeGrid, dark_amplitude, discretize_input,
                        free_field, integrate_lambda_system, integrate_mode_equations,
                        make_sech_envelope, matched_schedule, output_envelope)
from eit_memory.states import read_columns

from strategies import random_schedules


def small_case(width=20.0, spacing=0.1, window=40.0, pulse=5.0):
    grid = TimeGrid.span(0, window, 0.01)
    h = make_sech_envelope(pulse, 0.5 * window, grid, tol=math.inf).normalized()
    return h, BathGrid(width, spacing, window=window)


class TestBathGrid:
    def test_defaults(self):
        b = BathGrid()
        assert b.n_modes == 10_000
        assert 2 * math.pi * b.kappa**2 / b.spacing == pytest.approx(1.0, abs=1e-12)
        det = b.detunings
        assert det[0] == pytest.approx(-det[-1]) and det[-1] - det[0] == pytest.approx(200 - 0.02)
        assert b.max_step == pytest.approx(5e-4)

    def test_recurrence_guard(self):
        with pytest.raises(RecurrenceError):
            BathGrid(200.0, 0.5, window=80.0)

    def test_window_check(self):
        with pytest.raises(RecurrenceError):
            BathGrid(20.0, 0.1, window=10.0).check_window(70.0)


class TestDiscretize:
    def test_zero_pulse(self):
        g = TimeGrid(0, 0.1, 100)
        xi = discretize_input(PulseEnvelope(g, np.zeros(100)), BathGrid(20, 0.1, window=10), 0.0)
        assert xi.shape == (200,) and not np.any(xi)

    def test_unit_norm(self):
        h, b = small_case()
        assert np.sum(np.abs(discretize_input(h, b, 0.0)) ** 2) == pytest.approx(1.0, abs=1e-14)

    def test_reconstruction(self, oracle_run):
        h, bath = oracle_run.h, oracle_run.bath
        xi = discretize_input(h, bath, h.grid.t0)
        rebuilt = free_field(xi, bath, h.grid.t0, h.grid)
        t = h.times
        inner = (t > 1) & (t < t[-1] - 1)
        assert np.max(np.abs(rebuilt[inner] - h.samples[inner])) <= 1e-3

    def test_bandwidth_guard(self):
        grid = TimeGrid.span(0, 40, 0.01)
        h = make_sech_envelope(1.0, 20.0, grid)
        with pytest.raises(BandwidthError):
            discretize_input(h, BathGrid(5.0, 0.1, window=40), 0.0)


class TestModeEquations:
    def test_markov_agreement(self, oracle_run):
        traj, _ = oracle_run.modes()
        dev = np.max(np.abs(np.abs(traj.D) - np.abs(oracle_run.markov.d)))
        assert dev <= 2e-2
        assert abs(traj.D[-1]) >= 0.99
        assert traj.norm_drift <= 1e-8

    def test_no_frequency_shift(self, oracle_run):
        # the symmetric flat band adds no principal-value shift: D = i d with no phase drift
        traj, _ = oracle_run.modes()
        d = oracle_run.markov.d
        live = np.abs(d) > 0.05
        assert np.max(np.abs(np.angle(traj.D[live] / (1j * d[live])))) <= 1e-6

    def test_output_convention(self, oracle_run):
        traj, _ = oracle_run.modes()
        h, s, p = oracle_run.h, oracle_run.s, oracle_run.params
        t = h.times
        inner = (t > 1) & (t < t[-1] - 1)
        markov = oracle_run.markov
        weighted = output_envelope(h, markov, p, s).samples
        assert np.max(np.abs(traj.h_out[inner] - weighted[inner])) <= 2e-2
        unweighted = h.samples - markov.d
        assert np.max(np.abs(traj.h_out[inner] - unweighted[inner])) > 0.1

    def test_output_convention_unmatched(self):
        h, bath = small_case()
        p = SystemParams()
        s = ControlSchedule(h.grid, 0.4 + 0.3 * np.sin(0.2 * h.times))
        traj = integrate_mode_equations(discretize_input(h, bath, 0.0), s, bath)
        out = output_envelope(h, dark_amplitude(h, s, p), p, s).samples
        t = h.times
        inner = (t > 1) & (t < t[-1] - 1)
        assert np.max(np.abs(traj.h_out[inner] - out[inner])) <= 2e-2
        assert np.max(np.abs(out)) > 0.1

    def test_decoupled(self):
        h, bath = small_case()
        s = ControlSchedule.constant(0.0, h.grid)
        xi0 = discretize_input(h, bath, 0.0)
        traj = integrate_mode_equations(xi0, s, bath)
        assert np.all(traj.D == 0)
        assert traj.norm_drift <= 1e-10
        # free phases, up to the fourth-order phase error of the fixed step
        np.testing.assert_allclose(traj.xi_final, xi0 * np.exp(-1j * bath.detunings * h.grid.duration),
                                   rtol=1e-4, atol=0)

    @settings(max_examples=5, deadline=None)
    @given(st.data())
    def test_norm_conserved_for_random_schedules(self, data):
        h, bath = small_case()
        s = data.draw(random_schedules(h.grid))
        traj = integrate_mode_equations(discretize_input(h, bath, 0.0), s, bath)
        assert traj.norm_drift <= 1e-8

    def test_converges_to_markov_limit(self, oracle_run):
        h, s = oracle_run.h, oracle_run.s
        devs = []
        for width, spacing in [(20.0, 0.075), (50.0, 0.04), (100.0, 0.02)]:
            bath = BathGrid(width, spacing, window=h.grid.duration)
            traj = integrate_mode_equations(discretize_input(h, bath, h.grid.t0), s, bath)
            devs.append(np.max(np.abs(np.abs(traj.D) - np.abs(oracle_run.markov.d))))
        assert all(b <= a + 1e-3 for a, b in zip(devs, devs[1:]))
        assert devs[-1] < devs[0]

    def test_step_size_guard(self):
        h, bath = small_case()
        s = ControlSchedule.constant(0.5, h.grid)
        with pytest.raises(StepSizeError):
            integrate_mode_equations(discretize_input(h, bath, 0.0), s, bath, dt=0.01)
        with pytest.raises(StepSizeError):
            integrate_mode_equations(discretize_input(h, bath, 0.0), s, bath, dt=0.003)

    def test_csv(self, tmp_path):
        h, bath = small_case()
        traj = integrate_mode_equations(discretize_input(h, bath, 0.0), matched_schedule(h, SystemParams()), bath)
        traj.to_csv(tmp_path / "m.csv")
        cols = read_columns(tmp_path / "m.csv")
        assert list(cols) == ["t", "abs_D", "re_D", "im_D", "norm"]
        np.testing.assert_array_equal(cols["abs_D"], np.abs(traj.D))


class TestLambdaSystem:
    def test_adiabatic_capture(self, oracle_run):
        lt = oracle_run.lam(10.0, 1.0)
        ideal = abs(oracle_run.markov.final) ** 2
        assert abs(lt.capture_efficiency - ideal) <= 0.05 * ideal
        assert np.all(np.diff(lt.norm) <= 1e-12)

    def test_weak_coupling_fails(self, oracle_run):
        assert oracle_run.lam(math.sqrt(0.1), 1.0).capture_efficiency <= 0.5

    def test_lossless_matches_mode_equations(self, oracle_run):
        lt = oracle_run.lam(50.0, 0.0)
        traj, _ = oracle_run.modes()
        assert np.max(np.abs(lt.norm - 1)) <= 1e-8
        assert np.max(np.abs(lt.dark_amplitude() - traj.D)) <= 1e-2

    def test_rabi_array_input(self):
        h, bath = small_case()
        p = SystemParams(g_sqrtN=5.0, gamma_a=0.5)
        s = matched_schedule(h, p)
        a = integrate_lambda_system(h, s, p, bath)
        b = integrate_lambda_system(h, s.omega(p), p, bath)
        np.testing.assert_allclose(a.s, b.s, atol=1e-12)

    def test_step_size_guard(self):
        h, bath = small_case()
        p = SystemParams(g_sqrtN=50.0)
        with pytest.raises(StepSizeError):
            integrate_lambda_system(h, matched_schedule(h, p), p, bath, dt=0.005)

    def test_csv(self, tmp_path):
        h, bath = small_case()
        p = SystemParams(g_sqrtN=5.0)
        lt = integrate_lambda_system(h, matched_schedule(h, p), p, bath)
        lt.to_csv(tmp_path / "l.csv")
        cols = read_columns(tmp_path / "l.csv")
        assert list(cols) == ["t", "abs_D", "re_D", "im_D", "norm", "pop_e", "pop_p", "pop_s"]
        np.testing.assert_allclose(cols["pop_e"] + cols["pop_p"] + cols["pop_s"],
                                   np.abs(lt.e) ** 2 + np.abs(lt.p) ** 2 + np.abs(lt.s) ** 2)
