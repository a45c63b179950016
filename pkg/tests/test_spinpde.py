"""Coupled spin-field PDE: discretization, conservation laws, protocol runs.

Numbers frozen at reference resolution n = 200 come from runs of this
package cross-checked against the closed-form mode-pair solution in
oracles.py; the uniform diffusion-free limit must collapse onto that
solution exactly, which pins everything the discretization adds on top.
"""

import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import exchange_pair

from spinvault import (Boundary, ProtocolTimeline, RadialGrid, Stage,
                       SweepMode, TransferModel, evolve, laplacian_radial,
                       run_protocol, spin_exchange_efficiency_numeric,
                       transfer_efficiency_numeric, uniform_state)
from spinvault.analytics import comb_rephasing_time, exchange_duration
from spinvault.errors import GridTooCoarse
from spinvault.spinpde import SpinState

T_EXCHANGE = 0.0015620463267948964  # (pi J - gamma_s) / 2 J^2 at canonical rates


@pytest.fixture(scope="module")
def protocol200(canonical, grid200):
    timeline = ProtocolTimeline.build(canonical.ensemble, canonical.comb,
                                      canonical.pulse)
    return run_protocol(timeline, canonical.ensemble, canonical.comb,
                        canonical.pulse, canonical.cell, grid=grid200)


def storage_only_state(grid) -> SpinState:
    """Pure stored excitation: uniform noble field, empty alkali field."""
    seed = uniform_state(grid)
    return SpinState(grid=grid, alkali=np.zeros(grid.n_points, dtype=complex),
                     noble=seed.alkali.copy(), time=0.0)


class TestGrid:
    def test_geometry(self):
        grid = RadialGrid(radius=1.0, n_points=200)
        assert grid.spacing == pytest.approx(0.005, rel=1e-15)
        assert grid.nodes[0] == pytest.approx(grid.spacing, rel=1e-15)
        assert grid.nodes[-1] == pytest.approx(1.0, rel=1e-12)

    def test_too_coarse(self):
        with pytest.raises(GridTooCoarse):
            RadialGrid(radius=1.0, n_points=16)

    def test_uniform_state_normalization(self):
        grid = RadialGrid(radius=1.0, n_points=200)
        state = uniform_state(grid)
        # trapezoid quadrature error is O(h^2), about 1e-5 at this spacing
        assert state.alkali_population() == pytest.approx(1.0, abs=5e-5)
        assert state.noble_population() == 0.0
        assert state.uniform_mode_overlap() == pytest.approx(
            state.alkali_population() ** 2, rel=1e-12)


class TestLaplacian:
    def test_linear_u_profile_is_harmonic(self):
        # u = c*r is the uniform spatial mode; zero-flux walls keep it exact
        grid = RadialGrid(radius=1.0, n_points=128)
        profile = (0.7 + 0.2j) * grid.nodes.astype(complex)
        image = laplacian_radial(profile, grid, Boundary.NON_DESTRUCTIVE)
        assert np.max(np.abs(image)) < 1e-8

    def test_dirichlet_eigenmode_second_order(self):
        # u = sin(pi r / R) has eigenvalue -(pi/R)^2; error must fall 4x per
        # halving of the spacing
        R = 1.0
        errs = []
        for n in (100, 200):
            grid = RadialGrid(radius=R, n_points=n)
            u = np.sin(np.pi * grid.nodes / R).astype(complex)
            image = laplacian_radial(u, grid, Boundary.DESTRUCTIVE)
            expect = -(np.pi / R) ** 2 * u
            errs.append(np.max(np.abs(image - expect)[:-1]))
        ratio = errs[0] / errs[1]
        assert 3.5 < ratio < 4.5

    def test_profile_length_checked(self):
        grid = RadialGrid(radius=1.0, n_points=64)
        with pytest.raises(ValueError):
            laplacian_radial(np.zeros(32), grid, Boundary.DESTRUCTIVE)


class TestConservationAndSwap:
    @settings(max_examples=10)
    @given(J=st.floats(min_value=100.0, max_value=5000.0),
           split=st.floats(min_value=0.0, max_value=0.8))
    def test_lossless_norm_conserved(self, canonical, grid64, J, split):
        # gamma = D = 0: total excitation is exact up to integrator error
        ens = replace(canonical.ensemble, gamma_s=0.0, gamma_k=0.0,
                      D_a=0.0, D_b=0.0, J=J)
        cell = replace(canonical.cell, boundary_alkali=Boundary.NON_DESTRUCTIVE)
        seed = uniform_state(grid64)
        state = SpinState(grid=grid64,
                          alkali=math.sqrt(1.0 - split) * seed.alkali,
                          noble=math.sqrt(split) * seed.alkali,
                          time=0.0)
        before = state.alkali_population() + state.noble_population()
        final, _ = evolve(state, ens, Stage("exchange-in", 1.0 / J), cell,
                          rtol=1e-8)
        after = final.alkali_population() + final.noble_population()
        assert after == pytest.approx(before, abs=1e-6)

    def test_resonant_swap_is_complete(self, canonical, grid64):
        ens = replace(canonical.ensemble, gamma_s=0.0, gamma_k=0.0,
                      D_a=0.0, D_b=0.0)
        cell = replace(canonical.cell, boundary_alkali=Boundary.NON_DESTRUCTIVE)
        state = uniform_state(grid64)
        s0 = state.alkali_population()
        final, _ = evolve(state, ens, Stage("exchange-in",
                                            math.pi / (2.0 * ens.J)), cell,
                          rtol=1e-8)
        assert final.noble_population() == pytest.approx(s0, abs=1e-6)

    def test_evolution_is_linear(self, canonical, grid64):
        ens = canonical.ensemble
        stage = Stage("exchange-in", T_EXCHANGE)
        state = uniform_state(grid64)
        scaled = SpinState(grid=grid64, alkali=(0.31 + 0.7j) * state.alkali,
                           noble=state.noble.copy(), time=0.0)
        a, _ = evolve(state, ens, stage, canonical.cell, rtol=1e-9, atol=1e-14)
        b, _ = evolve(scaled, ens, stage, canonical.cell, rtol=1e-9, atol=1e-14)
        assert b.noble_population() == pytest.approx(
            abs(0.31 + 0.7j) ** 2 * a.noble_population(), rel=1e-9)

    def test_destructive_wall_pins_boundary_node(self, canonical, grid64):
        final, _ = evolve(uniform_state(grid64), canonical.ensemble,
                          Stage("exchange-in", T_EXCHANGE), canonical.cell)
        assert final.alkali[-1] == 0.0


class TestModePairLimit:
    """The uniform coated diffusion-free case must equal the 2x2 closed form."""

    def test_storage_stage_matches_closed_form(self, canonical, grid200):
        ens = replace(canonical.ensemble, D_a=0.0, D_b=0.0)
        cell = replace(canonical.cell, boundary_alkali=Boundary.NON_DESTRUCTIVE)
        stage = Stage("storage", 0.01, delta_k=ens.delta_k)
        _, series = evolve(storage_only_state(grid200), ens, stage, cell,
                           rtol=1e-8, n_samples=400)
        reference = np.array([abs(exchange_pair(
            t, J=ens.J, gamma_s=ens.gamma_s, gamma_k=ens.gamma_k,
            delta_k=ens.delta_k, s0=0.0, k0=1.0)[0]) ** 2
            for t in series.times])
        assert np.max(np.abs(series.alkali - reference)) < 1e-6

    def test_exchange_leg_matches_closed_form(self, canonical, grid200):
        ens = replace(canonical.ensemble, D_a=0.0, D_b=0.0)
        cell = replace(canonical.cell, boundary_alkali=Boundary.NON_DESTRUCTIVE)
        pts = spin_exchange_efficiency_numeric(ens, grid200, cell, sweep=[0.0],
                                               mode=SweepMode.DIFFUSION)
        _, k = exchange_pair(T_EXCHANGE, J=ens.J, gamma_s=ens.gamma_s)
        assert pts[0].eta_numeric == pytest.approx(abs(k) ** 2, abs=1e-5)
        # the exponential leg formula is itself an approximation of the
        # closed form, good to about 1.5e-4 at canonical damping
        assert pts[0].eta_numeric == pytest.approx(pts[0].eta_analytic,
                                                   abs=1e-3)

    @given(st.floats(min_value=1.0, max_value=1e4),
           st.floats(min_value=2.0, max_value=100.0),
           st.floats(min_value=0.0, max_value=10.0))
    def test_closed_form_repopulation_bound(self, J, detuning_ratio, phase):
        # detuned exchange can never move more than (2J/delta)^2 back
        s, _ = exchange_pair(phase / J, J=J, delta_k=detuning_ratio * J,
                             s0=0.0, k0=1.0)
        assert abs(s) ** 2 <= (2.0 / detuning_ratio) ** 2 + 1e-12


class TestRepopulation:
    BOUND = (2.0 * 1000.0 / 50e3) ** 2  # 1.6e-3 at canonical J and detuning

    def test_storage_from_pure_stored_state(self, canonical, grid200):
        _, series = evolve(storage_only_state(grid200), canonical.ensemble,
                           Stage("storage", 0.01,
                                 delta_k=canonical.ensemble.delta_k),
                           canonical.cell, rtol=1e-7, n_samples=400)
        ratio = np.asarray(series.alkali) / series.noble[0]
        assert float(np.max(ratio)) <= self.BOUND

    def test_protocol_storage_exit(self, protocol200):
        # after the exchange-in residual has been absorbed, the alkali
        # population leaving storage still respects the mode-pair bound
        marks = dict(protocol200.stage_marks)
        series = protocol200.series
        i_in = np.searchsorted(series.times, marks["exchange-in"])
        i_out = np.searchsorted(series.times, marks["storage"])
        assert series.alkali[i_out] / series.noble[i_in] <= self.BOUND


class TestTimeline:
    def test_canonical_stage_layout(self, canonical):
        tl = ProtocolTimeline.build(canonical.ensemble, canonical.comb,
                                    canonical.pulse)
        assert [s.name for s in tl.stages] == [
            "transfer-in", "exchange-in", "storage", "exchange-out",
            "transfer-out", "echo"]
        assert [s.pde for s in tl.stages] == [False, True, True, True,
                                              False, False]
        assert tl.stage("exchange-in").duration == T_EXCHANGE
        assert tl.stage("storage").duration == pytest.approx(0.01, rel=1e-12)
        assert tl.stage("storage").delta_k == 50e3
        assert tl.stage("echo").duration == comb_rephasing_time(
            canonical.comb.peak_separation)

    def test_storage_detuning_must_dominate_exchange(self, canonical):
        with pytest.raises(ValueError):
            ProtocolTimeline.build(canonical.ensemble, canonical.comb,
                                   canonical.pulse, storage_delta_k=500.0)

    def test_exchange_stages_must_be_resonant(self):
        with pytest.raises(ValueError):
            ProtocolTimeline(stages=[Stage("exchange-in", 1e-3, delta_k=5.0)])

    def test_stage_duration_positive(self):
        with pytest.raises(ValueError):
            Stage("storage", 0.0)

    def test_unknown_stage_lookup(self, canonical):
        tl = ProtocolTimeline.build(canonical.ensemble, canonical.comb,
                                    canonical.pulse)
        with pytest.raises(KeyError):
            tl.stage("warmup")


class TestProtocol:
    def test_reference_resolution_regression(self, protocol200):
        assert protocol200.breakdown.total == pytest.approx(
            0.7150169214344595, abs=2e-4)
        assert protocol200.projection == pytest.approx(0.7812913663729402,
                                                       abs=2e-4)
        assert protocol200.storage_extrapolation == 1.0

    def test_breakdown_factorization(self, protocol200):
        bd = protocol200.breakdown
        assert bd.total == pytest.approx(
            bd.transfer_in * bd.transfer_out * bd.exchange_roundtrip
            * bd.dephasing, rel=1e-12)
        assert bd.transfer_in == 0.9816843611112658
        assert bd.dephasing == 0.9496412035517837
        assert bd.exchange_roundtrip == pytest.approx(
            protocol200.projection * protocol200.storage_extrapolation,
            rel=1e-12)

    def test_stage_marks(self, protocol200):
        marks = dict(protocol200.stage_marks)
        assert marks["transfer-in"] == 0.0
        assert marks["exchange-in"] == pytest.approx(T_EXCHANGE, rel=1e-12)
        assert marks["storage"] == pytest.approx(T_EXCHANGE + 0.01, rel=1e-12)
        assert marks["exchange-out"] == pytest.approx(2 * T_EXCHANGE + 0.01,
                                                      rel=1e-12)

    def test_grid_doubling_converged(self, canonical, grid200, protocol200):
        grid100 = RadialGrid(radius=canonical.cell.radius, n_points=100)
        tl = ProtocolTimeline.build(canonical.ensemble, canonical.comb,
                                    canonical.pulse)
        coarse = run_protocol(tl, canonical.ensemble, canonical.comb,
                              canonical.pulse, canonical.cell, grid=grid100)
        assert abs(coarse.breakdown.total
                   - protocol200.breakdown.total) < 5e-3

    def test_rtol_tightening_converged(self, canonical, grid200, protocol200):
        tl = ProtocolTimeline.build(canonical.ensemble, canonical.comb,
                                    canonical.pulse)
        tight = run_protocol(tl, canonical.ensemble, canonical.comb,
                             canonical.pulse, canonical.cell, grid=grid200,
                             rtol=1e-7)
        assert abs(tight.breakdown.total
                   - protocol200.breakdown.total) < 1e-4

    def test_long_storage_uses_analytic_tail(self, canonical, grid64):
        tl = ProtocolTimeline.build(canonical.ensemble, canonical.comb,
                                    canonical.pulse, storage_duration=0.02)
        res = run_protocol(tl, canonical.ensemble, canonical.comb,
                           canonical.pulse, canonical.cell, grid=grid64)
        cap = 10.0 / canonical.ensemble.J
        expect = math.exp(-2.0 * canonical.ensemble.gamma_k * (0.02 - cap))
        assert res.storage_extrapolation == pytest.approx(expect, rel=1e-12)

    def test_numeric_transfer_model(self, canonical, grid64):
        tl = ProtocolTimeline.build(canonical.ensemble, canonical.comb,
                                    canonical.pulse)
        res = run_protocol(tl, canonical.ensemble, canonical.comb,
                           canonical.pulse, canonical.cell, grid=grid64,
                           transfer=TransferModel.NUMERIC)
        direct = transfer_efficiency_numeric(canonical.pulse,
                                             canonical.comb.bandwidth)
        assert res.breakdown.transfer_in == direct
        assert res.breakdown.transfer_out == direct

    def test_grid_radius_must_match_cell(self, canonical):
        tl = ProtocolTimeline.build(canonical.ensemble, canonical.comb,
                                    canonical.pulse)
        odd = RadialGrid(radius=2.0, n_points=64)
        with pytest.raises(ValueError):
            run_protocol(tl, canonical.ensemble, canonical.comb,
                         canonical.pulse, canonical.cell, grid=odd)


class TestCoatedZeroDiffusion:
    """Both walls coated and D = 0: the full protocol has a closed form."""

    ANALYTIC_TOTAL = 0.8662170113938524

    def coated(self, canonical):
        ens = replace(canonical.ensemble, D_a=0.0, D_b=0.0)
        cell = replace(canonical.cell, boundary_alkali=Boundary.NON_DESTRUCTIVE)
        return ens, cell

    def test_commensurate_storage_window(self, canonical, grid200):
        # storage window an integer number of detuned-exchange cycles, so
        # the residual oscillation closes and only true losses remain
        ens, cell = self.coated(canonical)
        omega = math.hypot(ens.delta_k, 2.0 * ens.J)
        tau = 80 * 2.0 * math.pi / omega
        tl = ProtocolTimeline.build(ens, canonical.comb, canonical.pulse,
                                    storage_duration=tau)
        res = run_protocol(tl, ens, canonical.comb, canonical.pulse, cell,
                           grid=grid200, storage_compression=tau)
        assert abs(res.breakdown.total - self.ANALYTIC_TOTAL) < 1e-3
        assert res.breakdown.total == pytest.approx(0.8662380884189735,
                                                    abs=1e-5)

    def test_default_storage_window(self, canonical, grid200):
        ens, cell = self.coated(canonical)
        tl = ProtocolTimeline.build(ens, canonical.comb, canonical.pulse)
        res = run_protocol(tl, ens, canonical.comb, canonical.pulse, cell,
                           grid=grid200)
        assert abs(res.breakdown.total - self.ANALYTIC_TOTAL) < 1e-3


class TestExchangeSweeps:
    def test_numeric_below_analytic_and_monotone(self, canonical, grid64):
        pts = spin_exchange_efficiency_numeric(
            canonical.ensemble, grid64, canonical.cell,
            sweep=[10.0, 40.0, 160.0], mode=SweepMode.EXCHANGE_RATIO)
        for p in pts:
            assert p.eta_numeric <= p.eta_analytic
        nums = [p.eta_numeric for p in pts]
        assert nums == sorted(nums)

    def test_diffusion_sweep_decreasing(self, canonical, grid64):
        pts = spin_exchange_efficiency_numeric(
            canonical.ensemble, grid64, canonical.cell,
            sweep=[0.1, 0.35, 1.0], mode=SweepMode.DIFFUSION)
        nums = [p.eta_numeric for p in pts]
        assert nums == sorted(nums, reverse=True)
        # analytic column ignores diffusion entirely
        assert len({p.eta_analytic for p in pts}) == 1

    def test_worker_count_does_not_change_result(self, canonical, grid64):
        kw = dict(sweep=[20.0, 60.0], mode=SweepMode.EXCHANGE_RATIO)
        one = spin_exchange_efficiency_numeric(canonical.ensemble, grid64,
                                               canonical.cell, workers=1, **kw)
        two = spin_exchange_efficiency_numeric(canonical.ensemble, grid64,
                                               canonical.cell, workers=2, **kw)
        assert [p.eta_numeric for p in one] == [p.eta_numeric for p in two]
