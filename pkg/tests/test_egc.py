"""Receiver-performance tests: closed forms, orderings, quadrature
equivalence, and the power profile."""
import math

import numpy as np
import pytest
from numpy.polynomial.legendre import leggauss
from scipy.special import gammainc

from nakasum.egc import (
    PerfCurve,
    ReceiverSpec,
    ber_bfsk_noncoherent,
    ber_bpsk,
    ber_curve,
    egc_model,
    outage,
    outage_curve,
    power_profile,
)
from nakasum.errors import DomainError, ValidationError
from nakasum.gammasum import mgf
from nakasum.matcher import match_parameters
from nakasum.moments import EnsembleSpec, EqualCorrelation, ExponentialCorrelation


def balanced_rx(corr, m_z, L, n0=1.0, mod="bpsk"):
    return ReceiverSpec(
        ensemble=EnsembleSpec(fading_m=m_z, powers=(1.0,) * L, correlation=corr),
        noise_psd=n0,
        modulation=mod,
    )


class TestEgcModel:
    def test_unit_everything(self):
        rx = ReceiverSpec(
            ensemble=EnsembleSpec(fading_m=1, powers=(1.0,),
                                  correlation=EqualCorrelation(0.0)),
            noise_psd=1.0)
        model = egc_model(rx)
        assert model.omega_r == pytest.approx(1.0, rel=1e-14)

    def test_noise_scaling(self):
        rx1 = balanced_rx(EqualCorrelation(0.4), 2, 3, n0=1.0)
        rx10 = balanced_rx(EqualCorrelation(0.4), 2, 3, n0=10.0)
        m1, m10 = egc_model(rx1), egc_model(rx10)
        assert m10.omega_r == pytest.approx(m1.omega_r / 10.0, rel=1e-14)
        assert m10.m_r == m1.m_r

    def test_shape_parameter_from_published_cell(self):
        for n0 in (0.1, 1.0, 25.0):
            model = egc_model(balanced_rx(EqualCorrelation(0.8), 2, 4, n0=n0))
            assert model.m_r == pytest.approx(1.9333, abs=5e-4)

    def test_modulation_validation(self):
        with pytest.raises(ValidationError):
            balanced_rx(EqualCorrelation(0.0), 1, 2, mod="qam")
        with pytest.raises(ValidationError):
            balanced_rx(EqualCorrelation(0.0), 1, 2, n0=0.0)


class TestOutage:
    def test_vanishes_at_tiny_threshold(self):
        model = egc_model(balanced_rx(EqualCorrelation(0.2), 1, 3))
        assert outage(model, 1e-9 * model.mean_square) < 1e-6

    def test_single_branch_incomplete_gamma(self):
        model = egc_model(ReceiverSpec(
            ensemble=EnsembleSpec(fading_m=2, powers=(1.0,),
                                  correlation=EqualCorrelation(0.0)),
            noise_psd=0.5))
        for t in (0.3, 1.0, 4.0):
            want = float(gammainc(model.m_r, model.m_r * t / model.omega_r))
            assert outage(model, t) == pytest.approx(want, abs=1e-8)

    def test_domain(self):
        model = egc_model(balanced_rx(EqualCorrelation(0.2), 1, 3))
        with pytest.raises(DomainError):
            outage(model, 0.0)


class TestBerBpsk:
    def test_rayleigh_closed_form(self):
        # single branch, unit shape: 0.5 * (1 - sqrt(g/(1+g)))
        for snr in (0.5, 1.0, 4.0, 20.0):
            model = egc_model(ReceiverSpec(
                ensemble=EnsembleSpec(fading_m=1, powers=(snr,),
                                      correlation=EqualCorrelation(0.0)),
                noise_psd=1.0))
            want = 0.5 * (1.0 - math.sqrt(snr / (1.0 + snr)))
            assert ber_bpsk(model) == pytest.approx(want, rel=1e-9)

    def test_no_information_limit(self):
        # the limit is approached like 0.5 - sqrt(gamma)/2, so the deviation
        # at gamma = 1e-9 is about 1.6e-5 by construction
        model = egc_model(ReceiverSpec(
            ensemble=EnsembleSpec(fading_m=1, powers=(1e-9,),
                                  correlation=EqualCorrelation(0.0)),
            noise_psd=1.0))
        assert ber_bpsk(model) == pytest.approx(0.5, abs=5e-5)
        assert ber_bpsk(model) < 0.5

    def test_matches_panel_quadrature(self):
        # same integrand, different quadrature: averaged MGF over the
        # half-open angle interval with dense Gauss-Legendre panels
        model = egc_model(balanced_rx(ExponentialCorrelation(0.5), 2, 3))
        xg, wg = leggauss(64)
        total = 0.0
        panels = np.linspace(0.0, math.pi / 2.0, 65)
        for lo, hi in zip(panels[:-1], panels[1:]):
            theta = lo + (hi - lo) * (xg + 1.0) * 0.5
            vals = np.array([mgf(model, -1.0 / math.sin(t) ** 2) for t in theta])
            total += (hi - lo) * 0.5 * float(wg @ vals)
        ref = total / math.pi
        assert ber_bpsk(model) == pytest.approx(ref, rel=1e-9)


class TestBerBfsk:
    def test_is_half_mgf(self):
        model = egc_model(balanced_rx(EqualCorrelation(0.3), 2, 4))
        assert ber_bfsk_noncoherent(model) == 0.5 * mgf(model, -0.5)

    def test_single_rayleigh_third(self):
        model = egc_model(ReceiverSpec(
            ensemble=EnsembleSpec(fading_m=1, powers=(1.0,),
                                  correlation=EqualCorrelation(0.0)),
            noise_psd=1.0))
        assert ber_bfsk_noncoherent(model) == pytest.approx(1.0 / 3.0, rel=1e-12)

    def test_product_form(self):
        model = egc_model(balanced_rx(ExponentialCorrelation(0.4), 1, 3))
        want = 0.5
        for lam in model.spectrum.values:
            want *= (1.0 + model.omega_r * lam / (2.0 * model.m_r)) ** (-model.m_r)
        assert ber_bfsk_noncoherent(model) == pytest.approx(want, rel=1e-13)


class TestPowerProfile:
    def test_flat(self):
        assert power_profile(2.0, 0.0, 4) == (2.0, 2.0, 2.0, 2.0)

    def test_decay(self):
        got = power_profile(1.0, 0.3, 3)
        want = (1.0, math.exp(-0.3), math.exp(-0.6))
        assert got == pytest.approx(want, rel=1e-15)

    def test_strong_decay_approaches_single_branch(self):
        heavy = EnsembleSpec(fading_m=1, powers=power_profile(1.0, 10.0, 4),
                             correlation=EqualCorrelation(0.0))
        single = EnsembleSpec(fading_m=1, powers=(1.0,),
                              correlation=EqualCorrelation(0.0))
        snr_db = 10.0
        gamma1 = 10.0 ** (snr_db / 10.0)
        multi = egc_model(ReceiverSpec(ensemble=heavy, noise_psd=1.0 / gamma1))
        # the residual branches carry e-10-scale power; combiner noise
        # still divides by L, so compare against the L-branch noise floor
        lone = match_parameters(single).scaled(gamma1 / 4.0)
        assert ber_bpsk(multi) == pytest.approx(ber_bpsk(lone), rel=0.02)

    def test_validation(self):
        with pytest.raises(DomainError):
            power_profile(0.0, 0.1, 3)
        with pytest.raises(DomainError):
            power_profile(1.0, -0.1, 3)


class TestCurves:
    def test_monotone_in_snr(self):
        grid = np.linspace(0.0, 30.0, 16)
        for corr in (EqualCorrelation(0.5), ExponentialCorrelation(0.3)):
            rx = balanced_rx(corr, 2, 3)
            bers = ber_curve(rx, grid).values()
            assert all(b < a for a, b in zip(bers, bers[1:]))
            outs = outage_curve(rx, grid, threshold=2.0).values()
            assert all(b < a for a, b in zip(outs, outs[1:]))

    def test_correlation_hurts(self):
        grid = [5.0, 10.0, 15.0]
        by_rho = {}
        for rho in (0.0, 0.2, 0.7):
            rx = balanced_rx(EqualCorrelation(rho), 2, 4)
            by_rho[rho] = ber_curve(rx, grid).values()
        for i in range(len(grid)):
            assert by_rho[0.7][i] > by_rho[0.2][i] > by_rho[0.0][i]

    def test_bfsk_above_bpsk(self):
        grid = np.linspace(0.0, 20.0, 8)
        bpsk = ber_curve(balanced_rx(EqualCorrelation(0.4), 1, 3), grid).values()
        bfsk = ber_curve(balanced_rx(EqualCorrelation(0.4), 1, 3, mod="bfsk"),
                         grid).values()
        assert all(f > b for f, b in zip(bfsk, bpsk))

    def test_curve_metadata_marks_approximation(self):
        curve = ber_curve(balanced_rx(EqualCorrelation(0.2), 1, 2), [5.0])
        assert curve.meta["method"] == "equivalent-mrc-approximation"
        rows = curve.to_rows()
        assert set(rows[0]) == {"snr_db", "value", "kind", "meta"}

    def test_csv_header(self):
        curve = PerfCurve(points=(), kind="ber-bpsk", meta={})
        assert curve.to_csv().splitlines()[0] == "snr_db,value,kind,meta"
