"""Distribution of the fitted Gamma-sum proxy: MGF, envelope PDF, and the
CDF of the squared envelope.

PDF and CDF are semi-infinite oscillatory integrals.  Both are integrated
with Gauss-Legendre panels: a geometrically refined head resolves the
region where the phase derivative still varies, then half-period panels of
the asymptotic oscillation are summed with iterated-mean acceleration of
the alternating partial sums.  The raw envelope tail bound decays only
algebraically (as slowly as 1/t for a single active eigenvalue), so the
acceleration is what makes tight absolute tolerances reachable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from numpy.typing import NDArray

from .errors import AccuracyError, DomainError
from .matcher import GammaSumModel
from .specfun import ln_gamma, ln_kummer_1f1

__all__ = [
    "QuadratureControl",
    "DEFAULT_QUADRATURE",
    "mgf",
    "pdf",
    "pdf_equal_corr",
    "cdf",
]


@dataclass(frozen=True)
class QuadratureControl:
    """Panelled-quadrature policy for the oscillatory integrals."""

    abs_tol: float = 1e-8
    panel_nodes: int = 64
    max_panels: int = 4096

    def __post_init__(self):
        if self.abs_tol <= 0 or self.panel_nodes < 2 or self.max_panels < 8:
            raise DomainError("quadrature control parameters must be positive")


DEFAULT_QUADRATURE = QuadratureControl()

_ACCEL_DEPTH = 12
_PANEL_BATCH = 32


def _active_rates(model: GammaSumModel) -> NDArray[np.float64]:
    """Per-eigenvalue rates omega_r*lambda/m_r, zero eigenvalues dropped."""
    lams = np.asarray([l for l in model.spectrum.values if l > 0.0])
    if lams.size == 0:
        raise DomainError("model has no positive eigenvalues")
    return model.omega_r * lams / model.m_r


def mgf(model: GammaSumModel, s: float) -> float:
    """Moment generating function of the squared proxy envelope.

    Defined for s below the pole m_r / (omega_r * max eigenvalue); all
    performance consumers evaluate on the negative real axis, and the
    small positive range supports derivative checks at the origin.  Zero
    eigenvalues contribute unit factors and are skipped.
    """
    if s == 0.0:
        return 1.0
    rates = _active_rates(model)
    if s > 0 and s * float(rates.max()) >= 1.0:
        raise DomainError(
            f"mgf pole at s={1.0 / float(rates.max())}; got s={s}")
    return math.exp(-model.m_r * float(np.sum(np.log1p(-s * rates))))


def _leggauss_unit(nodes: int):
    x, w = leggauss(nodes)
    return (x + 1.0) * 0.5, w * 0.5


def _osc_integral(kernel, env_log, rates: NDArray[np.float64], m_r: float,
                  freq: float, ctrl: QuadratureControl) -> float:
    """Integrate kernel(t) over (0, inf) where kernel oscillates with
    asymptotic half-period pi/freq and decays like the envelope exp(env_log).

    Returns the integral estimate or raises AccuracyError with the partial
    value attached.
    """
    xg, wg = _leggauss_unit(ctrl.panel_nodes)
    half_period = math.pi / freq

    def panels(edges_lo: NDArray[np.float64], edges_hi: NDArray[np.float64]) -> float:
        widths = edges_hi - edges_lo
        t = edges_lo[:, None] + widths[:, None] * xg[None, :]
        return float(np.sum(widths[:, None] * wg[None, :] * kernel(t)))

    def tail_panels(k0: int, count: int, t0: float) -> NDArray[np.float64]:
        ks = np.arange(k0, k0 + count)
        lo = t0 + ks * half_period
        t = lo[:, None] + half_period * xg[None, :]
        return half_period * np.sum(wg[None, :] * kernel(t), axis=1)

    # Head: geometric subdivision over the region where the envelope varies
    # on a scale finer than a half-period.  When the oscillation is already
    # the fine structure the half-period panels resolve everything.
    t_env = 1.0 / float(rates.max())
    if t_env >= half_period:
        t0 = 0.0
        total = 0.0
    else:
        t0 = half_period * max(1, math.ceil(16.0 * t_env / half_period))
        edges = [0.0]
        width = t_env / 8.0
        while edges[-1] < t0:
            edges.append(min(edges[-1] + min(width, half_period), t0))
            width *= 2.0
        edges = np.asarray(edges)
        total = panels(edges[:-1], edges[1:])

    partials: list[float] = []
    est_prev = None
    stable = 0
    k0 = 0
    while k0 < ctrl.max_panels:
        vals = tail_panels(k0, _PANEL_BATCH, t0)
        for v in vals:
            total += v
            partials.append(total)
        k0 += _PANEL_BATCH
        tail_bound = math.exp(env_log(t0 + k0 * half_period)) * half_period
        depth = min(_ACCEL_DEPTH, len(partials))
        acc = np.asarray(partials[-depth:])
        while acc.size > 1:
            acc = 0.5 * (acc[1:] + acc[:-1])
        est = float(acc[0])
        if est_prev is not None and abs(est - est_prev) < 0.25 * ctrl.abs_tol:
            stable += 1
            if stable >= 2:
                return est
        elif est_prev is not None:
            stable = 0
        if tail_bound < ctrl.abs_tol and abs(vals[-1]) < ctrl.abs_tol:
            return total
        est_prev = est
    raise AccuracyError(
        f"oscillatory integral did not reach abs_tol={ctrl.abs_tol} within "
        f"{ctrl.max_panels} panels",
        partial=est_prev if est_prev is not None else total,
    )


def pdf(model: GammaSumModel, r: float,
        ctrl: QuadratureControl = DEFAULT_QUADRATURE) -> float:
    """Probability density of the proxy envelope at r > 0."""
    if not r > 0:
        raise DomainError(f"pdf requires r > 0, got {r}")
    rates = _active_rates(model)
    m_r = model.m_r
    r2 = r * r

    def kernel(t):
        tw = t[..., None] * rates
        theta = m_r * np.sum(np.arctan(tw), axis=-1)
        env = np.exp(-0.5 * m_r * np.sum(np.log1p(tw * tw), axis=-1))
        return np.cos(theta - t * r2) * env

    def env_log(t):
        return -0.5 * m_r * float(np.sum(np.log1p((t * rates) ** 2)))

    try:
        val = _osc_integral(kernel, env_log, rates, m_r, r2, ctrl)
    except AccuracyError as exc:
        raise AccuracyError(
            f"pdf(r={r}) did not converge: {exc}",
            partial=2.0 * r / math.pi * exc.partial,
        ) from exc
    return 2.0 * r / math.pi * val


def cdf(model: GammaSumModel, t: float,
        ctrl: QuadratureControl = DEFAULT_QUADRATURE) -> float:
    """Probability that the squared proxy envelope lies below t > 0.

    The threshold is in power (SNR) units; the envelope-domain CDF at r is
    ``cdf(model, r*r)``.
    """
    if not t > 0:
        raise DomainError(f"cdf requires a positive threshold, got {t}")
    rates = _active_rates(model)
    m_r = model.m_r

    def kernel(x):
        xw = x[..., None] * rates
        theta = m_r * np.sum(np.arctan(xw), axis=-1)
        env = np.exp(-0.5 * m_r * np.sum(np.log1p(xw * xw), axis=-1))
        return np.sin(theta - x * t) * env / x

    def env_log(x):
        return -0.5 * m_r * float(np.sum(np.log1p((x * rates) ** 2))) - math.log(x)

    try:
        val = _osc_integral(kernel, env_log, rates, m_r, t, ctrl)
    except AccuracyError as exc:
        raise AccuracyError(
            f"cdf(t={t}) did not converge: {exc}",
            partial=min(1.0, max(0.0, 0.5 - exc.partial / math.pi)),
        ) from exc
    return min(1.0, max(0.0, 0.5 - val / math.pi))


def pdf_equal_corr(model: GammaSumModel, rho: float, r: float) -> float:
    """Closed-form envelope density for an equal-correlation proxy.

    Only valid when the model spectrum is the equal-correlation one
    (one dominant eigenvalue, L-1 repeated).  Assembled in log space so
    large confluent-hypergeometric arguments cannot overflow.
    """
    if not r > 0:
        raise DomainError(f"pdf requires r > 0, got {r}")
    if not 0.0 <= rho < 1.0:
        raise DomainError(f"equal-correlation closed form needs rho in [0,1), got {rho}")
    L = model.branch_count
    m = model.m_r
    om = model.omega_r
    sr = math.sqrt(rho)
    lam_small = 1.0 - sr
    lam_big = 1.0 + (L - 1) * sr
    arg = m * L * sr * r * r / (lam_small * lam_big * om)
    log_val = (
        math.log(2.0) + (2.0 * m * L - 1.0) * math.log(r)
        + m * L * math.log(m / om)
        - ln_gamma(m * L)
        - m * (L - 1) * math.log(lam_small)
        - m * math.log(lam_big)
        - m * r * r / (lam_small * om)
    )
    if arg > 0.0:
        log_val += ln_kummer_1f1(m, m * L, arg)
    return math.exp(log_val)
