"""Exact second and fourth moments of a sum of correlated Nakagami-m
envelopes.

The second moment is available in closed form for any pairwise power
correlation.  The fourth moment additionally needs joint moments of three
and four envelopes:

* equal correlation uses coefficients W(...) built on the Lauricella F_A
  function, with the W(2, 1, 1) case reduced to four Gauss-hypergeometric
  terms;
* Markov-structured correlation (exponential, or an arbitrary matrix after
  its Markov-product fit) uses single-series expansions driven by the
  tridiagonal inverses of 3x3 and 4x4 principal submatrices.

Joint-moment routines take unit-power envelopes; the fourth-moment
assembly supplies the power prefactors explicitly.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.typing import NDArray

from .errors import BoundaryError, DomainError, TruncationError, ValidationError
from .linalg import CorrelationMatrix, greens_fit, principal_submatrix_inverse
from .specfun import (
    DEFAULT_SERIES,
    SeriesControl,
    gauss_2f1,
    lauricella_fa,
    ln_gamma,
)

__all__ = [
    "EqualCorrelation",
    "ExponentialCorrelation",
    "ArbitraryCorrelation",
    "CorrelationModel",
    "EnsembleSpec",
    "MomentPair",
    "second_moment_Z",
    "fourth_moment_Z",
    "moment_pair",
    "w_coefficient",
    "w211_reduced",
    "j_identity",
    "joint_moment_triple",
    "joint_moment_quad",
]

# Joint-moment series budget; the geometric ratio approaches 1 only as the
# correlation approaches its maximum, which is bypassed analytically.
JOINT_SERIES = SeriesControl(rel_tol=1e-12, max_terms=10_000)


@dataclass(frozen=True)
class EqualCorrelation:
    """All branch pairs share one power correlation coefficient."""

    rho: float

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ValidationError(f"rho must lie in [0, 1], got {self.rho}")

    def rho_pair(self, i: int, j: int) -> float:
        return self.rho if i != j else 1.0

    def sqrt_matrix(self, dim: int) -> CorrelationMatrix:
        return CorrelationMatrix.equal(self.rho, dim)


@dataclass(frozen=True)
class ExponentialCorrelation:
    """Correlation decays geometrically with branch separation."""

    rho: float

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ValidationError(f"rho must lie in [0, 1], got {self.rho}")

    def rho_pair(self, i: int, j: int) -> float:
        return self.rho ** abs(i - j)

    def sqrt_matrix(self, dim: int) -> CorrelationMatrix:
        return CorrelationMatrix.exponential(self.rho, dim)


@dataclass(frozen=True)
class ArbitraryCorrelation:
    """Explicit matrix of sqrt power-correlation coefficients."""

    matrix: CorrelationMatrix

    def rho_pair(self, i: int, j: int) -> float:
        return float(self.matrix.entries[i, j] ** 2)

    def sqrt_matrix(self, dim: int) -> CorrelationMatrix:
        if dim != self.matrix.dim:
            raise ValidationError(
                f"correlation matrix dim {self.matrix.dim} != branch count {dim}")
        return self.matrix


CorrelationModel = Union[EqualCorrelation, ExponentialCorrelation, ArbitraryCorrelation]


@dataclass(frozen=True)
class EnsembleSpec:
    """Physical model: branch powers, common integer fading parameter, and
    the pairwise power-correlation model."""

    fading_m: int
    powers: tuple[float, ...]
    correlation: CorrelationModel

    def __post_init__(self):
        if not (isinstance(self.fading_m, (int, np.integer)) and self.fading_m >= 1):
            raise ValidationError(
                f"fading parameter must be a positive integer, got {self.fading_m}")
        powers = tuple(float(p) for p in self.powers)
        if len(powers) < 1:
            raise ValidationError("at least one branch is required")
        if any(p <= 0 for p in powers):
            raise ValidationError("branch powers must be positive")
        object.__setattr__(self, "fading_m", int(self.fading_m))
        object.__setattr__(self, "powers", powers)
        if isinstance(self.correlation, ArbitraryCorrelation):
            if self.correlation.matrix.dim != len(powers):
                raise ValidationError(
                    "correlation matrix dimension does not match branch count")
        elif not isinstance(self.correlation,
                            (EqualCorrelation, ExponentialCorrelation)):
            raise ValidationError(
                f"unknown correlation model {type(self.correlation).__name__}")

    @property
    def branch_count(self) -> int:
        return len(self.powers)

    def rho(self, i: int, j: int) -> float:
        return self.correlation.rho_pair(i, j)

    def sqrt_corr_matrix(self) -> CorrelationMatrix:
        return self.correlation.sqrt_matrix(self.branch_count)

    def is_maximal(self) -> bool:
        """True when every pair is fully power-correlated."""
        if self.branch_count == 1:
            return False
        if isinstance(self.correlation, (EqualCorrelation, ExponentialCorrelation)):
            return self.correlation.rho == 1.0
        off = self.correlation.matrix.entries[
            ~np.eye(self.branch_count, dtype=bool)]
        return bool(np.all(off == 1.0))


@dataclass(frozen=True)
class MomentPair:
    """Second and fourth moments of the envelope sum."""

    m2: float
    m4: float

    def __post_init__(self):
        if not (self.m2 > 0 and self.m4 > 0):
            raise ValidationError("moments must be positive")
        if not self.m4 > self.m2 ** 2:
            raise ValidationError(
                f"fourth moment {self.m4} must exceed squared second moment "
                f"{self.m2 ** 2}")


def _gamma_ratio(num: float, den: float) -> float:
    return math.exp(ln_gamma(num) - ln_gamma(den))


def second_moment_Z(spec: EnsembleSpec) -> float:
    """E[Z^2] of the envelope sum."""
    m = spec.fading_m
    powers = spec.powers
    if spec.is_maximal():
        return math.fsum(math.sqrt(p) for p in powers) ** 2
    coeff = 2.0 * _gamma_ratio(m + 0.5, m) ** 2 / m
    cross = 0.0
    for i, j in itertools.combinations(range(spec.branch_count), 2):
        cross += math.sqrt(powers[i] * powers[j]) * \
            gauss_2f1(-0.5, -0.5, m, spec.rho(i, j))
    return math.fsum(powers) + coeff * cross


def j_identity(m: float, a: float, p: float, q: float) -> float:
    """Closed form of (1/Gamma(m)) int_0^inf u^(m-1) e^-u
    1F1(-p/2; m; -a u) 1F1(-q/2; m; -a u) du."""
    if m <= 0:
        raise DomainError(f"j_identity requires m > 0, got {m}")
    if a <= -0.5:
        raise DomainError(f"j_identity requires a > -1/2, got {a}")
    x = -a * a / (1.0 + 2.0 * a)
    f = gauss_2f1(m + p / 2.0, -q / 2.0, m, x)
    return (1.0 + a) ** (p / 2.0) * ((1.0 + 2.0 * a) / (1.0 + a)) ** (q / 2.0) * f


def w211_reduced(m_z: int, rho: float, n_vars: int = 3) -> float:
    """W(2,1,1) reduced to four Gauss-hypergeometric terms.

    Contiguous relations on the Kummer factors of the Laplace integral
    collapse the three-variable F_A to a bracket of j_identity values at
    the rescaled argument sqrt(rho)/(1 - sqrt(rho)); the apparent
    dependence on the variable count cancels identically.
    """
    _validate_w_args(m_z, rho, n_vars)
    if n_vars != 3:
        raise DomainError("W(2,1,1) is a three-variable coefficient")
    m = float(m_z)
    sr = math.sqrt(rho)
    ap = sr / (1.0 - sr)
    g = _gamma_ratio(m + 0.5, m)
    bracket = (
        j_identity(m, ap, 1, 1)
        + ap * ((m + 0.5) ** 2 / m ** 2 * j_identity(m + 1.0, ap, 1, 1)
                - (m + 0.5) / m ** 2 * j_identity(m + 1.0, ap, 1, -1)
                + 1.0 / (4.0 * m ** 2) * j_identity(m + 1.0, ap, -1, -1))
    )
    return m * g * g * bracket


def _validate_w_args(m_z: int, rho: float, n_vars: int) -> None:
    if not (isinstance(m_z, (int, np.integer)) and m_z >= 1):
        raise DomainError(f"fading parameter must be a positive integer, got {m_z}")
    if rho == 1.0:
        raise BoundaryError(
            "maximal correlation must be handled analytically upstream")
    if not 0.0 <= rho < 1.0:
        raise DomainError(f"rho must lie in [0, 1), got {rho}")
    if n_vars < 2:
        raise DomainError(f"need at least two variables, got {n_vars}")


def _w_via_fa(orders: tuple[int, ...], m_z: int, rho: float,
              ctrl: SeriesControl = DEFAULT_SERIES) -> float:
    """W coefficient through the Lauricella F_A route."""
    m = float(m_z)
    n = len(orders)
    sr = math.sqrt(rho)
    x = sr / (1.0 + (n - 1) * sr)
    pref = math.exp(math.fsum(ln_gamma(m + k / 2.0) - ln_gamma(m) for k in orders))
    pref *= ((1.0 - sr) / (1.0 + (n - 1) * sr)) ** m
    fa = lauricella_fa(
        m,
        tuple(m + k / 2.0 for k in orders),
        (m,) * n,
        (x,) * n,
        ctrl,
    )
    return pref * fa


def w_coefficient(orders: tuple[int, ...], m_z: int, rho: float,
                  n_vars: int | None = None,
                  ctrl: SeriesControl = DEFAULT_SERIES) -> float:
    """Joint-moment coefficient W(k_1, ..., k_N) for equal correlation.

    The (2, 1, 1) case dispatches to its hypergeometric reduction; all
    other orders evaluate the Lauricella F_A function directly.
    """
    orders = tuple(int(k) for k in orders)
    if n_vars is None:
        n_vars = len(orders)
    if n_vars != len(orders):
        raise DomainError(
            f"n_vars={n_vars} does not match {len(orders)} orders")
    if any(k < 1 for k in orders):
        raise DomainError("orders must be positive integers")
    _validate_w_args(m_z, rho, n_vars)
    if sorted(orders) == [1, 1, 2]:
        return w211_reduced(m_z, rho, 3)
    return _w_via_fa(orders, m_z, rho, ctrl)


def _require_tridiagonal(mat: NDArray[np.float64], name: str) -> None:
    n = mat.shape[0]
    scale = np.abs(mat).max()
    for i in range(n):
        for j in range(i + 2, n):
            if abs(mat[i, j]) > 1e-8 * scale:
                raise ValidationError(
                    f"{name} must be tridiagonal (entry ({i},{j}) is "
                    f"{mat[i, j]:.3e}); only Markov-structured correlation "
                    "admits this expansion")


def joint_moment_triple(n1: int, n2: int, n3: int, delta: NDArray[np.float64],
                        m_z: int, ctrl: SeriesControl = JOINT_SERIES) -> float:
    """Unit-power joint moment E[Z_a^n1 Z_b^n2 Z_c^n3] for three branches
    whose 3x3 sqrt-correlation submatrix has the tridiagonal inverse
    ``delta``.

    Single series over k with one Gauss-hypergeometric factor per term;
    the term ratio is geometric with ratio delta_12^2/(delta_11 delta_22).
    """
    if (n1, n2, n3) not in ((2, 1, 1), (1, 2, 1), (1, 1, 2)):
        raise DomainError(f"unsupported exponent triple ({n1}, {n2}, {n3})")
    delta = np.asarray(delta, dtype=float)
    if delta.shape != (3, 3):
        raise ValidationError(f"delta must be 3x3, got {delta.shape}")
    _require_tridiagonal(delta, "delta")
    m = float(m_z)
    d11, d22, d33 = delta[0, 0], delta[1, 1], delta[2, 2]
    d12, d23 = delta[0, 1], delta[1, 2]
    det = float(np.linalg.det(delta))
    pref = det ** m / (
        d11 ** (m + n1 / 2.0) * d22 ** (m + n2 / 2.0) * d33 ** (m + n3 / 2.0))
    pref *= math.exp(ln_gamma(m + n3 / 2.0) - 2.0 * ln_gamma(m))
    pref /= m ** ((n1 + n2 + n3) / 2.0)
    q = d12 * d12 / (d11 * d22)
    x = d23 * d23 / (d22 * d33)
    if q / max(1.0 - x, 1e-300) >= 1.0 - 1e-9:
        raise TruncationError(
            "joint-moment series ratio at or above 1; correlation is "
            "effectively maximal and must be handled analytically",
            partial=math.nan,
        )
    total = 0.0
    log_q = math.log(q) if q > 0.0 else None
    for k in range(ctrl.max_terms):
        if k > 0 and log_q is None:
            break
        lt = (k * log_q if k > 0 else 0.0)
        lt += (ln_gamma(m + k + n1 / 2.0) + ln_gamma(m + k + n2 / 2.0)
               - ln_gamma(m + k) - ln_gamma(k + 1.0))
        term = math.exp(lt) * gauss_2f1(m + k + n2 / 2.0, m + n3 / 2.0, m, x)
        if not math.isfinite(term):
            raise TruncationError(
                "joint-moment series term overflowed; the correlation is too "
                "close to maximal for this expansion in double precision",
                partial=pref * total,
            )
        total += term
        if k > 3 and term <= ctrl.rel_tol * total:
            return pref * total
    if log_q is None:
        return pref * total
    raise TruncationError(
        f"joint-moment series did not converge in {ctrl.max_terms} terms",
        partial=pref * total,
    )


def joint_moment_quad(psi: NDArray[np.float64], m_z: int,
                      ctrl: SeriesControl = JOINT_SERIES) -> float:
    """Unit-power joint moment E[Z_a Z_b Z_c Z_d] for four branches whose
    4x4 sqrt-correlation submatrix has the tridiagonal inverse ``psi``."""
    psi = np.asarray(psi, dtype=float)
    if psi.shape != (4, 4):
        raise ValidationError(f"psi must be 4x4, got {psi.shape}")
    _require_tridiagonal(psi, "psi")
    m = float(m_z)
    p11, p22, p33, p44 = psi[0, 0], psi[1, 1], psi[2, 2], psi[3, 3]
    p12, p23, p34 = psi[0, 1], psi[1, 2], psi[2, 3]
    det = float(np.linalg.det(psi))
    pref = det ** m / (p11 * p22 * p33 * p44) ** (m + 0.5)
    pref *= math.exp(2.0 * ln_gamma(m + 0.5) - 3.0 * ln_gamma(m)) / m ** 2
    q = p23 * p23 / (p22 * p33)
    x1 = p12 * p12 / (p11 * p22)
    x2 = p34 * p34 / (p33 * p44)
    if q / max((1.0 - x1) * (1.0 - x2), 1e-300) >= 1.0 - 1e-9:
        raise TruncationError(
            "joint-moment series ratio at or above 1; correlation is "
            "effectively maximal and must be handled analytically",
            partial=math.nan,
        )
    total = 0.0
    log_q = math.log(q) if q > 0.0 else None
    for k in range(ctrl.max_terms):
        if k > 0 and log_q is None:
            break
        lt = (k * log_q if k > 0 else 0.0)
        lt += 2.0 * ln_gamma(m + k + 0.5) - ln_gamma(k + 1.0) - ln_gamma(m + k)
        term = math.exp(lt)
        term *= gauss_2f1(m + 0.5, k + m + 0.5, m, x1)
        term *= gauss_2f1(m + 0.5, k + m + 0.5, m, x2)
        if not math.isfinite(term):
            raise TruncationError(
                "joint-moment series term overflowed; the correlation is too "
                "close to maximal for this expansion in double precision",
                partial=pref * total,
            )
        total += term
        if k > 3 and term <= ctrl.rel_tol * total:
            return pref * total
    if log_q is None:
        return pref * total
    raise TruncationError(
        f"joint-moment series did not converge in {ctrl.max_terms} terms",
        partial=pref * total,
    )


def _fourth_moment_pair_terms(spec: EnsembleSpec) -> float:
    m = spec.fading_m
    powers = spec.powers
    c2 = 6.0 * _gamma_ratio(m + 1.0, m) ** 2 / m ** 2
    c3 = 4.0 * math.exp(
        ln_gamma(m + 1.5) + ln_gamma(m + 0.5) - 2.0 * ln_gamma(m)) / m ** 2
    t2 = 0.0
    t3 = 0.0
    for i, j in itertools.combinations(range(spec.branch_count), 2):
        rij = spec.rho(i, j)
        t2 += powers[i] * powers[j] * gauss_2f1(-1.0, -1.0, m, rij)
        t3 += (powers[i] ** 1.5 * powers[j] ** 0.5 +
               powers[i] ** 0.5 * powers[j] ** 1.5) * \
            gauss_2f1(-1.5, -0.5, m, rij)
    return c2 * t2 + c3 * t3


def _fourth_moment_joint_equal(spec: EnsembleSpec) -> float:
    m = spec.fading_m
    rho = spec.correlation.rho
    powers = spec.powers
    L = spec.branch_count
    sr = math.sqrt(rho)
    scale = ((1.0 - sr) / m) ** 2
    total = 0.0
    if L >= 3:
        e_triple = scale * w_coefficient((2, 1, 1), m, rho)
        weight = 0.0
        for a, b, c in itertools.combinations(range(L), 3):
            pa, pb, pc = powers[a], powers[b], powers[c]
            weight += (pa * math.sqrt(pb * pc) + math.sqrt(pa) * pb * math.sqrt(pc)
                       + math.sqrt(pa * pb) * pc)
        total += 12.0 * e_triple * weight
    if L >= 4:
        e_quad = scale * w_coefficient((1, 1, 1, 1), m, rho)
        weight = math.fsum(
            math.sqrt(powers[a] * powers[b] * powers[c] * powers[d])
            for a, b, c, d in itertools.combinations(range(L), 4))
        total += 24.0 * e_quad * weight
    return total


def _fourth_moment_joint_markov(spec: EnsembleSpec,
                                fitted: CorrelationMatrix) -> float:
    m = spec.fading_m
    powers = spec.powers
    L = spec.branch_count
    total = 0.0
    for a, b, c in itertools.combinations(range(L), 3):
        delta = principal_submatrix_inverse(fitted, (a, b, c))
        pa, pb, pc = powers[a], powers[b], powers[c]
        total += 12.0 * (
            pa * math.sqrt(pb * pc) * joint_moment_triple(2, 1, 1, delta, m)
            + math.sqrt(pa) * pb * math.sqrt(pc) * joint_moment_triple(1, 2, 1, delta, m)
            + math.sqrt(pa * pb) * pc * joint_moment_triple(1, 1, 2, delta, m))
    for a, b, c, d in itertools.combinations(range(L), 4):
        psi = principal_submatrix_inverse(fitted, (a, b, c, d))
        total += 24.0 * math.sqrt(powers[a] * powers[b] * powers[c] * powers[d]) * \
            joint_moment_quad(psi, m)
    return total


def fourth_moment_Z(spec: EnsembleSpec) -> float:
    """E[Z^4] of the envelope sum.

    Pairwise contributions use the exact correlation coefficients of the
    input model; the three- and four-branch joint moments use the equal
    correlation coefficients for the equal model and otherwise the
    Markov-product fit of the correlation matrix (an identity operation
    for exponential correlation).
    """
    m = spec.fading_m
    powers = spec.powers
    if spec.is_maximal():
        return (m + 1.0) / m * math.fsum(math.sqrt(p) for p in powers) ** 4
    total = (m + 1.0) / m * math.fsum(p * p for p in powers)
    total += _fourth_moment_pair_terms(spec)
    if spec.branch_count >= 3:
        if isinstance(spec.correlation, EqualCorrelation):
            total += _fourth_moment_joint_equal(spec)
        else:
            fitted = greens_fit(spec.sqrt_corr_matrix())
            total += _fourth_moment_joint_markov(spec, fitted)
    return total


def moment_pair(spec: EnsembleSpec) -> MomentPair:
    """Second and fourth moments bundled with their consistency check."""
    return MomentPair(m2=second_moment_Z(spec), m4=fourth_moment_Z(spec))
