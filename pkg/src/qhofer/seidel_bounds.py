"""Loop-rotation elements and certified length bounds on the blown-up plane.

The circle action rotating the blown-up projective plane acts on quantum
homology through an invertible element; writing Q = F (x) e^{E/2 + F/4}, the
k-fold rotation acts by

    Psi(k) = Q^k (x) e^{k delta (F - 2E)},
    delta  = (1 - a^2)^2 / (12 (1 + a^2)(1 - 3a^2)),

with a^2 the area of the exceptional divisor (units of pi).  The valuation of
Psi(k) is a lower bound for the positive Hofer length of every loop in its
homotopy class, and the two-sided sum v(Q^k) + v(Q^{-k}) bounds the full
length; the delta exponents cancel there, so the two-sided bound survives the
pole at 3a^2 = 1.  Sweeping k and taking the minimum certifies the exact
value omega(F) = 1 - a^2 once the numerical upper bound of the explicit
rotation Hamiltonian meets it.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .novikov import RationalLike, SphereClass, _frac, valuation
from .quantum_homology import (
    ManifoldModel,
    QHElement,
    exact_inverse,
    model_blowup_cp2,
    power,
    power_walk,
)


class MonotoneCaseError(ValueError):
    """Raised where the rotation constant delta has its pole, 3a^2 = 1."""


def delta_constant(a_squared: RationalLike) -> Fraction:
    """The exponent-shift constant of the rotation element."""
    a2 = _frac(a_squared)
    if not 0 < a2 < 1:
        raise ValueError("a_squared must lie strictly between 0 and 1")
    if 3 * a2 == 1:
        raise MonotoneCaseError(
            "delta = (1-a^2)^2/(12(1+a^2)(1-3a^2)) is singular at 3a^2 = 1"
        )
    return (1 - a2) ** 2 / (12 * (1 + a2) * (1 - 3 * a2))


def q_element(model: ManifoldModel) -> QHElement:
    """The rotation generator without its delta shift: F (x) e^{E/2 + F/4}."""
    return model.basis_element("F", SphereClass((Fraction(1, 2), Fraction(1, 4))))


def _q_inverse(model: ManifoldModel) -> QHElement:
    return exact_inverse(model, q_element(model))


def omega_f(a_squared: RationalLike) -> Fraction:
    """Area of the fiber class, 1 - a^2 in units of pi."""
    a2 = _frac(a_squared)
    if not 0 < a2 < 1:
        raise ValueError("a_squared must lie strictly between 0 and 1")
    return 1 - a2


@dataclass(frozen=True)
class SeidelElement:
    """Action of the k-fold rotation loop on quantum homology."""

    loop_multiple: int
    a_squared: Fraction
    delta: Fraction
    value: QHElement


def psi(k: int, a_squared: RationalLike) -> SeidelElement:
    """Rotation element Psi(k) = Q^k (x) e^{k delta (F - 2E)}."""
    a2 = _frac(a_squared)
    delta = delta_constant(a2)
    model = model_blowup_cp2(a2)
    shift = SphereClass((Fraction(1, 2) - 2 * delta, Fraction(1, 4) + delta))
    base = model.basis_element("F", shift)
    return SeidelElement(int(k), a2, delta, power(model, base, int(k)))


def ell_plus_lower_bound(k: int, a_squared: RationalLike) -> Fraction:
    """Certified lower bound for the positive length of the k-fold loop.

    Returns v(Psi(k)) in units of pi; exact rational.
    """
    a2 = _frac(a_squared)
    model = model_blowup_cp2(a2)
    return valuation(psi(k, a2).value, model.omega)


def two_sided_bound(k: int, a_squared: RationalLike) -> Fraction:
    """v(Q^k) + v(Q^{-k}): lower bound for the full length of the k-fold loop.

    The delta exponents cancel in the sum, so this stays defined at the
    monotone value 3a^2 = 1.
    """
    k = int(k)
    if k < 1:
        raise ValueError("k must be at least 1")
    model = model_blowup_cp2(a_squared)
    q = q_element(model)
    vk = valuation(power(model, q, k), model.omega)
    vnk = valuation(power(model, q, -k), model.omega)
    return vk + vnk


def two_sided_bounds(k_max: int, a_squared: RationalLike) -> list:
    """[(k, two_sided_bound(k))] for k = 1..k_max, sharing work across k."""
    k_max = int(k_max)
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    model = model_blowup_cp2(a_squared)
    q = q_element(model)
    qi = _q_inverse(model)
    pos = {k: valuation(x, model.omega) for k, x in power_walk(model, q, k_max)}
    neg = {k: valuation(x, model.omega) for k, x in power_walk(model, qi, k_max)}
    return [(k, pos[k] + neg[k]) for k in range(1, k_max + 1)]


@dataclass(frozen=True)
class GrowthRow:
    k: int
    v_qk: Fraction
    v_qnegk: Fraction
    bound: Fraction
    psi_rate: Optional[Fraction]


@dataclass(frozen=True)
class GrowthSummary:
    """Companion verdicts for a growth table.

    ``qneg_bounded`` holds when no new maximum of v(Q^{-k}) appears in the
    second half of the sweep; in the growing regime 3a^2 < 1 the staircase
    rises with period 3 and ``slope_last_period`` is its final per-step rate.
    """

    a_squared: Fraction
    k_max: int
    omega_f: Fraction
    regime_bounded: bool
    qneg_max: Fraction
    qneg_argmax: int
    qneg_bounded: bool
    period: int
    slope_last_period: Optional[Fraction]
    slope_reference: Fraction
    psi_rate_min: Optional[Fraction]
    psi_rate_reference: Fraction


@dataclass(frozen=True)
class GrowthTable:
    rows: tuple
    summary: GrowthSummary

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(
            [
                "k",
                "vQk",
                "vQk_dec",
                "vQnegk",
                "vQnegk_dec",
                "bound",
                "bound_dec",
                "omegaF",
                "omegaF_dec",
            ]
        )
        of = self.summary.omega_f
        for row in self.rows:
            writer.writerow(
                [
                    row.k,
                    str(row.v_qk),
                    float(row.v_qk),
                    str(row.v_qnegk),
                    float(row.v_qnegk),
                    str(row.bound),
                    float(row.bound),
                    str(of),
                    float(of),
                ]
            )
        return buf.getvalue()


def growth_table(k_max: int, a_squared: RationalLike) -> GrowthTable:
    """Exact table of v(Q^k), v(Q^{-k}), their sum, and v(Psi(k))/k.

    The psi-rate column is None at the monotone value 3a^2 = 1, where the
    rotation element itself is out of reach; everything else survives.
    """
    k_max = int(k_max)
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    a2 = _frac(a_squared)
    model = model_blowup_cp2(a2)
    q = q_element(model)
    qi = _q_inverse(model)
    pos = {k: valuation(x, model.omega) for k, x in power_walk(model, q, k_max)}
    neg = {k: valuation(x, model.omega) for k, x in power_walk(model, qi, k_max)}

    monotone = 3 * a2 == 1
    delta = None if monotone else delta_constant(a2)
    # v(Psi(k)) = v(Q^k) + k * delta * omega(F - 2E), omega(F - 2E) = 1 - 3a^2.
    shift = None if monotone else delta * (1 - 3 * a2)
    rows = tuple(
        GrowthRow(
            k,
            pos[k],
            neg[k],
            pos[k] + neg[k],
            None if monotone else (pos[k] + k * shift) / k,
        )
        for k in range(1, k_max + 1)
    )

    of = omega_f(a2)
    qneg_max = max(neg.values())
    qneg_argmax = min(k for k, v in neg.items() if v == qneg_max)
    half = k_max // 2
    qneg_bounded = half == 0 or max(neg[k] for k in range(1, half + 1)) == qneg_max
    regime_bounded = 3 * a2 >= 1
    period = 4 if regime_bounded else 3
    slope = (
        (neg[k_max] - neg[k_max - period]) / period if k_max > period else None
    )
    slope_reference = (of / 4 - (1 - of) / 2) / 3
    psi_rates = [r.psi_rate for r in rows]
    psi_rate_min = None if monotone else min(psi_rates)
    psi_rate_reference = (1 - a2) ** 2 / (12 * (1 + a2))
    summary = GrowthSummary(
        a_squared=a2,
        k_max=k_max,
        omega_f=of,
        regime_bounded=regime_bounded,
        qneg_max=qneg_max,
        qneg_argmax=qneg_argmax,
        qneg_bounded=qneg_bounded,
        period=period,
        slope_last_period=slope,
        slope_reference=slope_reference,
        psi_rate_min=psi_rate_min,
        psi_rate_reference=psi_rate_reference,
    )
    return GrowthTable(rows, summary)


@dataclass(frozen=True)
class RTildeCertificate:
    """Result of the two-sided sweep: the minimum bound and where it sits."""

    a_squared: Fraction
    k_max: int
    min_bound: Fraction
    attained_at: int
    omega_f: Fraction

    @property
    def matches_omega_f(self) -> bool:
        return self.min_bound == self.omega_f


def r_tilde_certificate(a_squared: RationalLike, k_max: int) -> RTildeCertificate:
    k_max = int(k_max)
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    a2 = _frac(a_squared)
    rows = two_sided_bounds(k_max, a2)
    min_bound = min(b for _, b in rows)
    attained_at = min(k for k, b in rows if b == min_bound)
    return RTildeCertificate(a2, k_max, min_bound, attained_at, omega_f(a2))


def r_tilde_estimate(a_squared: RationalLike, k_max: int) -> Fraction:
    """Minimum of the two-sided bound over k = 1..k_max, in units of pi.

    Together with the measured length of the double-rotation loop this pins
    the seminorm generator value omega(F) from both sides.
    """
    return r_tilde_certificate(a_squared, k_max).min_bound
