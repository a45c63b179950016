"""Closed-form memory analytics: cavity matching, comb dephasing,
transfer/exchange efficiencies, echo timing and multiplexing gain.

These are the algebraic reference values the numerical modules
(pulses, spinpde) are checked against.  Everything here is a pure
function of its arguments; frequencies are ordinary Hz throughout
(see params.FREQUENCY_CONVENTIONS).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import FinesseTooSmall, NonPositiveKappa, OverdampedExchange
from .params import CombParams, EnsembleParams, RephasingConvention
from .pulses import PulseKind, PulseSpec


class HshCoefficient(Enum):
    """Exponent prefactor for the analytic HSH transfer curve.

    The sweep-rate reading of the adiabatic transfer exponent gives
    a = pi/2 (HALF_PI, the default).  The total-efficiency expression
    uses a = pi^2 (PI_SQUARED) for the same pulse; the two readings
    differ by a factor 2*pi and both are kept because the source
    material is internally inconsistent about which one the quoted
    98% transfer refers to.  PI_SQUARED reproduces that worked value.
    """

    HALF_PI = "half-pi"
    PI_SQUARED = "pi-squared"

    @property
    def value_float(self) -> float:
        return 0.5 * math.pi if self is HshCoefficient.HALF_PI else math.pi ** 2


class ExchangeLegs(Enum):
    ONE_WAY = "one-way"
    ROUND_TRIP = "round-trip"


@dataclass(frozen=True)
class EfficiencyBreakdown:
    """Total memory efficiency with its multiplicative factors."""

    transfer_in: float
    transfer_out: float
    exchange_roundtrip: float
    dephasing: float
    total: float

    @classmethod
    def from_factors(cls, transfer_in: float, transfer_out: float,
                     exchange_roundtrip: float, dephasing: float) -> "EfficiencyBreakdown":
        return cls(transfer_in=transfer_in, transfer_out=transfer_out,
                   exchange_roundtrip=exchange_roundtrip, dephasing=dephasing,
                   total=transfer_in * transfer_out * exchange_roundtrip * dephasing)


def cavity_reflection(kappa: float, absorption: float) -> float:
    """Amplitude reflection (kappa - Z)/(kappa + Z) of the cavity input.

    Zero exactly when the ensemble absorption matches the cavity decay:
    the impedance-matched condition under which the input field is fully
    absorbed.
    """
    if kappa <= 0:
        raise NonPositiveKappa(f"cavity decay rate must be positive, got {kappa}")
    if absorption < 0:
        raise ValueError("absorption rate must be non-negative")
    return (kappa - absorption) / (kappa + absorption)


def absorption_rate(atom_number: float, coupling_scale: float,
                    bandwidth: float) -> float:
    """Ensemble absorption rate Z = N * (coupling scale)^2 / bandwidth."""
    if atom_number <= 0 or coupling_scale <= 0 or bandwidth <= 0:
        raise ValueError("absorption rate inputs must be positive")
    return atom_number * coupling_scale ** 2 / bandwidth


def cooperativity(atom_number: float, coupling: float, kappa: float,
                  bandwidth: float) -> float:
    """Collective cooperativity C = N G^2 / (kappa * bandwidth).

    C = 1 coincides with cavity_reflection = 0 when the same coupling
    scale feeds absorption_rate.
    """
    if atom_number <= 0 or coupling <= 0 or kappa <= 0 or bandwidth <= 0:
        raise ValueError("cooperativity inputs must be positive")
    return atom_number * coupling ** 2 / (kappa * bandwidth)


def dephasing_factor(finesse: float) -> float:
    """Intrinsic comb re-emission factor sinc^2(pi/finesse).

    sinc is unnormalized, sin(x)/x; this is the only reading that gives
    0.95 at finesse 8.
    """
    if finesse < 1.0:
        raise FinesseTooSmall(f"finesse must be at least 1, got {finesse}")
    x = math.pi / finesse
    return (math.sin(x) / x) ** 2


def multimode_capacity(bandwidth: float, separation: float) -> int:
    """Temporal mode capacity floor(2*bandwidth / (5*separation))."""
    if separation <= 0 or bandwidth < separation:
        raise ValueError("need bandwidth >= separation > 0")
    return int(math.floor(2.0 * bandwidth / (5.0 * separation)))


_SHAPE_COEFFICIENTS = {
    PulseKind.CHIRPED_SECH: math.pi,
}


def transfer_efficiency_analytic(kind: PulseKind, duration: float,
                                 peak_rabi: float, bandwidth: float,
                                 hsh_coefficient: HshCoefficient = HshCoefficient.HALF_PI
                                 ) -> float:
    """Adiabatic one-way transfer efficiency 1 - exp(-a T Omega^2 / Gamma).

    The shape coefficient a is pi for the chirped sech and pi/2 for the
    HSH pulse by default (sweep-rate reading); see HshCoefficient for
    the alternative.  Square pulses are not adiabatic and have no curve
    of this form: NaN is returned for them.
    """
    if duration <= 0 or peak_rabi < 0 or bandwidth <= 0:
        raise ValueError("need duration, bandwidth > 0 and peak_rabi >= 0")
    if kind is PulseKind.SQUARE_PI:
        return math.nan
    if kind is PulseKind.HSH:
        a = hsh_coefficient.value_float
    else:
        a = _SHAPE_COEFFICIENTS[kind]
    return 1.0 - math.exp(-a * duration * peak_rabi ** 2 / bandwidth)


def exchange_duration(J: float, gamma_s: float) -> float:
    """Optimal spin-exchange half-swap duration (pi J - gamma_s)/(2 J^2)."""
    if J <= 0:
        raise ValueError("exchange rate must be positive")
    if gamma_s < 0:
        raise ValueError("spin decoherence must be non-negative")
    if gamma_s >= math.pi * J:
        raise OverdampedExchange(f"gamma_s = {gamma_s} >= pi*J = {math.pi * J}")
    return (math.pi * J - gamma_s) / (2.0 * J ** 2)


def exchange_efficiency_analytic(gamma_s: float, J: float,
                                 legs: ExchangeLegs = ExchangeLegs.ONE_WAY) -> float:
    """Spin-exchange transfer efficiency exp(-pi gamma_s / 2J) per leg."""
    if J <= 0 or gamma_s < 0:
        raise ValueError("need J > 0 and gamma_s >= 0")
    one_way = math.exp(-math.pi * gamma_s / (2.0 * J))
    return one_way if legs is ExchangeLegs.ONE_WAY else one_way ** 2


def memory_efficiency_total(pulse: PulseSpec, comb: CombParams,
                            ens: EnsembleParams) -> EfficiencyBreakdown:
    """Analytic total memory efficiency

        eta_m = [1 - exp(-pi^2 T Omega^2 / Gamma)]^2
                * exp(-pi gamma_s / J) * sinc^2(pi / F)

    broken out into its write/read transfer legs, the round-trip
    exchange factor and the comb dephasing factor.  The transfer legs
    use the pi^2 exponent convention of this expression regardless of
    the default in transfer_efficiency_analytic.
    """
    exponent = math.pi ** 2 * pulse.duration * pulse.peak_rabi ** 2 / comb.bandwidth
    transfer = 1.0 - math.exp(-exponent)
    exchange = exchange_efficiency_analytic(ens.gamma_s, ens.J,
                                            ExchangeLegs.ROUND_TRIP)
    dephasing = dephasing_factor(comb.finesse)
    return EfficiencyBreakdown.from_factors(transfer, transfer, exchange, dephasing)


def comb_rephasing_time(separation: float,
                        convention: RephasingConvention = RephasingConvention.INVERSE_SEPARATION
                        ) -> float:
    """Echo rephasing time of a comb with the given tooth separation."""
    if separation <= 0:
        raise ValueError("separation must be positive")
    if convention is RephasingConvention.INVERSE_SEPARATION:
        return 1.0 / separation
    return 2.0 * math.pi / separation


def echo_delay(transfer_duration: float, exchange_time: float, separation: float,
               convention: RephasingConvention = RephasingConvention.INVERSE_SEPARATION
               ) -> float:
    """Total input-to-echo delay: both transfers, both exchanges, rephasing."""
    if transfer_duration < 0 or exchange_time < 0:
        raise ValueError("durations must be non-negative")
    return (2.0 * transfer_duration + 2.0 * exchange_time
            + comb_rephasing_time(separation, convention))


def time_bandwidth_product(storage_time: float, bandwidth: float) -> float:
    """Figure of merit: storage time times acceptance bandwidth."""
    if storage_time <= 0 or bandwidth <= 0:
        raise ValueError("storage time and bandwidth must be positive")
    return storage_time * bandwidth


def multiplexed_success(probability: float, modes: int) -> float:
    """Success probability over N multiplexed attempts, 1 - (1 - P)^N.

    Exact form; the small-P linearization N*P appears only in docs.
    """
    if not 0.0 <= probability <= 1.0:
        raise ValueError("probability must lie in [0, 1]")
    if modes < 1:
        raise ValueError("need at least one mode")
    return 1.0 - (1.0 - probability) ** modes
