"""Physical parameter bundles, validation, scenario files and the
frequency-convention policy.

Every rate in this package is stored in ordinary Hz (cycles per second).
Where a source quantity is quoted in angular units the conversion happens
once, at the point the canonical scenario is constructed, and the policy
table below records the convention each formula family uses.  This keeps
factor-of-2pi choices in one auditable place instead of scattered through
the math.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, asdict
from enum import Enum

from .errors import ConfigNotFound, ValidationFailed
from .pulses import PulseKind, PulseSpec
from .repeater import RepeaterConfig

SCHEMA_VERSION = "1"

ORDINARY_HZ = "ordinary-Hz"
ANGULAR_RAD_PER_S = "angular-rad-per-s"

# Which unit convention each formula family consumes.  "as-given" families
# take their inputs in ordinary Hz and never multiply by 2pi internally.
FREQUENCY_CONVENTIONS: dict[str, str] = {
    "comb.geometry": ORDINARY_HZ,            # peak width, separation, bandwidth
    "ensemble.rates": ORDINARY_HZ,           # gamma_p/s/k, J, G (gamma_p quoted angular at source)
    "pulse.rabi": ORDINARY_HZ,               # envelope amplitudes and chirps, as-given
    "pde.detunings": ORDINARY_HZ,            # delta_s, delta_k enter the PDE as-given
    "rephasing.delay": ANGULAR_RAD_PER_S,    # default echo delay = 1/(separation in Hz)
    "repeater.times": ORDINARY_HZ,           # rates and 1/T quantities
}


def to_angular(frequency_hz: float) -> float:
    return 2.0 * math.pi * frequency_hz


def to_ordinary(angular_rad_per_s: float) -> float:
    return angular_rad_per_s / (2.0 * math.pi)


class RephasingConvention(Enum):
    """Reading of the comb rephasing delay.

    The echo condition is periodic in the tooth separation; with the
    separation quoted in ordinary Hz the delay is 1/separation
    (INVERSE_SEPARATION).  The literal angular reading 2*pi/separation is
    kept selectable because either appears in the literature.
    """

    INVERSE_SEPARATION = "inverse-separation"
    TWO_PI_OVER_SEPARATION = "two-pi-over-separation"


class Boundary(Enum):
    DESTRUCTIVE = "destructive"          # wall relaxes the spin: Dirichlet
    NON_DESTRUCTIVE = "non-destructive"  # coated / inert wall: zero flux


@dataclass
class CombParams:
    """Frequency-comb geometry: tooth width, spacing, overall bandwidth."""

    peak_width: float       # FWHM of one comb tooth (Hz)
    peak_separation: float  # tooth spacing (Hz)
    bandwidth: float        # full comb span (Hz)
    finesse: float          # peak_separation / peak_width

    @property
    def tooth_count_bound(self) -> float:
        return self.bandwidth / self.peak_separation


@dataclass
class EnsembleParams:
    """Vapor-cell densities, polarizations, rates and couplings.

    Densities are atoms per cm^3, diffusion coefficients cm^2/s, every
    rate and detuning in ordinary Hz.  delta_k is the storage-stage
    noble-spin detuning; both exchange stages run it at zero.
    """

    n_a: float              # alkali density
    n_b: float              # noble-gas density
    p_a: float              # alkali polarization
    p_b: float              # noble-gas polarization
    gamma_p: float          # optical dipole decoherence
    gamma_s: float          # alkali spin decoherence
    gamma_k: float          # noble-gas spin decoherence
    D_a: float              # alkali diffusion coefficient
    D_b: float              # noble-gas diffusion coefficient
    J: float                # coherent spin-exchange rate
    G: float                # collective atom-field coupling
    delta_bar: float = 0.0  # optical detuning offset
    delta_s: float = 0.0    # alkali spin detuning
    delta_k: float = 0.0    # noble spin detuning (storage stage)
    N_a: float = 0.0        # absolute alkali atom number
    N_b: float = 0.0        # absolute noble atom number


@dataclass
class CavityParams:
    """Cavity decay and the collective coupling scale.

    The single-atom coupling and the dipole matrix element only ever
    enter through their product, so they are stored as one scale; the
    ensemble absorption rate is derived from it (see
    analytics.absorption_rate).
    """

    decay_rate: float      # cavity field decay kappa (Hz)
    coupling_scale: float  # g0 * dipole product (Hz)


@dataclass
class CellGeometry:
    radius: float                    # cm
    boundary_alkali: Boundary = Boundary.DESTRUCTIVE
    boundary_noble: Boundary = Boundary.NON_DESTRUCTIVE

    @property
    def volume(self) -> float:
        """Cell volume in cm^3."""
        return 4.0 / 3.0 * math.pi * self.radius ** 3


@dataclass
class Scenario:
    """Complete parameter bundle for one simulated configuration."""

    comb: CombParams
    ensemble: EnsembleParams
    cavity: CavityParams
    cell: CellGeometry
    pulse: PulseSpec
    repeater: RepeaterConfig
    rephasing_convention: RephasingConvention = RephasingConvention.INVERSE_SEPARATION
    schema_version: str = SCHEMA_VERSION


@dataclass
class Violation:
    """One violated parameter invariant."""

    kind: str      # e.g. NegativeRate, PolarizationOutOfRange
    path: str      # dotted field path, e.g. ensemble.p_a
    message: str
    severity: str = "error"  # "error" | "warning"

    def __str__(self) -> str:
        return f"{self.kind} at {self.path}: {self.message} [{self.severity}]"


def _check_comb(comb: CombParams, out: list[Violation]) -> None:
    if comb.peak_width <= 0:
        out.append(Violation("NegativeRate", "comb.peak_width",
                             "tooth width must be positive"))
        return
    if comb.peak_separation < comb.peak_width:
        out.append(Violation("CombOrdering", "comb.peak_separation",
                             "tooth spacing below tooth width"))
    if comb.bandwidth < comb.peak_separation:
        out.append(Violation("CombOrdering", "comb.bandwidth",
                             "bandwidth below tooth spacing"))
    if comb.peak_separation > 0 and comb.bandwidth / comb.peak_separation < 2.0:
        out.append(Violation("CombOrdering", "comb.bandwidth",
                             "comb needs at least two teeth"))
    expected = comb.peak_separation / comb.peak_width
    if abs(comb.finesse - expected) > 1e-12 * max(1.0, abs(expected)):
        out.append(Violation("FinesseMismatch", "comb.finesse",
                             f"declared finesse {comb.finesse} != "
                             f"separation/width = {expected}"))


def _check_ensemble(ens: EnsembleParams, out: list[Violation]) -> None:
    non_negative = ["n_a", "n_b", "gamma_p", "gamma_s", "gamma_k",
                    "D_a", "D_b", "J", "G", "N_a", "N_b"]
    for name in non_negative:
        if getattr(ens, name) < 0:
            out.append(Violation("NegativeRate", f"ensemble.{name}",
                                 "must be non-negative"))
    for name in ("p_a", "p_b"):
        val = getattr(ens, name)
        if not 0.0 <= val <= 1.0:
            out.append(Violation("PolarizationOutOfRange", f"ensemble.{name}",
                                 f"polarization {val} outside [0, 1]"))
    if not ens.gamma_p > ens.gamma_s > ens.gamma_k:
        out.append(Violation("HierarchyViolation", "ensemble.gamma_p",
                             "expected gamma_p > gamma_s > gamma_k",
                             severity="warning"))


def _check_cavity(cav: CavityParams, out: list[Violation]) -> None:
    if cav.decay_rate <= 0:
        out.append(Violation("NonPositiveKappa", "cavity.decay_rate",
                             "cavity decay rate must be positive"))
    if cav.coupling_scale < 0:
        out.append(Violation("NegativeRate", "cavity.coupling_scale",
                             "coupling scale must be non-negative"))


def _check_cell(cell: CellGeometry, out: list[Violation]) -> None:
    if cell.radius <= 0:
        out.append(Violation("GeometryInvalid", "cell.radius",
                             "cell radius must be positive"))


def validate(scenario: Scenario) -> list[Violation]:
    """All violated invariants in the bundle; empty when fully valid.

    Severity "warning" entries (the rate-hierarchy check) do not make
    the bundle unusable; ensure_valid ignores them.
    """
    out: list[Violation] = []
    _check_comb(scenario.comb, out)
    _check_ensemble(scenario.ensemble, out)
    _check_cavity(scenario.cavity, out)
    _check_cell(scenario.cell, out)
    # PulseSpec and RepeaterConfig validate at construction time.
    return out


def ensure_valid(scenario: Scenario) -> Scenario:
    """Return the bundle unchanged, or raise ValidationFailed listing
    every error-severity violation."""
    errors = [v for v in validate(scenario) if v.severity == "error"]
    if errors:
        raise ValidationFailed(errors)
    return scenario


def canonical_scenario() -> Scenario:
    """The frozen reference configuration used throughout the test suite.

    Potassium in a helium-3 buffer at pressure-broadened linewidth
    27 GHz, an eight-tooth-finesse comb at 96 MHz spacing, an uncoated
    1 cm radius cell (destructive alkali wall, inert noble wall), and a
    temporally multiplexed repeater with 112 modes.  Notes:

    - The optical decoherence gamma_p is quoted angular at the source
      (5.96 * 2pi MHz) and stored here as 5.96e6 ordinary Hz; its full
      width 2*gamma_p = 11.92 MHz sits just under the 12 MHz comb tooth
      width, which is what makes finesse 8 achievable.
    - The cavity coupling scale is chosen so the ensemble exactly
      impedance-matches the cavity (unit cooperativity).
    - The repeater pair probability 0.0107 is a one-time calibration
      against the published repeater-vs-direct crossover distance
      (507 km at 1 km reading precision); see the repeater module
      docstring for why it cannot be derived.
    """
    radius = 1.0  # cm
    volume = 4.0 / 3.0 * math.pi * radius ** 3
    bandwidth = 27e9
    n_a = 3e14
    n_b = 2e20
    kappa = 1e7
    # unit cooperativity: N_a G^2 / (kappa Gamma) = 1
    coupling = float(f"{math.sqrt(kappa * bandwidth / (n_a * volume)):.8e}")

    comb = CombParams(peak_width=12e6, peak_separation=96e6,
                      bandwidth=bandwidth, finesse=8.0)
    ensemble = EnsembleParams(
        n_a=n_a, n_b=n_b, p_a=0.95, p_b=0.75,
        gamma_p=5.96e6, gamma_s=17.5, gamma_k=1.0 / 360000.0,
        D_a=0.35, D_b=0.70, J=1000.0, G=coupling,
        delta_bar=0.0, delta_s=0.0, delta_k=50e3,
        N_a=n_a * volume, N_b=n_b * volume)
    cavity = CavityParams(decay_rate=kappa, coupling_scale=coupling)
    cell = CellGeometry(radius=radius,
                        boundary_alkali=Boundary.DESTRUCTIVE,
                        boundary_noble=Boundary.NON_DESTRUCTIVE)
    # chirped HSH write pulse at the reference operating point
    # duration 4/Gamma with peak Rabi Gamma/pi, i.e. T Omega^2 / Gamma = 4/pi^2
    pulse = PulseSpec(kind=PulseKind.HSH,
                      peak_rabi=bandwidth / math.pi,
                      duration=4.0 / bandwidth,
                      chirp_bandwidth=bandwidth,
                      sech_steepness=None,
                      edge_fraction=0.25)
    rep = RepeaterConfig(
        total_distance=2000.0, link_count=8,
        pair_probability=0.0107, mode_count=112, memory_count=100,
        eta_memory=0.79, eta_detector=0.75, eta_conversion=0.8,
        attenuation_length=22.0, fiber_speed=2e8, source_rate=1e10,
        memory_interface_delay=math.pi / (2.0 * 1000.0))
    return Scenario(comb=comb, ensemble=ensemble, cavity=cavity, cell=cell,
                    pulse=pulse, repeater=rep)


# --- serialization ---

def scenario_to_dict(scenario: Scenario) -> dict:
    doc = {
        "schema_version": scenario.schema_version,
        "comb": asdict(scenario.comb),
        "ensemble": asdict(scenario.ensemble),
        "cavity": asdict(scenario.cavity),
        "cell": {
            "radius": scenario.cell.radius,
            "boundary_alkali": scenario.cell.boundary_alkali.value,
            "boundary_noble": scenario.cell.boundary_noble.value,
        },
        "pulse": {
            "kind": scenario.pulse.kind.value,
            "peak_rabi": scenario.pulse.peak_rabi,
            "duration": scenario.pulse.duration,
            "chirp_bandwidth": scenario.pulse.chirp_bandwidth,
            "sech_steepness": scenario.pulse.sech_steepness,
            "edge_fraction": scenario.pulse.edge_fraction,
        },
        "repeater": asdict(scenario.repeater),
        "rephasing_convention": scenario.rephasing_convention.value,
    }
    return doc


def scenario_from_dict(doc: dict) -> Scenario:
    if "schema_version" not in doc:
        raise ValidationFailed([Violation("SchemaVersionMissing", "schema_version",
                                          "scenario files must declare schema_version")])
    try:
        cell_doc = doc["cell"]
        pulse_doc = doc["pulse"]
        scenario = Scenario(
            comb=CombParams(**doc["comb"]),
            ensemble=EnsembleParams(**doc["ensemble"]),
            cavity=CavityParams(**doc["cavity"]),
            cell=CellGeometry(
                radius=cell_doc["radius"],
                boundary_alkali=Boundary(cell_doc["boundary_alkali"]),
                boundary_noble=Boundary(cell_doc["boundary_noble"])),
            pulse=PulseSpec(
                kind=PulseKind.from_label(pulse_doc["kind"]),
                peak_rabi=pulse_doc["peak_rabi"],
                duration=pulse_doc["duration"],
                chirp_bandwidth=pulse_doc.get("chirp_bandwidth", 0.0),
                sech_steepness=pulse_doc.get("sech_steepness"),
                edge_fraction=pulse_doc.get("edge_fraction", 0.25)),
            repeater=RepeaterConfig(**doc["repeater"]),
            rephasing_convention=RephasingConvention(
                doc.get("rephasing_convention",
                        RephasingConvention.INVERSE_SEPARATION.value)),
            schema_version=str(doc["schema_version"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationFailed([Violation("MalformedScenario", "<document>",
                                          str(exc))]) from exc
    return scenario


def save_scenario(scenario: Scenario, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(scenario), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_scenario(path: str) -> Scenario:
    if not os.path.exists(path):
        raise ConfigNotFound(f"scenario file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationFailed([Violation("MalformedScenario", path,
                                              str(exc))]) from exc
    return scenario_from_dict(doc)
