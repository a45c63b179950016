"""Command-line entry point.

Subcommands map one-to-one onto the library layers:

    afc       closed-form memory analytics for one scenario (JSON record)
    pulse     numeric vs analytic transfer-efficiency sweep (CSV)
    pde       protocol population series or spin-exchange sweeps (CSV)
    repeater  rate-vs-distance curves plus crossover / optimal-links /
              max-distance probes
    sweep     generic Cartesian parameter sweep of a named quantity

Every run is deterministic: no wall clock, no randomness, and the
SPINVAULT_THREADS worker count never changes output bytes (parallel maps
preserve job order).  With --out the resolved run manifest is written
next to the artifact so a run can be reproduced from its outputs alone.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field

from . import analytics
from .analytics import ExchangeLegs
from .errors import ConfigError, EmptyGrid, SpinVaultError, UnknownField
from .params import Scenario, canonical_scenario, ensure_valid, load_scenario, \
    scenario_from_dict, scenario_to_dict
from .pulses import PulseKind, PulseSpec, transfer_efficiency_numeric
from .repeater import crossover_distance, direct_curve, max_distance, \
    optimal_links, repeater_curve, repeater_rate, total_time
from .spinpde import ProtocolTimeline, RadialGrid, Stage, SweepMode, \
    TransferModel, evolve, run_protocol, spin_exchange_efficiency_numeric, \
    uniform_state

TOOL_VERSION = "1.0.0"
SCHEMA_VERSION = "1"


@dataclass
class RunManifest:
    """Everything needed to reproduce one CLI run byte-for-byte."""

    scenario: str                       # path, or "<canonical>" for the builtin
    subcommand: str
    overrides: list[str] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)
    deterministic: bool = True
    tool_version: str = TOOL_VERSION
    schema_version: str = SCHEMA_VERSION


# --- parsing helpers ---

def parse_range(text: str) -> list[float]:
    """start:stop:count, inclusive linear grid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected start:stop:count, got {text!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if count < 1:
        raise argparse.ArgumentTypeError("count must be at least 1")
    if count == 1:
        return [start]
    step = (stop - start) / (count - 1)
    return [start + i * step for i in range(count)]


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _parse_scalar(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text  # bare strings (enum labels) pass through


def apply_overrides(scenario: Scenario, assignments: list[str]) -> Scenario:
    """Apply dotted key=value overrides through the serialized form, so the
    result passes the same construction-time checks as a loaded file.

    Overriding comb.finesse alone re-derives the tooth width at fixed
    spacing (finesse is spacing over width, so that is what changing it
    means physically); setting the width explicitly wins.
    """
    doc = scenario_to_dict(scenario)
    keys = set()
    for item in assignments:
        key, sep, raw = item.partition("=")
        if not sep:
            raise UnknownField(f"override {item!r} is not of the form key=value")
        keys.add(key)
        node = doc
        parts = key.split(".")
        for part in parts[:-1]:
            if not isinstance(node, dict) or part not in node:
                raise UnknownField(f"no scenario field {key!r}")
            node = node[part]
        if not isinstance(node, dict) or parts[-1] not in node:
            raise UnknownField(f"no scenario field {key!r}")
        node[parts[-1]] = _parse_scalar(raw)
    if "comb.finesse" in keys and "comb.peak_width" not in keys:
        doc["comb"]["peak_width"] = (doc["comb"]["peak_separation"]
                                     / doc["comb"]["finesse"])
    return scenario_from_dict(doc)


# --- deterministic emission ---

def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.8e}"  # 9 significant digits, fixed width
    return str(value)


def emit_table(columns: list[str], rows: list[tuple], fmt: str) -> str:
    if fmt == "json":
        records = [dict(zip(columns, row)) for row in rows]
        return json.dumps(records, indent=2, sort_keys=True) + "\n"
    lines = [",".join(columns)]
    lines.extend(",".join(_fmt(cell) for cell in row) for row in rows)
    return "\n".join(lines) + "\n"


def emit_record(record: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(record, indent=2, sort_keys=True) + "\n"
    columns = sorted(record)
    return emit_table(columns, [tuple(record[c] for c in columns)], "csv")


# --- subcommand handlers; each returns the artifact text ---

def cmd_afc(scenario: Scenario, args) -> str:
    comb, ens, cav = scenario.comb, scenario.ensemble, scenario.cavity
    breakdown = analytics.memory_efficiency_total(scenario.pulse, comb, ens)
    t_exchange = analytics.exchange_duration(ens.J, ens.gamma_s)
    absorption = analytics.absorption_rate(ens.N_a, cav.coupling_scale,
                                           comb.bandwidth)
    record = {
        "schema_version": scenario.schema_version,
        "eta_m": breakdown.total,
        "transfer_leg": breakdown.transfer_in,
        "exchange_roundtrip": breakdown.exchange_roundtrip,
        "dephasing": breakdown.dephasing,
        "multimode_capacity": analytics.multimode_capacity(comb.bandwidth,
                                                           comb.peak_separation),
        "cooperativity": analytics.cooperativity(ens.N_a, cav.coupling_scale,
                                                 cav.decay_rate, comb.bandwidth),
        "cavity_reflection": analytics.cavity_reflection(cav.decay_rate,
                                                         absorption),
        "exchange_duration_s": t_exchange,
        "echo_delay_s": analytics.echo_delay(scenario.pulse.duration, t_exchange,
                                             comb.peak_separation,
                                             scenario.rephasing_convention),
        "time_bandwidth_product": analytics.time_bandwidth_product(
            1.0 / ens.gamma_k, comb.bandwidth),
    }
    return emit_record(record, args.format or "json")


def cmd_pulse(scenario: Scenario, args) -> str:
    bandwidth = scenario.comb.bandwidth
    peak = bandwidth / 5.0  # fixed drive; duration carries the sweep
    shapes = [PulseKind.from_label(tok) for tok in args.shapes.split(",") if tok]
    rows = []
    for kind in shapes:
        chirp = 0.0 if kind is PulseKind.SQUARE_PI else bandwidth
        for x in args.exponent_range:
            duration = x * bandwidth / peak ** 2
            spec = PulseSpec(kind=kind, peak_rabi=peak, duration=duration,
                             chirp_bandwidth=chirp)
            numeric = transfer_efficiency_numeric(spec, bandwidth,
                                                  n_detunings=args.detunings,
                                                  roundtrip=args.roundtrip)
            analytic = analytics.transfer_efficiency_analytic(kind, duration,
                                                              peak, bandwidth)
            if args.roundtrip:
                analytic = analytic * analytic
            rows.append((kind.value, x, numeric, analytic))
    return emit_table(["shape", "omega2T_over_gamma", "efficiency_numeric",
                       "efficiency_analytic"], rows, args.format or "csv")


def cmd_pde(scenario: Scenario, args) -> str:
    ens, cell = scenario.ensemble, scenario.cell
    grid = RadialGrid(radius=cell.radius, n_points=args.grid_points)
    if args.exchange_sweep or args.diffusion_sweep:
        if args.exchange_sweep:
            sweep, mode = args.exchange_sweep, SweepMode.EXCHANGE_RATIO
        else:
            sweep, mode = args.diffusion_sweep, SweepMode.DIFFUSION
        points = spin_exchange_efficiency_numeric(ens, grid, cell, sweep,
                                                  mode=mode)
        rows = [(p.sweep_value, p.eta_numeric, p.eta_analytic) for p in points]
        return emit_table(["sweep_value", "eta_numeric", "eta_analytic"],
                          rows, args.format or "csv")

    timeline = ProtocolTimeline.build(ens, scenario.comb, scenario.pulse,
                                      storage_duration=args.storage_time,
                                      rephasing=scenario.rephasing_convention)
    result = run_protocol(timeline, ens, scenario.comb, scenario.pulse, cell,
                          grid=grid, transfer=TransferModel(args.transfer),
                          samples_per_stage=args.samples)
    if (args.format or "csv") == "json":
        record = {
            "eta_total": result.breakdown.total,
            "transfer_in": result.breakdown.transfer_in,
            "transfer_out": result.breakdown.transfer_out,
            "spin_path": result.breakdown.exchange_roundtrip,
            "dephasing": result.breakdown.dephasing,
            "projection": result.projection,
            "storage_extrapolation": result.storage_extrapolation,
            "stage_marks": {name: t for name, t in result.stage_marks},
        }
        return emit_record(record, "json")
    rows = [(float(t), float(a), float(b))
            for t, a, b in zip(result.series.times, result.series.alkali,
                               result.series.noble)]
    return emit_table(["t_s", "alkali_population", "noble_population"],
                      rows, "csv")


def cmd_repeater(scenario: Scenario, args) -> str:
    cfg = scenario.repeater
    if args.verb == "crossover":
        record = {
            "crossover_km": crossover_distance(cfg, cfg.source_rate,
                                               candidates=tuple(args.links)),
            "source_rate_hz": cfg.source_rate,
            "candidates": list(args.links),
        }
        return emit_record(record, "json")
    if args.verb == "optimal-links":
        distance = args.distance if args.distance is not None else cfg.total_distance
        record = {
            "distance_km": distance,
            "optimal_links": optimal_links(distance, cfg,
                                           candidates=tuple(args.links)),
        }
        return emit_record(record, "json")
    if args.verb == "max-distance":
        storage = args.storage_time if args.storage_time is not None \
            else 1.0 / scenario.ensemble.gamma_k
        record = {
            "storage_time_s": storage,
            "max_distance_km": max_distance(cfg, storage,
                                            candidates=tuple(args.links)),
        }
        return emit_record(record, "json")

    distances = args.distance_range
    curves = [repeater_curve(cfg, distances, links)
              for links in sorted(args.links)]
    if args.include_direct:
        curves.append(direct_curve(distances, cfg.source_rate,
                                   cfg.attenuation_length))
    rows = [(float(d), float(r), curve.protocol)
            for curve in curves
            for d, r in zip(curve.distances, curve.rates)]
    return emit_table(["distance_km", "rate_hz", "protocol"], rows,
                      args.format or "csv")


def _exchange_numeric_quantity(scenario: Scenario, grid_points: int) -> float:
    grid = RadialGrid(radius=scenario.cell.radius, n_points=grid_points)
    ens = scenario.ensemble
    duration = analytics.exchange_duration(ens.J, ens.gamma_s)
    state = uniform_state(grid)
    initial = state.alkali_population()
    final, _ = evolve(state, ens, Stage("exchange-in", duration), scenario.cell)
    return final.noble_population() / initial


QUANTITIES = {
    "dephasing_factor":
        lambda sc, gp: analytics.dephasing_factor(sc.comb.finesse),
    "multimode_capacity":
        lambda sc, gp: analytics.multimode_capacity(sc.comb.bandwidth,
                                                    sc.comb.peak_separation),
    "eta_m":
        lambda sc, gp: analytics.memory_efficiency_total(sc.pulse, sc.comb,
                                                         sc.ensemble).total,
    "transfer_efficiency_analytic":
        lambda sc, gp: analytics.transfer_efficiency_analytic(
            sc.pulse.kind, sc.pulse.duration, sc.pulse.peak_rabi,
            sc.comb.bandwidth),
    "exchange_duration":
        lambda sc, gp: analytics.exchange_duration(sc.ensemble.J,
                                                   sc.ensemble.gamma_s),
    "exchange_efficiency_analytic":
        lambda sc, gp: analytics.exchange_efficiency_analytic(
            sc.ensemble.gamma_s, sc.ensemble.J),
    "exchange_efficiency_roundtrip":
        lambda sc, gp: analytics.exchange_efficiency_analytic(
            sc.ensemble.gamma_s, sc.ensemble.J, ExchangeLegs.ROUND_TRIP),
    "exchange_efficiency_numeric": _exchange_numeric_quantity,
    "cavity_reflection":
        lambda sc, gp: analytics.cavity_reflection(
            sc.cavity.decay_rate,
            analytics.absorption_rate(sc.ensemble.N_a, sc.cavity.coupling_scale,
                                      sc.comb.bandwidth)),
    "cooperativity":
        lambda sc, gp: analytics.cooperativity(
            sc.ensemble.N_a, sc.cavity.coupling_scale, sc.cavity.decay_rate,
            sc.comb.bandwidth),
    "multiplexed_success":
        lambda sc, gp: analytics.multiplexed_success(
            sc.repeater.pair_probability, sc.repeater.mode_count),
    "echo_delay":
        lambda sc, gp: analytics.echo_delay(
            sc.pulse.duration,
            analytics.exchange_duration(sc.ensemble.J, sc.ensemble.gamma_s),
            sc.comb.peak_separation, sc.rephasing_convention),
    "time_bandwidth_product":
        lambda sc, gp: analytics.time_bandwidth_product(
            1.0 / sc.ensemble.gamma_k, sc.comb.bandwidth),
    "repeater_rate": lambda sc, gp: repeater_rate(sc.repeater),
    "total_time": lambda sc, gp: total_time(sc.repeater),
}


def cmd_sweep(scenario: Scenario, args) -> str:
    if not args.grid:
        raise EmptyGrid("sweep needs at least one --grid path=v1,v2,...")
    grids: list[tuple[str, list]] = []
    for item in args.grid:
        path, sep, raw = item.partition("=")
        if not sep:
            raise UnknownField(f"grid {item!r} is not of the form path=v1,v2")
        values = [_parse_scalar(tok) for tok in raw.split(",") if tok]
        if not values:
            raise EmptyGrid(f"grid for {path!r} has no values")
        grids.append((path, values))
    if args.quantity not in QUANTITIES:
        raise UnknownField(f"unknown quantity {args.quantity!r}; expected one "
                           f"of {sorted(QUANTITIES)}")
    fn = QUANTITIES[args.quantity]

    # lexicographic over grid indices, first grid slowest
    def walk(level: int, assignment: list[tuple[str, object]], rows: list):
        if level == len(grids):
            sets = [f"{p}={json.dumps(v)}" for p, v in assignment]
            point = ensure_valid(apply_overrides(scenario, sets))
            rows.append(tuple(v for _, v in assignment)
                        + (fn(point, args.grid_points),))
            return
        path, values = grids[level]
        for value in values:
            walk(level + 1, assignment + [(path, value)], rows)

    rows: list[tuple] = []
    walk(0, [], rows)
    columns = [path for path, _ in grids] + [args.quantity]
    return emit_table(columns, rows, args.format or "csv")


# --- orchestration ---

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="scenario JSON file "
                        "(default: builtin canonical scenario)")
    common.add_argument("--out", help="artifact path (default: stdout); a "
                        "resolved manifest copy is written alongside")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a scenario field (repeatable), e.g. "
                        "--set comb.finesse=4")
    common.add_argument("--format", choices=("csv", "json"),
                        help="artifact format (subcommand default otherwise)")

    parser = argparse.ArgumentParser(
        prog="spinvault",
        description="Noble-gas optical quantum memory and repeater toolkit")
    parser.add_argument("--version", action="version", version=TOOL_VERSION)
    sub = parser.add_subparsers(dest="command", required=True)

    p_afc = sub.add_parser("afc", parents=[common],
                           help="closed-form memory analytics record")
    p_afc.set_defaults(handler=cmd_afc)

    p_pulse = sub.add_parser("pulse", parents=[common],
                             help="transfer-efficiency sweep over pulse shapes")
    p_pulse.add_argument("--exponent-range", type=parse_range, default="1:6:6",
                         help="Omega^2 T / Gamma grid as start:stop:count")
    p_pulse.add_argument("--detunings", type=int, default=32)
    p_pulse.add_argument("--roundtrip", action="store_true",
                         help="square per-detuning transfer (write plus read)")
    p_pulse.add_argument("--shapes", default="square,sech,hsh")
    p_pulse.set_defaults(handler=cmd_pulse)

    p_pde = sub.add_parser("pde", parents=[common],
                           help="protocol population series or exchange sweeps")
    p_pde.add_argument("--exchange-sweep", type=parse_range, metavar="RANGE",
                       help="sweep J/gamma_s over start:stop:count")
    p_pde.add_argument("--diffusion-sweep", type=parse_range, metavar="RANGE",
                       help="sweep the alkali diffusion coefficient")
    p_pde.add_argument("--grid-points", type=int, default=200)
    p_pde.add_argument("--samples", type=int, default=160,
                       help="population samples per protocol stage")
    p_pde.add_argument("--storage-time", type=float,
                       help="dark storage duration in s (default 10/J)")
    p_pde.add_argument("--transfer", choices=("analytic", "numeric"),
                       default="analytic")
    p_pde.set_defaults(handler=cmd_pde)

    p_rep = sub.add_parser("repeater", parents=[common],
                           help="rate curves and distance probes")
    p_rep.add_argument("verb", nargs="?", default="curve",
                       choices=("curve", "crossover", "optimal-links",
                                "max-distance"))
    p_rep.add_argument("--distance-range", type=parse_range,
                       default="200:3000:57", metavar="RANGE")
    p_rep.add_argument("--links", type=parse_int_list, default="4,8")
    p_rep.add_argument("--include-direct", action="store_true",
                       help="append the direct-transmission curve")
    p_rep.add_argument("--distance", type=float,
                       help="probe distance for optimal-links (km)")
    p_rep.add_argument("--storage-time", type=float,
                       help="memory storage time for max-distance (s)")
    p_rep.set_defaults(handler=cmd_repeater)

    p_sweep = sub.add_parser("sweep", parents=[common],
                             help="Cartesian sweep of a named quantity")
    p_sweep.add_argument("--grid", action="append", metavar="PATH=V1,V2,...",
                         help="grid over a scenario field (repeatable)")
    p_sweep.add_argument("--quantity", required=True,
                         help=f"one of {sorted(QUANTITIES)}")
    p_sweep.add_argument("--grid-points", type=int, default=200,
                         help="radial points for PDE-backed quantities")
    p_sweep.set_defaults(handler=cmd_sweep)
    return parser


def _normalize_defaults(args) -> None:
    # argparse leaves string defaults unparsed; run them through the types
    if getattr(args, "exponent_range", None) is not None \
            and isinstance(args.exponent_range, str):
        args.exponent_range = parse_range(args.exponent_range)
    if getattr(args, "distance_range", None) is not None \
            and isinstance(args.distance_range, str):
        args.distance_range = parse_range(args.distance_range)
    if getattr(args, "links", None) is not None and isinstance(args.links, str):
        args.links = parse_int_list(args.links)


def _manifest_for(args) -> RunManifest:
    skip = {"command", "handler", "scenario", "out"}
    overrides = []
    for key, value in sorted(vars(args).items()):
        if key in skip or value is None or value == []:
            continue
        if isinstance(value, list):
            rendered = ";".join(str(v) for v in value)
        else:
            rendered = str(value)
        overrides.append(f"{key.replace('_', '-')}={rendered}")
    outputs = [args.out] if args.out else []
    return RunManifest(scenario=args.scenario or "<canonical>",
                       subcommand=args.command, overrides=overrides,
                       outputs=outputs)


def _write_artifacts(args, text: str) -> None:
    if not args.out:
        sys.stdout.write(text)
        return
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    manifest_path = f"{args.out}.manifest.json"
    with open(manifest_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(asdict(_manifest_for(args)), fh, indent=2, sort_keys=True)
        fh.write("\n")


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    _normalize_defaults(args)
    try:
        scenario = load_scenario(args.scenario) if args.scenario \
            else canonical_scenario()
        if args.set:
            scenario = apply_overrides(scenario, args.set)
        ensure_valid(scenario)
    except ConfigError as exc:
        print(f"spinvault: {exc}", file=sys.stderr)
        return 2
    try:
        text = args.handler(scenario, args)
    except ConfigError as exc:
        print(f"spinvault: {exc}", file=sys.stderr)
        return 2
    except SpinVaultError as exc:
        print(f"spinvault: compute failed: {exc}", file=sys.stderr)
        return 3
    try:
        _write_artifacts(args, text)
    except OSError as exc:
        print(f"spinvault: cannot write artifact: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
