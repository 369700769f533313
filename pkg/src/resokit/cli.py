"""Command-line front end.

Subcommands: analyze, fem, respond, compare-detection, check, optimize, gap.
Exit codes: 0 success/pass, 1 domain failure (spec fail, infeasible), 2
usage or config error. Commands are thin adapters over the library; numeric
results are identical to direct calls.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

from . import analytic, design, fab, fem, transduction
from .core import (BeamGeometry, beam_geometry_from_dict,
                   disk_geometry_from_dict, load_material, material_from_dict,
                   transducer_from_dict)
from .errors import (InfeasibleDesignError, ResokitError, SchemaError,
                     UnknownPresetError)
from .units import parse_quantity

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


@dataclass(frozen=True)
class RunConfig:
    """Parsed invocation: input files must exist at parse time."""

    command: str
    inputs: tuple = ()
    json_out: str | None = None
    csv_out: str | None = None
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        for p in self.inputs:
            if not os.path.exists(p):
                raise SchemaError(f"input file not found: {p}")


def _load_design_config(path: str) -> dict:
    try:
        with open(path) as f:
            cfg = json.load(f)
    except FileNotFoundError:
        raise SchemaError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(cfg, dict):
        raise SchemaError(f"{path}: expected a JSON object")
    version = cfg.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SchemaError(f"{path}: unsupported schema_version {version}")
    return cfg


def _design_from_config(cfg: dict):
    """(geometry, material, transducer, q) from a design config dict."""
    kind = cfg.get("kind")
    if kind not in ("beam", "disk"):
        raise SchemaError(f"design config: kind must be 'beam' or 'disk', got {kind!r}")
    geometry = (beam_geometry_from_dict(cfg["geometry"]) if kind == "beam"
                else disk_geometry_from_dict(cfg["geometry"]))
    mat_spec = cfg.get("material", "silicon")
    material = (material_from_dict(mat_spec) if isinstance(mat_spec, dict)
                else load_material(mat_spec))
    transducer = transducer_from_dict(cfg["transducer"]) if "transducer" in cfg else None
    q = parse_quantity(cfg.get("q", 1e4))
    return geometry, material, transducer, q


def _emit(report: dict, json_path: str | None):
    if json_path:
        with open(json_path, "w") as f:
            json.dump(report, f, indent=2)
            f.write("\n")


# ---------------------------------------------------------------------------
# subcommands

def _cmd_analyze(args) -> int:
    run = RunConfig("analyze", inputs=(args.config,), json_out=args.json)
    cfg = _load_design_config(args.config)
    geometry, material, _, _ = _design_from_config(cfg)

    if isinstance(geometry, BeamGeometry):
        f_analytic = analytic.beam_mode_frequency(geometry, material, 1)
        sys_ = fem.assemble_beam(geometry, material, args.elements)
        f_fem = fem.solve_modes(sys_, 1)[0][0]
        kind = "beam"
    else:
        f_analytic = analytic.disk_wineglass_frequency(geometry, material, 2)
        target = args.target_edge or geometry.radius / 16.0
        mesh = fem.mesh_disk(geometry, target)
        modes = fem.disk_modal_fem(geometry, material, mesh)
        pair = [m for m in modes if m.mode_order == 2]
        if not pair:
            raise ResokitError("no angular-order-2 mode found in FEM results")
        f_fem = pair[0].frequency
        kind = "disk"

    delta_pct = (f_fem - f_analytic) / f_analytic * 100.0
    report = {"kind": kind, "analytic_hz": f_analytic, "fem_hz": f_fem,
              "delta_pct": delta_pct}
    print(f"{kind} modal analysis")
    print(f"  analytic_hz: {f_analytic!r}")
    print(f"  fem_hz: {f_fem!r}")
    print(f"  delta_pct: {delta_pct!r}")
    _emit(report, run.json_out)
    return EXIT_OK


def _cmd_fem(args) -> int:
    run = RunConfig("fem", inputs=(args.config,), json_out=args.json)
    cfg = _load_design_config(args.config)
    geometry, material, _, _ = _design_from_config(cfg)

    if isinstance(geometry, BeamGeometry):
        sys_ = fem.assemble_beam(geometry, material, args.elements)
        modes = fem.solve_modes(sys_, args.modes)
        rows = [{"mode": i + 1, "frequency_hz": f} for i, (f, _) in enumerate(modes)]
        if args.modes_csv:
            fem.export_modes_csv(sys_, modes, args.modes_csv)
        mesh = sys_.mesh
    else:
        target = args.target_edge or geometry.radius / 16.0
        mesh = fem.mesh_disk(geometry, target)
        results = fem.disk_modal_fem(geometry, material, mesh, n_modes=args.modes)
        rows = [{"mode": i + 1, "frequency_hz": m.frequency,
                 "angular_order": m.mode_order} for i, m in enumerate(results)]
        if args.modes_csv:
            sys_ = fem.assemble_disk(geometry, material, mesh)
            vecs = fem.solve_modes(sys_, args.modes + 3)[3:]
            fem.export_modes_csv(sys_, vecs, args.modes_csv)
    if args.mesh_out:
        fem.export_mesh(mesh, args.mesh_out)

    for row in rows:
        extra = f"  n={row['angular_order']}" if "angular_order" in row else ""
        print(f"mode {row['mode']}: {row['frequency_hz']!r} Hz{extra}")
    _emit({"modes": rows}, run.json_out)
    return EXIT_OK


def _cmd_respond(args) -> int:
    run = RunConfig("respond", inputs=(args.config,),
                    json_out=args.json, csv_out=args.csv)
    cfg = _load_design_config(args.config)
    geometry, material, transducer, q = _design_from_config(cfg)
    if transducer is None:
        raise SchemaError("respond needs a transducer section in the config")
    mode = (analytic.beam_mode_result(geometry, material)
            if isinstance(geometry, BeamGeometry)
            else analytic.disk_mode_result(geometry, material))
    circuit = transduction.equivalent_circuit(mode, transducer, q)
    spectrum = transduction.transmission_spectrum(
        circuit, termination=args.termination, points=args.points)
    q_extracted = transduction.extract_q(spectrum)
    if run.csv_out:
        spectrum.to_csv(run.csv_out)
    if args.circuit_json:
        transduction.circuit_to_json(circuit, args.circuit_json)
    report = {"f0_hz": circuit.f0, "r_x_ohm": circuit.r_x, "q_configured": q,
              "q_extracted": q_extracted, "points": args.points,
              "termination_ohm": args.termination}
    print(f"f0: {circuit.f0!r} Hz")
    print(f"R_x: {circuit.r_x!r} ohm")
    print(f"Q extracted: {q_extracted!r} (configured {q!r})")
    _emit(report, run.json_out)
    return EXIT_OK


def _cmd_compare_detection(args) -> int:
    run = RunConfig("compare-detection", inputs=(args.config,),
                    json_out=args.json, csv_out=args.csv)
    cfg = _load_design_config(args.config)
    geometry, material, transducer, q = _design_from_config(cfg)
    if not isinstance(geometry, BeamGeometry):
        raise SchemaError("compare-detection supports beam designs")
    scales = [float(s) for s in args.scales.split(",")]
    curve = transduction.detection_comparison(geometry, material, transducer, q, scales)
    if run.csv_out:
        with open(run.csv_out, "w") as f:
            f.write("scale,i_mos_over_i_cap\n")
            for s, r in curve:
                f.write(f"{s!r},{r!r}\n")
    for s, r in curve:
        print(f"scale {s:g}: i_mos/i_cap = {r!r}")
    _emit({"curve": [{"scale": s, "ratio": r} for s, r in curve]}, run.json_out)
    return EXIT_OK


def _load_process(path: str | None) -> fab.ProcessModel:
    if path is None:
        return fab.ProcessModel()
    return fab.process_model_from_dict(_load_design_config(path))


def _cmd_check(args) -> int:
    run = RunConfig("check", inputs=(args.config,), json_out=args.json)
    cfg = _load_design_config(args.config)
    geometry, material, transducer, q = _design_from_config(cfg)
    if transducer is None:
        raise SchemaError("check needs a transducer section in the config")
    profile = design.profile_by_name(args.profile)
    process = _load_process(args.process)
    v_range = profile.dc_voltage_range or (0.0, transducer.bias_voltage)
    candidate = design.DesignCandidate.analyze(geometry, transducer, material, q,
                                               process, tuning_v_range=v_range)
    tol = design.CheckTolerances(frequency_rel_tol=args.freq_tol)
    report = design.check_spec(candidate, profile, tol)
    print(report.to_text())
    _emit(report.to_dict(), run.json_out)
    return EXIT_OK if report.passed else EXIT_DOMAIN


def _cmd_optimize(args) -> int:
    run = RunConfig("optimize", inputs=(args.bounds,), json_out=args.json)
    bcfg = _load_design_config(args.bounds)
    family = bcfg.get("family")
    if family not in ("beam", "disk"):
        raise SchemaError("bounds config: family must be 'beam' or 'disk'")
    if "bounds" not in bcfg:
        raise SchemaError("bounds config: missing 'bounds' object")
    mat_spec = bcfg.get("material", "silicon")
    material = (material_from_dict(mat_spec) if isinstance(mat_spec, dict)
                else load_material(mat_spec))
    profile = design.profile_by_name(args.profile)
    process = _load_process(args.process)
    assumed_q = bcfg.get("assumed_q")
    candidates = design.optimize(
        profile, family, bcfg["bounds"], process=process, material=material,
        assumed_q=None if assumed_q is None else parse_quantity(assumed_q),
        grid_points=int(bcfg.get("grid_points", 7)),
        max_results=int(bcfg.get("max_results", 10)))
    ranked = [c.to_dict() for c in candidates]
    for i, c in enumerate(candidates):
        print(f"#{i + 1}: R_x = {c.analysis.r_x!r} ohm, "
              f"f = {c.analysis.frequency!r} Hz")
    _emit({"profile": profile.name, "candidates": ranked}, run.json_out)
    return EXIT_OK


def _cmd_gap(args) -> int:
    inputs = (args.process,) if args.process else ()
    run = RunConfig("gap", inputs=inputs, json_out=args.json)
    process = _load_process(args.process)
    drawn = parse_quantity(args.drawn)
    tunnel = parse_quantity(args.tunnel)
    released = fab.released_gap(drawn, tunnel, process)
    report = {"drawn_gap_m": drawn, "tunnel_depth_m": tunnel,
              "released_gap_m": released,
              "single_point_calibration": True}
    print(f"drawn gap:    {drawn * 1e9:.3f} nm")
    print(f"tunnel depth: {tunnel * 1e6:.4f} um")
    print(f"released gap: {released * 1e9:.3f} nm (single-point calibration)")
    _emit(report, run.json_out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="resokit",
        description="Electrostatic MEMS resonator design and analysis toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="analytic vs FEM modal frequencies")
    a.add_argument("--config", required=True, help="design config JSON")
    a.add_argument("--elements", type=int, default=64, help="beam FEM elements")
    a.add_argument("--target-edge", type=parse_quantity, default=None,
                   help="disk mesh target edge (default radius/16)")
    a.add_argument("--json", default=None, help="write JSON report here")
    a.set_defaults(func=_cmd_analyze)

    f = sub.add_parser("fem", help="FEM modal analysis with optional exports")
    f.add_argument("--config", required=True)
    f.add_argument("--elements", type=int, default=64)
    f.add_argument("--target-edge", type=parse_quantity, default=None)
    f.add_argument("--modes", type=int, default=4)
    f.add_argument("--mesh-out", default=None, help="write mesh text file")
    f.add_argument("--modes-csv", default=None, help="write mode shapes CSV")
    f.add_argument("--json", default=None)
    f.set_defaults(func=_cmd_fem)

    r = sub.add_parser("respond", help="transmission spectrum and extracted Q")
    r.add_argument("--config", required=True)
    r.add_argument("--termination", type=parse_quantity, default=50.0)
    r.add_argument("--points", type=int, default=2001)
    r.add_argument("--csv", default=None, help="write spectrum CSV here")
    r.add_argument("--circuit-json", default=None,
                   help="write the equivalent circuit as a JSON record")
    r.add_argument("--json", default=None)
    r.set_defaults(func=_cmd_respond)

    cd = sub.add_parser("compare-detection", help="MOS vs capacitive current ratio")
    cd.add_argument("--config", required=True)
    cd.add_argument("--scales", default="1,0.9,0.8,0.7,0.6,0.5,0.4,0.3,0.2")
    cd.add_argument("--csv", default=None)
    cd.add_argument("--json", default=None)
    cd.set_defaults(func=_cmd_compare_detection)

    c = sub.add_parser("check", help="check a design against a spec profile")
    c.add_argument("--config", required=True)
    c.add_argument("--profile", required=True)
    c.add_argument("--process", default=None, help="process model JSON")
    c.add_argument("--freq-tol", type=float, default=0.005)
    c.add_argument("--json", default=None)
    c.set_defaults(func=_cmd_check)

    o = sub.add_parser("optimize", help="search the design space for a profile")
    o.add_argument("--profile", required=True)
    o.add_argument("--bounds", required=True, help="bounds config JSON")
    o.add_argument("--process", default=None)
    o.add_argument("--json", default=None)
    o.set_defaults(func=_cmd_optimize)

    g = sub.add_parser("gap", help="release-process gap correction")
    g.add_argument("--drawn", required=True, help="drawn gap, e.g. '80 nm'")
    g.add_argument("--tunnel", required=True, help="tunnel depth, e.g. '1.19 um'")
    g.add_argument("--process", default=None)
    g.add_argument("--json", default=None)
    g.set_defaults(func=_cmd_gap)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, UnknownPresetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleDesignError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ResokitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
