"""Command-line driver: presets or JSON configs in, CSV/JSON/NPZ files out.

Exit codes: 0 success, 1 invalid configuration or failed computation,
2 command-line usage errors (including unknown preset names).
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass

import numpy as np

from .core import (
    IonSpec, TrapSpec, DipoleSpec, ModeParams, ATOMIC_MASS,
    E_MODE, B_MODE,
)
from .trap import LambDicke
from .rates import build_catalog, calibrate, rate_scan, total_rate, mode_table
from .fieldeval import intensity_map, isointensity_grid
from .numerics import DEFAULT_QUADRATURE, QuadratureError
from .presets import load_preset, preset_names
from .io import write_csv, write_json, write_npz, config_hash

log = logging.getLogger("paramodes")

_KHZ = 2.0 * np.pi * 1e3  # secular frequencies are quoted in kHz


@dataclass
class RunConfig:
    """Validated run description; sections are optional per command."""

    raw: dict
    ion: IonSpec = None
    dipole: DipoleSpec = None
    trap: TrapSpec = None
    eta: LambDicke = None
    catalog_rule: dict = None
    window: tuple = None
    scan_grid: np.ndarray = None
    mode: ModeParams = None
    map_spec: dict = None

    @classmethod
    def from_dict(cls, raw):
        cfg = cls(raw=raw)
        ion = raw.get("ion")
        if ion is not None:
            cfg.ion = IonSpec(
                name=str(ion.get("name", "ion")),
                mass=float(ion["mass_amu"]) * ATOMIC_MASS,
                transition_wavelength=float(ion["wavelength_nm"]) * 1e-9,
            )
        if "dipole" in raw:
            cfg.dipole = DipoleSpec(tuple(float(x) for x in raw["dipole"]))
        trap = raw.get("trap")
        if trap is not None:
            if cfg.ion is None:
                raise ValueError("trap section requires an ion section")
            radial = float(trap["radial_khz"]) * _KHZ
            axial = float(trap["axial_khz"]) * _KHZ
            center = tuple(float(x) for x in trap.get("center", (0, 0, 0)))
            cfg.trap = TrapSpec(center=center, lambda_x=radial,
                                lambda_y=radial, lambda_z=axial)
            cfg.eta = LambDicke.from_trap(cfg.trap, cfg.ion.omega, cfg.ion.mass)
        if "catalog" in raw:
            cfg.catalog_rule = raw["catalog"]
        if "calibration_window" in raw:
            win = tuple(float(x) for x in raw["calibration_window"])
            if len(win) != 3 or win[1] <= win[0] or win[2] <= 0:
                raise ValueError("calibration_window must be (start, stop, step)")
            cfg.window = win
        scan = raw.get("scan")
        if scan is not None:
            lo, hi = float(scan["z_min"]), float(scan["z_max"])
            step = float(scan["z_step"])
            if hi <= lo or step <= 0:
                raise ValueError("scan grid must have z_min < z_max, z_step > 0")
            cfg.scan_grid = np.arange(lo, hi + step / 2, step)
        mode = raw.get("mode")
        if mode is not None:
            fam = mode["family"]
            if fam not in (E_MODE, B_MODE):
                raise ValueError(f"unknown mode family {fam!r}")
            omega = cfg.ion.omega if cfg.ion is not None else 1.0
            cfg.mode = ModeParams(
                omega=omega, m=int(mode["m"]), kappa=float(mode["kappa"]),
                family=fam,
                coeffs=tuple(complex(c) for c in mode.get("coeffs", (1, -1, 0))))
        mp = raw.get("map")
        if mp is not None:
            spec = {
                "component": str(mp.get("component", "z")),
                "rho_max": float(mp.get("rho_max", 8.0)),
                "n_rho": int(mp.get("n_rho", 81)),
                "z_center": float(mp["z_center"]),
                "z_half_span": float(mp.get("z_half_span", 12.0)),
                "n_z": int(mp.get("n_z", 121)),
                "n_iso": int(mp.get("n_iso", 25)),
            }
            if spec["component"] not in ("z", "+", "-", "total"):
                raise ValueError("map component must be 'z', '+', '-' or 'total'")
            if min(spec["n_rho"], spec["n_z"], spec["n_iso"]) < 2 \
                    or spec["rho_max"] <= 0 or spec["z_half_span"] <= 0:
                raise ValueError("map grid must have positive extent and >= 2 points")
            cfg.map_spec = spec
        return cfg

    def require(self, *sections):
        for name in sections:
            if getattr(self, name) is None:
                raise ValueError(f"this command needs a {name!r} section "
                                 "in the configuration")


def _load_config(args):
    raw = {}
    if args.preset:
        raw.update(load_preset(args.preset))
    if args.config:
        with open(args.config) as fh:
            raw.update(json.load(fh))
    if not raw:
        raise ValueError("provide --preset and/or --config")
    return RunConfig.from_dict(raw), raw


def _quadrature(args):
    cfg = DEFAULT_QUADRATURE
    if args.tolerance is not None:
        cfg = cfg.replace(rel_tol=args.tolerance)
    return cfg


def _calibrated_catalog(cfg, raw, args, quad):
    cfg.require("ion", "dipole", "eta", "catalog_rule", "window")
    catalog = build_catalog(cfg.catalog_rule, cfg.ion.omega)
    log.info("catalog: %d modes over %s", len(catalog.modes),
             ", ".join(catalog.family_labels))
    catalog = calibrate(catalog, cfg.dipole, cfg.eta, cfg.window, quad,
                        threads=args.threads)
    log.info("calibration constant C = %.9g (window %s)",
             catalog.calibration, cfg.window)
    return catalog


def cmd_field_map(args):
    cfg, raw = _load_config(args)
    cfg.require("mode", "map_spec")
    quad = _quadrature(args)
    mp = cfg.map_spec
    rho = np.linspace(0.0, mp["rho_max"], mp["n_rho"])
    zs = np.linspace(mp["z_center"] - mp["z_half_span"],
                     mp["z_center"] + mp["z_half_span"], mp["n_z"])
    grid, mask = intensity_map(cfg.mode, mp["component"], rho, zs, quad)
    if mask.any():
        log.warning("%d grid points failed quadrature", int(mask.sum()))
    rows = [(zs[i], rho[j], grid[i, j])
            for i in range(len(zs)) for j in range(len(rho))]
    write_csv(args.out, ("z", "rho", "relative_intensity"), rows,
              metadata={"config_sha256": config_hash(raw),
                        "component": mp["component"],
                        "failed_points": int(mask.sum())})
    log.info("wrote %s (%d rows)", args.out, len(rows))
    return 0


def cmd_rate_scan(args):
    cfg, raw = _load_config(args)
    cfg.require("scan_grid")
    quad = _quadrature(args)
    catalog = _calibrated_catalog(cfg, raw, args, quad)
    results = rate_scan(catalog, cfg.dipole, cfg.eta, cfg.scan_grid, quad,
                        threads=args.threads)
    labels = catalog.family_labels
    rows = []
    for r in results:
        fam = dict(r.family_totals)
        rows.append((r.z, r.total) + tuple(fam[lab] for lab in labels))
    write_csv(args.out, ("z", "total") + labels, rows,
              metadata={"config_sha256": config_hash(raw),
                        "calibration": catalog.calibration,
                        "n_modes": len(catalog.modes)})
    log.info("wrote %s (%d rows)", args.out, len(rows))
    return 0


def cmd_mode_table(args):
    cfg, raw = _load_config(args)
    quad = _quadrature(args)
    catalog = _calibrated_catalog(cfg, raw, args, quad)
    table = mode_table(catalog, cfg.dipole, cfg.eta, args.z, quad)
    rows = [(t["family"], t["m"], t["kappa"], t["contribution"], t["fraction"])
            for t in table]
    write_csv(args.out, ("family", "m", "kappa", "contribution", "fraction"),
              rows, metadata={"config_sha256": config_hash(raw),
                              "z": args.z,
                              "calibration": catalog.calibration})
    log.info("wrote %s (%d modes)", args.out, len(rows))
    return 0


def cmd_perp_decomposition(args):
    cfg, raw = _load_config(args)
    quad = _quadrature(args)
    catalog = _calibrated_catalog(cfg, raw, args, quad)
    result = total_rate(catalog, cfg.dipole, cfg.eta, args.z, quad)
    payload = {
        "z": result.z,
        "total": result.total,
        "calibration": result.calibration,
        "families": {lab: sub for lab, sub in result.family_totals},
        "config_sha256": config_hash(raw),
    }
    write_json(args.out, payload)
    log.info("wrote %s (total %.6g)", args.out, result.total)
    return 0


def cmd_isosurface(args):
    cfg, raw = _load_config(args)
    cfg.require("mode", "map_spec")
    quad = _quadrature(args)
    mp = cfg.map_spec
    n = mp["n_iso"]
    xy = np.linspace(-mp["rho_max"], mp["rho_max"], n)
    zs = np.linspace(mp["z_center"] - mp["z_half_span"],
                     mp["z_center"] + mp["z_half_span"], n)
    grid, threshold = isointensity_grid(cfg.mode, args.level, xy, xy, zs, quad)
    write_npz(args.out, metadata={"config_sha256": config_hash(raw),
                                  "level": args.level},
              intensity=grid, x=xy, y=xy, z=zs,
              threshold=np.array(threshold))
    log.info("wrote %s (threshold %.6g)", args.out, threshold)
    return 0


def cmd_validate(args):
    cfg, raw = _load_config(args)
    if cfg.catalog_rule is not None:
        if cfg.ion is None:
            raise ValueError("catalog section requires an ion section")
        catalog = build_catalog(cfg.catalog_rule, cfg.ion.omega)
        log.info("catalog: %d modes over %s", len(catalog.modes),
                 ", ".join(catalog.family_labels))
    print("configuration ok")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="paramodes",
        description="Parabolic-mirror mode fields and trapped-ion emission rates")
    parser.add_argument("--list-presets", action="store_true",
                        help="print bundled preset names and exit")
    sub = parser.add_subparsers(dest="command")

    def common(p, out=True):
        p.add_argument("--preset", help="bundled configuration name")
        p.add_argument("--config", help="JSON file merged over the preset")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--tolerance", type=float, default=None,
                       help="relative quadrature tolerance")
        if out:
            p.add_argument("--out", required=True, help="output file path")

    p = sub.add_parser("field-map", help="component intensity on a (rho, z) grid")
    common(p)
    p = sub.add_parser("rate-scan", help="calibrated rate versus trap position")
    common(p)
    p = sub.add_parser("mode-table", help="per-mode contributions at one position")
    common(p)
    p.add_argument("--z", type=float, default=0.0)
    p = sub.add_parser("perp-decomposition",
                       help="family-resolved totals at one position")
    common(p)
    p.add_argument("--z", type=float, default=0.0)
    p = sub.add_parser("isosurface", help="3D intensity grid with iso level")
    common(p)
    p.add_argument("--level", type=float, default=0.5)
    p = sub.add_parser("validate", help="check a configuration without computing")
    common(p, out=False)
    return parser


_COMMANDS = {
    "field-map": cmd_field_map,
    "rate-scan": cmd_rate_scan,
    "mode-table": cmd_mode_table,
    "perp-decomposition": cmd_perp_decomposition,
    "isosurface": cmd_isosurface,
    "validate": cmd_validate,
}


def main(argv=None):
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_presets:
        for name in preset_names():
            print(name)
        return 0
    if not args.command:
        parser.print_usage(sys.stderr)
        return 2
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be >= 1")
    try:
        return _COMMANDS[args.command](args)
    except KeyError as exc:
        # unknown preset names are usage errors
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 2
    except (ValueError, NotImplementedError, QuadratureError,
            ArithmeticError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
