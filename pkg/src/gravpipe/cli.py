"""Command-line interface: every computation as a reproducible subcommand.

Each run writes one data artifact (CSV, or JSON for fits) plus a JSON run
manifest into ``--out`` recording the subcommand, the full parameter set,
the library version, timestamps, and SHA-256 hashes of inputs and
outputs.  Numeric CSV cells carry 12 significant digits; identical
parameter sets produce byte-identical data payloads.

Exit codes: 0 success, 2 validation error (bad flags, malformed files,
out-of-domain parameters), 3 numerical failure; errors are reported as a
single machine-parsable line on stderr.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, analysis, eigen, flux, gravspec, repop, roughdyn
from .absorber import ScatteringLength, WoodsSaxon, ws_scattering_length
from .eigen import ContinuationError, ConvergenceError
from .flux import FluxCurve, VelocityDistribution, WaveguideConfig
from .repop import StepGeometry
from .roughdyn import RoughnessDrive
from .scales import neutron_scales

__all__ = ["main"]

_SCHEMA_VERSION = 1


class _CliError(ValueError):
    """Validation failure reported with exit code 2."""


# ---------------------------------------------------------------------------
# formatting and file I/O
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    """One CSV cell: 12 significant digits, dot decimal separator."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    return str(value)


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(cell) for cell in row])


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            digest.update(block)
    return digest.hexdigest()


def _clean_params(args: argparse.Namespace) -> dict:
    params = {}
    for key, value in vars(args).items():
        if key in ("func", "out"):
            continue
        if isinstance(value, Path):
            value = str(value)
        params[key] = value
    return params


def _write_manifest(out_dir: Path, name: str, args: argparse.Namespace,
                    inputs: dict, outputs: dict, extras: dict) -> Path:
    manifest = {
        "schema_version": _SCHEMA_VERSION,
        "command": name,
        "parameters": _clean_params(args),
        "library_version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "inputs": inputs,
        "outputs": outputs,
        "extras": extras,
    }
    path = out_dir / f"{name}.manifest.json"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _emit(args: argparse.Namespace, name: str, header: list[str], rows,
          extras: dict | None = None, inputs: dict | None = None) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{name}.csv"
    _write_csv(csv_path, header, rows)
    _write_manifest(out_dir, name, args, inputs or {},
                    {csv_path.name: _sha256(csv_path)}, extras or {})
    print(csv_path)
    return 0


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


# ---------------------------------------------------------------------------
# shared argument handling
# ---------------------------------------------------------------------------

def _default_threads() -> int:
    raw = os.environ.get("GRAVPIPE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _parse_range(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise _CliError(f"range must be start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise _CliError(f"non-numeric range component in {text!r}") from exc
    if step <= 0.0 or stop < start:
        raise _CliError("range requires stop >= start and step > 0")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


def _add_absorber_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("absorber")
    group.add_argument("--re-a", type=float, default=0.0,
                       help="Re of the scattering length (um)")
    group.add_argument("--im-a", type=float, default=None,
                       help="Im of the scattering length (um, <= 0)")
    group.add_argument("--offset", type=float, default=0.0,
                       help="boundary offset entering the length (um)")
    group.add_argument("--ws-depth-eV", type=float, default=None,
                       help="smooth-step potential depth (eV)")
    group.add_argument("--ws-rho-um", type=float, default=None,
                       help="smooth-step diffuseness (um)")
    group.add_argument("--ws-phase-deg", type=float, default=90.0,
                       help="smooth-step loss phase (degrees)")


def _absorber(args: argparse.Namespace,
              required: bool) -> ScatteringLength | None:
    ws_given = args.ws_depth_eV is not None or args.ws_rho_um is not None
    plain_given = args.im_a is not None or args.re_a != 0.0
    if ws_given and plain_given:
        raise _CliError("give either --re-a/--im-a or the --ws-* model, "
                        "not both")
    if ws_given:
        if args.ws_depth_eV is None or args.ws_rho_um is None:
            raise _CliError("the smooth-step model needs both --ws-depth-eV "
                            "and --ws-rho-um")
        model = WoodsSaxon(args.ws_depth_eV, args.ws_rho_um,
                           math.radians(args.ws_phase_deg), args.offset)
        return ws_scattering_length(model)
    if not plain_given:
        if required:
            raise _CliError("an absorber is required: give --im-a or the "
                            "--ws-* model")
        return None
    return ScatteringLength(complex(args.re_a, args.im_a or 0.0),
                            args.offset)


def _add_passage_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("passage")
    group.add_argument("--V", type=float, required=True,
                       help="horizontal velocity (m/s)")
    group.add_argument("--L", type=float, default=None,
                       help="guide length (cm)")
    group.add_argument("--tau-pass", type=float, default=None,
                       help="passage time (s); alternative to --L")
    group.add_argument("--delta-V-over-V", type=float, default=0.0,
                       help="relative velocity spread")
    group.add_argument("--k0-per-um", type=float, default=8.5165,
                       help="longitudinal wavenumber (1/um)")


def _guide_length_cm(args: argparse.Namespace) -> float:
    if (args.L is None) == (args.tau_pass is None):
        raise _CliError("exactly one of --L and --tau-pass is required")
    if args.tau_pass is not None:
        if args.tau_pass <= 0.0:
            raise _CliError("--tau-pass must be positive")
        return args.tau_pass * args.V * 100.0
    return args.L


def _with_normalization(curve: FluxCurve,
                        args: argparse.Namespace) -> FluxCurve:
    if getattr(args, "normalize_at", None) is not None:
        return curve.with_reference(args.normalize_at)
    if getattr(args, "F_star", 1.0) != 1.0:
        return FluxCurve(curve.H_um, curve.F, curve.mode_terms,
                         curve.interference, args.F_star, curve.regimes,
                         curve.mode_counts)
    return curve


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_spectrum(args: argparse.Namespace) -> int:
    states = gravspec.spectrum(args.count)
    rows = [
        (s.n, s.lam, gravspec.wkb_lambda(s.n), s.energy_peV,
         s.turning_point_um)
        for s in states
    ]
    return _emit(args, "spectrum",
                 ["n", "lambda", "lambda_wkb", "energy_peV", "height_um"],
                 rows)


def _cmd_modes(args: argparse.Namespace) -> int:
    scales = neutron_scales()
    if args.geometry == "two-wall":
        roots = eigen.two_wall_roots(args.H, args.count)
        rows = [(i + 1, lam, lam * scales.eps0_peV)
                for i, lam in enumerate(roots)]
        return _emit(args, "modes", ["n", "lambda", "energy_peV"], rows)
    a = _absorber(args, required=args.geometry != "direct")
    if args.geometry == "direct":
        modes = eigen.solve_direct(args.H, a, args.count)
    elif args.geometry == "inverse":
        modes = eigen.solve_inverse(args.H, a, args.count)
    else:
        modes = eigen.solve_box(args.H, a, args.count)
    rows = [
        (m.n, m.lam.real, m.lam.imag, m.energy_peV.real, m.gamma_peV,
         m.lifetime_s, complex(m.q).real, complex(m.q).imag)
        for m in modes
    ]
    return _emit(args, "modes",
                 ["n", "re_lambda", "im_lambda", "re_energy_peV",
                  "width_peV", "lifetime_s", "re_q", "im_q"],
                 rows)


def _concat_curves(curves: list[FluxCurve]) -> FluxCurve:
    width = max(c.mode_terms.shape[1] for c in curves)
    terms = np.vstack([
        np.pad(c.mode_terms, ((0, 0), (0, width - c.mode_terms.shape[1])))
        for c in curves
    ])
    return FluxCurve(
        H_um=np.concatenate([c.H_um for c in curves]),
        F=np.concatenate([c.F for c in curves]),
        mode_terms=terms,
        interference=np.concatenate([c.interference for c in curves]),
        regimes=sum((c.regimes for c in curves), ()),
        mode_counts=sum((c.mode_counts for c in curves), ()),
    )


def _direct_curve(H_values: np.ndarray, config: WaveguideConfig,
                  count: int | None, threads: int) -> FluxCurve:
    """Ascending flux curve, optionally split into per-thread chunks.

    The mode count is pinned from the full range first so every chunk
    tracks the same mode set and the result is independent of the split.
    """
    if count is None:
        count = min(50, max(4, math.ceil(
            gravspec.count_states_wkb(float(H_values.max()))) + 4))
    if threads <= 1 or H_values.size < 2 * threads:
        return flux.averaged_flux_curve(H_values, config, count)
    chunks = np.array_split(H_values, threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        curves = list(pool.map(
            lambda chunk: flux.averaged_flux_curve(chunk, config, count),
            chunks,
        ))
    return _concat_curves(curves)


def _cmd_flux(args: argparse.Namespace) -> int:
    H_values = _parse_range(args.H_range)
    L_cm = _guide_length_cm(args)
    incoming = VelocityDistribution(args.V, args.delta_V_over_V,
                                    args.k0_per_um)
    geometry = {"direct": "direct", "inverse": "inverse",
                "zero-g": "zero_gravity"}[args.geometry]
    absorber_required = not (geometry == "zero_gravity"
                             and args.forced_unit_absorption)
    a = _absorber(args, required=absorber_required)
    config = WaveguideConfig(float(H_values.max()), L_cm, args.V, geometry,
                             a, incoming)
    extras: dict = {"tau_pass_s": config.tau_pass_s}
    if geometry == "direct":
        curve = _direct_curve(H_values, config, args.count, args.threads)
    elif geometry == "inverse":
        curve = flux.inverse_flux_curve(H_values, config, args.count or 4)
        extras["flux_ratio"] = flux.flux_ratio_inverse(config)
    else:
        curve = flux.zero_gravity_flux_curve(H_values, config,
                                             args.forced_unit_absorption)
        if a is not None:
            extras["critical_height_um"] = flux.critical_height(
                a, config.tau_pass_s)
    curve = _with_normalization(curve, args)
    rows = []
    for i in range(curve.H_um.size):
        row = [curve.H_um[i], curve.F[i], curve.F_rel[i],
               curve.mode_counts[i] if curve.mode_counts else 0]
        if curve.regimes:
            row.append(curve.regimes[i])
        rows.append(row)
    header = ["H_um", "F", "F_rel", "included"]
    if curve.regimes:
        header.append("regime")
    return _emit(args, "flux", header, rows, extras)


def _cmd_rough_flux(args: argparse.Namespace) -> int:
    H_values = _parse_range(args.H_range)
    L_cm = _guide_length_cm(args)
    a = _absorber(args, required=True)
    drive = RoughnessDrive(float(H_values.max()), args.b, args.d, args.V)
    tau_pass = L_cm * 1e-2 / args.V
    curve = roughdyn.flux_rough(H_values, drive, a, tau_pass, args.count)
    curve = _with_normalization(curve, args)
    rows = [
        (curve.H_um[i], curve.F[i], curve.F_rel[i],
         curve.mode_counts[i] if curve.mode_counts else 0)
        for i in range(curve.H_um.size)
    ]
    return _emit(args, "rough-flux", ["H_um", "F", "F_rel", "included"],
                 rows, {"tau_pass_s": tau_pass,
                        "drive_frequency_per_s": drive.omega_per_s})


def _cmd_repop(args: argparse.Namespace) -> int:
    if args.scan_delta is not None:
        deltas = _parse_range(args.scan_delta)
        pops = repop.ground_state_population_scan(deltas)
        rows = list(zip(deltas, pops))
        best = int(np.argmin(pops))
        return _emit(args, "repop", ["delta_um", "ground_population"], rows,
                     {"minimum_delta_um": float(deltas[best]),
                      "minimum_population": float(pops[best])})
    if args.delta is None:
        raise _CliError("--delta is required unless --scan-delta is given")
    if args.ideal:
        states = gravspec.spectrum(args.count)
        ground = states[0]
        rows = []
        for state in states:
            overlap = repop.ideal_overlap(ground, state, args.delta)
            rows.append((state.n, overlap, overlap ** 2))
        return _emit(args, "repop", ["m", "overlap", "overlap_sq"], rows)
    if args.H is None:
        raise _CliError("--H is required for the guide-mode matrix")
    if args.L0 is None:
        raise _CliError("--L0 (step position, cm) is required")
    a = _absorber(args, required=True)
    L_cm = _guide_length_cm(args)
    step = StepGeometry(args.L0, args.delta)
    config = WaveguideConfig(args.H, L_cm, args.V, "direct", a,
                             VelocityDistribution(args.V,
                                                  args.delta_V_over_V,
                                                  args.k0_per_um))
    before = eigen.solve_direct(args.H, a, args.count)
    after = eigen.solve_direct(args.H + args.delta, a, args.count)
    point = repop.flux_with_step(config, step, before, after)
    matrix = repop.repopulation_matrix(before, after, args.delta,
                                       tau0_s=step.tau0_s(args.V))
    rows = [
        (j + 1, m + 1, matrix[j, m].real, matrix[j, m].imag,
         abs(matrix[j, m]) ** 2)
        for j in range(matrix.shape[0])
        for m in range(matrix.shape[1])
    ]
    return _emit(args, "repop",
                 ["j", "m", "re_amplitude", "im_amplitude", "abs_sq"],
                 rows,
                 {"F": point.F, "tau0_s": step.tau0_s(args.V),
                  "tau_pass_s": config.tau_pass_s})


def _read_fit_csv(path: str) -> np.ndarray:
    rows = []
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise _CliError(f"empty data file: {path}")
            for lineno, record in enumerate(reader, start=2):
                if not record:
                    continue
                if len(record) < 3:
                    raise _CliError(
                        f"{path}:{lineno}: need 3 columns (H_um, counts, "
                        f"sigma), got {len(record)}"
                    )
                try:
                    rows.append([float(x) for x in record[:3]])
                except ValueError as exc:
                    raise _CliError(
                        f"{path}:{lineno}: non-numeric value"
                    ) from exc
    except OSError as exc:
        raise _CliError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise _CliError(f"no data rows in {path}")
    return np.asarray(rows)


def _cmd_fit(args: argparse.Namespace) -> int:
    data = _read_fit_csv(args.data)
    seeds = None
    if args.seed_lambdas is not None:
        try:
            seeds = [float(x) for x in args.seed_lambdas.split(",")]
        except ValueError as exc:
            raise _CliError("--seed-lambdas must be a comma-separated "
                            "number list") from exc
    result = analysis.fit_step_model(data, args.n_states, args.tau_pass,
                                     seeds)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = {
        "lambdas": result.lambdas,
        "amplitudes": result.amplitudes,
        "lambda_sigma": result.lambda_sigma,
        "amplitude_sigma": result.amplitude_sigma,
        "covariance": result.covariance,
        "residual_norm": result.residual_norm,
        "pulls": result.pulls,
        "converged": result.converged,
        "ordered": result.ordered,
        "n_evaluations": result.n_evaluations,
        "message": result.message,
        "tau_pass_s": result.tau_pass_s,
    }
    json_path = out_dir / "fit.json"
    with open(json_path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True,
                  default=_json_default)
        fh.write("\n")
    _write_manifest(out_dir, "fit", args,
                    {args.data: _sha256(Path(args.data))},
                    {json_path.name: _sha256(json_path)},
                    {"converged": result.converged,
                     "residual_norm": result.residual_norm})
    print(json_path)
    return 0


def _cmd_resolution(args: argparse.Namespace) -> int:
    if (args.ratio is None) == (args.im_a is None
                                and args.ws_depth_eV is None):
        raise _CliError("give exactly one of --ratio or an absorber "
                        "specification")
    extras: dict = {"margin_factor": analysis.MARGIN_FACTOR}
    if args.ratio is not None:
        if args.ratio <= 1.0:
            raise _CliError("--ratio must exceed 1")
        tau_abs = args.tau_pass / args.ratio
        if args.ratio > math.e:
            extras["resolvable_count_bound"] = \
                analysis.resolvable_count_bound(args.tau_pass, tau_abs)
    else:
        a = _absorber(args, required=True)
        if args.b is not None:
            tau_abs = [analysis.tau_abs_rough(n, args.b, a)
                       for n in range(1, args.count + 1)]
        else:
            tau_abs = [analysis.tau_abs_flat(n, a)
                       for n in range(1, args.count + 1)]
    report = analysis.resolution(args.tau_pass, tau_abs, args.count)
    extras["resolvable_prefix"] = report.count
    rows = [
        (int(report.n[i]), report.H_um[i], report.ratio[i],
         report.shift_um[i], report.smear_um[i],
         bool(report.resolvable[i]), bool(report.ill_conditioned[i]))
        for i in range(args.count)
    ]
    return _emit(args, "resolution",
                 ["n", "H_um", "ratio", "shift_um", "smear_um",
                  "resolvable", "ill_conditioned"],
                 rows, extras)


def _cmd_show_scales(args: argparse.Namespace) -> int:
    scales = neutron_scales()
    rows = [
        ("mass_kg", scales.mass_kg),
        ("g_ms2", scales.g_ms2),
        ("eps0_peV", scales.eps0_peV),
        ("l0_um", scales.l0_um),
        ("hbar_peV_s", scales.hbar_peV_s),
        ("kinetic_coefficient_peV_um2", scales.kinetic_coefficient_peV_um2),
        ("mg_peV_per_um", scales.mg_peV_per_um),
    ]
    return _emit(args, "show-scales", ["key", "value"], rows)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".",
                        help="output directory (default: current)")
    common.add_argument("--threads", type=int, default=_default_threads(),
                        help="parallel chunks over height samples "
                             "(env GRAVPIPE_THREADS)")

    parser = argparse.ArgumentParser(
        prog="gravpipe",
        description="Gravitationally bound states above a mirror: spectra, "
                    "quasi-bound widths, transmitted flux, and fits.",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common],
                       help="ideal-mirror bound states")
    p.add_argument("--count", type=int, default=7)
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("modes", parents=[common],
                       help="quasi-bound modes of one guide configuration")
    p.add_argument("--H", type=float, required=True, help="slit height (um)")
    p.add_argument("--count", type=int, default=4)
    p.add_argument("--geometry", default="direct",
                   choices=["direct", "inverse", "box", "two-wall"])
    _add_absorber_args(p)
    p.set_defaults(func=_cmd_modes)

    p = sub.add_parser("flux", parents=[common],
                       help="transmitted flux over a height range")
    p.add_argument("--geometry", default="direct",
                   choices=["direct", "inverse", "zero-g"])
    p.add_argument("--H-range", required=True, metavar="start:stop:step",
                   help="height samples (um)")
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--F-star", type=float, default=1.0,
                   help="normalization reference for F_rel")
    p.add_argument("--normalize-at", type=float, default=None,
                   help="set F_rel = 1 at this height instead")
    p.add_argument("--forced-unit-absorption", action="store_true",
                   help="zero-g only: one full loss per wall collision")
    _add_passage_args(p)
    _add_absorber_args(p)
    p.set_defaults(func=_cmd_flux)

    p = sub.add_parser("rough-flux", parents=[common],
                       help="flux under a rough absorber")
    p.add_argument("--H-range", required=True, metavar="start:stop:step")
    p.add_argument("--b", type=float, required=True,
                   help="roughness amplitude (um)")
    p.add_argument("--d", type=float, required=True,
                   help="roughness period (um)")
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--F-star", type=float, default=1.0)
    p.add_argument("--normalize-at", type=float, default=None)
    _add_passage_args(p)
    _add_absorber_args(p)
    p.set_defaults(func=_cmd_rough_flux)

    p = sub.add_parser("repop", parents=[common],
                       help="stepped-mirror repopulation")
    p.add_argument("--delta", type=float, default=None,
                   help="mirror step size (um)")
    p.add_argument("--count", type=int, default=7)
    p.add_argument("--ideal", action="store_true",
                   help="ideal-basis overlap column instead of guide modes")
    p.add_argument("--scan-delta", default=None, metavar="start:stop:step",
                   help="scan the ground-state population over step sizes")
    p.add_argument("--H", type=float, default=None, help="slit height (um)")
    p.add_argument("--L0", type=float, default=None,
                   help="step position along the guide (cm)")
    p.add_argument("--V", type=float, default=10.0)
    p.add_argument("--L", type=float, default=None)
    p.add_argument("--tau-pass", type=float, default=None)
    p.add_argument("--delta-V-over-V", type=float, default=0.0)
    p.add_argument("--k0-per-um", type=float, default=8.5165)
    _add_absorber_args(p)
    p.set_defaults(func=_cmd_repop)

    p = sub.add_parser("fit", parents=[common],
                       help="fit the staircase model to flux data")
    p.add_argument("--data", required=True,
                   help="CSV with columns H_um, counts, sigma")
    p.add_argument("--n-states", type=int, required=True)
    p.add_argument("--tau-pass", type=float, required=True)
    p.add_argument("--seed-lambdas", default=None,
                   help="comma-separated eigenvalue seeds")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("resolution", parents=[common],
                       help="step shift/smear report and resolvable count")
    p.add_argument("--tau-pass", type=float, required=True)
    p.add_argument("--ratio", type=float, default=None,
                   help="uniform tau_pass/tau_abs ratio")
    p.add_argument("--b", type=float, default=None,
                   help="rough-absorber amplitude (um)")
    p.add_argument("--count", type=int, default=7)
    _add_absorber_args(p)
    p.set_defaults(func=_cmd_resolution)

    p = sub.add_parser("show-scales", parents=[common],
                       help="print the unit system")
    p.set_defaults(func=_cmd_show_scales)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return int(code) if isinstance(code, int) else 0 if code is None else 2
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"gravpipe: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError, TypeError) as exc:
        print(f"gravpipe: error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, ContinuationError, ArithmeticError,
            FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"gravpipe: numerical-failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
