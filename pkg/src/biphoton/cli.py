"""Command-line front end emitting deterministic CSV/JSON scan tables.

Every subcommand echoes its coupling parameters and grids into the table
metadata, so an output file is reproducible in isolation. Optional --plot
renders a matplotlib figure of the same table next to the delimited output.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import quartic
from .errors import (
    BiphotonError,
    DegenerateOmega,
    EmptyRange,
    IoFailure,
    NoBoundState,
    NoConvergence,
    NotInGap,
    PoleAtK,
)
from .model import (
    CouplingConfig,
    continuum_bands,
    gap_region,
    pair_density_of_states,
    single_photon_energy,
)
from .quartic import classify_roots, solve_reciprocal_quartic
from .resonance import (
    resonance_branches,
    resonance_scan,
    track_branch_peak,
)
from .spectrum import (
    BoundSearch,
    bound_dispersion,
    bound_wavefunction,
    chiral_bound,
    find_bound_state,
    unit_edge_energies,
)
from .lattice import eigenstate_residual
from .table import Column, ScanTable, TOOL_VERSION, emit_table

SUBCOMMANDS = (
    "single-dispersion", "continuum", "bound-dispersion", "state-profile",
    "z-magnitudes", "resonance-scan", "branches", "width-vs-K", "roots",
    "validate", "dos",
)


@dataclass
class RunConfig:
    subcommand: str
    cfg: CouplingConfig
    args: argparse.Namespace


class UsageError(Exception):
    """Bad flag combination or malformed value; exits with code 2."""


def _parse_span(text: str, name: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"--{name} expects lo:hi:n, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"--{name}: {exc}") from exc
    if n < 1:
        raise UsageError(f"--{name}: need at least one point")
    return lo, hi, n


def _add_common(parser: argparse.ArgumentParser) -> None:
    coupling = parser.add_mutually_exclusive_group()
    coupling.add_argument("--chi", type=float, default=None,
                          help="chirality, decay fraction into right movers [0, 1]")
    coupling.add_argument("--gamma-r", type=float, default=None,
                          help="right-mover decay rate (total rate units)")
    parser.add_argument("--gamma-l", type=float, default=None,
                        help="left-mover decay rate; defaults to 1 - gamma_r")
    parser.add_argument("--k0", type=float, default=1.2,
                        help="resonant wavenumber times spacing, in (0, pi)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--out", default="-", help="output path, '-' for stdout")
    parser.add_argument("--plot", default=None, metavar="PATH",
                        help="also render the table as a figure to PATH")
    parser.add_argument("--config", default=None, metavar="PATH",
                        help="flat key=value defaults; explicit flags override")
    parser.add_argument("--strict", action="store_true",
                        help="turn per-point numerical failures into exit code 4")
    parser.add_argument("--tol-unit-circle", type=float, default=quartic.UNIT_CIRCLE_TOL,
                        help="| |z|-1 | band classifying roots as unit modulus")
    parser.add_argument("--lattice-n", type=int, default=400,
                        help="truncated-lattice size for the validate oracle")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biphoton",
        description="Two-photon bound states and scattering resonances of an "
                    "emitter array coupled to a waveguide of arbitrary chirality.",
    )
    subs = parser.add_subparsers(dest="subcommand", required=True)

    def sub(name, help_text, **grid_flags):
        p = subs.add_parser(name, help=help_text)
        _add_common(p)
        if grid_flags.get("K"):
            p.add_argument("--K", type=float, default=None, help="center-of-mass momentum per photon")
        if grid_flags.get("K_range"):
            p.add_argument("--K-range", dest="K_range", default=None, metavar="LO:HI:N")
        if grid_flags.get("omega"):
            p.add_argument("--omega", type=float, default=None, help="pair energy")
        if grid_flags.get("omega_range"):
            p.add_argument("--omega-range", dest="omega_range", default=None, metavar="LO:HI:N")
        if grid_flags.get("points"):
            p.add_argument("--points", type=int, default=2001, help="scan points per window")
        if grid_flags.get("grid_size"):
            p.add_argument("--grid-size", type=int, default=4001, help="relative-momentum samples")
        return p

    sub("single-dispersion", "single-photon dispersion over the Brillouin zone",
        K_range=True)
    sub("continuum", "free two-photon band intervals over K",
        K_range=True, grid_size=True)
    sub("bound-dispersion", "gap bound-state dispersion over K",
        K_range=True, grid_size=True)
    p = sub("state-profile", "relative-coordinate wavefunction of one bound state",
            K=True, grid_size=True)
    p.add_argument("--delta-max", type=int, default=40, help="largest separation")
    sub("z-magnitudes", "bound-state root magnitudes across the gap regime",
        K_range=True, grid_size=True)
    sub("resonance-scan", "localized weight and phase over energy at fixed K",
        K=True, omega_range=True, points=True)
    p = sub("branches", "resonance peak positions and widths over K",
            K_range=True, points=True)
    p.add_argument("--jump-tol", type=float, default=0.25,
                   help="max energy jump continuing a branch between K points")
    sub("width-vs-K", "width of the zero-momentum branch at small K",
        K_range=True, points=True)
    sub("roots", "reciprocal-quartic root set at (K, omega)",
        K=True, omega=True, omega_range=True)
    sub("validate", "truncated-lattice residuals of found bound states",
        K=True, K_range=True, grid_size=True)
    p = sub("dos", "pair density of states histogram at fixed K",
            K=True, omega_range=True, grid_size=True)
    p.add_argument("--bins", type=int, default=200)

    runp = subs.add_parser("run", help="dispatch a subcommand named in a config file")
    runp.add_argument("--config", required=True, metavar="PATH")
    return parser


def load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, value = line.split("=", 1)
                values[key.strip()] = value.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    return values


def _merge_config_argv(argv: list[str]) -> list[str]:
    """Prepend file-specified flags so explicit command-line flags win."""
    if "--config" not in argv:
        return argv
    sub = argv[0]
    path = argv[argv.index("--config") + 1]
    values = load_config_file(path)
    if sub == "run":
        if "subcommand" not in values:
            raise UsageError(f"{path}: run needs a subcommand= entry")
        sub = values.pop("subcommand")
        if sub not in SUBCOMMANDS:
            raise UsageError(f"{path}: unknown subcommand {sub!r}")
        rest = _strip_config(argv[1:])
        return [sub] + _config_flags(values, rest) + rest
    values.pop("subcommand", None)
    return [sub] + _config_flags(values, argv[1:]) + argv[1:]


def _strip_config(args: list[str]) -> list[str]:
    out, skip = [], False
    for a in args:
        if skip:
            skip = False
            continue
        if a == "--config":
            skip = True
            continue
        out.append(a)
    return out


def _config_flags(values: dict[str, str], explicit: list[str]) -> list[str]:
    given = {a.split("=", 1)[0] for a in explicit if a.startswith("--")}
    flags: list[str] = []
    coupling_given = given & {"--chi", "--gamma-r", "--gamma-l"}
    for key, value in values.items():
        flag = f"--{key}"
        if flag in given:
            continue
        if flag in ("--chi", "--gamma-r", "--gamma-l") and coupling_given:
            continue  # explicit coupling flags replace the file's entirely
        if flag == "--strict":
            if value.lower() in ("1", "true", "yes"):
                flags.append(flag)
            continue
        flags.extend([flag, value])
    return flags


def resolve_coupling(args: argparse.Namespace) -> CouplingConfig:
    if args.gamma_r is not None or args.gamma_l is not None:
        gr = args.gamma_r
        gl = args.gamma_l
        if gr is None and gl is not None:
            gr = 1.0 - gl
        if gl is None and gr is not None:
            gl = 1.0 - gr
        total = gr + gl
        if total <= 0:
            raise UsageError("--gamma-r/--gamma-l must have a positive total")
        try:
            return CouplingConfig(gamma_r=gr / total, gamma_l=gl / total, k0=args.k0)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    chi = 0.5 if args.chi is None else args.chi
    try:
        return CouplingConfig.from_chirality(chi, args.k0)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _base_metadata(rc: RunConfig) -> dict[str, str]:
    return {
        "tool": "biphoton",
        "version": TOOL_VERSION,
        "subcommand": rc.subcommand,
        "chi": f"{rc.cfg.chirality:.17g}",
        "gamma_r": f"{rc.cfg.gamma_r:.17g}",
        "gamma_l": f"{rc.cfg.gamma_l:.17g}",
        "k0": f"{rc.cfg.k0:.17g}",
        "tol_unit_circle": f"{rc.args.tol_unit_circle:.17g}",
    }


def _k_grid(rc: RunConfig, default: tuple[float, float, int]) -> tuple[np.ndarray, str]:
    spec = getattr(rc.args, "K_range", None)
    if spec is not None:
        lo, hi, n = _parse_span(spec, "K-range")
    else:
        lo, hi, n = default
    return np.linspace(lo, hi, n), f"{lo:.17g}:{hi:.17g}:{n}"


def _require_k(rc: RunConfig) -> float:
    if getattr(rc.args, "K", None) is None:
        raise UsageError(f"{rc.subcommand} needs --K")
    return rc.args.K


def _hole_or_raise(rc: RunConfig, exc: BiphotonError):
    if rc.args.strict:
        raise exc


def _cmd_single_dispersion(rc: RunConfig) -> ScanTable:
    grid, span = _k_grid(rc, (-math.pi, math.pi, 1001))
    table = ScanTable(metadata={**_base_metadata(rc), "k_range": span},
                      columns=[Column("k"), Column("omega")])
    for k in grid:
        try:
            table.rows.append((float(k), single_photon_energy(float(k), rc.cfg)))
        except PoleAtK as exc:
            _hole_or_raise(rc, exc)
            table.rows.append((float(k), None))
    return table


def _cmd_continuum(rc: RunConfig) -> ScanTable:
    grid, span = _k_grid(rc, (0.0, math.pi, 161))
    table = ScanTable(
        metadata={**_base_metadata(rc), "K_range": span,
                  "grid_size": str(rc.args.grid_size)},
        columns=[Column("K"), Column("branch_tag", "str"), Column("lower"),
                 Column("upper"), Column("lower_unbounded", "int"),
                 Column("upper_unbounded", "int")],
    )
    for k in grid:
        for iv in continuum_bands(float(k), rc.cfg, rc.args.grid_size):
            table.rows.append((
                float(k), iv.branch_tag,
                None if iv.lower_unbounded else iv.lower,
                None if iv.upper_unbounded else iv.upper,
                int(iv.lower_unbounded), int(iv.upper_unbounded),
            ))
    return table


def _default_gap_grid(rc: RunConfig, n: int = 200) -> tuple[float, float, int]:
    if rc.cfg.is_chiral:
        return 0.02, math.pi - 0.02, n
    region = gap_region(rc.cfg)
    margin = 0.025 * (region.k_upper - region.k_lower)
    return region.k_lower + margin, region.k_upper - margin, n


def _bound_state_at(rc: RunConfig, K: float, search: BoundSearch):
    if rc.cfg.is_chiral:
        return chiral_bound(K, rc.cfg)
    return find_bound_state(K, rc.cfg, search)


def _cmd_bound_dispersion(rc: RunConfig) -> ScanTable:
    grid, span = _k_grid(rc, _default_gap_grid(rc))
    search = BoundSearch(grid_size=rc.args.grid_size)
    table = bound_dispersion(rc.cfg, grid, search)
    table.metadata = {**_base_metadata(rc), "K_range": span,
                      "grid_size": str(rc.args.grid_size)}
    return table


def _cmd_state_profile(rc: RunConfig) -> ScanTable:
    K = _require_k(rc)
    bs = _bound_state_at(rc, K, BoundSearch(grid_size=rc.args.grid_size))
    psi = bound_wavefunction(bs, rc.args.delta_max)
    table = ScanTable(
        metadata={**_base_metadata(rc), "K": f"{K:.17g}",
                  "omega": f"{bs.energy:.17g}", "delta_max": str(rc.args.delta_max)},
        columns=[Column("delta", "int"), Column("amplitude")],
    )
    for d, a in enumerate(psi, start=1):
        table.rows.append((d, float(a)))
    return table


def _cmd_z_magnitudes(rc: RunConfig) -> ScanTable:
    grid, span = _k_grid(rc, _default_gap_grid(rc))
    search = BoundSearch(grid_size=rc.args.grid_size)
    table = ScanTable(
        metadata={**_base_metadata(rc), "K_range": span},
        columns=[Column("K"), Column("z1"), Column("z2"),
                 Column("abs_z1"), Column("abs_z2")],
    )
    for k in sorted(float(v) for v in grid):
        try:
            bs = _bound_state_at(rc, k, search)
        except (NoBoundState, NotInGap) as exc:
            _hole_or_raise(rc, exc)
            table.rows.append((k, None, None, None, None))
            continue
        table.rows.append((k, bs.z1.real, bs.z2.real, abs(bs.z1), abs(bs.z2)))
    return table


def _cmd_resonance_scan(rc: RunConfig) -> ScanTable:
    K = _require_k(rc)
    if rc.args.omega_range is not None:
        lo, hi, n = _parse_span(rc.args.omega_range, "omega-range")
    else:
        lo, hi = sorted(unit_edge_energies(K, rc.cfg))
        pad = 1e-9 * max(1.0, abs(lo), abs(hi))
        lo, hi, n = lo + pad, hi - pad, rc.args.points
    profile = resonance_scan(K, lo, hi, n, rc.cfg)
    table = ScanTable(
        metadata={**_base_metadata(rc), "K": f"{K:.17g}",
                  "omega_range": f"{lo:.17g}:{hi:.17g}:{n}"},
        columns=[Column("omega"), Column("c_squared"), Column("phi_unwrapped"),
                 Column("z_b"), Column("q")],
    )
    for i in range(len(profile.omega_grid)):
        row = [float(profile.omega_grid[i])]
        for arr in (profile.c_squared, profile.phi_unwrapped,
                    profile.z_b_magnitude, profile.q):
            v = float(arr[i])
            row.append(None if math.isnan(v) else v)
        table.rows.append(tuple(row))
    return table


def _cmd_branches(rc: RunConfig) -> ScanTable:
    grid, span = _k_grid(rc, (0.05, math.pi - 0.05, 40))
    table = resonance_branches(rc.cfg, grid, points=rc.args.points,
                               jump_tol=rc.args.jump_tol)
    table.metadata = {**_base_metadata(rc), "K_range": span,
                      "points": str(rc.args.points),
                      "jump_tol": f"{rc.args.jump_tol:.17g}"}
    return table


def _cmd_width_vs_k(rc: RunConfig) -> ScanTable:
    grid, span = _k_grid(rc, (0.02, 0.10, 5))
    table = ScanTable(
        metadata={**_base_metadata(rc), "K_range": span, "points": str(rc.args.points)},
        columns=[Column("K"), Column("omega_peak"), Column("fwhm"),
                 Column("quality", "str")],
    )
    target = 2.0 / math.tan(rc.cfg.k0)
    for k in sorted(float(v) for v in grid):
        try:
            report, _ = track_branch_peak(k, target, rc.cfg, points=rc.args.points)
        except (EmptyRange, NoConvergence) as exc:
            _hole_or_raise(rc, exc)
            table.rows.append((k, None, None, "Hole"))
            continue
        table.rows.append((k, report.omega_peak,
                           None if math.isnan(report.fwhm) else report.fwhm,
                           report.quality))
        if report.quality != "NoPeak":
            target = report.omega_peak
    return table


def _cmd_roots(rc: RunConfig) -> ScanTable:
    K = _require_k(rc)
    if rc.args.omega is not None:
        omegas = [rc.args.omega]
        span = f"{rc.args.omega:.17g}"
    elif rc.args.omega_range is not None:
        lo, hi, n = _parse_span(rc.args.omega_range, "omega-range")
        omegas = list(np.linspace(lo, hi, n))
        span = f"{lo:.17g}:{hi:.17g}:{n}"
    else:
        raise UsageError("roots needs --omega or --omega-range")
    table = ScanTable(
        metadata={**_base_metadata(rc), "K": f"{K:.17g}", "omega": span},
        columns=[Column("omega"), Column("index", "int"), Column("re"),
                 Column("im"), Column("magnitude"), Column("partner", "int"),
                 Column("kind", "str")],
    )
    for w in omegas:
        try:
            rs = solve_reciprocal_quartic(K, float(w), rc.cfg)
        except (DegenerateOmega, NoConvergence) as exc:
            _hole_or_raise(rc, exc)
            table.rows.append((float(w), 0, None, None, None, -1, type(exc).__name__))
            continue
        kind = classify_roots(rs, rc.args.tol_unit_circle).kind
        partner = {}
        for i, j in rs.pairing:
            partner[i], partner[j] = j, i
        for i, z in enumerate(rs.roots):
            table.rows.append((float(w), i, z.real, z.imag, abs(z), partner[i], kind))
    return table


def _cmd_validate(rc: RunConfig) -> ScanTable:
    if rc.args.K is not None:
        grid = [rc.args.K]
        span = f"{rc.args.K:.17g}"
    else:
        kg, span = _k_grid(rc, _default_gap_grid(rc, 20))
        grid = [float(v) for v in kg]
    n = rc.args.lattice_n
    window = (1, max(4, n // 4))
    table = ScanTable(
        metadata={**_base_metadata(rc), "K_range": span, "lattice_n": str(n),
                  "window": f"{window[0]}:{window[1]}"},
        columns=[Column("K"), Column("omega"), Column("interior_max"),
                 Column("boundary_max")],
    )
    search = BoundSearch(grid_size=rc.args.grid_size)
    for k in sorted(grid):
        try:
            bs = _bound_state_at(rc, k, search)
            rep = eigenstate_residual(bs, rc.cfg, N=n, window=window)
        except BiphotonError as exc:
            _hole_or_raise(rc, exc)
            table.rows.append((k, None, None, None))
            continue
        table.rows.append((k, bs.energy, rep.interior_max, rep.boundary_max))
    return table


def _cmd_dos(rc: RunConfig) -> ScanTable:
    K = _require_k(rc)
    energy_range = None
    if rc.args.omega_range is not None:
        lo, hi, _ = _parse_span(rc.args.omega_range, "omega-range")
        energy_range = (lo, hi)
    hist = pair_density_of_states(K, rc.cfg, grid_size=rc.args.grid_size,
                                  bins=rc.args.bins, energy_range=energy_range)
    table = ScanTable(
        metadata={**_base_metadata(rc), "K": f"{K:.17g}", "bins": str(rc.args.bins),
                  "grid_size": str(rc.args.grid_size)},
        columns=[Column("bin_lo"), Column("bin_hi"), Column("mass")],
    )
    for i in range(len(hist.counts)):
        table.rows.append((float(hist.bin_edges[i]), float(hist.bin_edges[i + 1]),
                           float(hist.counts[i])))
    return table


_HANDLERS = {
    "single-dispersion": _cmd_single_dispersion,
    "continuum": _cmd_continuum,
    "bound-dispersion": _cmd_bound_dispersion,
    "state-profile": _cmd_state_profile,
    "z-magnitudes": _cmd_z_magnitudes,
    "resonance-scan": _cmd_resonance_scan,
    "branches": _cmd_branches,
    "width-vs-K": _cmd_width_vs_k,
    "roots": _cmd_roots,
    "validate": _cmd_validate,
    "dos": _cmd_dos,
}


def _absorb_negative_values(argv: list[str]) -> list[str]:
    """Join '--flag -3:3:41' into '--flag=-3:3:41' so argparse keeps the value."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if (tok.startswith("--") and "=" not in tok and nxt is not None
                and len(nxt) > 1 and nxt[0] == "-" and (nxt[1].isdigit() or nxt[1] == ".")):
            out.append(f"{tok}={nxt}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        if argv and not argv[0].startswith("-"):
            argv = _merge_config_argv(argv)
        args = parser.parse_args(_absorb_negative_values(argv))
        rc = RunConfig(subcommand=args.subcommand, cfg=resolve_coupling(args), args=args)
        quartic.UNIT_CIRCLE_TOL = args.tol_unit_circle
        table = _HANDLERS[rc.subcommand](rc)
        emit_table(table, args.format, args.out)
        if args.plot:
            from . import plotting

            plotting.save_figure(rc.subcommand, table, args.plot)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IoFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except BiphotonError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
