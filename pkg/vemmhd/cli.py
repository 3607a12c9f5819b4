from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, FrozenSet, List, Optional, Tuple

from rich.console import Console
from rich.logging import RichHandler

from vemmhd.errors import ConfigError, InconsistentBC, MeshError, NoConvergence, NumericalError, VemError
from vemmhd.settings import FAMILIES, LOG_LEVELS, RunConfig, build_run_config

logger = logging.getLogger("vemmhd")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NO_CONVERGENCE = 2
EXIT_NUMERICAL = 3


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with code 1 and the one-line error format."""

    def error(self, message: str) -> None:  # type: ignore[override]
        print(f"ERROR[usage]: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def configure_logging(level: str) -> None:
    root = logging.getLogger()
    for h in list(root.handlers):
        if isinstance(h, RichHandler):
            root.removeHandler(h)
    root.addHandler(RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=False))
    root.setLevel(level)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="YAML file with RunConfig fields (flags override it)")
    p.add_argument("--log-level", dest="log_level", choices=LOG_LEVELS, help="Default from VEMMHD_LOG_LEVEL")
    p.add_argument("--k", type=int, help="Polynomial degree (>= 1)")
    p.add_argument("--Rnu", dest="r_nu", type=float, help="Hydrodynamic Reynolds number")
    p.add_argument("--Rm", dest="r_m", type=float, help="Magnetic Reynolds number")
    p.add_argument("--Sc", dest="s_c", type=float, help="Coupling coefficient")
    p.add_argument("--tol", type=float, help="Oseen tolerance (default 1e-7)")
    p.add_argument("--max-iter", dest="max_iter", type=int, help="Oseen iteration cap (default 100)")
    p.add_argument("--seed", type=int, help="Seed for randomized mesh families")
    p.add_argument("--threads", type=int, help="Workers for per-element builds (default 1)")
    p.add_argument("--out", type=Path, help="Output CSV path")


def _mesh_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=FAMILIES, help="Mesh family")
    p.add_argument("--levels", type=int, help="Number of refinement levels")
    p.add_argument("--n0", type=int, help="Subdivisions of the coarsest level")
    p.add_argument("--mesh", type=Path, help="Mesh file (JSON) instead of a generated family")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vemmhd", description="Divergence-free virtual element solver for stationary MHD")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    # --- convergence ---
    conv = sub.add_parser("convergence", help="Manufactured-solution study over a mesh family")
    _common(conv)
    _mesh_args(conv)
    conv.add_argument("--preset", help="Convergence preset (example1_k1, example1_k2); flags override it")

    # --- hartmann ---
    hart = sub.add_parser("hartmann", help="Hartmann channel benchmark")
    _common(hart)
    _mesh_args(hart)
    hart.add_argument("--preset", help="Preset name (ha1, ha5); default runs both unless --Rnu/--Rm/--Sc are set")
    hart.add_argument("--G", dest="G", type=float, help="Pressure gradient (default 0.1)")

    # --- solve ---
    solve = sub.add_parser("solve", help="One manufactured-solution solve on a single mesh")
    _common(solve)
    _mesh_args(solve)

    # --- mesh-info ---
    info = sub.add_parser("mesh-info", help="Print mesh counts, size and quality")
    _common(info)
    _mesh_args(info)
    info.add_argument("--write-mesh", dest="write_mesh", type=Path, help="Also write the mesh as JSON")

    return parser


_FLAG_KEYS = (
    "k", "r_nu", "r_m", "s_c", "tol", "max_iter", "seed", "threads", "out",
    "family", "levels", "n0", "mesh", "preset", "G", "log_level",
)


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    flags: Dict[str, Any] = {key: getattr(args, key, None) for key in _FLAG_KEYS}
    return build_run_config(args.subcommand, flags, args.config)


# --- commands ---


def _load_or_generate(cfg: RunConfig, n: int):
    from vemmhd.mesh import gen_family, read_mesh

    if cfg.mesh is not None:
        return read_mesh(cfg.mesh)
    return gen_family(cfg.family, n, seed=cfg.seed)


_PARAM_FLAGS = ("r_nu", "r_m", "s_c")
_LEVEL_FLAGS = ("levels", "n0")


def _load_preset(name: str, kind: str):
    from vemmhd.presets import PresetRegistry

    preset = PresetRegistry().load(name)
    if preset.kind != kind:
        raise ConfigError(f"preset {name!r} is a {preset.kind} preset, not {kind}")
    return preset


def cmd_convergence(cfg: RunConfig, console: Console, given: FrozenSet[str] = frozenset()) -> int:
    from vemmhd.experiments import convergence_study, write_report
    from vemmhd.experiments.report import render_report
    from vemmhd.forms import ModelParams

    params = ModelParams(r_nu=cfg.r_nu, r_m=cfg.r_m, s_c=cfg.s_c)
    k, family, levels = cfg.k, cfg.family, cfg.subdivisions
    preset = _load_preset(cfg.preset, "convergence") if cfg.preset else None
    if preset is not None:
        if not given.intersection(_PARAM_FLAGS):
            params = preset.params
        k = cfg.k if "k" in given else preset.k
        family = cfg.family if "family" in given else preset.family
        levels = cfg.subdivisions if given.intersection(_LEVEL_FLAGS) else preset.levels

    report = convergence_study(family, levels, k, params, settings=cfg.settings, seed=cfg.seed)
    if cfg.out is not None:
        write_report(report, cfg.out)
    render_report(report, title=f"{family} k={k}", console=console)

    if preset is not None:
        problems = preset.expected.violations(report.final_rates())
        for msg in problems:
            logger.warning(f"preset {preset.name}: {msg}")
        console.print(f"rate check ({preset.name}): " + ("ok" if not problems else f"{len(problems)} outside bounds"))
    return EXIT_OK


def _hartmann_cases(cfg: RunConfig, given: FrozenSet[str]) -> List[Tuple[str, Any, List[int]]]:
    from vemmhd.experiments import HartmannCase
    from vemmhd.forms import ModelParams

    def runs(preset) -> Tuple[str, Any, List[int]]:
        G = cfg.G if "G" in given else preset.G
        levels = cfg.subdivisions if given.intersection(_LEVEL_FLAGS) else preset.levels
        return preset.name, HartmannCase(params=preset.params, G=G), levels

    if cfg.preset:
        return [runs(_load_preset(cfg.preset, "hartmann"))]
    if given.intersection(_PARAM_FLAGS):
        params = ModelParams(r_nu=cfg.r_nu, r_m=cfg.r_m, s_c=cfg.s_c)
        return [("custom", HartmannCase(params=params, G=cfg.G), cfg.subdivisions)]
    return [runs(_load_preset(name, "hartmann")) for name in ("ha1", "ha5")]


def cmd_hartmann(cfg: RunConfig, console: Console, given: FrozenSet[str] = frozenset()) -> int:
    from rich.table import Table

    from vemmhd.experiments import run_hartmann, write_profile

    cases = _hartmann_cases(cfg, given)
    table = Table(title=f"Hartmann channel, k={cfg.k}")
    for col in ("case", "Ha", "G", "n", "cells", "it", "u1 rel err", "b1 rel err"):
        table.add_column(col, justify="right")

    for name, case, levels in cases:
        result = None
        for n in levels:
            result = run_hartmann(case, n, cfg.k, settings=cfg.settings)
            table.add_row(
                name,
                f"{case.Ha:.3g}",
                f"{case.G:g}",
                str(n),
                str(result.errors.n_cells),
                str(result.state.iterations),
                f"{result.u_rel_error:.3e}",
                f"{result.b_rel_error:.3e}",
            )
        if cfg.out is not None and result is not None:
            out = cfg.out if len(cases) == 1 else cfg.out.with_name(f"{cfg.out.stem}_{name}{cfg.out.suffix}")
            write_profile(result.samples.tolist(), out)
    console.print(table)
    return EXIT_OK


def cmd_solve(cfg: RunConfig, console: Console) -> int:
    from vemmhd.events import asdict
    from vemmhd.experiments import ErrorReport, example1_case, solve_case, write_report
    from vemmhd.experiments.report import render_report
    from vemmhd.forms import ModelParams

    mesh = _load_or_generate(cfg, cfg.n0)
    case = example1_case(ModelParams(r_nu=cfg.r_nu, r_m=cfg.r_m, s_c=cfg.s_c))
    state, errors, _ = solve_case(
        mesh, cfg.k, case, cfg.settings, on_step=lambda ev: logger.debug(f"oseen step {asdict(ev)}")
    )
    report = ErrorReport(rows=[errors])
    if cfg.out is not None:
        write_report(report, cfg.out)
    render_report(report, title=f"solve k={cfg.k} cells={mesh.n_cells}", console=console)
    console.print("oseen increments: " + " ".join(f"{v:.3e}" for v in state.history))
    return EXIT_OK


def cmd_mesh_info(cfg: RunConfig, console: Console, write_mesh: Optional[Path] = None) -> int:
    from vemmhd.mesh import mesh_size, quality_report
    from vemmhd.mesh import write_mesh as _write

    mesh = _load_or_generate(cfg, cfg.n0)
    q = quality_report(mesh, cfg.settings.quality_threshold)
    print(f"cells={mesh.n_cells} h={mesh_size(mesh):.6f}")
    print(f"vertices={mesh.n_vertices} edges={mesh.n_edges} boundary_edges={len(mesh.boundary_edges)}")
    print(
        f"min_inradius_ratio={q.min_inradius_ratio:.6f} "
        f"min_vertex_distance_ratio={q.min_vertex_distance_ratio:.6f} flagged={len(q.flagged)}"
    )
    if write_mesh is not None:
        _write(mesh, write_mesh)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    console = Console()

    try:
        cfg = _config_from_args(args)
        configure_logging(cfg.settings.log_level)

        given = frozenset(key for key in _FLAG_KEYS if getattr(args, key, None) is not None)

        if args.subcommand == "convergence":
            return cmd_convergence(cfg, console, given)
        if args.subcommand == "hartmann":
            return cmd_hartmann(cfg, console, given)
        if args.subcommand == "solve":
            return cmd_solve(cfg, console)
        if args.subcommand == "mesh-info":
            return cmd_mesh_info(cfg, console, write_mesh=args.write_mesh)
    except NoConvergence as err:
        print(f"ERROR[{err.code}]: {err.message}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (ConfigError, MeshError, InconsistentBC) as err:
        print(f"ERROR[{err.code}]: {err.message}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as err:
        print(f"ERROR[{err.code}]: {err.message}", file=sys.stderr)
        return EXIT_NUMERICAL
    except VemError as err:
        print(f"ERROR[{err.code}]: {err.message}", file=sys.stderr)
        return EXIT_NUMERICAL

    parser.print_help()
    return EXIT_CONFIG
