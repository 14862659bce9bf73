"""Command-line entry point: ``vpbounds <subcommand> [options]``.

Every run writes its outputs, the fully resolved configuration
(``<out>.config.ini``) and a JSON manifest (``<out>.manifest.json``) with
input hashes, package versions and timings. Exit status is 0 on success,
1 on a usage error and 2 on a data error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import sys
from dataclasses import asdict
from itertools import product
from pathlib import Path
from typing import Any, Callable, NamedTuple, Sequence

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from vpbounds.boundary import (
    CitySearch,
    FuzzSpec,
    boundary_from_model,
    city_boundary,
    city_profile,
    compare_boundaries,
    crop_box,
    fuzz_boundary,
    load_boundary_geojson,
    region_boundaries,
    write_boundary_geojson,
    write_fuzz_outputs,
    write_labels_csv,
)
from vpbounds.core.config import resolve_threads, settings
from vpbounds.core.errors import DataError, UsageError, VpBoundsError
from vpbounds.core.logging import configure_logging
from vpbounds.core.manifest import Stopwatch, build_run_manifest, write_run_manifest
from vpbounds.fit import fit_piecewise, fit_report, mask_artifacts, read_fit_json, rss_sweep
from vpbounds.fit.report import write_fit_json
from vpbounds.grid import (
    GridSpec,
    load_csv,
    load_geojson,
    rasterize_points,
    rasterize_polygons,
    read_grid,
    write_grid,
)
from vpbounds.grid.geodesy import km_to_deg_lat, km_to_deg_lon
from vpbounds.model import model_from_fit, read_model_json, threshold_density, write_model_json
from vpbounds.solver import (
    SearchConstraint,
    default_fractions,
    read_profile_csv,
    vp_circle,
    vp_profile,
    write_circles_csv,
    write_profile_csv,
)
from vpbounds.synth import (
    Disc,
    DiscCitySpec,
    RingCitySpec,
    generate_disc_city,
    generate_ring_city,
    two_disc_spec,
)

logger = logging.getLogger(__name__)

SUBCOMMANDS = (
    "rasterize",
    "circle",
    "profile",
    "fit",
    "model",
    "boundary",
    "region",
    "synth",
    "fuzz",
    "compare",
)

# argparse destinations that describe the invocation rather than the run
_META_KEYS = {"config", "subcommand", "seed", "threads", "log_level"}


# ---------------------------------------------------------------------------
# Resolved configuration
# ---------------------------------------------------------------------------


class RunConfig(BaseModel):
    """Fully resolved parameters of one invocation."""

    model_config = ConfigDict(extra="forbid")

    subcommand: str
    seed: int = 0
    threads: int = Field(default=1, ge=1)
    params: dict[str, Any] = Field(default_factory=dict)

    def to_ini(self, path: str | Path) -> None:
        parser = configparser.ConfigParser(interpolation=None)
        section = {
            "subcommand": self.subcommand,
            "seed": str(self.seed),
            "threads": str(self.threads),
        }
        section.update({k: json.dumps(v) for k, v in sorted(self.params.items())})
        parser["vpbounds"] = section
        with open(path, "w") as fh:
            parser.write(fh)

    @classmethod
    def from_ini(cls, path: str | Path) -> RunConfig:
        parser = configparser.ConfigParser(interpolation=None)
        if not parser.read(path):
            raise UsageError(f"config file not found: {path}")
        if "vpbounds" not in parser:
            raise UsageError(f"config file {path} has no [vpbounds] section")
        raw = dict(parser["vpbounds"])
        try:
            params = {
                k: json.loads(v)
                for k, v in raw.items()
                if k not in ("subcommand", "seed", "threads")
            }
            return cls(
                subcommand=raw.get("subcommand", ""),
                seed=int(raw.get("seed", settings.seed)),
                threads=int(raw.get("threads", settings.threads)),
                params=params,
            )
        except (ValueError, json.JSONDecodeError) as exc:
            raise UsageError(f"config file {path}: {exc}") from None


class Outcome(NamedTuple):
    outputs: list[Path]
    inputs: list[Path]


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


def _center_arg(p: argparse.ArgumentParser, help_text: str = "approximate center") -> None:
    p.add_argument("--center", nargs=2, type=float, metavar=("LAT", "LON"), help=help_text)


def _city_args(p: argparse.ArgumentParser) -> None:
    _center_arg(p)
    p.add_argument("--box-side-km", type=float, default=30.0)
    p.add_argument("--search-radius-km", type=float, default=5.0)
    p.add_argument("--breakpoints", type=int, default=2)
    p.add_argument("--connectivity", type=int, choices=(4, 8), default=4)
    p.add_argument("--side", choices=("inner", "outer"), default="inner")
    p.add_argument("--mask-min-cells", type=int, default=None)
    p.add_argument("--n-fractions", type=int, default=None)
    p.add_argument("--restarts", type=int, default=None)


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="INI file written by a previous run")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument(
        "--threads", type=int, default=None, help="worker cap (env VPBOUNDS_THREADS)"
    )
    common.add_argument("--log-level", default=None)
    common.add_argument("--out", help="output path")

    parser = _Parser(prog="vpbounds", description="Valeriepieris-circle city and region boundaries")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    subs: dict[str, argparse.ArgumentParser] = {}

    p = subs["rasterize"] = sub.add_parser(
        "rasterize", parents=[common], help="polygons or points to a grid"
    )
    p.add_argument("--input")
    p.add_argument("--value-field", default=None)
    p.add_argument("--cell-size", type=float, default=None)
    p.add_argument(
        "--bbox", nargs=4, type=float, metavar=("LAT_MIN", "LON_MIN", "LAT_MAX", "LON_MAX")
    )
    p.add_argument("--format", choices=("binary", "csv"), default="binary")

    p = subs["circle"] = sub.add_parser("circle", parents=[common], help="one VP circle")
    p.add_argument("--grid")
    p.add_argument("--f", type=float)
    _center_arg(p, "center of the admissible region")
    p.add_argument("--max-distance-km", type=float, default=None)
    p.add_argument("--min-cell-mass", type=float, default=0.0)
    p.add_argument("--coarse-factor", type=int, default=1)

    p = subs["profile"] = sub.add_parser("profile", parents=[common], help="VP radius vs fraction")
    p.add_argument("--grid")
    _center_arg(p, "center of the admissible region")
    p.add_argument("--search-radius-km", type=float, default=None)
    p.add_argument("--box-side-km", type=float, default=None, help="crop a city box first")
    p.add_argument("--n-fractions", type=int, default=None)
    p.add_argument("--coarse-factor", type=int, default=1)

    p = subs["fit"] = sub.add_parser("fit", parents=[common], help="piecewise-linear log-log fit")
    p.add_argument("--profile")
    p.add_argument("--breakpoints", type=int, default=2)
    p.add_argument("--mask-min-cells", type=int, default=None)
    p.add_argument("--mask-low-f", type=float, default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--sweep", type=int, default=None, help="also print RSS for 0..N breakpoints")

    p = subs["model"] = sub.add_parser("model", parents=[common], help="ring density model")
    p.add_argument("--fit")
    p.add_argument("--profile", help="profile CSV whose sidecar carries the total mass")
    p.add_argument("--total-mass", type=float, default=None)
    p.add_argument("--ring", type=int, default=None)
    p.add_argument("--side", choices=("inner", "outer"), default="inner")

    p = subs["boundary"] = sub.add_parser("boundary", parents=[common], help="city boundary")
    p.add_argument("--grid")
    p.add_argument("--model", help="threshold with this model instead of fitting one")
    _city_args(p)
    p.add_argument("--format", choices=("geojson", "csv"), default="geojson")

    p = subs["region"] = sub.add_parser("region", parents=[common], help="regional VP circles")
    p.add_argument("--grid")
    p.add_argument("--breakpoints", type=int, default=4)
    p.add_argument("--mask-min-cells", type=int, default=None)
    p.add_argument("--n-fractions", type=int, default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--coarse-factor", type=int, default=1)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = subs["synth"] = sub.add_parser("synth", parents=[common], help="synthetic city grid")
    p.add_argument("--kind", choices=("ring", "disc", "two-disc"), default="ring")
    _center_arg(p, "city center")
    p.add_argument("--extent-km", type=float, default=None, help="half-width of the grid")
    p.add_argument("--cell-size", type=float, default=None)
    p.add_argument("--rings", default=None, help="OUTER_KM:EXPONENT,... from the center out")
    p.add_argument("--total-mass", type=float, default=1.0e6)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--density-form", choices=("continuous", "profile"), default="continuous")
    p.add_argument("--radius-km", type=float, default=8.0)
    p.add_argument("--density", type=float, default=10000.0)
    p.add_argument("--plain-density", type=float, default=200.0)
    p.add_argument("--rim-width-km", type=float, default=0.0)
    p.add_argument("--rim-density", type=float, default=0.0)
    p.add_argument("--gap-km", type=float, default=6.0)
    p.add_argument("--format", choices=("binary", "csv"), default="binary")

    p = subs["fuzz"] = sub.add_parser(
        "fuzz", parents=[common], help="boundary perturbation analysis"
    )
    p.add_argument("--grid")
    _city_args(p)
    p.add_argument("--offset-deg", type=float, default=0.01)
    p.add_argument("--radii", nargs="+", type=float, default=[2.0, 5.0, 8.0])
    p.add_argument("--boxes", nargs="+", type=float, default=[40.0, 50.0, 60.0])

    p = subs["compare"] = sub.add_parser(
        "compare", parents=[common], help="overlap of two boundaries"
    )
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--grid", help="grid whose cells measure the overlap")
    return parser, subs


# ---------------------------------------------------------------------------
# Handlers
# ---------------------------------------------------------------------------


def _need(args: argparse.Namespace, *names: str) -> None:
    for name in names:
        if getattr(args, name, None) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required for {args.subcommand}")


# dest -> (bound, bound allowed)
_RANGES: dict[str, tuple[float, bool]] = {
    "breakpoints": (0, True),
    "sweep": (0, True),
    "restarts": (1, True),
    "n_fractions": (1, True),
    "mask_min_cells": (0, True),
    "coarse_factor": (1, True),
    "threads": (1, True),
    "ring": (0, True),
    "min_cell_mass": (0, True),
    "noise": (0, True),
    "offset_deg": (0, True),
    "box_side_km": (0, False),
    "search_radius_km": (0, False),
    "max_distance_km": (0, False),
    "cell_size": (0, False),
    "extent_km": (0, False),
    "radius_km": (0, False),
    "rim_width_km": (0, True),
    "rim_density": (0, True),
    "plain_density": (0, True),
    "density": (0, False),
    "total_mass": (0, False),
    "radii": (0, False),
    "boxes": (0, False),
}


def _check_ranges(args: argparse.Namespace) -> None:
    for name, (bound, closed) in _RANGES.items():
        value = getattr(args, name, None)
        if value is None:
            continue
        for v in value if isinstance(value, list) else [value]:
            if v < bound or (v == bound and not closed):
                op = ">=" if closed else ">"
                flag = name.replace("_", "-")
                raise UsageError(f"--{flag} must be {op} {bound:g}, got {v:g}")


def _tuple(value) -> tuple[float, float] | None:
    return None if value is None else (float(value[0]), float(value[1]))


def _sibling(out: Path, suffix: str) -> Path:
    return out.with_name(out.name + suffix)


def _city_search(args: argparse.Namespace) -> CitySearch:
    _need(args, "center")
    return CitySearch(
        approx_center=_tuple(args.center),
        box_side_km=args.box_side_km,
        search_radius_km=args.search_radius_km,
        n_breakpoints=args.breakpoints,
        connectivity=args.connectivity,
        side=args.side,
        mask_min_cells=args.mask_min_cells,
        n_fractions=args.n_fractions,
    )


def _rasterize(args, cfg: RunConfig, sw: Stopwatch) -> Outcome:
    _need(args, "input", "out")
    cell = args.cell_size or settings.cell_size_deg
    src = Path(args.input)
    with sw.time("load"):
        if src.suffix.lower() == ".csv":
            points = load_csv(src, args.value_field or "weight")
            lats = [p[0] for p in points]
            lons = [p[1] for p in points]
        else:
            if not args.value_field:
                raise UsageError("--value-field is required for GeoJSON input")
            polygons = load_geojson(src, args.value_field)
            lats = [lat for poly in polygons for lat, _ in poly.exterior]
            lons = [lon for poly in polygons for _, lon in poly.exterior]
    if args.bbox:
        lat_min, lon_min, lat_max, lon_max = args.bbox
    elif lats:
        # half a cell of padding keeps points on the max edge inside
        lat_min, lon_min = min(lats), min(lons)
        lat_max, lon_max = max(lats) + cell / 2, max(lons) + cell / 2
    else:
        raise DataError(f"{src} holds no features")
    spec = GridSpec.covering(lat_min, lon_min, lat_max, lon_max, cell)
    with sw.time("rasterize"):
        if src.suffix.lower() == ".csv":
            grid = rasterize_points(points, spec)
        else:
            grid = rasterize_polygons(polygons, spec, threads=cfg.threads)
    write_grid(args.out, grid, args.format)
    logger.info("grid %dx%d, total mass %.6g", spec.n_rows, spec.n_cols, grid.total_mass)
    return Outcome([Path(args.out)], [src])


def _circle(args, cfg: RunConfig, sw: Stopwatch) -> Outcome:
    _need(args, "grid", "f", "out")
    grid = read_grid(args.grid)
    constraint = SearchConstraint(
        center=_tuple(args.center),
        max_distance_km=args.max_distance_km,
        min_cell_mass=args.min_cell_mass,
    )
    with sw.time("solve"):
        circle = vp_circle(
            grid, args.f, constraint, threads=cfg.threads, coarse_factor=args.coarse_factor
        )
    write_circles_csv(args.out, [circle])
    return Outcome([Path(args.out)], [Path(args.grid)])


def _profile(args, cfg: RunConfig, sw: Stopwatch) -> Outcome:
    _need(args, "grid", "out")
    grid = read_grid(args.grid)
    with sw.time("solve"):
        if args.box_side_km is not None:
            _need(args, "center", "search_radius_km")
            search = CitySearch(
                approx_center=_tuple(args.center),
                box_side_km=args.box_side_km,
                search_radius_km=args.search_radius_km,
                n_fractions=args.n_fractions,
            )
            _, _, profile = city_profile(grid, search, threads=cfg.threads)
        else:
            constraint = SearchConstraint(
                center=_tuple(args.center), max_distance_km=args.search_radius_km
            )
            profile = vp_profile(
                grid,
                default_fractions(grid, args.n_fractions),
                constraint,
                threads=cfg.threads,
                coarse_factor=args.coarse_factor,
            )
    write_profile_csv(args.out, profile)
    out = Path(args.out)
    return Outcome([out, _sibling(out, ".meta.json")], [Path(args.grid)])


def _fit(args, cfg: RunConfig, sw: Stopwatch) -> Outcome:
    _need(args, "profile", "out")
    profile = mask_artifacts(read_profile_csv(args.profile), args.mask_min_cells)
    options = dict(seed=cfg.seed, restarts=args.restarts, threads=cfg.threads)
    if args.sweep is not None:
        with sw.time("sweep"):
            fits = rss_sweep(profile, args.sweep, args.mask_low_f, **options)
        print("breakpoints\trss")
        for fit in fits:
            print(f"{fit.n_breakpoints}\t{fit.rss:.9g}")
    with sw.time("fit"):
        fit = fit_piecewise(profile, args.breakpoints, args.mask_low_f, **options)
    write_fit_json(args.out, fit)
    return Outcome([Path(args.out)], [Path(args.profile)])


def _model(args, cfg: RunConfig, sw: Stopwatch) -> Outcome:
    _need(args, "fit", "out")
    fit = read_fit_json(args.fit)
    inputs = [Path(args.fit)]
    if args.total_mass is not None:
        total = args.total_mass
    elif args.profile is not None:
        total = read_profile_csv(args.profile).total_mass
        inputs.append(Path(args.profile))
    else:
        raise UsageError("model needs --profile (for its total mass) or --total-mass")
    model = model_from_fit(fit, total_mass=total)
    write_model_json(args.out, model, args.ring, args.side)
    logger.info("threshold rho0 = %.6g per km2", threshold_density(model, args.ring, args.side))
    return Outcome([Path(args.out)], inputs)


def _write_boundary(out: Path, bset, fmt: str) -> None:
    if fmt == "csv":
        write_labels_csv(out, bset)
    else:
        write_boundary_geojson(out, bset)


def _boundary(args, cfg: RunConfig, sw: Stopwatch) -> Outcome:
    _need(args, "grid", "out")
    grid = read_grid(args.grid)
    search = _city_search(args)
    out = Path(args.out)
    outputs = [out]
    inputs = [Path(args.grid)]
    with sw.time("boundary"):
        if args.model:
            model = read_model_json(args.model)
            inputs.append(Path(args.model))
            box, origin = crop_box(grid, search.approx_center, search.box_side_km)
            bset = boundary_from_model(box, model, search, origin)
        else:
            result = city_boundary(
                grid, search, seed=cfg.seed, restarts=args.restarts, threads=cfg.threads
            )
            bset = result.boundaries
            write_profile_csv(_sibling(out, ".profile.csv"), result.profile)
            write_fit_json(_sibling(out, ".fit.json"), result.fit)
            write_model_json(_sibling(out, ".model.json"), result.model, side=search.side)
            outputs += [
                _sibling(out, ".profile.csv"),
                _sibling(out, ".fit.json"),
                _sibling(out, ".model.json"),
            ]
    _write_boundary(out, bset, args.format)
    logger.info(
        "threshold %.6g per km2, %d clusters, principal %s",
        bset.threshold_density,
        len(bset),
        bset.principal_label,
    )
    return Outcome(outputs, inputs)


def _region(args, cfg: RunConfig, sw: Stopwatch) -> Outcome:
    _need(args, "grid", "out")
    grid = read_grid(args.grid)
    with sw.time("region"):
        result = region_boundaries(
            grid,
            args.breakpoints,
            mask_min_cells=args.mask_min_cells,
            n_fractions=args.n_fractions,
            seed=cfg.seed,
            restarts=args.restarts,
            threads=cfg.threads,
            coarse_factor=args.coarse_factor,
        )
    out = Path(args.out)
    if args.format == "csv":
        write_circles_csv(out, result.circles)
    else:
        doc = {
            "fit": fit_report(result.fit) if result.fit is not None else None,
            "circles": [asdict(c) for c in result.circles],
        }
        out.write_text(json.dumps(doc, indent=2) + "\n")
    write_profile_csv(_sibling(out, ".profile.csv"), result.profile)
    return Outcome([out, _sibling(out, ".profile.csv")], [Path(args.grid)])


def _parse_rings(text: str) -> tuple[tuple[float, float], ...]:
    try:
        pairs = [item.split(":") for item in text.split(",") if item.strip()]
        return tuple((float(r), float(a)) for r, a in pairs)
    except ValueError:
        raise UsageError(f"--rings expects OUTER_KM:EXPONENT,...; got {text!r}") from None


def _synth(args, cfg: RunConfig, sw: Stopwatch) -> Outcome:
    _need(args, "center", "out")
    center = _tuple(args.center)
    cell = args.cell_size or settings.cell_size_deg
    if args.kind == "ring":
        _need(args, "rings")
        rings = _parse_rings(args.rings)
        reach = args.extent_km or 1.25 * rings[-1][0]
    elif args.kind == "disc":
        reach = args.extent_km or 2.0 * args.radius_km
    else:
        reach = args.extent_km or 4.0 * args.radius_km + args.gap_km
    dlat = km_to_deg_lat(reach)
    dlon = km_to_deg_lon(reach, center[0])
    spec = GridSpec.covering(
        center[0] - dlat, center[1] - dlon, center[0] + dlat, center[1] + dlon, cell
    )
    with sw.time("generate"):
        if args.kind == "ring":
            city = RingCitySpec(
                center=center,
                rings=rings,
                total_mass=args.total_mass,
                grid=spec,
                noise_sigma=args.noise,
                density_form=args.density_form,
            )
            grid = generate_ring_city(city, seed=cfg.seed)
        elif args.kind == "disc":
            disc = Disc(
                center=center,
                radius_km=args.radius_km,
                density=args.density,
                rim_width_km=args.rim_width_km,
                rim_density=args.rim_density,
            )
            grid = generate_disc_city(
                DiscCitySpec(grid=spec, discs=(disc,), plain_density=args.plain_density)
            )
        else:
            grid = generate_disc_city(
                two_disc_spec(
                    spec, center, args.radius_km, args.gap_km, args.density, args.plain_density
                )
            )
    write_grid(args.out, grid, args.format)
    return Outcome([Path(args.out)], [])


def _fuzz(args, cfg: RunConfig, sw: Stopwatch) -> Outcome:
    _need(args, "grid", "out")
    grid = read_grid(args.grid)
    search = _city_search(args)
    d = args.offset_deg
    steps = (-d, 0.0, d) if d > 0 else (0.0,)
    perturbations = FuzzSpec(
        center_offsets_deg=tuple(product(steps, steps)),
        search_radii_km=tuple(args.radii),
        box_sides_km=tuple(args.boxes),
    )
    with sw.time("fuzz"):
        result = fuzz_boundary(
            grid, search, perturbations, seed=cfg.seed, restarts=args.restarts, threads=cfg.threads
        )
    outputs = write_fuzz_outputs(args.out, grid, result)
    runs = [
        {
            "center": list(r.center),
            "search_radius_km": r.search_radius_km,
            "box_side_km": r.box_side_km,
            "ok": r.ok,
            "error": r.error,
            "threshold": r.boundaries.threshold_density if r.ok else None,
        }
        for r in result.runs
    ]
    summary = Path(args.out) / "runs.json"
    summary.write_text(json.dumps(runs, indent=2) + "\n")
    return Outcome([Path(args.out) / "inclusion.csv", summary, *outputs[1:]], [Path(args.grid)])


def _compare(args, cfg: RunConfig, sw: Stopwatch) -> Outcome:
    _need(args, "a", "b", "grid", "out")
    grid = read_grid(args.grid)
    report = compare_boundaries(
        load_boundary_geojson(args.a), load_boundary_geojson(args.b), grid.spec
    )
    Path(args.out).write_text(json.dumps(asdict(report), indent=2) + "\n")
    logger.info("jaccard %.4f", report.jaccard)
    return Outcome([Path(args.out)], [Path(args.a), Path(args.b), Path(args.grid)])


HANDLERS: dict[str, Callable[[argparse.Namespace, RunConfig, Stopwatch], Outcome]] = {
    "rasterize": _rasterize,
    "circle": _circle,
    "profile": _profile,
    "fit": _fit,
    "model": _model,
    "boundary": _boundary,
    "region": _region,
    "synth": _synth,
    "fuzz": _fuzz,
    "compare": _compare,
}


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------


def _parse(argv: Sequence[str] | None) -> argparse.Namespace:
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        cfg = RunConfig.from_ini(args.config)
        if cfg.subcommand and cfg.subcommand != args.subcommand:
            raise UsageError(
                f"config file is for {cfg.subcommand!r}, not {args.subcommand!r}"
            )
        known = {a.dest for a in subs[args.subcommand]._actions}
        unknown = sorted(set(cfg.params) - known)
        if unknown:
            raise UsageError(f"config file sets unknown options: {', '.join(unknown)}")
        # flags given on the command line still win over the file
        subs[args.subcommand].set_defaults(seed=cfg.seed, threads=cfg.threads, **cfg.params)
        args = parser.parse_args(argv)
    return args


def _artifact_base(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    return out / "run" if out.is_dir() else out


def run(argv: Sequence[str] | None = None) -> int:
    """Run one subcommand; returns the process exit status."""
    try:
        args = _parse(argv)
        _check_ranges(args)
        configure_logging(args.log_level or settings.log_level)
        cfg = RunConfig(
            subcommand=args.subcommand,
            seed=settings.seed if args.seed is None else args.seed,
            threads=resolve_threads(args.threads),
            params={k: v for k, v in vars(args).items() if k not in _META_KEYS},
        )
        sw = Stopwatch()
        outcome = HANDLERS[args.subcommand](args, cfg, sw)
        base = _artifact_base(args)
        cfg.to_ini(_sibling(base, ".config.ini"))
        manifest = build_run_manifest(
            subcommand=args.subcommand,
            config=cfg.model_dump(mode="json"),
            inputs=outcome.inputs,
            outputs=outcome.outputs,
            timings=sw.timings,
        )
        write_run_manifest(_sibling(base, ".manifest.json"), manifest)
    except (UsageError, ValidationError) as exc:
        logger.error("usage error: %s", exc)
        return 1
    except VpBoundsError as exc:
        logger.error("data error: %s", exc)
        return 2
    return 0


def main() -> None:
    """Entry point for ``python -m vpbounds`` and the ``vpbounds`` console script."""
    sys.exit(run())


if __name__ == "__main__":
    main()
