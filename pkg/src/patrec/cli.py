"""Command-line pipeline: simulate | reconstruct | analyze | sweep.

Scenario files are flat INI-style key/value text with one section per
concern (chosen for human diffability in regression fixtures):

    [acquisition]
    c0 = 1500.0
    radius = 0.1
    sensors = 16
    record_t = 1.33e-4
    # dt optional: defaults to 0.5 pi / omega_max (2x Nyquist oversampling)
    # theta0 optional: rotates the whole array

    [source]
    shape = hann            ; hann | flat | gauss | mix
    omega_max = 2.73e7
    # gauss: center = ..., sigma = ...
    # mix:   components = c1:s1:w1, c2:s2:w2, ...

    [phantom]
    kind = point            ; point | disc | vascular | raster
    x = -0.0125
    y = 0.0
    # disc: radius = ...; vascular: seed = ..., branches = ...; raster: path = ...

    [roi]
    side = 0.2
    grid = 512

    [reconstruct]
    methods = tr, bp, tbp
    mu = 6.82e6
    normalize = true

    [output]
    dir = out/run1

Exit codes: 0 success, 1 usage/validation error, 2 I/O failure. All CSV
and JSON outputs are byte-reproducible for identical scenarios and seeds;
wall-clock timings go only to the log file.
"""

from __future__ import annotations

import argparse
import configparser
import sys
import time
from pathlib import Path

import numpy as np

from . import analysis, fileio, phantom, reconstruct
from .core import (
    AcquisitionConfig,
    ImageGrid,
    SensorData,
    SourceSpectrum,
    default_dt,
    load_sensor_csv,
    save_sensor_binary,
    save_sensor_csv,
    validate_config,
)
from .forward import forward_project

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2


class ScenarioError(ValueError):
    pass


class Scenario:
    """Parsed scenario file plus derived objects."""

    def __init__(self, path):
        parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        read = parser.read(path)
        if not read:
            raise ScenarioError(f"cannot read scenario file {path}")
        try:
            self._build(parser, Path(path).parent)
        except (KeyError, ValueError, configparser.Error) as exc:
            raise ScenarioError(f"invalid scenario {path}: {exc}") from exc

    def _build(self, p, base: Path) -> None:
        src = p["source"]
        omega_max = float(src["omega_max"])
        shape = src.get("shape", "hann").strip()
        kwargs = {}
        if shape == "gauss":
            kwargs = {"center": float(src["center"]), "sigma": float(src["sigma"])}
        elif shape == "mix":
            comps = []
            for tok in src["components"].split(","):
                c, s, w = (float(v) for v in tok.strip().split(":"))
                comps.append((c, s, w))
            kwargs = {"components": tuple(comps)}
        self.source = SourceSpectrum(omega_max, shape, **kwargs)

        acq = p["acquisition"]
        self.config = AcquisitionConfig(
            c0=float(acq.get("c0", "1500.0")),
            radius=float(acq["radius"]),
            n_sensors=int(acq["sensors"]),
            record_t=float(acq["record_t"]),
            dt=float(acq["dt"]) if "dt" in acq else default_dt(omega_max),
            theta0=float(acq.get("theta0", "0.0")),
        )
        problems = validate_config(self.config)
        if problems:
            raise ScenarioError("; ".join(problems))

        roi = p["roi"]
        self.roi = ImageGrid(side=float(roi["side"]), m=int(roi["grid"]))

        ph = p["phantom"]
        kind = ph["kind"].strip()
        params: dict = {}
        if kind in ("point", "disc"):
            params["x"] = float(ph["x"])
            params["y"] = float(ph["y"])
            if kind == "disc":
                params["radius"] = float(ph["radius"])
        elif kind == "vascular":
            params["seed"] = int(ph.get("seed", "0"))
            params["branches"] = int(ph.get("branches", "12"))
        elif kind == "raster":
            params["path"] = str((base / ph["path"]).resolve())
        else:
            raise ScenarioError(f"unknown phantom kind {kind!r}")
        self.phantom = phantom.PhantomSpec(kind, params)

        rec = p["reconstruct"] if p.has_section("reconstruct") else {}
        methods = rec.get("methods", "bp") if rec else "bp"
        self.methods = [m.strip().lower() for m in methods.split(",") if m.strip()]
        bad = [m for m in self.methods if m not in ("tr", "bp", "tbp")]
        if bad:
            raise ScenarioError(f"unknown methods {bad}")
        mu = rec.get("mu") if rec else None
        self.mu = float(mu) if mu else None
        norm = rec.get("normalize", "true") if rec else "true"
        self.normalize = norm.strip().lower() in ("1", "true", "yes", "on")

        out = p["output"]["dir"] if p.has_section("output") else "out"
        self.out_dir = Path(out) if Path(out).is_absolute() else base / out

    def build_phantom(self, seed: int | None = None) -> ImageGrid:
        spec = self.phantom
        if seed is not None and spec.kind == "vascular":
            spec = phantom.PhantomSpec(spec.kind, {**spec.params, "seed": seed}, spec.amplitude)
        return spec.build(self.roi)

    def truth_positions(self, p0: ImageGrid) -> np.ndarray:
        if self.phantom.kind in ("point", "disc"):
            return np.array([[self.phantom.params["x"], self.phantom.params["y"]]])
        iy, ix = np.nonzero(p0.values)
        flat = np.argmax(p0.values)
        iy0, ix0 = np.unravel_index(flat, p0.values.shape)
        return np.array([[p0.axis_coords(0)[ix0], p0.axis_coords(1)[iy0]]])


def _log(out_dir: Path, message: str) -> None:
    with open(out_dir / "run.log", "a") as f:
        f.write(f"[{time.strftime('%Y-%m-%dT%H:%M:%S')}] {message}\n")


def cmd_simulate(args) -> int:
    scenario = Scenario(args.scenario)
    out = fileio.ensure_dir(args.out or scenario.out_dir)
    p0 = scenario.build_phantom(args.seed)
    if not p0.values.any():
        print("warning: phantom is empty; sensor data will be zero", file=sys.stderr)
    t0 = time.perf_counter()
    data = forward_project(p0, scenario.config, scenario.source)
    save_sensor_csv(out / "sensor_data.csv", data)
    save_sensor_binary(out / "sensor_data.patd", data)
    fileio.write_image_csv(out / "phantom.csv", p0)
    fileio.write_pgm(out / "phantom.pgm", p0.values, lo=0.0, hi=max(1.0, p0.values.max()))
    _log(out, f"simulate: {scenario.config.n_sensors} sensors in {time.perf_counter()-t0:.1f}s")
    print(f"wrote sensor data for {scenario.config.n_sensors} sensors to {out}")
    return EXIT_OK


def _reconstruct_one(scenario: Scenario, method: str, data: SensorData, mu, out: Path) -> dict:
    stats: dict = {}
    request = reconstruct.ReconstructionRequest(
        method, data, scenario.roi, mu=mu, normalize=scenario.normalize
    )
    image = reconstruct.run_request(request, stats=stats)
    lo, hi = fileio.write_pgm(out / f"recon_{method}.pgm", image.values)
    fileio.write_image_csv(out / f"recon_{method}.csv", image)
    sidecar = {
        "method": method,
        "mu": mu,
        "normalize": scenario.normalize,
        "normalization_constant": stats.get("normalization"),
        "singular_pixels": stats.get("singular_pixels", 0),
        "pgm_lo": lo,
        "pgm_hi": hi,
    }
    fileio.write_json(out / f"recon_{method}.json", sidecar)
    return stats


def cmd_reconstruct(args) -> int:
    scenario = Scenario(args.scenario)
    out = fileio.ensure_dir(args.out or scenario.out_dir)
    methods = [args.method.lower()] if args.method else scenario.methods
    mu = args.mu if args.mu is not None else scenario.mu
    if "tbp" in methods and mu is None:
        if args.ppw_target:
            t_m = scenario.roi.side / scenario.config.c0
            mu = reconstruct.recommend_mu(scenario.roi.m, t_m, args.ppw_target)
        else:
            print("error: tbp needs --mu or --ppw-target (or scenario mu)", file=sys.stderr)
            return EXIT_USAGE
    data_path = out / "sensor_data.csv"
    if args.pipeline or not data_path.exists():
        if not args.pipeline:
            print("error: no sensor data found; run simulate or pass --pipeline", file=sys.stderr)
            return EXIT_USAGE
        rc = cmd_simulate(args)
        if rc != EXIT_OK:
            return rc
    try:
        data = load_sensor_csv(data_path)
    except OSError as exc:
        print(f"error: cannot read {data_path}: {exc}", file=sys.stderr)
        return EXIT_IO
    for method in methods:
        t0 = time.perf_counter()
        _reconstruct_one(scenario, method, data, mu if method == "tbp" else None, out)
        _log(out, f"reconstruct {method}: {time.perf_counter()-t0:.1f}s")
        print(f"wrote recon_{method}.(csv|pgm|json) to {out}")
    return EXIT_OK


def _analyze_images(scenario: Scenario, out: Path, p0: ImageGrid, methods) -> list[dict]:
    truths = scenario.truth_positions(p0)
    omega_ref = scenario.source.omega_max
    grid_ppw = analysis.ppw(scenario.roi.pitch, omega_ref, scenario.config.c0)
    regime = analysis.classify_sampling(scenario.config.n_sensors, scenario.config, omega_ref)
    rows = []
    for method in methods:
        path = out / f"recon_{method}.csv"
        if not path.exists():
            raise FileNotFoundError(path)
        image = fileio.read_image_csv(path)
        if image.values.shape != p0.values.shape:
            raise ValueError("reconstruction and truth grids differ")
        offsets, profile = analysis.axial_profile(image, truths[0])
        fileio.write_profile_csv(out / f"profile_{method}.csv", offsets, profile)
        try:
            fwhm = analysis.measure_fwhm(np.abs(profile), image.pitch)
        except ValueError:
            fwhm = None
        peak, side_db = analysis.contrast_metrics(image, truths, fwhm=fwhm)
        report = analysis.QualityReport(
            method=method,
            fwhm=fwhm,
            peak=peak,
            side_lobe_db=side_db,
            ppw=grid_ppw,
            regime=regime,
        )
        fileio.write_json(out / f"report_{method}.json", report.as_dict())
        corr = None
        try:
            corr = analysis.pearson_correlation(image, p0)
        except ValueError:
            pass
        rows.append({**report.as_dict(), "correlation": corr})
    return rows


def cmd_analyze(args) -> int:
    scenario = Scenario(args.scenario)
    out = fileio.ensure_dir(args.out or scenario.out_dir)
    p0 = scenario.build_phantom(args.seed)
    methods = [args.method.lower()] if args.method else scenario.methods
    try:
        rows = _analyze_images(scenario, out, p0, methods)
    except FileNotFoundError as exc:
        print(f"error: missing reconstruction {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    with open(out / "comparison.csv", "w") as f:
        f.write("method,fwhm_m,peak,side_lobe_db,ppw,regime,correlation\n")
        for r in rows:
            f.write(
                f"{r['method']},{_fmt(r['fwhm'])},{_fmt(r['peak'])},{_fmt(r['side_lobe_db'])},"
                f"{_fmt(r['ppw'])},{r['regime']},{_fmt(r['correlation'])}\n"
            )
    print(f"wrote reports and comparison.csv to {out}")
    return EXIT_OK


def _fmt(v) -> str:
    return "" if v is None else repr(v)


def cmd_sweep(args) -> int:
    scenario = Scenario(args.scenario)
    try:
        counts = [int(tok) for tok in args.sensors.split(",") if tok.strip()]
    except ValueError:
        print("error: --sensors must be a comma-separated integer list", file=sys.stderr)
        return EXIT_USAGE
    if not counts:
        print("error: empty sensor list", file=sys.stderr)
        return EXIT_USAGE
    out = fileio.ensure_dir(args.out or scenario.out_dir)
    p0 = scenario.build_phantom(args.seed)
    mu = args.mu if args.mu is not None else scenario.mu
    summary = []
    for n in counts:
        sub = fileio.ensure_dir(out / f"n{n:04d}")
        cfg = AcquisitionConfig(
            c0=scenario.config.c0,
            radius=scenario.config.radius,
            n_sensors=n,
            record_t=scenario.config.record_t,
            dt=scenario.config.dt,
            theta0=scenario.config.theta0,
        )
        t0 = time.perf_counter()
        data = forward_project(p0, cfg, scenario.source)
        save_sensor_csv(sub / "sensor_data.csv", data)
        sub_scenario = scenario
        for method in scenario.methods:
            stats: dict = {}
            request = reconstruct.ReconstructionRequest(
                method, data, scenario.roi, mu=mu if method == "tbp" else None,
                normalize=scenario.normalize,
            )
            image = reconstruct.run_request(request, stats=stats)
            fileio.write_image_csv(sub / f"recon_{method}.csv", image)
            fileio.write_pgm(sub / f"recon_{method}.pgm", image.values)
            fileio.write_json(sub / f"recon_{method}.json", {
                "method": method, "mu": mu if method == "tbp" else None,
                "n_sensors": n, "normalization_constant": stats.get("normalization"),
                "singular_pixels": stats.get("singular_pixels", 0),
            })
        rows = _analyze_images_for_config(sub_scenario, cfg, sub, p0, scenario.methods)
        for r in rows:
            summary.append({"n_sensors": n, **r})
        _log(out, f"sweep n={n}: {time.perf_counter()-t0:.1f}s")
    with open(out / "sweep_summary.csv", "w") as f:
        f.write("n_sensors,method,fwhm_m,peak,side_lobe_db,ppw,regime,correlation\n")
        for r in summary:
            f.write(
                f"{r['n_sensors']},{r['method']},{_fmt(r['fwhm'])},{_fmt(r['peak'])},"
                f"{_fmt(r['side_lobe_db'])},{_fmt(r['ppw'])},{r['regime']},{_fmt(r['correlation'])}\n"
            )
    print(f"wrote sweep summary for N in {counts} to {out}")
    return EXIT_OK


def _analyze_images_for_config(scenario, cfg, out, p0, methods):
    """Like _analyze_images but with an overridden sensor count."""
    saved = scenario.config
    scenario.config = cfg
    try:
        return _analyze_images(scenario, out, p0, methods)
    finally:
        scenario.config = saved


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="patrec",
        description="2D photoacoustic tomography workbench (simulate, reconstruct, analyze, sweep)",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", required=True, help="scenario INI file")
    common.add_argument("--out", default=None, help="output directory (overrides scenario)")
    common.add_argument("--seed", type=int, default=None, help="phantom seed override")
    common.add_argument("--method", default=None, help="single method tr|bp|tbp")
    common.add_argument("--mu", type=float, default=None, help="TBP truncation bound (rad/s)")
    common.add_argument("--ppw-target", type=float, default=None,
                        help="derive mu = 2 pi M/(T_M ppw) from the ROI grid")
    sub.add_parser("simulate", parents=[common], help="synthesize sensor data").set_defaults(
        func=cmd_simulate
    )
    rec = sub.add_parser("reconstruct", parents=[common], help="reconstruct images")
    rec.add_argument("--pipeline", action="store_true", help="simulate first if data is missing")
    rec.set_defaults(func=cmd_reconstruct)
    sub.add_parser("analyze", parents=[common], help="quality reports from images").set_defaults(
        func=cmd_analyze
    )
    sweep = sub.add_parser("sweep", parents=[common], help="sensor-count sweep")
    sweep.add_argument("--sensors", required=True, help="comma-separated sensor counts")
    sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
