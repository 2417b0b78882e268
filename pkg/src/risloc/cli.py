"""Command-line entry point and scenario file handling.

Scenario files are flat key-value text with dotted section names, e.g.::

    scenario.bs.position = 200 1000 50
    scenario.ris.n_y = 21
    scenario.area.x = -50 50

Every command accepts --seed, writes a JSON run manifest next to its first
output and exits 0 on success, 2 on parse errors, 3 on numeric failures and
4 on training failures. Outputs are plain CSV/JSON with no timestamps, so a
rerun with identical parameters is byte-identical.
"""
import argparse
import hashlib
import json
import sys
import time

import numpy as np

from . import _backend, fisher, learn
from .errors import (DegenerateGeometryError, InvalidArgumentError,
                     NumericFailureError, RislocError, ScenarioParseError,
                     SingularGeometryError, TrainingFailureError,
                     UnreachablePositionError)
from .geometry import (PathLossParams, Scenario, build_upa_layout, make_scene,
                       vec3)
from .learn import AreaSpec, area_grid

DEFAULT_SIGMA_LIST = (np.pi / 18, np.pi / 6, 2 * np.pi / 3)

_KNOWN_KEYS = {
    "scenario.bs.position", "scenario.bs.antennas",
    "scenario.ris.n_y", "scenario.ris.n_z", "scenario.ris.center",
    "scenario.ris.spacing", "scenario.ris.ref",
    "scenario.rf.carrier_hz", "scenario.rf.tx_power", "scenario.rf.noise_power",
    "scenario.pathloss.gamma0", "scenario.pathloss.d0", "scenario.pathloss.beta",
    "scenario.phase.noise_sigma", "scenario.phase.quantization_bits",
    "scenario.area.x", "scenario.area.y", "scenario.area.ue_z",
    "scenario.scene.mirror", "scenario.scene.blockage",
}
_REQUIRED_KEYS = (
    "scenario.bs.position", "scenario.bs.antennas",
    "scenario.ris.n_y", "scenario.ris.n_z", "scenario.ris.center",
    "scenario.rf.carrier_hz",
)


def _floats(value, count, key, line_no):
    parts = value.split()
    if len(parts) != count:
        raise ScenarioParseError(f"{key} needs {count} numbers, got {len(parts)}", line_no)
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise ScenarioParseError(f"{key} has a non-numeric value: {value!r}", line_no)


def parse_scenario(path):
    """Parse a scenario file into (Scenario, AreaSpec | None).

    Unknown or duplicate keys, malformed values and missing required fields
    raise ScenarioParseError carrying the offending line number.
    """
    entries = {}
    with open(path) as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ScenarioParseError(f"expected 'key = value', got {raw.strip()!r}", line_no)
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _KNOWN_KEYS:
                raise ScenarioParseError(f"unknown field {key!r}", line_no)
            if key in entries:
                raise ScenarioParseError(f"duplicate field {key!r}", line_no)
            entries[key] = (value, line_no)

    for key in _REQUIRED_KEYS:
        if key not in entries:
            raise ScenarioParseError(f"missing required field {key!r}")

    def take(key, default=None):
        return entries.pop(key, (default, None))

    def scalar(key, cast, default=None):
        value, line_no = take(key, default)
        if value is default and line_no is None:
            return default
        try:
            return cast(value)
        except (TypeError, ValueError):
            raise ScenarioParseError(f"{key} has a bad value: {value!r}", line_no)

    def vec_field(key, count):
        value, line_no = entries.pop(key)
        return _floats(value, count, key, line_no)

    bs_position = vec3(*vec_field("scenario.bs.position", 3))
    n_y = scalar("scenario.ris.n_y", int)
    n_z = scalar("scenario.ris.n_z", int)
    ris_center = vec3(*vec_field("scenario.ris.center", 3))
    carrier_hz = scalar("scenario.rf.carrier_hz", float)

    spacing_val, spacing_line = take("scenario.ris.spacing", "half_wavelength")
    if spacing_val == "half_wavelength":
        spacing = 0.5 * 299792458.0 / carrier_hz
    else:
        try:
            spacing = float(spacing_val)
        except ValueError:
            raise ScenarioParseError(f"bad spacing {spacing_val!r}", spacing_line)

    ref_val, ref_line = take("scenario.ris.ref", "geometric_center")
    if ref_val not in ("geometric_center", "corner"):
        try:
            ref_val = int(ref_val)
        except ValueError:
            raise ScenarioParseError(f"bad ref choice {ref_val!r}", ref_line)

    scene = None
    if "scenario.scene.mirror" in entries or "scenario.scene.blockage" in entries:
        if "scenario.scene.mirror" not in entries or "scenario.scene.blockage" not in entries:
            raise ScenarioParseError("a scene needs both scenario.scene.mirror and "
                                     "scenario.scene.blockage")
        mirror = vec_field("scenario.scene.mirror", 4)
        blockage = vec_field("scenario.scene.blockage", 4)
        scene = make_scene([[mirror[0], mirror[1]], [mirror[2], mirror[3]]],
                           [[blockage[0], blockage[1]], [blockage[2], blockage[3]]])

    area = None
    if "scenario.area.x" in entries and "scenario.area.y" in entries:
        ax = vec_field("scenario.area.x", 2)
        ay = vec_field("scenario.area.y", 2)
        ue_z = scalar("scenario.area.ue_z", float, 1.5)
        area = AreaSpec(ax[0], ax[1], ay[0], ay[1], z=ue_z if ue_z is not None else 1.5)

    try:
        layout = build_upa_layout(n_y, n_z, spacing, ris_center, ref_val)
        scenario = Scenario(
            bs_position=bs_position,
            bs_antennas=scalar("scenario.bs.antennas", int),
            ris=layout,
            carrier_hz=carrier_hz,
            pathloss=PathLossParams(
                gamma0=scalar("scenario.pathloss.gamma0", float, 1.0),
                d0=scalar("scenario.pathloss.d0", float, 1.0),
                beta=scalar("scenario.pathloss.beta", float, 2.0)),
            tx_power=scalar("scenario.rf.tx_power", float, 1.0),
            noise_power=scalar("scenario.rf.noise_power", float, 1e-12),
            phase_noise_sigma=scalar("scenario.phase.noise_sigma", float, float(np.pi / 6)),
            quantization_bits=scalar("scenario.phase.quantization_bits", int, 1),
            scene=scene)
    except InvalidArgumentError as exc:
        raise ScenarioParseError(str(exc))
    return scenario, area


def _sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        digest.update(fh.read())
    return digest.hexdigest()


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" if isinstance(v, float) else str(v)
                              for v in row) + "\n")


def _resolve_area(args, area_from_file):
    if getattr(args, "area", None) is not None:
        return AreaSpec(*args.area, z=args.ue_z)
    if area_from_file is None:
        raise InvalidArgumentError("no area: pass --area or add scenario.area.* to the file")
    return area_from_file


def _scenario_with_overrides(args, scenario):
    changes = {}
    if getattr(args, "sigma_theta", None) is not None:
        changes["phase_noise_sigma"] = args.sigma_theta
    if getattr(args, "q_bits", None) is not None:
        changes["quantization_bits"] = args.q_bits
    if not changes:
        return scenario
    from dataclasses import replace
    return replace(scenario, **changes)


def _map_rows(result):
    rows = []
    for point, j, crb in zip(result.grid, result.j_matrices, result.crb):
        rows.append((float(point[0]), float(point[1]),
                     float(j[0, 0] + j[1, 1]), float(j[0, 0]), float(j[0, 1]),
                     float(j[1, 1]), float(crb)))
    return rows


_MAP_HEADER = ("u_x", "u_y", "tr_J", "J_xx", "J_xy", "J_yy", "crb")


def cmd_fi_map(args):
    scenario, file_area = parse_scenario(args.scenario)
    scenario = _scenario_with_overrides(args, scenario)
    area = _resolve_area(args, file_area)
    grid = area_grid(area, args.step)
    result = fisher.fi_map(scenario, grid, fd_step=args.fd_step, store_element_info=False)
    _write_csv(args.out, _MAP_HEADER, _map_rows(result))
    return [args.out], {"scenario": args.scenario, "scenario_sha256": _sha256(args.scenario),
                        "step": args.step, "fd_step": args.fd_step,
                        "area": [area.x_min, area.x_max, area.y_min, area.y_max, area.z],
                        "points": int(grid.shape[0])}


def cmd_crb_map(args):
    scenario, file_area = parse_scenario(args.scenario)
    scenario = _scenario_with_overrides(args, scenario)
    area = _resolve_area(args, file_area)
    grid = area_grid(area, args.step)
    from dataclasses import replace
    outputs, coverage = [], {}
    for sigma in args.sigma_theta_list:
        if sigma <= 0:
            raise InvalidArgumentError("sigma values must be positive")
        scn = replace(scenario, phase_noise_sigma=sigma)
        result = fisher.fi_map(scn, grid, fd_step=args.fd_step, store_element_info=False)
        out = args.out if len(args.sigma_theta_list) == 1 else \
            f"{args.out.rsplit('.', 1)[0]}_sigma{sigma:.6g}.csv"
        _write_csv(out, _MAP_HEADER, _map_rows(result))
        metric = fisher.area_metric(result, fisher.AreaMetricParams(
            sigma_min=args.sigma_min, sharpness=args.sharpness))
        coverage[f"{sigma:.6g}"] = metric
        outputs.append(out)
        print(f"sigma_theta={sigma:.6g}: area metric {metric:.4f} "
              f"(threshold {args.sigma_min} m)")
    return outputs, {"scenario": args.scenario, "scenario_sha256": _sha256(args.scenario),
                     "step": args.step, "fd_step": args.fd_step,
                     "sigma_theta_list": list(map(float, args.sigma_theta_list)),
                     "sigma_min": args.sigma_min, "sharpness": args.sharpness,
                     "area_metric": coverage}


def cmd_fi_elements(args):
    scenario, file_area = parse_scenario(args.scenario)
    scenario = _scenario_with_overrides(args, scenario)
    area = _resolve_area(args, file_area)
    grid = area_grid(area, args.step)
    info = fisher.average_element_information(scenario, grid, fd_step=args.fd_step)
    rows = []
    for n, value in enumerate(info):
        row, col = scenario.ris.element_grid_index(n)
        rows.append((row, col, float(value)))
    _write_csv(args.out, ("row", "col", "avg_info"), rows)
    return [args.out], {"scenario": args.scenario, "scenario_sha256": _sha256(args.scenario),
                        "step": args.step, "fd_step": args.fd_step}


def cmd_dataset(args):
    scenario, file_area = parse_scenario(args.scenario)
    scenario = _scenario_with_overrides(args, scenario)
    area = _resolve_area(args, file_area)
    sigma = args.sigma_theta if args.sigma_theta is not None else scenario.phase_noise_sigma
    dataset = learn.generate_dataset(scenario, area, args.step, sigma,
                                     examples_per_point=args.examples,
                                     rng_seed=args.seed,
                                     train_fraction=args.train_fraction)
    learn.save_dataset_csv(dataset, args.out)
    return [args.out], {"scenario": args.scenario, "scenario_sha256": _sha256(args.scenario),
                        "step": args.step, "sigma_theta": float(sigma),
                        "examples_per_point": args.examples,
                        "train_fraction": args.train_fraction,
                        "rows": dataset.n_rows}


def _parse_int_list(text):
    return [int(v) for v in text.split(",") if v.strip()]


def cmd_train(args):
    dataset = learn.load_dataset_csv(args.dataset, ue_z=args.ue_z,
                                     split_seed=args.seed,
                                     train_fraction=args.train_fraction)
    hidden = _parse_int_list(args.layers)
    layers = [dataset.features.shape[1], *hidden, 2]
    hp = learn.Hyperparams(lr=args.lr, batch=args.batch, max_epochs=args.epochs,
                           seed=args.seed)
    model = learn.mlp_train(dataset, layers, hp)
    learn.save_model(model, args.out)
    idx = dataset.test_indices()
    est = learn.predict(model, dataset.features[idx])
    err = float(np.linalg.norm(est - dataset.positions[idx, :2], axis=1).mean())
    print(f"trained {layers} in {model.meta['epochs_run']} epochs; "
          f"mean test error {err:.3f} m")
    return [args.out], {"dataset": args.dataset, "dataset_sha256": _sha256(args.dataset),
                        "layers": layers, "lr": args.lr, "batch": args.batch,
                        "epochs": args.epochs, "train_fraction": args.train_fraction,
                        "mean_test_error_m": err}


def cmd_eval(args):
    scenario, _ = parse_scenario(args.scenario)
    dataset = learn.load_dataset_csv(args.dataset, ue_z=args.ue_z,
                                     split_seed=args.seed,
                                     train_fraction=args.train_fraction)
    model = learn.load_model(args.model)
    report = learn.evaluate_localization(model, dataset, scenario.ris.center)
    payload = {
        "mean_error_m": report.mean_error,
        "n_test_rows": int(report.errors.size),
        "rolling_window": 100,
        "rolling_distance_m": report.rolling_distance.tolist(),
        "rolling_radial_median_m": report.rolling_radial_median.tolist(),
        "rolling_radial_iqr_m": report.rolling_radial_iqr.tolist(),
        "rolling_azimuth_median_rad": report.rolling_azimuth_median.tolist(),
        "rolling_azimuth_iqr_rad": report.rolling_azimuth_iqr.tolist(),
    }
    with open(args.out, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"mean test error {report.mean_error:.3f} m over {report.errors.size} rows")
    return [args.out], {"model": args.model, "dataset": args.dataset,
                        "scenario": args.scenario,
                        "mean_error_m": report.mean_error}


def cmd_reduce(args):
    scenario, file_area = parse_scenario(args.scenario)
    scenario = _scenario_with_overrides(args, scenario)
    area = _resolve_area(args, file_area)
    dataset = learn.load_dataset_csv(args.dataset, ue_z=args.ue_z,
                                     split_seed=args.seed,
                                     train_fraction=args.train_fraction)
    info_grid = area_grid(area, args.fi_step)
    avg_info = fisher.average_element_information(scenario, info_grid, fd_step=args.fd_step)
    if avg_info.size != dataset.features.shape[1]:
        raise InvalidArgumentError("dataset feature count does not match the surface size")
    ranking = learn.fi_rank_features(avg_info, args.order, seed=args.seed)
    hp = learn.Hyperparams(lr=args.lr, batch=args.batch, max_epochs=args.epochs,
                           seed=args.seed)
    curve = learn.select_and_retrain(dataset, ranking, _parse_int_list(args.k_list),
                                     _parse_int_list(args.layers), hp)
    rows = [(pt.k, pt.mean_error, pt.ops.multiplications, pt.ops.additions,
             pt.ops.activations, pt.n_parameters) for pt in curve]
    _write_csv(args.out, ("k", "mean_error", "mults", "adds", "activations", "parameters"),
               rows)
    for pt in curve:
        print(f"k={pt.k}: mean error {pt.mean_error:.3f} m, {pt.ops.multiplications} mults, "
              f"{pt.n_parameters} parameters")
    return [args.out], {"scenario": args.scenario, "dataset": args.dataset,
                        "order": args.order, "k_list": _parse_int_list(args.k_list),
                        "layers": _parse_int_list(args.layers),
                        "fi_step": args.fi_step}


def cmd_phase_verify(args):
    from .phasestats import (PhaseDistParams, gaussian_approx_pdf,
                             marginal_theta_pdf, sample_phase)
    params = PhaseDistParams(mu_theta=args.mu, gamma=args.gamma)
    samples = sample_phase(params, args.n, args.seed)
    lo, hi = params.mu_theta - np.pi, params.mu_theta + np.pi
    shifted = params.mu_theta + ((samples - params.mu_theta + np.pi) % (2 * np.pi) - np.pi)
    hist, edges = np.histogram(shifted, bins=args.bins, range=(lo, hi), density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    exact = marginal_theta_pdf(centers, params)
    if args.gamma > 0:
        approx = gaussian_approx_pdf(centers, params)
    else:
        approx = np.full_like(centers, np.nan)
    rows = list(zip(map(float, centers), map(float, exact),
                    map(float, approx), map(float, hist)))
    _write_csv(args.out, ("theta", "exact_pdf", "approx_pdf", "empirical_hist"), rows)
    return [args.out], {"gamma": args.gamma, "mu": args.mu, "n": args.n,
                        "bins": args.bins}


def cmd_aoa_baseline(args):
    wavelength = 299792458.0 / args.carrier_hz
    spacing = wavelength / 2 if args.spacing is None else args.spacing
    layout_a = build_upa_layout(args.n_y, 1, spacing, [*args.ris_a, 0.0], "corner")
    layout_b = build_upa_layout(args.n_y, 1, spacing, [*args.ris_b, 0.0], "corner")
    result = fisher.aoa_baseline(
        ([*args.ris_a, 0.0], [*args.ris_b, 0.0]), (layout_a, layout_b),
        [*args.u], wavelength, normals_azimuth=(args.normal_a, args.normal_b))
    payload = {
        "estimate": result.estimate.tolist(),
        "hpbw_rad": list(result.hpbw_pair),
        "uncertainty_radius_m": result.uncertainty_radius,
        "region_xy": result.region.tolist(),
    }
    with open(args.out, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return [args.out], payload


def build_parser():
    parser = argparse.ArgumentParser(
        prog="risloc",
        description="Opportunistic localization from reflective-surface configurations")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--seed", type=int, default=0, help="root seed for all substreams")

    def add_map_args(p):
        p.add_argument("--scenario", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--step", type=float, default=1.0, help="grid step in metres")
        p.add_argument("--fd-step", type=float, default=fisher.DEFAULT_FD_STEP,
                       help="finite-difference step in metres")
        p.add_argument("--area", type=float, nargs=4, default=None,
                       metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
        p.add_argument("--ue-z", type=float, default=1.5)
        p.add_argument("--sigma-theta", type=float, default=None,
                       help="override the scenario phase-noise spread")
        p.add_argument("--q-bits", type=int, default=None,
                       help="override the scenario quantization bits")

    p = sub.add_parser("fi-map", help="information map over the service area")
    add_map_args(p); add_common(p); p.set_defaults(func=cmd_fi_map)

    p = sub.add_parser("crb-map", help="accuracy-bound maps for a list of noise levels")
    add_map_args(p)
    p.add_argument("--sigma-theta-list", type=float, nargs="+",
                   default=list(DEFAULT_SIGMA_LIST))
    p.add_argument("--sigma-min", type=float, default=1.0)
    p.add_argument("--sharpness", type=float, default=10.0)
    add_common(p); p.set_defaults(func=cmd_crb_map)

    p = sub.add_parser("fi-elements", help="per-element average information")
    add_map_args(p); add_common(p); p.set_defaults(func=cmd_fi_elements)

    p = sub.add_parser("dataset", help="generate a (configuration, position) dataset")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--sigma-theta", type=float, default=None)
    p.add_argument("--q-bits", type=int, default=None)
    p.add_argument("--examples", type=int, default=1, help="examples per grid point")
    p.add_argument("--train-fraction", type=float, default=0.75)
    p.add_argument("--area", type=float, nargs=4, default=None,
                   metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
    p.add_argument("--ue-z", type=float, default=1.5)
    add_common(p); p.set_defaults(func=cmd_dataset)

    p = sub.add_parser("train", help="train the position estimator")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--layers", default="100,100", help="hidden layer sizes, comma separated")
    p.add_argument("--epochs", type=int, default=2000)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--batch", type=int, default=64)
    p.add_argument("--train-fraction", type=float, default=0.75)
    p.add_argument("--ue-z", type=float, default=1.5)
    add_common(p); p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a trained model on the test split")
    p.add_argument("--model", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--train-fraction", type=float, default=0.75)
    p.add_argument("--ue-z", type=float, default=1.5)
    add_common(p); p.set_defaults(func=cmd_eval)

    p = sub.add_parser("reduce", help="error-versus-inputs curve for ranked features")
    p.add_argument("--scenario", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--k-list", required=True, help="input counts, comma separated")
    p.add_argument("--layers", default="4,4")
    p.add_argument("--order", choices=("descending", "ascending", "random"),
                   default="descending")
    p.add_argument("--fi-step", type=float, default=1.0,
                   help="grid step for averaging per-element information")
    p.add_argument("--fd-step", type=float, default=fisher.DEFAULT_FD_STEP)
    p.add_argument("--epochs", type=int, default=400)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--batch", type=int, default=64)
    p.add_argument("--train-fraction", type=float, default=0.75)
    p.add_argument("--area", type=float, nargs=4, default=None,
                   metavar=("XMIN", "XMAX", "YMIN", "YMAX"))
    p.add_argument("--ue-z", type=float, default=1.5)
    p.add_argument("--sigma-theta", type=float, default=None)
    p.add_argument("--q-bits", type=int, default=None)
    add_common(p); p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("phase-verify", help="exact vs approximate phase density and samples")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--n", type=int, default=100000)
    p.add_argument("--bins", type=int, default=64)
    p.add_argument("--out", required=True)
    add_common(p); p.set_defaults(func=cmd_phase_verify)

    p = sub.add_parser("aoa-baseline", help="two-device bearing intersection baseline")
    p.add_argument("--ris-a", type=float, nargs=2, required=True, metavar=("X", "Y"))
    p.add_argument("--ris-b", type=float, nargs=2, required=True, metavar=("X", "Y"))
    p.add_argument("--u", type=float, nargs=3, required=True, metavar=("X", "Y", "Z"))
    p.add_argument("--n-y", type=int, default=21)
    p.add_argument("--spacing", type=float, default=None)
    p.add_argument("--carrier-hz", dest="carrier_hz", type=float, default=6e9)
    p.add_argument("--normal-a", type=float, default=0.0)
    p.add_argument("--normal-b", type=float, default=0.0)
    p.add_argument("--out", required=True)
    add_common(p); p.set_defaults(func=cmd_aoa_baseline)

    return parser


def _write_manifest(command, args_params, outputs, duration):
    manifest = {
        "command": command,
        "parameters": args_params,
        "outputs": outputs,
        "duration_s": duration,
        "backend": _backend.BACKEND,
    }
    path = outputs[0] + ".manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.time()
    try:
        outputs, params = args.func(args)
    except ScenarioParseError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2
    except (InvalidArgumentError, SingularGeometryError, UnreachablePositionError,
            DegenerateGeometryError, NumericFailureError, np.linalg.LinAlgError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except TrainingFailureError as exc:
        print(f"training error: {exc}", file=sys.stderr)
        return 4
    except RislocError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    if getattr(args, "seed", None) is not None:
        params = {**params, "seed": args.seed}
    _write_manifest(args.command, params, outputs, time.time() - t0)
    return 0


if __name__ == "__main__":
    sys.exit(main())
