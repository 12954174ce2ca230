"""Experiment runner: JSON config in, CSV tables and a metadata sidecar out.

Exit codes: 0 success, 2 invalid config, 3 orbit budget exceeded,
4 numerical failure.  CSV bodies are deterministic: identical configs
produce byte-identical tables regardless of the worker count; run
metadata (timestamps, versions, conventions) lives in the sidecar.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import datetime
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from . import __version__
from .errors import BudgetError, NumericsError, PotentialError, SftError
from .lfunction import LSeriesTruncation, eta_truncated, locate_real_pole, s_of_t_quadratic_fit
from .livshits import LivshitsReport, nonpositive_test, positive_proportion_test
from .orbit_stats import (ks_distance_to_standard_normal, normalized_period_sample,
                          weighted_orbit_measure, weighted_proportion)
from .potentials import (LocallyConstantPotential, coin_flip_weight, constant_potential,
                         parity_observable)
from .sft import Sft, enumerate_prime_orbits, validate
from .suspension import make_suspension, verify_counting_asymptotics
from .thermo import (equilibrium_state, integrate, pressure_orbit_sum, pressure_spectral,
                     variance_curvature, variance_green_kubo)

OUT_DIR_ENV = "THERMOSHIFT_OUT_DIR"

CONVENTIONS = {
    "orbit_multiplicity": (
        "discrete measures weight each closed-orbit atom by its von Mangoldt "
        "multiplicity (base prime period) times exp(psi-period), matching the "
        "weighted trace; flow windows weight each orbit atom by exp(psi-period) alone"
    ),
    "parity_sign": "symbol 0 maps to +1, symbol 1 to -1",
    "qprime_counting": "Q'(n) counts length-n cyclic words on positive-period orbits",
    "windows": "potential windows read the first k symbols; cyclic words wrap around",
}

EXPERIMENTS: dict[str, dict[str, list[str]]] = {
    "enumerate": {"required": ["n"], "optional": ["budget"]},
    "pressure": {"required": ["psi", "n_range"], "optional": ["budget"]},
    "equilibrium": {"required": ["psi"], "optional": []},
    "variance": {"required": ["psi", "phi"], "optional": ["max_lag", "step"]},
    "clt": {"required": ["psi", "phi", "n_range"], "optional": ["budget"]},
    "livshits-positive-proportion": {"required": ["psi", "phi", "n_range"],
                                     "optional": ["tol", "budget"]},
    "livshits-nonpositive": {"required": ["phi", "n_range"], "optional": ["tol", "budget"]},
    "suspension-asymptotics": {"required": ["psi", "roof", "T_grid"], "optional": ["budget"]},
    "lfunction": {"required": ["psi", "s_grid"],
                  "optional": ["phi", "t", "bracket", "t_grid",
                               "max_base_period", "max_repetition"]},
}


@dataclass
class ExperimentConfig:
    experiment: str
    sft: Sft
    potentials: dict[str, LocallyConstantPotential]
    roof: LocallyConstantPotential | None
    psi: LocallyConstantPotential | None
    phi: LocallyConstantPotential | None
    params: dict[str, Any]
    seed: int
    out_dir: Path
    raw: dict[str, Any]


def potential_from_json(sft: Sft, spec: dict[str, Any]) -> LocallyConstantPotential:
    """Build a potential from its JSON form (builder or explicit table)."""
    if not isinstance(spec, dict):
        raise PotentialError(f"potential spec must be an object, got {type(spec).__name__}")
    if "builder" in spec:
        builder = spec["builder"]
        if builder == "coin_flip":
            return coin_flip_weight(float(spec["p"]), sft)
        if builder == "parity":
            return parity_observable(sft)
        if builder == "constant":
            return constant_potential(sft, float(spec["value"]), int(spec.get("depth", 1)))
        raise PotentialError(f"unknown potential builder {builder!r}")
    depth = int(spec["depth"])
    values = {}
    for key, v in spec["values"].items():
        window = tuple(int(ch) for ch in str(key))
        values[window] = float(v)
    return LocallyConstantPotential(sft, depth, values)


def potential_to_json(p: LocallyConstantPotential) -> dict[str, Any]:
    return {"depth": p.depth,
            "values": {"".join(map(str, w)): v for w, v in sorted(p.values.items())}}


def parse_config(raw: dict[str, Any], out_override: str | None = None) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise SftError("config must be a JSON object")
    experiment = raw.get("experiment")
    if experiment not in EXPERIMENTS:
        raise SftError(f"unknown experiment {experiment!r}; one of {sorted(EXPERIMENTS)}")
    system = raw.get("system")
    if not isinstance(system, dict) or "transitions" not in system:
        raise SftError("config needs system.transitions")
    sft = validate(system["transitions"])
    potentials = {}
    for name, spec in (raw.get("potentials") or {}).items():
        potentials[name] = potential_from_json(sft, spec)

    def resolve(key: str) -> LocallyConstantPotential | None:
        name = raw.get(key)
        if name is None:
            return None
        if name not in potentials:
            raise SftError(f"{key} references unknown potential {name!r}")
        return potentials[name]

    roof = None
    roof_name = system.get("roof")
    if roof_name is not None:
        if roof_name not in potentials:
            raise SftError(f"system.roof references unknown potential {roof_name!r}")
        roof = potentials[roof_name]
    params = raw.get("params") or {}
    if not isinstance(params, dict):
        raise SftError("params must be an object")
    spec = EXPERIMENTS[experiment]
    for key in spec["required"]:
        if key in ("psi", "phi"):
            if resolve(key) is None:
                raise SftError(f"experiment {experiment} requires a {key} potential")
        elif key == "roof":
            if roof is None:
                raise SftError(f"experiment {experiment} requires system.roof")
        elif key not in params:
            raise SftError(f"experiment {experiment} requires params.{key}")
    for key in ("budget",):
        if key in params and (not isinstance(params[key], int) or params[key] <= 0):
            raise SftError("params.budget must be a positive integer")
    out_dir = Path(out_override or raw.get("out_dir")
                   or os.environ.get(OUT_DIR_ENV) or "thermoshift-out")
    seed = int(raw.get("seed", 0))
    return ExperimentConfig(experiment=experiment, sft=sft, potentials=potentials,
                            roof=roof, psi=resolve("psi"), phi=resolve("phi"),
                            params=params, seed=seed, out_dir=out_dir, raw=raw)


def _fmt(x: Any) -> str:
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, (np.floating,)):
        return repr(float(x))
    if isinstance(x, (np.integer,)):
        return str(int(x))
    return str(x)


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(x) for x in row])
    path.write_text(buf.getvalue(), encoding="utf-8")


def _map_ordered(fn: Callable, items: Sequence, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _n_range(params: dict[str, Any]) -> list[int]:
    spec = params["n_range"]
    if isinstance(spec, list) and len(spec) == 2 and all(isinstance(x, int) for x in spec):
        lo, hi = spec
        if lo > hi or lo < 1:
            raise SftError(f"n_range [{lo}, {hi}] is empty or nonpositive")
        return list(range(lo, hi + 1))
    raise SftError("params.n_range must be [lo, hi] with integers lo <= hi")


def run(config: ExperimentConfig, threads: int = 1) -> list[Path]:
    """Dispatch one experiment; returns the written file paths."""
    config.out_dir.mkdir(parents=True, exist_ok=True)
    handler = _HANDLERS[config.experiment]
    written = handler(config, threads)
    meta = {
        "config": config.raw,
        "conventions": CONVENTIONS,
        "seed": config.seed,
        "threads": threads,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "version": __version__,
        "files": [p.name for p in written],
    }
    meta_path = config.out_dir / "metadata.json"
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return written + [meta_path]


def _run_enumerate(config: ExperimentConfig, threads: int) -> list[Path]:
    n = int(config.params["n"])
    budget = config.params.get("budget")
    per_symbol = _map_ordered(
        lambda c: enumerate_prime_orbits(config.sft, n, budget, first_symbols=[c]),
        list(range(config.sft.alphabet_size)), threads)
    rows = []
    idx = 0
    for batch in per_symbol:
        for orbit in batch:
            rows.append([idx, "".join(map(str, orbit.word)), orbit.period])
            idx += 1
    path = config.out_dir / "enumerate.csv"
    _write_csv(path, ["index", "word", "period"], rows)
    return [path]


def _run_pressure(config: ExperimentConfig, threads: int) -> list[Path]:
    ns = _n_range(config.params)
    spectral = pressure_spectral(config.sft, config.psi)
    orbit = pressure_orbit_sum(config.sft, config.psi, ns, config.params.get("budget"))
    rows = [
        ["spectral", spectral.value, spectral.error_bound, "", ""],
        ["orbit_sum", orbit.value, orbit.error_bound, orbit.n_used[0], orbit.n_used[1]],
    ]
    path = config.out_dir / "pressure.csv"
    _write_csv(path, ["method", "value", "error_bound", "n_lo", "n_hi"], rows)
    return [path]


def _run_equilibrium(config: ExperimentConfig, threads: int) -> list[Path]:
    state = equilibrium_state(config.sft, config.psi)
    rows = [["pressure", "", state.pressure], ["entropy", "", state.entropy]]
    for block, weight in zip(state.blocks, state.stationary):
        rows.append(["stationary", "".join(map(str, block)), weight])
    path = config.out_dir / "equilibrium.csv"
    _write_csv(path, ["quantity", "block", "value"], rows)
    return [path]


def _run_variance(config: ExperimentConfig, threads: int) -> list[Path]:
    state = equilibrium_state(config.sft, config.psi)
    gk = variance_green_kubo(state, config.phi,
                             int(config.params.get("max_lag", 200)))
    curv = variance_curvature(config.sft, config.psi, config.phi,
                              float(config.params.get("step", 0.01)))
    path = config.out_dir / "variance.csv"
    _write_csv(path, ["estimator", "value"],
               [["green_kubo", gk], ["curvature", curv]])
    return [path]


def _run_clt(config: ExperimentConfig, threads: int) -> list[Path]:
    ns = _n_range(config.params)
    budget = config.params.get("budget")
    state = equilibrium_state(config.sft, config.psi)
    center = integrate(state, config.phi)
    sigma = math.sqrt(variance_green_kubo(state, config.phi))

    def one(n: int):
        m = weighted_orbit_measure(config.sft, config.psi, n, budget)
        dist = normalized_period_sample(m, config.phi, center, sigma)
        return [n, ks_distance_to_standard_normal(dist), dist.mean(), dist.variance()]

    rows = _map_ordered(one, ns, threads)
    path = config.out_dir / "clt.csv"
    _write_csv(path, ["n", "ks_distance", "sample_mean", "sample_variance"], rows)
    return [path]


def _report_files(config: ExperimentConfig, report: LivshitsReport,
                  table_name: str, header: Sequence[str],
                  rows: Iterable[Sequence[Any]]) -> list[Path]:
    lines = [f"verdict: {report.verdict}"]
    if report.evidence is not None:
        orbit, value = report.evidence
        lines.append(f"witness_orbit: {''.join(map(str, orbit.word))}")
        lines.append(f"witness_period: {_fmt(value)}")
    if report.certificate:
        lines.append(f"certificate: {report.certificate}")
    if report.growth_rate is not None:
        lines.append(f"qprime_growth_rate: {_fmt(report.growth_rate)}")
    if report.max_orbit_average is not None:
        lines.append(f"max_orbit_average: {_fmt(report.max_orbit_average)}")
    if report.variance_estimate is not None:
        lines.append(f"variance_estimate: {_fmt(report.variance_estimate)}")
    if report.zero_temp_slopes:
        for s, v in sorted(report.zero_temp_slopes.items()):
            lines.append(f"pressure_slope_at_{_fmt(s)}: {_fmt(v)}")
    for key, value in sorted(CONVENTIONS.items()):
        lines.append(f"convention_{key}: {value}")
    report_path = config.out_dir / "report.txt"
    report_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    table_path = config.out_dir / table_name
    _write_csv(table_path, header, rows)
    return [report_path, table_path]


def _run_livshits_positive(config: ExperimentConfig, threads: int) -> list[Path]:
    ns = _n_range(config.params)
    report = positive_proportion_test(config.sft, config.phi, config.psi, ns,
                                      tol=config.params.get("tol"),
                                      budget=config.params.get("budget"))
    rows = [[n, report.proportions[n]] for n in ns]
    return _report_files(config, report, "proportions.csv",
                         ["n", "zero_period_proportion"], rows)


def _run_livshits_nonpositive(config: ExperimentConfig, threads: int) -> list[Path]:
    ns = _n_range(config.params)
    report = nonpositive_test(config.sft, config.phi, ns,
                              tol=config.params.get("tol"),
                              budget=config.params.get("budget"))
    rows = [[n, report.qprime_counts[n]] for n in ns]
    return _report_files(config, report, "qprime.csv", ["n", "qprime_count"], rows)


def _run_suspension(config: ExperimentConfig, threads: int) -> list[Path]:
    flow = make_suspension(config.sft, config.roof)
    grid = [float(t) for t in config.params["T_grid"]]
    rows_data = verify_counting_asymptotics(flow, config.psi, grid,
                                            config.params.get("budget"))
    rows = [[r.T, "", r.orbit_count, r.weighted_sum, r.ratio, r.prime_gap]
            for r in rows_data]
    path = config.out_dir / "suspension.csv"
    _write_csv(path, ["T", "delta", "orbit_count", "weighted_sum", "ratio", "prime_gap"],
               rows)
    return [path]


def _run_lfunction(config: ExperimentConfig, threads: int) -> list[Path]:
    params = config.params
    trunc = LSeriesTruncation(config.sft, config.psi, config.phi,
                              max_base_period=int(params.get("max_base_period", 40)),
                              max_repetition=int(params.get("max_repetition", 8)))
    t = float(params.get("t", 0.0))
    s_grid = [float(s) for s in params["s_grid"]]

    def one(s: float):
        ev = eta_truncated(trunc, s, t)
        return [s, t, ev.value.real, ev.value.imag, ev.tail_bound]

    rows = _map_ordered(one, s_grid, threads)
    eta_path = config.out_dir / "eta.csv"
    _write_csv(eta_path, ["s", "t", "re_eta", "im_eta", "tail_bound"], rows)
    written = [eta_path]
    summary_rows = []
    if "bracket" in params:
        a, b = params["bracket"]
        pole = locate_real_pole(trunc, (float(a), float(b)))
        summary_rows.append(["pole_estimate", pole])
    if "t_grid" in params:
        if config.phi is None:
            raise SftError("a t_grid fit needs a phi potential")
        p_hat, mu_hat, s2_hat = s_of_t_quadratic_fit(
            config.sft, config.psi, config.phi, [float(x) for x in params["t_grid"]])
        summary_rows.extend([["fit_pressure", p_hat], ["fit_mean", mu_hat],
                             ["fit_variance", s2_hat]])
    if summary_rows:
        summary_path = config.out_dir / "summary.csv"
        _write_csv(summary_path, ["quantity", "value"], summary_rows)
        written.append(summary_path)
    return written


_HANDLERS = {
    "enumerate": _run_enumerate,
    "pressure": _run_pressure,
    "equilibrium": _run_equilibrium,
    "variance": _run_variance,
    "clt": _run_clt,
    "livshits-positive-proportion": _run_livshits_positive,
    "livshits-nonpositive": _run_livshits_nonpositive,
    "suspension-asymptotics": _run_suspension,
    "lfunction": _run_lfunction,
}


def list_experiments() -> str:
    """Stable machine-readable catalog of experiment kinds and their keys."""
    return json.dumps(EXPERIMENTS, indent=2, sort_keys=True)


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="thermoshift",
                                     description="thermodynamic-formalism experiment runner")
    parser.add_argument("--version", action="version", version=f"thermoshift {__version__}")
    sub = parser.add_subparsers(dest="command")
    run_p = sub.add_parser("run", help="run an experiment from a JSON config")
    run_p.add_argument("config", type=Path)
    run_p.add_argument("--out", type=Path, default=None)
    run_p.add_argument("--threads", type=int, default=1)
    sub.add_parser("list-experiments", help="print the experiment catalog")
    args = parser.parse_args(argv)
    if args.command == "list-experiments":
        print(list_experiments())
        return 0
    if args.command != "run":
        parser.print_help()
        return 2
    try:
        raw = json.loads(args.config.read_text(encoding="utf-8"))
        config = parse_config(raw, str(args.out) if args.out else None)
    except (OSError, json.JSONDecodeError, SftError, PotentialError, ValueError,
            KeyError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        written = run(config, threads=max(1, args.threads))
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except NumericsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4
    except (SftError, PotentialError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
