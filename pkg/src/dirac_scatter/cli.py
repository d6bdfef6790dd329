"""Command-line front end: configuration, scenario execution and result files.

    dirac-scatter run --config <path> [--scenario NAME] [--out DIR] [--threads N]
    dirac-scatter validate --config <path>
    dirac-scatter selftest

Exit codes: 0 all enabled checks pass, 1 some check failed, 2 invalid
configuration, 3 pipeline error.
"""
from __future__ import annotations

import argparse
import csv
import enum
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import acceptance, coulomb, dynamics, scatter
from .acceptance import Check
from .coulomb import Case, SystemParams
from .errors import ConfigError, DiracScatterError
from .perturb import PerturbationSpec
from .spectral import MIN_PACKET_WIDTH, FreeBasis, Packet, PerturbedBasis, SpectralTransform

SCHEMA_VERSION = 1
THREADS_ENV = "DIRAC_SCATTER_THREADS"

EXIT_OK, EXIT_CHECKS, EXIT_CONFIG, EXIT_PIPELINE = 0, 1, 2, 3

DEFAULT_TOLERANCES = {
    "conjugacy": 1e-4,
    "unitarity": 1e-12,
    "antisymmetry": 1e-6,
    "s_relation": 1e-6,
    "window_invariance": 1e-4,
    "det_constancy": 1e-8,
    "parseval_free": 1e-6,
    "parseval": 1e-4,
    "round_trip": 1e-6,
    "ergodic": 1e-3,
    "limit": 1e-2,
    "wrong_direction": 0.05,
    "deviation_identity": 1e-14,
    "fourier_identity": 1e-5,
    "principal_value": 2e-3,
}

CSV_COLUMNS = ("lambda", "c11_re", "c11_im", "s11_re", "s11_im", "rho", "s_dyn_re", "s_dyn_im", "abs_s_dyn_minus_s_st")


class Scenario(enum.Enum):
    COULOMB = "coulomb"
    SCATTER = "scatter"
    SPECTRAL = "spectral"
    ERGODIC = "ergodic"
    FREECASE = "freecase"


@dataclass(frozen=True)
class RunConfig:
    system: SystemParams
    perturbation: PerturbationSpec
    lambda_grid: tuple[float, ...]
    packet_suite: tuple[Packet, ...]
    time_factors: tuple[float, ...]
    tolerances: dict
    output_dir: Path
    output_prefix: str
    scenario: Scenario
    u_grid: tuple[float, ...] = ()
    raw: dict = field(default_factory=dict, compare=False)

    @property
    def content_hash(self) -> str:
        return hashlib.sha256(canonical_json(self.raw).encode("utf-8")).hexdigest()


@dataclass
class RunReport:
    scenario: Scenario
    rows: list[dict]
    checks: list[Check]
    traces: dict
    diagnostics: dict
    config: RunConfig
    timings: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.gate)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


# --------------------------------------------------------------------------
# configuration


def _number(d: dict, key: str, path: str, required: bool = True, default=None) -> float:
    if key not in d:
        if required:
            raise ConfigError("missing required field", f"{path}.{key}")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"expected a finite number, got {v!r}", f"{path}.{key}")
    return float(v)


def _object(d, path: str) -> dict:
    if not isinstance(d, dict):
        raise ConfigError("expected an object", path)
    return d


def _number_list(v, path: str) -> tuple[float, ...]:
    if not isinstance(v, list) or not v:
        raise ConfigError("expected a non-empty list of numbers", path)
    out = []
    for i, x in enumerate(v):
        if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
            raise ConfigError(f"expected a finite number, got {x!r}", f"{path}[{i}]")
        out.append(float(x))
    return tuple(out)


def _parse_system(d) -> SystemParams:
    d = _object(d, "system")
    m, k, A = _number(d, "m", "system"), _number(d, "k", "system"), _number(d, "A", "system")
    if not m > 0:
        raise ConfigError("mass must be positive", "system.m")
    if k == 0:
        raise ConfigError("k must be non-zero", "system.k")
    if not abs(k) > abs(A):
        raise ConfigError(f"the Coulomb strength must satisfy |k| > |A| (k={k}, A={A})", "system.A")
    return SystemParams(m, k, A)


def _parse_perturbation(d, base: Path) -> PerturbationSpec:
    d = _object(d, "perturbation")
    kind = d.get("kind")
    path = "perturbation"
    try:
        if kind == "zero":
            return PerturbationSpec.zero()
        if kind == "exp_decay":
            alpha = _number(d, "alpha", path)
            if not alpha > 0:
                raise ConfigError("decay rate must be positive", f"{path}.alpha")
            return PerturbationSpec.exp_decay(_number(d, "c", path), alpha)
        if kind == "compact_bump":
            width = _number(d, "width", path)
            if not width > 0:
                raise ConfigError("width must be positive", f"{path}.width")
            return PerturbationSpec.compact_bump(_number(d, "c", path), _number(d, "r0", path), width)
        if kind == "custom":
            table = d.get("table")
            if not isinstance(table, str):
                raise ConfigError("custom perturbation needs a 'table' file path", f"{path}.table")
            p = (base / table) if not Path(table).is_absolute() else Path(table)
            if not p.is_file():
                raise ConfigError(f"table file not found: {p}", f"{path}.table")
            return PerturbationSpec.from_file(p)
    except ConfigError:
        raise
    except DiracScatterError as exc:
        raise ConfigError(str(exc), path) from exc
    raise ConfigError(f"unknown kind {kind!r} (expected zero, exp_decay, compact_bump or custom)", f"{path}.kind")


def _parse_packets(v, m: float) -> tuple[Packet, ...]:
    if v is None:
        return ()
    if not isinstance(v, list):
        raise ConfigError("expected a list of packet objects", "packet_suite")
    out = []
    for i, d in enumerate(v):
        path = f"packet_suite[{i}]"
        d = _object(d, path)
        center, width = _number(d, "center", path), _number(d, "width", path)
        if width < MIN_PACKET_WIDTH:
            raise ConfigError(f"packet width must be at least {MIN_PACKET_WIDTH}", f"{path}.width")
        shape = d.get("shape", "smooth-bump")
        if shape != "smooth-bump":
            raise ConfigError(f"unsupported shape {shape!r}", f"{path}.shape")
        try:
            pk = Packet.from_center(center, width, m)
        except ValueError as exc:
            raise ConfigError(str(exc), path) from exc
        comp = d.get("component", pk.component.value)
        if comp != pk.component.value:
            raise ConfigError(f"component {comp!r} does not match the branch of the support ({pk.component.value!r})", f"{path}.component")
        out.append(pk)
    return tuple(out)


def parse_config(data, base: Path | str = ".", scenario: str | None = None) -> RunConfig:
    """Validate a decoded JSON document; raises :class:`ConfigError` with a field path."""
    base = Path(base)
    data = _object(data, "$")
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {version!r} (expected {SCHEMA_VERSION})", "schema_version")
    name = scenario if scenario is not None else data.get("scenario")
    try:
        scen = Scenario(str(name).lower())
    except ValueError:
        raise ConfigError(f"unknown scenario {name!r} (expected one of {[s.value for s in Scenario]})", "scenario") from None
    system = _parse_system(data.get("system"))
    if scen is Scenario.FREECASE and system.A != 0:
        raise ConfigError("the classical-case scenario requires A = 0", "system.A")
    if scen is Scenario.COULOMB and system.A == 0:
        raise ConfigError("the pure Coulomb scenario requires A != 0", "system.A")
    q = _parse_perturbation(data.get("perturbation", {"kind": "zero"}), base)
    lams = _number_list(data.get("lambda_grid"), "lambda_grid")
    for i, lam in enumerate(lams):
        try:
            coulomb.make_energy(system, lam)
        except DiracScatterError as exc:
            raise ConfigError(f"energy lies in or too close to the spectral gap (|lambda| > m required): {exc}", f"lambda_grid[{i}]") from exc
    packets = _parse_packets(data.get("packet_suite"), system.m)
    tg = _object(data.get("time_grid", {}), "time_grid")
    factors = _number_list(tg.get("factors", list(dynamics.DEFAULT_TIME_FACTORS)), "time_grid.factors")
    if any(f <= 0 for f in factors) or any(b <= a for a, b in zip(factors, factors[1:])):
        raise ConfigError("time factors must be positive and strictly increasing", "time_grid.factors")
    tol = dict(DEFAULT_TOLERANCES)
    for key, val in _object(data.get("tolerances", {}), "tolerances").items():
        if key not in DEFAULT_TOLERANCES:
            raise ConfigError(f"unknown tolerance {key!r}", f"tolerances.{key}")
        tol[key] = _number({key: val}, key, "tolerances")
    out = _object(data.get("output", {}), "output")
    out_dir = Path(out.get("dir", "out"))
    if not out_dir.is_absolute():
        out_dir = Path(os.path.normpath(base / out_dir))
    prefix = out.get("prefix", scen.value)
    if not isinstance(prefix, str) or not prefix or "/" in prefix:
        raise ConfigError("prefix must be a non-empty file-name stem", "output.prefix")
    u_grid = _number_list(data["u_grid"], "u_grid") if "u_grid" in data else ()
    raw = dict(data)
    raw["scenario"] = scen.value
    return RunConfig(system, q, lams, packets, factors, tol, out_dir, prefix, scen, u_grid, raw)


def load_config(path, scenario: str | None = None) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", "$") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}", "$") from exc
    return parse_config(data, path.parent, scenario)


# --------------------------------------------------------------------------
# scenarios


def _scattering_rows(cfg: RunConfig, q: PerturbationSpec, threads: int) -> list[scatter.ScatteringData]:
    work = lambda lam: scatter.scattering_data(cfg.system, q, lam)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(work, cfg.lambda_grid))
    return [work(lam) for lam in cfg.lambda_grid]


def _case(lam: float) -> Case:
    return Case.POSITIVE if lam > 0 else Case.NEGATIVE


def _row(sd: scatter.ScatteringData, s_dyn: complex | None = None) -> dict:
    case = _case(sd.lam)
    s_st = dynamics.s_st_entry(sd, case)
    s_dyn = dynamics.s_dyn_entry(sd, case) if s_dyn is None else s_dyn
    c11 = complex(sd.c1[0])
    return {"lambda": sd.lam, "c11_re": c11.real, "c11_im": c11.imag, "s11_re": sd.s11.real, "s11_im": sd.s11.imag,
            "rho": sd.rho, "s_dyn_re": s_dyn.real, "s_dyn_im": s_dyn.imag, "abs_s_dyn_minus_s_st": abs(s_dyn - s_st)}


def _structure_checks(sds, tol) -> list[Check]:
    return [
        Check("C2 = conj(C1)", max(float(np.max(np.abs(sd.c2 - np.conj(sd.c1)))) for sd in sds), tol["conjugacy"]),
        Check("|s11| = 1", max(abs(abs(sd.s11) - 1) for sd in sds), tol["unitarity"]),
        Check("s11 = -s21", max(abs(sd.s11 + sd.s21) for sd in sds), tol["antisymmetry"]),
        Check("S C2 = C1", max(float(np.max(np.abs(scatter.stationary_s_matrix(sd) @ sd.c2 - sd.c1))) for sd in sds), tol["s_relation"]),
    ]


def _sd_record(sd: scatter.ScatteringData) -> dict:
    d = {k: v for k, v in sd.diagnostics.items() if isinstance(v, (int, float, str))}
    return {"lambda": sd.lam, "c1": sd.c1, "c2": sd.c2, "s11": sd.s11, "s21": sd.s21, "omega": sd.omega,
            "omega_imag_ratio": sd.omega_imag_ratio, "rho": sd.rho, "raw_amplitude": sd.raw_amplitude,
            "alpha": sd.alpha, "diagnostics": d}


def run_coulomb(cfg: RunConfig, threads: int) -> RunReport:
    sds = _scattering_rows(cfg, PerturbationSpec.zero(), threads)
    dets = []
    for lam in cfg.lambda_grid:
        ep = coulomb.make_energy(cfg.system, lam)
        d = np.array([coulomb.fundamental_matrix(cfg.system, ep, r).det for r in np.geomspace(1e-3, 1e3, 13)])
        dets.append(float(np.max(np.abs(d - d[0])) / abs(d[0])))
    checks = _structure_checks(sds, cfg.tolerances) + [Check("det D relative spread", max(dets), cfg.tolerances["det_constancy"])]
    return RunReport(cfg.scenario, [_row(sd) for sd in sds], checks, {},
                     {"scattering": [_sd_record(sd) for sd in sds], "det_spread": dets}, cfg)


def run_scatter(cfg: RunConfig, threads: int) -> RunReport:
    sds = _scattering_rows(cfg, cfg.perturbation, threads)
    win = max(float(sd.diagnostics.get("window_agreement", 0.0)) for sd in sds)
    checks = _structure_checks(sds, cfg.tolerances) + [Check("fit-window invariance of C1", win, cfg.tolerances["window_invariance"])]
    return RunReport(cfg.scenario, [_row(sd) for sd in sds], checks, {}, {"scattering": [_sd_record(sd) for sd in sds]}, cfg)


def run_spectral(cfg: RunConfig, threads: int) -> RunReport:
    sds = _scattering_rows(cfg, cfg.perturbation, threads)
    packets = cfg.packet_suite or tuple(dynamics.default_packets(cfg.system.m, cfg.lambda_grid))
    free, pert = FreeBasis(cfg.system.m), PerturbedBasis(cfg.system, cfg.perturbation)
    records, pf, pp, rt = [], [], [], []
    tr = SpectralTransform.build(pert, list(packets))
    for pk in packets:
        tr0 = SpectralTransform.build(free, [pk])
        F0 = pk(tr0.lam)
        l0, r0 = tr0.parseval(F0)
        back = tr0.inverse_on_nodes(tr0.forward_values(F0))
        l1, r1 = tr.parseval(pk(tr.lam))
        pf.append(abs(l0 - r0) / l0)
        rt.append(float(np.max(np.abs(back - F0)) / np.max(np.abs(F0))))
        pp.append(abs(l1 - r1) / l1)
        records.append({"packet": pk.to_dict(), "parseval_free": pf[-1], "parseval": pp[-1], "round_trip_free": rt[-1]})
    tol = cfg.tolerances
    checks = [Check("Parseval for U0", max(pf), tol["parseval_free"]), Check("Parseval for U", max(pp), tol["parseval"]),
              Check("round trip U0^-1 U0", max(rt), tol["round_trip"])]
    return RunReport(cfg.scenario, [_row(sd) for sd in sds], checks, {},
                     {"packets": records, "scattering": [_sd_record(sd) for sd in sds]}, cfg)


def _trace_record(tr: dynamics.LimitTrace) -> dict:
    return {"times": tr.times, "values": tr.values[:, 0], "extrapolated": tr.extrapolated[0],
            "convergence_rate": float(np.atleast_1d(tr.convergence_rate)[0]), "increments": tr.increments[:, 0]}


def _ergodic(cfg: RunConfig, wrong_direction: bool) -> tuple[dynamics.ErgodicReport, list[dict], dict, list[Check]]:
    rep = dynamics.ergodic_check(cfg.system, cfg.perturbation, cfg.lambda_grid, cfg.packet_suite or None,
                                 cfg.time_factors, wrong_direction=wrong_direction)
    rows = [_row(p.scattering, p.s_dyn_measured) for p in rep.probes]
    traces = {f"{p.lam:.17g}": {"plus": _trace_record(p.plus), "minus": _trace_record(p.minus), "g": p.g,
                                "s_dyn": p.s_dyn_measured, "s_dyn_chain": p.s_dyn_chain, "s_st": p.s_st,
                                "limit_error_plus": p.limit_error_plus, "limit_error_minus": p.limit_error_minus}
              for p in rep.probes}
    tol = cfg.tolerances
    missing = sorted(set(cfg.lambda_grid) - {p.lam for p in rep.probes})
    checks = [Check("max |S_dyn - S_st|", rep.max_residual, tol["ergodic"]),
              Check("limit values vs +-i (rho/rho1) c11 g", rep.max_limit_error, tol["limit"]),
              Check("V0(|t lam/eps|) = W0(t)", rep.deviation_identity, tol["deviation_identity"]),
              Check("energies not covered by any packet", float(len(missing)), 0.0)]
    if wrong_direction and rep.wrong_direction:
        ratio = max(float(np.max(v["ratio"])) for v in rep.wrong_direction.values())
        checks.append(Check("wrong-direction decay factor", ratio, tol["wrong_direction"]))
    return rep, rows, traces, checks


def run_ergodic(cfg: RunConfig, threads: int) -> RunReport:
    rep, rows, traces, checks = _ergodic(cfg, wrong_direction=True)
    diag = {"times": rep.times, "scattering": [_sd_record(p.scattering) for p in rep.probes],
            "wrong_direction": {f"{k:.17g}": v for k, v in rep.wrong_direction.items()}}
    return RunReport(cfg.scenario, rows, checks, traces, diag, cfg)


def run_freecase(cfg: RunConfig, threads: int) -> RunReport:
    rep, rows, traces, checks = _ergodic(cfg, wrong_direction=False)
    m = cfg.system.m
    ident, pv, records = 0.0, 0.0, []
    for lam in sorted({abs(x) for x in cfg.lambda_grid}):
        u_grid = cfg.u_grid or tuple(np.round(np.linspace(m + 0.1, 2 * lam + 1, 9), 6))
        fc = dynamics.free_case_identities(m, lam, u_grid)
        ident, pv = max(ident, fc.max_identity_error), max(pv, fc.max_pv_error)
        records.append({"lambda": lam, "identity": [list(r) for r in fc.identity_rows], "principal_value": [list(r) for r in fc.pv_rows]})
    tol = cfg.tolerances
    checks = [c for c in checks if not c.name.startswith("V0")]
    checks += [Check("Fourier identity quadrature residual", ident, tol["fourier_identity"]),
               Check("principal-value limit", pv, tol["principal_value"])]
    diag = {"times": rep.times, "fourier_identities": records, "scattering": [_sd_record(p.scattering) for p in rep.probes]}
    return RunReport(cfg.scenario, rows, checks, traces, diag, cfg)


RUNNERS = {Scenario.COULOMB: run_coulomb, Scenario.SCATTER: run_scatter, Scenario.SPECTRAL: run_spectral,
           Scenario.ERGODIC: run_ergodic, Scenario.FREECASE: run_freecase}


def run(cfg: RunConfig, threads: int = 1) -> RunReport:
    t0 = time.perf_counter()
    report = RUNNERS[cfg.scenario](cfg, max(1, int(threads)))
    report.rows.sort(key=lambda r: r["lambda"])
    report.timings = {"wall_clock_seconds": time.perf_counter() - t0, "threads": threads}
    return report


# --------------------------------------------------------------------------
# output


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else str(obj)
    if isinstance(obj, (np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, enum.Enum):
        return obj.value
    return obj


def write_csv(report: RunReport, path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n", quoting=csv.QUOTE_MINIMAL)
        w.writerow(CSV_COLUMNS)
        for row in report.rows:
            w.writerow([_fmt(row[c]) for c in CSV_COLUMNS])


def report_document(report: RunReport) -> dict:
    cfg = report.config
    return _jsonable({
        "schema_version": SCHEMA_VERSION,
        "scenario": report.scenario,
        "config": cfg.raw,
        "config_sha256": cfg.content_hash,
        "effective_tolerances": cfg.tolerances,
        "passed": report.passed,
        "checks": [{"name": c.name, "value": c.value, "tol": c.tol, "gate": c.gate, "passed": c.passed} for c in report.checks],
        "rows": report.rows,
        "traces": report.traces,
        "diagnostics": report.diagnostics,
    })


def emit(report: RunReport, out_dir: Path | None = None, formats=("csv", "json")) -> dict[str, Path]:
    """Write the CSV table, the JSON report and a separate timing file.

    CSV and JSON depend only on the configuration (bit-reproducible);
    wall-clock data goes to ``<prefix>_timing.json``.
    """
    cfg = report.config
    out = Path(out_dir) if out_dir is not None else cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    if "csv" in formats:
        paths["csv"] = out / f"{cfg.output_prefix}.csv"
        write_csv(report, paths["csv"])
    if "json" in formats:
        paths["json"] = out / f"{cfg.output_prefix}.json"
        paths["json"].write_text(json.dumps(report_document(report), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    paths["timing"] = out / f"{cfg.output_prefix}_timing.json"
    paths["timing"].write_text(json.dumps(_jsonable(report.timings), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return paths


# --------------------------------------------------------------------------
# entry point


def resolve_threads(arg: int | None) -> int:
    if arg is not None:
        return arg
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {env!r}", THREADS_ENV) from None
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dirac-scatter", description="Dirac-Coulomb scattering: stationary and dynamical S-matrices.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="execute a scenario and write CSV/JSON results")
    p_run.add_argument("--config", required=True, type=Path)
    p_run.add_argument("--scenario", choices=[s.value for s in Scenario], help="override the scenario named in the config")
    p_run.add_argument("--out", type=Path, help="output directory (overrides output.dir)")
    p_run.add_argument("--threads", type=int, help=f"worker threads for the energy grid (fallback: ${THREADS_ENV})")
    p_val = sub.add_parser("validate", help="validate a configuration file")
    p_val.add_argument("--config", required=True, type=Path)
    sub.add_parser("selftest", help="run the full acceptance suite")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "selftest":
        results = acceptance.run_all(verbose=True)
        ok = all(r.passed for r in results)
        print(f"selftest: {sum(r.passed for r in results)}/{len(results)} criteria pass")
        return EXIT_OK if ok else EXIT_CHECKS
    try:
        cfg = load_config(args.config, getattr(args, "scenario", None))
        if args.command == "validate":
            print(f"{args.config}: valid ({cfg.scenario.value}, {len(cfg.lambda_grid)} energies, sha256 {cfg.content_hash[:12]})")
            return EXIT_OK
        threads = resolve_threads(args.threads)
        if threads < 1:
            raise ConfigError("thread count must be positive", "--threads")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report = run(cfg, threads)
    except DiracScatterError as exc:
        print(f"pipeline error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    paths = emit(report, args.out)
    for c in report.checks:
        print(c.line())
    print(f"{'PASS' if report.passed else 'FAIL'}: {cfg.scenario.value} -> {', '.join(str(p) for p in paths.values())}")
    return EXIT_OK if report.passed else EXIT_CHECKS


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
