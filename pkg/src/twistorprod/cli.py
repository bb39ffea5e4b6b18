"""Command line entry point: ``twistorprod {decompose,classify,verify,critical-t}``.

Each command prints a table to standard output and, with ``--out``, writes
one JSON document (``"schema": 1``) that embeds the run configuration, the
catalog verification digest and the tolerance tier. Exit codes: 0 pass,
1 fail, 2 usage or precondition error.

A run can also be described by an INI file passed with ``--config``::

    [run]
    command = classify
    chart = cp2
    nu = 2, 4
    t1 = 0.25
    t2 = 1.0
    samples = 20
    kappas = 5
    seed = 0
    tol_tier = analytic

    [chart]
    orientation = -1

An optional ``[metric]`` section replaces the catalog chart by a user
metric: keys ``g11`` .. ``g44`` (upper triangle, missing entries are 0),
``lower`` and ``upper`` (four comma-separated numbers each), ``name``, and
an optional ``[params]`` section with named constants. Command line flags
override the file.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from .bivector import point_geometry
from .bundle import MetricParams
from .catalog import (
    FACTORIES, CatalogEntry, default_catalog, finite_difference_entry, get_entry, reoriented,
    user_entry, verification_digest,
)
from .chart import ChartError
from .classify import (
    TOLERANCE, CriticalTError, PreconditionError, SamplingConfig, classify, critical_t_search,
    tg_consistent, verify_theorems,
)
from .expr import ExpressionError

SCHEMA = 1
COMMANDS = ("decompose", "classify", "verify", "critical-t")
EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_WHICH = {1: "equal", 2: "t1", 3: "equal", 4: "t2"}


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    chart: str = "round_s4"
    chart_params: dict = field(default_factory=dict)
    metric: dict | None = None
    nu: list = field(default_factory=lambda: [1, 2, 3, 4])
    t1: float = 1.0
    t2: float = 1.0
    t_grid: list = field(default_factory=lambda: [[0.7, 1.3], [2.0, 0.5]])
    samples: int = 20
    kappas: int = 5
    seed: int = 0
    tol_tier: str = "analytic"
    out: str | None = None
    which: str | None = None  # critical-t default: t1 for nu=2, t2 for nu=4, equal otherwise
    distribution: str = "D"
    interval: list = field(default_factory=lambda: [1e-3, 10.0])
    clauses: list = field(default_factory=list)
    critical: bool = True

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.metric is None and self.chart not in FACTORIES:
            raise UsageError(f"unknown chart id {self.chart!r}; known: {', '.join(sorted(FACTORIES))}")
        if any(n not in (1, 2, 3, 4) for n in self.nu):
            raise UsageError("nu must be in 1..4")
        if self.t1 <= 0 or self.t2 <= 0:
            raise UsageError("t1 and t2 must be positive")
        if self.tol_tier not in TOLERANCE:
            raise UsageError(f"tol-tier must be one of {sorted(TOLERANCE)}")
        if self.samples < 1:
            raise UsageError("samples must be positive")
        if self.command in ("classify", "verify", "critical-t") and (
            self.samples < SamplingConfig.MIN_BASE or self.kappas < SamplingConfig.MIN_KAPPAS
        ):
            raise UsageError(
                f"{self.command} needs --samples >= {SamplingConfig.MIN_BASE} and kappas >= {SamplingConfig.MIN_KAPPAS}"
            )
        if self.which not in (None, "t1", "t2", "equal"):
            raise UsageError("which must be t1, t2 or equal")
        if self.distribution not in ("D", "perp"):
            raise UsageError("distribution must be D or perp")

    @property
    def sampling(self) -> SamplingConfig:
        return SamplingConfig(self.samples, self.kappas, self.seed)


def _number(text: str):
    v = float(text)
    return int(v) if v.is_integer() and "." not in text and "e" not in text.lower() else v


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]


def read_config(path: str) -> dict:
    """Settings from an INI file, as keyword arguments of RunConfig."""
    cp = configparser.ConfigParser()
    cp.optionxform = str
    if not cp.read(path):
        raise UsageError(f"cannot read config file {path!r}")
    out: dict = {}
    if cp.has_section("run"):
        run = cp["run"]
        for key in run:
            val = run[key]
            if key == "nu":
                out["nu"] = [int(v) for v in _floats(val)]
            elif key in ("t1", "t2"):
                out[key] = float(val)
            elif key in ("samples", "kappas", "seed"):
                out[key] = int(val)
            elif key == "interval":
                out[key] = _floats(val)
            elif key == "t_grid":
                out[key] = [_floats(pair.replace(":", ",")) for pair in val.split(",") if ":" in pair]
            elif key == "clauses":
                out[key] = [c.strip() for c in val.split(",") if c.strip()]
            elif key == "critical":
                out[key] = run.getboolean(key)
            elif key in ("command", "chart", "tol_tier", "out", "which", "distribution"):
                out[key] = val.strip()
            else:
                raise UsageError(f"unknown key {key!r} in [run]")
    if cp.has_section("chart"):
        out["chart_params"] = {k: _number(v) for k, v in cp["chart"].items()}
    if cp.has_section("metric"):
        m = dict(cp["metric"])
        metric = {
            "name": m.pop("name", "user"),
            "lower": _floats(m.pop("lower", "-1,-1,-1,-1")),
            "upper": _floats(m.pop("upper", "1,1,1,1")),
            "orientation": int(m.pop("orientation", "1")),
            "components": {},
            "params": {k: float(v) for k, v in cp["params"].items()} if cp.has_section("params") else {},
        }
        for key, val in m.items():
            if len(key) != 3 or key[0] != "g" or not key[1:].isdigit():
                raise UsageError(f"unknown key {key!r} in [metric]")
            a, b = sorted((int(key[1]), int(key[2])))
            if not (1 <= a <= 4 and 1 <= b <= 4):
                raise UsageError(f"metric index out of range in {key!r}")
            metric["components"][f"g{a}{b}"] = val
        out["metric"] = metric
    return out


def build_entry(cfg: RunConfig) -> CatalogEntry:
    if cfg.metric is not None:
        m = cfg.metric
        comps = [[m["components"].get(f"g{min(a, b)}{max(a, b)}", "0") for b in range(1, 5)] for a in range(1, 5)]
        entry = user_entry(m["name"], comps, m["lower"], m["upper"], m["params"], m["orientation"])
    else:
        try:
            entry = get_entry(cfg.chart, **cfg.chart_params)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad parameters for chart {cfg.chart!r}: {exc}") from None
    if cfg.tol_tier == "fd":
        entry = finite_difference_entry(entry)
    return entry


def _verify_entries(entries, tol):
    records = [e.verify(tol=tol) for e in entries]
    return records, verification_digest(records)


def _to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _to_jsonable(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def document(cfg: RunConfig, digest: str, result, passed: bool) -> str:
    doc = {
        "schema": SCHEMA,
        "command": cfg.command,
        "config": asdict(cfg),
        "catalog_digest": digest,
        "tolerance_tier": cfg.tol_tier,
        "tolerance": TOLERANCE[cfg.tol_tier],
        "passed": passed,
        "result": result,
    }
    return json.dumps(_to_jsonable(doc), sort_keys=True, indent=2) + "\n"


def _claims_ok(records) -> bool:
    return all(r["ok"] for r in records)


def cmd_decompose(cfg: RunConfig, entry: CatalogEntry, tol: float):
    records, digest = _verify_entries([entry], tol)
    rows = []
    for x in entry.sample_points(cfg.samples, cfg.seed):
        geo = point_geometry(entry.chart, x)
        n = geo.decomposition.norms()
        rows.append({
            "x": x.tolist(), "s": geo.scalar, **n,
            "einstein": n["B"] < tol, "self_dual": n["W_minus"] < tol, "anti_self_dual": n["W_plus"] < tol,
            "reconstruction": geo.decomposition.reconstruction_residual(),
        })
    lines = [f"{'s':>12} {'|B|':>10} {'|W+|':>10} {'|W-|':>10}  E SD ASD"]
    for r in rows:
        flags = " ".join("y" if r[k] else "n" for k in ("einstein", "self_dual", "anti_self_dual"))
        lines.append(f"{r['s']:12.6f} {r['B']:10.3e} {r['W_plus']:10.3e} {r['W_minus']:10.3e}  {flags}")
    passed = _claims_ok(records)
    return {"points": rows, "catalog": records}, passed, digest, lines


def cmd_classify(cfg: RunConfig, entry: CatalogEntry, tol: float):
    records, digest = _verify_entries([entry], tol)
    t = MetricParams(cfg.t1, cfg.t2)
    reports = [classify(nu, t, entry, cfg.sampling, tol) for nu in cfg.nu]
    lines = [f"chart {entry.id}  t = ({cfg.t1:g}, {cfg.t2:g})"]
    for rep in reports:
        pattern = " ".join(f"{k}:{v[0]}" for k, v in rep.pattern().items())
        lines.append(f"nu={rep.nu}  {rep.label:<14} {pattern}")
    passed = _claims_ok(records) and all(tg_consistent(r.conditions) for r in reports)
    return {"reports": [r.to_dict() for r in reports], "catalog": records}, passed, digest, lines


def cmd_verify(cfg: RunConfig, entry: CatalogEntry | None, tol: float):
    entries = default_catalog()
    if cfg.tol_tier == "fd":
        entries = [finite_difference_entry(e) for e in entries]
    records, digest = _verify_entries(entries, tol)
    rows = verify_theorems(entries, [tuple(p) for p in cfg.t_grid], cfg.sampling, cfg.clauses or None,
                           critical=cfg.critical, tol=tol, dual_entries=[reoriented(entries[2])])
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.clause}" for r in rows]
    passed = _claims_ok(records) and all(r.passed for r in rows)
    return {"clauses": [r.to_dict() for r in rows], "catalog": records}, passed, digest, lines


def cmd_critical_t(cfg: RunConfig, entry: CatalogEntry, tol: float):
    records, digest = _verify_entries([entry], tol)
    results = []
    lines = []
    for nu in cfg.nu:
        which = cfg.which or DEFAULT_WHICH[nu]
        fixed = cfg.t2 if which == "t1" else cfg.t1
        try:
            res = critical_t_search(nu, which, entry, tuple(cfg.interval), cfg.distribution, fixed,
                                    cfg.sampling, tol)
        except PreconditionError:
            raise
        except CriticalTError as exc:
            results.append({"nu": nu, "found": False, "error": str(exc)})
            lines.append(f"nu={nu}  no interior minimum")
            continue
        results.append(res.to_dict())
        if res.degenerate:
            lines.append(f"nu={nu}  residual vanishes for every t (max {res.residual:.2e})")
        else:
            lines.append(
                f"nu={nu}  t*={res.t_star:.10f} residual={res.residual:.2e} found={res.found} "
                f"6/s={res.six_over_s:.6f} 3/(8chi)={res.three_over_8chi if res.three_over_8chi else float('nan'):.6f}"
            )
    passed = _claims_ok(records) and all(r.get("found") or r.get("degenerate") for r in results)
    return {"searches": results, "catalog": records}, passed, digest, lines


HANDLERS = {
    "decompose": cmd_decompose,
    "classify": cmd_classify,
    "verify": cmd_verify,
    "critical-t": cmd_critical_t,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twistorprod", description=__doc__.split("\n")[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="INI file with a [run] section")
    parser.add_argument("--chart", help=f"catalog id: {', '.join(sorted(FACTORIES))}")
    parser.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                        help="chart parameter, e.g. r=2 or orientation=-1")
    parser.add_argument("--nu", help="comma-separated list of structures 1..4")
    parser.add_argument("--t1", type=float)
    parser.add_argument("--t2", type=float)
    parser.add_argument("--samples", type=int, help="number of base points")
    parser.add_argument("--kappas", type=int, help="fibre points per base point")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--tol-tier", choices=sorted(TOLERANCE))
    parser.add_argument("--which", choices=("t1", "t2", "equal"), help="parameter searched by critical-t")
    parser.add_argument("--distribution", choices=("D", "perp"))
    parser.add_argument("--clause", action="append", help="restrict verify to these clause ids")
    parser.add_argument("--no-critical", action="store_true", help="skip critical parameter rows in verify")
    parser.add_argument("--out", help="JSON output path ('-' for standard output)")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    settings = read_config(args.config) if args.config else {}
    settings["command"] = args.command
    if args.chart:
        settings["chart"] = args.chart
        settings.pop("metric", None)
    if args.param:
        params = dict(settings.get("chart_params", {}))
        for item in args.param:
            if "=" not in item:
                raise UsageError(f"--param expects KEY=VALUE, got {item!r}")
            k, v = item.split("=", 1)
            try:
                params[k.strip()] = _number(v.strip())
            except ValueError:
                raise UsageError(f"--param value must be numeric, got {item!r}") from None
        settings["chart_params"] = params
    if args.nu:
        try:
            settings["nu"] = [int(v) for v in args.nu.split(",")]
        except ValueError:
            raise UsageError(f"--nu expects integers, got {args.nu!r}") from None
    for key in ("t1", "t2", "samples", "kappas", "seed", "which", "distribution", "out"):
        val = getattr(args, key)
        if val is not None:
            settings[key] = val
    if args.tol_tier:
        settings["tol_tier"] = args.tol_tier
    if args.clause:
        settings["clauses"] = args.clause
    if args.no_critical:
        settings["critical"] = False
    if args.command == "decompose" and "samples" not in settings:
        settings["samples"] = 5
    cfg = RunConfig(**settings)
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    try:
        cfg = config_from_args(args)
        entry = build_entry(cfg) if cfg.command != "verify" else None
        tol = TOLERANCE[cfg.tol_tier]
        result, passed, digest, lines = HANDLERS[cfg.command](cfg, entry, tol)
    except (UsageError, PreconditionError, ExpressionError, ChartError, KeyError, configparser.Error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for line in lines:
        print(line)
    print("PASS" if passed else "FAIL")
    if cfg.out:
        text = document(cfg, digest, result, passed)
        if cfg.out == "-":
            sys.stdout.write(text)
        else:
            with open(cfg.out, "w") as fh:
                fh.write(text)
    return EXIT_PASS if passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
