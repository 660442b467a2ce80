"""Batch runner: solve every requested Sigma representation with every requested method.

    python -m thermoneutronic --sigma 8 6 3 --methods analytic cn --out results

writes ``report.json``, ``table.csv``, ``profile_<kind>.csv`` (z,h,phi) and
``sigma_v_<kind>.csv`` (h,sigma,v). Exit status is 0 on success, 2 if some
case failed and 1 for an invalid configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .analytic import solve_lambda
from .cn import solve_lambda_discrete
from .coupling import coupling_iterate
from .errors import ConfigError, ThermoNeutronicError
from .model import Kind, build_model, make_samples, sigma_eval, v_eval

__all__ = ["RunConfig", "CaseReport", "parse_config", "run", "main"]

METHODS = ("analytic", "quadrature", "cn", "coupling")
FORMATS = ("json", "csv")
DEFAULT_TOLERANCES = {"analytic": 1e-12, "quadrature": 1e-10, "cn": 1e-12, "coupling": 1e-10}
SCHEMA = 1
PROFILE_POINTS = 201
SIGMA_V_POINTS = 101


@dataclass(frozen=True)
class RunConfig:
    sigma0: float = 8.0
    sigma_half: float = 6.0
    sigma1: float = 3.0
    kinds: tuple[Kind, ...] = tuple(Kind)
    methods: tuple[str, ...] = METHODS
    cn_meshes: tuple[int, ...] = (40, 80, 160, 320, 640, 1280)
    coupling_grid: int = 800
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    out: Path = Path("results")
    formats: tuple[str, ...] = FORMATS


@dataclass
class CaseReport:
    kind: str
    analytic_lambda: float | None = None
    analytic_keff: float | None = None
    case_tag: str | None = None
    half_tags: list = field(default_factory=list)
    quadrature_lambda: float | None = None
    cn_series: list = field(default_factory=list)  # (N, lambda_N, order)
    coupling_lambda: float | None = None
    coupling_iterations: int | None = None
    coupling_converged: bool | None = None
    wall_times: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)
    profile: np.ndarray | None = field(default=None, repr=False)
    sigma_v: np.ndarray | None = field(default=None, repr=False)

    @property
    def failed(self) -> bool:
        return bool(self.errors)

    def to_json(self) -> dict:
        d = asdict(self)
        d.pop("profile")
        d.pop("sigma_v")
        d["cn_series"] = [list(row) for row in self.cn_series]
        return d


# ---------------------------------------------------------------------------
# configuration


def _kind(name) -> Kind:
    if isinstance(name, Kind):
        return name
    key = str(name).strip().lower().replace("-", "_")
    for kind in Kind:
        if key in (kind.value, kind.name.lower()):
            return kind
    raise ConfigError(f"kinds: unknown kind {name!r} (choose from {', '.join(k.value for k in Kind)})")


def _split(values) -> list[str]:
    if isinstance(values, str):
        values = [values]
    out = []
    for v in values:
        out.extend(p for p in str(v).split(",") if p.strip())
    return [p.strip() for p in out]


def _number(text, what, cast=float):
    try:
        value = cast(text)
    except (TypeError, ValueError):
        raise ConfigError(f"{what}: not a valid number: {text!r}") from None
    if cast is float and not np.isfinite(value):
        raise ConfigError(f"{what}: must be finite, got {text!r}")
    return value


def _validate(cfg: RunConfig) -> RunConfig:
    for name in ("sigma0", "sigma_half", "sigma1"):
        if not getattr(cfg, name) > 0:
            raise ConfigError(f"{name}: cross-section samples must be positive, got {getattr(cfg, name)!r}")
    if not cfg.kinds:
        raise ConfigError("kinds: at least one kind is required")
    if not cfg.methods:
        raise ConfigError("methods: at least one method is required")
    for m in cfg.methods:
        if m not in METHODS:
            raise ConfigError(f"methods: unknown method {m!r} (choose from {', '.join(METHODS)})")
    if "cn" in cfg.methods and not cfg.cn_meshes:
        raise ConfigError("cn_meshes: at least one mesh is required for the cn method")
    for n in cfg.cn_meshes:
        if n < 2:
            raise ConfigError(f"cn_meshes: meshes must be >= 2, got {n}")
    if cfg.coupling_grid < 10:
        raise ConfigError(f"coupling_grid: must be >= 10, got {cfg.coupling_grid}")
    for name, value in cfg.tolerances.items():
        if name not in DEFAULT_TOLERANCES:
            raise ConfigError(f"tolerances: unknown tolerance {name!r} (choose from {', '.join(DEFAULT_TOLERANCES)})")
        if not value > 0:
            raise ConfigError(f"tolerances: {name} must be positive, got {value!r}")
    if not cfg.formats:
        raise ConfigError("formats: at least one output format is required")
    for f in cfg.formats:
        if f not in FORMATS:
            raise ConfigError(f"formats: unknown format {f!r} (choose from {', '.join(FORMATS)})")
    return cfg


def _from_mapping(data: dict, base: RunConfig) -> RunConfig:
    known = {f for f in RunConfig.__dataclass_fields__}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"config: unknown field(s) {', '.join(sorted(unknown))}")
    updates = {}
    for name in ("sigma0", "sigma_half", "sigma1"):
        if name in data:
            updates[name] = _number(data[name], name)
    if "kinds" in data:
        updates["kinds"] = tuple(_kind(k) for k in _split(data["kinds"]))
    if "methods" in data:
        updates["methods"] = tuple(_split(data["methods"]))
    if "cn_meshes" in data:
        updates["cn_meshes"] = tuple(_number(n, "cn_meshes", int) for n in _split(data["cn_meshes"]))
    if "coupling_grid" in data:
        updates["coupling_grid"] = _number(data["coupling_grid"], "coupling_grid", int)
    if "tolerances" in data:
        if not isinstance(data["tolerances"], dict):
            raise ConfigError("tolerances: expected a mapping of name to value")
        tols = dict(base.tolerances)
        for k, v in data["tolerances"].items():
            tols[k] = _number(v, f"tolerances.{k}")
        updates["tolerances"] = tols
    if "out" in data:
        updates["out"] = Path(data["out"])
    if "formats" in data:
        updates["formats"] = tuple(_split(data["formats"]))
    return replace(base, **updates)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="thermoneutronic", description="Criticality eigenvalue of the coupled neutronics/enthalpy problem.")
    p.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    p.add_argument("--sigma", nargs=3, metavar=("S0", "SHALF", "S1"), help="cross section at h = 0, 1/2, 1")
    p.add_argument("--kinds", nargs="+", help="Sigma representations (comma or space separated)")
    p.add_argument("--methods", nargs="+", help=f"subset of {','.join(METHODS)}")
    p.add_argument("--cn-meshes", nargs="+", help="mesh sizes N for the discrete solve")
    p.add_argument("--coupling-grid", help="interior points M of the coupling grid")
    p.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE", help="solver tolerance override")
    p.add_argument("--out", help="output directory")
    p.add_argument("--format", help="comma-separated subset of json,csv")
    return p


def parse_config(argv=None) -> RunConfig:
    """Build a RunConfig from command-line flags and an optional JSON file.

    Raises
    ------
    ConfigError
        Naming the offending flag or field.
    """
    args = _parser().parse_args(argv)
    cfg = RunConfig()
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError(f"--config: cannot read {args.config!r}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--config: invalid JSON in {args.config!r}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("--config: top level must be a JSON object")
        cfg = _from_mapping(data, cfg)

    flags = {}
    if args.sigma is not None:
        s0, sh, s1 = (_number(v, "--sigma") for v in args.sigma)
        flags.update(sigma0=s0, sigma_half=sh, sigma1=s1)
    if args.kinds is not None:
        flags["kinds"] = args.kinds
    if args.methods is not None:
        flags["methods"] = args.methods
    if args.cn_meshes is not None:
        flags["cn_meshes"] = [_number(n, "--cn-meshes", int) for n in _split(args.cn_meshes)]
    if args.coupling_grid is not None:
        flags["coupling_grid"] = _number(args.coupling_grid, "--coupling-grid", int)
    if args.tol:
        tols = {}
        for item in args.tol:
            name, sep, value = item.partition("=")
            if not sep:
                raise ConfigError(f"--tol: expected NAME=VALUE, got {item!r}")
            tols[name.strip()] = _number(value, f"--tol {name.strip()}")
        flags["tolerances"] = {**cfg.tolerances, **tols}
    if args.out is not None:
        flags["out"] = args.out
    if args.format is not None:
        flags["formats"] = args.format
    return _validate(_from_mapping(flags, cfg))


# ---------------------------------------------------------------------------
# execution


def _error_text(exc: Exception) -> str:
    return f"{type(exc).__name__}: {exc}"


def _run_case(cfg: RunConfig, kind: Kind) -> CaseReport:
    rep = CaseReport(kind=kind.value)
    try:
        model = build_model(make_samples(cfg.sigma0, cfg.sigma_half, cfg.sigma1), kind)
    except ThermoNeutronicError as exc:
        rep.errors["model"] = _error_text(exc)
        return rep

    h = np.linspace(0.0, 1.0, SIGMA_V_POINTS)
    rep.sigma_v = np.column_stack([h, sigma_eval(model, h), v_eval(model, h)])
    tols = cfg.tolerances
    profile_sources = {}

    def timed(name, func):
        t0 = time.perf_counter()
        try:
            return func()
        except Exception as exc:  # one failing method must not abort the batch
            rep.errors[name] = _error_text(exc)
            return None
        finally:
            rep.wall_times[name] = time.perf_counter() - t0

    reference = None
    if "analytic" in cfg.methods:
        res = timed("analytic", lambda: solve_lambda(model, tol=tols["analytic"], n_profile=PROFILE_POINTS))
        if res is not None:
            reference = res.lam
            rep.analytic_lambda, rep.analytic_keff = res.lam, res.keff
            rep.case_tag = res.case_tag.value
            rep.half_tags = [t.value for t in res.half_tags]
            profile_sources["analytic"] = res.profile

    if "quadrature" in cfg.methods:
        res = timed("quadrature", lambda: solve_lambda(model, tol=tols["quadrature"], method="quadrature", n_profile=0))
        if res is not None:
            rep.quadrature_lambda = res.lam
            reference = reference if reference is not None else res.lam

    if "cn" in cfg.methods:
        def cn_series():
            rows, prev = [], None
            for n in cfg.cn_meshes:
                sol = solve_lambda_discrete(model, n, tol=tols["cn"])
                order = None
                if reference is not None and prev is not None and n != prev[0]:
                    e0, e1 = abs(prev[1] - reference), abs(sol.lam - reference)
                    if e0 > 0.0 and e1 > 0.0:
                        order = float(np.log(e0 / e1) / np.log(n / prev[0]))
                rows.append((n, sol.lam, order))
                prev = (n, sol.lam)
            return rows, sol

        out = timed("cn", cn_series)
        if out is not None:
            rep.cn_series, sol = out
            profile_sources["cn"] = np.column_stack([sol.z, sol.h, sol.phi])

    if "coupling" in cfg.methods:
        st = timed("coupling", lambda: coupling_iterate(model, cfg.coupling_grid, tol=tols["coupling"]))
        if st is not None:
            rep.coupling_lambda = st.lam
            rep.coupling_iterations = st.iterations
            rep.coupling_converged = st.converged
            if not st.converged:
                rep.errors["coupling"] = f"MaxIterExceeded: no convergence in {st.iterations} passes"
            profile_sources["coupling"] = np.column_stack([st.z, st.h, st.phi])

    for name in ("analytic", "cn", "coupling"):
        if name in profile_sources:
            rep.profile = profile_sources[name]
            break
    return rep


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x) + 0.0, ".12g")  # + 0.0 folds -0.0 into 0


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _render(cfg: RunConfig, reports) -> dict[str, str]:
    files = {}
    if "csv" in cfg.formats:
        header = ("kind", "lambda_analytic", "keff", "lambda_cn", "cn_order", "lambda_coupling", "coupling_iterations")
        rows = []
        for rep in reports:
            _, cn_lam, cn_order = rep.cn_series[-1] if rep.cn_series else (None, None, None)
            rows.append((rep.analytic_lambda, rep.analytic_keff, cn_lam, cn_order, rep.coupling_lambda, rep.coupling_iterations))
        body = _csv(header[1:], rows).splitlines()
        lines = [",".join(header)] + [f"{rep.kind},{line}" for rep, line in zip(reports, body[1:])]
        files["table.csv"] = "\n".join(lines) + "\n"
        for rep in reports:
            if rep.profile is not None:
                files[f"profile_{rep.kind}.csv"] = _csv(("z", "h", "phi"), rep.profile)
            if rep.sigma_v is not None:
                files[f"sigma_v_{rep.kind}.csv"] = _csv(("h", "sigma", "v"), rep.sigma_v)
    if "json" in cfg.formats:
        config = asdict(cfg)
        config["kinds"] = [k.value for k in cfg.kinds]
        config["out"] = str(cfg.out)
        payload = {"schema": SCHEMA, "config": config, "cases": [r.to_json() for r in reports]}
        files["report.json"] = json.dumps(payload, indent=2) + "\n"
    return files


def _write_all(out: Path, files: dict[str, str]) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        fd, tmp = tempfile.mkstemp(dir=out, prefix=f".{name}.")
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, out / name)


def run(config: RunConfig) -> list[CaseReport]:
    """Run every requested kind and method, then write all outputs at once."""
    cfg = _validate(config)
    reports = [_run_case(cfg, kind) for kind in cfg.kinds]
    _write_all(Path(cfg.out), _render(cfg, reports))
    return reports


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    reports = run(cfg)
    for rep in reports:
        if rep.analytic_lambda is not None:
            print(f"{rep.kind:16s} lambda={rep.analytic_lambda:.6f} keff={rep.analytic_keff:.6f}")
        for name, msg in rep.errors.items():
            print(f"{rep.kind:16s} {name} failed: {msg}", file=sys.stderr)
    return 2 if any(r.failed for r in reports) else 0
