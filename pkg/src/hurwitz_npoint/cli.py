"""Command line front end: compute, oracle, compare and Hurwitz tables."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from pathlib import Path

import yaml

from .closed_form import TaskSpec, compute_H, make_cache
from .graphs import MAX_N
from .model import ModelSpec
from .oracle import hurwitz_number, model_F, oracle_npoint, partitions_of
from .presets import PSI_PRESETS, make_spec
from .series import LaurentSeries, rational

log = logging.getLogger("hurwitz_npoint")

SCHEMA_VERSION = 1
MODES = ("compute", "oracle", "compare", "hurwitz-table")
FORMATS = ("json", "csv")
MAX_ORDER = 40


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    model: ModelSpec
    tasks: list[TaskSpec]
    mode: str = "compute"
    out: str | None = None
    fmt: str = "json"
    threads: int = 1
    source: dict = field(default_factory=dict)


# ----------------------------------------------------------------------
# config loading
# ----------------------------------------------------------------------

class _LineLoader(yaml.SafeLoader):
    pass


class _Mapping(dict):
    lines: dict


def _construct_mapping(loader, node):
    loader.flatten_mapping(node)
    out = _Mapping()
    out.lines = {}
    for knode, vnode in node.value:
        key = loader.construct_object(knode, deep=True)
        out[key] = loader.construct_object(vnode, deep=True)
        out.lines[key] = knode.start_mark.line + 1
    return out


_LineLoader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping)


def _where(mapping, key, path) -> str:
    line = getattr(mapping, "lines", {}).get(key)
    return f"{path}:{line}" if line else str(path)


def _rat(value, where: str) -> Fraction:
    if isinstance(value, float):
        raise ConfigError(f"{where}: {value!r} is a float; write rationals as strings like \"1/3\"")
    try:
        return rational(value)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(f"{where}: bad rational {value!r} ({exc})") from None


def _int(value, where: str, lo: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < lo:
        raise ConfigError(f"{where}: expected an integer >= {lo}, got {value!r}")
    return value


def parse_model(data, path="<config>", order: int = 8, gmax: int = 2, nmax: int = 4) -> ModelSpec:
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: 'model' must be a mapping")
    y = data.get("y")
    y_exact = bool(data.get("y_exact", True))
    if y is not None and not isinstance(y, dict):
        if not isinstance(y, list) or not y:
            raise ConfigError(f"{_where(data, 'y', path)}: 'y' must be a nonempty list or {{orbifold: q}}")
        y = [_rat(s, _where(data, "y", path)) for s in y]
    if "preset" in data:
        params = data.get("params") or {}
        if not isinstance(params, dict):
            raise ConfigError(f"{_where(data, 'params', path)}: 'params' must be a mapping")
        params = {k: (v if isinstance(v, int) else _rat(v, _where(params, k, path))) for k, v in params.items()}
        try:
            return make_spec(str(data["preset"]), order=order, y=y, g=gmax, n=nmax,
                             y_is_polynomial=y_exact, **params)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"{_where(data, 'preset', path)}: {exc}") from None
    if "psi" not in data:
        raise ConfigError(f"{path}: model needs either 'preset' or 'psi'")
    psi = data["psi"]
    if not isinstance(psi, list) or not psi:
        raise ConfigError(f"{_where(data, 'psi', path)}: 'psi' must be a nonempty list")
    psi = [_rat(c, _where(data, "psi", path)) for c in psi]
    if isinstance(y, dict):
        raise ConfigError(f"{_where(data, 'y', path)}: orbifold y needs a preset psi")
    return ModelSpec(tuple(psi), tuple(y or [Fraction(1)]), name=str(data.get("name", "custom")),
                     psi_exact=bool(data.get("psi_exact", False)), y_exact=y_exact)


def parse_config(data, path="<config>") -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    unknown = set(data) - {"model", "tasks", "mode", "output", "threads"}
    if unknown:
        k = sorted(unknown)[0]
        raise ConfigError(f"{_where(data, k, path)}: unknown key {k!r}")
    mode = data.get("mode", "compute")
    if mode not in MODES:
        raise ConfigError(f"{_where(data, 'mode', path)}: mode must be one of {MODES}")
    raw_tasks = data.get("tasks")
    if not isinstance(raw_tasks, list) or not raw_tasks:
        raise ConfigError(f"{_where(data, 'tasks', path)}: 'tasks' must be a nonempty list")
    tasks = []
    for t in raw_tasks:
        if not isinstance(t, dict):
            raise ConfigError(f"{_where(data, 'tasks', path)}: each task must be a mapping")
        w = lambda k: _where(t, k, path)  # noqa: E731
        missing = {"g", "n", "order"} - set(t)
        if missing:
            raise ConfigError(f"{w('g')}: task missing {sorted(missing)}")
        task = TaskSpec(_int(t["g"], w("g"), 0), _int(t["n"], w("n"), 1), _int(t["order"], w("order"), 1))
        if task.n > MAX_N:
            raise ConfigError(f"{w('n')}: n = {task.n} exceeds the supported maximum {MAX_N}")
        if task.order > MAX_ORDER:
            raise ConfigError(f"{w('order')}: order {task.order} exceeds {MAX_ORDER}")
        tasks.append(task)
    order = max(t.order for t in tasks)
    gmax = max(t.g for t in tasks)
    nmax = max(t.n for t in tasks)
    model = parse_model(data.get("model", {"preset": "usual"}), path, order, gmax, nmax)
    out = data.get("output") or {}
    if not isinstance(out, dict):
        raise ConfigError(f"{_where(data, 'output', path)}: 'output' must be a mapping")
    fmt = out.get("format", "json")
    if fmt not in FORMATS:
        raise ConfigError(f"{_where(out, 'format', path)}: format must be json or csv")
    threads = _int(data.get("threads", 1), _where(data, "threads", path), 1)
    return RunConfig(model, tasks, mode, out.get("path"), fmt, threads, dict(data))


def load_config(path) -> RunConfig:
    """Read a YAML run configuration; errors carry file:line diagnostics."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    try:
        data = yaml.load(text, Loader=_LineLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        loc = f"{path}:{mark.line + 1}" if mark else str(path)
        raise ConfigError(f"{loc}: YAML parse error: {getattr(exc, 'problem', exc)}") from None
    return parse_config(data, path)


# ----------------------------------------------------------------------
# running
# ----------------------------------------------------------------------

def monomial_name(z, n: int) -> str:
    names = ["z"] if n == 1 else [f"z{i}" for i in range(1, n + 1)]
    parts = [nm if a == 1 else f"{nm}^{a}" for nm, a in zip(names, z) if a]
    return "*".join(parts) or "1"


def parse_monomial(name: str, n: int) -> tuple[int, ...]:
    out = [0] * n
    if name == "1":
        return tuple(out)
    for part in name.split("*"):
        base, _, exp = part.partition("^")
        idx = 1 if base == "z" else int(base[1:])
        out[idx - 1] += int(exp) if exp else 1
    return tuple(out)


def _graded_lex(z):
    return (sum(z), tuple(-a for a in z))


def coefficient_table(f: LaurentSeries) -> dict[str, str]:
    n = f.ctx.n
    rows = []
    for key, c in f.terms.items():
        z = f.ctx.exponents(key)[0]
        rows.append((_graded_lex(z), monomial_name(z, n), str(c)))
    rows.sort()
    return {name: c for _, name, c in rows}


def _diff(a: LaurentSeries, b: LaurentSeries):
    keys = sorted(set(a.terms) | set(b.terms), key=lambda k: _graded_lex(a.ctx.exponents(k)[0]))
    for k in keys:
        ca, cb = a.terms.get(k, Fraction(0)), b.terms.get(k, Fraction(0))
        if ca != cb:
            return monomial_name(a.ctx.exponents(k)[0], a.ctx.n), ca, cb
    return None


def _run_task(args):
    mode, spec, task = args
    out = {"g": task.g, "n": task.n, "order": task.order}
    if mode == "hurwitz-table":
        F = model_F(spec, task.order, task.n, task.g)
        rows = []
        for w in range(task.n, task.order + 1):
            for lam in partitions_of(w):
                if len(lam) == task.n:
                    rows.append({"mu": list(lam.parts), "h": str(hurwitz_number(task.g, lam.parts, F))})
        out["rows"] = rows
        return out, None
    H = O = None
    if mode in ("compute", "compare"):
        H = compute_H(task, make_cache(spec, task))
    if mode in ("oracle", "compare"):
        F = model_F(spec, task.order, task.n, task.g)
        O = oracle_npoint(task.g, task.n, F, spec, task.order)
    out["coefficients"] = coefficient_table(H if H is not None else O)
    verdict = None
    if mode == "compare":
        count = comb(task.order + task.n, task.n)
        d = _diff(H, O)
        verdict = {"g": task.g, "n": task.n, "order": task.order}
        if d is None:
            verdict.update(match=True, verdict=f"MATCH ({count} coefficients)")
        else:
            name, ch, co = d
            verdict.update(match=False, verdict=f"MISMATCH at {name}: closed form {ch}, oracle {co}",
                           first_mismatch={"monomial": name, "closed_form": str(ch), "oracle": str(co)})
    return out, verdict


def run(config: RunConfig) -> dict:
    """Execute every task; the report is independent of the thread count."""
    jobs = [(config.mode, config.model, t) for t in config.tasks]
    if config.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(_run_task, jobs))
    else:
        results = [_run_task(j) for j in jobs]
    report = {
        "schema_version": SCHEMA_VERSION,
        "mode": config.mode,
        "model": config.model.to_json(),
        "tasks": [r for r, _ in results],
        "verdicts": [v for _, v in results if v is not None],
    }
    return report


def report_ok(report: dict) -> bool:
    return all(v.get("match", True) for v in report.get("verdicts", []))


def emit(report: dict, fmt: str = "json", path=None) -> str:
    """Serialise a report (deterministically) and write it to ``path`` if given."""
    if fmt == "json":
        text = json.dumps(report, indent=2) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for t in report.get("tasks", []):
            tag = [f"g={t['g']}", f"n={t['n']}"]
            for mono, c in t.get("coefficients", {}).items():
                w.writerow(tag + [mono, c])
            for row in t.get("rows", []):
                w.writerow(tag + ["mu=" + ".".join(map(str, row["mu"])), row["h"]])
        for v in report.get("verdicts", []):
            w.writerow([f"g={v['g']}", f"n={v['n']}", "verdict", v["verdict"]])
        text = buf.getvalue()
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path:
        Path(path).write_text(text)
    return text


def read_report(text: str, fmt: str = "json") -> dict:
    """Parse emitted output back to {(g, n): {z-exponents: Fraction}}."""
    out: dict = {}
    if fmt == "json":
        for t in json.loads(text)["tasks"]:
            n = t["n"]
            out[(t["g"], n)] = {parse_monomial(m, n): Fraction(c) for m, c in t.get("coefficients", {}).items()}
        return out
    for row in csv.reader(io.StringIO(text)):
        if len(row) != 4 or row[2] == "verdict" or row[2].startswith("mu="):
            continue
        g, n = int(row[0][2:]), int(row[1][2:])
        out.setdefault((g, n), {})[parse_monomial(row[2], n)] = Fraction(row[3])
    return out


# ----------------------------------------------------------------------
# argparse
# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hurwitz-npoint", description="n-point functions of weighted Hurwitz numbers")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("compute", "closed formula"), ("oracle", "brute-force Schur expansion"),
                        ("compare", "closed formula against the oracle"), ("table", "Hurwitz numbers h_{g,mu}")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", help="YAML run configuration")
        sp.add_argument("--order", type=int)
        sp.add_argument("--g", type=int)
        sp.add_argument("--n", type=int)
        sp.add_argument("--preset", choices=sorted(PSI_PRESETS))
        sp.add_argument("--out")
        sp.add_argument("--format", choices=FORMATS)
        sp.add_argument("--threads", type=int)
        sp.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args) -> RunConfig:
    mode = "hurwitz-table" if args.command == "table" else args.command
    if args.config:
        cfg = load_config(args.config)
        data = dict(cfg.source)
    else:
        data = {"model": {"preset": "usual"}, "tasks": [{"g": 0, "n": 1, "order": 6}]}
    data["mode"] = mode
    if args.preset:
        model = dict(data.get("model") or {})
        model.pop("psi", None)
        model["preset"] = args.preset
        data["model"] = model
    if any(v is not None for v in (args.g, args.n, args.order)):
        tasks = data["tasks"]
        data["tasks"] = [
            {"g": args.g if args.g is not None else t["g"],
             "n": args.n if args.n is not None else t["n"],
             "order": args.order if args.order is not None else t["order"]}
            for t in tasks
        ]
    out = dict(data.get("output") or {})
    if args.out:
        out["path"] = args.out
    if args.format:
        out["format"] = args.format
    data["output"] = out
    if args.threads:
        data["threads"] = args.threads
    return parse_config(data, args.config or "<command line>")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = run(cfg)
    text = emit(report, cfg.fmt, cfg.out)
    if not cfg.out:
        sys.stdout.write(text)
    for v in report["verdicts"]:
        log.info("(g,n)=(%d,%d) order %d: %s", v["g"], v["n"], v["order"], v["verdict"])
    return 0 if report_ok(report) else 1


if __name__ == "__main__":
    sys.exit(main())
