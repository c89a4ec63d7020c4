"""Batch driver: ``sharpbergman {verify,bounds,search,entropy,constants}``.

Configuration is an INI file (``--config``); command-line flags override
its ``[run]`` section. Results go to ``--out`` (stdout when omitted) as
CSV or JSON with 17 significant digits; a ``.meta.json`` sidecar next to
the output file carries the timestamp so the result file itself is
byte-identical across reruns.

Exit status: 0 success, 1 numeric failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, forms
from .functionals import ConvergenceError, entropy_disc, entropy_halfplane
from .optimize import COUNTEREXAMPLE_THRESHOLD, search_extremal_disc
from .quad import QuadratureError, Tolerance
from .trial import DISC, to_mapping, to_text, trial_from_mapping
from .verify import BatteryGrids, bounds_ledger, run_battery, summarize

__all__ = ["RunConfig", "ConfigError", "load_config", "run", "main"]

SUBCOMMANDS = ("verify", "bounds", "search", "entropy", "constants")
ENTROPY_FLOOR = math.log(3.0) / 2.0

# section -> {key: (parser, default)}
_SCHEMA = {
    "run": {
        "seed": (int, 0),
        "tol": (float, None),
        "format": (str, "csv"),
        "out": (str, None),
    },
    "verify": {
        "gamma_nodes": (int, 60),
        "monomial_n_max": (int, 50),
        "monomial_s_nodes": (int, 20),
        "monotone_nodes": (int, 500),
        "ordering_nodes": (int, 50),
        "oracles": ("bool", True),
    },
    "bounds": {
        "s_start": (float, 1.05),
        "s_stop": (float, 3.95),
        "s_step": (float, 0.05),
    },
    "search": {
        "s": (float, 2.0),
        "degree": (int, 3),
        "restarts": (int, 4),
        "threshold": (float, COUNTEREXAMPLE_THRESHOLD),
    },
    "constants": {
        "s_values": ("floats", (1.0, 1.5, 2.0, 2.5, 3.0)),
    },
}
_TRIAL_PREFIX = "trial:"
_TRIAL_KEY = re.compile(r"^(source\.)*(variant|p|z0|terms|coeffs|xi|factor)$")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending line."""


@dataclass
class RunConfig:
    """Validated run configuration (defaults live in the schema above)."""

    subcommand: str
    seed: int = 0
    tolerance: Tolerance | None = None
    output_path: str | None = None
    output_format: str = "csv"
    sections: dict = field(default_factory=dict)
    trials: dict = field(default_factory=dict)

    def section(self, name):
        values = {k: default for k, (_, default) in _SCHEMA[name].items()}
        values.update(self.sections.get(name, {}))
        return values


def _line_numbers(text):
    """Map (section, key) and section headers to 1-based line numbers."""
    where = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        m = re.match(r"^\[(.+)\]$", line)
        if m:
            section = m.group(1).strip()
            where.setdefault((section, None), lineno)
            continue
        m = re.match(r"^([^=:]+?)\s*[=:]", line)
        if m and section is not None:
            where.setdefault((section, m.group(1).strip()), lineno)
    return where


def _convert(kind, text, where):
    try:
        if kind == "bool":
            low = text.strip().lower()
            if low in ("1", "yes", "true", "on"):
                return True
            if low in ("0", "no", "false", "off"):
                return False
            raise ValueError(text)
        if kind == "floats":
            vals = tuple(float(v) for v in text.replace(",", " ").split())
            if not vals:
                raise ValueError(text)
            return vals
        return kind(text)
    except ValueError:
        raise ConfigError(f"{where}: cannot parse value {text!r}") from None


def load_config(text: str, source: str = "<config>") -> dict:
    """Parse INI text into ``{"sections": ..., "trials": ...}``.

    Unknown sections or keys raise :class:`ConfigError` with the line
    number of the offending entry.
    """
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc).replace("\n", " ")) from None
    lines = _line_numbers(text)
    sections, trials = {}, {}
    for name in parser.sections():
        if name.startswith(_TRIAL_PREFIX):
            label = name[len(_TRIAL_PREFIX):].strip()
            data = dict(parser[name])
            for key in data:
                if not _TRIAL_KEY.match(key):
                    raise ConfigError(
                        f"{source}:{lines.get((name, key), '?')}: unknown trial key {key!r}"
                    )
            try:
                trials[label] = trial_from_mapping(data)
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"{source}:{lines.get((name, None), '?')}: [{name}] {exc}") from None
            continue
        if name not in _SCHEMA:
            raise ConfigError(f"{source}:{lines.get((name, None), '?')}: unknown section [{name}]")
        values = {}
        for key, text_value in parser[name].items():
            where = f"{source}:{lines.get((name, key), '?')}"
            if key not in _SCHEMA[name]:
                raise ConfigError(f"{where}: unknown key {key!r} in [{name}]")
            values[key] = _convert(_SCHEMA[name][key][0], text_value, where)
        sections[name] = values
    return {"sections": sections, "trials": trials}


# --- output -------------------------------------------------------------------


def _num(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float) or isinstance(x, np.floating):
        return format(float(x), ".17g")
    return str(x)


def _json_value(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return float(format(x, ".17g")) if math.isfinite(x) else str(x)
    if isinstance(x, dict):
        return {k: _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    return x


def render(columns, rows, fmt, extra=None) -> str:
    """Rows (dicts) as CSV or JSON text; ``extra`` adds top-level JSON keys."""
    if fmt == "json":
        doc = {"columns": list(columns), "rows": [{c: _json_value(r.get(c)) for c in columns} for r in rows]}
        if extra:
            doc.update(_json_value(extra))
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_num(r.get(c)) for c in columns])
    return buf.getvalue()


def _emit(text, cfg, argv, suffix_files=None):
    if cfg.output_path is None:
        sys.stdout.write(text)
        for _, body in suffix_files or ():
            sys.stdout.write(body)
        return
    out = Path(cfg.output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    written = [str(out)]
    for suffix, body in suffix_files or ():
        extra = out.with_name(out.name + suffix)
        extra.write_text(body)
        written.append(str(extra))
    meta = {
        "created": datetime.now(timezone.utc).isoformat(),
        "version": __version__,
        "subcommand": cfg.subcommand,
        "argv": list(argv),
        "files": written,
    }
    out.with_name(out.name + ".meta.json").write_text(json.dumps(meta, indent=2) + "\n")


# --- subcommands --------------------------------------------------------------


def _grids(opts):
    k = opts["gamma_nodes"]
    rs = tuple(float(v) for v in np.logspace(0.0, 1.0, k + 1)[1:]) if k > 0 else ()
    mono_s = tuple(float(v) for v in np.linspace(1.0, 10.0, opts["monomial_s_nodes"]))
    nodes = tuple(float(v) for v in np.logspace(-2.0, 4.0, opts["monotone_nodes"]))
    m = opts["ordering_nodes"]
    ordering = []
    for n in (1, 2, 3):
        ordering.extend(float(v) for v in np.linspace(n, n + 0.5, m + 2)[1:-1])
    default = BatteryGrids.default()
    return BatteryGrids(
        gamma_r=((2.0,) + rs) if rs else (),
        gamma_s=rs,
        monomial_n=tuple(range(opts["monomial_n_max"] + 1)) if mono_s else (),
        monomial_s=mono_s,
        concavity_s=(1.1, 2.0, 5.0, 10.0),
        u_grid=nodes,
        t_grid=nodes if len(nodes) >= 2 else (),
        ordering_s=tuple(ordering),
        kernel_moment=default.kernel_moment if opts["oracles"] else (),
        simplex=default.simplex if opts["oracles"] else (),
    )


def _cmd_verify(cfg, argv):
    records = run_battery(_grids(cfg.section("verify")))
    cols = ["inequality_id", "params", "lhs", "rhs", "margin", "pass", "tolerance"]
    rows = []
    for r in records:
        d = r.as_dict()
        if cfg.output_format == "csv":
            d["params"] = ";".join(f"{k}={_num(v)}" for k, v in r.params.items())
        rows.append(d)
    passed, total = summarize(records)
    _emit(render(cols, rows, cfg.output_format, {"passed": passed, "total": total}), cfg, argv)
    if passed == total:
        print(f"PASS {passed}/{total}", file=sys.stderr if cfg.output_path is None else sys.stdout)
        return 0
    for r in records:
        if not r.pass_:
            print(f"failed: {r.inequality_id} {r.params} margin={_num(r.margin)}", file=sys.stderr)
    print(f"FAIL {total - passed}/{total}", file=sys.stderr if cfg.output_path is None else sys.stdout)
    return 1


def _s_grid(start, stop, step):
    if not (step > 0 and stop >= start):
        raise ConfigError(f"bad s grid: start={start}, stop={stop}, step={step}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    # rounding keeps grid values such as 1.1 free of accumulated step error
    return [round(start + k * step, 12) for k in range(count)]


def _cmd_bounds(cfg, argv):
    opts = cfg.section("bounds")
    grid = _s_grid(opts["s_start"], opts["s_stop"], opts["s_step"])
    if grid[0] <= 1.0:
        raise ConfigError("bounds need s > 1")
    rows = [bounds_ledger(s).as_row() for s in grid]
    cols = ["s", "phi_lower", "kernel_lower", "interpolation", "coarse", "prelim", "minkowski"]
    _emit(render(cols, rows, cfg.output_format), cfg, argv)
    return 0


def _cmd_search(cfg, argv):
    opts = cfg.section("search")
    found = search_extremal_disc(
        opts["s"], opts["degree"], opts["restarts"], cfg.seed, threshold=opts["threshold"]
    )
    res = found.result
    summary = {
        "s": float(opts["s"]),
        "degree": int(opts["degree"]),
        "seed": int(cfg.seed),
        "best_value": res.best_value,
        "checked_value": found.checked_value,
        "counterexample": found.counterexample,
        "threshold": found.threshold,
        "iterations": res.iterations,
        "restarts_used": res.restarts_used,
        "converged": res.converged,
        "best_params": res.best_params,
    }
    rows = [{"iteration": i, "value": v} for i, v in res.history]
    trial_text = to_text(found.best_trial)
    if cfg.output_format == "json":
        summary["trial"] = to_mapping(found.best_trial)
        _emit(render(["iteration", "value"], rows, "json", {"result": summary}), cfg, argv)
    else:
        lines = []
        for k, v in summary.items():
            if isinstance(v, list):
                v = " ".join(_num(x) for x in v)
            lines.append(f"{k} = {_num(v)}\n")
        sidecar = "".join(lines) + "".join(f"trial.{line}" for line in trial_text.splitlines(True))
        _emit(render(["iteration", "value"], rows, "csv"), cfg, argv, [(".result.txt", sidecar)])
    if found.counterexample:
        print(
            f"counterexample candidate: normalized ratio {_num(found.checked_value)} "
            f"exceeds {_num(found.threshold)}",
            file=sys.stderr,
        )
        return 1
    return 0


def _cmd_entropy(cfg, argv):
    if not cfg.trials:
        raise ConfigError("entropy needs at least one [trial:NAME] section")
    rows = []
    failed = []
    for name, F in cfg.trials.items():
        fn = entropy_disc if F.domain == DISC else entropy_halfplane
        value = fn(F, cfg.tolerance)
        ok = value >= ENTROPY_FLOOR - 1e-6
        rows.append({"name": name, "domain": F.domain, "entropy": value, "floor": ENTROPY_FLOOR, "pass": ok})
        if not ok:
            failed.append(name)
    _emit(render(["name", "domain", "entropy", "floor", "pass"], rows, cfg.output_format), cfg, argv)
    for name in failed:
        print(f"failed: entropy of {name} below (log 3)/2", file=sys.stderr)
    return 1 if failed else 0


def _cmd_constants(cfg, argv):
    rows = []
    for s in cfg.section("constants")["s_values"]:
        c = forms.sharp_constant(s)
        rows.append({"s": c.s, "halfplane": c.halfplane_value, "disc": c.disc_value})
    _emit(render(["s", "halfplane", "disc"], rows, cfg.output_format), cfg, argv)
    return 0


_COMMANDS = {
    "verify": _cmd_verify,
    "bounds": _cmd_bounds,
    "search": _cmd_search,
    "entropy": _cmd_entropy,
    "constants": _cmd_constants,
}


def run(config: RunConfig, argv=()) -> int:
    """Execute one subcommand; returns the exit status."""
    try:
        return _COMMANDS[config.subcommand](config, argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, QuadratureError, ArithmeticError, ValueError) as exc:
        print(f"numeric failure in {config.subcommand}: {exc}", file=sys.stderr)
        return 1


def _build_parser():
    p = argparse.ArgumentParser(
        prog="sharpbergman",
        description="Numerical checks of sharp Bergman-space embedding inequalities.",
    )
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", metavar="PATH", help="INI configuration file")
    p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    p.add_argument("--seed", type=int, help="random seed (default 0)")
    p.add_argument("--tol", type=float, help="relative quadrature tolerance")
    return p


def make_config(args) -> RunConfig:
    loaded = {"sections": {}, "trials": {}}
    if args.config:
        path = Path(args.config)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
        loaded = load_config(text, str(path))
    base = {k: d for k, (_, d) in _SCHEMA["run"].items()}
    base.update(loaded["sections"].get("run", {}))
    for key in ("seed", "tol", "format", "out"):
        val = getattr(args, key)
        if val is not None:
            base[key] = val
    if base["format"] not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {base['format']!r}")
    tol = None
    if base["tol"] is not None:
        if not base["tol"] > 0:
            raise ConfigError(f"tol must be positive, got {base['tol']!r}")
        tol = Tolerance(relative=float(base["tol"]), absolute=1e-13)
    return RunConfig(
        subcommand=args.subcommand,
        seed=int(base["seed"]),
        tolerance=tol,
        output_path=base["out"],
        output_format=base["format"],
        sections=loaded["sections"],
        trials=loaded["trials"],
    )


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = _build_parser().parse_args(argv)
    try:
        cfg = make_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return run(cfg, argv)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
