"""Command-line driver: ``wavekit <suite> [options]``.

Each suite writes ``<report>.csv`` and ``<report>.gp`` for every report plus
``summary.txt`` with all verdicts.  The exit code is 0 when every verdict
passes, 1 when one fails, and 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import configparser
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

from . import suites
from .report import write_csv, write_plot_script
from .spherical import displayed_leading_constant, leading_constant

log = logging.getLogger("wavekit")

COMMANDS = ("verify-geometry", "verify-spherical", "verify-kernels", "wave-growth", "sharpness", "all")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    dim: int | None = None
    p: float | None = None   # wave-growth: 4; sharpness: 4 * dim
    alpha0: float | None = None
    alpha1: float | None = None
    t: float = 2.0
    t_grid: tuple = (1.0, 2.0, 4.0, 6.0, 8.0, 12.0, 16.0, 20.0)
    eps_grid: tuple = tuple(2.0 ** -k for k in range(12, 6, -1))
    lambda_max: float = 50.0
    nodes: int = 64
    tol: float = 0.05
    out: str = "wavekit-out"
    seed: int = 0

    def __post_init__(self):
        if self.dim is not None and self.dim < 1:
            raise ConfigError("dim must be >= 1")
        if self.p is not None and not self.p > 1:
            raise ConfigError("p must exceed 1")
        for name in ("t_grid", "eps_grid"):
            g = tuple(float(x) for x in getattr(self, name))
            if not g or any(b <= a for a, b in zip(g, g[1:])):
                raise ConfigError(f"{name} must be nonempty and strictly increasing")
            setattr(self, name, g)
        if self.tol <= 0 or self.lambda_max <= 0 or self.nodes < 1:
            raise ConfigError("tol, lambda_max and nodes must be positive")


_TYPES = {"dim": int, "p": float, "alpha0": float, "alpha1": float, "t": float,
          "lambda_max": float, "nodes": int, "tol": float, "out": str, "seed": int}


def _parse_value(key, text):
    if key in ("t_grid", "eps_grid"):
        return tuple(float(x) for x in str(text).replace(",", " ").split())
    return _TYPES[key](text)


def read_config(path):
    """INI-style ``key = value`` lines with ``#`` comments; a section header is optional."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    cp = configparser.ConfigParser(comment_prefixes=("#", ";"), inline_comment_prefixes=("#",))
    try:
        try:
            cp.read_string(text)
        except configparser.MissingSectionHeaderError:
            cp.read_string("[wavekit]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    out = {}
    valid = {f.name for f in fields(RunConfig)}
    for section in cp.sections():
        for key, value in cp[section].items():
            k = key.replace("-", "_")
            if k not in valid:
                raise ConfigError(f"unknown config key {key!r}")
            try:
                out[k] = _parse_value(k, value)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {value!r}") from exc
    return out


def build_parser():
    ap = argparse.ArgumentParser(prog="wavekit", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--dim", type=int)
    ap.add_argument("--p", type=float)
    ap.add_argument("--alpha0", type=float)
    ap.add_argument("--alpha1", type=float)
    ap.add_argument("--t", type=float)
    ap.add_argument("--t-grid", dest="t_grid", type=str)
    ap.add_argument("--eps-grid", dest="eps_grid", type=str)
    ap.add_argument("--lambda-max", dest="lambda_max", type=float)
    ap.add_argument("--nodes", type=int)
    ap.add_argument("--tol", type=float)
    ap.add_argument("--out", type=str)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--config", type=str)
    ap.add_argument("-q", "--quiet", action="store_true")
    return ap


def make_config(args):
    values = read_config(args.config) if args.config else {}
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = _parse_value(f.name, v) if f.name in ("t_grid", "eps_grid") else v
    return RunConfig(**values)


def _dims(cfg, default):
    return (cfg.dim,) if cfg.dim is not None else default


def suite_reports(command, cfg):
    """The reports of one suite under ``cfg``."""
    if command == "verify-geometry":
        return suites.geometry_suite(_dims(cfg, (1, 2, 3)), seed=cfg.seed, nodes=cfg.nodes)
    if command == "verify-spherical":
        return suites.spherical_suite(_dims(cfg, (1, 2, 3)), cfg.lambda_max)
    if command == "verify-kernels":
        return suites.kernel_suite(_dims(cfg, (1, 2)))
    if command == "wave-growth":
        return suites.wave_suite(cfg.dim or 1, cfg.p or 4.0, cfg.alpha0, cfg.alpha1, cfg.t_grid)
    if command == "sharpness":
        n = cfg.dim or 1
        return suites.sharpness_suite(n, cfg.p or 4.0 * n, cfg.t, cfg.alpha0,
                                      cfg.eps_grid, cfg.tol)
    raise ConfigError(f"unknown command {command!r}")


def _threads():
    try:
        return max(1, int(os.environ.get("WAVEKIT_THREADS", "4")))
    except ValueError:
        return 1


def run(command, cfg):
    """Run a suite (or all), write outputs, and return the exit code."""
    names = COMMANDS[:-1] if command == "all" else (command,)
    with ThreadPoolExecutor(max_workers=min(_threads(), len(names))) as pool:
        results = list(pool.map(lambda c: suite_reports(c, cfg), names))
    reports = [r for group in results for r in group]
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    lines = [f"A_n = 2^(n/2) Gamma((n+1)/2)/sqrt(pi): "
             + ", ".join(f"n={n}: {leading_constant(n):.12g}" for n in (1, 2, 3)),
             "displayed constant (A_n sqrt(pi)): "
             + ", ".join(f"n={n}: {displayed_leading_constant(n):.12g}" for n in (1, 2, 3)),
             f"n=2 ratio exact amplitude / A_n = {1.0 / leading_constant(2):.12g}", ""]
    for rep in reports:
        write_csv(rep, out / f"{rep.name}.csv")
        write_plot_script(rep, out / f"{rep.name}.gp", f"{rep.name}.csv")
        lines += rep.summary_lines()
    failed = [(rep.name, v) for rep in reports for v in rep.failures()]
    lines.append("")
    lines.append(f"verdicts: {sum(len(r.verdicts) for r in reports)}, failures: {len(failed)}")
    (out / "summary.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    for name, v in failed:
        log.error("FAILED %s: %s", name, v.line())
    return 1 if failed else 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    try:
        cfg = make_config(args)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return 2
    try:
        code = run(args.command, cfg)
    except ValueError as exc:
        # parameters the configuration accepts but a suite rejects
        log.error("invalid parameters for %s: %s", args.command, exc)
        return 2
    if not args.quiet:
        print((Path(cfg.out) / "summary.txt").read_text(encoding="utf-8"), end="")
    return code


if __name__ == "__main__":
    sys.exit(main())
