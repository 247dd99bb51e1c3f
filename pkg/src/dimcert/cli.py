"""Command-line driver: key=value config files, flag overrides and CSV output.

Exit codes: 0 on success (inconclusive certificates are ordinary rows),
2 on configuration errors, 3 on I/O errors, 130 when interrupted.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import IO

from .algebraic import RootFindingError, classify, read_polynomial_file, reciprocal_box
from .asymmetric import certify_regularity
from .discretize import HatConfig
from .oracle import empirical_dimensions, finite_level_atoms
from .report import TableWriter, parse_csv
from .scheme import (
    AffineScheme,
    BoundRow,
    ParameterBox,
    SimilarityScheme,
    admissible_interval,
    build_complementary,
)
from .search import SearchConfig, iter_scan, near_one_check, overlapping_boxes, refine_bound, resolve_workers
from .symmetric import certify_alpha

log = logging.getLogger("dimcert")

COMMANDS = ("certify", "regularity", "refine", "scan", "salem", "oracle", "near-one")
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_INTERRUPTED = 130


class ConfigError(ValueError):
    pass


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.replace(",", " ").split())


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass
class RunConfig:
    command: str = ""
    translations: tuple[float, ...] = (0.0, 1.0)
    probabilities: tuple[float, ...] | None = None
    ratios: tuple[float, ...] | None = None
    lambda_lo: float | None = None
    lambda_hi: float | None = None
    alpha: float = 0.5
    d1: float = 0.5
    d2: float | None = None
    epsilon: float = 0.01
    cells: int = 10_000
    max_iters: int = 200
    theta: float = 1e-7
    threshold: float = 0.995
    margin: float = 0.1
    overlap: float = 0.1
    boxes: int = 10
    radius: float | None = None
    workers: int = 1
    warm_start: str | None = None
    poly_file: str | None = None
    poly_palindromic_half: bool = False
    delta: float = 1e-8
    depth: int = 16
    out: str = "-"

    @classmethod
    def parsers(cls) -> dict:
        return {
            "command": str,
            "translations": _floats,
            "probabilities": _floats,
            "ratios": _floats,
            "lambda_lo": float,
            "lambda_hi": float,
            "alpha": float,
            "d1": float,
            "d2": float,
            "epsilon": float,
            "cells": int,
            "max_iters": int,
            "theta": float,
            "threshold": float,
            "margin": float,
            "overlap": float,
            "boxes": int,
            "radius": float,
            "workers": int,
            "warm_start": str,
            "poly_file": str,
            "poly_palindromic_half": _bool,
            "delta": float,
            "depth": int,
            "out": str,
        }

    def updated(self, values: dict[str, str]) -> "RunConfig":
        parsers = self.parsers()
        changes = {}
        for key, raw in values.items():
            if key not in parsers:
                raise ConfigError(f"unknown config key {key!r}")
            try:
                changes[key] = parsers[key](raw) if isinstance(raw, str) else raw
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {exc}") from None
        return replace(self, **changes)

    def probability_vector(self, k: int) -> tuple[float, ...]:
        if self.probabilities is None:
            return (1.0 / k,) * k
        if len(self.probabilities) != k:
            raise ConfigError("probabilities and translations differ in length")
        return self.probabilities

    def ratio_box(self) -> ParameterBox:
        if self.lambda_lo is None:
            raise ConfigError("lambda_lo is required")
        hi = self.lambda_lo if self.lambda_hi is None else self.lambda_hi
        return ParameterBox(self.lambda_lo, hi)

    def scheme(self, box: ParameterBox | None = None) -> SimilarityScheme:
        box = self.ratio_box() if box is None else box
        return SimilarityScheme(box, self.translations, self.probability_vector(len(self.translations)))

    def hat(self) -> HatConfig:
        return HatConfig(self.theta, self.max_iters, self.threshold, self.alpha)

    def search(self) -> SearchConfig:
        return SearchConfig(
            d1=self.d1,
            d2=self.d2,
            epsilon=self.epsilon,
            cells=self.cells,
            max_iterations=self.max_iters,
            theta=self.theta,
            threshold=self.threshold,
            margin=self.margin,
        )


def read_config_file(path: str) -> dict[str, str]:
    """Flat key=value lines; blank lines and '#' comments ignored."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dimcert",
        description="Certified lower bounds on correlation and Frostman dimensions of self-similar measures.",
    )
    ap.add_argument("command", nargs="?", choices=COMMANDS, help="what to run (may also come from the config file)")
    ap.add_argument("--config", help="key=value configuration file; flags override it")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    for f in fields(RunConfig):
        if f.name == "command":
            continue
        ap.add_argument("--" + f.name.replace("_", "-"), dest=f.name, default=None, metavar=f.name.upper())
    return ap


def resolve_config(argv: list[str] | None) -> tuple[RunConfig, int]:
    args = build_parser().parse_args(argv)
    values: dict[str, str] = {}
    if args.config:
        try:
            values.update(read_config_file(args.config))
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    cfg = RunConfig().updated(values)
    if cfg.command not in COMMANDS:
        raise ConfigError(f"command must be one of {', '.join(COMMANDS)}")
    cfg = replace(cfg, workers=resolve_workers(cfg.workers))
    return cfg, args.verbose


@contextlib.contextmanager
def open_output(path: str):
    if path == "-":
        yield sys.stdout
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        yield fh


def _row_from(box: ParameterBox, res, cells: int, fallback_alpha: float) -> BoundRow:
    alpha = res.alpha if res.certified else fallback_alpha
    return BoundRow(box.lo, box.hi, alpha, res.status, res.iterations_used, cells)


def run_certify(cfg: RunConfig, writer: TableWriter) -> None:
    box = cfg.ratio_box()
    comp = build_complementary(cfg.scheme(box))
    interval = admissible_interval(comp, box, cfg.margin)
    res = certify_alpha(comp, box, interval, cfg.cells, cfg.hat())
    writer.write(_row_from(box, res, cfg.cells, cfg.alpha))


def run_regularity(cfg: RunConfig, writer: TableWriter) -> None:
    k = len(cfg.translations)
    if cfg.ratios is not None:
        ratios = cfg.ratios
    elif cfg.lambda_lo is not None:
        ratios = (cfg.lambda_lo,) * k
    else:
        raise ConfigError("regularity needs ratios or lambda_lo")
    if len(ratios) != k:
        raise ConfigError("ratios and translations differ in length")
    scheme = AffineScheme(tuple(zip(ratios, cfg.translations)), cfg.probability_vector(k))
    res = certify_regularity(scheme, cfg.alpha, cfg.radius, cfg.cells, cfg.hat())
    box = ParameterBox(min(ratios), max(ratios))
    writer.write(BoundRow(box.lo, box.hi, res.alpha if res.certified else cfg.alpha, res.status, res.iterations_used, cfg.cells))


def run_refine(cfg: RunConfig, writer: TableWriter) -> None:
    box = cfg.ratio_box()
    res = refine_bound(cfg.scheme(box), box, cfg.search())
    writer.write(_row_from(box, res, cfg.cells, cfg.d1))


def run_scan(cfg: RunConfig, writer: TableWriter) -> None:
    box = cfg.ratio_box()
    warm = None
    if cfg.warm_start:
        try:
            warm, _ = parse_csv(Path(cfg.warm_start).read_text())
        except ValueError as exc:
            raise ConfigError(f"warm-start table: {exc}") from None
    total = len(overlapping_boxes(box.lo, box.hi, cfg.boxes, cfg.overlap))
    try:
        for row in iter_scan(cfg.scheme(box), box.lo, box.hi, cfg.boxes, cfg.overlap, cfg.search(), warm, cfg.workers):
            writer.write(row)
    except KeyboardInterrupt:
        writer.close(partial=True, note=f"interrupted after {writer.count} of {total} boxes")
        raise


def run_salem(cfg: RunConfig, writer: TableWriter) -> None:
    if not cfg.poly_file:
        raise ConfigError("salem needs poly_file")
    try:
        polys = read_polynomial_file(cfg.poly_file, cfg.poly_palindromic_half)
    except ValueError as exc:
        raise ConfigError(f"{cfg.poly_file}: {exc}") from None
    for p in polys:
        try:
            kind = classify(p)
            box = reciprocal_box(p, cfg.delta)
        except (ValueError, RootFindingError) as exc:
            raise ConfigError(f"polynomial {p}: {exc}") from None
        log.info("%s: %s, beta = %.12f (certified=%s)", p, kind.kind, kind.dominant_root, kind.certified)
        res = refine_bound(cfg.scheme(box), box, cfg.search())
        writer.write(_row_from(box, res, cfg.cells, cfg.d1))


def run_oracle(cfg: RunConfig, stream: IO[str]) -> None:
    scheme = cfg.scheme()
    atoms = finite_level_atoms(scheme, cfg.depth)
    span = float(atoms.positions[-1] - atoms.positions[0]) or 1.0
    lam = scheme.ratio_box.lo
    r_hi = 0.1 * span
    r_lo = max(1e-3 * span, 10 * lam**cfg.depth * span)
    if not r_lo < r_hi:
        raise ConfigError("depth too small to resolve any scale")
    est = empirical_dimensions(atoms, r_lo, r_hi)
    stream.write("lambda,depth,atoms,corr_slope,frostman_slope,corr_residual,frostman_residual\n")
    stream.write(
        f"{lam!r},{cfg.depth},{len(atoms)},{est.corr_slope:.6f},{est.frostman_slope:.6f},"
        f"{est.corr_residual:.3g},{est.frostman_residual:.3g}\n"
    )


def run_near_one(cfg: RunConfig, stream: IO[str]) -> None:
    eps = cfg.epsilon
    c = (1.0 - cfg.alpha) / eps
    holds = near_one_check(eps, c, 100.0, 10_000)
    stream.write("epsilon,alpha,c,holds\n")
    stream.write(f"{eps!r},{cfg.alpha!r},{c:.6g},{str(holds).lower()}\n")


TABLE_COMMANDS = {
    "certify": run_certify,
    "regularity": run_regularity,
    "refine": run_refine,
    "scan": run_scan,
    "salem": run_salem,
}
TEXT_COMMANDS = {"oracle": run_oracle, "near-one": run_near_one}


def run(cfg: RunConfig) -> int:
    """Execute one command; returns the process exit status."""
    try:
        with open_output(cfg.out) as stream:
            if cfg.command in TABLE_COMMANDS:
                writer = TableWriter(stream)
                TABLE_COMMANDS[cfg.command](cfg, writer)
                writer.close()
            else:
                TEXT_COMMANDS[cfg.command](cfg, stream)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except ValueError as exc:
        # domain validation errors from the library are configuration problems
        log.error("invalid configuration: %s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO
    except KeyboardInterrupt:
        return EXIT_INTERRUPTED
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg, verbose = resolve_config(argv)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    if verbose:
        logging.getLogger().setLevel(logging.INFO if verbose == 1 else logging.DEBUG)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
