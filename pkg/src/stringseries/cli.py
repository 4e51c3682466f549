"""Command-line experiment runner.

Every command reads one JSON config, writes its results under ``--out``
and embeds the config hash and package version in each file. Exit codes:
0 success, 1 failed acceptance check, 2 invalid config, 3 numerical failure
(a ``diagnostic.json`` is written next to the outputs).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .decompose import SingularSystemError, compose_extension, decompose
from .extend import odd_extend, parity_check
from .fnspace import FUNCTIONS, UnreliableDerivativeError, make_function
from .fourier import QuadratureError, coefficient_table, write_coefficient_csv
from .wave import WaveParams, convergence_report, evaluate, solve

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    f0: dict
    g0: dict = field(default_factory=lambda: {"name": "zero"})
    params: dict = field(default_factory=lambda: {"T": 1.0, "mu": 1.0, "L": 1.0})
    n: int = 2
    M: list = field(default_factory=lambda: [10, 50, 200])
    eps: list = field(default_factory=lambda: [1e-1, 1e-2, 1e-3, 1e-4])
    output_dir: str = "out"
    seed: int | None = None

    @classmethod
    def from_dict(cls, raw: dict) -> ExperimentConfig:
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(raw) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "f0" not in raw:
            raise ConfigError("config needs an 'f0' entry")
        cfg = cls(**raw)
        cfg.validate()
        return cfg

    def validate(self):
        for key in ("f0", "g0"):
            entry = getattr(self, key)
            if not isinstance(entry, dict) or entry.get("name") not in FUNCTIONS:
                raise ConfigError(f"{key}: expected {{'name': one of {sorted(FUNCTIONS)}}}")
        try:
            self.wave_params()
            self.function("f0")
            self.function("g0")
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        if not isinstance(self.n, int) or not 1 <= self.n <= 2:
            raise ConfigError("n must be 1 or 2")
        if (not self.M or any(not isinstance(m, int) or m < 1 for m in self.M)
                or list(self.M) != sorted(self.M)):
            raise ConfigError("M must be a non-empty ascending list of positive integers")
        if not self.eps or any(not 0 < e < self.wave_params().L for e in self.eps):
            raise ConfigError("eps values must lie in (0, L)")
        if self.seed is not None and not isinstance(self.seed, int):
            raise ConfigError("seed must be an integer or null")

    def wave_params(self) -> WaveParams:
        return WaveParams(**self.params)

    def function(self, key: str):
        entry = getattr(self, key)
        return make_function(entry["name"], L=self.wave_params().L, **entry.get("params", {}))

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    def digest(self) -> str:
        canonical = json.dumps(self.as_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


def default_config() -> dict:
    text = resources.files("stringseries").joinpath("default_config.json").read_text()
    return json.loads(text)


def load_config(path: str | None, overrides: dict) -> ExperimentConfig:
    if path is None:
        raw = default_config()
    else:
        try:
            raw = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if isinstance(raw, dict):
        raw = {**raw, **{k: v for k, v in overrides.items() if v is not None}}
    return ExperimentConfig.from_dict(raw)


def _header(cfg: ExperimentConfig) -> dict:
    return {"config_sha256": cfg.digest(), "version": __version__}


def _write_json(path: Path, payload: dict):
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _comments(cfg: ExperimentConfig) -> list[str]:
    return [f"{k}: {v}" for k, v in _header(cfg).items()]


def cmd_extend(cfg: ExperimentConfig, out: Path, args) -> int:
    f = cfg.function("f0")
    order = args.order or cfg.n
    odd = odd_extend(f)
    composite = compose_extension(f, order)

    def describe(ext):
        parity, deviation = parity_check(ext, seed=cfg.seed)
        return {
            "verified_order": ext.verified_order,
            "parity": parity,
            "parity_deviation": deviation,
            "seams": {name: {"order": r.order, "checked_through": r.checked_through,
                             "indeterminate_at": r.indeterminate_at,
                             "mismatches": list(r.mismatches)}
                      for name, r in sorted(ext.seam_reports.items())},
        }

    _write_json(out / "extend.json", {**_header(cfg), "n": order, "odd": describe(odd),
                                      "composite": describe(composite)})
    return EXIT_OK


def cmd_decompose(cfg: ExperimentConfig, out: Path, args) -> int:
    order = args.order or cfg.n
    parts = decompose(cfg.function("f0"), order)
    _write_json(out / "decompose.json", {
        **_header(cfg),
        "n": order,
        "f1_coefficients": parts.f1.coef.tolist(),
        "targets": [{"endpoint": d.endpoint, "order": d.order, "value": d.value}
                    for d in parts.matched_orders],
        "residuals": [{"endpoint": e, "order": k, "value": v} for e, k, v in parts.residuals()],
    })
    return EXIT_OK


def cmd_coeffs(cfg: ExperimentConfig, out: Path, args) -> int:
    modes = args.modes or max(cfg.M)
    ext = compose_extension(cfg.function("f0"), args.order or cfg.n)
    table = coefficient_table(ext, modes)
    write_coefficient_csv(out / "coeffs.csv", table, _comments(cfg))
    return EXIT_OK


def cmd_solve(cfg: ExperimentConfig, out: Path, args) -> int:
    params = cfg.wave_params()
    f0, g0 = cfg.function("f0"), cfg.function("g0")
    truncations = sorted(set(cfg.M) | ({args.modes} if args.modes else set()))
    report = convergence_report(f0, g0, params, truncations, sorted(cfg.eps, reverse=True))
    report.metadata.update(_header(cfg))
    (out / "report.json").write_text(report.to_json() + "\n")
    sol = solve(f0, g0, params, truncations[-1])
    x = np.linspace(0.0, params.L, 65)
    t = np.linspace(0.0, params.period, 17)
    X, T = np.meshgrid(x, t)
    F = evaluate(sol, X, T)
    with open(out / "field.csv", "w", newline="") as fh:
        for line in _comments(cfg):
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "t", "F"])
        for xi, ti, fi in zip(X.ravel(), T.ravel(), F.ravel()):
            w.writerow([format(xi, ".17g"), format(ti, ".17g"), format(fi, ".17g")])
    return EXIT_OK


def cmd_verify(cfg: ExperimentConfig, out: Path, args) -> int:
    from .acceptance import run_all

    results = run_all()
    for r in results:
        print(r.line())
    _write_json(out / "verify.json", {
        **_header(cfg),
        "criteria": [{"number": r.number, "title": r.title, "passed": r.passed,
                      "measured": r.measured} for r in results],
    })
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


COMMANDS = {
    "extend": (cmd_extend, "odd and composite extensions with seam reports"),
    "decompose": (cmd_decompose, "boundary polynomial coefficients and residuals"),
    "coeffs": (cmd_coeffs, "coefficient magnitudes against the decay bound (CSV)"),
    "solve": (cmd_solve, "convergence report (JSON) and displacement field (CSV)"),
    "verify": (cmd_verify, "run the acceptance suite"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stringseries", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, helptext) in COMMANDS.items():
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", help="JSON config (default: the bundled config)")
        p.add_argument("--out", help="output directory (default: config output_dir)")
        p.add_argument("--modes", type=int, help="number of modes (coeffs, solve)")
        p.add_argument("--order", type=int, help="decomposition order n (1 or 2)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, {"n": args.order})
        if args.modes is not None and args.modes < 1:
            raise ConfigError("--modes must be positive")
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    handler = COMMANDS[args.command][0]
    try:
        return handler(cfg, out, args)
    except (UnreliableDerivativeError, QuadratureError, SingularSystemError,
            FloatingPointError) as exc:
        diagnostic = {**_header(cfg), "command": args.command,
                      "error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, UnreliableDerivativeError):
            diagnostic.update(order=exc.order, estimates=[float(e) for e in exc.estimates])
        if isinstance(exc, QuadratureError):
            diagnostic["trace"] = [[float(v) for v in (n, abs(s), e)] for n, s, e in exc.trace]
        _write_json(out / "diagnostic.json", diagnostic)
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        # inputs the config named but the pipeline cannot accept
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
