"""Batch campaigns: ``cdalattice <command> --config ... --out-dir ...``.

Exit status: 0 success, 1 configuration error, 2 budget exceeded,
3 internal-consistency failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import analysis, dmt
from .config import config_hash, load_spec
from .errors import BudgetExceededError, ConfigError, DegenerateInputError, InternalConsistencyError
from .lattice import DEFAULT_POINT_CAP, DEFAULT_PRECISION, build_lattice, enumerate_ball

SCHEMA_VERSION = 1
COMMANDS = ("validate", "enumerate", "census", "fit", "zeta", "units", "simulate", "report")
CENSUS_COLUMNS = (
    "R",
    "point_count",
    "det_sum",
    "epstein_sum",
    "unit_count",
    "oe_unit_count",
    "coset_count",
    "partial_zeta",
)
EXIT_OK, EXIT_CONFIG, EXIT_BUDGET, EXIT_INTERNAL = 0, 1, 2, 3


@dataclass
class Campaign:
    command: str
    config: str | None
    out_dir: Path
    radii: list | None = None
    sum_exponent: int = analysis.DEFAULT_SUM_EXPONENT
    s: float = analysis.DEFAULT_ZETA_S
    precision_bits: int = DEFAULT_PRECISION
    point_cap: int = DEFAULT_POINT_CAP
    seed: int = 0
    snr_grid_db: list = field(default_factory=lambda: [10.0, 15.0, 20.0, 25.0, 30.0])
    rate: float = 0.0
    trials: int = 10_000
    rx_antennas: int | None = None
    codebook: str = "lattice"
    input: str | None = None
    workers: int = 1

    def check(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"command: unknown command {self.command!r}")
        if self.command != "fit" and not self.config:
            raise ConfigError("--config: required for this command")
        if self.command == "fit" and not self.input:
            raise ConfigError("--input: the fit command needs a census CSV")
        if self.input and not Path(self.input).is_file():
            raise ConfigError(f"--input: no such file {self.input}")
        if self.precision_bits < 64:
            raise ConfigError("--precision-bits: must be >= 64")
        if self.point_cap < 1:
            raise ConfigError("--point-cap: must be positive")
        if self.sum_exponent < 1:
            raise ConfigError("--sum-exponent: must be a positive integer")
        if self.s < 2:
            raise ConfigError("--s: must be >= 2")
        if self.trials < 1:
            raise ConfigError("--trials: must be >= 1")
        if self.rate < 0:
            raise ConfigError("--rate: must be >= 0")
        if self.radii is not None:
            if not self.radii or any(r < 0 for r in self.radii) or self.radii != sorted(self.radii):
                raise ConfigError("--radii: must be a nonempty ascending list of nonnegative radii")
        if self.seed < 0:
            raise ConfigError("--seed: must be nonnegative")
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"--out-dir: not writable ({exc})") from exc


def parse_radius(token: str) -> float:
    token = token.strip()
    if token.startswith("sqrt(") and token.endswith(")"):
        return math.sqrt(float(token[5:-1]))
    return float(token)


def _float_list(text: str, key: str) -> list:
    try:
        return [parse_radius(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {text!r}") from exc


def calibrated_grid(lat, cap: int) -> list:
    return [r for r in analysis.STANDARD_GRID if lat.predicted_count(r) <= cap]


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _write_json(path: Path, payload: dict):
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


class Runner:
    def __init__(self, campaign: Campaign):
        self.c = campaign
        self.spec = None
        self.lat = None
        self.tag = None
        self.written = []

    def setup(self):
        c = self.c
        if c.config:
            self.spec = load_spec(c.config)
            self.tag = config_hash(self.spec)[:12]
        else:
            self.tag = hashlib.sha256(Path(c.input).read_bytes()).hexdigest()[:12]

    def lattice(self):
        if self.lat is None:
            self.lat = build_lattice(self.spec, self.c.precision_bits)
        return self.lat

    def out(self, suffix: str) -> Path:
        path = self.c.out_dir / f"{self.c.command}-{self.tag}-seed{self.c.seed}{suffix}"
        self.written.append(path)
        return path

    def meta(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.c.command,
            "config_hash": self.tag,
            "algebra": self.spec.name if self.spec else None,
            "seed": self.c.seed,
            "point_cap": self.c.point_cap,
            "precision_bits": self.c.precision_bits,
        }

    def radii(self):
        if self.c.radii is not None:
            return self.c.radii
        return calibrated_grid(self.lattice(), self.c.point_cap)

    # -- commands --

    def cmd_validate(self):
        _write_json(self.out(".json"), {**self.meta(), "valid": True, "degree": self.spec.degree})

    def cmd_enumerate(self):
        lat = self.lattice()
        radius = max(self.radii())
        d = lat.dim
        rows = []
        for p in enumerate_ball(lat, radius, point_cap=self.c.point_cap, workers=self.c.workers):
            rows.append(p.coords + (p.norm_sq, p.nrd.re, p.nrd.im))
        rows.sort()
        _write_csv(self.out(".csv"), [f"c{i}" for i in range(d)] + ["norm_sq", "nrd_re", "nrd_im"], rows)

    def _census(self):
        return analysis.census_grid(
            self.lattice(),
            self.radii(),
            sum_exponent=self.c.sum_exponent,
            s=self.c.s,
            point_cap=self.c.point_cap,
            workers=self.c.workers,
        )

    def _census_checks(self, run):
        return {
            "sum_exponent": run.sum_exponent,
            "s": run.s,
            "nvd_violations": run.nvd_violations,
            "minkowski_violations": run.minkowski_violations,
            "min_nrd_sq": run.min_nrd_sq,
            "oe_unit_brute": run.oe_unit_brute,
            "ideal_count": run.ideal_count,
        }

    def cmd_census(self):
        run = self._census()
        _write_csv(self.out(".csv"), CENSUS_COLUMNS, [r.as_row() for r in run.rows])
        _write_json(self.out(".json"), {**self.meta(), **self._census_checks(run)})

    def cmd_zeta(self):
        run = self._census()
        _write_csv(
            self.out(".csv"),
            ("R", "ideal_count", "partial_zeta"),
            [(r.R, k, r.partial_zeta) for r, k in zip(run.rows, run.ideal_count)],
        )

    def cmd_units(self):
        run = self._census()
        _write_csv(
            self.out(".csv"),
            ("R", "unit_count", "oe_unit_count", "oe_unit_brute", "coset_count"),
            [(r.R, r.unit_count, r.oe_unit_count, b, r.coset_count) for r, b in zip(run.rows, run.oe_unit_brute)],
        )

    def cmd_fit(self):
        with open(self.c.input, newline="") as fh:
            rows = list(csv.DictReader(fh))
        if not rows or "R" not in rows[0]:
            raise ConfigError("--input: census CSV must have an R column")
        _write_json(self.out(".json"), {**self.meta(), "fits": fit_columns(rows)})

    def cmd_report(self):
        run = self._census()
        rows = [r.as_row() for r in run.rows]
        _write_csv(self.out(".csv"), CENSUS_COLUMNS, rows)
        dict_rows = [dict(zip(CENSUS_COLUMNS, (_fmt(v) for v in row))) for row in rows]
        _write_json(
            self.out(".json"),
            {**self.meta(), **self._census_checks(run), "fits": fit_columns(dict_rows), "radii": self.radii()},
        )

    def cmd_simulate(self):
        c = self.c
        n = self.spec.degree
        if c.codebook == "bpsk":
            import numpy as np

            codebook = np.array([[[1.0]], [[-1.0]]], dtype=complex)
            n_t = 1
            lat = None
        else:
            codebook = None
            n_t = n
            lat = self.lattice()
        n_r = c.rx_antennas or n_t
        cfg = dmt.SimConfig(n_t=n_t, n_r=n_r, snr_grid_db=c.snr_grid_db, trials=c.trials, seed=c.seed, rate_param=c.rate)
        res = dmt.run_simulation(lat, cfg, codebook, workers=c.workers)
        _write_csv(
            self.out(".csv"),
            ("snr_db", "codebook_size", "trials", "errors", "error_rate"),
            [(r.snr_db, r.codebook_size, r.trials, r.errors, r.error_rate) for r in res.records],
        )
        r_ref = min(c.rate, min(n_t, n_r))
        _write_json(
            self.out(".json"),
            {
                **self.meta(),
                "codebook": c.codebook,
                "n_t": n_t,
                "n_r": n_r,
                "rate": c.rate,
                "trials": c.trials,
                "slope": None if res.slope is None or math.isnan(res.slope) else res.slope,
                "reference_diversity": dmt.dmt_reference(n_t, n_r, r_ref),
                "energy_stat": res.energy_stat,
                "flags": res.flags,
            },
        )

    def run(self):
        self.setup()
        getattr(self, f"cmd_{self.c.command}")()
        return self.written


def fit_columns(rows: list) -> dict:
    fits = {}
    radii = [float(r["R"]) for r in rows]
    for col in rows[0]:
        if col == "R":
            continue
        try:
            vals = [float(r[col]) for r in rows]
        except (TypeError, ValueError):
            continue
        try:
            f = analysis.fit_growth(list(zip(radii, vals)))
        except DegenerateInputError as exc:
            fits[col] = {"error": str(exc)}
            continue
        fits[col] = {
            "exponent": f.exponent,
            "log_constant": f.log_constant,
            "residual": f.residual,
            "radii_used": f.radii_used,
        }
    return fits


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cdalattice", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="algebra config (TOML path, or a shipped name: golden, perfect4)")
    p.add_argument("--radii", help="comma-separated ascending radii; sqrt(x) accepted")
    p.add_argument("--sum-exponent", type=int, default=analysis.DEFAULT_SUM_EXPONENT)
    p.add_argument("--s", type=float, default=analysis.DEFAULT_ZETA_S)
    p.add_argument("--precision-bits", type=int, default=DEFAULT_PRECISION)
    p.add_argument("--point-cap", type=int, default=DEFAULT_POINT_CAP)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--snr-grid-db", default="10,15,20,25,30")
    p.add_argument("--rate", type=float, default=0.0)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--rx-antennas", type=int)
    p.add_argument("--codebook", choices=("lattice", "bpsk"), default="lattice")
    p.add_argument("--input", help="census CSV for the fit command")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-dir", default=".")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        campaign = Campaign(
            command=args.command,
            config=args.config,
            out_dir=Path(args.out_dir),
            radii=_float_list(args.radii, "--radii") if args.radii else None,
            sum_exponent=args.sum_exponent,
            s=args.s,
            precision_bits=args.precision_bits,
            point_cap=args.point_cap,
            seed=args.seed,
            snr_grid_db=_float_list(args.snr_grid_db, "--snr-grid-db"),
            rate=args.rate,
            trials=args.trials,
            rx_antennas=args.rx_antennas,
            codebook=args.codebook,
            input=args.input,
            workers=args.workers,
        )
        campaign.check()
        written = Runner(campaign).run()
    except ConfigError as exc:
        for line in exc.diagnostics:
            print(f"config error: {line}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InternalConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except DegenerateInputError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
