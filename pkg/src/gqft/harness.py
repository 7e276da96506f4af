"""Configuration, suite orchestration, and machine-readable reporting.

A fixed ``(config, seed)`` pair reproduces every verdict and residual to the
last digit: each check owns a generator seeded from ``(seed, crc32(id))``
and results are reduced in registry order no matter how suites are
scheduled.

Exit codes: 0 all checks pass, 1 at least one failure, 2 no failures but an
inconclusive verdict (a residual inside the pass/fail gap), 3 invalid
configuration.
"""

from __future__ import annotations

import json
import sys
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

try:
    import tomllib  # py >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from . import checks as checks_module
from .algebra import AlgebraConfig
from .checks import SUITES, CheckDef, CheckOutcome, registry
from .errors import ConfigInvalid
from .fock import Species

SCHEMA_VERSION = 1
PACKAGE_VERSION = "0.1.0"

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_CONFIG = 3


@dataclass
class HarnessConfig:
    hbar: float = 1.0
    seed: int = 12345
    suites: tuple[str, ...] = SUITES
    # lattice used by the field/invariance/scattering fixtures
    box_length: float = 2.0 * np.pi
    n_per_axis: int = 3
    n_max: int = 2
    # species of the production model (out <- a + b order)
    species: tuple[Species, ...] = (
        Species("theta", mass=1.0),
        Species("enn", mass=1.0),
        Species("vee", mass=2.0),
    )
    # one-particle algebra realization
    algebra_mass: float = 2.0
    algebra_internal_energy: float = 1.0
    algebra_two_s: int = 1
    algebra_n_levels: int = 12
    algebra_interior_fraction: float = 0.5
    # tolerances
    pass_tol: float = 1e-9
    fail_floor_scale: float = 1e-2
    algebra_tol: float = 1e-9
    # scattering model
    coupling: float = 0.1
    abel_epsilons: tuple[float, ...] = (0.5, 0.25, 0.125)
    time_step: float = 0.5
    horizon: float = 80.0

    def algebra_config(self) -> AlgebraConfig:
        return AlgebraConfig(
            mass=self.algebra_mass,
            internal_energy=self.algebra_internal_energy,
            two_s=self.algebra_two_s,
            n_levels=self.algebra_n_levels,
            interior_fraction=self.algebra_interior_fraction,
            hbar=self.hbar,
        )

    def validate(self) -> None:
        problems = []
        if self.hbar <= 0:
            problems.append("hbar: must be positive")
        if not (0 <= self.seed < 2 ** 64):
            problems.append("seed: must fit in 64 bits")
        for name in self.suites:
            if name not in SUITES:
                problems.append(f"suites: unknown suite {name!r}")
        if self.box_length <= 0:
            problems.append("lattice.box_length: must be positive")
        if self.n_per_axis < 1 or self.n_per_axis % 2 == 0:
            problems.append("lattice.n_per_axis: must be odd and >= 1")
        if self.n_max < 2:
            problems.append("lattice.n_max: must be >= 2")
        if self.pass_tol <= 0 or self.fail_floor_scale <= 0:
            problems.append("tolerances: must be positive")
        if self.pass_tol >= self.fail_floor_scale:
            problems.append("tolerances: pass_tol must be smaller than fail_floor_scale")
        if self.algebra_tol <= 0:
            problems.append("tolerances.algebra_tol: must be positive")
        if self.algebra_n_levels < 8:
            problems.append("algebra.n_levels: must be >= 8")
        if not 0 < self.algebra_interior_fraction < 1:
            problems.append("algebra.interior_fraction: must lie in (0, 1)")
        if self.algebra_mass <= 0:
            problems.append("algebra.mass: must be positive")
        eps = self.abel_epsilons
        if len(eps) < 2 or any(e <= 0 for e in eps) or any(
            b >= a for a, b in zip(eps, eps[1:])
        ):
            problems.append("scattering.abel_epsilons: must be a decreasing positive list")
        if self.time_step <= 0 or self.horizon <= self.time_step:
            problems.append("scattering.quadrature: need 0 < time_step < horizon")
        if len(self.species) != 3:
            problems.append("species: the production model needs exactly three entries")
        if problems:
            raise ConfigInvalid(problems)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "hbar": self.hbar,
            "seed": self.seed,
            "suites": list(self.suites),
            "lattice": {
                "box_length": self.box_length,
                "n_per_axis": self.n_per_axis,
                "n_max": self.n_max,
            },
            "species": [
                {
                    "name": s.name,
                    "mass": s.mass,
                    "internal_energy": s.internal_energy,
                    "two_s": s.two_s,
                    "statistics": s.statistics,
                }
                for s in self.species
            ],
            "algebra": {
                "mass": self.algebra_mass,
                "internal_energy": self.algebra_internal_energy,
                "two_s": self.algebra_two_s,
                "n_levels": self.algebra_n_levels,
                "interior_fraction": self.algebra_interior_fraction,
            },
            "tolerances": {
                "pass_tol": self.pass_tol,
                "fail_floor_scale": self.fail_floor_scale,
                "algebra_tol": self.algebra_tol,
            },
            "scattering": {
                "coupling": self.coupling,
                "abel_epsilons": list(self.abel_epsilons),
                "time_step": self.time_step,
                "horizon": self.horizon,
            },
        }


def config_from_dict(data: dict) -> HarnessConfig:
    problems = []
    cfg = HarnessConfig()
    try:
        lattice = data.get("lattice", {})
        algebra = data.get("algebra", {})
        tolerances = data.get("tolerances", {})
        scattering = data.get("scattering", {})
        species = data.get("species")
        species_objs = cfg.species
        if species is not None:
            try:
                species_objs = tuple(
                    Species(
                        name=s["name"],
                        mass=float(s["mass"]),
                        internal_energy=float(s.get("internal_energy", 0.0)),
                        two_s=int(s.get("two_s", 0)),
                        statistics=s.get("statistics", "bose"),
                    )
                    for s in species
                )
            except (KeyError, TypeError, ValueError) as exc:
                problems.append(f"species: {exc}")
        cfg = HarnessConfig(
            hbar=float(data.get("hbar", cfg.hbar)),
            seed=int(data.get("seed", cfg.seed)),
            suites=tuple(data.get("suites", SUITES)),
            box_length=float(lattice.get("box_length", cfg.box_length)),
            n_per_axis=int(lattice.get("n_per_axis", cfg.n_per_axis)),
            n_max=int(lattice.get("n_max", cfg.n_max)),
            species=species_objs,
            algebra_mass=float(algebra.get("mass", cfg.algebra_mass)),
            algebra_internal_energy=float(
                algebra.get("internal_energy", cfg.algebra_internal_energy)),
            algebra_two_s=int(algebra.get("two_s", cfg.algebra_two_s)),
            algebra_n_levels=int(algebra.get("n_levels", cfg.algebra_n_levels)),
            algebra_interior_fraction=float(
                algebra.get("interior_fraction", cfg.algebra_interior_fraction)),
            pass_tol=float(tolerances.get("pass_tol", cfg.pass_tol)),
            fail_floor_scale=float(
                tolerances.get("fail_floor_scale", cfg.fail_floor_scale)),
            algebra_tol=float(tolerances.get("algebra_tol", cfg.algebra_tol)),
            coupling=float(scattering.get("coupling", cfg.coupling)),
            abel_epsilons=tuple(
                scattering.get("abel_epsilons", cfg.abel_epsilons)),
            time_step=float(scattering.get("time_step", cfg.time_step)),
            horizon=float(scattering.get("horizon", cfg.horizon)),
        )
    except (TypeError, ValueError) as exc:
        problems.append(str(exc))
    if problems:
        raise ConfigInvalid(problems)
    cfg.validate()
    return cfg


def config_from_toml(path: str) -> HarnessConfig:
    with open(path, "rb") as handle:
        data = tomllib.load(handle)
    return config_from_dict(data)


@dataclass
class CheckRecord:
    check_id: str
    suite: str
    statement: str
    passed: bool
    inconclusive: bool
    max_residual: float
    details: str
    elapsed_s: float


@dataclass
class Report:
    config: dict
    records: list[CheckRecord] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        if any(not r.passed and not r.inconclusive for r in self.records):
            return "fail"
        if any(r.inconclusive for r in self.records):
            return "inconclusive"
        return "pass"

    @property
    def exit_code(self) -> int:
        return {"pass": EXIT_PASS, "fail": EXIT_FAIL,
                "inconclusive": EXIT_INCONCLUSIVE}[self.verdict]

    def suite_summary(self):
        out = {}
        for record in self.records:
            slot = out.setdefault(record.suite, {
                "checks": 0, "passed": 0, "failed": 0, "inconclusive": 0,
                "max_residual": 0.0, "elapsed_s": 0.0,
            })
            slot["checks"] += 1
            if record.inconclusive:
                slot["inconclusive"] += 1
            elif record.passed:
                slot["passed"] += 1
            else:
                slot["failed"] += 1
            slot["max_residual"] = max(slot["max_residual"], record.max_residual)
            slot["elapsed_s"] += record.elapsed_s
        return out

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "version": PACKAGE_VERSION,
            "verdict": self.verdict,
            "config": self.config,
            "suites": [
                {"name": name, **summary}
                for name, summary in self.suite_summary().items()
            ],
            "checks": [
                {
                    "id": r.check_id,
                    "suite": r.suite,
                    "passed": r.passed,
                    "inconclusive": r.inconclusive,
                    "max_residual": r.max_residual,
                    "details": r.details,
                    "elapsed_s": r.elapsed_s,
                }
                for r in self.records
            ],
        }

    def summary_lines(self):
        lines = []
        for r in self.records:
            status = "INCONCLUSIVE" if r.inconclusive else ("PASS" if r.passed else "FAIL")
            lines.append(
                f"{status:12s} {r.check_id:38s} residual {r.max_residual:9.2e}"
                f"  [{r.elapsed_s:6.2f}s]"
            )
        for name, summary in self.suite_summary().items():
            lines.append(
                f"suite {name}: {summary['passed']}/{summary['checks']} passed, "
                f"{summary['failed']} failed, {summary['inconclusive']} inconclusive"
            )
        lines.append(f"verdict: {self.verdict}")
        return lines


def _rng_for(seed: int, check_id: str) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence([seed, zlib.crc32(check_id.encode())])
    )


def _run_one(item: CheckDef, config: HarnessConfig) -> CheckRecord:
    start = time.perf_counter()
    try:
        outcome: CheckOutcome = item.run(config, _rng_for(config.seed, item.check_id))
    except Exception as exc:  # a crash is a failure, not an abort
        outcome = CheckOutcome(False, float("inf"), details=f"exception: {exc!r}")
    return CheckRecord(
        check_id=item.check_id,
        suite=item.suite,
        statement=item.statement,
        passed=bool(outcome.passed),
        inconclusive=bool(outcome.inconclusive),
        max_residual=float(outcome.max_residual),
        details=str(outcome.details),
        elapsed_s=time.perf_counter() - start,
    )


def run(config: HarnessConfig, serial: bool = False) -> Report:
    """Execute the selected suites and aggregate a deterministic report."""
    config.validate()
    selected = [item for item in registry() if item.suite in config.suites]
    if serial or len(selected) <= 1:
        records = [_run_one(item, config) for item in selected]
    else:
        by_suite: dict[str, list[CheckDef]] = {}
        for item in selected:
            by_suite.setdefault(item.suite, []).append(item)
        chunks: dict[str, list[CheckRecord]] = {}
        with ThreadPoolExecutor(max_workers=min(6, len(by_suite))) as pool:
            futures = {
                name: pool.submit(lambda items=items: [_run_one(i, config) for i in items])
                for name, items in by_suite.items()
            }
            for name, fut in futures.items():
                chunks[name] = fut.result()
        # reduction order fixed by registry order regardless of scheduling
        flat = {r.check_id: r for recs in chunks.values() for r in recs}
        records = [flat[item.check_id] for item in selected]
    return Report(config.to_dict(), records)


def list_checks(config: HarnessConfig | None = None, suites=None):
    """Stable listing of check identifiers with their statements."""
    wanted = suites if suites is not None else (
        config.suites if config is not None else SUITES)
    return [(item.check_id, item.suite, item.statement)
            for item in registry() if item.suite in wanted]


def explain(check_id: str) -> str:
    for item in registry():
        if item.check_id == check_id:
            return (f"{item.check_id} [{item.suite}]\n"
                    f"  statement: {item.statement}\n"
                    f"  topics: {', '.join(item.topics)}")
    raise KeyError(f"unknown check id {check_id!r}")


def total_check_count() -> int:
    return len(registry())


def required_topic_coverage() -> tuple[set, set]:
    """(required topics, topics missing from the registry)."""
    covered = checks_module.topics_covered()
    required = set(checks_module.REQUIRED_TOPICS)
    return required, required - covered


def write_json(report: Report, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(report.to_dict(), handle, indent=2, sort_keys=True)
        handle.write("\n")


def main_run(config: HarnessConfig, json_path: str | None = None,
             serial: bool = False, stream=None) -> int:
    stream = stream or sys.stdout
    report = run(config, serial=serial)
    for line in report.summary_lines():
        print(line, file=stream)
    if json_path:
        write_json(report, json_path)
    return report.exit_code
