"""Runnable experiment suites over the frame catalog.

Each suite turns one structural claim into measurements with explicit
truncations and pass/fail rows: besselian bounds and constant estimates,
matched-budget duality of constants, shrinking / boundedly-complete decay
(the reflexivity probe), and rearrangement stability of partial sums.

Everything a suite emits is a pure function of its ExperimentSpec.  Bundles
carry no timestamps and no environment state, so two runs with the same
specs are byte-identical regardless of worker count; wall-clock times are
logged, never serialized.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional

import numpy as np

from . import __version__
from .catalog import frame_from_label
from .frames import (
    Frame,
    FrameReport,
    ProbeConfig,
    ProbeResult,
    ball_pair_sweep,
    coefficient_products,
    covering_truncation,
    derive_rng,
    dual_frame,
    frame_has_zero_elements,
    reflexivity_probe,
    unconditional_probe,
)

__all__ = [
    "ExperimentSpec",
    "ReportBundle",
    "DEFAULT_FRAME_LABELS",
    "SUITES",
    "default_specs",
    "spec_for_label",
    "run_besselian_suite",
    "run_duality_suite",
    "run_james_suite",
    "run_unconditionality_suite",
    "run_all",
    "write_reports",
]

log = logging.getLogger(__name__)

DEFAULT_FRAME_LABELS = (
    "l1-canonical",
    "haar:p=2:J=8",
    "amalgam:p=2:q=2:J=4:window=-1,1",
)

_DEFAULT_SCHEDULE = (4, 16, 64, 256)
# Appending a frame's exact-reconstruction horizon to the schedule is only
# worth it while the tail of rank-by-rank work stays interactive.
_FULL_TRUNCATION_CAP = 1024


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything a suite needs to be reproducible."""

    label: str
    schedule: tuple[int, ...] = _DEFAULT_SCHEDULE
    samples: int = 2000
    seed: int = 42
    trials: int = 50
    uncond_elements: int = 3
    probe_samples: int = 8
    abs_tol: float = 1e-9
    rel_tol: float = 0.05
    deviation_tol: float = 1e-10
    tail_tol: float = 1e-6

    def __post_init__(self) -> None:
        sched = tuple(int(n) for n in self.schedule)
        if not sched or any(n < 1 for n in sched):
            raise ValueError(f"schedule must hold positive truncations, got {sched}")
        if any(a >= b for a, b in zip(sched, sched[1:])):
            raise ValueError(f"schedule must be strictly increasing, got {sched}")
        object.__setattr__(self, "schedule", sched)
        if self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.uncond_elements < 1:
            raise ValueError(
                f"need at least one probe element, got {self.uncond_elements}"
            )
        if self.probe_samples < 0:
            raise ValueError(f"probe samples must be >= 0, got {self.probe_samples}")
        for name in ("abs_tol", "rel_tol", "deviation_tol", "tail_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    def to_json_obj(self) -> dict:
        return {
            "label": self.label,
            "schedule": list(self.schedule),
            "samples": self.samples,
            "seed": self.seed,
            "trials": self.trials,
            "uncond_elements": self.uncond_elements,
            "probe_samples": self.probe_samples,
            "abs_tol": self.abs_tol,
            "rel_tol": self.rel_tol,
            "deviation_tol": self.deviation_tol,
            "tail_tol": self.tail_tol,
        }

    @classmethod
    def from_json_obj(cls, obj) -> "ExperimentSpec":
        return cls(
            label=obj["label"],
            schedule=tuple(obj["schedule"]),
            samples=int(obj["samples"]),
            seed=int(obj["seed"]),
            trials=int(obj["trials"]),
            uncond_elements=int(obj["uncond_elements"]),
            probe_samples=int(obj["probe_samples"]),
            abs_tol=float(obj["abs_tol"]),
            rel_tol=float(obj["rel_tol"]),
            deviation_tol=float(obj["deviation_tol"]),
            tail_tol=float(obj["tail_tol"]),
        )


def spec_for_label(label: str, **overrides) -> ExperimentSpec:
    """A spec with a schedule adapted to the frame's representable range.

    Truncations beyond the frame's rank range are dropped; the frame's
    exact-reconstruction horizon is appended when it is modest enough to
    keep the suites interactive.
    """
    if "schedule" in overrides and overrides["schedule"] is not None:
        return ExperimentSpec(label=label, **overrides)
    overrides.pop("schedule", None)
    F = frame_from_label(label)
    sched = list(_DEFAULT_SCHEDULE)
    if F.max_rank is not None:
        sched = [n for n in sched if n <= F.max_rank]
        if not sched:
            sched = [F.max_rank]
    full = F.full_truncation
    if full is not None and full <= _FULL_TRUNCATION_CAP and full > sched[-1]:
        sched.append(full)
    return ExperimentSpec(label=label, schedule=tuple(sched), **overrides)


def default_specs() -> tuple[ExperimentSpec, ...]:
    return tuple(spec_for_label(label) for label in DEFAULT_FRAME_LABELS)


# ---------------------------------------------------------------------------
# shared sweep machinery
# ---------------------------------------------------------------------------


def _prefix_sum(values: np.ndarray, N: int) -> float:
    # fsum is exactly rounded, so prefix sums of nonnegative terms are
    # monotone in N with no rounding caveats.
    return float(math.fsum(values[:N]))


def _sweep_data(F: Frame, samples: int, seed: int, n_max: int):
    """(primal norm, dual norm, |coefficient products| up to n_max) per pair."""
    data = []
    for x, xstar in ball_pair_sweep(F.space, samples, seed):
        prods = np.abs(coefficient_products(F, x, xstar, n_max))
        data.append((F.space.norm(x), F.space.dual_norm(xstar), prods))
    return data


def _constants_by_truncation(data, schedule) -> list[float]:
    return [
        max(_prefix_sum(prods, N) for _nx, _nxs, prods in data) for N in schedule
    ]


def _zero_pair_flags(F: Frame, horizon: int) -> tuple[list[str], bool]:
    scan = horizon if F.max_rank is None else min(horizon, F.max_rank)
    scan = min(scan, 512)
    flags = []
    if frame_has_zero_elements(F, scan):
        flags.append("zero-elements")
    return flags, bool(flags)


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------


def run_besselian_suite(spec: ExperimentSpec) -> FrameReport:
    """Constant estimates per truncation plus bound checks over the sweep.

    The bound row verifies besselian_sum(x, x*) <= L-hat * ||x|| * ||x*||
    for every swept pair, where L-hat is the estimate over the same sweep
    (so its budget is a superset of every pair it is checked against).
    """
    F = frame_from_label(spec.label)
    n_max = spec.schedule[-1]
    data = _sweep_data(F, spec.samples, spec.seed, n_max)
    flags, any_zero = _zero_pair_flags(F, n_max)

    probes: list[ProbeResult] = []
    constants = []
    for N in spec.schedule:
        sums = [_prefix_sum(prods, N) for _nx, _nxs, prods in data]
        lhat = max(sums)
        constants.append(lhat)
        margin = max(
            s - lhat * nx * nxs for s, (nx, nxs, _p) in zip(sums, data)
        )
        probes.append(ProbeResult("constant", N, lhat))
        probes.append(
            ProbeResult(
                "besselian-bound-margin",
                N,
                margin,
                passed=margin <= spec.abs_tol,
                tolerance=spec.abs_tol,
            )
        )
    monotone = all(a <= b for a, b in zip(constants, constants[1:]))
    probes.append(
        ProbeResult(
            "constant-monotone",
            n_max,
            1.0 if monotone else 0.0,
            passed=monotone,
        )
    )
    if any_zero and constants[-1] == 0.0:
        flags.append("degenerate")
    return FrameReport(
        label=spec.label,
        suite="besselian",
        truncation=n_max,
        constant=constants[-1],
        seed=spec.seed,
        samples=spec.samples,
        probes=tuple(probes),
        flags=tuple(flags),
    )


def run_duality_suite(spec: ExperimentSpec) -> FrameReport:
    """Constant estimates for a frame and its dual frame at matched budgets.

    Both sides see the same truncations, the same sample count and mirrored
    seed-derived streams (ball-identity keying), so the relative gap row is
    a like-for-like comparison.
    """
    F = frame_from_label(spec.label)
    Fdual = dual_frame(F)
    n_max = spec.schedule[-1]
    primal = _constants_by_truncation(
        _sweep_data(F, spec.samples, spec.seed, n_max), spec.schedule
    )
    dual = _constants_by_truncation(
        _sweep_data(Fdual, spec.samples, spec.seed, n_max), spec.schedule
    )
    flags, _ = _zero_pair_flags(F, n_max)

    probes: list[ProbeResult] = []
    for N, lf, ld in zip(spec.schedule, primal, dual):
        top = max(lf, ld)
        rel = 0.0 if top == 0.0 else abs(lf - ld) / top
        probes.append(ProbeResult("constant-primal", N, lf))
        probes.append(ProbeResult("constant-dual", N, ld))
        probes.append(
            ProbeResult(
                "duality-gap-rel",
                N,
                rel,
                passed=rel <= spec.rel_tol,
                tolerance=spec.rel_tol,
            )
        )
    return FrameReport(
        label=spec.label,
        suite="duality",
        truncation=n_max,
        constant=primal[-1],
        seed=spec.seed,
        samples=spec.samples,
        probes=tuple(probes),
        flags=tuple(flags),
    )


def run_james_suite(spec: ExperimentSpec) -> FrameReport:
    """Shrinking / boundedly-complete decay probe with fixed verdict strings.

    A conclusive verdict -- decay consistent with reflexivity, or an explicit
    non-shrinking / non-boundedly-complete witness -- counts as a pass; only
    "inconclusive" fails the suite.
    """
    F = frame_from_label(spec.label)
    cfg = ProbeConfig(
        schedule=spec.schedule,
        samples=spec.probe_samples,
        seed=spec.seed,
        tail_tol=spec.tail_tol,
    )
    return reflexivity_probe(F, cfg, suite="james")


def run_unconditionality_suite(spec: ExperimentSpec) -> FrameReport:
    """Rearrangement and sign-flip stability of partial expansions.

    Pass/fail applies only at truncations that cover exact reconstruction of
    every sampled element (finite sums commute, so the deviation must vanish
    there); shorter truncations are reported as information.
    """
    F = frame_from_label(spec.label)
    space = F.space
    elements = [
        space.random_ball_point(
            derive_rng(spec.seed, "uncond-element", *space.ball_key, k)
        )
        for k in range(spec.uncond_elements)
    ]
    coverings = [covering_truncation(F, x) for x in elements]
    cover_all: Optional[int] = None
    if all(c is not None for c in coverings):
        cover_all = max(coverings) if coverings else None

    flags, _ = _zero_pair_flags(F, spec.schedule[-1])
    probes: list[ProbeResult] = []
    notes: list[str] = []
    if cover_all is None:
        notes.append(
            "no finite covering truncation for the sampled elements; all rows informational"
        )
    for N in spec.schedule:
        if F.max_rank is not None and N > F.max_rank:
            continue
        results = [
            unconditional_probe(F, x, N, spec.trials, spec.seed) for x in elements
        ]
        deviation = max(r.deviation for r in results)
        flip = max(r.sign_flip_norm for r in results)
        checkable = cover_all is not None and N >= cover_all
        probes.append(
            ProbeResult(
                "permutation-deviation",
                N,
                deviation,
                passed=deviation <= spec.deviation_tol if checkable else None,
                tolerance=spec.deviation_tol if checkable else None,
            )
        )
        probes.append(ProbeResult("signflip-partial-norm", N, flip))
    return FrameReport(
        label=spec.label,
        suite="unconditionality",
        truncation=spec.schedule[-1],
        constant=0.0,
        seed=spec.seed,
        samples=spec.uncond_elements,
        probes=tuple(probes),
        flags=tuple(flags),
        notes=tuple(notes),
    )


SUITES: dict[str, Callable[[ExperimentSpec], FrameReport]] = {
    "besselian": run_besselian_suite,
    "duality": run_duality_suite,
    "james": run_james_suite,
    "unconditionality": run_unconditionality_suite,
}


# ---------------------------------------------------------------------------
# bundles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReportBundle:
    """A manifest plus reports sorted by (suite, frame label)."""

    manifest: dict
    reports: tuple[FrameReport, ...]

    def all_pass(self) -> bool:
        return all(r.all_pass() for r in self.reports)

    def to_json_obj(self) -> dict:
        return {
            "manifest": self.manifest,
            "reports": [r.to_json_obj() for r in self.reports],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["suite", "frame", "N", "metric", "value", "pass"])
        for report in self.reports:
            writer.writerows(report.csv_rows())
        return buf.getvalue()

    @classmethod
    def from_json_obj(cls, obj) -> "ReportBundle":
        return cls(
            manifest=obj["manifest"],
            reports=tuple(FrameReport.from_json_obj(r) for r in obj["reports"]),
        )


def run_all(
    specs: Iterable[ExperimentSpec],
    workers: int = 1,
    suites: Optional[Iterable[str]] = None,
) -> ReportBundle:
    """Run the selected suites (default: all) over the specs.

    Suite runs are independent; with workers > 1 they execute on a thread
    pool.  Reports are sorted afterwards, and every random draw is keyed by
    (seed, purpose, index), so the bundle is byte-identical whatever the
    degree of parallelism.
    """
    specs = tuple(specs)
    names = tuple(sorted(suites)) if suites is not None else tuple(sorted(SUITES))
    for name in names:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}")
    tasks = [(name, spec) for spec in specs for name in names]

    def run_one(task):
        name, spec = task
        start = time.perf_counter()
        report = SUITES[name](spec)
        log.info(
            "suite %s on %s finished in %.3f s",
            name,
            spec.label,
            time.perf_counter() - start,
        )
        return report

    if workers <= 1:
        reports = [run_one(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(run_one, tasks))

    manifest = {
        "version": __version__,
        "suites": list(names),
        "specs": [
            s.to_json_obj() for s in sorted(specs, key=lambda s: s.label)
        ],
    }
    return ReportBundle(
        manifest=manifest,
        reports=tuple(sorted(reports, key=lambda r: (r.suite, r.label))),
    )


def write_reports(bundle: ReportBundle, out_dir: str) -> tuple[str, str]:
    """Write report.json and report.csv under out_dir; returns the paths."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    json_path = os.path.join(out_dir, "report.json")
    csv_path = os.path.join(out_dir, "report.csv")
    with open(json_path, "w", encoding="utf-8") as fh:
        fh.write(bundle.to_json())
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(bundle.to_csv())
    return json_path, csv_path
