"""Serialization of runs: CSV time series and snapshots, fit reports, run manifests.

Fit report schema (``fits.json``)::

    {
      "schema": "firmbank.fits/1",
      "tail_fraction": float,
      "snapshots": [
        {"period": int, "n": int,
         "hill": TailFit | {"error": str},
         "rank_regression": TailFit | {"error": str},
         "lognormal": {"mu_log", "sigma_log", "ks_statistic"} | {"error": str},
         "lognormal_tail_ks": float | null,
         "stability": {"fractions", "exponents", "stderrs", "drifting"} | {"error": str}}
      ],
      "synchronization": {"zero_lag": float | null, "lagged": {"0": ..., "1": ...}} | null,
      "dispersion_index": float | null
    }

TailFit objects carry ``exponent_mu, tail_start, n_tail, stderr, method, ks_statistic``.
"""
from __future__ import annotations

import csv
import dataclasses
import datetime as dt
import enum
import hashlib
import json
import re
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import __version__
from . import analytics as an
from .config import params_dict
from .engine import SimulationRun
from .model import PeriodRecord

FITS_SCHEMA = "firmbank.fits/1"
TIMESERIES_HEADER = PeriodRecord.fields()
SIZES_HEADER = ("firm", "size")
BANKRUPTCY_HEADER = ("period", "firm", "size", "bad_debt")
_SIZES_RE = re.compile(r"sizes_(\d+)\.csv$")


class OutputError(OSError):
    pass


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def _jsonable(obj):
    if dataclasses.is_dataclass(obj):
        return {k: _jsonable(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _attempt(fn, *args):
    try:
        return _jsonable(fn(*args))
    except ValueError as exc:
        return {"error": str(exc)}


def fit_snapshot(period: int, sizes: np.ndarray, tail_fraction: float = 0.1) -> dict:
    x = np.asarray(sizes, dtype=float)
    x = x[x > 0]
    entry = {
        "period": int(period),
        "n": int(x.size),
        "hill": _attempt(an.fit_power_tail, x, an.TailMethod.HILL, tail_fraction),
        "rank_regression": _attempt(an.fit_power_tail, x, an.TailMethod.RANK_REGRESSION, tail_fraction),
        "lognormal": _attempt(an.fit_lognormal, x),
        "lognormal_tail_ks": None,
        "stability": _attempt(an.tail_stability, x),
    }
    if "error" not in entry["hill"] and "error" not in entry["lognormal"]:
        entry["lognormal_tail_ks"] = an.lognormal_tail_ks(x, an.fit_lognormal(x), an.fit_power_tail(x, "hill", tail_fraction))
    return entry


def fit_report(
    snapshots: Mapping[int, np.ndarray],
    history: Sequence[PeriodRecord] = (),
    tail_fraction: float = 0.1,
) -> dict:
    report = {
        "schema": FITS_SCHEMA,
        "tail_fraction": tail_fraction,
        "snapshots": [fit_snapshot(p, snapshots[p], tail_fraction) for p in sorted(snapshots)],
        "synchronization": None,
        "dispersion_index": None,
    }
    if len(history) >= 10 and all(h.bank_equity > 0 for h in history):
        sync = an.bankruptcy_synchronization(history)
        report["synchronization"] = {"zero_lag": sync.peak_correlation, "lagged": _jsonable(sync.lagged)}
    counts = [h.bankruptcies for h in history]
    if counts and sum(counts) > 0:
        report["dispersion_index"] = an.dispersion_index(counts)
    return report


@dataclasses.dataclass
class RunManifest:
    params: dict
    seed: int
    version: str
    started: str
    finished: str
    terminal: str
    periods_completed: int
    files: list[dict]


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_csv(path: Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def emit_outputs(
    run: SimulationRun,
    fits: dict | None,
    out_dir,
    started: str | None = None,
) -> RunManifest:
    """Write a run's data files and ``manifest.json`` into ``out_dir``.

    Data files are a pure function of the run, so identical runs give identical digests;
    only the manifest's timestamps differ.
    """
    out = Path(out_dir)
    now = dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds")
    try:
        out.mkdir(parents=True, exist_ok=True)
        written: list[Path] = []

        p = out / "timeseries.csv"
        _write_csv(p, TIMESERIES_HEADER, ([fmt(getattr(r, f)) for f in TIMESERIES_HEADER] for r in run.history))
        written.append(p)

        for period in sorted(run.snapshots):
            p = out / f"sizes_{period}.csv"
            sizes = run.snapshots[period]
            _write_csv(p, SIZES_HEADER, ((str(i), fmt(s)) for i, s in enumerate(sizes.tolist())))
            written.append(p)

        p = out / "bankruptcies.csv"
        cols = run.bankruptcy_log.columns()
        rows = zip(cols["period"].tolist(), cols["firm"].tolist(), cols["size"].tolist(), cols["bad_debt"].tolist())
        _write_csv(p, BANKRUPTCY_HEADER, ((fmt(a), fmt(b), fmt(c), fmt(d)) for a, b, c, d in rows))
        written.append(p)

        if fits is not None:
            p = out / "fits.json"
            p.write_text(json.dumps(_jsonable(fits), indent=2, sort_keys=True) + "\n")
            written.append(p)

        manifest = RunManifest(
            params=params_dict(run.params),
            seed=run.params.seed,
            version=__version__,
            started=started or now,
            finished=now,
            terminal=run.terminal,
            periods_completed=len(run.history),
            files=[{"name": f.name, "sha256": _sha256(f), "bytes": f.stat().st_size} for f in written],
        )
        (out / "manifest.json").write_text(json.dumps(dataclasses.asdict(manifest), indent=2) + "\n")
    except OSError as exc:
        raise OutputError(f"cannot write outputs to {out}: {exc}") from exc
    return manifest


def read_sizes(out_dir) -> dict[int, np.ndarray]:
    out = Path(out_dir)
    if not out.is_dir():
        raise OutputError(f"no such output directory: {out}")
    snaps = {}
    for path in out.glob("sizes_*.csv"):
        m = _SIZES_RE.search(path.name)
        if m is None:
            continue
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))[1:]
        snaps[int(m.group(1))] = np.array([float(r[1]) for r in rows])
    return snaps


def read_timeseries(out_dir) -> list[PeriodRecord]:
    path = Path(out_dir) / "timeseries.csv"
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != TIMESERIES_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        out = []
        for row in reader:
            kw = {k: float(v) for k, v in row.items()}
            kw["period"] = int(row["period"])
            kw["bankruptcies"] = int(row["bankruptcies"])
            out.append(PeriodRecord(**kw))
    return out
