"""CSV/JSON writers for every analysis product.

All floating-point values are printed with 12 significant digits and all
dates as ISO-8601, with no timestamps or environment-dependent content,
so identical inputs always serialize to byte-identical files.
"""

from __future__ import annotations

import json
import re

from .dispersion import Dendrogram, DispersionMatrix, VarianceSeries, dendrogram_to_tree
from .inconsistency import InconsistencySeries
from .spectral import MarketSizeSeries, SpectralSeries

_FLOAT_FMT = "%.12g"


def fmt(value) -> str:
    return _FLOAT_FMT % float(value)


def slugify(label) -> str:
    return re.sub(r"[^a-z0-9]+", "_", label.lower()).strip("_")


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_norm_series(series, csv_path, json_path=None):
    smoothed = series.smoothed
    rows = (
        (d.isoformat(), fmt(r), "" if smoothed is None else fmt(s))
        for d, r, s in zip(series.dates, series.raw,
                           series.raw if smoothed is None else smoothed)
    )
    write_csv(csv_path, ("date", "raw", "smoothed"), rows)
    if json_path is not None:
        write_json(json_path, {
            "dates": [d.isoformat() for d in series.dates],
            "raw": [float(v) for v in series.raw],
            "smoothed": None if smoothed is None else [float(v) for v in smoothed],
        })


def write_period_stats(stats, csv_path, json_path=None):
    write_csv(csv_path, ("period", "mean", "std"),
              ((s.label, fmt(s.mean), fmt(s.std)) for s in stats))
    if json_path is not None:
        write_json(json_path, [
            {"period": s.label, "start": s.start.isoformat(),
             "end": s.end.isoformat(), "n_days": s.n_days,
             "mean": float(s.mean), "std": float(s.std)}
            for s in stats
        ])


def write_density_curves(stats, out_dir):
    """One `density_<period>.csv` per period; returns the written paths.

    Zero-variance periods have no density estimate and get a header-only
    file.
    """
    paths = []
    for s in stats:
        path = out_dir / f"density_{slugify(s.label)}.csv"
        write_csv(path, ("x", "density"),
                  ((fmt(x), fmt(y)) for x, y in zip(s.density_x, s.density_y)))
        paths.append(path)
    return paths


def write_turning_points(seq, path):
    write_csv(path, ("index", "date", "value", "kind"),
              ((str(p.index), "" if p.date is None else p.date.isoformat(),
                fmt(p.value), p.kind) for p in seq))


def write_lambda1_series(series: SpectralSeries, path):
    write_csv(path, ("date", "lambda1"),
              ((d.isoformat(), fmt(v)) for d, v in zip(series.dates, series.lambda1)))


def write_market_size(series: MarketSizeSeries, path):
    write_csv(path, ("date", "market_size"),
              ((d.isoformat(), fmt(v)) for d, v in zip(series.dates, series.values)))


def write_inconsistency(series: InconsistencySeries, path):
    write_csv(path, ("date", "nu_MR", "nu_MSigma"),
              ((d.isoformat(), fmt(a), fmt(b))
               for d, a, b in zip(series.dates, series.nu_MR, series.nu_MSigma)))


def write_variance_series(series: VarianceSeries, path):
    write_csv(path, ("date", "variance"),
              ((d.isoformat(), fmt(v)) for d, v in zip(series.dates, series.values)))


def write_dendrogram_csv(dendro: Dendrogram, path):
    write_csv(path, ("step", "cluster_a", "cluster_b", "height", "size"),
              ((str(m.step), str(m.cluster_a), str(m.cluster_b),
                fmt(m.height), str(m.size)) for m in dendro.merges))


def write_dendrogram_json(dendro: Dendrogram, path, dates=None):
    write_json(path, dendrogram_to_tree(dendro, dates))


def write_cluster_cut(dates, labels, path):
    write_csv(path, ("date", "cluster"),
              ((d.isoformat(), str(int(c))) for d, c in zip(dates, labels)))


def write_dispersion_matrix(dm: DispersionMatrix, matrix_path, dates_path):
    """Persist the W×W matrix as CSV with a date-index sidecar."""
    write_csv(matrix_path, tuple(f"c{k}" for k in range(len(dm.dates))),
              ((fmt(v) for v in row) for row in dm.matrix))
    write_csv(dates_path, ("index", "date"),
              ((str(k), d.isoformat()) for k, d in enumerate(dm.dates)))
