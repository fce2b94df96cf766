"""Batch command-line front end.

Every subcommand reads flat files and writes its artifacts into ``--out``.
Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
failure. Failures also print a JSON error document to stderr (and write it
to ``OUT/error.json`` when the output directory exists).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from regimekit import __version__
from regimekit.cart import fit_thresholds, thresholds_to_json
from regimekit.core import (
    ConfigError,
    DataError,
    RegimeError,
    SeriesMatrix,
    ThresholdSet,
    load_series,
    regime_names,
    standardize,
    write_csv,
)
from regimekit.dct import DEFAULT_LAMBDA, dct_matrix, euclidean_matrix
from regimekit.diagnostics import elbow_curve, gap_statistic, silhouette_curve, write_curves_csv
from regimekit.kmeans import DEFAULT_K, DEFAULT_RESTARTS, kmeans
from regimekit.pcoa import pcoa_embed, write_embedding
from regimekit.priceanalysis import chow_test, regime_regression, regression_table, to_fraction, vpr
from regimekit.smoothing import DEFAULT_LAGS as DEFAULT_H
from regimekit.smoothing import count_regime_changes, diff_vs_reference, majority_smooth
from regimekit.svg import line_chart, silhouette_chart, timeline_chart
from regimekit.validation import DEFAULT_ALPHA, anova_oneway, fisher_lsd, silhouette, tukey_hsd
from regimekit.volatility import DEFAULT_LAGS, arch_tests, garch11_fit, write_cond_var_csv, write_fit_json

MANIFEST = "run-manifest.json"


# --------------------------------------------------------------------------- io


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _dump(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=False, default=_json_default) + "\n", encoding="utf-8")


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _columns(spec):
    return [c.strip() for c in spec.split(",") if c.strip()] if spec else None


def _split_spec(spec: str, default_col: str):
    """``path[:column]`` -> (path, column)."""
    if ":" in spec and not Path(spec).exists():
        path, col = spec.rsplit(":", 1)
        return path, col
    return spec, default_col


def read_labels(path, column="regime"):
    """Read ``date`` plus one label column from a CSV."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if column not in (reader.fieldnames or []):
            raise DataError(f"{path}: missing column {column!r}")
        dates, labels = [], []
        for rec in reader:
            dates.append(rec.get("date", ""))
            labels.append(rec[column])
    return dates, np.array(labels)


def write_labels(path, times, columns: dict, values: SeriesMatrix | None = None) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        head = ["date"]
        if values is not None:
            head += list(values.variable_names)
        w.writerow(head + list(columns))
        for t in range(len(times)):
            row = [str(times[t])]
            if values is not None:
                row += [repr(float(v)) for v in values.values[t]]
            w.writerow(row + [str(columns[c][t]) for c in columns])


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _rank_codes(labels, order=None):
    """Map labels to ordered regime indices and return (codes, names)."""
    labels = np.asarray(labels)
    uniq = [str(u) for u in np.unique(labels)]
    if order is None:
        for k in range(len(uniq), 9):
            names = regime_names(k)
            if set(uniq) <= set(names):
                order = list(names)
                break
        else:
            order = uniq
    index = {n: i for i, n in enumerate(order)}
    missing = [u for u in uniq if u not in index]
    if missing:
        raise DataError(f"unknown regime label(s): {', '.join(missing)}")
    return np.array([index[str(v)] for v in labels], dtype=np.int64), list(order)


# ------------------------------------------------------------------- building


def _clustering_matrix(X: SeriesMatrix, mode: str) -> SeriesMatrix:
    if mode not in ("auto", "on", "off"):
        raise ConfigError(f"--standardize must be auto, on or off, got {mode!r}")
    if mode == "on" or (mode == "auto" and X.p >= 2):
        return standardize(X)
    return X


def _cluster(Z: SeriesMatrix, X: SeriesMatrix, k, lam, restarts, seed):
    """k-means on Z directly (lam is None) or on the PCoA embedding of its DCT matrix."""
    if lam is None:
        return kmeans(Z, k, restarts=restarts, seed=seed, order_by=X), None
    D = dct_matrix(Z, lam)
    E = pcoa_embed(D, Z.p)
    return kmeans(E.coords, k, restarts=restarts, seed=seed, order_by=X), E


def _add_volatility(X: SeriesMatrix, column: str | None):
    col = column or X.variable_names[0]
    fit = garch11_fit(X.column(col))
    return X.with_column(f"{col}_volatility", fit.cond_var), fit


# ---------------------------------------------------------------- subcommands


def cmd_ingest(args) -> int:
    X = load_series(args.input, _columns(args.columns), args.date_column, args.impute)
    out = _out_dir(args)
    write_csv(X, out / "series.csv")
    _dump(out / "ingest.json", {
        "T": X.T, "p": X.p, "variables": list(X.variable_names),
        "first": str(X.times[0]), "last": str(X.times[-1]),
        "mean": X.values.mean(axis=0).tolist(), "impute": args.impute,
    })
    return 0


def cmd_volatility(args) -> int:
    X = load_series(args.input, _columns(args.columns), args.date_column, args.impute)
    col = args.column or X.variable_names[0]
    x = X.column(col)
    tests = arch_tests(x - x.mean(), args.lags)
    fit = garch11_fit(x)
    out = _out_dir(args)
    write_fit_json(fit, out / "garch.json", tests)
    write_cond_var_csv(X.times, fit, out / "cond_var.csv")
    write_csv(X.with_column(f"{col}_volatility", fit.cond_var), out / "series_with_volatility.csv")
    return 0


def cmd_cluster(args) -> int:
    X = load_series(args.input, _columns(args.columns), args.date_column, args.impute)
    Z = _clustering_matrix(X, args.standardize)
    lam = None if args.lam == 0 else args.lam
    res, E = _cluster(Z, X, args.k, lam, args.restarts, args.seed)
    out = _out_dir(args)
    names = regime_names(args.k)
    write_labels(out / "labels.csv", X.times, {
        "cluster": res.assignment.cluster_of.tolist(),
        "regime": [names[r] for r in res.assignment.regime_of],
    }, X)
    doc = res.to_dict()
    doc["lambda"] = args.lam
    _dump(out / "kmeans.json", doc)
    if E is not None:
        write_embedding(E, X.times, out / "embedding.csv", out / "eigenvalues.json")
    return 0


def cmd_thresholds(args) -> int:
    X = load_series(args.input, _columns(args.columns), args.date_column, args.impute)
    x = X.column(args.column or X.variable_names[0])
    _, labels = read_labels(args.labels, args.label_column)
    codes, order = _rank_codes(labels)
    present = sorted(set(codes.tolist()))
    ts = fit_thresholds(x, codes, names=tuple(order[i] for i in present))
    counts = [int(np.sum(codes == r)) for r in present]
    means = [float(x[codes == r].mean()) for r in present]
    thresholds_to_json(ts, _out_dir(args) / "thresholds.json", counts, means)
    return 0


def cmd_smooth(args) -> int:
    dates, labels = read_labels(args.labels, args.label_column)
    sm = majority_smooth(labels, args.h)
    out = _out_dir(args)
    with (out / "smoothed.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "before", "after"])
        for d, a, b in zip(dates, labels, sm.labels):
            w.writerow([d, a, b])
    _dump(out / "smooth.json", _smooth_summary(labels, sm.labels, args.h))
    return 0


def _smooth_summary(before, after, h):
    return {
        "h": h,
        "changes_before": count_regime_changes(before),
        "changes_after": count_regime_changes(after),
        "replaced": diff_vs_reference(after, before),
    }


def _validation_doc(x, codes, names, alpha, D=None, D_label="euclidean"):
    doc = {"anova": anova_oneway(x, codes).to_dict()}
    for fn in (fisher_lsd, tukey_hsd):
        g = fn(x, codes, alpha)
        d = g.to_dict()
        d["letters"] = {names[int(k)]: v for k, v in g.letters.items()}
        d["pvalues"] = {f"{names[int(a)]}|{names[int(b)]}": p for (a, b), p in g.pvalues.items()}
        doc[g.method] = d
    sil = None
    if D is not None and np.unique(codes).size >= 2:
        sil = silhouette(D, codes)
        doc["silhouette"] = {
            "distance": D_label,
            "mean": sil.mean,
            "min": float(sil.values.min()),
            "negative": int(np.sum(sil.values < 0)),
            "per_regime": {names[int(c)]: m for c, m in sil.cluster_means().items()},
        }
    return doc, sil


def cmd_validate(args) -> int:
    X = load_series(args.input, _columns(args.columns), args.date_column, args.impute)
    x = X.column(args.column or X.variable_names[0])
    _, labels = read_labels(args.labels, args.label_column)
    codes, order = _rank_codes(labels)
    Z = _clustering_matrix(X, args.standardize)
    doc, sil = _validation_doc(x, codes, order, args.alpha, euclidean_matrix(Z))
    out = _out_dir(args)
    _dump(out / "validation.json", doc)
    present = sorted(set(codes.tolist()))
    silhouette_chart(sil.values, sil.labels, [order[i] for i in present], path=out / "silhouette.svg")
    return 0


def _diagnostics(Z, kmax, B, seed, restarts, out: Path):
    curves = [
        elbow_curve(Z, kmax, seed, restarts),
        silhouette_curve(Z, kmax, seed, restarts),
        gap_statistic(Z, kmax, B, seed, restarts=min(restarts, 10)),
    ]
    write_curves_csv(curves, out / "diagnostics.csv")
    elbow, sil, gap = curves
    line_chart(elbow.ks, elbow.values, "Elbow rule", "k", "within-cluster SS", elbow.selected_k, path=out / "elbow.svg")
    line_chart(sil.ks, sil.values, "Average silhouette", "k", "mean silhouette", sil.selected_k,
               path=out / "silhouette_curve.svg")
    line_chart(gap.ks, gap.values, "Gap statistic", "k", "gap", gap.selected_k, errors=gap.std_errors,
               path=out / "gap.svg")
    doc = {c.criterion: {"selected_k": c.selected_k, **c.metadata} for c in curves}
    doc["gap"]["reference_draws"] = gap.reference_draws
    return doc


def cmd_diagnose(args) -> int:
    X = load_series(args.input, _columns(args.columns), args.date_column, args.impute)
    Z = _clustering_matrix(X, args.standardize)
    out = _out_dir(args)
    _dump(out / "diagnostics.json", _diagnostics(Z.values, args.kmax, args.B, args.seed, args.restarts, out))
    return 0


def cmd_regress(args) -> int:
    X = load_series(args.input, _columns(args.columns), args.date_column, args.impute)
    W = load_series(args.weights)
    S = load_series(args.sectors)
    if not (np.array_equal(W.times, X.times) and np.array_equal(S.times, X.times)):
        raise DataError("weights, sectors and headline series must share the same dates")
    if W.variable_names != S.variable_names:
        raise DataError("weights and sectors must list the same sectors in the same order")
    head = X.column(args.column or X.variable_names[0])
    v = vpr(W.values, S.values, head, units=args.units)
    inf = to_fraction(head, args.units)
    base = regime_regression(v, inf, label="Base")
    models, chows, doc = [base], [None], {"base": base.to_dict()}
    for spec in args.labels or []:
        path, col = _split_spec(spec, "regime")
        dates, labels = read_labels(path, col)
        if [str(t) for t in X.times] != list(dates):
            raise DataError(f"{path}: label dates do not match the series")
        codes, order = _rank_codes(labels)
        named = np.array([order[c] for c in codes])
        full = regime_regression(v, inf, named, baseline=order[int(codes.min())], label=col)
        ch = chow_test(base, full)
        models.append(full)
        chows.append(ch)
        doc[col] = full.to_dict() | {"chow": ch.to_dict()}
    out = _out_dir(args)
    (out / "regression.txt").write_text(regression_table(models, chows), encoding="utf-8")
    _dump(out / "regression.json", doc)
    return 0


def _comparison(series: dict, reference: str):
    ref = series[reference][0]
    doc = {"reference": reference, "series": {}}
    for name, (codes, names) in series.items():
        counts = {names[r]: int(np.sum(codes == r)) for r in range(len(names))}
        doc["series"][name] = {
            "counts": counts,
            "counts_by_rank": [int(np.sum(codes == r)) for r in range(len(names))],
            "regime_changes": count_regime_changes(codes),
            "diffs_vs_reference": diff_vs_reference(codes, ref),
        }
    return doc


def cmd_compare(args) -> int:
    series, dates0 = {}, None
    for spec in args.labels:
        path, col = _split_spec(spec, "regime")
        dates, labels = read_labels(path, col)
        if dates0 is None:
            dates0 = dates
        elif dates != dates0:
            raise DataError(f"{spec}: time index does not match {args.labels[0]}")
        name = f"{Path(path).stem}:{col}"
        if name in series:
            name = f"{name}#{len(series)}"
        series[name] = _rank_codes(labels)
    if args.rules:
        if not args.input:
            raise ConfigError("--rules needs --input with the classified variable")
        rule = json.loads(Path(args.rules).read_text(encoding="utf-8"))
        X = load_series(args.input, _columns(args.columns), args.date_column, args.impute)
        if dates0 is not None and [str(t) for t in X.times] != dates0:
            raise DataError("rule input dates do not match the label files")
        ts = ThresholdSet(rule["cuts"], names=tuple(rule.get("names") or regime_names(len(rule["cuts"]) + 1)))
        codes = ts.classify(X.column(args.column or X.variable_names[0]))
        series[rule.get("name", "rules")] = (codes, list(ts.names))
    if not series:
        raise ConfigError("nothing to compare")
    _dump(_out_dir(args) / "comparison.json", _comparison(series, next(iter(series))))
    return 0


# ------------------------------------------------------------------- pipeline

PIPELINE_KEYS = (
    "input", "columns", "date_column", "impute", "k", "lam", "h", "smooth", "restarts", "seed",
    "alpha", "standardize", "volatility", "kmax", "B", "diagnostics", "units",
)


def cmd_pipeline(args) -> int:
    if args.manifest:
        manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
        for key, val in manifest["parameters"].items():
            setattr(args, key, val)
        if _sha256(args.input) != manifest.get("input_sha256"):
            raise DataError("input file changed since the manifest was written")
    if args.input is None:
        raise ConfigError("pipeline needs --input (or --manifest)")
    if args.smooth not in ("majority", "none"):
        raise ConfigError("--smooth must be 'majority' or 'none'")
    out = _out_dir(args)
    X = load_series(args.input, _columns(args.columns), args.date_column, args.impute)
    outputs = []

    fit = None
    if args.volatility:
        X, fit = _add_volatility(X, None)
        write_fit_json(fit, out / "garch.json", arch_tests(X.values[:, 0] - fit.mu, DEFAULT_LAGS))
        outputs.append("garch.json")
    Z = _clustering_matrix(X, args.standardize)
    x = X.values[:, 0]
    names = regime_names(args.k)

    km, _ = _cluster(Z, X, args.k, None, args.restarts, args.seed)
    dct_res, _ = _cluster(Z, X, args.k, args.lam, args.restarts, args.seed)
    km_codes = km.assignment.regime_of
    dct_codes = dct_res.assignment.regime_of
    if args.smooth == "majority":
        ms_codes = majority_smooth(km_codes, args.h).labels
    else:
        ms_codes = km_codes.copy()
    strips = {"kmeans": km_codes, "dct": dct_codes, "ms": ms_codes}
    write_labels(out / "labels.csv", X.times, {k: [names[c] for c in v] for k, v in strips.items()}, X)
    outputs.append("labels.csv")

    ts = fit_thresholds(x, km.assignment)
    counts = np.bincount(km_codes, minlength=args.k)
    means = [float(x[km_codes == r].mean()) for r in range(args.k)]
    thresholds_to_json(ts, out / "thresholds.json", counts, means)
    outputs.append("thresholds.json")

    D_euc = euclidean_matrix(Z)
    validation = {}
    for key, codes in strips.items():
        present = np.unique(codes)
        if present.size < 2:
            continue
        D = D_euc
        label = "euclidean"
        doc, sil = _validation_doc(x, codes, names, args.alpha, D, label)
        if key == "dct" and args.lam > 0:
            dsil = silhouette(dct_matrix(Z, args.lam), codes)
            doc["silhouette_dct"] = {"distance": "dct", "diagnostic_only": True, "mean": dsil.mean}
        validation[key] = doc
        if key == "kmeans":
            silhouette_chart(sil.values, sil.labels, [names[i] for i in present],
                             title="Silhouette (k-means)", path=out / "silhouette.svg")
            outputs.append("silhouette.svg")
    _dump(out / "validation.json", validation)
    outputs.append("validation.json")

    comparison = _comparison({k: (v, list(names)) for k, v in strips.items()}, "kmeans")
    comparison["smoothing"] = _smooth_summary(km_codes, ms_codes, args.h if args.smooth == "majority" else 0)
    _dump(out / "summary.json", comparison)
    outputs.append("summary.json")

    timeline_chart([str(t) for t in X.times], {"k-means": km_codes, "DCT": dct_codes, "MS": ms_codes},
                   names, title="Regime classification", path=out / "timeline.svg")
    outputs.append("timeline.svg")

    if args.diagnostics:
        kmax = min(args.kmax, X.T - 1)
        _dump(out / "diagnostics.json", _diagnostics(Z.values, kmax, args.B, args.seed, args.restarts, out))
        outputs += ["diagnostics.json", "diagnostics.csv", "elbow.svg", "silhouette_curve.svg", "gap.svg"]

    params = {key: getattr(args, key) for key in PIPELINE_KEYS}
    manifest = {
        "command": "pipeline",
        "version": __version__,
        "parameters": params,
        "input_sha256": _sha256(args.input),
        "outputs": {name: _sha256(out / name) for name in sorted(outputs)},
    }
    _dump(out / MANIFEST, manifest)
    return 0


# ---------------------------------------------------------------------- parser


def _common(p, series=True):
    p.add_argument("--out", default=".", help="output directory (created if missing)")
    if series:
        p.add_argument("--input", help="CSV with a date column and numeric columns")
        p.add_argument("--columns", help="comma-separated value columns (default: all)")
        p.add_argument("--date-column", default="date")
        p.add_argument("--impute", choices=["none", "linear"], default=None,
                       help="fill missing cells by linear interpolation instead of failing")


def _clustering(p):
    p.add_argument("--k", type=int, default=DEFAULT_K)
    p.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--standardize", default="auto", choices=["auto", "on", "off"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="regimekit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"regimekit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate and normalize an input CSV")
    _common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("volatility", help="ARCH tests and GARCH(1,1) conditional variance")
    _common(p)
    p.add_argument("--column")
    p.add_argument("--lags", type=int, default=DEFAULT_LAGS)
    p.set_defaults(func=cmd_volatility)

    p = sub.add_parser("cluster", help="k-means regimes, optionally on a DCT embedding")
    _common(p)
    _clustering(p)
    p.add_argument("--lambda", dest="lam", type=float, default=0.0,
                   help="temporal-contiguity weight; 0 clusters the raw (scaled) variables")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("thresholds", help="CART cut points between labelled regimes")
    _common(p)
    p.add_argument("--column")
    p.add_argument("--labels", required=True)
    p.add_argument("--label-column", default="regime")
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("smooth", help="majority-vote smoothing of a label column")
    _common(p, series=False)
    p.add_argument("--labels", required=True)
    p.add_argument("--label-column", default="regime")
    p.add_argument("--h", type=int, default=DEFAULT_H, help="number of lags in the voting window")
    p.set_defaults(func=cmd_smooth)

    p = sub.add_parser("validate", help="ANOVA, Fisher/Tukey letters and silhouettes")
    _common(p)
    p.add_argument("--column")
    p.add_argument("--labels", required=True)
    p.add_argument("--label-column", default="regime")
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--standardize", default="auto", choices=["auto", "on", "off"])
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("diagnose", help="elbow, average-silhouette and gap-statistic curves")
    _common(p)
    p.add_argument("--kmax", type=int, default=8)
    p.add_argument("--B", type=int, default=100, help="gap-statistic reference draws")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=DEFAULT_RESTARTS)
    p.add_argument("--standardize", default="auto", choices=["auto", "on", "off"])
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("regress", help="relative-price variability regressions and Chow tests")
    _common(p)
    p.add_argument("--column", help="headline inflation column")
    p.add_argument("--weights", required=True)
    p.add_argument("--sectors", required=True)
    p.add_argument("--labels", action="append", help="label file as PATH[:COLUMN]; repeatable")
    p.add_argument("--units", choices=["percent", "fraction"], default="percent")
    p.set_defaults(func=cmd_regress)

    p = sub.add_parser("compare", help="regime counts, changes and positional differences")
    _common(p)
    p.add_argument("--labels", action="append", default=[], help="label file as PATH[:COLUMN]; first is the reference")
    p.add_argument("--rules", help="JSON rule file {name, cuts, names} applied to --input")
    p.add_argument("--column")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("pipeline", help="run the full procedure end to end")
    _common(p)
    _clustering(p)
    p.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA)
    p.add_argument("--h", type=int, default=DEFAULT_H)
    p.add_argument("--smooth", default="majority", choices=["majority", "none"])
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--volatility", action="store_true", help="add GARCH conditional variance as a clustering variable")
    p.add_argument("--kmax", type=int, default=8)
    p.add_argument("--B", type=int, default=100)
    p.add_argument("--no-diagnostics", dest="diagnostics", action="store_false")
    p.add_argument("--units", choices=["percent", "fraction"], default="percent")
    p.add_argument("--manifest", help="re-run with the parameters recorded in a run manifest")
    p.set_defaults(func=cmd_pipeline)
    return parser


def _error(args, exc, code) -> int:
    doc = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(json.dumps(doc), file=sys.stderr)
    out = getattr(args, "out", None)
    if out and Path(out).is_dir():
        _dump(Path(out) / "error.json", doc)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RegimeError as exc:
        return _error(args, exc, exc.exit_code)
    except (ValueError, KeyError) as exc:
        return _error(args, exc, ConfigError.exit_code)
    except OSError as exc:
        return _error(args, exc, DataError.exit_code)


if __name__ == "__main__":
    sys.exit(main())
