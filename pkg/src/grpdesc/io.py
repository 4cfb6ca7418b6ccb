"""Reading delimited data and group maps; writing path artifacts and tables."""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
from pathlib import Path

import numpy as np

from .design import DataError, GroupedDesign
from .path import FitPath
from .penalties import Family, Loss

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
UNPENALIZED_NAMES = ("0", "unpenalized")
MISSING = ("", "na", "nan", "null", "none", "?")


def _delimiter(header_line):
    for d in ("\t", ",", ";"):
        if d in header_line:
            return d
    return ","


def read_table(path):
    """Header plus a float matrix from a delimited text file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from exc
    lines = text.splitlines()
    if not lines:
        raise DataError(f"{path}: empty file")
    rows = list(csv.reader(lines, delimiter=_delimiter(lines[0])))
    header = [h.strip() for h in rows[0]]
    if len(set(header)) != len(header):
        dup = sorted({h for h in header if header.count(h) > 1})
        raise DataError(f"{path}: duplicate column name(s) {dup}")
    body = [r for r in rows[1:] if any(c.strip() for c in r)]
    if not body:
        raise DataError(f"{path}: no data rows")
    values = np.empty((len(body), len(header)))
    for i, row in enumerate(body):
        line = i + 2
        if len(row) != len(header):
            raise DataError(f"{path}: row {line} has {len(row)} fields, header has {len(header)}")
        for k, cell in enumerate(row):
            cell = cell.strip()
            if cell.lower() in MISSING:
                raise DataError(f"{path}: missing value at row {line}, column '{header[k]}'")
            try:
                values[i, k] = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}: non-numeric value {cell!r} at row {line}, column '{header[k]}'"
                ) from None
            if not math.isfinite(values[i, k]):
                raise DataError(f"{path}: non-finite value at row {line}, column '{header[k]}'")
    return header, values


def read_groups(path):
    """Ordered mapping column -> group from 'column<sep>group' lines."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from exc
    mapping = {}
    for num, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [s.strip() for s in (line.split(",") if "," in line else line.split("\t") if "\t" in line else line.split())]
        if len(parts) != 2 or not all(parts):
            raise DataError(f"{path}: line {num} should be 'column,group'")
        col, group = parts
        if col in mapping:
            raise DataError(f"{path}: column '{col}' mapped twice (line {num})")
        mapping[col] = group
    if not mapping:
        raise DataError(f"{path}: no group assignments")
    return mapping


def load_dataset(data_path, groups_path, response_column):
    """Design from a delimited data file and a column -> group map.

    Groups named "0" or "unpenalized" are left unpenalized.
    """
    header, values = read_table(data_path)
    mapping = read_groups(groups_path)
    if response_column not in header:
        raise DataError(f"{data_path}: response column '{response_column}' not found")
    absent = [c for c in mapping if c not in header]
    if absent:
        raise DataError(f"{groups_path}: column '{absent[0]}' is not in {data_path}")
    if response_column in mapping:
        raise DataError(f"{groups_path}: response column '{response_column}' cannot be grouped")
    predictors = [c for c in header if c != response_column]
    unmapped = [c for c in predictors if c not in mapping]
    if unmapped:
        raise DataError(f"{data_path}: column '{unmapped[0]}' has no group in {groups_path}")
    cols = [header.index(c) for c in predictors]
    X = values[:, cols]
    const = np.flatnonzero(np.ptp(X, axis=0) == 0)
    if const.size:
        raise DataError(f"{data_path}: column '{predictors[const[0]]}' is constant")
    groups = [mapping[c] for c in predictors]
    unpen = sorted({g for g in groups if g in UNPENALIZED_NAMES})
    design = GroupedDesign.from_arrays(
        X, values[:, header.index(response_column)], groups,
        column_names=predictors, unpenalized=unpen,
    )
    log.info("loaded n=%d p=%d J=%d", design.n, design.p, design.J)
    return design


def digest_files(*paths):
    h = hashlib.sha256()
    for p in paths:
        h.update(Path(p).read_bytes())
    return h.hexdigest()


def _software_version():
    from . import __version__

    return __version__


def path_to_dict(fit, input_digest=""):
    def fl(a):
        return [float(x) for x in np.asarray(a).ravel()]

    return {
        "format_version": FORMAT_VERSION,
        "software_version": _software_version(),
        "input_digest": input_digest,
        "penalty": fit.family.value,
        "gamma": None if math.isinf(fit.gamma) else float(fit.gamma),
        "loss": fit.loss_type.value,
        "columns": list(fit.column_names),
        "groups": list(fit.group_labels),
        "group_of": [int(g) for g in fit.group_of],
        "multipliers": fl(fit.multipliers),
        "lambdas": fl(fit.lambdas),
        "intercepts": fl(fit.intercepts),
        "coefficients": [fl(row) for row in fit.coefficients],
        "loss_values": fl(fit.loss),
        "df_groups": [int(x) for x in fit.df_groups],
        "iters": [int(x) for x in fit.iters],
        "converged": [bool(x) for x in fit.converged],
        "saturated_at": fit.saturated_at,
        "deviance": None if fit.deviance is None else fl(fit.deviance),
        "null_deviance": fit.null_deviance,
    }


def path_from_dict(d):
    if d.get("format_version") != FORMAT_VERSION:
        raise DataError(f"unsupported artifact format_version {d.get('format_version')!r}")
    p = len(d["columns"])
    coefs = np.array(d["coefficients"], dtype=float).reshape(len(d["lambdas"]), p)
    return FitPath(
        lambdas=np.array(d["lambdas"], dtype=float),
        intercepts=np.array(d["intercepts"], dtype=float),
        coefficients=coefs,
        loss=np.array(d["loss_values"], dtype=float),
        df_groups=np.array(d["df_groups"], dtype=np.int64),
        iters=np.array(d["iters"], dtype=np.int64),
        converged=np.array(d["converged"], dtype=bool),
        family=Family(d["penalty"]),
        gamma=math.inf if d["gamma"] is None else float(d["gamma"]),
        loss_type=Loss(d["loss"]),
        column_names=tuple(d["columns"]),
        group_labels=tuple(d["groups"]),
        group_of=np.array(d["group_of"], dtype=np.int64),
        multipliers=np.array(d["multipliers"], dtype=float),
        saturated_at=d["saturated_at"],
        deviance=None if d["deviance"] is None else np.array(d["deviance"], dtype=float),
        null_deviance=d["null_deviance"],
        extra={"input_digest": d["input_digest"], "software_version": d["software_version"]},
    )


def dumps_artifact(fit, input_digest=""):
    return json.dumps(path_to_dict(fit, input_digest), indent=1, sort_keys=True) + "\n"


def write_artifact(fit, path, input_digest=""):
    Path(path).write_text(dumps_artifact(fit, input_digest))


def read_artifact(path):
    """FitPath from an artifact file; the input digest is kept in ``fit.extra``."""
    try:
        d = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read artifact {path}: {exc}") from exc
    return path_from_dict(d)


def write_table(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])


def coefficient_rows(fit):
    for i in range(len(fit)):
        yield [i, fit.lambdas[i], fit.intercepts[i], *fit.coefficients[i]]


def write_coefficients(fit, path):
    write_table(path, ["index", "lambda", "(Intercept)", *fit.column_names], coefficient_rows(fit))
