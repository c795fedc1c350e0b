"""File formats, atomic writes and run manifests.

CSV files may carry ``#`` comment lines and must have a header row. Numbers
are written with 17 significant digits so that they round-trip exactly.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from collections import OrderedDict
from pathlib import Path

import numpy as np

from .acf_model import CorrelationSeries
from .errors import ConfigError
from .estimator import ExcitationFunction

EXCITATION_HEADER = ("E_cm_MeV", "sigma", "channel")
ACF_HEADER = ("epsilon_MeV", "C")


def fmt(x):
    return format(float(x), ".17g")


def sha256_bytes(data):
    return hashlib.sha256(data).hexdigest()


def sha256_file(path):
    return sha256_bytes(Path(path).read_bytes())


def atomic_write_bytes(path, data):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text):
    atomic_write_bytes(path, text.encode("utf-8"))


def write_rows(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    atomic_write_text(path, buf.getvalue())


def read_rows(path):
    """Return ``(header, rows)`` skipping blank and ``#`` comment lines."""
    with open(path, newline="", encoding="utf-8") as fh:
        lines = [ln for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    reader = csv.reader(lines)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ConfigError(f"{path}: missing header row") from None
    rows = [[c.strip() for c in r] for r in reader]
    for r in rows:
        if len(r) != len(header):
            raise ConfigError(f"{path}: row {r} does not match header {header}")
    return header, rows


def _column(header, rows, name, path, cast=float):
    if name not in header:
        raise ConfigError(f"{path}: missing column {name!r}")
    k = header.index(name)
    try:
        return [cast(r[k]) for r in rows]
    except ValueError as exc:
        raise ConfigError(f"{path}: bad value in column {name!r}: {exc}") from None


def write_excitation_csv(path, functions):
    rows = []
    for xf in functions:
        rows.extend((e, s, xf.channel_label) for e, s in zip(xf.energies, xf.sigma))
    write_rows(path, EXCITATION_HEADER, rows)


def read_excitation_csv(path):
    """Excitation functions in file order, one per distinct channel label."""
    header, rows = read_rows(path)
    e = _column(header, rows, "E_cm_MeV", path)
    s = _column(header, rows, "sigma", path)
    ch = _column(header, rows, "channel", path, cast=str)
    groups = OrderedDict()
    for ei, si, ci in zip(e, s, ch):
        groups.setdefault(ci, ([], []))
        groups[ci][0].append(ei)
        groups[ci][1].append(si)
    return [ExcitationFunction(np.array(es), np.array(ss), label)
            for label, (es, ss) in groups.items()]


def write_acf_csv(path, series: CorrelationSeries, extra=None):
    """``epsilon_MeV,C[,stderr]`` plus optional named extra columns."""
    header = list(ACF_HEADER)
    cols = [series.epsilon_values, series.c_values]
    if series.stderr_values is not None:
        header.append("stderr")
        cols.append(series.stderr_values)
    for name, values in (extra or {}).items():
        header.append(name)
        cols.append(np.asarray(values, dtype=float))
    write_rows(path, header, zip(*cols))


def read_acf_csv(path):
    header, rows = read_rows(path)
    eps = _column(header, rows, "epsilon_MeV", path)
    c = _column(header, rows, "C", path)
    se = _column(header, rows, "stderr", path) if "stderr" in header else None
    return CorrelationSeries(np.array(eps), np.array(c), None if se is None else np.array(se))


def write_json(path, obj):
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def canonical_digest(obj):
    return sha256_bytes(json.dumps(obj, sort_keys=True, separators=(",", ":")).encode())


def manifest(tool_version, command_line, config, base_seed, inputs, outputs, wall_time):
    return {
        "tool_version": tool_version,
        "command_line": command_line,
        "config_digest": canonical_digest(config),
        "base_seed": base_seed,
        "inputs": [{"path": str(p), "sha256": sha256_file(p)} for p in inputs],
        "outputs": [{"path": str(p), "sha256": sha256_file(p)} for p in outputs],
        "wall_time_s": wall_time,
    }
