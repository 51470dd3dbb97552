"""Plain-text file formats.

Corpus file::

    #vocab=2
    0 1 1 0 ...          one sequence per line, space-separated ids

MI curve CSV: header ``tau,mi_nats,pairs,estimator``, one row per lag,
MI written with 10 significant digits.

Key-value record: one ``key=value`` per line (fit results, pole reports,
audit reports).

Linear-RNN parameter file: ``name = v1 v2 ...`` lines with row-major
matrices. ``m`` and ``d`` are required; ``U_h`` (m x m), ``W_h`` (m x d),
``U_o`` (d x m), ``sigma2`` and ``Sigma0`` ((m+d) x (m+d)) are required;
``mean0``, ``bias_h`` and ``bias_o`` are optional. ``#`` starts a comment.
"""

from __future__ import annotations

import csv
import io
import os

import numpy as np

from .estimation import Corpus, MICurve
from .exceptions import FormatError, ParameterError
from .fitting import FitResult
from .linear_rnn import LinearRnnParams

__all__ = [
    "write_corpus",
    "read_corpus",
    "format_curve_csv",
    "write_curve_csv",
    "read_curve_csv",
    "format_record",
    "write_record",
    "read_record",
    "fit_record",
    "read_params",
    "write_params",
]

CURVE_HEADER = ["tau", "mi_nats", "pairs", "estimator"]


def write_corpus(corpus: Corpus, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write(f"#vocab={corpus.vocab_size}\n")
        groups = corpus.length_groups()
        if len(groups) == 1 and len(groups[0]) == len(corpus):
            np.savetxt(f, groups[0], fmt="%d", delimiter=" ")
        else:
            for seq in corpus.sequences:
                f.write(" ".join(map(str, seq.symbols.tolist())) + "\n")


def read_corpus(path, label: str = "") -> Corpus:
    """Read a corpus file; raises :class:`FormatError` on malformed input."""
    try:
        with open(path, encoding="ascii") as f:
            header = f.readline().strip()
            if not header.startswith("#vocab="):
                raise FormatError(f"{path}: first line must be '#vocab=V', got {header!r}")
            try:
                vocab = int(header[len("#vocab="):])
            except ValueError:
                raise FormatError(f"{path}: bad vocabulary size in {header!r}") from None
            seqs = []
            for lineno, line in enumerate(f, start=2):
                line = line.strip()
                if not line:
                    continue
                try:
                    seqs.append(np.array(line.split(), dtype=np.int64))
                except ValueError:
                    raise FormatError(f"{path}:{lineno}: non-integer symbol") from None
    except UnicodeDecodeError as exc:
        raise FormatError(f"{path}: not an ASCII corpus file ({exc})") from None
    if not seqs:
        raise FormatError(f"{path}: no sequences")
    try:
        if len({s.size for s in seqs}) == 1:
            return Corpus.from_array(np.vstack(seqs), vocab, label)
        return Corpus(seqs, vocab, label)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None


def format_curve_csv(curve: MICurve) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CURVE_HEADER)
    for tau, mi, pairs in curve.points:
        w.writerow([tau, f"{mi:.10g}", pairs, curve.estimator])
    return buf.getvalue()


def write_curve_csv(curve: MICurve, path) -> None:
    with open(path, "w", newline="") as f:
        f.write(format_curve_csv(curve))


def read_curve_csv(path) -> MICurve:
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows or rows[0] != CURVE_HEADER:
        raise FormatError(f"{path}: expected header {','.join(CURVE_HEADER)}")
    body = [r for r in rows[1:] if r]
    if not body:
        raise FormatError(f"{path}: curve has no rows")
    try:
        tau = [int(r[0]) for r in body]
        mi = [float(r[1]) for r in body]
        pairs = [int(r[2]) for r in body]
    except (ValueError, IndexError):
        raise FormatError(f"{path}: malformed curve row") from None
    kinds = {r[3] for r in body}
    if len(kinds) != 1:
        raise FormatError(f"{path}: mixed estimator ids {sorted(kinds)}")
    try:
        return MICurve(tau, mi, pairs, kinds.pop())
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.10g}"
    if isinstance(value, complex):
        return f"{value.real:.10g}{value.imag:+.10g}j"
    return str(value)


def format_record(record: dict) -> str:
    return "".join(f"{k}={_fmt(v)}\n" for k, v in record.items())


def write_record(record: dict, path) -> None:
    with open(path, "w", newline="\n") as f:
        f.write(format_record(record))


def read_record(path) -> dict:
    out = {}
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if "=" not in line:
                raise FormatError(f"{path}:{lineno}: expected key=value")
            key, value = line.split("=", 1)
            out[key] = value
    return out


def fit_record(fit: FitResult, prefix: str = "") -> dict:
    rec = {f"{prefix}model": fit.model}
    for name, value in fit.params.items():
        rec[f"{prefix}{name}"] = value
    for name, value in fit.ci95.items():
        rec[f"{prefix}ci95_{name}"] = value
    rec[f"{prefix}points_used"] = fit.points_used
    rec[f"{prefix}r_squared"] = fit.r_squared
    rec[f"{prefix}tau_min"] = fit.tau_range[0]
    rec[f"{prefix}tau_max"] = fit.tau_range[1]
    if fit.warning:
        rec[f"{prefix}warning"] = fit.warning
    return rec


_MATRIX_FIELDS = ("U_h", "W_h", "U_o", "Sigma0")
_OPTIONAL = ("mean0", "bias_h", "bias_o")


def read_params(path) -> LinearRnnParams:
    """Parse a linear-RNN parameter file; errors name the offending field."""
    raw = {}
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{os.fspath(path)}:{lineno}: expected 'name = values'")
            key, value = (part.strip() for part in line.split("=", 1))
            try:
                raw[key] = np.array(value.split(), dtype=float)
            except ValueError:
                raise ParameterError(f"field {key}: non-numeric value") from None
    unknown = set(raw) - {"m", "d", "sigma2", *_MATRIX_FIELDS, *_OPTIONAL}
    if unknown:
        raise ParameterError(f"unknown field(s): {', '.join(sorted(unknown))}")
    for key in ("m", "d", "sigma2", *_MATRIX_FIELDS):
        if key not in raw:
            raise ParameterError(f"field {key}: missing")
    dims = {}
    for key in ("m", "d"):
        v = raw[key]
        if v.size != 1 or v[0] != int(v[0]) or v[0] < 1:
            raise ParameterError(f"field {key}: must be one positive integer")
        dims[key] = int(v[0])
    m, d = dims["m"], dims["d"]
    shapes = {"U_h": (m, m), "W_h": (m, d), "U_o": (d, m), "Sigma0": (m + d, m + d),
              "mean0": (m + d,), "bias_h": (m,), "bias_o": (d,)}
    values = {}
    for key, shape in shapes.items():
        if key not in raw:
            continue
        if raw[key].size != int(np.prod(shape)):
            raise ParameterError(
                f"field {key}: expected {'x'.join(map(str, shape))} = "
                f"{int(np.prod(shape))} values, got {raw[key].size}"
            )
        values[key] = raw[key].reshape(shape)
    if raw["sigma2"].size != 1:
        raise ParameterError("field sigma2: must be one number")
    return LinearRnnParams(sigma2=float(raw["sigma2"][0]), **values)


def write_params(params: LinearRnnParams, path) -> None:
    def row(a):
        return " ".join(f"{x:.17g}" for x in np.ravel(a))

    lines = [f"m = {params.m}", f"d = {params.d}"]
    for key in ("U_h", "W_h", "U_o"):
        lines.append(f"{key} = {row(getattr(params, key))}")
    lines.append(f"sigma2 = {params.sigma2:.17g}")
    lines.append(f"Sigma0 = {row(params.Sigma0)}")
    for key in _OPTIONAL:
        lines.append(f"{key} = {row(getattr(params, key))}")
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")
