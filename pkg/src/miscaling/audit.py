"""Character-level MI profiling of text splits and train/other comparison.

Each split is treated as one long sequence. All splits are encoded with a
single vocabulary built on their union, so ids are stable across splits.
A split is flagged as non-uniform with the training split when its MI curve
departs from the training curve by more than a factor of two (ln 2 in log
MI) at some shared lag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .estimation import Corpus, MICurve, SymbolSequence, as_corpus, auto_mi_curve
from .exceptions import DomainError, FormatError, InsufficientDataError
from .fitting import AUDIT_THRESHOLD, FitResult, fit_powerlaw

__all__ = [
    "UNITS",
    "VocabMap",
    "ingest_text",
    "build_vocab",
    "log_lag_grid",
    "AuditReport",
    "audit",
]

UNITS = ("unicode_char", "byte")
FIT_WINDOW = (50, 1000)
FLAG_THRESHOLD = math.log(2.0)
MI_FLOOR = 1e-6


def _units(data, unit: str):
    if unit not in UNITS:
        raise DomainError(f"unit must be one of {UNITS}, got {unit!r}")
    if isinstance(data, str):
        data = data.encode("utf-8")
    data = bytes(data)
    if not data:
        raise DomainError("input text is empty")
    if unit == "byte":
        return list(data)
    try:
        return list(data.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise FormatError(f"invalid UTF-8 at byte offset {exc.start}") from None


@dataclass(frozen=True)
class VocabMap:
    """Symbols in first-occurrence order; ids are positions in ``symbols``."""

    symbols: tuple
    unit: str = "unicode_char"
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(set(self.symbols)) != len(self.symbols):
            raise DomainError("vocabulary symbols must be distinct")
        object.__setattr__(self, "index", {s: i for i, s in enumerate(self.symbols)})

    @property
    def size(self) -> int:
        return len(self.symbols)

    def extend(self, units) -> "VocabMap":
        """Append symbols not yet present, keeping existing ids."""
        seen = dict.fromkeys(self.symbols)
        for u in units:
            seen.setdefault(u, None)
        return VocabMap(tuple(seen), self.unit)

    def encode(self, units) -> np.ndarray:
        try:
            return np.fromiter((self.index[u] for u in units), dtype=np.int64)
        except KeyError as exc:
            raise DomainError(f"symbol {exc.args[0]!r} not in vocabulary") from None

    def decode(self, ids):
        units = [self.symbols[i] for i in np.asarray(ids).tolist()]
        if self.unit == "byte":
            return bytes(units)
        return "".join(units)


def build_vocab(texts, unit: str = "unicode_char") -> VocabMap:
    """Union vocabulary over several texts, first occurrence across them in
    order."""
    vocab = VocabMap((), unit)
    for text in texts:
        vocab = vocab.extend(_units(text, unit))
    return vocab


def ingest_text(data, unit: str = "unicode_char", vocab: VocabMap | None = None):
    """Encode text as a symbol sequence.

    Returns ``(sequence, vocab)``. When ``vocab`` is given it is extended
    with any unseen symbols; otherwise a fresh one is built.
    """
    units = _units(data, unit)
    if vocab is None:
        vocab = VocabMap((), unit)
    elif vocab.unit != unit:
        raise DomainError(f"vocabulary unit {vocab.unit!r} does not match {unit!r}")
    vocab = vocab.extend(units)
    return SymbolSequence(vocab.encode(units), vocab.size), vocab


def log_lag_grid(min_lag: int, max_lag: int, points_per_decade: int = 10) -> list:
    """Approximately geometric integer lags from ``min_lag`` to ``max_lag``
    (both included), rounded and de-duplicated."""
    if not (1 <= min_lag < max_lag):
        raise DomainError(f"need 1 <= min < max, got ({min_lag}, {max_lag})")
    if points_per_decade < 1:
        raise DomainError("points_per_decade must be >= 1")
    steps = math.ceil(points_per_decade * math.log10(max_lag / min_lag) - 1e-9)
    raw = min_lag * 10.0 ** (np.arange(steps + 1) / points_per_decade)
    lags = np.minimum(np.floor(raw + 0.5).astype(np.int64), max_lag)
    return np.unique(lags).tolist()


@dataclass
class AuditReport:
    """Per-split curves and fits plus divergence from the training split.

    ``divergence[label]`` is the largest |ln I_train - ln I_label| over the
    lags both curves share (MI values are floored at ``mi_floor`` before the
    log). ``flag`` is set when any divergence exceeds ``flag_threshold``.
    """

    train_label: str
    curves: dict
    fits: dict
    divergence: dict
    shared_lags: dict
    flag: bool
    flag_threshold: float
    notes: list = field(default_factory=list)

    @property
    def max_divergence(self) -> float:
        return max(self.divergence.values()) if self.divergence else 0.0

    def to_record(self) -> dict:
        rec = {
            "train": self.train_label,
            "splits": ",".join(self.curves),
            "flag": self.flag,
            "flag_threshold": self.flag_threshold,
            "max_divergence": self.max_divergence,
        }
        for label, value in self.divergence.items():
            rec[f"divergence.{label}"] = value
            rec[f"shared_lags.{label}"] = len(self.shared_lags[label])
        for label, fit in self.fits.items():
            if fit is None:
                rec[f"fit.{label}"] = "none"
                continue
            rec[f"fit.{label}.A"] = fit.params["A"]
            rec[f"fit.{label}.gamma"] = fit.params["gamma"]
            rec[f"fit.{label}.ci95_gamma"] = fit.ci95["gamma"]
            rec[f"fit.{label}.points_used"] = fit.points_used
            rec[f"fit.{label}.r_squared"] = fit.r_squared
        for i, note in enumerate(self.notes):
            rec[f"note.{i}"] = note
        return rec


def _split_curve(split: Corpus, lags, estimator, notes, label):
    longest = int(split.lengths.max())
    usable = [lag for lag in lags if lag < longest]
    dropped = len(lags) - len(usable)
    if dropped:
        notes.append(f"{label}: {dropped} lag(s) >= split length {longest} omitted")
    if not usable:
        raise DomainError(f"{label}: no lag fits inside the split")
    return auto_mi_curve(split, usable, estimator)


def _fit_split(curve: MICurve, threshold, window, notes, label) -> FitResult | None:
    try:
        return fit_powerlaw(curve, threshold, *window)
    except InsufficientDataError as exc:
        notes.append(f"{label}: no power-law fit ({exc})")
        return None


def audit(
    train,
    others: dict,
    lags,
    estimator: str = "grassberger",
    train_label: str = "train",
    threshold: float = AUDIT_THRESHOLD,
    fit_window: tuple = FIT_WINDOW,
    flag_threshold: float = FLAG_THRESHOLD,
    mi_floor: float = MI_FLOOR,
) -> AuditReport:
    """Compare the MI profile of ``train`` with each split in ``others``.

    Splits are :class:`SymbolSequence` or :class:`Corpus` objects sharing
    one vocabulary. Power laws are fitted on ``fit_window`` (lags 50 to 1000
    by default) using points above ``threshold``.
    """
    if not others:
        raise DomainError("need at least one split to compare against")
    if train_label in others:
        raise DomainError(f"split label {train_label!r} is used twice")
    lags = sorted({int(lag) for lag in lags})
    splits = {train_label: as_corpus(train, label=train_label)}
    for label, split in others.items():
        splits[label] = as_corpus(split, label=label)
    vocab_sizes = {c.vocab_size for c in splits.values()}
    if len(vocab_sizes) != 1:
        # unused ids do not change any estimate, so align to the largest
        V = max(vocab_sizes)
        splits = {k: as_corpus(c, vocab_size=V, label=k) for k, c in splits.items()}

    notes: list = []
    curves = {k: _split_curve(c, lags, estimator, notes, k) for k, c in splits.items()}
    fits = {k: _fit_split(curve, threshold, fit_window, notes, k) for k, curve in curves.items()}

    base = curves[train_label]
    base_mi = dict(zip(base.tau.tolist(), base.mi.tolist()))
    divergence, shared = {}, {}
    for label in others:
        other = dict(zip(curves[label].tau.tolist(), curves[label].mi.tolist()))
        common = sorted(set(base_mi) & set(other))
        if not common:
            raise DomainError(f"{label}: no lag shared with {train_label}")
        gaps = [
            abs(math.log(max(base_mi[t], mi_floor)) - math.log(max(other[t], mi_floor)))
            for t in common
        ]
        divergence[label] = max(gaps)
        shared[label] = common
    flag = any(v > flag_threshold for v in divergence.values())
    return AuditReport(train_label, curves, fits, divergence, shared, flag, flag_threshold, notes)
