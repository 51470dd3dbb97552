"""Entropy and auto-mutual-information estimation for discrete sequences.

Two estimators are provided. ``"grassberger"`` is the bias-corrected
estimator

    H = ln N - (1/N) sum_i n_i psi(n_i)

and ``"plugin"`` is the maximum-likelihood estimate. Mutual information is
always assembled as H(X) + H(Y) - H(X, Y) with marginals obtained by summing
the joint table.

Auto-mutual information at lag tau pools every pair (x_t, x_{t+tau}) from
every start position of every sequence into a single joint table.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._special import digamma_counts, digamma_int
from ._validation import check_lags, check_symbols
from .exceptions import DomainError

__all__ = [
    "ESTIMATORS",
    "SymbolSequence",
    "Corpus",
    "CountTable",
    "MICurve",
    "digamma_int",
    "entropy_grassberger",
    "entropy_plugin",
    "mi_from_pair_counts",
    "pair_count_matrix",
    "auto_mi_curve",
    "as_corpus",
    "AutoMutualInformation",
]

ESTIMATORS = ("grassberger", "plugin")
CURVE_KINDS = ESTIMATORS + ("analytic",)


@dataclass(frozen=True, eq=False)
class SymbolSequence:
    """Integer-coded sequence over an alphabet of ``vocab_size`` symbols."""

    symbols: np.ndarray
    vocab_size: int

    def __post_init__(self):
        if isinstance(self.vocab_size, bool) or int(self.vocab_size) < 1:
            raise DomainError(f"vocab_size must be positive, got {self.vocab_size}")
        object.__setattr__(self, "vocab_size", int(self.vocab_size))
        arr = check_symbols(self.symbols, self.vocab_size).view()
        arr.setflags(write=False)
        object.__setattr__(self, "symbols", arr)

    def __len__(self):
        return self.symbols.size


@dataclass(frozen=True, eq=False)
class Corpus:
    """A labelled collection of sequences sharing one alphabet."""

    sequences: tuple
    vocab_size: int
    label: str = ""
    _groups: list = field(default=None, init=False, repr=False)

    def __post_init__(self):
        seqs = tuple(self.sequences)
        if not seqs:
            raise DomainError("a corpus needs at least one sequence")
        vocab = int(self.vocab_size)
        checked = []
        for s in seqs:
            if isinstance(s, SymbolSequence):
                if s.vocab_size != vocab:
                    raise DomainError(
                        f"sequence vocab_size {s.vocab_size} differs from corpus {vocab}"
                    )
                checked.append(s)
            else:
                checked.append(SymbolSequence(s, vocab))
        object.__setattr__(self, "sequences", tuple(checked))
        object.__setattr__(self, "vocab_size", vocab)

    @classmethod
    def from_array(cls, array, vocab_size=None, label=""):
        """Build a corpus from a 2-d array with one sequence per row."""
        array = np.asarray(array)
        if array.ndim != 2:
            raise DomainError("from_array expects a 2-d array")
        if vocab_size is None:
            vocab_size = int(array.max()) + 1
        corpus = cls([row for row in array], vocab_size, label)
        block = check_symbols(array.ravel(), vocab_size).reshape(array.shape)
        object.__setattr__(corpus, "_groups", [block])
        return corpus

    def __len__(self):
        return len(self.sequences)

    @property
    def lengths(self) -> np.ndarray:
        return np.array([len(s) for s in self.sequences], dtype=np.int64)

    @property
    def n_symbols(self) -> int:
        return int(self.lengths.sum())

    def length_groups(self) -> list:
        """Sequences stacked into 2-d blocks of equal length."""
        if self._groups is None:
            by_len: dict[int, list] = {}
            for s in self.sequences:
                by_len.setdefault(len(s), []).append(s.symbols)
            groups = [np.vstack(by_len[n]) for n in sorted(by_len)]
            object.__setattr__(self, "_groups", groups)
        return self._groups

    def as_array(self) -> np.ndarray:
        """The corpus as one 2-d array; only valid for equal-length sequences."""
        groups = self.length_groups()
        if len(groups) != 1:
            raise DomainError("sequences have unequal lengths")
        return groups[0]

    def subset(self, indices, label=None):
        seqs = [self.sequences[i] for i in indices]
        return Corpus(seqs, self.vocab_size, self.label if label is None else label)


@dataclass(frozen=True)
class CountTable:
    """Positive counts keyed by symbol (or symbol pair)."""

    counts: Mapping

    def __post_init__(self):
        if not self.counts:
            raise DomainError("count table is empty")
        clean = {}
        for key, n in self.counts.items():
            if isinstance(n, bool) or int(n) != n or n < 0:
                raise DomainError(f"count for {key!r} must be a non-negative integer")
            if n:
                clean[key] = int(n)
        if not clean:
            raise DomainError("count table has no positive entries")
        object.__setattr__(self, "counts", clean)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def values(self) -> np.ndarray:
        return np.fromiter(self.counts.values(), dtype=np.int64)

    def swapped(self) -> "CountTable":
        """Swap the two coordinates of a pair-keyed table."""
        return CountTable({(y, x): n for (x, y), n in self.counts.items()})


@dataclass(frozen=True, eq=False)
class MICurve:
    """Auto-mutual information (nats) against lag.

    ``estimator`` is ``"grassberger"`` or ``"plugin"`` for estimated curves
    and ``"analytic"`` for closed-form ones, which carry ``pairs == 0``.
    """

    tau: np.ndarray
    mi: np.ndarray
    pairs: np.ndarray
    estimator: str
    warning: str | None = None

    def __post_init__(self):
        tau = np.asarray(self.tau, dtype=np.int64)
        mi = np.asarray(self.mi, dtype=float)
        pairs = np.asarray(self.pairs, dtype=np.int64)
        if not (tau.ndim == mi.ndim == pairs.ndim == 1) or not (
            tau.size == mi.size == pairs.size
        ):
            raise DomainError("tau, mi and pairs must be 1-d arrays of equal length")
        if tau.size and (tau.min() < 1 or np.any(np.diff(tau) <= 0)):
            raise DomainError("lags must be positive and strictly increasing")
        if self.estimator not in CURVE_KINDS:
            raise DomainError(f"unknown curve estimator id {self.estimator!r}")
        min_pairs = 0 if self.estimator == "analytic" else 1
        if pairs.size and pairs.min() < min_pairs:
            raise DomainError("every estimated point needs at least one pair")
        for name, arr in (("tau", tau), ("mi", mi), ("pairs", pairs)):
            arr = arr.view()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self):
        return self.tau.size

    @property
    def points(self) -> list:
        return list(zip(self.tau.tolist(), self.mi.tolist(), self.pairs.tolist()))

    def window(self, tau_min=None, tau_max=None) -> "MICurve":
        keep = np.ones(self.tau.size, dtype=bool)
        if tau_min is not None:
            keep &= self.tau >= tau_min
        if tau_max is not None:
            keep &= self.tau <= tau_max
        return MICurve(
            self.tau[keep], self.mi[keep], self.pairs[keep], self.estimator, self.warning
        )


def _count_array(counts) -> np.ndarray:
    if isinstance(counts, CountTable):
        arr = counts.values()
    elif isinstance(counts, Mapping):
        arr = CountTable(counts).values()
    else:
        arr = np.asarray(counts).ravel()
        if arr.size and not np.issubdtype(arr.dtype, np.integer):
            if not np.all(np.equal(np.mod(arr, 1), 0)):
                raise DomainError("counts must be integers")
            arr = arr.astype(np.int64)
        if arr.size and arr.min() < 0:
            raise DomainError("counts must be non-negative")
        arr = arr[arr > 0]
    if arr.size == 0:
        raise DomainError("count table is empty")
    return arr.astype(np.int64, copy=False)


def entropy_grassberger(counts) -> float:
    """Bias-corrected entropy (nats) from symbol counts.

    ``counts`` may be a :class:`CountTable`, a mapping, or an array of
    counts (zeros are ignored). The raw estimate is returned without
    clamping, so it can be negative or exceed ln V.
    """
    n = _count_array(counts)
    total = int(n.sum())
    # fsum is correctly rounded, hence independent of the table's order
    return math.log(total) - math.fsum((n * digamma_counts(n)).tolist()) / total


def entropy_plugin(counts) -> float:
    """Maximum-likelihood entropy (nats) from symbol counts."""
    n = _count_array(counts)
    p = n / n.sum()
    return -math.fsum((p * np.log(p)).tolist())


_ENTROPY = {"grassberger": entropy_grassberger, "plugin": entropy_plugin}


def _entropy_fn(estimator: str):
    try:
        return _ENTROPY[estimator]
    except KeyError:
        raise DomainError(
            f"unknown estimator {estimator!r}; choose from {ESTIMATORS}"
        ) from None


def _mi_from_matrix(joint: np.ndarray, estimator: str) -> float:
    entropy = _entropy_fn(estimator)
    if joint.sum() == 0:
        raise DomainError("joint count table is empty")
    hx = entropy(joint.sum(axis=1))
    hy = entropy(joint.sum(axis=0))
    return hx + hy - entropy(joint)


def mi_from_pair_counts(joint, estimator: str = "grassberger") -> float:
    """Mutual information (nats) of a joint table keyed by ``(x, y)`` pairs.

    A dense 2-d count matrix is also accepted.
    """
    _entropy_fn(estimator)
    if isinstance(joint, (CountTable, Mapping)):
        table = joint if isinstance(joint, CountTable) else CountTable(joint)
        xs = sorted({k[0] for k in table.counts})
        ys = sorted({k[1] for k in table.counts})
        xi = {x: i for i, x in enumerate(xs)}
        yi = {y: i for i, y in enumerate(ys)}
        mat = np.zeros((len(xs), len(ys)), dtype=np.int64)
        for (x, y), n in table.counts.items():
            mat[xi[x], yi[y]] = n
        return _mi_from_matrix(mat, estimator)
    mat = np.asarray(joint)
    if mat.ndim != 2:
        raise DomainError("joint counts must be a mapping or a 2-d matrix")
    return _mi_from_matrix(mat, estimator)


def as_corpus(X, vocab_size=None, label="") -> Corpus:
    """Coerce a corpus-like input (Corpus, SymbolSequence, 2-d array, or a
    list of 1-d arrays) into a :class:`Corpus`."""
    if isinstance(X, Corpus):
        if vocab_size is not None and vocab_size != X.vocab_size:
            return Corpus(
                [s.symbols for s in X.sequences], vocab_size, label or X.label
            )
        return X
    if isinstance(X, SymbolSequence):
        return Corpus([X], X.vocab_size if vocab_size is None else vocab_size, label)
    if isinstance(X, np.ndarray) and X.ndim == 2:
        return Corpus.from_array(X, vocab_size, label)
    if isinstance(X, np.ndarray) and X.ndim == 1:
        X = [X]
    seqs = [np.asarray(s) for s in X]
    if not seqs:
        raise DomainError("a corpus needs at least one sequence")
    if vocab_size is None:
        vocab_size = max(int(s.max()) for s in seqs if s.size) + 1
    return Corpus(seqs, vocab_size, label)


def pair_count_matrix(corpus: Corpus, lag: int) -> np.ndarray:
    """V x V matrix of pooled counts of (x_t, x_{t+lag})."""
    V = corpus.vocab_size
    total = np.zeros(V * V, dtype=np.int64)
    for block in corpus.length_groups():
        if block.shape[1] <= lag:
            continue
        codes = block[:, :-lag] * V + block[:, lag:]
        total += np.bincount(codes.ravel(), minlength=V * V)
    return total.reshape(V, V)


def auto_mi_curve(corpus, lags, estimator: str = "grassberger", n_jobs=None) -> MICurve:
    """Pooled auto-mutual-information curve of a corpus.

    Parameters
    ----------
    corpus : Corpus or corpus-like
    lags : sequence of int
        Positive lags, each smaller than the longest sequence.
    estimator : {"grassberger", "plugin"}
    n_jobs : int, optional
        Worker threads across lags. Results do not depend on it.
    """
    corpus = as_corpus(corpus)
    _entropy_fn(estimator)
    lags = check_lags(lags)
    longest = int(corpus.lengths.max())
    if lags[-1] >= longest:
        raise DomainError(
            f"lag {int(lags[-1])} is not smaller than the longest sequence ({longest})"
        )

    def one(lag):
        mat = pair_count_matrix(corpus, int(lag))
        pairs = int(mat.sum())
        if pairs == 0:
            return None
        return int(lag), _mi_from_matrix(mat, estimator), pairs

    if n_jobs is not None and n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            rows = list(pool.map(one, lags))
    else:
        rows = [one(lag) for lag in lags]
    rows = [r for r in rows if r is not None]
    tau, mi, pairs = (np.array(col) for col in zip(*rows)) if rows else ([], [], [])
    return MICurve(tau, mi, pairs, estimator)


class AutoMutualInformation(TransformerMixin, BaseEstimator):
    """Auto-mutual-information profile as a scikit-learn transformer.

    ``fit`` pools the training corpus into :attr:`curve_`. ``transform``
    maps each sequence to its own MI profile over ``lags`` (NaN where a
    lag does not fit inside the sequence), which makes the profile usable
    as a feature vector in a pipeline.

    Parameters
    ----------
    lags : sequence of int, default=(1,)
    estimator : {"grassberger", "plugin"}, default="grassberger"
    vocab_size : int, optional
        Alphabet size. Taken from the corpus when it is a :class:`Corpus`,
        otherwise inferred from the largest id seen in ``fit``.
    n_jobs : int, optional

    Attributes
    ----------
    curve_ : MICurve
    vocab_size_ : int
    lags_ : ndarray
    """

    def __init__(self, lags=(1,), estimator="grassberger", vocab_size=None, n_jobs=None):
        self.lags = lags
        self.estimator = estimator
        self.vocab_size = vocab_size
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        corpus = as_corpus(X, self.vocab_size)
        self.vocab_size_ = corpus.vocab_size
        self.lags_ = check_lags(self.lags)
        self.curve_ = auto_mi_curve(corpus, self.lags_, self.estimator, self.n_jobs)
        return self

    def transform(self, X):
        check_is_fitted(self, "curve_")
        corpus = as_corpus(X, self.vocab_size_)
        out = np.full((len(corpus), self.lags_.size), np.nan)
        V = self.vocab_size_
        for i, seq in enumerate(corpus.sequences):
            s = seq.symbols
            for j, lag in enumerate(self.lags_):
                if lag >= s.size:
                    continue
                mat = np.bincount(s[:-lag] * V + s[lag:], minlength=V * V)
                out[i, j] = _mi_from_matrix(mat.reshape(V, V), self.estimator)
        return out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "lags_")
        return np.array([f"mi_tau{int(t)}" for t in self.lags_], dtype=object)
