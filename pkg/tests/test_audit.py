import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import miscaling as ms
from miscaling.exceptions import DomainError, FormatError

TEXT = "the cat sat on the mat; the dog sat on the log. " * 40


def test_log_lag_grid_examples():
    # dedup of round(10^(k/10)), k = 0..30
    oracle = sorted({int(math.floor(10 ** (k / 10) + 0.5)) for k in range(31)})
    grid = ms.log_lag_grid(1, 1000, 10)
    assert grid == oracle and len(grid) == 28
    assert ms.log_lag_grid(1, 10, 10) == [1, 2, 3, 4, 5, 6, 8, 10]
    assert ms.log_lag_grid(1, 100, 1) == [1, 10, 100]
    for bad in ((5, 5), (0, 10), (10, 5)):
        with pytest.raises(DomainError):
            ms.log_lag_grid(*bad)
    with pytest.raises(DomainError):
        ms.log_lag_grid(1, 10, 0)


@settings(max_examples=100)
@given(st.integers(1, 500), st.integers(1, 5000), st.integers(1, 30))
def test_log_lag_grid_properties(lo, span, ppd):
    hi = lo + span
    grid = ms.log_lag_grid(lo, hi, ppd)
    assert grid[0] == lo and grid[-1] == hi
    assert all(a < b for a, b in zip(grid, grid[1:]))
    # no more points than a decade-density of ppd allows, plus the endpoint
    assert len(grid) <= math.ceil(ppd * math.log10(hi / lo) - 1e-9) + 1


def test_ingest_round_trip_and_vocab():
    seq, vocab = ms.ingest_text("héllo wörld")
    assert vocab.decode(seq.symbols) == "héllo wörld"
    assert vocab.symbols[:4] == ("h", "é", "l", "o")
    assert seq.vocab_size == vocab.size == 9
    bseq, bvocab = ms.ingest_text("héllo".encode(), unit="byte")
    assert bvocab.decode(bseq.symbols) == "héllo".encode()
    assert len(bseq) == 6


def test_ingest_errors():
    with pytest.raises(FormatError, match="byte offset 3"):
        ms.ingest_text(b"abc\xff\xfe")
    with pytest.raises(DomainError):
        ms.ingest_text("")
    with pytest.raises(DomainError):
        ms.ingest_text("abc", unit="word")
    _, vocab = ms.ingest_text("abc")
    with pytest.raises(DomainError):
        vocab.encode("abd")


def test_invalid_utf8_accepted_as_bytes():
    seq, vocab = ms.ingest_text(b"abc\xff", unit="byte")
    assert vocab.decode(seq.symbols) == b"abc\xff"


@settings(max_examples=50)
@given(st.lists(st.text(min_size=1, max_size=30), min_size=1, max_size=5))
def test_vocab_union_keeps_existing_ids(texts):
    vocab = ms.build_vocab(texts)
    for text in texts:
        seq, extended = ms.ingest_text(text, vocab=vocab)
        assert extended.symbols == vocab.symbols
        assert vocab.decode(seq.symbols) == text
    assert set(vocab.symbols) == set("".join(texts))
    first = ms.build_vocab(texts[:1])
    assert vocab.symbols[: first.size] == first.symbols


def _text_splits(*texts):
    vocab = ms.build_vocab(texts)
    return [ms.ingest_text(t, vocab=vocab)[0] for t in texts]


def test_identical_splits_do_not_flag():
    train, dev = _text_splits(TEXT, TEXT)
    report = ms.audit(train, {"dev": dev}, range(1, 60))
    assert report.divergence["dev"] == 0.0
    assert not report.flag


def _array(corpus):
    return np.vstack([s.symbols for s in corpus.sequences])


def test_copula_against_iid_flags():
    lags = ms.log_lag_grid(1, 100, 10)
    corr = ms.make_copula_corpus(2000, 256, 0.1, 0.4, seed=1)
    rng = np.random.default_rng(1)
    iid = ms.Corpus.from_array(rng.integers(0, 2, (2000, 256)), 2)
    report = ms.audit(corr, {"iid": iid}, lags)
    assert report.flag and report.max_divergence > math.log(2)


def test_halves_of_one_corpus_do_not_flag():
    lags = ms.log_lag_grid(1, 100, 10)
    arr = _array(ms.make_copula_corpus(8000, 256, 0.1, 0.4, seed=2))
    a, b = ms.Corpus.from_array(arr[:4000], 2), ms.Corpus.from_array(arr[4000:], 2)
    report = ms.audit(a, {"dev": b}, lags)
    assert not report.flag
    assert report.shared_lags["dev"] == lags


def test_label_swap_symmetry():
    train, dev = _text_splits(TEXT, TEXT[::-1] + "xyz" * 50)
    ab = ms.audit(train, {"dev": dev}, range(1, 40))
    ba = ms.audit(dev, {"train": train}, range(1, 40), train_label="dev")
    assert ab.divergence["dev"] == ba.divergence["train"]
    assert ab.flag == ba.flag


def test_unused_vocabulary_leaves_curves_unchanged():
    seq, _ = ms.ingest_text(TEXT)
    wide = ms.SymbolSequence(seq.symbols, seq.vocab_size + 50)
    lags = range(1, 30)
    for est in ("plugin", "grassberger"):
        a = ms.auto_mi_curve(seq, lags, est)
        b = ms.auto_mi_curve(wide, lags, est)
        assert a.mi.tobytes() == b.mi.tobytes()
    report = ms.audit(seq, {"wide": wide}, lags)
    assert report.divergence["wide"] == 0.0


def test_report_is_deterministic():
    train, dev = _text_splits(TEXT, TEXT[:900])
    a = ms.audit(train, {"dev": dev}, ms.log_lag_grid(1, 500, 10)).to_record()
    b = ms.audit(train, {"dev": dev}, ms.log_lag_grid(1, 500, 10)).to_record()
    assert a == b


def test_long_lags_are_noted_not_fatal():
    train, short = _text_splits(TEXT, TEXT[:100])
    report = ms.audit(train, {"short": short}, [1, 5, 50, 150, 1500])
    assert report.shared_lags["short"] == [1, 5, 50]
    assert any("short" in note and "omitted" in note for note in report.notes)
    assert report.fits["short"] is None
    rec = report.to_record()
    assert rec["fit.short"] == "none" and rec["shared_lags.short"] == 3


def test_audit_argument_errors():
    train, dev = _text_splits(TEXT, TEXT)
    with pytest.raises(DomainError):
        ms.audit(train, {}, [1, 2])
    with pytest.raises(DomainError):
        ms.audit(train, {"train": dev}, [1, 2])
