import numpy as np
import pytest

import miscaling as ms
from miscaling import io as mio
from miscaling.exceptions import FormatError, ParameterError


def test_corpus_round_trip_equal_lengths(tmp_path):
    corpus = ms.Corpus.from_array(np.random.default_rng(0).integers(0, 5, (7, 30)), 5)
    path = tmp_path / "c.txt"
    mio.write_corpus(corpus, path)
    back = mio.read_corpus(path)
    assert back.vocab_size == 5
    for a, b in zip(back.sequences, corpus.sequences):
        assert np.array_equal(a.symbols, b.symbols)


def test_corpus_round_trip_ragged(tmp_path):
    seqs = [np.array([0, 1, 2]), np.array([2, 2]), np.array([1, 0, 0, 1])]
    path = tmp_path / "c.txt"
    mio.write_corpus(ms.Corpus(seqs, 3), path)
    back = mio.read_corpus(path)
    assert [s.symbols.tolist() for s in back.sequences] == [s.tolist() for s in seqs]


@pytest.mark.parametrize(
    "content",
    ["0 1 0\n", "#vocab=x\n0 1\n", "#vocab=2\n0 a 1\n", "#vocab=2\n", "#vocab=2\n0 5 1\n"],
)
def test_corpus_format_errors(tmp_path, content):
    path = tmp_path / "bad.txt"
    path.write_text(content)
    with pytest.raises(FormatError):
        mio.read_corpus(path)


def test_curve_round_trip(tmp_path):
    curve = ms.MICurve([1, 2, 5], [0.5, 0.123456789012, 1e-12], [10, 9, 6], "grassberger")
    path = tmp_path / "curve.csv"
    mio.write_curve_csv(curve, path)
    assert path.read_text().splitlines()[0] == "tau,mi_nats,pairs,estimator"
    back = mio.read_curve_csv(path)
    assert back.tau.tolist() == [1, 2, 5] and back.pairs.tolist() == [10, 9, 6]
    np.testing.assert_allclose(back.mi, curve.mi, rtol=1e-9)
    assert back.estimator == "grassberger"


@pytest.mark.parametrize(
    "content",
    ["a,b\n1,2\n", "tau,mi_nats,pairs,estimator\n",
     "tau,mi_nats,pairs,estimator\n1,x,3,plugin\n",
     "tau,mi_nats,pairs,estimator\n1,0.1,3,plugin\n2,0.1,3,grassberger\n"],
)
def test_curve_format_errors(tmp_path, content):
    path = tmp_path / "bad.csv"
    path.write_text(content)
    with pytest.raises(FormatError):
        mio.read_curve_csv(path)


def test_record_round_trip(tmp_path):
    rec = {"model": "powerlaw", "gamma": 0.4, "flag": True, "n": 3, "z": complex(1.5, -2)}
    path = tmp_path / "r.txt"
    mio.write_record(rec, path)
    back = mio.read_record(path)
    assert back == {"model": "powerlaw", "gamma": "0.4", "flag": "true", "n": "3", "z": "1.5-2j"}
    path.write_text("ok=1\nbroken\n")
    with pytest.raises(FormatError, match=":2:"):
        mio.read_record(path)


def test_fit_record_prefix():
    tau = np.arange(1, 20)
    fit = ms.fit_exponential(ms.MICurve(tau, np.exp(-tau / 4.0), np.ones_like(tau), "plugin"), 0.0)
    rec = mio.fit_record(fit, "exponential.")
    assert rec["exponential.model"] == "exponential"
    assert rec["exponential.points_used"] == 19
    assert {"exponential.xi", "exponential.ci95_xi", "exponential.r_squared"} <= set(rec)


def test_params_round_trip(tmp_path):
    p = ms.LinearRnnParams(
        [[0.5, 0.1], [0.0, 0.2]], [[1.0], [0.3]], [[0.2, -0.1]], 0.7, np.eye(3),
        mean0=[0.1, 0.2, 0.3], bias_h=[1.0, 2.0], bias_o=[-1.0],
    )
    path = tmp_path / "p.txt"
    mio.write_params(p, path)
    q = mio.read_params(path)
    for key in ("U_h", "W_h", "U_o", "Sigma0", "mean0", "bias_h", "bias_o"):
        assert np.array_equal(getattr(p, key), getattr(q, key))
    assert q.sigma2 == p.sigma2


BASE = "m = 1\nd = 1\nU_h = 0.5\nW_h = 1\nU_o = 0.2\nsigma2 = 1\nSigma0 = 0 0 0 1\n"


@pytest.mark.parametrize(
    "text, field",
    [
        (BASE.replace("U_o = 0.2\n", ""), "U_o"),
        (BASE.replace("W_h = 1", "W_h = 1 2"), "W_h"),
        (BASE.replace("sigma2 = 1", "sigma2 = abc"), "sigma2"),
        (BASE.replace("m = 1", "m = 1.5"), "m"),
        (BASE + "extra = 3\n", "extra"),
        (BASE.replace("sigma2 = 1", "sigma2 = -1"), "sigma2"),
    ],
)
def test_params_errors_name_the_field(tmp_path, text, field):
    path = tmp_path / "p.txt"
    path.write_text(text)
    with pytest.raises(ParameterError, match=field):
        mio.read_params(path)


def test_params_comments_ignored(tmp_path):
    path = tmp_path / "p.txt"
    path.write_text("# scalar example\n" + BASE.replace("U_h = 0.5", "U_h = 0.5  # hidden"))
    assert mio.read_params(path).U_h[0, 0] == 0.5
