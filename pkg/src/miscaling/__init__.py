"""Mutual-information scaling of symbol sequences.

Estimators of auto-mutual information, generators with known MI decay
(Gaussian copula, repetitive process, Ising chain), exact analysis of linear
recurrent networks, decay-law fitting and corpus audits.
"""

__version__ = "0.1.0"

from .analytic import (
    IsingParams,
    RepetitiveParams,
    gen_ising,
    gen_repetitive,
    ising_spin_correlation,
    mi_ising,
    mi_repetitive,
)
from .audit import AuditReport, VocabMap, audit, build_vocab, ingest_text, log_lag_grid
from .benchmark import BenchmarkRow, benchmark_estimator
from .copula import (
    ToeplitzCovariance,
    build_covariance,
    make_copula_corpus,
    mi_of_theta,
    sample_binary,
    sample_gaussian,
    small_c_mi,
    theta_of_mi,
)
from .estimation import (
    AutoMutualInformation,
    Corpus,
    CountTable,
    MICurve,
    SymbolSequence,
    auto_mi_curve,
    entropy_grassberger,
    entropy_plugin,
    mi_from_pair_counts,
    pair_count_matrix,
)
from .exceptions import (
    DomainError,
    FormatError,
    InsufficientDataError,
    MiScalingError,
    NumericalError,
    ParameterError,
)
from .fitting import (
    ExponentialDecay,
    FitResult,
    PowerLawDecay,
    compare_models,
    fit_exponential,
    fit_powerlaw,
)
from .linear_rnn import (
    CovarianceState,
    LinearRnnParams,
    PoleReport,
    classify_stability,
    mi_curve_linear_rnn,
    mi_gaussian,
    pole_polynomial,
    poles,
    propagate,
    propagate_mean,
    sample_linear_rnn,
    sigma_recurrence_oracle,
)
