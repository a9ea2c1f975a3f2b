"""Rolling-correlation, market-mode, inconsistency and volatility-dispersion
analytics for daily asset panels."""

from .correlation import (
    CorrelationMatrix,
    NormSeries,
    ReturnsPanel,
    correlation_matrix,
    l1_norm,
    log_returns,
    period_entry_stats,
    rolling_norm_series,
    smooth_series,
)
from .dispersion import (
    Dendrogram,
    DispersionMatrix,
    VolatilityDistribution,
    cut_clusters,
    dispersion_matrix,
    hierarchical_cluster,
    intra_volatility_variance,
    two_cluster_cut,
    variance_series,
    volatility_distribution,
    wasserstein,
)
from .errors import (
    AnalysisError,
    ConfigError,
    DegenerateDataError,
    EmptyPanelError,
    GapError,
    InputError,
    NumericalError,
    ParseError,
    SchemaError,
    TransportError,
)
from .inconsistency import (
    AffinityMatrix,
    InconsistencySeries,
    VolatilityPanel,
    distance_matrices,
    inconsistency_norms,
    rolling_volatility,
    to_affinity,
)
from .panel import (
    AssetMeta,
    Period,
    PeriodPartition,
    PricePanel,
    default_periods,
    load_panel,
    load_panel_with_report,
    write_panel,
)
from .simulate import simulated_market, write_simulated_dataset
from .spectral import (
    MarketSizeSeries,
    SpectralSeries,
    eigen_spectrum,
    lambda1_series,
    rolling_market_size,
    series_correlation,
    verify_operator_norm_identity,
)
from .turning_points import (
    TurningPoint,
    TurningPointParams,
    TurningPointSequence,
    detect_candidates,
    find_turning_points,
    min_adjust,
    refine,
)

__version__ = "0.1.0"
