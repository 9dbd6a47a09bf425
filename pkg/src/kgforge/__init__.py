"""Correlation and Granger-causality discovery over industrial time series,
assembled into an exportable knowledge graph."""

from .correlation import (
    CorrelationMatrix,
    NormalitySummary,
    correlation_matrix,
    euclidean_similarity,
    normality_summary,
    pearson,
    spearman,
)
from .errors import (
    ColumnMismatchError,
    DegenerateSeriesError,
    DeterministicRelationError,
    KgforgeError,
    MissingValuesError,
    RankDeficiencyError,
    SchemaError,
    SeriesTooShortError,
    TurtleParseError,
    UnstableSpecError,
)
from .granger import (
    DiscoveryConfig,
    DiscoveryOutcome,
    GrangerResult,
    benjamini_hochberg,
    discover,
    f_pvalue,
    f_statistic,
    granger_test,
)
from .ingest import (
    EncodingMap,
    PreprocessConfig,
    PreprocessReport,
    encode_categorical,
    impute,
    preprocess,
)
from .kg import (
    Edge,
    GraphQuery,
    KnowledgeGraph,
    Node,
    Provenance,
    build_graph,
    filter_graph,
    from_json,
    from_turtle,
    structurally_equal,
    to_json,
    to_turtle,
)
from .stationarity import (
    AdfResult,
    ColumnIntegration,
    IntegrationReport,
    adf_test,
    difference,
    integration_order,
)
from .synth import (
    BUILTIN_SPECS,
    ContemporaneousLink,
    Equation,
    ProcessSpec,
    Term,
    electrostatic_spec,
    generate,
)
from .table import Column, TimeSeriesTable, from_numeric, parse_csv, write_csv
from .var import Constraint, VarModel, build_design, fit_var, select_lag, stability

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_SPECS",
    "AdfResult",
    "Column",
    "ColumnIntegration",
    "ColumnMismatchError",
    "Constraint",
    "ContemporaneousLink",
    "CorrelationMatrix",
    "DegenerateSeriesError",
    "DeterministicRelationError",
    "DiscoveryConfig",
    "DiscoveryOutcome",
    "Edge",
    "EncodingMap",
    "Equation",
    "GrangerResult",
    "GraphQuery",
    "IntegrationReport",
    "KgforgeError",
    "KnowledgeGraph",
    "MissingValuesError",
    "Node",
    "NormalitySummary",
    "PreprocessConfig",
    "PreprocessReport",
    "ProcessSpec",
    "Provenance",
    "RankDeficiencyError",
    "SchemaError",
    "SeriesTooShortError",
    "Term",
    "TimeSeriesTable",
    "TurtleParseError",
    "UnstableSpecError",
    "VarModel",
    "adf_test",
    "benjamini_hochberg",
    "build_design",
    "build_graph",
    "correlation_matrix",
    "difference",
    "discover",
    "electrostatic_spec",
    "encode_categorical",
    "euclidean_similarity",
    "f_pvalue",
    "f_statistic",
    "filter_graph",
    "fit_var",
    "from_json",
    "from_numeric",
    "from_turtle",
    "generate",
    "granger_test",
    "impute",
    "integration_order",
    "normality_summary",
    "parse_csv",
    "pearson",
    "preprocess",
    "select_lag",
    "spearman",
    "stability",
    "structurally_equal",
    "to_json",
    "to_turtle",
    "write_csv",
]
