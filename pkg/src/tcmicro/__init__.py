"""k-Anonymous, t-close microdata releases via microaggregation: three
anonymization pipelines, independent verifiers, information-loss metrics, a
synthetic-data generator and a benchmarking CLI."""

from .dataset import (
    AnonymizedTable,
    AttributeSpec,
    NormalizationParams,
    Role,
    SynthConfig,
    Table,
    achieved_correlation,
    load_anonymized_csv,
    load_csv,
    minmax_params,
    synth_generate,
    write_csv,
)
from .emd import (
    Distribution,
    TableEmd,
    adjust_cluster_size,
    distribution_of,
    emd_cluster_vs_table,
    emd_ordered,
    max_emd_bound,
    min_emd_bound,
    required_cluster_size,
)
from .kfirst import generate_cluster, kfirst_partition, run_kfirst_algorithm
from .merge import merge_until_tclose, run_merge_algorithm
from .metrics import (
    KAnonymityCheck,
    RunReport,
    TClosenessCheck,
    cluster_size_stats,
    normalized_sse,
    transport_oracle_emd,
    verify_k_anonymity,
    verify_t_closeness,
)
from .microagg import (
    Cluster,
    Partition,
    aggregate,
    centroid,
    mdav_partition,
    normalized_qi,
    record_distance,
)
from .tfirst import RankedSubsets, build_cluster, run_tfirst_algorithm, split_subsets

__version__ = "0.1.0"

__all__ = [
    "AnonymizedTable",
    "AttributeSpec",
    "Cluster",
    "Distribution",
    "KAnonymityCheck",
    "NormalizationParams",
    "Partition",
    "RankedSubsets",
    "Role",
    "RunReport",
    "SynthConfig",
    "Table",
    "TableEmd",
    "TClosenessCheck",
    "achieved_correlation",
    "adjust_cluster_size",
    "aggregate",
    "build_cluster",
    "centroid",
    "cluster_size_stats",
    "distribution_of",
    "emd_cluster_vs_table",
    "emd_ordered",
    "generate_cluster",
    "kfirst_partition",
    "load_anonymized_csv",
    "load_csv",
    "max_emd_bound",
    "mdav_partition",
    "merge_until_tclose",
    "min_emd_bound",
    "minmax_params",
    "normalized_qi",
    "normalized_sse",
    "record_distance",
    "required_cluster_size",
    "run_kfirst_algorithm",
    "run_merge_algorithm",
    "run_tfirst_algorithm",
    "split_subsets",
    "synth_generate",
    "transport_oracle_emd",
    "verify_k_anonymity",
    "verify_t_closeness",
    "write_csv",
]
