"""Streaming per-key point-quantile sketches with frequency-gated admission."""

from .bench import TIMING_FIELDS, StreamReport, run_benchmark, run_single_key
from .calibration import Calibrator
from .datagen import (
    ExponentialValues,
    ParetoValues,
    Stream,
    StreamSpec,
    UniformKeys,
    UniformValues,
    ZipfKeys,
    generate,
    parse_stream_spec,
    read_csv,
    write_csv,
)
from .estimator import PointEstimator
from .quantiles import (
    NEG_INF,
    POS_INF,
    ExactOracle,
    average_error,
    exact_quantile,
    nearest_value,
    rank_of,
    rank_toward,
)
from .sketch import (
    CapacityPlan,
    PerKeyQuantileSketch,
    SketchParams,
    bucket_bytes,
    collision_probability,
    plan_capacity,
)
from .tower import TowerFilter
from .value_sketch import InsertOutcome, InsertResult, ValueSketch

__version__ = "0.1.0"

__all__ = [
    "Calibrator",
    "CapacityPlan",
    "ExactOracle",
    "ExponentialValues",
    "InsertOutcome",
    "InsertResult",
    "NEG_INF",
    "POS_INF",
    "ParetoValues",
    "PerKeyQuantileSketch",
    "PointEstimator",
    "SketchParams",
    "Stream",
    "StreamReport",
    "StreamSpec",
    "TIMING_FIELDS",
    "TowerFilter",
    "UniformKeys",
    "UniformValues",
    "ValueSketch",
    "ZipfKeys",
    "average_error",
    "bucket_bytes",
    "collision_probability",
    "exact_quantile",
    "generate",
    "nearest_value",
    "parse_stream_spec",
    "plan_capacity",
    "rank_of",
    "rank_toward",
    "read_csv",
    "run_benchmark",
    "run_single_key",
    "write_csv",
    "__version__",
]
