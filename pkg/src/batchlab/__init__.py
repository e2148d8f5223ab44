"""Batch-code laboratory: exact k-batch verification for systematic linear
codes, baseline constructions, tensor-rank redundancy certificates, and the
redundancy/locality exponent diagram."""

from batchlab.batch import (
    BatchRequest,
    RecoveryPlan,
    RecoverySet,
    batch_number,
    batch_number_oracle,
    is_k_batch,
    minimal_recovery_sets,
    serve_request,
    validate_plan,
)
from batchlab.code import (
    DualCodeword,
    LinearCode,
    code_from_generator,
    dual_to_recovery,
    min_distance,
    recoverable,
    recovery_to_dual,
)
from batchlab.constructions import grid_parity, random_systematic, replication, single_parity
from batchlab.field import Field, FieldElement, field_create
from batchlab.matrix import Matrix, rref
from batchlab.tensor import greedy_family, theorem_bound, verify_certificate

__version__ = "0.1.0"
