"""Exact leakage audits for multi-server private information retrieval.

Construct a scheme from parameters, enumerate its full joint distribution
with exact rational weights, and verify that download cost, leakage,
privacy, correctness, and shared-key usage match their closed forms.
"""

from .audit import (
    DEFAULT_STATE_CAP,
    AuditReport,
    ExactDist,
    audit_scheme,
    encode_transcript,
    entropy,
    enumerate_joint,
    mutual_information,
    state_count,
)
from .errors import (
    ParameterError,
    PirLabError,
    ProtocolError,
    StateCapError,
    VerificationError,
)
from .schemes import (
    SCHEME_IDS,
    MessageSet,
    Query,
    Scheme,
    SchemeParams,
    UserKey,
    make_scheme,
)
from .tradeoff import (
    TradeoffPoint,
    capacity_alpha,
    d_min_individual,
    d_min_total,
    d_min_zero,
    reference_performance,
    rho_min_individual,
    rho_min_total,
    specialized_budgets,
    thresholds,
)

__version__ = "0.1.0"

__all__ = [
    "AuditReport",
    "DEFAULT_STATE_CAP",
    "ExactDist",
    "MessageSet",
    "ParameterError",
    "PirLabError",
    "ProtocolError",
    "Query",
    "SCHEME_IDS",
    "Scheme",
    "SchemeParams",
    "StateCapError",
    "TradeoffPoint",
    "UserKey",
    "VerificationError",
    "audit_scheme",
    "capacity_alpha",
    "d_min_individual",
    "d_min_total",
    "d_min_zero",
    "encode_transcript",
    "entropy",
    "enumerate_joint",
    "make_scheme",
    "mutual_information",
    "reference_performance",
    "rho_min_individual",
    "rho_min_total",
    "specialized_budgets",
    "state_count",
    "thresholds",
]
