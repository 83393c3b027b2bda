"""Complex, admissible and real ranks of real binary forms.

Ranks and label sets are decided in exact rational arithmetic through the
apolar ideal; decompositions come with certified residual bounds.
"""

from .apolarity import BinaryForm, apolar_profile, catalecticant_kernel, complex_rank
from .realrank import (
    Exactness,
    Label,
    LabelSet,
    RankBound,
    RankReport,
    a_rank,
    admissible_rank,
    labels_at,
    rank_report,
    real_rank,
)
from .witness import CertificationFailed, decompose, verify_decomposition

__version__ = "0.1.0"

__all__ = [
    "BinaryForm",
    "CertificationFailed",
    "Exactness",
    "Label",
    "LabelSet",
    "RankBound",
    "RankReport",
    "a_rank",
    "admissible_rank",
    "apolar_profile",
    "catalecticant_kernel",
    "complex_rank",
    "decompose",
    "labels_at",
    "rank_report",
    "real_rank",
    "verify_decomposition",
]
