"""Neighbourhood-preserving reduction of SPD matrices through the Log-Euclidean group."""

__version__ = "0.1.0"

from .descriptors import (  # noqa: E402
    DescriptorSet,
    FeatureSequence,
    covariance_descriptor,
    window_descriptors,
)
from .errors import (  # noqa: E402
    DegenerateInput,
    DomainError,
    HypothesisNotMet,
    IngestError,
    InvalidInput,
    LieLppError,
    NotPositiveDefinite,
)
from .reducers import (  # noqa: E402
    LppMap,
    ProjectionMap,
    lie_lpp_energy,
    lie_lpp_fit,
    lie_lpp_transform,
    lpp_fit,
    lpp_transform,
)
from .spd import (  # noqa: E402
    SpdMatrix,
    SymMatrix,
    exp_at,
    exp_sym,
    group_op,
    lem_distance,
    log_at,
    log_spd,
    make_spd,
)
