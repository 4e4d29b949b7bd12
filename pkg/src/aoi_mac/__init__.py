"""Age of information of TDMA and FDMA update systems with short coded packets."""

from .analytics import (
    AoiStats,
    GeomMoments,
    SystemConfig,
    fdma_aoi,
    geom_moments,
    network_bounded_upper,
    scheme_aoi,
    tdma_aoi,
)
from .channel import ChannelSnr, e0, effective_snr, error_exponent, per_estimate
from .errors import DivergentAoIError, InvalidArgumentError, NumericFailureError
from .optimizer import OptimumPoint, SweepSpec, optimize_blocklength
from .per_model import PerModel
from .scheme import Scheme

__version__ = "0.1.0"
