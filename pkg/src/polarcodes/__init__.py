"""Polar codes: channel transforms, construction, SC decoding and bound checks."""

from .channel import (
    Channel,
    ChannelMetrics,
    bhattacharyya,
    channel_from_arg,
    entropy,
    make_bec,
    make_bsc,
    metrics,
    ml_error,
    random_symmetric_channel,
    validate,
)
from .codec import SCDecoder, decode_sc, decode_sc_genie, encode, polar_transform
from .construct import (
    CodeSpec,
    TheoryParams,
    construct_bec_exact,
    construct_by_sort,
    construct_two_step,
)
from .degrade import BinningConfig, SubchannelStats, bin_channel, estimate_all_subchannels
from .errors import BudgetExceededError, InvalidParameterError, PolarError, SizeLimitError
from .simulate import SimReport, simulate
from .transform import IndexPath, TransformSign, bec_all, evolve_path, transform_minus, transform_plus

__version__ = "0.1.0"
