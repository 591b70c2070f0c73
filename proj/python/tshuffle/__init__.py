"""Random-transposition shuffle toolkit: exact small-deck laws, coupled
simulations, and the map-chain coupling engine, backed by the C++ core."""

from ._core import (
    RunRecord,
    couple,
    mixing_time,
    s3_square_check,
    s3_tv,
    scaling_csv,
)

__all__ = [
    "RunRecord",
    "couple",
    "mixing_time",
    "s3_square_check",
    "s3_tv",
    "scaling_csv",
]
