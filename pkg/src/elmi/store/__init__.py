from .db import (
    ConflictingVersion,
    JobRecord,
    NotFoundError,
    Store,
    ThreadExists,
    now_rfc3339,
    timed_lyric_from_dict,
    timed_lyric_to_dict,
)

__all__ = [
    "ConflictingVersion",
    "JobRecord",
    "NotFoundError",
    "Store",
    "ThreadExists",
    "now_rfc3339",
    "timed_lyric_from_dict",
    "timed_lyric_to_dict",
]
