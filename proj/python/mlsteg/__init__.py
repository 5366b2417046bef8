"""Multi-level steganography over RTP: LACK with sequence-number matching underneath."""

from ._core import (
    ci95,
    decipher,
    decode_bits,
    encipher,
    low_bits,
    match_seq,
    md5,
    merge_steg,
    parse_frames,
    run_experiment,
    serialize_frame,
    split_steg,
    total_bandwidth,
    total_cost,
    UPPER_ONLY,
)

__all__ = [
    "ci95",
    "decipher",
    "decode_bits",
    "encipher",
    "low_bits",
    "match_seq",
    "md5",
    "merge_steg",
    "parse_frames",
    "run_experiment",
    "serialize_frame",
    "split_steg",
    "total_bandwidth",
    "total_cost",
    "UPPER_ONLY",
]
