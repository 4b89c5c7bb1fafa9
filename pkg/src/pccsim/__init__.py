"""Parity check codes over Rayleigh fading: flip decoding, bounds and simulation."""

__version__ = "0.1.0"

from .code import CodeParams, encode, parity_ok, generator_matrix, parity_check_matrix
from .channel import SnrPoint, ChannelObservation, bpsk_map, rayleigh_sample, transmit
from .decoders import DecodeResult, hard_decide, flip_decode, soft_ml_decode, decode_throughput_probe
from .errors import CapacityError, UnderSampledError
