"""aitlab: a desk-scale laboratory for algorithmic information theory."""
from .bitf import BitfProgram, decode_bits, encode_bits, run, validate
from .enumeration import HaltingDatabase, count_valid, dovetail, gen_valid, load, merge, save

__version__ = "0.1.0"
