"""Secret splitting for privacy-preserving SUM/COUNT/AVG over a
single-cloud outsourced table, with a Paillier baseline, a simulated
honest-but-curious store, a known-plaintext attack, and a benchmark
harness.
"""

from .core import PrivateKey, finalize_sum, keygen, load_key, reconstruct, save_key, split
from .errors import S4Error

__version__ = "0.1.0"

__all__ = [
    "PrivateKey",
    "S4Error",
    "finalize_sum",
    "keygen",
    "load_key",
    "reconstruct",
    "save_key",
    "split",
    "__version__",
]
